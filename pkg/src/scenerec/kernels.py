"""Pixel-loop kernels with a compiled fast path.

The compiled extension (``scenerec._speedups``) is picked at import time
when available; setting ``SCENEREC_PURE_PYTHON=1`` forces the numpy
fallback. Both paths produce bit-identical counts and raise the same
errors, so everything above this module is backend-agnostic.
"""

from __future__ import annotations

import os

import numpy as np

IGNORE = 255


def _as_flat_u8(values: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.uint8).reshape(-1)


def confusion_counts_numpy(gt: np.ndarray, pred: np.ndarray, n_classes: int) -> np.ndarray:
    """Fallback (gt, pred) pair counting via masked bincount."""
    gt = _as_flat_u8(gt)
    pred = _as_flat_u8(pred)
    if gt.shape[0] != pred.shape[0]:
        raise ValueError("gt and pred pixel counts differ")
    if not 1 <= n_classes <= IGNORE:
        raise ValueError("n_classes out of range")
    keep = gt != IGNORE
    bad = np.flatnonzero(keep & ((gt >= n_classes) | (pred >= n_classes)))
    if bad.size:
        i = int(bad[0])
        if int(gt[i]) >= n_classes:
            raise ValueError(
                f"ground-truth value {int(gt[i])} at pixel {i} is outside the {n_classes}-class range"
            )
        if int(pred[i]) == IGNORE:
            raise ValueError(
                f"prediction contains ignore value 255 at pixel {i}; predictions must be complete"
            )
        raise ValueError(
            f"predicted value {int(pred[i])} at pixel {i} is outside the {n_classes}-class range"
        )
    flat = gt[keep].astype(np.int64) * n_classes + pred[keep]
    return np.bincount(flat, minlength=n_classes * n_classes).reshape(n_classes, n_classes)


def first_invalid_index_numpy(values: np.ndarray, n_classes: int) -> int:
    values = _as_flat_u8(values)
    bad = np.flatnonzero((values != IGNORE) & (values >= n_classes))
    return int(bad[0]) if bad.size else -1


_compiled = None
if not os.environ.get("SCENEREC_PURE_PYTHON"):
    try:
        from scenerec import _speedups as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "numpy"


def confusion_counts(gt: np.ndarray, pred: np.ndarray, n_classes: int) -> np.ndarray:
    """Count (gt, pred) pixel pairs into an (n_classes, n_classes) int64 grid.

    gt pixels equal to 255 are ignored; 255 anywhere in pred is an error
    (predictions must be complete), as is any id >= n_classes.
    """
    if _compiled is not None:
        return _compiled.confusion_counts(_as_flat_u8(gt), _as_flat_u8(pred), n_classes)
    return confusion_counts_numpy(gt, pred, n_classes)


def first_invalid_index(values: np.ndarray, n_classes: int) -> int:
    """Index of the first value not in {0..n_classes-1, 255}, or -1."""
    if _compiled is not None:
        return _compiled.first_invalid_index(_as_flat_u8(values), n_classes)
    return first_invalid_index_numpy(values, n_classes)
