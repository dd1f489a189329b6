# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels: pixel confusion counting and mask validation.

Semantics must stay bit-identical to the numpy fallbacks in
``scenerec.kernels``; a single fused pass over the pixels is the whole
point of compiling.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF IGNORE = 255


def confusion_counts(const unsigned char[::1] gt, const unsigned char[::1] pred,
                     Py_ssize_t n_classes):
    """Count (gt, pred) pixel pairs into an n_classes x n_classes int64 grid.

    Pixels with gt == 255 are skipped; 255 or an out-of-range id in pred,
    or an out-of-range id in gt, raises ValueError.
    """
    cdef Py_ssize_t npix = gt.shape[0]
    if pred.shape[0] != npix:
        raise ValueError("gt and pred pixel counts differ")
    if n_classes < 1 or n_classes > IGNORE:
        raise ValueError("n_classes out of range")
    out_arr = np.zeros((n_classes, n_classes), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, bad_gt = -1, bad_pred = -1
    cdef int g, p
    with nogil:
        for i in range(npix):
            g = gt[i]
            if g == IGNORE:
                continue
            if g >= n_classes:
                bad_gt = i
                break
            p = pred[i]
            if p >= n_classes:
                bad_pred = i
                break
            out[g, p] += 1
    if bad_gt >= 0:
        raise ValueError(
            f"ground-truth value {gt[bad_gt]} at pixel {bad_gt} is outside the "
            f"{n_classes}-class range"
        )
    if bad_pred >= 0:
        if pred[bad_pred] == IGNORE:
            raise ValueError(
                f"prediction contains ignore value 255 at pixel {bad_pred}; "
                "predictions must be complete"
            )
        raise ValueError(
            f"predicted value {pred[bad_pred]} at pixel {bad_pred} is outside the "
            f"{n_classes}-class range"
        )
    return out_arr


def first_invalid_index(const unsigned char[::1] values, Py_ssize_t n_classes):
    """Index of the first value not in {0..n_classes-1, 255}, or -1."""
    cdef Py_ssize_t i, n = values.shape[0], bad = -1
    cdef int v
    with nogil:
        for i in range(n):
            v = values[i]
            if v != IGNORE and v >= n_classes:
                bad = i
                break
    return bad
