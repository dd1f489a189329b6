"""Exception types shared across the toolkit."""

from __future__ import annotations


class SceneRecError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SceneRecError):
    """A file could not be parsed; carries the path and, when known, the line."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where = f"{self.path}: "
            if line is not None:
                where = f"{self.path}:{line}: "
        super().__init__(where + message)


class PipelineError(SceneRecError):
    """An error raised by a pipeline stage, tagged with the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
