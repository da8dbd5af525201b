"""Exception hierarchy for the toolkit."""
from __future__ import annotations


class EyeframesError(Exception):
    """Base class for all toolkit errors."""


# --- schema / configuration ---------------------------------------------

class UnknownTypeError(EyeframesError):
    """A string is not a known entity type or frame element type."""


class SchemaConfigError(EyeframesError):
    pass


class MalformedConfig(SchemaConfigError):
    pass


class MissingElement(SchemaConfigError):
    def __init__(self, name: str):
        super().__init__(f"attachment map does not cover frame element {name!r}")
        self.name = name


# --- standoff parsing -----------------------------------------------------

class BratParseError(EyeframesError):
    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class MalformedLine(BratParseError):
    pass


class SpanOutOfBounds(BratParseError):
    pass


class SurfaceMismatch(BratParseError):
    pass


class DanglingReference(BratParseError):
    pass


# --- corpus operations ----------------------------------------------------

class EmptyCorpus(EyeframesError):
    pass


class SizeMismatch(EyeframesError):
    pass


class TextMismatch(EyeframesError):
    def __init__(self, doc_id: str):
        super().__init__(f"annotation layers disagree on the text of {doc_id!r}")
        self.doc_id = doc_id


class CorpusMismatch(EyeframesError):
    pass


# --- query generation / windowing ------------------------------------------

class UnlicensedPair(EyeframesError):
    def __init__(self, element: str, anchor_kind: str | None):
        super().__init__(
            f"element {element!r} is not licensed for anchor kind {anchor_kind!r}"
        )
        self.element = element
        self.anchor_kind = anchor_kind


class AnchorTooLong(EyeframesError):
    pass


# --- backends --------------------------------------------------------------

class BackendError(EyeframesError):
    pass


class BackendUnavailable(BackendError):
    pass


class BackendTimeout(BackendError):
    def __init__(self, ids: list[str]):
        super().__init__(f"backend timed out on {len(ids)} request item(s)")
        self.ids = ids


class MalformedResponse(BackendError):
    pass


class UnparsableQuery(BackendError):
    pass


# --- generation / CLI --------------------------------------------------------

class VocabularyMissing(EyeframesError):
    def __init__(self, name: str):
        super().__init__(f"no vocabulary entries for {name!r}")
        self.name = name


class ConfigError(EyeframesError):
    pass
