"""Python bindings for the afroasr scoring core."""

from ._afroasr import (
    AfroAsrError,
    DataError,
    EntityLexicon,
    EntitySpan,
    ErrorRate,
    IoError,
    Label,
    RemoteError,
    SpanSource,
    align_words,
    cer,
    edit_distance,
    format_rate,
    gazetteer_tag,
    ne_concat_cer,
    normalize,
    relative_change,
    run,
    tokenize,
    wer,
)

__all__ = [
    "AfroAsrError",
    "DataError",
    "EntityLexicon",
    "EntitySpan",
    "ErrorRate",
    "IoError",
    "Label",
    "RemoteError",
    "SpanSource",
    "align_words",
    "cer",
    "edit_distance",
    "format_rate",
    "gazetteer_tag",
    "ne_concat_cer",
    "normalize",
    "relative_change",
    "run",
    "tokenize",
    "wer",
]
