"""Closedness of symmetric 3-differentials on complex surfaces, decided on
truncated power series at a base point."""

__version__ = "0.1.0"

from .criteria import (  # noqa: E402
    Verdict,
    is_closed,
    oracle_decompose,
    proof_crosschecks,
    thm1_evaluate,
    thm2_evaluate,
)
from .exterior import OneForm, Sym3Diff, TwoForm  # noqa: E402
from .parser import format_series, parse_expression  # noqa: E402
from .series import Series2  # noqa: E402
from .web import WebFrame, build_frame  # noqa: E402

__all__ = [
    "OneForm",
    "Series2",
    "Sym3Diff",
    "TwoForm",
    "Verdict",
    "WebFrame",
    "build_frame",
    "format_series",
    "is_closed",
    "oracle_decompose",
    "parse_expression",
    "proof_crosschecks",
    "thm1_evaluate",
    "thm2_evaluate",
]
