"""Python access to the irslab core: hyperbolic isometries, pants and tree surfaces,
window subshifts, gluing patterns, Hilbert symbols and Chabauty ball proxies."""

import json as _json

from ._irslab import *  # noqa: F401,F403
from ._irslab import IrslabError, TOOL_VERSION, run_cli as _run_cli
from ._irslab import hilbert_oracle as _hilbert_oracle
from ._irslab import hilbert_symbol as _hilbert_symbol
from ._irslab import similarity_obstruction as _similarity_obstruction


def hilbert_symbol(a, b, p):
    """(a, b)_p for nonzero rationals given as ints or strings like "-3/49", p an odd prime."""
    return _hilbert_symbol(str(a), str(b), p)


def hilbert_oracle(a, b, p):
    """(a, b)_p by searching for a solution of z^2 = a x^2 + b y^2 modulo a power of p."""
    return _hilbert_oracle(str(a), str(b), p)


def similarity_obstruction(q, qp, d, p, root):
    """Similarity report for two diagonal forms over Q(sqrt d) at the place (p, root), as a dict."""
    return _json.loads(_similarity_obstruction(q, qp, d, p, root))


def run(*args):
    """Runs a CLI command. Returns (exit code, parsed JSON stdout or raw text, stderr)."""
    code, out, err = _run_cli([str(a) for a in args])
    try:
        parsed = _json.loads(out) if out.strip() else None
    except ValueError:
        parsed = out
    return code, parsed, err


__all__ = [name for name in dir() if not name.startswith("_")]
