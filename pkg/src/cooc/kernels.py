"""Kernel backend selection.

The counting loops live in two signature-compatible modules: the compiled
extension `cooc._ckernels` and the pure-Python `cooc._pykernels`. Whichever
is usable is bound here at import; set COOC_PURE_PYTHON=1 to force the
Python fallback (the backend benchmark uses this).
"""

import os

if os.environ.get("COOC_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND

intersect_count = _impl.intersect_count
add_doc_pairs = _impl.add_doc_pairs
make_block_accumulator = _impl.make_block_accumulator
block_self_pairs = _impl.block_self_pairs
block_cross_pairs = _impl.block_cross_pairs
block_drain = _impl.block_drain
row_intersect_nonzero = _impl.row_intersect_nonzero
tail_count_sorted = _impl.tail_count_sorted
multi_scan_pass = _impl.multi_scan_pass
