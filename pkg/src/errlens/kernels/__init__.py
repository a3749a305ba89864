"""Hot-kernel backend selection.

The numba backend is the default; set ERRLENS_NO_NUMBA=1 to force the
pure-numpy fallback (also used automatically when numba is not importable).
`benchmarks/bench_kernels.py` compares the two.
"""

import os

_disabled = os.environ.get("ERRLENS_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

if _disabled:
    from errlens.kernels import _numpy as _impl
else:
    try:
        from errlens.kernels import _numba as _impl
    except ImportError:
        from errlens.kernels import _numpy as _impl

BACKEND = _impl.NAME

node_split_counts = _impl.node_split_counts
pair_counts = _impl.pair_counts
bootstrap_means = _impl.bootstrap_means
sq_dists = _impl.sq_dists
binary_search_affinities = _impl.binary_search_affinities
tsne_grad = _impl.tsne_grad

__all__ = [
    "BACKEND",
    "node_split_counts",
    "pair_counts",
    "bootstrap_means",
    "sq_dists",
    "binary_search_affinities",
    "tsne_grad",
]
