"""Benchmark: compiled search kernel vs the pure-NumPy fallback.

Times penalty_components on random skew structure constants at n = 1 and
n = 2, then a short class search with whichever backend is active.

    python benchmarks/bench_kernels.py
"""

import timeit

import numpy as np

from hgkit import Dim, standard_hypercomplex, standard_metric
from hgkit import _backend, _kernels_np
from hgkit.search import search_class


def bench_kernel(n: int, repeats: int = 500) -> None:
    dim = Dim(n)
    g = standard_metric(dim)
    H = standard_hypercomplex(dim)
    rng = np.random.default_rng(0)
    C = rng.standard_normal((dim.d,) * 3)
    C = C - np.einsum('jik->ijk', C)
    args = (C, g.components, g.inverse, H.J1, H.J2, H.J3)

    t_np = timeit.timeit(lambda: _kernels_np.penalty_components(*args),
                         number=repeats) / repeats
    line = f"n={n} (d={dim.d}):  numpy {t_np * 1e6:8.1f} us/call"
    if _backend.COMPILED:
        t_cy = timeit.timeit(lambda: _backend.penalty_components(*args),
                             number=repeats) / repeats
        diff = np.abs(_backend.penalty_components(*args)
                      - _kernels_np.penalty_components(*args)).max()
        line += (f"   cython {t_cy * 1e6:8.1f} us/call"
                 f"   speedup {t_np / t_cy:5.1f}x   max component diff {diff:.1e}")
    else:
        line += "   (compiled kernel not available)"
    print(line)


def bench_search() -> None:
    import time
    t0 = time.time()
    out = search_class(("W3(J2)", "W3(J3)"), Dim(1), seed=0, budget=30, restarts=8)
    dt = time.time() - t0
    print(f"search W3(J2)&W3(J3) n=1, 8 restarts x 30 iters "
          f"[{_backend.BACKEND}]: {dt:.2f}s, "
          f"{out.diagnostics['evaluations']} kernel evaluations, "
          f"{len(out.results)} certified")


if __name__ == "__main__":
    print(f"active backend: {_backend.BACKEND}")
    for n in (1, 2):
        bench_kernel(n)
    bench_search()
