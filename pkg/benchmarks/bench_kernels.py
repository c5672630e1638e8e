"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot kernels (batched tridiagonal solves, plaquette windings)
and one full preconditioned solver iteration with each backend.  Run after
an editable install:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from gpvortex._kernels import _fallback

try:
    from gpvortex._kernels import _native
except ImportError:
    _native = None


def timeit(fn, *args, repeat=20):
    fn(*args)   # warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_tridiag(backend, M, n):
    rng = np.random.default_rng(0)
    dl = rng.uniform(-1, 0, (M, n))
    du = rng.uniform(-1, 0, (M, n))
    dl[:, 0] = du[:, -1] = 0.0
    d = 2.5 + np.abs(dl) + np.abs(du)
    b = rng.normal(size=(M, n)) + 1j * rng.normal(size=(M, n))
    return timeit(backend.solve_tridiag_many, dl, d, du, b)


def bench_winding(backend, Nr, Nt):
    rng = np.random.default_rng(1)
    phase = rng.uniform(-np.pi, np.pi, (Nr, Nt))
    return timeit(backend.plaquette_winding, phase)


def bench_solver_iteration(pure_python):
    import importlib
    import os
    os.environ["GPVORTEX_PURE_PYTHON"] = "1" if pure_python else ""
    import gpvortex._kernels as K
    importlib.reload(K)
    import gpvortex.solver2d as S
    importlib.reload(S)
    from gpvortex.grids import polar_disc
    from gpvortex.regime import make_regime
    reg = make_regime(0.05, 0.35)
    grid = polar_disc(257, 512)
    # far-from-converged start so every iteration is a productive step
    opts = S.SolveOptions(max_iters=40, init="random-phase", seed=1)
    t0 = time.perf_counter()
    res = S.minimize_gp(reg, grid, opts)
    per_iter = (time.perf_counter() - t0) / res.iterations
    return per_iter


def main():
    rows = []
    for M, n in ((512, 257), (1024, 513)):
        t_f = bench_tridiag(_fallback, M, n)
        t_n = bench_tridiag(_native, M, n) if _native else float("nan")
        rows.append((f"tridiag batch {M}x{n}", t_f, t_n))
    for Nr, Nt in ((257, 512), (513, 1024)):
        t_f = bench_winding(_fallback, Nr, Nt)
        t_n = bench_winding(_native, Nr, Nt) if _native else float("nan")
        rows.append((f"plaquette winding {Nr}x{Nt}", t_f, t_n))
    print(f"{'kernel':<32} {'python':>10} {'native':>10} {'speedup':>8}")
    for name, t_f, t_n in rows:
        sp = t_f / t_n if t_n == t_n else float("nan")
        print(f"{name:<32} {t_f * 1e3:>8.2f}ms {t_n * 1e3:>8.2f}ms {sp:>7.1f}x")
    it_py = bench_solver_iteration(pure_python=True)
    it_nat = bench_solver_iteration(pure_python=False)
    print(f"{'solver iteration 257x512':<32} {it_py * 1e3:>8.2f}ms "
          f"{it_nat * 1e3:>8.2f}ms {it_py / it_nat:>7.1f}x")


if __name__ == "__main__":
    main()
