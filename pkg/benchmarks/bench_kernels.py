"""Compare the compiled kernels against the pure NumPy fallback.

Each kernel is timed on inputs shaped like the ones the realization pipeline
actually produces (sorted packed int64 cells, modest finite-field matrices).
An optional end to end run times a full graph -> chi -> graph round trip in a
subprocess, once per backend, since the backend is fixed at import time.

Usage:
    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --cells 200000 --repeat 5 --e2e
"""

import argparse
import subprocess
import sys
import time

import numpy as np

from quotfix import _cells, _pure

try:
    from quotfix import _kernels
except ImportError:
    _kernels = None


def _box_cells(rng, layout, side, count):
    # sorted, duplicate-free packed cells inside a cube of the given side
    pts = rng.integers(0, side, size=(count, layout.dim))
    return np.unique(layout.pack_array(pts))


def make_inputs(rng, n_cells, rank_rows):
    layout = _cells.PackLayout.default(3)
    side = max(4, int(round(n_cells ** (1.0 / 3))) * 2)
    cells = _box_cells(rng, layout, side, n_cells)
    needles = np.sort(rng.choice(cells, size=cells.size // 2, replace=False))
    miss = needles + 1  # mostly absent, exercises the not-found path

    k = 12
    chunks = [np.sort(rng.choice(cells, size=cells.size // k)) for _ in range(k)]
    vals = [rng.integers(0, 5, size=c.size).astype(np.int64) for c in chunks]

    keys = np.sort(rng.choice(cells, size=cells.size * 2))
    kvals = rng.integers(0, 10, size=keys.size).astype(np.int64)

    mat = rng.integers(0, 10007, size=(rank_rows, rank_rows + rank_rows // 2))
    mat = mat.astype(np.int64)

    segs = []
    for _ in range(64):
        a = rng.integers(0, 4 * side, size=3)
        b = rng.integers(0, 4 * side, size=3)
        segs.append((a.astype(np.int64), b.astype(np.int64)))

    return {
        "merge_indices": lambda mod: (
            mod.merge_indices(cells, needles),
            mod.merge_indices(cells, miss),
        ),
        "merge_min": lambda mod: mod.merge_min(list(chunks), list(vals)),
        "grouped_min": lambda mod: mod.grouped_min(keys, kvals),
        "label_components": lambda mod: mod.label_components(cells, layout.steps()),
        "gfp_rref": lambda mod: mod.gfp_rref(mat.copy(), 10007),
        "supercover": lambda mod: [mod.supercover(a, b, 4) for a, b in segs],
    }


def best_of(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return min(out)


def run_micro(args):
    rng = np.random.default_rng(args.seed)
    tasks = make_inputs(rng, args.cells, args.rank_rows)

    print(f"{'kernel':<18} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for name, task in tasks.items():
        t_pure = best_of(lambda: task(_pure), args.repeat)
        if _kernels is None:
            print(f"{name:<18} {t_pure * 1e3:9.2f}ms {'n/a':>10} {'':>8}")
            continue
        t_fast = best_of(lambda: task(_kernels), args.repeat)
        ratio = t_pure / t_fast if t_fast > 0 else float("inf")
        print(
            f"{name:<18} {t_pure * 1e3:9.2f}ms {t_fast * 1e3:8.2f}ms {ratio:7.1f}x"
        )


E2E_SNIPPET = """
import time
from quotfix import _backend, fixtures, realize

G = fixtures.k33_structure()
t0 = time.perf_counter()
for _ in range(3):
    realize.graph_to_chi(G, 4, G.rank + 1, cap=10**8)
print(f"{_backend.BACKEND}: {time.perf_counter() - t0:.2f}s for 3 rounds")
"""


def run_e2e():
    import os

    sys.stdout.flush()  # keep ordering sane when piped
    for env in (None, "1"):
        e = dict(os.environ)
        e.pop("QUOTFIX_PURE", None)
        if env:
            e["QUOTFIX_PURE"] = env
        subprocess.run([sys.executable, "-c", E2E_SNIPPET], env=e, check=True)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=120000, help="cell count for array kernels")
    ap.add_argument("--rank-rows", type=int, default=160, help="rows of the rref test matrix")
    ap.add_argument("--repeat", type=int, default=3, help="take the best of this many runs")
    ap.add_argument("--seed", type=int, default=20240817)
    ap.add_argument("--e2e", action="store_true", help="also time a realization round trip per backend")
    args = ap.parse_args(argv)

    if _kernels is None:
        print("compiled kernels not built, timing the fallback only", file=sys.stderr)
    run_micro(args)
    if args.e2e:
        run_e2e()
    return 0


if __name__ == "__main__":
    sys.exit(main())
