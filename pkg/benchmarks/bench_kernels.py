"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--group NAME]

Each kernel runs on the element array of a corpus group (default ``ex31a``,
5250 permutations of degree 32). The numba timings exclude compilation;
a warm-up call is made first. The end-to-end row builds the group, its
classes and the 2-regular graph in a fresh interpreter with each setting
of ``CDGRAPH_NUMBA``, so it includes import and compile cost.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from cdgraph import _kernels
from cdgraph.constructors import build, builtin_corpus

END_TO_END = (
    "import sys\n"
    "from cdgraph import build, build_graph, conjugacy_classes\n"
    "from cdgraph.constructors import builtin_corpus\n"
    "G = build(dict(builtin_corpus())[sys.argv[1]])\n"
    "build_graph(conjugacy_classes(G), 2)\n"
)


def workloads(G):
    rows = np.ascontiguousarray(G.perms)
    rng = np.random.default_rng(0)
    other = rows[rng.permutation(len(rows))]
    g = rows[len(rows) // 2]
    ginv = np.argsort(g).astype(rows.dtype)
    exps = rng.integers(0, 64, size=len(rows))
    base = list(range(min(G.degree, 6)))
    n = 400
    sizes = rng.integers(2, 200, size=n)
    adj = np.gcd.outer(sizes, sizes) > 1
    np.fill_diagonal(adj, False)
    src = rng.integers(0, len(rows), size=len(rows))
    dst = rng.integers(0, len(rows), size=len(rows))
    return {
        "compose": lambda k: k.compose(rows, other),
        "conjugate": lambda k: k.conjugate(rows, g, ginv),
        "row_keys": lambda k: k.row_keys(rows, base, G.degree),
        "orders": lambda k: k.orders(rows),
        "powers": lambda k: k.powers(rows, exps),
        "commutes_with": lambda k: k.commutes_with(rows, g),
        "component_labels": lambda k: k.component_labels(len(rows), src, dst),
        "all_pairs_bfs": lambda k: k.all_pairs_bfs(np.ascontiguousarray(adj)),
    }


def best_of(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def end_to_end(name, flag):
    env = {**os.environ, "CDGRAPH_NUMBA": flag}
    code = f"import time; t=time.perf_counter()\n{END_TO_END}print(time.perf_counter()-t)"
    out = subprocess.run([sys.executable, "-c", code, name], env=env, check=True,
                         capture_output=True, text=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--group", default="ex31a")
    args = parser.parse_args(argv)

    G = build(dict(builtin_corpus())[args.group])
    print(f"group {args.group}: order {G.order}, degree {G.degree}")
    impls = [("numpy", _kernels.numpy_impl)]
    if _kernels.numba_impl is not None:
        impls.append(("numba", _kernels.numba_impl))
    else:
        print("numba is not installed; only the numpy column is shown")

    header = f"{'kernel':<18}" + "".join(f"{n + ' ms':>12}" for n, _ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, fn in workloads(G).items():
        times = [best_of(lambda: fn(k), args.repeat) * 1e3 for _, k in impls]
        line = f"{name:<18}" + "".join(f"{t:>12.3f}" for t in times)
        if len(times) == 2:
            line += f"{times[0] / max(times[1], 1e-9):>9.1f}x"
        print(line)

    flags = [("numpy", "0")] + ([("numba", "1")] if len(impls) == 2 else [])
    times = [end_to_end(args.group, f) for _, f in flags]
    print(f"{'end-to-end s':<18}" + "".join(f"{t:>12.2f}" for t in times))


if __name__ == "__main__":
    main()
