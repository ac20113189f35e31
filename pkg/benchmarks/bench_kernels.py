"""Time the compiled enumeration kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py [--repeat 3]

Each case runs on both backends, the answers are compared, and the best
wall time of ``--repeat`` runs is reported.
"""
import argparse
import random
import time
from fractions import Fraction

from manna.generators import gen_nonexistence
from manna.kernel import _ckernel, _pykernel
from manna.oracle import integer_row


def _cases():
    inst = gen_nonexistence()
    rows, scales = [], []
    for row in inst.values:
        ints, s = integer_row(row, Fraction(1, 4))
        rows.append(ints)
        scales.append(s)
    mms = [s // 4 for s in scales]
    rng = random.Random(0)
    weights = [rng.randint(1, 100) for _ in range(13)]
    lo = [sum(max(v, 0) for v in r) // 4 for r in rows]
    yield "max_min_partition m=13 n=3", "max_min_partition", (weights, 3, True)
    yield "max_min_partition nonexistence row", "max_min_partition", (rows[0], 3, True)
    yield "best_ratio nonexistence (3^15)", "best_ratio", (rows, mms)
    yield "find_dominator none exists (3^15)", "find_dominator", (rows, lo, lo)
    need = [0, 0, 0]
    yield "best_feasible nonexistence", "best_feasible", (rows, need)


def _time(fn, args, repeat):
    best, result = None, None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--skip-python", action="store_true",
                        help="only time the compiled backend")
    args = parser.parse_args()
    if _ckernel is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    print(f"{'case':40s} {'cython':>10s} {'python':>10s} {'speedup':>8s}")
    for label, name, case in _cases():
        c_time, c_out = _time(getattr(_ckernel, name), case, args.repeat)
        if args.skip_python:
            print(f"{label:40s} {c_time:10.4f}")
            continue
        p_time, p_out = _time(getattr(_pykernel, name), case, 1)
        if _normalize(c_out) != _normalize(p_out):
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:40s} {c_time:10.4f} {p_time:10.4f} {p_time / c_time:8.1f}x")


def _normalize(out):
    if isinstance(out, tuple):
        return tuple(list(x) if isinstance(x, (list, tuple)) else x for x in out)
    return None if out is None else list(out)


if __name__ == "__main__":
    main()
