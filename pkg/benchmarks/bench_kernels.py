"""Time the compiled interval kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]

Both backends are imported directly, so the environment switch is not needed.
Results are checked for equality before timing.
"""

import argparse
import random
import sys
import timeit
from array import array

from ltrm.kernels import _pykernels

try:
    from ltrm.kernels import _ckernels
except ImportError:
    _ckernels = None


def make_inputs(n: int, seed: int):
    rng = random.Random(seed)
    starts = [rng.randrange(0, 50 * n) for _ in range(n)]
    ends = [s + rng.randrange(0, 200) for s in starts]
    groups = [rng.randrange(n // 10 + 1) for _ in range(n)]
    return array("q", groups), array("q", starts), array("q", ends)


def cases(groups, starts, ends):
    mid = starts[len(starts) // 2]
    return {
        "contains_point": lambda k: k.contains_point(starts, ends, mid),
        "overlapping": lambda k: k.overlapping(starts, ends, mid, mid + 5000),
        "overlap_pairs": lambda k: k.overlap_pairs(groups, starts, ends),
        "coalesce_runs": lambda k: k.coalesce_runs(groups, starts, ends),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20_000, help="intervals per input")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels are not built; reinstall with Cython available", file=sys.stderr)
        return 1

    bench = cases(*make_inputs(args.n, args.seed))
    print(f"n={args.n}  best of {args.repeat}")
    print(f"{'kernel':<16}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, call in bench.items():
        assert call(_pykernels) == call(_ckernels), name
        py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=args.repeat))
        cy = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:<16}{py * 1e3:>12.2f}{cy * 1e3:>12.2f}{py / cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
