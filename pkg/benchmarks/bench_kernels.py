"""Time the compiled and numpy kernel backends on representative problems.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 200]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from geopack.kernels import _pure
from geopack.models import build

try:
    from geopack.kernels import _fast
except ImportError:  # extension not built
    _fast = None

CASES = [
    ("minmax", 30, {"d": 3}),
    ("circles", 32, {"variant": "square"}),
    ("hexagons", 11, {}),
]


def _args(p):
    m = p.meta
    if p.family == "minmax":
        return "minmax_eval", (m["n"], m["d"], m["formulation"] == "dual")
    if p.family == "circles":
        return "circles_eval", (m["n"],)
    return "hex_eval", (m["n"], m["literal"])


def _point(p, rng):
    lo = np.where(np.isfinite(p.lower), p.lower, -3.0)
    hi = np.where(np.isfinite(p.upper), p.upper, lo + 6.0)
    return rng.uniform(lo, hi)


def bench(repeat: int) -> list[tuple[str, str, float, float | None]]:
    rng = np.random.default_rng(0)
    rows = []
    for family, n, kw in CASES:
        p = build(family, n, **kw)
        name, args = _args(p)
        x = _point(p, rng)
        g, jv = p.jacobian(x)
        y = rng.normal(size=len(g))
        c = p.objective.coeffs
        is_eq = p.block.is_eq.astype(np.uint8)
        label = f"{family} n={n}"
        for kernel, call in [
            (name, lambda mod: getattr(mod, name)(x, *args)),
            ("al_merit", lambda mod: mod.al_merit(c, x, g, jv, p.block.rows, p.block.cols,
                                                  y, 10.0, is_eq)),
        ]:
            t_pure = min(timeit.repeat(lambda: call(_pure), number=repeat, repeat=3)) / repeat
            t_fast = None
            if _fast is not None:
                t_fast = min(timeit.repeat(lambda: call(_fast), number=repeat,
                                           repeat=3)) / repeat
            rows.append((label, kernel, t_pure, t_fast))
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    print(f"{'problem':<16}{'kernel':<14}{'numpy us':>12}{'cython us':>12}{'speedup':>10}")
    for label, kernel, t_pure, t_fast in bench(args.repeat):
        fast = f"{t_fast * 1e6:12.1f}" if t_fast is not None else f"{'n/a':>12}"
        speed = f"{t_pure / t_fast:10.1f}" if t_fast else f"{'':>10}"
        print(f"{label:<16}{kernel:<14}{t_pure * 1e6:12.1f}{fast}{speed}")


if __name__ == "__main__":
    main()
