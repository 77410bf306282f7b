"""Compare the compiled and pure-Python table kernels.

Builds the order/join/meet tables of a Boolean lattice and of a random
distributive lattice, then times each kernel on identical inputs.

    python3 benchmarks/bench_kernels.py --atoms 6 --repeat 3
"""

from __future__ import annotations

import argparse
import random
import timeit

from pdel import _pykernels
from pdel.algebra import FiniteLattice, _int_array, powerset_lattice

try:
    from pdel import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def tables(L: FiniteLattice):
    els = L.elements
    n = len(els)
    idx = {x: k for k, x in enumerate(els)}
    leq = bytes(1 if x & ~y == 0 else 0 for x in els for y in els)
    join = _int_array([idx[x | y] for x in els for y in els])
    meet = _int_array([idx[x & y] for x in els for y in els])
    imp = _int_array([idx[L.implies(x, y)] for x in els for y in els])
    return n, leq, join, meet, imp


def random_lattice(rng: random.Random, points: int, density: float) -> FiniteLattice:
    lower = [0] * points
    for b in range(points):
        for a in range(b):
            if rng.random() < density:
                lower[b] |= 1 << a | lower[a]
    return FiniteLattice(lower)


def cases(n, leq, join, meet, imp, order, lower):
    return {
        "order_closure": lambda k: k.order_closure(n, leq),
        "lub_table": lambda k: k.lub_table(n, leq),
        "distributivity": lambda k: k.distributivity_violation(n, join, meet),
        "residuation": lambda k: k.residuation_violation(n, leq, meet, imp),
        "downsets": lambda k: sorted(k.downsets(order, lower)),
    }


def _normal(x):
    if isinstance(x, tuple):
        return tuple(_normal(y) for y in x)
    if x is None or isinstance(x, int):
        return x
    return sorted(x) if isinstance(x, set) else list(x)


def bench(name: str, L: FiniteLattice, repeat: int):
    n, leq, join, meet, imp = tables(L)
    order = L.linear_extension()
    lower = list(L.lower)
    print(f"{name}: {n} elements, {L.nbits} join-irreducibles")
    print(f"  {'kernel':<16}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for label, fn in cases(n, leq, join, meet, imp, order, lower).items():
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=repeat))
        if _ckernels is None:
            print(f"  {label:<16}{tp:>12.4f}{'-':>12}{'-':>10}")
            continue
        a, b = fn(_pykernels), fn(_ckernels)
        if _normal(a) != _normal(b):
            raise SystemExit(f"{label}: backends disagree")
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=repeat))
        print(f"  {label:<16}{tp:>12.4f}{tc:>12.4f}{tp / max(tc, 1e-9):>9.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--atoms", type=int, default=6, help="atoms of the Boolean lattice")
    ap.add_argument("--points", type=int, default=9, help="poset points of the random lattice")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    bench(f"powerset of {args.atoms}", powerset_lattice(args.atoms), args.repeat)
    bench(f"random lattice on {args.points} points", random_lattice(random.Random(args.seed), args.points, 0.3),
          args.repeat)


if __name__ == "__main__":
    main()
