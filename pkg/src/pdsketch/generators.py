"""Input families for benchmarks and tests.

The random families are documented so benchmark rows are reproducible:
births are uniform in [0, 100], persistences uniform in (0, 50], and the
clustered family draws blob centers the same way before spreading points
around them.  The collinear family is the adversarial input for the naive
diagonal-as-a-point traversal: points one unit from the diagonal, spaced two
apart along a line, with persistence decreasing slightly along the line so
the greedy order walks the line end to end.
"""

from __future__ import annotations

import random

from .diagram import Diagram, Point, diag_dist
from .sketch import Sketch

FAMILIES = ("uniform", "clustered", "collinear-adversarial")


def uniform_diagram(n: int, rng: random.Random, mult_high: int = 1) -> Diagram:
    entries = []
    for _ in range(n):
        b = rng.uniform(0.0, 100.0)
        pers = rng.uniform(0.0, 50.0)
        while pers == 0.0:
            pers = rng.uniform(0.0, 50.0)
        m = rng.randint(1, mult_high) if mult_high > 1 else 1
        entries.append((Point(b, b + pers), m))
    return Diagram(entries)


def clustered_diagram(
    n: int, rng: random.Random, clusters: int = 5, spread: float = 2.0
) -> Diagram:
    centers = [
        (rng.uniform(0.0, 100.0), rng.uniform(1.0, 50.0)) for _ in range(max(1, clusters))
    ]
    entries = []
    for _ in range(n):
        cb, cp = centers[rng.randrange(len(centers))]
        b = cb + rng.gauss(0.0, spread)
        pers = abs(cp + rng.gauss(0.0, spread))
        while pers == 0.0:
            pers = abs(cp + rng.gauss(0.0, spread))
        entries.append((Point(b, b + pers), 1))
    return Diagram(entries)


def collinear_adversarial(n: int) -> Diagram:
    """Deterministic family on which the naive traversal goes quadratic."""
    entries = []
    for k in range(n):
        b = 2.0 * k
        delta = 0.5 * (n - k) / n if n else 0.0
        entries.append((Point(b, b + 2.0 + delta), 1))
    return Diagram(entries)


def make_diagram(family: str, n: int, seed: int) -> Diagram:
    if family == "uniform":
        return uniform_diagram(n, random.Random(seed))
    if family == "clustered":
        return clustered_diagram(n, random.Random(seed))
    if family == "collinear-adversarial":
        return collinear_adversarial(n)
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")


def spread(sketch: Sketch) -> float:
    """Largest over smallest pairwise distance, the diagonal as one point.

    Computed from the sketch: the smallest distance is the last insertion
    radius, the diameter is the larger of the coordinate span and the
    largest distance to the diagonal.
    """
    pts = sketch.order
    if len(pts) == 0:
        return 1.0
    span_b = max(p.birth for p in pts) - min(p.birth for p in pts)
    span_d = max(p.death for p in pts) - min(p.death for p in pts)
    diameter = max(span_b, span_d, max(diag_dist(p) for p in pts))
    closest = sketch.radii[len(pts) - 1] if len(pts) > 1 else sketch.radii[0]
    return diameter / closest if closest > 0 else 1.0
