"""Brute-force reference implementations.

These are deliberately simple, quadratic-or-worse algorithms used as oracles
by the test suite and exposed through the CLI's --exact paths.  They share
only the elementary metric helpers with the fast code; every algorithmic
decision (traversal, matching, feasibility) is made independently here.
Size caps guard against accidental blowup on large inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .diagram import DIAG, Diagram, Point, diag_dist, linf_dist
from .errors import ValidationError
from .sketch import TransportationPlan, canonical_moves


@dataclass(frozen=True)
class GreedyResult:
    """Outcome of a greedy traversal: order, error radii, and per-step plans."""

    order: tuple[Point, ...]
    radii: tuple[float, ...]
    plans: tuple[TransportationPlan, ...]
    complete: bool = True


def brute_greedy(diagram: Diagram) -> GreedyResult:
    """O(n^2) farthest-point traversal seeded by the whole diagonal.

    Tie rules (shared with the fast builder): the next point is the farthest
    uninserted point, ties to the lexicographically smallest; a point is
    reassigned to a new center only on strict improvement, so ties stay with
    the earlier-inserted center and the diagonal beats everything it ties
    with.  Plans come from direct nearest-center counting.
    """
    pts = sorted(diagram.points)
    mass = {p: diagram.mult(p) for p in pts}
    n = len(pts)
    if n == 0:
        return GreedyResult(order=(), radii=(0.0,), plans=())
    dist = [diag_dist(p) for p in pts]
    assign: list[object] = [DIAG] * n  # nearest center: DIAG or order index
    inserted = [False] * n
    order: list[Point] = []
    radii: list[float] = []
    plans: list[TransportationPlan] = []
    for step in range(n):
        best = -1
        for i in range(n):
            if not inserted[i] and (best < 0 or dist[i] > dist[best]):
                best = i
        center = pts[best]
        inserted[best] = True
        order.append(center)
        radii.append(dist[best])
        moved: dict = {}
        for i in range(n):
            if inserted[i] and i != best:
                continue
            d = linf_dist(center, pts[i])
            if d < dist[i]:
                src = assign[i]
                moved[src] = moved.get(src, 0) + mass[pts[i]]
                dist[i] = d
                assign[i] = step
        plans.append(TransportationPlan(target=step, moves=canonical_moves(moved)))
    radii.append(0.0)
    return GreedyResult(order=tuple(order), radii=tuple(radii), plans=tuple(plans))


def brute_hausdorff(
    a: Sequence[Point], b: Sequence[Point], *, diagonal: bool = True
) -> float:
    """Double max-min scan; with ``diagonal`` both sets include the diagonal."""

    def one_sided(src, dst):
        worst = 0.0
        for p in src:
            d = diag_dist(p) if diagonal else None
            for q in dst:
                dq = linf_dist(p, q)
                if d is None or dq < d:
                    d = dq
            if d is None:
                raise ValidationError("Hausdorff distance to an empty set without diagonal")
            worst = max(worst, d)
        return worst

    return max(one_sided(a, b), one_sided(b, a))


def _expand(diagram: Diagram) -> list[Point]:
    units: list[Point] = []
    for p, m in diagram:
        units.extend([p] * m)
    return units


def brute_bottleneck(a: Diagram, b: Diagram, cap: int = 14) -> float:
    """Exact bottleneck distance by unit expansion and perfect-matching tests.

    Each off-diagonal unit on one side gets a dedicated diagonal copy on the
    other; feasibility at a threshold is a perfect matching in the unit graph
    (augmenting-path search), and the answer is found by binary search over
    the candidate distances.
    """
    ua, ub = _expand(a), _expand(b)
    la, lb = len(ua), len(ub)
    if la + lb > cap:
        raise ValidationError(f"oracle cap exceeded: {la + lb} units > {cap}")
    if la == 0 and lb == 0:
        return 0.0
    cands = {0.0}
    cands.update(diag_dist(p) for p in ua)
    cands.update(diag_dist(q) for q in ub)
    cands.update(linf_dist(p, q) for p in ua for q in ub)
    cands = sorted(cands)

    # Left side: la real units then lb diagonal copies; right side mirrors.
    n_left, n_right = la + lb, lb + la

    def feasible(alpha: float) -> bool:
        adj: list[list[int]] = []
        for i in range(n_left):
            row = []
            for j in range(n_right):
                if i < la and j < lb:
                    ok = linf_dist(ua[i], ub[j]) <= alpha
                elif i < la:
                    ok = diag_dist(ua[i]) <= alpha
                elif j < lb:
                    ok = diag_dist(ub[j]) <= alpha
                else:
                    ok = True
                if ok:
                    row.append(j)
            adj.append(row)
        match_r = [-1] * n_right

        def augment(i, seen):
            for j in adj[i]:
                if not seen[j]:
                    seen[j] = True
                    if match_r[j] < 0 or augment(match_r[j], seen):
                        match_r[j] = i
                        return True
            return False

        size = 0
        for i in range(n_left):
            if augment(i, [False] * n_right):
                size += 1
        return size == n_left

    lo, hi = 0, len(cands) - 1
    best = cands[-1]
    while lo <= hi:
        mid = (lo + hi) // 2
        if feasible(cands[mid]):
            best = cands[mid]
            hi = mid - 1
        else:
            lo = mid + 1
    return best


def natural_reweight(subset: Sequence[Point], diagram: Diagram) -> Diagram:
    """Reweight ``subset`` by nearest-neighbor mass counts from ``diagram``.

    Ties go to the diagonal first, then to the earliest point of ``subset``
    (its given order), mirroring the construction's cell assignment.
    """
    centers = list(subset)
    weights = [0] * len(centers)
    for p, m in diagram:
        best = diag_dist(p)
        best_i = -1
        for i, c in enumerate(centers):
            d = linf_dist(c, p)
            if d < best:
                best = d
                best_i = i
        if best_i >= 0:
            weights[best_i] += m
    return Diagram(
        ((c, w) for c, w in zip(centers, weights) if w > 0), sort=False
    )


def brute_opt_subset(diagram: Diagram, i: int, cap: int = 32) -> float:
    """Best bottleneck error achievable by reweighting an i-point subset of D.

    Minimizes brute_bottleneck(natural_reweight(S, D), D) over all i-subsets
    S of the distinct points.  An upper bound on the unrestricted optimum,
    which makes 2-approximation checks one-sided.
    """
    pts = sorted(diagram.points)
    n = len(pts)
    if n > 10:
        raise ValidationError(f"brute_opt_subset capped at 10 points, got {n}")
    if not 0 <= i <= n:
        raise ValidationError(f"subset size {i} out of range 0..{n}")
    best = None
    for subset in combinations(pts, i):
        approx = natural_reweight(subset, diagram)
        val = brute_bottleneck(approx, diagram, cap=cap)
        if best is None or val < best:
            best = val
    return 0.0 if best is None else best
