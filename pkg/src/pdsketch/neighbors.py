"""Sparse neighborhood graphs from greedy orders, and the approximations they enable.

A gamma-filtered graph keeps, for each point in greedy order, the earlier
points within gamma times its insertion radius; its back-degree is bounded by
(2*gamma+1)^2 by a packing argument, so the graph is linear-size.  Two such
graphs drive an incremental construction of the bipartite neighborhood graph
between two diagrams, one scale at a time, which yields a Hausdorff
approximation within a factor of 1 +/- 1/gamma and, combined with sketches, a
bottleneck approximation with an additive error budget split across the two
sketches.  The diagonal of each diagram is a vertex of the bipartite graph;
the two diagonals sit at distance zero, so neither is ever isolated.
"""

from __future__ import annotations

from bisect import bisect_right, insort
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .diagram import Diagram, Point, diag_dist, linf_dist
from .errors import PreconditionError, ValidationError
from .matching import Transport, exact_bottleneck
from .sketch import Sketch


@dataclass(frozen=True)
class FilteredGraph:
    """Back-edges of a greedy order: (j, i) with i < j and d(p_i, p_j) <= gamma * radius_j."""

    points: tuple[Point, ...]
    radii: tuple[float, ...]
    gamma: float
    adj: tuple[tuple[tuple[int, float], ...], ...]  # per vertex: (other, length)

    def back_degree(self, j: int) -> int:
        return sum(1 for i, _ in self.adj[j] if i < j)

    def max_back_degree(self) -> int:
        return max((self.back_degree(j) for j in range(len(self.points))), default=0)

    def edges(self):
        for j, nbrs in enumerate(self.adj):
            for i, length in nbrs:
                if i < j:
                    yield j, i, length


def filtered_graph(
    points: Sequence[Point], radii: Sequence[float], gamma: float
) -> FilteredGraph:
    """Build the gamma-filtered neighborhood graph of a greedy order.

    ``radii[j]`` is the insertion radius of ``points[j]``; the sequence must
    be nonincreasing (a sketch's radii, truncated to the points, qualify).
    Edges use a closed threshold so the graph contains the full alpha-
    neighborhood of every prefix at alpha = gamma * radius of the prefix.
    """
    pts = list(points)
    lam = [float(r) for r in radii[: len(pts)]]
    if len(lam) != len(pts):
        raise ValidationError("radii shorter than the point sequence")
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ValidationError("insertion radii must be nonincreasing")
    if not gamma > 1:
        raise ValidationError(f"gamma must be > 1, got {gamma}")
    n = len(pts)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    if n:
        xb = np.fromiter((p.birth for p in pts), dtype=np.float64, count=n)
        xd = np.fromiter((p.death for p in pts), dtype=np.float64, count=n)
        for j in range(1, n):
            d = np.maximum(np.abs(xb[:j] - xb[j]), np.abs(xd[:j] - xd[j]))
            hits = np.nonzero(d <= gamma * lam[j])[0]
            for i in hits.tolist():
                length = float(d[i])
                adj[j].append((i, length))
                adj[i].append((j, length))
    return FilteredGraph(
        points=tuple(pts),
        radii=tuple(lam),
        gamma=float(gamma),
        adj=tuple(tuple(a) for a in adj),
    )


@dataclass(frozen=True)
class GraphSide:
    """One diagram's greedy order, insertion radii, and its filtered graph."""

    points: tuple[Point, ...]
    radii: tuple[float, ...]
    filtered: FilteredGraph

    @classmethod
    def from_sketch(cls, sketch: Sketch, filter_gamma: float) -> "GraphSide":
        pts = sketch.order
        lam = sketch.radii[: len(pts)]
        return cls(points=pts, radii=lam, filtered=filtered_graph(pts, lam, filter_gamma))


Vertex = tuple[int, int]  # (side, index); index -1 is the side's diagonal


@dataclass
class BiGraph:
    """Bipartite neighborhood graph state after the incremental run."""

    gamma: float
    scale: float                    # last insertion scale processed
    adj: dict[Vertex, dict[Vertex, float]]
    d_min: dict[Vertex, float]      # nearest opposite-side distance discovered
    inserted: list[Vertex]
    isolation_scale: float | None

    def cross_pairs(self, max_length: float | None = None):
        """Point-point edges as (left index, right index, length)."""
        for (s, i), nbrs in self.adj.items():
            if s != 0 or i < 0:
                continue
            for (s2, j), length in nbrs.items():
                if j < 0:
                    continue
                if max_length is None or length <= max_length:
                    yield i, j, length


def write_graph(graph, stream: TextIO) -> None:
    """Debug dump: one ``edge i j length`` line per edge."""
    if isinstance(graph, FilteredGraph):
        for j, i, length in graph.edges():
            stream.write(f"edge {j} {i} {length!r}\n")
        return
    seen = set()
    for (s, i), nbrs in graph.adj.items():
        for (s2, j), length in nbrs.items():
            key = ((s, i), (s2, j)) if (s, i) <= (s2, j) else ((s2, j), (s, i))
            if key in seen:
                continue
            seen.add(key)
            a = f"{'LR'[s]}{'diag' if i < 0 else i}"
            b = f"{'LR'[s2]}{'diag' if j < 0 else j}"
            stream.write(f"edge {a} {b} {length!r}\n")


def bipartite_graph(
    left: GraphSide,
    right: GraphSide,
    gamma: float,
    stop_at_isolated: bool = False,
) -> tuple[BiGraph, float | None]:
    """Incrementally maintain the bipartite neighborhood graph at shrinking scales.

    Vertices of both sides enter by decreasing insertion radius (left first on
    ties, then by index).  A new vertex finds its cross-side neighbors through
    its nearest inserted same-side predecessor: that helper's cross-neighbors
    and their filtered-graph neighbors cover every candidate, by the triangle
    inequality, as long as no vertex is isolated at the current scale.  Each
    side's diagonal is always present; near-diagonal candidates are found by a
    distance-to-diagonal lookup instead of a filtered graph.  Over-long edges
    are dropped lazily when encountered.  The first detected isolation is
    reported (and stops the run when ``stop_at_isolated``); the triggering
    vertex gets an exact scan so its nearest-distance record stays sound.
    """
    if not gamma > 1:
        raise ValidationError(f"gamma must be > 1, got {gamma}")
    need = 2 * gamma + 1
    for side in (left, right):
        if side.filtered.gamma < need:
            raise PreconditionError(
                f"bipartite construction at gamma={gamma} needs "
                f"{need}-filtered graphs, got {side.filtered.gamma}"
            )
    sides = (left, right)
    items = sorted(
        (
            (-sides[s].radii[j], s, j)
            for s in (0, 1)
            for j in range(len(sides[s].points))
        )
    )
    ldiag, rdiag = (0, -1), (1, -1)
    adj: dict[Vertex, dict[Vertex, float]] = {ldiag: {rdiag: 0.0}, rdiag: {ldiag: 0.0}}
    d_min: dict[Vertex, float] = {ldiag: 0.0, rdiag: 0.0}
    inserted: list[Vertex] = [ldiag, rdiag]
    in_set = {ldiag, rdiag}
    by_diag: list[list[tuple[float, int]]] = [[], []]  # per side, sorted
    isolation: float | None = None
    scale = float("inf")

    def vpoint(v: Vertex) -> Point | None:
        s, i = v
        return None if i < 0 else sides[s].points[i]

    def length_to(p: Point, v: Vertex) -> float:
        q = vpoint(v)
        return diag_dist(p) if q is None else linf_dist(p, q)

    def diag_pool(side: int, limit: float) -> list[Vertex]:
        rows = by_diag[side]
        hi = bisect_right(rows, (limit, float("inf")))
        return [(side, idx) for _, idx in rows[:hi]]

    for neg_lam, s, j in items:
        lam = -neg_lam
        scale = lam
        thresh = gamma * lam
        x: Vertex = (s, j)
        p = sides[s].points[j]
        opp = 1 - s
        own_diag, opp_diag = (s, -1), (opp, -1)

        # Helper: nearest inserted same-side vertex (filtered back-neighbors or diagonal).
        best_d = diag_dist(p)
        helper: Vertex = own_diag
        for i, length in sides[s].filtered.adj[j]:
            if i < j and (length < best_d or (length == best_d and helper == own_diag)):
                best_d = length
                helper = (s, i)

        cands: set[Vertex] = {opp_diag}
        local_isolated = None
        if helper == own_diag:
            cands.update(diag_pool(opp, need * lam))
        else:
            hadj = adj.setdefault(helper, {})
            for b, length in list(hadj.items()):
                if length > thresh:  # lazy deletion at the current scale
                    del hadj[b]
                    adj[b].pop(helper, None)
            if not hadj and d_min.get(helper, float("inf")) > thresh:
                local_isolated = helper
            for a in list(hadj):
                cands.add(a)
                if a == opp_diag:
                    cands.update(diag_pool(opp, need * lam))
                else:
                    for i2, _ in sides[opp].filtered.adj[a[1]]:
                        if (opp, i2) in in_set:
                            cands.add((opp, i2))

        best = float("inf")
        xadj = adj.setdefault(x, {})
        for b in cands:
            length = length_to(p, b)
            best = min(best, length)
            if length < d_min.get(b, float("inf")):
                d_min[b] = length
            if length <= thresh:
                xadj[b] = length
                adj[b][x] = length
        if best > thresh:
            # Nothing in reach through the helper chain: fall back to one exact
            # scan so the recorded nearest distance is trustworthy, then flag
            # the isolation.
            for b in inserted:
                if b[0] != opp:
                    continue
                length = length_to(p, b)
                best = min(best, length)
                if length < d_min.get(b, float("inf")):
                    d_min[b] = length
                if length <= thresh:
                    xadj[b] = length
                    adj[b][x] = length
            if best > thresh and local_isolated is None:
                local_isolated = x
        d_min[x] = min(best, d_min.get(x, float("inf")))
        inserted.append(x)
        in_set.add(x)
        insort(by_diag[s], (diag_dist(p), j))
        if local_isolated is not None and isolation is None:
            isolation = lam
            if stop_at_isolated:
                break

    graph = BiGraph(
        gamma=float(gamma),
        scale=scale,
        adj=adj,
        d_min=d_min,
        inserted=inserted,
        isolation_scale=isolation,
    )
    return graph, isolation


def approx_hausdorff(
    left: Sketch, right: Sketch, gamma: float = 4.0
) -> tuple[float, float, float]:
    """Hausdorff distance between two diagrams to within a factor of 1 +/- 1/gamma.

    Runs the bipartite construction until completion or the first isolated
    vertex; the largest nearest-neighbor distance r seen by any vertex gives
    the bracket (r(1-1/gamma), r(1+1/gamma)) around the true distance.
    Returns (lower, upper, r).
    """
    gs_left = GraphSide.from_sketch(left, 2 * gamma + 1)
    gs_right = GraphSide.from_sketch(right, 2 * gamma + 1)
    graph, _ = bipartite_graph(gs_left, gs_right, gamma, stop_at_isolated=True)
    r = max((graph.d_min[v] for v in graph.inserted), default=0.0)
    return r * (1.0 - 1.0 / gamma), r * (1.0 + 1.0 / gamma), r


def _threshold_pairs(a: Diagram, b: Diagram, limit: float):
    """All cross pairs within ``limit``, scanned in chunks."""
    na, nb = len(a.points), len(b.points)
    if na == 0 or nb == 0:
        return []
    ab = np.fromiter((p.birth for p in a.points), dtype=np.float64, count=na)
    ad = np.fromiter((p.death for p in a.points), dtype=np.float64, count=na)
    bb = np.fromiter((p.birth for p in b.points), dtype=np.float64, count=nb)
    bd = np.fromiter((p.death for p in b.points), dtype=np.float64, count=nb)
    pairs = []
    chunk = max(1, int(1_000_000 // max(nb, 1)))
    for start in range(0, na, chunk):
        stop = min(na, start + chunk)
        d = np.maximum(
            np.abs(ab[start:stop, None] - bb[None, :]),
            np.abs(ad[start:stop, None] - bd[None, :]),
        )
        ii, jj = np.nonzero(d <= limit)
        pairs.extend(zip((ii + start).tolist(), jj.tolist()))
    return pairs


def approx_bottleneck(
    left: Sketch, right: Sketch, eps: float, gamma: float = 4.0
) -> tuple[float, Transport]:
    """Bottleneck distance within an additive error ``eps``, plus a transport.

    Splits the budget across the sketches (prefixes with error <= eps/2
    each), then computes the exact bottleneck between the two reweighted
    prefixes on a sparse threshold graph, doubling the scale until the
    matching value certifies that no needed edge was beyond the threshold.
    The returned transport joins the two reconstructions, indices being
    greedy-order positions.
    """
    if eps < 0:
        raise ValidationError("eps must be nonnegative")
    i = left.min_index_for_error(eps / 2.0)
    j = right.min_index_for_error(eps / 2.0)
    da = left.reconstruct(i)
    db = right.reconstruct(j)
    ceiling = max(
        (diag_dist(p) for p in (*da.points, *db.points)), default=0.0
    )
    if ceiling == 0.0:
        return 0.0, Transport()
    lam = max(left.radii[i], right.radii[j], eps / 2.0, ceiling / (8.0 * gamma))
    while True:
        limit = gamma * lam
        pairs = _threshold_pairs(da, db, limit)
        value, transport = exact_bottleneck(da, db, graph=pairs)
        if value <= limit:
            return value, transport
        lam *= 2.0
