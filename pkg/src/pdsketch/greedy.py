"""Greedy traversal of a persistence diagram via discrete Voronoi cells.

The fast builder maintains Clarkson-style discrete Voronoi cells over the
diagram points plus their diagonal projections.  The diagonal is handled as a
partitioned continuum: each inserted projection owns a segment of the
diagonal, and distances from diagonal cells are segment distances rather than
point distances (treating the whole diagonal as one point breaks the triangle
inequality and, on adversarial inputs, the running time).  Cells of maximum
radius sit on top of a lazy max-heap; each insertion steals members only from
the parent cell's graph neighbors, and the neighbor graph keeps an edge only
while the cells are within four times the larger of their radii.

Determinism: the next insertion is always (max priority, then smallest
candidate id), candidate ids being the lexicographic rank of diagram points
followed by projections by ascending diagonal parameter; members move only on
strict improvement, so ties stay with the earlier-inserted center.  These are
the same rules the brute-force oracle applies.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from heapq import heapify, heappop, heappush

import numpy as np

from .diagram import DIAG, Diagram, Point, diag_dist, linf_dist
from .kernels import get_kernels
from .sketch import TransportationPlan, canonical_moves


def keep_edge(rad_a: float, rad_b: float, dist_ab: float) -> bool:
    """Neighbor-graph retention rule: keep while within 4x the larger radius."""
    return dist_ab <= 4.0 * max(rad_a, rad_b)


@dataclass
class BuildStats:
    """Instrumentation counters from one build."""

    touches: int = 0          # membership-reassignment checks
    scans: int = 0            # kernel invocations
    heap_pushes: int = 0
    projections_inserted: int = 0
    plan_entries: int = 0
    max_plan_sources: int = 0
    kernel: str = ""


@dataclass(frozen=True)
class GreedyResult:
    """Greedy order, error radii (one more entry than points), and plans."""

    order: tuple[Point, ...]
    radii: tuple[float, ...]
    plans: tuple[TransportationPlan, ...]
    complete: bool = True
    stats: BuildStats | None = field(default=None, compare=False)


class _Cell:
    __slots__ = ("cid", "kind", "rep", "t", "plan_src", "members", "radius", "far", "nbrs")

    def __init__(self, cid, kind, rep, t, plan_src):
        self.cid = cid
        self.kind = kind          # "point", "diag", or "naive_seed"
        self.rep = rep            # representative point for edge lengths
        self.t = t                # diagonal parameter (diag cells only)
        self.plan_src = plan_src  # DIAG or order position of the center
        self.members = None       # int64 array of candidate ids
        self.radius = 0.0
        self.far = -1
        self.nbrs: dict[int, float] = {}


def _cell_dist(a: _Cell, b: _Cell) -> float:
    if a.kind == "naive_seed":
        return diag_dist(b.rep)
    if b.kind == "naive_seed":
        return diag_dist(a.rep)
    return linf_dist(a.rep, b.rep)


def build_sketch(
    diagram: Diagram,
    *,
    max_points: int | None = None,
    precision: float | None = None,
    naive_diagonal: bool = False,
    kernels: str | None = None,
    trace: list | None = None,
) -> GreedyResult:
    """Compute the greedy order, error radii, and transportation plans.

    Stop rules: ``max_points`` caps the number of inserted points,
    ``precision`` stops once the residual error is at or below the given
    value; by default the sketch is full.  ``naive_diagonal`` switches to the
    variant that treats the diagonal as a single point (no projections) —
    same output, quadratic behavior on adversarial inputs — kept for the
    scaling benchmark.  ``trace``, if a list, receives one record per
    insertion describing which cells surrendered members (used by the
    neighbor-sufficiency tests).
    """
    K = get_kernels(kernels)
    stats = BuildStats(kernel="c" if K.__name__.endswith("_ckernels") else "py")
    pts = sorted(diagram.points)
    n = len(pts)
    if n == 0:
        return GreedyResult((), (0.0,), (), complete=True, stats=stats)
    masses = [diagram.mult(p) for p in pts]

    dd = [diag_dist(p) for p in pts]
    p0 = max(range(n), key=lambda i: (dd[i], -i))  # max persistence, lex-min tie
    t0 = (pts[p0].birth + pts[p0].death) / 2.0

    if naive_diagonal:
        params: list[float] = []
    else:
        params = sorted({(p.birth + p.death) / 2.0 for p in pts} - {t0})
    m = len(params)
    total = n + m

    xb = np.empty(total, dtype=np.float64)
    xd = np.empty(total, dtype=np.float64)
    key = np.empty(total, dtype=np.float64)
    rv = np.empty(total, dtype=np.float64)
    cell_of = np.zeros(total, dtype=np.int64)
    mass_arr = np.zeros(total, dtype=np.int64)
    for i, p in enumerate(pts):
        xb[i] = p.birth
        xd[i] = p.death
        key[i] = rv[i] = dd[i]
        mass_arr[i] = masses[i]
    for j, t in enumerate(params):
        i = n + j
        xb[i] = xd[i] = t
        key[i] = 0.0
        rv[i] = abs(t0 - t)

    if naive_diagonal:
        seed = _Cell(0, "naive_seed", None, None, DIAG)
    else:
        seed = _Cell(0, "diag", Point(t0, t0), t0, DIAG)
    seed.members = np.arange(total, dtype=np.int64)
    seed.radius, seed.far = K.cell_stats(seed.members, rv)
    cells = [seed]
    param_values = [t0] if not naive_diagonal else []
    param_cells = [0] if not naive_diagonal else []

    cell_heap = [(-seed.radius, seed.far, 0)]
    real_heap = [(-float(rv[i]), i) for i in range(n)]
    heapify(real_heap)
    inserted = np.zeros(total, dtype=bool)

    order_idx: list[int] = []
    radii: list[float] = []
    plans: list[TransportationPlan] = []

    def real_top() -> float:
        while real_heap:
            negr, i = real_heap[0]
            if inserted[i] or rv[i] != -negr:
                heappop(real_heap)
                continue
            return -negr
        return 0.0

    def push_cell(c: _Cell) -> None:
        if c.far >= 0:
            heappush(cell_heap, (-c.radius, c.far, c.cid))
            stats.heap_pushes += 1

    def connect(new: _Cell, cand_ids) -> None:
        for cid2 in sorted(cand_ids):
            if cid2 == new.cid:
                continue
            c2 = cells[cid2]
            length = _cell_dist(new, c2)
            if keep_edge(new.radius, c2.radius, length):
                new.nbrs[cid2] = length
                c2.nbrs[new.cid] = length

    def prune(changed) -> None:
        for c in changed:
            for did in sorted(c.nbrs):
                length = c.nbrs[did]
                other = cells[did]
                if not keep_edge(c.radius, other.radius, length):
                    del c.nbrs[did]
                    del other.nbrs[c.cid]

    def snapshot(parent: _Cell, parent_pre_radius: float, scan_ids):
        if trace is None:
            return None
        radii_pre = {
            cid: (parent_pre_radius if cid == parent.cid else cells[cid].radius)
            for cid in scan_ids
        }
        return {
            "parent": parent.cid,
            "parent_radius": parent_pre_radius,
            "radii": radii_pre,
            "dists": {cid: _cell_dist(parent, cells[cid]) for cid in scan_ids},
            "sources": [],
        }

    def insert_real(z: int, parent: _Cell, parent_pre_radius: float) -> None:
        pos = len(order_idx)
        zb = float(xb[z])
        zd = float(xd[z])
        scan_ids = [parent.cid] + sorted(parent.nbrs)
        rec = snapshot(parent, parent_pre_radius, scan_ids)
        sources: dict = {parent.plan_src: int(mass_arr[z])}
        if rec is not None:
            rec["sources"].append(parent.cid)
        new = _Cell(len(cells), "point", Point(zb, zd), None, pos)
        moved_parts = []
        changed = [new, parent]
        for cid2 in scan_ids:
            c2 = cells[cid2]
            if len(c2.members) == 0:
                continue
            stats.touches += len(c2.members)
            stats.scans += 1
            moved, kept, krad, kfar = K.scan_point(
                zb, zd, c2.members, xb, xd, key, rv, cell_of, new.cid
            )
            if len(moved):
                moved_mass = int(mass_arr[moved].sum())
                if moved_mass:
                    sources[c2.plan_src] = sources.get(c2.plan_src, 0) + moved_mass
                c2.members = kept
                c2.radius = krad
                c2.far = kfar
                push_cell(c2)
                changed.append(c2)
                moved_parts.append(moved)
                for i in moved.tolist():
                    heappush(real_heap, (-float(rv[i]), i))
                if rec is not None and cid2 != parent.cid:
                    rec["sources"].append(cid2)
        new.members = (
            np.concatenate(moved_parts) if moved_parts else np.empty(0, dtype=np.int64)
        )
        new.radius, new.far = K.cell_stats(new.members, rv)
        cells.append(new)
        push_cell(new)
        cand = {parent.cid} | set(parent.nbrs)
        for cid2 in list(cand):
            cand |= set(cells[cid2].nbrs)
        connect(new, cand)
        prune(changed)
        order_idx.append(z)
        radii.append(float(rv[z]))
        moves = canonical_moves(sources)
        plans.append(TransportationPlan(target=pos, moves=moves))
        stats.plan_entries += len(moves)
        stats.max_plan_sources = max(stats.max_plan_sources, len(moves))
        if rec is not None:
            trace.append(rec)

    def insert_proj(z: int, parent: _Cell, parent_pre_radius: float) -> None:
        t_new = float(xb[z])
        k = bisect_left(param_values, t_new)
        scan_ids = []
        if k > 0:
            scan_ids.append(param_cells[k - 1])
            lo = (param_values[k - 1] + t_new) / 2.0
        else:
            lo = -np.inf
        if k < len(param_values):
            scan_ids.append(param_cells[k])
            hi = (t_new + param_values[k]) / 2.0
        else:
            hi = np.inf
        rec = snapshot(parent, parent_pre_radius, scan_ids)
        new = _Cell(len(cells), "diag", Point(t_new, t_new), t_new, DIAG)
        moved_parts = []
        changed = [new, parent]
        for cid2 in scan_ids:
            c2 = cells[cid2]
            if len(c2.members) == 0:
                continue
            stats.touches += len(c2.members)
            stats.scans += 1
            moved, kept, krad, kfar = K.scan_segment(
                lo, hi, t_new, n, c2.members, xb, xd, rv, cell_of, new.cid
            )
            if len(moved):
                c2.members = kept
                c2.radius = krad
                c2.far = kfar
                push_cell(c2)
                changed.append(c2)
                moved_parts.append(moved)
                if rec is not None:
                    rec["sources"].append(cid2)
        new.members = (
            np.concatenate(moved_parts) if moved_parts else np.empty(0, dtype=np.int64)
        )
        new.radius, new.far = K.cell_stats(new.members, rv)
        cells.append(new)
        push_cell(new)
        param_values.insert(k, t_new)
        param_cells.insert(k, new.cid)
        cand = {parent.cid} | set(parent.nbrs) | set(scan_ids)
        for cid2 in list(cand):
            cand |= set(cells[cid2].nbrs)
        connect(new, cand)
        prune(changed)
        stats.projections_inserted += 1
        if rec is not None:
            trace.append(rec)

    target = n if max_points is None else min(max_points, n)
    residual = 0.0
    while True:
        eps_next = real_top()
        done = len(order_idx)
        if done >= n:
            residual = 0.0
            break
        if done >= target or (precision is not None and eps_next <= precision):
            residual = eps_next
            break
        while True:
            negr, far, cid = heappop(cell_heap)
            c = cells[cid]
            if c.far == far and c.radius == -negr and c.far >= 0:
                break
        z = far
        parent = cells[cid]
        pre_radius = parent.radius
        inserted[z] = True
        parent.members = parent.members[parent.members != z]
        parent.radius, parent.far = K.cell_stats(parent.members, rv)
        push_cell(parent)
        if z < n:
            insert_real(z, parent, pre_radius)
        else:
            insert_proj(z, parent, pre_radius)

    radii.append(residual)
    return GreedyResult(
        order=tuple(pts[i] for i in order_idx),
        radii=tuple(radii),
        plans=tuple(plans),
        complete=(len(order_idx) == n),
        stats=stats,
    )
