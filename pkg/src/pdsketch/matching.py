"""Transports between diagrams: costs, exact bottleneck, and matching updates.

A Transport is a sparse integer mass table between two diagrams; each side's
off-diagonal points must send/receive exactly their multiplicity, with the
diagonal absorbing the remainder (the diagonal-to-diagonal cell costs nothing
and is never stored).  Bottleneck feasibility is decided by integer max-flow
with multiplicity capacities, so masses far beyond unit-expansion scale are
fine.  The update procedures reroute mass according to a sketch's
transportation plan, either arbitrarily (naive), optimally for the bottleneck
cost among all plan-consistent reroutings (Hall-prefix search over sorted
candidate edges), or greedily by p-th power cost change (a one-round auction).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .diagram import DIAG, Diagram, Point, diag_dist, linf_dist
from .errors import ParseError, ValidationError
from .sketch import Sketch, TransportationPlan

Key = object  # int index or DIAG


def _akey_sort(k: Key):
    return (1,) if k is DIAG else (0, k)


@dataclass
class Transport:
    """Sparse transportation plan: (source key, target key) -> positive mass.

    Keys are indices into the respective diagram's point list, or DIAG.
    The (DIAG, DIAG) cell is implicit and never stored.
    """

    entries: dict[tuple[Key, Key], int] = field(default_factory=dict)

    def copy(self) -> "Transport":
        return Transport(dict(self.entries))

    def add(self, a: Key, b: Key, mass: int) -> None:
        if mass == 0:
            return
        if a is DIAG and b is DIAG:
            return
        key = (a, b)
        total = self.entries.get(key, 0) + mass
        if total < 0:
            raise ValidationError(f"negative mass on {key}")
        if total == 0:
            self.entries.pop(key, None)
        else:
            self.entries[key] = total

    def mass(self, a: Key, b: Key) -> int:
        return self.entries.get((a, b), 0)

    def row_sum(self, a: Key) -> int:
        return sum(m for (ak, _), m in self.entries.items() if ak == a)

    def col_sum(self, b: Key) -> int:
        return sum(m for (_, bk), m in self.entries.items() if bk == b)

    def col_entries(self, b: Key) -> list[tuple[Key, int]]:
        found = [(ak, m) for (ak, bk), m in self.entries.items() if bk == b]
        found.sort(key=lambda e: _akey_sort(e[0]))
        return found

    def __eq__(self, other):
        if not isinstance(other, Transport):
            return NotImplemented
        return self.entries == other.entries


def edge_length(a: Key, b: Key, pa: Sequence[Point], pb: Sequence[Point]) -> float:
    """Length of a transport edge; diagonal endpoints project the other side."""
    if a is DIAG and b is DIAG:
        return 0.0
    if a is DIAG:
        return diag_dist(pb[b])
    if b is DIAG:
        return diag_dist(pa[a])
    return linf_dist(pa[a], pb[b])


def validate_transport(t: Transport, a: Diagram, b: Diagram) -> None:
    """Check row/column sums against multiplicities; diagonal rows are free."""
    rows: dict[Key, int] = {}
    cols: dict[Key, int] = {}
    for (ak, bk), m in t.entries.items():
        if m <= 0:
            raise ValidationError(f"non-positive mass on ({ak}, {bk})")
        rows[ak] = rows.get(ak, 0) + m
        cols[bk] = cols.get(bk, 0) + m
        if ak is not DIAG and not 0 <= ak < len(a.points):
            raise ValidationError(f"source index {ak} out of range")
        if bk is not DIAG and not 0 <= bk < len(b.points):
            raise ValidationError(f"target index {bk} out of range")
    for i, m in enumerate(a.mults):
        if rows.get(i, 0) != m:
            raise ValidationError(f"row {i} carries {rows.get(i, 0)}, expected {m}")
    for j, m in enumerate(b.mults):
        if cols.get(j, 0) != m:
            raise ValidationError(f"column {j} carries {cols.get(j, 0)}, expected {m}")


def cost_bottleneck(t: Transport, a: Diagram, b: Diagram) -> float:
    """Longest edge carrying positive mass."""
    validate_transport(t, a, b)
    return max(
        (edge_length(ak, bk, a.points, b.points) for (ak, bk) in t.entries),
        default=0.0,
    )


def cost_wasserstein(t: Transport, a: Diagram, b: Diagram, p: float) -> float:
    """(sum of mass * length^p)^(1/p) for finite p >= 1."""
    if not p >= 1:
        raise ValidationError(f"Wasserstein order must be >= 1, got {p}")
    validate_transport(t, a, b)
    total = sum(
        m * edge_length(ak, bk, a.points, b.points) ** p
        for (ak, bk), m in t.entries.items()
    )
    return total ** (1.0 / p)


def write_transport(t: Transport, stream: TextIO) -> None:
    """Text format: one ``aIdx|diag bIdx|diag mass`` line per entry."""
    for (ak, bk) in sorted(t.entries, key=lambda e: (_akey_sort(e[0]), _akey_sort(e[1]))):
        a = "diag" if ak is DIAG else str(ak)
        b = "diag" if bk is DIAG else str(bk)
        stream.write(f"{a} {b} {t.entries[(ak, bk)]}\n")


def read_transport(stream: TextIO | str) -> Transport:
    text = stream if isinstance(stream, str) else stream.read()
    t = Transport()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"expected 'a b mass', got {raw!r}", line=lineno)
        try:
            ak: Key = DIAG if fields[0] == "diag" else int(fields[0])
            bk: Key = DIAG if fields[1] == "diag" else int(fields[1])
            mass = int(fields[2])
        except ValueError:
            raise ParseError(f"bad field in {raw!r}", line=lineno) from None
        if mass <= 0:
            raise ParseError(f"mass must be positive in {raw!r}", line=lineno)
        t.add(ak, bk, mass)
    return t


class _Dinic:
    """Integer max-flow; arbitrary-precision capacities, deterministic given edge order."""

    def __init__(self, n: int):
        self.graph: list[list[list]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: int) -> tuple[int, int]:
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])
        return u, len(self.graph[u]) - 1

    def flow_on(self, handle: tuple[int, int], original_cap: int) -> int:
        u, i = handle
        return original_cap - self.graph[u][i][1]

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        n = len(self.graph)
        while True:
            level = [-1] * n
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v, cap, _ in self.graph[u]:
                    if cap > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return total
            it = [0] * n

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.graph[u]):
                    edge = self.graph[u][it[u]]
                    v, cap, rev = edge
                    if cap > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, cap))
                        if got:
                            edge[1] -= got
                            self.graph[v][rev][1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 200)
                if not pushed:
                    break
                total += pushed


def exact_bottleneck(
    a: Diagram,
    b: Diagram,
    graph: Iterable[tuple[int, int]] | None = None,
) -> tuple[float, Transport]:
    """Exact bottleneck distance and a realizing transport.

    Binary search over the candidate lengths (all point pairs present in
    ``graph`` — every pair when no graph is given — plus every distance to
    the diagonal); feasibility at a threshold is an integer max-flow where
    each side's diagonal node is an uncapacitated reservoir.  If a graph is
    supplied it must contain every pair at distance <= the true bottleneck;
    a sufficient graph is what the neighbor-graph machinery produces.
    """
    pa, pb = a.points, b.points
    na, nb = len(pa), len(pb)
    if graph is None:
        pairs = [(i, j) for i in range(na) for j in range(nb)]
    else:
        pairs = sorted(set((int(i), int(j)) for i, j in graph))
    pair_len = [linf_dist(pa[i], pb[j]) for i, j in pairs]
    da = [diag_dist(p) for p in pa]
    db = [diag_dist(q) for q in pb]
    cands = sorted({0.0, *pair_len, *da, *db})

    mass_a, mass_b = a.total_mass, b.total_mass
    need = mass_a + mass_b
    s, t = 0, 1
    a_off, b_off = 2, 2 + na + 1
    adiag, bdiag = a_off + na, b_off + nb
    n_nodes = 4 + na + nb

    def run(alpha: float):
        net = _Dinic(n_nodes)
        for i in range(na):
            net.add(s, a_off + i, a.mults[i])
        net.add(s, adiag, mass_b)
        handles = []
        for (i, j), length in zip(pairs, pair_len):
            if length <= alpha:
                handles.append((i, j, net.add(a_off + i, b_off + j, need)))
        ha_diag = []
        for i in range(na):
            if da[i] <= alpha:
                ha_diag.append((i, net.add(a_off + i, bdiag, need)))
        hb_diag = []
        for j in range(nb):
            if db[j] <= alpha:
                hb_diag.append((j, net.add(adiag, b_off + j, need)))
        net.add(adiag, bdiag, need)
        for j in range(nb):
            net.add(b_off + j, t, b.mults[j])
        net.add(bdiag, t, mass_a)
        value = net.max_flow(s, t)
        return value == need, net, handles, ha_diag, hb_diag

    lo, hi = 0, len(cands) - 1
    best = cands[-1] if cands else 0.0
    while lo <= hi:
        mid = (lo + hi) // 2
        ok, *_ = run(cands[mid])
        if ok:
            best = cands[mid]
            hi = mid - 1
        else:
            lo = mid + 1
    ok, net, handles, ha_diag, hb_diag = run(best)
    if not ok:
        raise ValidationError("infeasible at maximal threshold; graph too sparse")
    result = Transport()
    for i, j, h in handles:
        result.add(i, j, net.flow_on(h, need))
    for i, h in ha_diag:
        result.add(i, DIAG, net.flow_on(h, need))
    for j, h in hb_diag:
        result.add(DIAG, j, net.flow_on(h, need))
    return best, result


def nearest_transport(x: Diagram, prefix: Diagram) -> Transport:
    """The natural transport: every point of x moves to its nearest center.

    Centers are prefix points and the diagonal; ties go to the diagonal
    first, then to the earliest prefix index (the reconstruction tie rule).
    This is an optimal transport for every cost and a valid matching
    x -> prefix whenever prefix is the natural reweighting of its points.
    """
    t = Transport()
    for idx, (p, m) in enumerate(zip(x.points, x.mults)):
        best = diag_dist(p)
        best_key: Key = DIAG
        for j, c in enumerate(prefix.points):
            d = linf_dist(c, p)
            if d < best:
                best = d
                best_key = j
        t.add(idx, best_key, m)
    return t


def _plan_demand_keys(plan: TransportationPlan):
    sources = [src for src, _ in plan.moves]
    ti = {src: m for src, m in plan.moves}
    return sources, ti


def naive_update(
    m: Transport, plan: TransportationPlan, x: Diagram, d_i: Diagram
) -> Transport:
    """Compose with an arbitrary plan-consistent matching.

    Real plan sources reroute their mandated mass in input order (x's points
    by ascending index, the x-diagonal last).  A diagonal source draws
    entirely from the implicit diagonal-to-diagonal reservoir: in matching
    terms, the diagonal copies that move to the new point are the projections
    of the diagram points that reweighted, and those are matched to x's
    diagonal, not to any particular off-diagonal point of x.
    """
    target = plan.target
    if target != len(d_i.points):
        raise ValidationError(f"plan target {target} does not extend a {len(d_i)}-point prefix")
    sources, ti = _plan_demand_keys(plan)
    out = m.copy()
    for q in sources:
        need = ti[q]
        if q is DIAG:
            out.add(DIAG, target, need)
            continue
        for y, avail in m.col_entries(q):
            if need == 0:
                break
            take = min(avail, need)
            out.add(y, q, -take)
            out.add(y, target, take)
            need -= take
        if need > 0:
            raise ValidationError(
                f"plan needs {ti[q]} units from source {q}, matching carries less"
            )
    return out


def _block_edges(ys, targets, x_pts, b_pts, target_idx, target_point):
    def tpoint(q):
        if q is DIAG:
            return None
        return target_point if q == target_idx else b_pts[q]

    edges = []
    for y in ys:
        for q in targets:
            if y is DIAG and q is DIAG:
                length = 0.0
            elif y is DIAG:
                length = diag_dist(tpoint(q))
            elif q is DIAG:
                length = diag_dist(x_pts[y])
            else:
                length = linf_dist(x_pts[y], tpoint(q))
            edges.append((length, _akey_sort(y), _akey_sort(q), y, q))
    edges.sort(key=lambda e: e[:3])
    return edges


def local_update_bottleneck(
    m: Transport,
    plan: TransportationPlan,
    x: Diagram,
    d_i: Diagram,
    new_point: Point,
    counter: list | None = None,
) -> Transport:
    """The bottleneck-optimal matching update consistent with the plan.

    Replaces the block between Y (the x-side mass currently landing on plan
    sources) and Q u {new point} by the transport found in the minimal
    feasible prefix of the block's edges sorted by length (Hall-style
    feasibility via max-flow).  Among plan-consistent updates the result has
    minimal bottleneck cost; ties resolve toward lexicographic edge order.
    """
    target = plan.target
    if target != len(d_i.points):
        raise ValidationError(f"plan target {target} does not extend a {len(d_i)}-point prefix")
    sources, ti = _plan_demand_keys(plan)
    need_new = plan.total_mass
    src_set = set(sources)

    supplies: dict[Key, int] = {}
    for (ak, bk), mass in m.entries.items():
        if bk in src_set:
            supplies[ak] = supplies.get(ak, 0) + mass
    demands: dict[Key, int] = {}
    for q in sources:
        col = m.col_sum(q)
        if q is not DIAG and col < ti[q]:
            raise ValidationError(
                f"plan needs {ti[q]} units from source {q}, matching carries {col}"
            )
        demands[q] = col - ti[q]
    flex = 0
    if DIAG in src_set:
        # The implicit diagonal reservoir may both supply the new point and
        # absorb displaced mass; cap it by the most it could ever carry.
        flex = need_new + sum(d for q, d in demands.items() if q is not DIAG)
        supplies[DIAG] = supplies.get(DIAG, 0) + flex
        demands[DIAG] = demands[DIAG] + flex
    ys = sorted(supplies, key=_akey_sort)
    targets = sorted(sources, key=_akey_sort) + [target]
    demands[target] = need_new
    total_supply = sum(supplies.values())

    edges = _block_edges(ys, targets, x.points, d_i.points, target, new_point)
    if counter is not None:
        counter[0] += len(edges)

    y_id = {y: i for i, y in enumerate(ys)}
    q_id = {q: i for i, q in enumerate(targets)}
    s, t = 0, 1
    y_off = 2
    q_off = 2 + len(ys)

    def feasible(prefix: int):
        net = _Dinic(2 + len(ys) + len(targets))
        for y in ys:
            net.add(s, y_off + y_id[y], supplies[y])
        handles = []
        for length, _, _, y, q in edges[:prefix]:
            handles.append((y, q, net.add(y_off + y_id[y], q_off + q_id[q], total_supply)))
        for q in targets:
            net.add(q_off + q_id[q], t, demands[q])
        return net.max_flow(s, t) == total_supply, net, handles

    lo, hi = 0, len(edges)
    best = len(edges)
    while lo <= hi:
        mid = (lo + hi) // 2
        ok, *_ = feasible(mid)
        if ok:
            best = mid
            hi = mid - 1
        else:
            lo = mid + 1
    ok, net, handles = feasible(best)
    if not ok:
        raise ValidationError("block transport infeasible at full edge set")

    out = m.copy()
    for (ak, bk) in list(out.entries):
        if bk in src_set:
            del out.entries[(ak, bk)]
    for y, q, h in handles:
        out.add(y, q, net.flow_on(h, total_supply))
    return out


def local_update_wasserstein(
    m: Transport,
    plan: TransportationPlan,
    x: Diagram,
    d_i: Diagram,
    new_point: Point,
    p: float,
) -> Transport:
    """Greedy plan-consistent update by p-th power cost change.

    For each plan source q, the units currently landing on q are ranked by
    d(y, new)^p - d(y, q)^p and the mandated amount moves in increasing
    order of that change (the diagram's own diagonal ranks after real
    points on ties).
    """
    if not p >= 1:
        raise ValidationError(f"Wasserstein order must be >= 1, got {p}")
    target = plan.target
    if target != len(d_i.points):
        raise ValidationError(f"plan target {target} does not extend a {len(d_i)}-point prefix")
    sources, ti = _plan_demand_keys(plan)
    out = m.copy()
    for q in sources:
        need = ti[q]
        cands = []
        for y, avail in m.col_entries(q):
            to_new = diag_dist(new_point) if y is DIAG else linf_dist(x.points[y], new_point)
            at_q = edge_length(y, q, x.points, d_i.points)
            cands.append((to_new**p - at_q**p, _akey_sort(y), False, y, avail))
        if q is DIAG:
            # Implicit diagonal-to-diagonal units compete at cost d(diag, new)^p.
            cands.append((diag_dist(new_point) ** p, (2,), True, DIAG, need))
        cands.sort(key=lambda e: e[:2])
        for _, _, implicit, y, avail in cands:
            if need == 0:
                break
            take = min(avail, need)
            if implicit:
                out.add(DIAG, target, take)
            else:
                out.add(y, q, -take)
                out.add(y, target, take)
            need -= take
        if need > 0:
            raise ValidationError(
                f"plan needs {ti[q]} units from source {q}, matching carries less"
            )
    return out


def batch_update(
    m: Transport,
    x: Diagram,
    sketch: Sketch,
    i: int,
    k: int,
    counter: list | None = None,
) -> Transport:
    """Fold the locally optimal bottleneck update over plans i..k-1.

    ``m`` must be a valid transport between x and reconstruct(sketch, i).
    When eps_i <= 2 eps_k the total candidate-edge work is near-linear;
    ``counter`` (a one-element list) accumulates the edges examined.
    """
    if not 0 <= i <= k <= sketch.size:
        raise ValidationError(f"window {i}..{k} out of range 0..{sketch.size}")
    current = m
    prefix = sketch.reconstruct(i)
    pts = list(prefix.points)
    mults = list(prefix.mults)
    for j in range(i, k):
        d_j = Diagram(zip(pts, mults), sort=False)
        plan = sketch.plans[j]
        current = local_update_bottleneck(
            current, plan, x, d_j, sketch.order[j], counter=counter
        )
        mults.append(plan.total_mass)
        pts.append(sketch.order[j])
        for src, mass in plan.moves:
            if src is not DIAG:
                mults[src] -= mass
    return current
