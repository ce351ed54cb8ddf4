"""The persisted O(n) sketch: greedy order, error radii, transportation plans.

A sketch stores, for a diagram D with n distinct points, the greedy order
p_0..p_{k-1} (k = n for a full sketch), the error radii eps_0..eps_k where
eps_i is both the Hausdorff and the bottleneck distance between the i-th
reweighted prefix and D, and one transportation plan per step recording
which earlier points (or the diagonal) surrendered mass to the new point.
Every prefix diagram is recovered by replaying the plans as a ledger, so
nothing beyond the O(n) numbers is ever stored.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from typing import NamedTuple, TextIO

from .diagram import DIAG, Diagram, Point
from .errors import ParseError, PrecisionUnreachableError, ValidationError

PlanSource = object  # int order index or DIAG


class TransportationPlan(NamedTuple):
    """Mass moves into point ``target`` (an order index) at its insertion.

    ``moves`` lists (source, mass) pairs, the source being an earlier order
    index or DIAG, ordered diagonal-first then by ascending index.
    """

    target: int
    moves: tuple[tuple[PlanSource, int], ...]

    @property
    def total_mass(self) -> int:
        return sum(m for _, m in self.moves)


def canonical_moves(moves: dict) -> tuple[tuple[PlanSource, int], ...]:
    """Deterministic move order: diagonal first, then ascending source index."""
    return tuple(
        (src, moves[src])
        for src in sorted(moves, key=lambda s: (-1,) if s is DIAG else (0, s))
    )


@dataclass(frozen=True)
class Sketch:
    """Immutable sketch of a diagram; all queries are read-only."""

    order: tuple[Point, ...]
    radii: tuple[float, ...]
    plans: tuple[TransportationPlan, ...]
    source_total_mass: int
    complete: bool

    def __post_init__(self):
        if len(self.radii) != len(self.order) + 1:
            raise ValidationError("radii must have one more entry than order")
        if any(a < b for a, b in zip(self.radii, self.radii[1:])):
            raise ValidationError("radii must be nonincreasing")

    @property
    def size(self) -> int:
        return len(self.order)

    def reconstruct(self, i: int) -> Diagram:
        """The i-th approximation D_i: first i points with their natural weights.

        Replays plans 0..i-1 as ledger updates; D_0 is the empty diagram.  The
        returned diagram keeps the greedy point order, so index j refers to
        order[j].
        """
        if not 0 <= i <= self.size:
            raise IndexError(f"prefix index {i} out of range 0..{self.size}")
        ledger = [0] * i
        for j in range(i):
            plan = self.plans[j]
            ledger[j] += plan.total_mass
            for src, mass in plan.moves:
                if src is not DIAG:
                    ledger[src] -= mass
        return Diagram(
            ((self.order[j], ledger[j]) for j in range(i)), sort=False
        )

    def error_at(self, i: int) -> float:
        """eps_i: the exact bottleneck (= Hausdorff) distance from D_i to D."""
        if not 0 <= i < len(self.radii):
            raise IndexError(f"index {i} out of range 0..{len(self.radii) - 1}")
        return self.radii[i]

    def min_index_for_error(self, eps: float) -> int:
        """Smallest i with eps_i <= eps (radii are nonincreasing, binary search).

        Raises PrecisionUnreachableError when a partial sketch cannot reach
        the requested precision; a full sketch always can (eps_n = 0).
        """
        if eps < 0:
            raise ValidationError("precision must be nonnegative")
        neg = [-r for r in self.radii]
        i = bisect_left(neg, -eps)
        if i == len(self.radii):
            raise PrecisionUnreachableError(
                f"partial sketch reaches eps={self.radii[-1]}, requested {eps}"
            )
        return i

    def entry_count(self) -> int:
        """Total (source, mass) entries across all plans; at most 25 per plan."""
        return sum(len(p.moves) for p in self.plans)

    def max_fanin(self) -> int:
        return max((len(p.moves) for p in self.plans), default=0)


def build(
    diagram: Diagram,
    *,
    max_points: int | None = None,
    precision: float | None = None,
) -> Sketch:
    """Construct the sketch of a diagram (thin wrapper over the greedy builder)."""
    from .greedy import build_sketch

    result = build_sketch(diagram, max_points=max_points, precision=precision)
    return from_greedy(result, diagram)


def from_greedy(result, diagram: Diagram) -> Sketch:
    return Sketch(
        order=tuple(result.order),
        radii=tuple(result.radii),
        plans=tuple(result.plans),
        source_total_mass=diagram.total_mass,
        complete=result.complete,
    )


_HEADER_RE = re.compile(r"^pdsketch v1 n=(\d+)$")
_EPS_RE = re.compile(r"^eps_(\d+) (\S+)$")


def write_sketch(sketch: Sketch, stream: TextIO) -> None:
    """Text format: header, one point line per step, plan lines, error trailer."""
    n = sketch.size
    stream.write(f"pdsketch v1 n={n}\n")
    for i, p in enumerate(sketch.order):
        stream.write(f"{i} {p.birth!r} {p.death!r} {sketch.radii[i]!r}\n")
    for plan in sketch.plans:
        for src, mass in plan.moves:
            tag = "diag" if src is DIAG else str(src)
            stream.write(f"{plan.target} <- {tag} {mass}\n")
    stream.write(f"eps_{n} {sketch.radii[n]!r}\n")


def read_sketch(stream: TextIO | str) -> Sketch:
    """Parse the sketch text format, validating structure line by line."""
    text = stream if isinstance(stream, str) else stream.read()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty sketch file", line=1)
    m = _HEADER_RE.match(lines[0].strip())
    if not m:
        raise ParseError(f"bad header {lines[0]!r}", line=1)
    n = int(m.group(1))
    if len(lines) < n + 2:
        raise ParseError(f"expected at least {n + 2} lines, got {len(lines)}")
    order: list[Point] = []
    radii: list[float] = []
    for i in range(n):
        fields = lines[1 + i].split()
        if len(fields) != 4 or fields[0] != str(i):
            raise ParseError(f"bad point line {lines[1 + i]!r}", line=i + 2)
        try:
            b, d, eps = float(fields[1]), float(fields[2]), float(fields[3])
        except ValueError:
            raise ParseError(f"bad number in {lines[1 + i]!r}", line=i + 2) from None
        order.append(Point(b, d))
        radii.append(eps)
    moves: list[dict] = [dict() for _ in range(n)]
    trailer = None
    for lineno, raw in enumerate(lines[1 + n :], start=n + 2):
        text_line = raw.strip()
        if not text_line:
            continue
        m = _EPS_RE.match(text_line)
        if m:
            if int(m.group(1)) != n:
                raise ParseError(f"trailer index {m.group(1)} != n={n}", line=lineno)
            try:
                trailer = float(m.group(2))
            except ValueError:
                raise ParseError(f"bad trailer {raw!r}", line=lineno) from None
            continue
        fields = text_line.split()
        if len(fields) != 4 or fields[1] != "<-":
            raise ParseError(f"bad plan line {raw!r}", line=lineno)
        try:
            target = int(fields[0])
            mass = int(fields[3])
        except ValueError:
            raise ParseError(f"bad plan line {raw!r}", line=lineno) from None
        if not 0 <= target < n:
            raise ParseError(f"plan target {target} out of range", line=lineno)
        src: PlanSource
        if fields[2] == "diag":
            src = DIAG
        else:
            try:
                src = int(fields[2])
            except ValueError:
                raise ParseError(f"bad plan source {fields[2]!r}", line=lineno) from None
            if not 0 <= src < target:
                raise ParseError(f"plan source {src} not earlier than {target}", line=lineno)
        if mass <= 0:
            raise ParseError(f"plan mass {mass} must be positive", line=lineno)
        moves[target][src] = moves[target].get(src, 0) + mass
    if trailer is None:
        raise ParseError("missing eps trailer line")
    radii.append(trailer)
    plans = tuple(
        TransportationPlan(target=i, moves=canonical_moves(moves[i])) for i in range(n)
    )
    # Mass enters the ledger only from the diagonal, so for a full sketch this
    # recovers the input mass exactly; a partial sketch file does not record
    # the mass still resting on the diagonal.
    total = sum(m for p in plans for src, m in p.moves if src is DIAG)
    return Sketch(
        order=tuple(order),
        radii=tuple(radii),
        plans=plans,
        source_total_mass=total,
        complete=(trailer == 0.0),
    )
