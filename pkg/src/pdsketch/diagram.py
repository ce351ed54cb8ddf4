"""Planar geometry under the L-infinity norm and the persistence-diagram multiset.

A diagram point is a (birth, death) pair with death > birth; the diagonal
{(t, t)} is implicit in every diagram and acts as an infinite mass reservoir.
Coordinates are 64-bit floats and all comparisons are exact: no epsilons,
so results are reproducible bit-for-bit across platforms.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, TextIO

from .errors import ParseError, UnsupportedInputError, ValidationError


class Point(NamedTuple):
    """An off-diagonal diagram point. Tuple order gives the lexicographic tie rule."""

    birth: float
    death: float


class _Diagonal:
    """Singleton marker for the diagonal in plans and transports."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "diag"


DIAG = _Diagonal()


def linf_dist(p: Point, q: Point) -> float:
    """L-infinity distance max(|p_b - q_b|, |p_d - q_d|)."""
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def diag_proj(p: Point) -> Point:
    """Nearest diagonal point under L-infinity: the midpoint ((b+d)/2, (b+d)/2)."""
    t = (p[0] + p[1]) / 2.0
    return Point(t, t)


def diag_dist(p: Point) -> float:
    """Distance from p to the diagonal: (death - birth) / 2."""
    return (p[1] - p[0]) / 2.0


class Diagram:
    """A finite multiset of off-diagonal points with positive integer multiplicities.

    Duplicate points are merged, zero-persistence points are dropped (they
    coincide with the diagonal, which already has infinite multiplicity), and
    the dropped count is retained for reporting.  By default points are stored
    in lexicographic (birth, death) order; pass ``sort=False`` to preserve the
    caller's order (used by sketch reconstruction, where the order is the
    greedy order).
    """

    __slots__ = ("points", "mults", "dropped", "_index")

    def __init__(self, entries: Iterable[tuple[Point, int]] = (), *, sort: bool = True):
        merged: dict[Point, int] = {}
        order: list[Point] = []
        dropped = 0
        for raw, mult in entries:
            b, d = float(raw[0]), float(raw[1])
            if not (math.isfinite(b) and math.isfinite(d)):
                raise UnsupportedInputError(f"non-finite coordinate in point ({b}, {d})")
            if d < b:
                raise ValidationError(f"death {d} < birth {b}")
            if mult <= 0:
                raise ValidationError(f"multiplicity {mult} must be positive")
            if d == b:
                dropped += int(mult)
                continue
            p = Point(b, d)
            if p not in merged:
                order.append(p)
            merged[p] = merged.get(p, 0) + int(mult)
        if sort:
            order.sort()
        self.points: tuple[Point, ...] = tuple(order)
        self.mults: tuple[int, ...] = tuple(merged[p] for p in order)
        self.dropped = dropped
        self._index = {p: i for i, p in enumerate(order)}

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.mults))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return sorted(zip(self.points, self.mults)) == sorted(zip(other.points, other.mults))

    def __hash__(self):
        return hash(tuple(sorted(zip(self.points, self.mults))))

    def __repr__(self) -> str:
        inner = ", ".join(f"({p.birth}, {p.death}): {m}" for p, m in self)
        return f"Diagram{{{inner}}}"

    @property
    def total_mass(self) -> int:
        return sum(self.mults)

    def mult(self, p: Point) -> int:
        """Multiplicity of an off-diagonal point (0 if absent)."""
        i = self._index.get(p)
        return 0 if i is None else self.mults[i]

    def index(self, p: Point) -> int:
        return self._index[p]


def parse_diagram(stream: TextIO | str) -> Diagram:
    """Read the text format: one ``birth death [multiplicity]`` per line.

    ``#`` starts a comment, blank lines are skipped, multiplicity defaults
    to 1.  Raises ParseError (with line number) on malformed lines,
    ValidationError on death < birth, UnsupportedInputError on non-finite
    coordinates.
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream.read().splitlines()
    entries: list[tuple[Point, int]] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        fields = text.split()
        if len(fields) not in (2, 3):
            raise ParseError(f"expected 'birth death [multiplicity]', got {raw!r}", line=lineno)
        try:
            b = float(fields[0])
            d = float(fields[1])
        except ValueError:
            raise ParseError(f"bad coordinate in {raw!r}", line=lineno) from None
        mult = 1
        if len(fields) == 3:
            try:
                mult = int(fields[2])
            except ValueError:
                raise ParseError(f"bad multiplicity in {raw!r}", line=lineno) from None
        if not (math.isfinite(b) and math.isfinite(d)):
            raise UnsupportedInputError(f"line {lineno}: non-finite coordinate ({b}, {d})")
        if d < b:
            raise ValidationError(f"line {lineno}: death {d} < birth {b}")
        if mult <= 0:
            raise ValidationError(f"line {lineno}: multiplicity {mult} must be positive")
        entries.append((Point(b, d), mult))
    return Diagram(entries)


def serialize_diagram(diagram: Diagram, stream: TextIO) -> None:
    """Write the text format; ``repr`` of floats round-trips exactly."""
    for p, m in diagram:
        if m == 1:
            stream.write(f"{p.birth!r} {p.death!r}\n")
        else:
            stream.write(f"{p.birth!r} {p.death!r} {m}\n")
