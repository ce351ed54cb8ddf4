"""Shared test input generators (seeded, deterministic)."""

from __future__ import annotations

import random

from pdsketch import Diagram, Point


def random_diagram(
    rng: random.Random,
    max_points: int,
    mult_high: int = 1,
    grid: int | None = None,
) -> Diagram:
    """Uniform diagram with up to max_points points; a grid forces ties."""
    n = rng.randint(0, max_points)
    entries = []
    for _ in range(n):
        if grid:
            b = float(rng.randint(0, grid))
            pers = float(rng.randint(1, grid))
        else:
            b = rng.uniform(0.0, 100.0)
            pers = rng.uniform(1e-6, 50.0)
        m = rng.randint(1, mult_high) if mult_high > 1 else 1
        entries.append((Point(b, b + pers), m))
    return Diagram(entries)


def random_massed_diagram(rng: random.Random, max_mass: int, span: float = 20.0) -> Diagram:
    """Diagram whose total multiplicity stays at or below max_mass."""
    entries = []
    mass = 0
    while mass < max_mass and rng.random() < 0.85:
        b = rng.uniform(0.0, span)
        pers = rng.uniform(0.1, span / 2.0)
        m = rng.randint(1, min(3, max_mass - mass))
        entries.append((Point(b, b + pers), m))
        mass += m
    return Diagram(entries)
