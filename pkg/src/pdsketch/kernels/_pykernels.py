"""NumPy-vectorized kernels: the portable fallback for the builder's hot loops.

The compiled variant in ``_ckernels.pyx`` mirrors these functions exactly;
both must keep identical arithmetic (max/abs/halving only, no reassociation)
so that sketches are reproducible regardless of which path ran.
"""

from __future__ import annotations

import numpy as np

_EMPTY = np.empty(0, dtype=np.int64)


def scan_point(zb, zd, ids, xb, xd, key, rv, cell_of, new_cell):
    """Reassign members strictly closer to the point center (zb, zd).

    Returns (moved ids, kept ids, kept radius, kept farthest id).  Mutates
    key/rv/cell_of for moved members.  Projection members carry key 0 and
    therefore never move to a point center.
    """
    if len(ids) == 0:
        return _EMPTY, _EMPTY, 0.0, -1
    d = np.maximum(np.abs(xb[ids] - zb), np.abs(xd[ids] - zd))
    mask = d < key[ids]
    moved = ids[mask]
    kept = ids[~mask]
    if len(moved):
        dm = d[mask]
        key[moved] = dm
        rv[moved] = dm
        cell_of[moved] = new_cell
    radius, far = cell_stats(kept, rv)
    return moved, kept, radius, far


def scan_segment(lo, hi, t_new, n_real, ids, xb, xd, rv, cell_of, new_cell):
    """Reassign members whose diagonal projection falls strictly inside (lo, hi).

    Boundary projections stay with the earlier-inserted cell.  Moved
    projection members get a new priority |t_new - t|; moved diagram points
    keep their distance-to-diagonal priority.  Keys stay untouched (0 for
    projections, half-persistence for diagram points in diagonal cells).
    """
    if len(ids) == 0:
        return _EMPTY, _EMPTY, 0.0, -1
    bb = xb[ids]
    tmid = (bb + xd[ids]) / 2.0
    mask = (lo < tmid) & (tmid < hi)
    moved = ids[mask]
    kept = ids[~mask]
    if len(moved):
        cell_of[moved] = new_cell
        proj = moved >= n_real
        rv[moved[proj]] = np.abs(t_new - xb[moved[proj]])
        real = moved[~proj]
        rv[real] = (xd[real] - xb[real]) / 2.0
    radius, far = cell_stats(kept, rv)
    return moved, kept, radius, far


def cell_stats(ids, rv):
    """Max member priority and its owner; ties to the smallest id. Empty: (0, -1)."""
    if len(ids) == 0:
        return 0.0, -1
    vals = rv[ids]
    radius = vals.max()
    far = ids[vals == radius].min()
    return float(radius), int(far)
