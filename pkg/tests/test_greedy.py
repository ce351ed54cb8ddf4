import random

import pytest

from helpers import random_diagram, random_massed_diagram
from pdsketch import DIAG, Diagram, Point, build_sketch, keep_edge
from pdsketch.generators import collinear_adversarial
from pdsketch.kernels import HAVE_COMPILED
from pdsketch.oracle import brute_greedy, brute_hausdorff


def as_tuple(res):
    return res.order, res.radii, res.plans


def test_keep_edge_examples():
    assert keep_edge(1, 2, 8) is True
    assert keep_edge(1, 2, 8.5) is False
    assert keep_edge(0, 0, 0) is True


def test_three_point_example():
    d = Diagram([(Point(0, 10), 1), (Point(4, 6), 1), (Point(9, 10), 1)])
    res = build_sketch(d)
    assert res.order == (Point(0, 10), Point(4, 6), Point(9, 10))
    assert res.radii == (5.0, 1.0, 0.5, 0.0)
    assert [dict(p.moves) for p in res.plans] == [{DIAG: 1}, {DIAG: 1}, {DIAG: 1}]


def test_mass_sharing_example():
    d = Diagram([(Point(0, 10), 1), (Point(1, 10), 1)])
    res = build_sketch(d)
    assert res.order == (Point(0, 10), Point(1, 10))
    assert res.radii == (5.0, 1.0, 0.0)
    assert dict(res.plans[0].moves) == {DIAG: 2}
    assert dict(res.plans[1].moves) == {0: 1}


def test_empty_and_single():
    empty = build_sketch(Diagram([]))
    assert empty.order == () and empty.radii == (0.0,) and empty.plans == ()
    single = build_sketch(Diagram([(Point(3, 5), 4)]))
    assert single.radii == (1.0, 0.0)
    assert dict(single.plans[0].moves) == {DIAG: 4}


@pytest.mark.parametrize("grid", [None, 12])
def test_matches_oracle_on_random_diagrams(grid):
    rng = random.Random(101 if grid else 202)
    for _ in range(150):
        d = random_diagram(rng, 48, mult_high=3, grid=grid)
        assert as_tuple(build_sketch(d)) == as_tuple(brute_greedy(d))


def test_kernel_parity():
    if not HAVE_COMPILED:
        pytest.skip("compiled kernels not built")
    rng = random.Random(7)
    for _ in range(60):
        d = random_diagram(rng, 48, mult_high=2, grid=rng.choice([None, 9]))
        assert as_tuple(build_sketch(d, kernels="c")) == as_tuple(build_sketch(d, kernels="py"))


def test_naive_variant_same_output():
    # Inserting diagonal projections never changes the off-diagonal order.
    rng = random.Random(55)
    for _ in range(80):
        d = random_diagram(rng, 40, grid=rng.choice([None, 10]))
        assert as_tuple(build_sketch(d)) == as_tuple(build_sketch(d, naive_diagonal=True))


def test_radii_match_hausdorff_oracle():
    rng = random.Random(77)
    for _ in range(60):
        d = random_diagram(rng, 24)
        res = build_sketch(d)
        flat = list(d.points)
        for i in range(len(res.order) + 1):
            prefix = list(res.order[:i])
            assert res.radii[i] == brute_hausdorff(prefix, flat)


def test_plan_source_bound():
    rng = random.Random(88)
    families = [random_diagram(rng, 64) for _ in range(40)]
    families.append(collinear_adversarial(400))
    for d in families:
        res = build_sketch(d)
        assert all(len(p.moves) <= 25 for p in res.plans)


def test_partial_stops():
    d = Diagram([(Point(0, 10), 1), (Point(4, 6), 1), (Point(9, 10), 1)])
    by_precision = build_sketch(d, precision=0.5)
    assert len(by_precision.order) == 2
    assert by_precision.radii == (5.0, 1.0, 0.5)
    assert not by_precision.complete
    by_size = build_sketch(d, max_points=1)
    assert by_size.radii == (5.0, 1.0)
    assert build_sketch(d, precision=0.0).complete
    assert build_sketch(d, max_points=10).complete


def test_partial_prefix_agrees_with_full():
    rng = random.Random(31)
    for _ in range(40):
        d = random_diagram(rng, 32)
        full = build_sketch(d)
        n = len(full.order)
        if n < 2:
            continue
        k = rng.randint(1, n - 1)
        part = build_sketch(d, max_points=k)
        assert part.order == full.order[:k]
        assert part.radii == full.radii[: k + 1]
        assert part.plans == full.plans[:k]


def test_neighbor_sufficiency_trace():
    # Every stolen member came from a cell within the pruning horizon of the
    # parent at the moment of insertion.
    rng = random.Random(41)
    for _ in range(40):
        d = random_diagram(rng, 40, grid=rng.choice([None, 8]))
        trace = []
        build_sketch(d, trace=trace)
        for rec in trace:
            for src in rec["sources"]:
                if src == rec["parent"]:
                    continue
                assert keep_edge(
                    rec["parent_radius"], rec["radii"][src], rec["dists"][src]
                ), rec


def test_touch_counts_scale():
    # One point: constant work.  Adversarial family: the modified traversal
    # stays near-linear while the naive one goes quadratic.
    tiny = build_sketch(Diagram([(Point(0, 2), 1)]))
    assert 1 <= tiny.stats.touches <= 4
    sizes = [256, 512, 1024]
    modified = [build_sketch(collinear_adversarial(n)).stats.touches for n in sizes]
    naive = [
        build_sketch(collinear_adversarial(n), naive_diagonal=True).stats.touches
        for n in sizes
    ]
    assert modified[-1] / modified[0] < 6  # ~n log n over a 4x size range
    assert naive[-1] / naive[0] > 12  # ~n^2
    assert naive[0] == 256 * 255 / 2


def test_stats_report_kernel():
    d = Diagram([(Point(0, 2), 1)])
    assert build_sketch(d, kernels="py").stats.kernel == "py"
