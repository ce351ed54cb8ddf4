import random

import pytest

from helpers import random_massed_diagram
from pdsketch import DIAG, Diagram, Point, ValidationError, diag_dist
from pdsketch.oracle import (
    brute_bottleneck,
    brute_greedy,
    brute_hausdorff,
    brute_opt_subset,
    natural_reweight,
)


def test_brute_greedy_three_point_example():
    d = Diagram([(Point(0, 10), 1), (Point(4, 6), 1), (Point(9, 10), 1)])
    res = brute_greedy(d)
    assert res.order == (Point(0, 10), Point(4, 6), Point(9, 10))
    assert res.radii == (5.0, 1.0, 0.5, 0.0)
    assert [dict(p.moves) for p in res.plans] == [{DIAG: 1}, {DIAG: 1}, {DIAG: 1}]


def test_brute_greedy_trivial_cases():
    assert brute_greedy(Diagram([])).radii == (0.0,)
    single = brute_greedy(Diagram([(Point(2, 8), 3)]))
    assert single.order == (Point(2, 8),)
    assert single.radii == (3.0, 0.0)
    assert dict(single.plans[0].moves) == {DIAG: 3}


def test_brute_greedy_radii_nonincreasing():
    rng = random.Random(11)
    for _ in range(100):
        res = brute_greedy(random_massed_diagram(rng, 12))
        assert all(a >= b for a, b in zip(res.radii, res.radii[1:]))


def test_brute_hausdorff_examples():
    a = [Point(0, 10)]
    assert brute_hausdorff(a, a) == 0
    assert brute_hausdorff(a, []) == 5
    assert brute_hausdorff(a, [Point(0, 8)]) == 2


def test_brute_bottleneck_examples():
    assert brute_bottleneck(Diagram([(Point(0, 2), 1)]), Diagram([(Point(10, 12), 1)])) == 1
    assert brute_bottleneck(Diagram([(Point(0, 10), 2)]), Diagram([(Point(0, 10), 1)])) == 5
    d = Diagram([(Point(3, 7), 2), (Point(0, 4), 1)])
    assert brute_bottleneck(d, d) == 0


def test_brute_bottleneck_cap():
    d = Diagram([(Point(0, 2), 10)])
    with pytest.raises(ValidationError):
        brute_bottleneck(d, d, cap=4)


def test_hausdorff_zero_but_bottleneck_large():
    # Same support, different multiplicity: flats agree, matchings cannot.
    a = Diagram([(Point(0, 10), 2)])
    b = Diagram([(Point(0, 10), 1)])
    assert brute_hausdorff(list(a.points), list(b.points)) == 0
    assert brute_bottleneck(a, b) == 5


def test_bottleneck_diagonal_monotonicity():
    rng = random.Random(13)
    for _ in range(50):
        a = random_massed_diagram(rng, 5)
        b = random_massed_diagram(rng, 5)
        base = brute_bottleneck(a, b, cap=24)
        # Adding mass on one side can only be absorbed via the diagonal.
        extra = Diagram(list(a) + [(Point(50.0, 50.5), 1)])
        grown = brute_bottleneck(extra, b, cap=24)
        assert grown >= base - max(diag_dist(p) for p in extra.points) - 1e-12


def test_natural_reweight_assigns_all_near_mass():
    d = Diagram([(Point(0, 10), 1), (Point(1, 10), 1)])
    rw = natural_reweight([Point(0, 10)], d)
    assert rw == Diagram([(Point(0, 10), 2)])
    rw2 = natural_reweight([Point(0, 10), Point(1, 10)], d)
    assert rw2 == d


def test_brute_opt_subset_examples():
    d = Diagram([(Point(0, 10), 1), (Point(4, 6), 1), (Point(9, 10), 1)])
    n = len(d)
    assert brute_opt_subset(d, n) == 0.0
    assert brute_opt_subset(d, 0) == 5.0
    assert brute_opt_subset(d, 1) == 1.0


def test_brute_opt_subset_caps():
    big = Diagram([(Point(float(i), float(i + 1)), 1) for i in range(11)])
    with pytest.raises(ValidationError):
        brute_opt_subset(big, 2)
