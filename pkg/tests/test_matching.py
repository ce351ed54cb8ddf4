import io
import itertools
import random

import pytest

from helpers import random_massed_diagram
from pdsketch import DIAG, Diagram, Point, ValidationError, build, linf_dist
from pdsketch.matching import (
    Transport,
    batch_update,
    cost_bottleneck,
    cost_wasserstein,
    edge_length,
    exact_bottleneck,
    local_update_bottleneck,
    local_update_wasserstein,
    naive_update,
    nearest_transport,
    read_transport,
    validate_transport,
    write_transport,
)
from pdsketch.oracle import brute_bottleneck
from pdsketch.sketch import TransportationPlan


def test_cost_bottleneck_examples():
    a = Diagram([(Point(0, 10), 1)])
    b = Diagram([(Point(0, 8), 1)])
    assert cost_bottleneck(Transport({(0, 0): 1}), a, b) == 2
    only_diag = Diagram([])
    assert cost_bottleneck(Transport({(0, DIAG): 1}), a, only_diag) == 5
    assert cost_bottleneck(Transport(), only_diag, only_diag) == 0


def test_cost_wasserstein_examples():
    a = Diagram([(Point(0, 10), 1), (Point(4, 6), 1)])
    b = Diagram([(Point(0, 8), 1)])
    t = Transport({(0, 0): 1, (1, DIAG): 1})
    assert cost_wasserstein(t, a, b, 1) == 3
    assert cost_wasserstein(t, a, b, 2) == pytest.approx(5**0.5, abs=0)
    assert cost_wasserstein(Transport(), Diagram([]), Diagram([]), 3) == 0


def test_validate_transport_rejects_bad_sums():
    a = Diagram([(Point(0, 10), 2)])
    b = Diagram([(Point(0, 8), 1)])
    with pytest.raises(ValidationError):
        cost_bottleneck(Transport({(0, 0): 1}), a, b)
    ok = Transport({(0, 0): 1, (0, DIAG): 1})
    assert cost_bottleneck(ok, a, b) == 5


def test_exact_bottleneck_examples():
    cases = [
        (Diagram([(Point(0, 10), 1)]), Diagram([(Point(0, 8), 1)]), 2.0),
        (Diagram([(Point(0, 2), 1)]), Diagram([(Point(10, 12), 1)]), 1.0),
        (Diagram([(Point(0, 10), 2)]), Diagram([(Point(0, 10), 1)]), 5.0),
    ]
    for a, b, want in cases:
        value, transport = exact_bottleneck(a, b)
        assert value == want
        validate_transport(transport, a, b)
        assert cost_bottleneck(transport, a, b) == value


def test_exact_bottleneck_vs_oracle():
    rng = random.Random(23)
    for _ in range(200):
        a = random_massed_diagram(rng, 6)
        b = random_massed_diagram(rng, 6)
        value, transport = exact_bottleneck(a, b)
        assert value == brute_bottleneck(a, b, cap=24)
        validate_transport(transport, a, b)


def test_exact_bottleneck_big_multiplicities():
    # Far beyond unit-expansion scale; flows carry multiplicities directly.
    a = Diagram([(Point(0, 10), 2**40)])
    b = Diagram([(Point(1, 10), 2**40 - 1)])
    value, transport = exact_bottleneck(a, b)
    assert value == 5.0  # one leftover unit must reach the diagonal
    assert transport.mass(0, 0) == 2**40 - 1


def test_exact_bottleneck_respects_graph():
    a = Diagram([(Point(0, 10), 1)])
    b = Diagram([(Point(0, 9), 1)])
    with_edge, _ = exact_bottleneck(a, b, graph=[(0, 0)])
    assert with_edge == 1.0
    without, _ = exact_bottleneck(a, b, graph=[])
    assert without == 5.0  # both points forced through the diagonal


def test_naive_update_example():
    x = Diagram([(Point(1, 10), 1)])
    d1 = Diagram([(Point(0, 10), 1)], sort=False)
    m = Transport({(0, 0): 1})
    plan = TransportationPlan(target=1, moves=((0, 1),))
    out = naive_update(m, plan, x, d1)
    assert out.entries == {(0, 1): 1}
    d2 = Diagram([(Point(0, 10), 0 + 0), (Point(1, 10), 1)][1:], sort=False)


def test_naive_update_diagonal_only_plan():
    x = Diagram([(Point(5, 6), 1)])
    d0 = Diagram([], sort=False)
    m = Transport({(0, DIAG): 1})
    plan = TransportationPlan(target=0, moves=((DIAG, 2),))
    out = naive_update(m, plan, x, d0)
    # Only diagonal-incident mass moves; the real row is untouched.
    assert out.mass(0, DIAG) == 1
    assert out.mass(DIAG, 0) == 2


def test_naive_update_mass_mismatch():
    x = Diagram([(Point(1, 10), 1)])
    d1 = Diagram([(Point(0, 10), 1)], sort=False)
    m = Transport({(0, 0): 1})
    plan = TransportationPlan(target=1, moves=((0, 5),))
    with pytest.raises(ValidationError):
        naive_update(m, plan, x, d1)


def test_local_update_bottleneck_example():
    x = Diagram([(Point(0, 9), 1), (Point(1, 10), 1)])
    d1 = Diagram([(Point(0, 10), 2)], sort=False)
    m = Transport({(0, 0): 1, (1, 0): 1})
    plan = TransportationPlan(target=1, moves=((0, 1),))
    out = local_update_bottleneck(m, plan, x, d1, Point(1, 10))
    assert out.entries == {(0, 0): 1, (1, 1): 1}
    d2 = Diagram([(Point(0, 10), 1), (Point(1, 10), 1)], sort=False)
    assert cost_bottleneck(out, x, d2) == 1.0


def _enumerate_consistent(m, plan, x, d_i):
    """All plan-consistent reroutings that move whole units per source."""
    sources = [src for src, _ in plan.moves]
    ti = dict(plan.moves)
    target = plan.target
    per_source = []
    for q in sources:
        entries = m.col_entries(q)
        if q is DIAG:
            entries = entries + [(DIAG, ti[q])]  # implicit reservoir
        choices = []
        avail_keys = [y for y, _ in entries]
        counts = [c for _, c in entries]
        need = ti[q]
        for combo in itertools.product(*(range(c + 1) for c in counts)):
            if sum(combo) == need:
                choices.append(list(zip(avail_keys, combo)))
        per_source.append(choices)
    for assignment in itertools.product(*per_source):
        out = m.copy()
        ok = True
        for q, picks in zip(sources, assignment):
            for y, take in picks:
                if take == 0:
                    continue
                if y is DIAG and q is DIAG:
                    out.add(DIAG, target, take)
                else:
                    out.add(y, q, -take)
                    out.add(y, target, take)
        if ok:
            yield out


def test_local_update_minimal_over_enumeration():
    rng = random.Random(29)
    checked = 0
    for _ in range(200):
        d = random_massed_diagram(rng, 6)
        x = random_massed_diagram(rng, 6)
        s = build(d)
        if s.size == 0:
            continue
        _, m = exact_bottleneck(x, s.reconstruct(0))
        for j in range(s.size):
            d_j = s.reconstruct(j)
            d_j1 = s.reconstruct(j + 1)
            plan = s.plans[j]
            local = local_update_bottleneck(m, plan, x, d_j, s.order[j])
            local_cost = cost_bottleneck(local, x, d_j1)
            for other in _enumerate_consistent(m, plan, x, d_j):
                validate_transport(other, x, d_j1)
                assert local_cost <= cost_bottleneck(other, x, d_j1) + 1e-15
                checked += 1
            m = local
    assert checked > 200


def test_local_update_singleton_equals_naive():
    x = Diagram([(Point(1, 10), 1)])
    d1 = Diagram([(Point(0, 10), 1)], sort=False)
    m = Transport({(0, 0): 1})
    plan = TransportationPlan(target=1, moves=((0, 1),))
    a = naive_update(m, plan, x, d1)
    b = local_update_bottleneck(m, plan, x, d1, Point(1, 10))
    assert a.entries == b.entries


def test_wasserstein_update_moves_cheapest_units():
    # Two units at q, deltas of opposite sign: the negative one moves.
    x = Diagram([(Point(0, 10), 1), (Point(6, 8), 1)])
    d1 = Diagram([(Point(0, 9), 2)], sort=False)
    m = Transport({(0, 0): 1, (1, 0): 1})
    plan = TransportationPlan(target=1, moves=((0, 1),))
    new_point = Point(0, 10)  # unit 0 gets delta < 0, unit 1 delta > 0
    out = local_update_wasserstein(m, plan, x, d1, new_point, 2.0)
    assert out.mass(0, 1) == 1 and out.mass(1, 0) == 1
    d2 = Diagram([(Point(0, 9), 1), (Point(0, 10), 1)], sort=False)
    assert cost_wasserstein(out, x, d2, 2.0) <= cost_wasserstein(
        naive_update(m, plan, x, d1), x, d2, 2.0
    )


def test_wasserstein_update_all_mandated_equals_naive():
    x = Diagram([(Point(1, 10), 2)])
    d1 = Diagram([(Point(0, 10), 2)], sort=False)
    m = Transport({(0, 0): 2})
    plan = TransportationPlan(target=1, moves=((0, 2),))
    a = naive_update(m, plan, x, d1)
    b = local_update_wasserstein(m, plan, x, d1, Point(1, 10), 1.0)
    assert a.entries == b.entries


def test_wasserstein_delta_all_negative_decreases_cost():
    rng = random.Random(33)
    for _ in range(60):
        d = random_massed_diagram(rng, 8)
        x = random_massed_diagram(rng, 8)
        s = build(d)
        if s.size == 0:
            continue
        _, m = exact_bottleneck(x, s.reconstruct(0))
        for j in range(s.size):
            d_j, d_j1 = s.reconstruct(j), s.reconstruct(j + 1)
            out = local_update_wasserstein(m, s.plans[j], x, d_j, s.order[j], 2.0)
            validate_transport(out, x, d_j1)
            m = out


def test_batch_update_endpoints():
    rng = random.Random(37)
    d = random_massed_diagram(rng, 10)
    x = random_massed_diagram(rng, 10)
    s = build(d)
    _, m = exact_bottleneck(x, s.reconstruct(0))
    assert batch_update(m, x, s, 0, 0).entries == m.entries
    full = batch_update(m, x, s, 0, s.size)
    validate_transport(full, x, s.reconstruct(s.size))


def test_batch_update_cost_bound():
    rng = random.Random(38)
    for _ in range(40):
        d = random_massed_diagram(rng, 8)
        x = random_massed_diagram(rng, 8)
        s = build(d)
        if s.size == 0:
            continue
        i = rng.randint(0, s.size - 1)
        k = rng.randint(i, s.size)
        mi = nearest_transport(x, s.reconstruct(i))
        out = batch_update(mi, x, s, i, k)
        budget = sum(s.radii[j] + s.radii[j + 1] for j in range(i, k))
        pre = cost_bottleneck(mi, x, s.reconstruct(i))
        post = cost_bottleneck(out, x, s.reconstruct(k))
        assert post <= pre + budget + 1e-9


def test_transport_roundtrip():
    t = Transport({(0, 1): 2, (DIAG, 0): 1, (3, DIAG): 5})
    buf = io.StringIO()
    write_transport(t, buf)
    again = read_transport(buf.getvalue())
    assert again.entries == t.entries


def test_nearest_transport_is_valid_and_optimal_for_prefixes():
    rng = random.Random(39)
    for _ in range(40):
        d = random_massed_diagram(rng, 8)
        s = build(d)
        for i in range(s.size + 1):
            prefix = s.reconstruct(i)
            t = nearest_transport(d, prefix)
            # rows carry d's multiplicities; columns may differ from prefix
            # weights only if ties were broken differently, which the shared
            # rule forbids
            validate_transport(t, d, prefix)
            assert cost_bottleneck(t, d, prefix) == s.radii[i]
