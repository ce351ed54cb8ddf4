import io
import math
import random

import pytest

from pdsketch import (
    Diagram,
    ParseError,
    Point,
    UnsupportedInputError,
    ValidationError,
    diag_dist,
    diag_proj,
    linf_dist,
    parse_diagram,
    serialize_diagram,
)


def test_linf_dist_examples():
    assert linf_dist(Point(1, 3), Point(2, 5)) == 2
    assert linf_dist(Point(0, 10), Point(0, 10)) == 0
    assert linf_dist(Point(0, 10), Point(4, 6)) == 4


def test_diag_proj_examples():
    assert diag_proj(Point(1, 3)) == Point(2, 2)
    assert diag_proj(Point(0, 10)) == Point(5, 5)
    assert diag_proj(Point(4, 6)) == Point(5, 5)


def test_diag_dist_examples():
    assert diag_dist(Point(0, 10)) == 5
    assert diag_dist(Point(4, 6)) == 1
    assert diag_dist(Point(9, 10)) == 0.5


def test_triangle_inequality_random_triples():
    rng = random.Random(1)
    for _ in range(2000):
        p, q, r = (
            Point(rng.uniform(-50, 50), rng.uniform(-50, 50)) for _ in range(3)
        )
        assert linf_dist(p, r) <= linf_dist(p, q) + linf_dist(q, r) + 1e-12


def test_diagonal_distance_is_minimal_over_diagonal_points():
    rng = random.Random(2)
    for _ in range(500):
        b = rng.uniform(0, 50)
        p = Point(b, b + rng.uniform(0.01, 30))
        dd = diag_dist(p)
        for _ in range(20):
            t = rng.uniform(-100, 200)
            assert linf_dist(p, Point(t, t)) >= dd - 1e-12
        mid = (p.birth + p.death) / 2
        assert linf_dist(p, Point(mid, mid)) == pytest.approx(dd, rel=1e-12, abs=1e-12)


def test_parse_examples():
    d = parse_diagram("0 10\n4 6\n")
    assert list(d) == [(Point(0, 10), 1), (Point(4, 6), 1)]
    d = parse_diagram("0 10 2\n0 10\n")
    assert list(d) == [(Point(0, 10), 3)]
    d = parse_diagram("3 3\n0 10\n")
    assert list(d) == [(Point(0, 10), 1)]
    assert d.dropped == 1


def test_parse_comments_and_blanks():
    d = parse_diagram("# header\n\n1 2  # trailing\n")
    assert list(d) == [(Point(1, 2), 1)]


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        parse_diagram("0 10\nnot a point\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse_diagram("1 2 3 4\n")
    with pytest.raises(ValidationError):
        parse_diagram("5 3\n")
    with pytest.raises(ValidationError):
        parse_diagram("1 2 0\n")
    with pytest.raises(UnsupportedInputError):
        parse_diagram("0 inf\n")
    with pytest.raises(UnsupportedInputError):
        parse_diagram("nan 1\n")


def test_diagram_rejects_bad_points_directly():
    with pytest.raises(ValidationError):
        Diagram([(Point(3, 1), 1)])
    with pytest.raises(UnsupportedInputError):
        Diagram([(Point(0, math.inf), 1)])


def test_parse_serialize_roundtrip():
    rng = random.Random(3)
    for _ in range(50):
        entries = []
        for _ in range(rng.randint(0, 30)):
            b = rng.uniform(0, 100)
            entries.append((Point(b, b + rng.uniform(1e-9, 50)), rng.randint(1, 5)))
        d = Diagram(entries)
        buf = io.StringIO()
        serialize_diagram(d, buf)
        again = parse_diagram(buf.getvalue())
        assert again == d
        buf2 = io.StringIO()
        serialize_diagram(again, buf2)
        assert buf2.getvalue() == buf.getvalue()


def test_diagram_multiset_semantics():
    d = Diagram([(Point(0, 1), 2), (Point(0, 1), 3)])
    assert d.mult(Point(0, 1)) == 5
    assert d.total_mass == 5
    assert len(d) == 1
    unsorted_d = Diagram([(Point(5, 6), 1), (Point(0, 1), 1)], sort=False)
    assert unsorted_d.points[0] == Point(5, 6)
    assert unsorted_d == Diagram([(Point(0, 1), 1), (Point(5, 6), 1)])
