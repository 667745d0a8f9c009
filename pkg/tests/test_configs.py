"""Named families, the log-circles pair, and the product invariant."""

import math

import numpy as np
import pytest

from pfafflab.configs import (
    Arithmetic,
    ConcentricCircles,
    ConfigSpec,
    GenericLines,
    Geometric,
    LogCircles,
    OnCurve,
    OrthogonalLines,
    ParallelLines,
    Point3,
    Uniform,
    config_text,
    distinct_distances_3d,
    gen_log_circles,
    generate,
    log_circle_invariant,
    parse_config_text,
    points_csv,
    random_points_3d,
)
from pfafflab.curves import circle_arc, exp_arc
from pfafflab.errors import DomainError, ParameterError, WindowError
from pfafflab.metrics import distance_histogram, energy
from pfafflab.pfaffian import pfaff_eval


def test_parallel_lines_distinct_is_max():
    for m, n in ((4, 4), (3, 7), (9, 2), (1, 5)):
        cfg = generate(ConfigSpec(family=ParallelLines(), m=m, n=n))
        hist = distance_histogram(cfg)
        assert hist.distinct == max(m, n)


def test_orthogonal_lines_few_distances():
    # sqrt-progressions give dist^2 = i + j: at most m + n - 1 classes.
    for m, n in ((4, 4), (6, 3), (8, 8)):
        cfg = generate(ConfigSpec(family=OrthogonalLines(), m=m, n=n))
        hist = distance_histogram(cfg)
        assert hist.distinct <= m + n


def test_concentric_circles_few_distances():
    for num in (5, 8, 12):
        cfg = generate(
            ConfigSpec(family=ConcentricCircles(1.0, 2.0), m=num, n=num)
        )
        hist = distance_histogram(cfg)
        assert hist.distinct <= num


def test_generic_lines_more_distances():
    cfg = generate(ConfigSpec(family=GenericLines(0.6), m=8, n=8))
    hist = distance_histogram(cfg)
    assert hist.distinct > 16  # far above the exceptional m + n


def test_on_curve_points_satisfy_equations():
    a1 = exp_arc(window=(-1.0, 1.0))
    a2 = circle_arc((0.0, -4.0), 3.0, (0.3, 2.7))
    spec = ConfigSpec(family=OnCurve(a1, a2), m=6, n=7, scheme=Uniform())
    cfg = generate(spec)
    assert cfg.m == 6 and cfg.n == 7
    for x, y in cfg.p1:
        assert abs(pfaff_eval(a1.f, (x, y))) < 1e-10
    for x, y in cfg.p2:
        assert abs(pfaff_eval(a2.f, (x, y))) < 1e-10


def test_on_curve_shared_arc_disjoint():
    a1 = exp_arc(window=(-1.0, 1.0))
    spec = ConfigSpec(family=OnCurve(a1, a1), m=5, n=5, scheme=Uniform())
    cfg = generate(spec)  # would raise if the sets collided
    assert cfg.m == cfg.n == 5


def test_on_curve_single_points():
    a1 = exp_arc(window=(-1.0, 1.0))
    a2 = circle_arc((0.0, -4.0), 3.0, (0.3, 2.7))
    cfg = generate(ConfigSpec(family=OnCurve(a1, a2), m=1, n=1))
    assert cfg.m == cfg.n == 1


def test_generate_rejects_log_circles():
    with pytest.raises(ParameterError):
        generate(ConfigSpec(family=LogCircles(), m=4, n=4))


def test_log_circles_spot_values():
    first, second = gen_log_circles(a=2.0, b=1.0, d=5.0, m=1, n=1,
                                    window1=(1.0, 1.0001), window2=(2.0, 2.0001))
    # x = 1: y^2 = 5 + 2 ln 1 - 0 = 5
    p = first[0]
    assert abs(p.x - 1.0) < 1e-3
    assert abs(p.y - math.sqrt(5.0 + 2.0 * math.log(p.x) - (p.x - 1) ** 2)) < 1e-12
    # x' = 2: z^2 = 5 + 2 ln 1 - 4 = 1
    q = second[0]
    assert abs(q.x - 2.0) < 1e-3
    assert abs(q.z - math.sqrt(5.0 + 2.0 * math.log(q.x - 1.0) - q.x**2)) < 1e-12

    first, second = gen_log_circles(m=1, n=1)
    assert len(first) == 1 and len(second) == 1


def test_log_circles_window_error_reports_feasible():
    with pytest.raises(WindowError) as err:
        gen_log_circles(a=2.0, b=1.0, d=5.0, m=4, n=4, window2=(2.0, 4.0))
    assert err.value.feasible is not None
    lo, hi = err.value.feasible
    assert lo < hi


def test_log_circle_invariant_small():
    first, second = gen_log_circles(m=10, n=10, scheme=Uniform())
    assert log_circle_invariant(first, second) < 1e-9


def test_log_circle_equal_u_equal_distance():
    a, b, d = 2.0, 1.0, 5.0
    # u = x (x'-B): pick two pairs with equal product
    x1, v1 = 1.2, 1.1
    x2, v2 = 1.1, 1.2 * 1.1 / 1.1  # x2 * v2 == x1 * v1
    x2 = 1.1
    v2 = x1 * v1 / x2

    def first_point(x):
        return Point3(x, math.sqrt(d + a * math.log(x) - (x - b) ** 2), 0.0)

    def second_point(v):
        x = v + b
        return Point3(x, 0.0, math.sqrt(d + a * math.log(v) - x * x))

    p1, p2 = first_point(x1), first_point(x2)
    q1, q2 = second_point(v1), second_point(v2)

    def dist2(p, q):
        return (p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2

    assert abs(dist2(p1, q1) - dist2(p2, q2)) < 1e-9


def test_log_circle_invariant_linear_when_a_zero():
    # With A = 0 the curves are circles and dist^2 is affine in u.
    first, second = gen_log_circles(a=0.0, b=1.0, d=5.0, m=6, n=6,
                                    scheme=Uniform(), window1=(1.0, 2.0),
                                    window2=(2.0, 2.2))
    d, b = 5.0, 1.0
    for p in first:
        for q in second:
            u = p.x * (q.x - b)
            d2 = (p.x - q.x) ** 2 + p.y**2 + q.z**2
            assert abs(d2 - (-2.0 * u + 2.0 * d - b * b)) < 1e-9


def test_log_circle_invariant_domain_error():
    p = [Point3(-1.0, 0.0, 0.0)]
    q = [Point3(2.0, 0.0, 1.0)]
    with pytest.raises(DomainError):
        log_circle_invariant(p, q)


def test_shared_ratio_scheme_few_distances():
    for size in (4, 8, 32):
        first, second = gen_log_circles(m=size, n=size, scheme=Geometric())
        got = distinct_distances_3d(first, second)
        assert got <= 2 * size - 1


def test_generic_3d_points_all_distinct():
    p = random_points_3d(8, seed=1)
    q = random_points_3d(8, seed=2, box=(20.0, 30.0))
    assert distinct_distances_3d(p, q) == 64


def test_log_circles_uniform_many_distances():
    first, second = gen_log_circles(m=8, n=8, scheme=Uniform())
    assert distinct_distances_3d(first, second) > 15


def test_points_csv():
    text = points_csv([Point3(1.0, 2.0, 3.0)])
    assert text.splitlines()[0] == "x,y,z"
    text = points_csv([(1, 2), (3, 4)])
    assert text.splitlines() == ["x,y", "1,2", "3,4"]


def test_config_text_round_trip():
    spec = ConfigSpec(family=ParallelLines(), m=12, n=7,
                      scheme=Geometric(1.5), seed=3)
    back = parse_config_text(config_text(spec))
    assert back.m == 12 and back.n == 7 and back.seed == 3
    assert isinstance(back.scheme, Geometric)
    assert back.scheme.ratio == 1.5

    lc = parse_config_text("family=logcircles\nA=2.5\nB=1.0\nD=4.0\nm=6\nn=6\n")
    assert isinstance(lc.family, LogCircles)
    assert lc.family.a == 2.5


def test_exceptional_families_cauchy_schwarz():
    for family in (ParallelLines(), OrthogonalLines(), ConcentricCircles()):
        cfg = generate(ConfigSpec(family=family, m=10, n=10))
        hist = distance_histogram(cfg)
        e = energy(hist)
        assert e * hist.distinct >= (cfg.m * cfg.n) ** 2
