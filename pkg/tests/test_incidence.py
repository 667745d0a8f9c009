"""Distance curves, projections, the counting identity, and frame algebra."""

import math
from fractions import Fraction

import numpy as np
import pytest

from pfafflab.curves import circle_arc, exp_arc, line_arc
from pfafflab.errors import (
    DegenerateTripleError,
    InconsistencyError,
    PreconditionError,
)
from pfafflab.incidence import (
    A0,
    A1,
    NON_DEGENERATE,
    W_MINUS_1,
    W_PLUS_1,
    CanonicalTriple,
    DistanceCurve,
    canonicalize_triple,
    count_incidences,
    degeneracy_witness,
    exclusion_case,
    intersections_csv,
    is_incident,
    pairwise_intersection,
    project_curve,
    quad_coefficients,
    triple_intersection_count,
)
from pfafflab.metrics import PointConfiguration, proximity_energy
from pfafflab.poly import Polynomial


def test_is_incident_spot():
    arc = line_arc(1.0, 0.0, (0.0, 1.0))
    c = DistanceCurve(p_i=(0, 0), p_j=(1, 0), arc=arc)
    assert is_incident(c, (0, 1), (1, 1))
    same = DistanceCurve(p_i=(0, 0), p_j=(0, 0), arc=arc)
    assert is_incident(same, (2, 3), (2, 3))
    assert not is_incident(c, (0, 1), (3, 1))


def test_projected_equation_line_case():
    # A horizontal second curve gives F = x^2 - (1-y)^2.
    arc = line_arc(1e-12, 0.0, (-3.0, 3.0))  # numerically the x-axis
    c = DistanceCurve(p_i=(0.0, 0.0), p_j=(1.0, 0.0), arc=arc)
    proj = project_curve(c, validate=False)
    for x, y in ((0.5, 0.5), (-1.0, 2.0), (2.0, -1.0)):
        want = x * x - (1.0 - y) ** 2
        assert abs(proj.fn(x, y) - want) < 1e-9


def test_projected_diagonal_identity():
    # Equal anchors put the whole diagonal on the projected curve.
    arc = exp_arc(window=(0.0, 1.0))
    c = DistanceCurve(p_i=(0.0, 0.0), p_j=(0.0, 0.0), arc=arc)
    proj = project_curve(c, validate=False)
    for x in np.linspace(0.05, 0.95, 7):
        assert abs(proj.fn(float(x), float(x))) < 1e-12


def test_projection_bijectivity_check():
    arc = exp_arc(window=(0.0, 1.0))
    c = DistanceCurve(p_i=(0.2, 2.0), p_j=(0.7, 2.5), arc=arc)
    project_curve(c, validate=True, checks=50, seed=3)


def _on_curve_cfg(m, n):
    a1 = exp_arc(window=(-1.0, 1.2))
    a2 = circle_arc((0.0, -4.0), 3.0, (0.3, 2.7), upper=True)
    from pfafflab.configs import ConfigSpec, OnCurve, Uniform, generate

    spec = ConfigSpec(family=OnCurve(a1, a2), m=m, n=n, scheme=Uniform())
    return generate(spec)


def test_counting_identity_exact_and_float():
    # The two enumeration routes agree exactly.
    cfg = PointConfiguration(
        p1=tuple((i, 0) for i in range(8)),
        p2=tuple((j, 1) for j in range(8)),
    )
    for c in (0.1, 0.25, 0.5, 1.0):
        assert count_incidences(cfg, c) == proximity_energy(cfg, c)

    fl = _on_curve_cfg(9, 8)
    for c in (0.25, 1.0):
        assert count_incidences(fl, c) == proximity_energy(fl, c)


def test_counting_identity_4x4_value():
    cfg = PointConfiguration(
        p1=tuple((i, 0) for i in range(4)),
        p2=tuple((j, 1) for j in range(4)),
    )
    assert count_incidences(cfg, 1.0) == 72
    single = PointConfiguration(p1=((0, 0),), p2=((1, 1),))
    assert count_incidences(single, 0.5) == 1


def test_pairwise_identical_curves_overlap():
    arc = exp_arc(window=(0.0, 1.0))
    c1 = DistanceCurve(p_i=(0.1, 2.0), p_j=(0.8, 2.2), arc=arc, index_pair=(0, 1))
    rep = pairwise_intersection(c1, c1, grid=32)
    assert rep.overlap_suspected


def test_pairwise_generic_exp_anchors():
    # Four distinct anchors over y = e^x: finitely many isolated crossings,
    # stable under grid doubling (grid-refinement oracle).
    arc = exp_arc(window=(-0.5, 1.5))
    c1 = DistanceCurve(p_i=(0.0, 2.0), p_j=(1.0, 2.5), arc=arc)
    c2 = DistanceCurve(p_i=(0.5, 3.0), p_j=(-0.3, 2.8), arc=arc)
    rep1 = pairwise_intersection(c1, c2, grid=48)
    rep2 = pairwise_intersection(c1, c2, grid=96)
    assert not rep1.overlap_suspected
    assert len(rep1.points) == len(rep2.points)
    assert len(rep1.points) <= 8
    p1 = project_curve(c1, validate=False)
    p2 = project_curve(c2, validate=False)
    for x, y in rep1.points:
        assert abs(p1.fn(x, y)) < 1e-8
        assert abs(p2.fn(x, y)) < 1e-8


def test_pairwise_line_arc_at_most_four():
    arc = line_arc(0.7, 0.2, (-4.0, 4.0))
    c1 = DistanceCurve(p_i=(0.0, 3.0), p_j=(1.0, 3.0), arc=arc)
    c2 = DistanceCurve(p_i=(2.5, 4.0), p_j=(0.5, 2.0), arc=arc)
    # |p_i p_k| = 2.69..., |p_j p_l| = 1.118...: hypotheses hold
    rep1 = pairwise_intersection(c1, c2, grid=48)
    rep2 = pairwise_intersection(c1, c2, grid=96)
    assert len(rep1.points) == len(rep2.points)
    assert len(rep1.points) <= 4
    assert not rep1.overlap_suspected


def _shared_point_curves(arc, x_q, x_qp, anchors, angles):
    """Curves through the common projected point (x_q, x_qp).

    Each p_j is placed on the circle around q' of radius |p_i q|, so all
    three distance constraints hold at (q, q') simultaneously.
    """
    from pfafflab.curves import parameterize

    g2, _ = parameterize(arc)
    q = (x_q, float(g2(x_q)))
    qp = (x_qp, float(g2(x_qp)))
    curves = []
    for (p_i, phi) in zip(anchors, angles):
        r = math.hypot(p_i[0] - q[0], p_i[1] - q[1])
        p_j = (qp[0] + r * math.cos(phi), qp[1] + r * math.sin(phi))
        curves.append(DistanceCurve(p_i=p_i, p_j=p_j, arc=arc))
    return curves


def test_triple_conic_arc_at_most_four():
    # Three curves forced through one common point of the conic arc square:
    # at least one, at most four isolated common points, grid-stable.
    arc = circle_arc((0.0, 0.0), 2.0, (0.2, 1.8), upper=True)
    c1, c2, c3 = _shared_point_curves(
        arc, 0.7, 1.3,
        anchors=[(0.0, 3.0), (1.0, 3.5), (-1.0, 4.0)],
        angles=[0.4, 1.1, 2.3],
    )
    n1 = triple_intersection_count(c1, c2, c3, grid=48)
    n2 = triple_intersection_count(c1, c2, c3, grid=96)
    assert n1 == n2
    assert 1 <= n1 <= 4

    # generic anchors: approximately never a common point, still <= 4
    g1 = DistanceCurve(p_i=(0.0, 3.0), p_j=(0.3, 3.1), arc=arc)
    g2 = DistanceCurve(p_i=(1.0, 3.5), p_j=(-0.4, 2.9), arc=arc)
    g3 = DistanceCurve(p_i=(-1.0, 4.0), p_j=(0.9, 3.8), arc=arc)
    assert triple_intersection_count(g1, g2, g3, grid=48) <= 4


def test_triple_exp_arc_stable():
    arc = exp_arc(window=(-0.5, 1.5))
    c1, c2, c3 = _shared_point_curves(
        arc, 0.2, 0.9,
        anchors=[(0.0, 2.0), (0.5, 3.0), (-0.2, 2.4)],
        angles=[0.7, 1.9, 2.8],
    )
    n1 = triple_intersection_count(c1, c2, c3, grid=48)
    n2 = triple_intersection_count(c1, c2, c3, grid=96)
    assert n1 == n2
    assert n1 >= 1


def test_triple_hypothesis_violation_named():
    arc = exp_arc(window=(0.0, 1.0))
    c1 = DistanceCurve(p_i=(0.0, 2.0), p_j=(1.0, 2.0), arc=arc)
    c2 = DistanceCurve(p_i=(1.0, 2.0), p_j=(2.0, 2.0), arc=arc)  # same gap
    c3 = DistanceCurve(p_i=(0.5, 3.0), p_j=(0.4, 2.1), arc=arc)
    with pytest.raises(PreconditionError, match="first"):
        triple_intersection_count(c1, c2, c3)


def test_canonicalize_examples():
    t = canonicalize_triple((2, 0), (4, 0), (2, 2), (0, 0), (1, 0), (0, 1))
    assert abs(t.a - 0.0) < 1e-12 and abs(t.b - 1.0) < 1e-12

    t = canonicalize_triple((0, 0), (1, 0), (0, 1), (0, 0), (1, 0), (0, 1))
    assert abs(t.a) < 1e-12 and abs(t.b - 1.0) < 1e-12
    assert abs(t.w - 1.0) < 1e-12

    t = canonicalize_triple((0, 0), (1, 0), (0, 1), (0, 0), (2, 0), (2, 2))
    assert abs(t.w - 2.0) < 1e-12
    assert abs(t.c - 2.0) < 1e-12 and abs(t.d - 2.0) < 1e-12

    with pytest.raises(DegenerateTripleError):
        canonicalize_triple((0, 0), (0, 0), (1, 1), (0, 0), (1, 0), (0, 1))


def test_canonicalize_frame_transforms_recorded():
    t = canonicalize_triple((2, 1), (4, 1), (3, 3), (0, 0), (0, 2), (1, 1))
    f1, f2 = t.frames
    assert np.allclose(f1.apply((2, 1)), (0, 0))
    assert np.allclose(f1.apply((4, 1)), (1, 0))
    assert np.allclose(f2.apply((0, 0)), (0, 0))
    got = f2.apply((0, 2))
    assert abs(got[0] - t.w) < 1e-12 and abs(got[1]) < 1e-12


def test_quad_coefficients_spot():
    t = CanonicalTriple(a=Fraction(3), b=0, w=Fraction(2), c=Fraction(6), d=0)
    form = quad_coefficients(t)
    assert (form.axx, form.ayy, form.axy) == (0, 0, 0)

    t = CanonicalTriple(a=0, b=1, w=2, c=0, d=0)
    form = quad_coefficients(t)
    assert (form.axx, form.ayy, form.axy) == (3, -1, 0)

    t = CanonicalTriple(a=1, b=2, w=3, c=0, d=1)
    form = quad_coefficients(t)
    assert (form.axx, form.ayy, form.axy) == (41, -3, -6)


def test_quad_form_exact_against_direct_substitution():
    # For rational triples and rational second points, the expanded form
    # equals b^2 (|q1|^2 - |q2|^2) with q1 reconstructed from the two
    # linear relations: an exact, independent arithmetic route.
    rng = np.random.default_rng(17)
    for _ in range(40):
        nums = rng.integers(-6, 7, size=7)
        dens = rng.integers(1, 5, size=7)
        a, b, c, d, w, q2x, q2y = (
            Fraction(int(p), int(q)) for p, q in zip(nums, dens)
        )
        if b == 0 or w == 0:
            continue
        t = CanonicalTriple(a=a, b=b, w=w, c=c, d=d)
        form = quad_coefficients(t)
        k = (a * a + b * b - c * c - d * d + a * w * w - a) / 2
        q1x = w * q2x + (1 - w * w) / 2
        q1y = ((c - a * w) * q2x + d * q2y + k) / b
        direct = b * b * (q1x * q1x + q1y * q1y - q2x * q2x - q2y * q2y)
        via_form = (
            form.axx * q2x * q2x
            + form.ayy * q2y * q2y
            + form.axy * q2x * q2y
            + form.hx * q2x
            + form.hy * q2y
            + form.h0
        )
        assert direct == via_form


def test_quad_form_symbolic_identity():
    # Full 7-variable expansion: the coefficient of each quadratic monomial,
    # as a polynomial in (a, b, c, d, w), matches the closed forms exactly.
    A, B, C, D, W, X, Y = (Polynomial.variable(7, k) for k in range(7))
    half = Fraction(1, 2)
    one = Polynomial.constant(7, 1)
    q1x = W * X + (one - W * W) * half
    k = (A * A + B * B - C * C - D * D + A * W * W - A) * half
    bq1y = (C - A * W) * X + D * Y + k
    form = B * B * q1x * q1x + bq1y * bq1y - B * B * X * X - B * B * Y * Y

    def coeff_in_params(poly, ex, ey):
        terms = []
        for exps, coeff in poly.terms:
            if exps[5] == ex and exps[6] == ey:
                terms.append((exps[:5], coeff))
        return Polynomial(5, terms)

    a, b, c, d, w = (Polynomial.variable(5, k) for k in range(5))
    assert coeff_in_params(form, 2, 0) == b * b * w * w + (c - a * w) ** 2 - b * b
    assert coeff_in_params(form, 0, 2) == d * d - b * b
    assert coeff_in_params(form, 1, 1) == (c - a * w) * d * 2

    # linear coefficients, the implementer-derived part of the record
    k5 = (a * a + b * b - c * c - d * d + a * w * w - a) * Fraction(1, 2)
    want_hx = b * b * w * (1 - w * w) + k5 * (c - a * w) * 2
    want_hy = k5 * d * 2
    want_h0 = b * b * (1 - w * w) ** 2 * Fraction(1, 4) + k5 * k5
    assert coeff_in_params(form, 1, 0) == want_hx
    assert coeff_in_params(form, 0, 1) == want_hy
    assert coeff_in_params(form, 0, 0) == want_h0


def _degenerate_triple(rng, which):
    if which == A0:
        a = 0.0
        w = float(rng.uniform(2.0, 3.0))
    elif which == A1:
        a = 1.0
        w = float(rng.uniform(2.0, 3.0))
    elif which == W_PLUS_1:
        a = float(rng.uniform(2.0, 3.0))
        w = -1.0
    else:
        a = float(rng.uniform(2.0, 3.0))
        w = 1.0
    return CanonicalTriple(a=a, b=0.0, w=w, c=a * w, d=0.0), which


def test_degeneracy_witness_spot():
    t = CanonicalTriple(a=0.0, b=0.0, w=2.0, c=0.0, d=0.0)
    assert degeneracy_witness(t) == A0
    t = CanonicalTriple(a=1.0, b=0.0, w=2.0, c=2.0, d=0.0)
    assert degeneracy_witness(t) == A1
    t = CanonicalTriple(a=0.5, b=0.0, w=1.0, c=0.5, d=0.0)
    assert degeneracy_witness(t) == W_MINUS_1
    t = CanonicalTriple(a=0.5, b=0.0, w=-1.0, c=-0.5, d=0.0)
    assert degeneracy_witness(t) == W_PLUS_1


def test_degeneracy_witness_flags_nonvanishing():
    t = CanonicalTriple(a=0.3, b=1.0, w=2.0, c=0.1, d=0.4)
    assert degeneracy_witness(t) == NON_DEGENERATE


def test_degeneracy_completeness_500():
    rng = np.random.default_rng(99)
    kinds = [A0, A1, W_PLUS_1, W_MINUS_1]
    for k in range(500):
        t, which = _degenerate_triple(rng, kinds[k % 4])
        form = quad_coefficients(t)
        assert form.vanishes(1e-9)
        witness = degeneracy_witness(t, tol=1e-9)
        assert witness == which
        case = exclusion_case(witness)
        others = {
            A0: "second-pair-equal",
            A1: "third-pair-equal",
            W_PLUS_1: "first-pair-equal",
            W_MINUS_1: "first-pair-equal",
        }
        assert case == others[which]


def test_intersections_csv_schema():
    arc = line_arc(0.7, 0.2, (-4.0, 4.0))
    c1 = DistanceCurve(p_i=(0.0, 3.0), p_j=(1.0, 3.0), arc=arc, index_pair=(0, 1))
    c2 = DistanceCurve(p_i=(2.5, 4.0), p_j=(0.5, 2.0), arc=arc, index_pair=(2, 3))
    rep = pairwise_intersection(c1, c2, grid=48)
    text = intersections_csv([(c1, c2, rep)])
    lines = text.strip().splitlines()
    assert lines[0] == "i,j,k,l,x,y,cluster_size"
    assert len(lines) == 1 + len(rep.points)
    if len(lines) > 1:
        assert lines[1].startswith("0,1,2,3,")
