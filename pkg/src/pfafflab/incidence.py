"""Incidence objects built from a point configuration and an arc.

A distance curve for anchors (p_i, p_j) is the set of pairs (q, q') on the
arc's curve with |p_i q| = |p_j q'|; identifying a point of the arc with its
x-coordinate projects the curve to the plane, where intersections can be
hunted on a lattice.  The canonical-frame algebra at the bottom reduces a
triple of such curves to one quadratic form in the second frame's
coordinates and names the degenerate factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .curves import parameterize
from .errors import (
    DegenerateTripleError,
    InconsistencyError,
    ParameterError,
    PreconditionError,
)
from .metrics import ProximityParams, distance_histogram, squared_distance_matrix
from .poly import Polynomial, as_coeff

__all__ = [
    "DistanceCurve",
    "ProjectedCurve",
    "CanonicalTriple",
    "QuadraticForm",
    "IntersectionReport",
    "is_incident",
    "project_curve",
    "count_incidences",
    "pairwise_intersection",
    "triple_intersection_count",
    "canonicalize_triple",
    "quad_coefficients",
    "degeneracy_witness",
    "exclusion_case",
    "intersections_csv",
]

A0 = "a=0"
A1 = "a=1"
W_PLUS_1 = "w=-1"
W_MINUS_1 = "w=+1"
NON_DEGENERATE = "non-degenerate"


@dataclass(frozen=True)
class DistanceCurve:
    """Anchor pair over the second arc, with its index pair when known."""

    p_i: tuple
    p_j: tuple
    arc: object
    index_pair: tuple = None


@dataclass(frozen=True)
class ProjectedCurve:
    """Planar image of a distance curve under (q, q') -> (q_x, q'_x)."""

    source: DistanceCurve
    fn: object  # vectorized F(x, y)
    dx: object  # dF/dx
    dy: object  # dF/dy


@dataclass(frozen=True)
class IntersectionReport:
    points: tuple
    overlap_suspected: bool
    cluster_sizes: tuple = ()


def _d2(p, q):
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def is_incident(curve, q, q_prime, tol=1e-9):
    """Whether (q, q') lies on the distance curve.

    Squared distances are compared with |d1 - d2| <= tol * max(1, d1, d2);
    all-rational inputs compare exactly.
    """
    d1 = _d2(curve.p_i, q)
    d2 = _d2(curve.p_j, q_prime)
    if isinstance(d1, Rational) and isinstance(d2, Rational):
        return d1 == d2
    d1 = float(d1)
    d2 = float(d2)
    return abs(d1 - d2) <= tol * max(1.0, d1, d2)


def project_curve(curve, validate=True, checks=50, seed=0):
    """Planar equation F(x, y) of the projected curve.

    F(x, y) = |p_i (x, g(x))|^2 - |p_j (y, g(y))|^2 where g parameterizes
    the arc.  With ``validate`` on, incident pairs are generated and lifted
    back through g to confirm the projection is one-to-one on the arc.
    """
    arc = curve.arc
    g2, dg2 = parameterize(arc)
    pix, piy = float(curve.p_i[0]), float(curve.p_i[1])
    pjx, pjy = float(curve.p_j[0]), float(curve.p_j[1])

    def fn(x, y):
        gx = g2(x)
        gy = g2(y)
        return (pix - x) ** 2 + (piy - gx) ** 2 - (pjx - y) ** 2 - (pjy - gy) ** 2

    def dx(x, y):
        gx = g2(x)
        return -2.0 * (pix - x) - 2.0 * (piy - gx) * dg2(x)

    def dy(x, y):
        gy = g2(y)
        return 2.0 * (pjx - y) + 2.0 * (pjy - gy) * dg2(y)

    projected = ProjectedCurve(source=curve, fn=fn, dx=dx, dy=dy)
    if validate:
        _check_projection(projected, checks, seed)
    return projected


def _check_projection(projected, checks, seed):
    """Planar zeros of F must lift through the parameterization to incident
    pairs in 4-space, reproducing the original point."""
    curve = projected.source
    arc = curve.arc
    g2, _ = parameterize(arc)
    rng = np.random.default_rng(seed)
    lo, hi = arc.x_lo, arc.x_hi
    span = hi - lo
    done = 0
    attempts = 0
    while done < checks and attempts < 40 * checks:
        attempts += 1
        x = lo + (0.02 + 0.96 * rng.random()) * span
        qx = float(x)
        qy = float(g2(qx))
        target = _d2(curve.p_i, (qx, qy))
        y = _solve_partner(curve, g2, target, lo, hi)
        if y is None:
            continue
        # the construction put (qx, y) on the planar curve
        if abs(projected.fn(qx, y)) > 1e-8 * max(1.0, target):
            raise InconsistencyError("projected equation misses an incident pair")
        # lifting through the graph must land on an incident 4-space pair
        lifted_q = (qx, float(g2(qx)))
        lifted_qp = (float(y), float(g2(y)))
        if not is_incident(curve, lifted_q, lifted_qp, tol=1e-8):
            raise InconsistencyError("lifted planar zero is not incident")
        if max(abs(lifted_q[0] - qx), abs(lifted_q[1] - qy)) > 1e-9:
            raise InconsistencyError("projection failed to invert on the arc")
        done += 1
    if done == 0:
        raise InconsistencyError("no incident pairs found for validation")


def _solve_partner(curve, g2, target, lo, hi, grid=64):
    """y in (lo, hi) with |p_j (y, g(y))|^2 = target, if a crossing exists."""
    pj = curve.p_j
    xs = np.linspace(lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo), grid)
    vals = np.array([_d2(pj, (float(x), float(g2(float(x))))) - target for x in xs])
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if idx.size == 0:
        return None
    a, b = xs[idx[0]], xs[idx[0] + 1]
    fa = vals[idx[0]]
    for _ in range(80):
        mid = 0.5 * (a + b)
        fm = _d2(pj, (float(mid), float(g2(float(mid))))) - target
        if fm == 0 or b - a < 1e-14 * max(1.0, abs(mid)):
            return float(mid)
        if (fa > 0) != (fm > 0):
            b = mid
        else:
            a, fa = mid, fm
    return float(0.5 * (a + b))


# ---------------------------------------------------------------------------
# incidence counting
# ---------------------------------------------------------------------------


def count_incidences(cfg, c, tol=1e-9):
    """Incidences between proximity point pairs and distance curves.

    Curves are kept as index pairs (i, j) with |i - j| <= floor(c*m) and
    only their distance predicate is ever evaluated; points are the pairs
    (q_i', q_j') with |i' - j'| <= floor(c*n).  The count equals the
    proximity energy by the defining identity, through a separate
    enumeration.
    """
    params = ProximityParams(c)
    m, n = cfg.m, cfg.n
    wm = params.window(m)
    wn = params.window(n)

    pc_a = []
    pc_b = []
    for ip in range(n):
        for jp in range(max(0, ip - wn), min(n, ip + wn + 1)):
            pc_a.append(ip)
            pc_b.append(jp)
    pc_a = np.asarray(pc_a)
    pc_b = np.asarray(pc_b)

    if cfg.exact:
        hist = distance_histogram(cfg, tol)
        ids = hist.pair_class.reshape(m, n)
        total = 0
        for i in range(m):
            for j in range(max(0, i - wm), min(m, i + wm + 1)):
                total += int(np.count_nonzero(ids[i, pc_a] == ids[j, pc_b]))
        return total

    d2 = squared_distance_matrix(cfg)
    total = 0
    for i in range(m):
        for j in range(max(0, i - wm), min(m, i + wm + 1)):
            da = d2[i, pc_a]
            db = d2[j, pc_b]
            close = np.abs(da - db) <= tol * np.maximum(
                1.0, np.maximum(da, db)
            )
            total += int(np.count_nonzero(close))
    return total


# ---------------------------------------------------------------------------
# intersections on the projected plane
# ---------------------------------------------------------------------------


def _lattice_roots(curves, grid, window):
    """Newton roots of the first two projected equations from lattice cells
    where both change sign."""
    lo, hi = window
    span = hi - lo
    pad = 1e-7 * span
    xs = np.linspace(lo + pad, hi - pad, grid + 1)
    f1, f2 = curves[0], curves[1]
    gx = np.asarray(f1.fn(xs[:, None], xs[None, :]), dtype=float)
    hx = np.asarray(f2.fn(xs[:, None], xs[None, :]), dtype=float)

    def cell_has_sign_change(v):
        smin = np.minimum(
            np.minimum(v[:-1, :-1], v[1:, :-1]),
            np.minimum(v[:-1, 1:], v[1:, 1:]),
        )
        smax = np.maximum(
            np.maximum(v[:-1, :-1], v[1:, :-1]),
            np.maximum(v[:-1, 1:], v[1:, 1:]),
        )
        return (smin <= 0) & (smax >= 0)

    cells = np.nonzero(cell_has_sign_change(gx) & cell_has_sign_change(hx))
    roots = []
    for ci, cj in zip(*cells):
        x0 = 0.5 * (xs[ci] + xs[ci + 1])
        y0 = 0.5 * (xs[cj] + xs[cj + 1])
        root = _newton_2d(f1, f2, x0, y0, (xs[0], xs[-1]))
        if root is not None:
            roots.append(root)
    return roots, int(cells[0].size)


def _newton_2d(f1, f2, x, y, bounds, max_iter=60):
    lo, hi = bounds
    scale = max(1.0, abs(lo), abs(hi))
    for _ in range(max_iter):
        try:
            v1 = float(f1.fn(x, y))
            v2 = float(f2.fn(x, y))
            j11 = float(f1.dx(x, y))
            j12 = float(f1.dy(x, y))
            j21 = float(f2.dx(x, y))
            j22 = float(f2.dy(x, y))
        except Exception:
            return None
        fscale = max(1.0, abs(x) ** 2, abs(y) ** 2)
        if abs(v1) <= 1e-11 * fscale and abs(v2) <= 1e-11 * fscale:
            if lo <= x <= hi and lo <= y <= hi:
                return (float(x), float(y))
            return None
        det = j11 * j22 - j12 * j21
        if abs(det) < 1e-14:
            return None
        dx = (v1 * j22 - v2 * j12) / det
        dy = (j11 * v2 - j21 * v1) / det
        x -= dx
        y -= dy
        if not (lo - 0.25 * scale <= x <= hi + 0.25 * scale):
            return None
        if not (lo - 0.25 * scale <= y <= hi + 0.25 * scale):
            return None
    return None


def _cluster_points(points, radius):
    clusters = []
    for p in sorted(points):
        for k, (rep, members) in enumerate(clusters):
            if math.hypot(p[0] - rep[0], p[1] - rep[1]) <= radius:
                members.append(p)
                mean = (
                    sum(q[0] for q in members) / len(members),
                    sum(q[1] for q in members) / len(members),
                )
                clusters[k] = (mean, members)
                break
        else:
            clusters.append((p, [p]))
    return clusters


def pairwise_intersection(c1, c2, grid=48, tol=1e-9):
    """Isolated intersections of two distance curves over the same arc.

    Solves the two projected equations on a (grid+1)^2 lattice with Newton
    refinement and clusters the roots.  A cluster count above grid/2 along
    the sweep marks a suspected one-dimensional overlap.
    """
    if c1.arc is not c2.arc:
        raise PreconditionError("curves must live over the same arc")
    window = (c1.arc.x_lo, c1.arc.x_hi)
    p1 = project_curve(c1, validate=False)
    p2 = project_curve(c2, validate=False)
    roots, n_cells = _lattice_roots((p1, p2), grid, window)
    radius = max(tol, 1e-6) * (window[1] - window[0])
    clusters = _cluster_points(roots, radius)
    points = tuple(rep for rep, _ in clusters)
    sizes = tuple(len(members) for _, members in clusters)
    # a 1D overlap paints a band of candidate cells across the sweep, far
    # more than isolated crossings ever produce
    return IntersectionReport(
        points=points,
        overlap_suspected=len(points) > grid / 2 or n_cells > grid / 2,
        cluster_sizes=sizes,
    )


def _distance_hypotheses(c1, c2, c3, tol):
    pairs = [
        ("first", c1, c2),
        ("second", c1, c3),
        ("third", c2, c3),
    ]
    for name, ca, cb in pairs:
        da = math.sqrt(_d2(ca.p_i, cb.p_i))
        db = math.sqrt(_d2(ca.p_j, cb.p_j))
        if abs(da - db) <= tol * max(1.0, da, db):
            raise PreconditionError(
                f"{name} anchor pair has equal distances ({da} vs {db}); "
                "the triple-intersection hypotheses fail"
            )


def triple_intersection_count(c1, c2, c3, grid=48, tol=1e-9):
    """Count of isolated common points of three distance curves.

    Requires the three anchor-distance inequalities; roots of the first two
    projected equations are filtered by the third with a scale-aware
    residual threshold.
    """
    for other in (c2, c3):
        if other.arc is not c1.arc:
            raise PreconditionError("curves must live over the same arc")
    _distance_hypotheses(c1, c2, c3, tol)
    window = (c1.arc.x_lo, c1.arc.x_hi)
    p1 = project_curve(c1, validate=False)
    p2 = project_curve(c2, validate=False)
    p3 = project_curve(c3, validate=False)
    roots, _ = _lattice_roots((p1, p2), grid, window)
    common = []
    for x, y in roots:
        scale = max(1.0, abs(x) ** 2, abs(y) ** 2)
        if abs(float(p3.fn(x, y))) <= 1e-6 * scale:
            common.append((x, y))
    radius = max(tol, 1e-6) * (window[1] - window[0])
    return len(_cluster_points(common, radius))


def intersections_csv(reports):
    """CSV rows i,j,k,l,x,y,cluster_size from (curve, curve, report) triples."""
    lines = ["i,j,k,l,x,y,cluster_size"]
    for c1, c2, report in reports:
        pi = c1.index_pair or ("", "")
        pk = c2.index_pair or ("", "")
        for point, size in zip(report.points, report.cluster_sizes):
            lines.append(
                f"{pi[0]},{pi[1]},{pk[0]},{pk[1]},"
                f"{point[0]!r},{point[1]!r},{size}"
            )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# canonical frames and the quadratic form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimilarityMap:
    """v -> scale * R (v - origin); the frame-normalizing similarity."""

    origin: tuple
    cos: float
    sin: float
    scale: float

    def apply(self, v):
        dx = v[0] - self.origin[0]
        dy = v[1] - self.origin[1]
        return (
            self.scale * (self.cos * dx + self.sin * dy),
            self.scale * (-self.sin * dx + self.cos * dy),
        )


@dataclass(frozen=True)
class CanonicalTriple:
    """Two anchor triples in normalized frames.

    First frame: p_i at the origin, p_k at (1, 0), p_s at (a, b).  Second
    frame, scaled by the same unit: p_j at the origin, p_l at (w, 0), p_t at
    (c, d), with w nonzero.
    """

    a: object
    b: object
    w: object
    c: object
    d: object
    frames: tuple = None

    def __post_init__(self):
        if self.w == 0:
            raise DegenerateTripleError("second frame unit w must be nonzero")


def canonicalize_triple(p_i, p_k, p_s, p_j, p_l, p_t):
    """Normalize two anchor triples by translate/rotate/scale.

    Uses the first pair's length as the common unit, so the second frame's
    p_l lands at (w, 0) with w = |p_j p_l| / |p_i p_k|.
    """
    d_ik = math.sqrt(_d2(p_i, p_k))
    d_jl = math.sqrt(_d2(p_j, p_l))
    if d_ik == 0 or d_jl == 0:
        raise DegenerateTripleError("anchor pairs must have distinct points")
    ux = (p_k[0] - p_i[0]) / d_ik
    uy = (p_k[1] - p_i[1]) / d_ik
    frame1 = SimilarityMap(origin=tuple(p_i), cos=ux, sin=uy, scale=1.0 / d_ik)
    vx = (p_l[0] - p_j[0]) / d_jl
    vy = (p_l[1] - p_j[1]) / d_jl
    frame2 = SimilarityMap(origin=tuple(p_j), cos=vx, sin=vy, scale=1.0 / d_ik)
    a, b = frame1.apply(p_s)
    c, d = frame2.apply(p_t)
    w = d_jl / d_ik
    return CanonicalTriple(a=a, b=b, w=w, c=c, d=d, frames=(frame1, frame2))


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of the constraint on the second point's frame
    coordinates: axx X^2 + ayy Y^2 + axy XY + hx X + hy Y + h0 = 0."""

    axx: object
    ayy: object
    axy: object
    hx: object
    hy: object
    h0: object

    def linear_part(self):
        return (self.hx, self.hy, self.h0)

    def magnitude(self):
        return max(
            abs(float(v))
            for v in (self.axx, self.ayy, self.axy, self.hx, self.hy, self.h0)
        )

    def vanishes(self, tol):
        return all(
            abs(float(v)) <= tol
            for v in (self.axx, self.ayy, self.axy, self.hx, self.hy, self.h0)
        )


def quad_coefficients(t):
    """Quadratic form obtained by eliminating the first point.

    Substitutes the two linear consequences of the distance equations into
    the first one (after scaling by b^2) and expands with polynomial
    arithmetic in the second point's coordinates; the three quadratic
    coefficients are cross-checked against their closed forms.
    """
    a, b, c, d, w = (as_coeff(v) for v in (t.a, t.b, t.c, t.d, t.w))
    one = Fraction(1) if all(
        isinstance(v, Fraction) for v in (a, b, c, d, w)
    ) else 1.0
    half = one / 2

    X = Polynomial.variable(2, 0)
    Y = Polynomial.variable(2, 1)
    # first-point x-coordinate in terms of the second point
    q1x = X * w + Polynomial.constant(2, half * (1 - w * w))
    # b * (first-point y-coordinate)
    kconst = half * (a * a + b * b - c * c - d * d + a * w * w - a)
    bq1y = X * (c - a * w) + Y * d + Polynomial.constant(2, kconst)
    # b^2 * (|q1|^2 - |q2|^2) = 0
    form = (
        q1x * q1x * (b * b)
        + bq1y * bq1y
        - X * X * (b * b)
        - Y * Y * (b * b)
    )

    axx = form.coefficient((2, 0))
    ayy = form.coefficient((0, 2))
    axy = form.coefficient((1, 1))
    hx = form.coefficient((1, 0))
    hy = form.coefficient((0, 1))
    h0 = form.coefficient((0, 0))

    want_axx = b * b * w * w + (c - a * w) ** 2 - b * b
    want_ayy = d * d - b * b
    want_axy = 2 * d * (c - a * w)
    for got, want in ((axx, want_axx), (ayy, want_ayy), (axy, want_axy)):
        if isinstance(got, Fraction) and isinstance(want, Fraction):
            if got != want:
                raise InconsistencyError(
                    "substitution disagrees with the closed-form coefficients"
                )
        elif abs(float(got) - float(want)) > 1e-9 * max(1.0, abs(float(want))):
            raise InconsistencyError(
                "substitution disagrees with the closed-form coefficients"
            )
    return QuadraticForm(axx=axx, ayy=ayy, axy=axy, hx=hx, hy=hy, h0=h0)


def degeneracy_witness(t, tol=1e-9):
    """Which factor of a(a-1)(w+1)(w-1) vanishes for a degenerate triple.

    Callers must have checked that the quadratic form vanishes; a
    non-vanishing form returns the NON_DEGENERATE flag.  A vanishing form
    without a vanishing factor would contradict the elimination identity
    and raises.
    """
    form = quad_coefficients(t)
    if not form.vanishes(tol):
        return NON_DEGENERATE
    a = float(t.a)
    w = float(t.w)
    for value, witness in (
        (a, A0),
        (a - 1.0, A1),
        (w + 1.0, W_PLUS_1),
        (w - 1.0, W_MINUS_1),
    ):
        if abs(value) <= tol:
            return witness
    raise InconsistencyError(
        "form vanishes but a(a-1)(w+1)(w-1) has no vanishing factor"
    )


def exclusion_case(witness):
    """Map a vanishing factor to the anchor-distance hypothesis it breaks.

    a = 0 forces |p_i p_s| = |p_j p_t|; a = 1 forces |p_k p_s| = |p_l p_t|;
    w = +-1 forces |p_i p_k| = |p_j p_l|.
    """
    if witness == A0:
        return "second-pair-equal"
    if witness == A1:
        return "third-pair-equal"
    if witness in (W_PLUS_1, W_MINUS_1):
        return "first-pair-equal"
    raise ParameterError(f"no exclusion case for witness {witness!r}")
