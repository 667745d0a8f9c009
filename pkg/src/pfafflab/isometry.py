"""Planar isometries: algebra, classification, and curve-symmetry detection.

An isometry is v -> A v + w with A orthogonal.  Classification follows the
five standard classes; rotations get their fixed point, reflections and
glide reflections their axis.  The detector at the bottom searches for
symmetries of an arc's underlying curve among finitely many candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTripleError,
    InconclusiveError,
    ParameterError,
    PreconditionError,
    ToleranceError,
)
from .pfaffian import pfaff_eval, pfaff_gradient

__all__ = [
    "Isometry",
    "IsometryClass",
    "identity",
    "rotation",
    "translation",
    "reflection",
    "apply",
    "compose",
    "inverse",
    "classify",
    "rotation_commutator",
    "rigid_motions_mapping",
    "is_symmetry",
    "detect_symmetries",
    "respected_pairs",
    "isometry_text",
    "parse_isometry_text",
]

ORTHO_TOL = 1e-12
REORTHO_TOL = 1e-9

IDENTITY = "identity"
TRANSLATION = "translation"
ROTATION = "rotation"
REFLECTION = "reflection"
GLIDE = "glide-reflection"


@dataclass(frozen=True)
class Isometry:
    """Orthogonal part ``a`` (2x2) plus translation ``w``."""

    a: tuple  # ((a11, a12), (a21, a22))
    w: tuple

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (2, 2) or len(self.w) != 2:
            raise ValueError("need a 2x2 matrix and a 2-vector")
        drift = np.max(np.abs(a.T @ a - np.eye(2)))
        if drift > ORTHO_TOL:
            if drift > REORTHO_TOL:
                raise ValueError(f"matrix is not orthogonal (drift {drift:.3e})")
            # polar projection absorbs drift from long compositions
            u, _, vt = np.linalg.svd(a)
            a = u @ vt
        det = float(np.linalg.det(a))
        if abs(abs(det) - 1.0) > 1e-9:
            raise ValueError("determinant must be +-1")
        object.__setattr__(self, "a", tuple(map(tuple, a.tolist())))
        object.__setattr__(self, "w", (float(self.w[0]), float(self.w[1])))

    @property
    def matrix(self):
        return np.asarray(self.a, dtype=float)

    @property
    def vector(self):
        return np.asarray(self.w, dtype=float)

    @property
    def det(self):
        a = self.a
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]


@dataclass(frozen=True)
class IsometryClass:
    """Classification record; only the fields of the class are set."""

    kind: str
    vector: tuple = None  # translation
    center: tuple = None  # rotation
    angle: float = None
    axis_point: tuple = None  # reflection / glide
    axis_dir: tuple = None
    shift: tuple = None  # glide translation component


def identity():
    return Isometry(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))


def translation(w):
    return Isometry(((1.0, 0.0), (0.0, 1.0)), tuple(w))


def rotation(angle, center=(0.0, 0.0)):
    c, s = math.cos(angle), math.sin(angle)
    a = np.array([[c, -s], [s, c]])
    p = np.asarray(center, dtype=float)
    w = p - a @ p
    return Isometry(tuple(map(tuple, a)), tuple(w))


def reflection(axis_point, axis_dir):
    """Reflection across the line through ``axis_point`` along ``axis_dir``."""
    u = np.asarray(axis_dir, dtype=float)
    n = np.linalg.norm(u)
    if n == 0:
        raise ParameterError("axis direction must be nonzero")
    u = u / n
    a = 2.0 * np.outer(u, u) - np.eye(2)
    p = np.asarray(axis_point, dtype=float)
    w = p - a @ p
    return Isometry(tuple(map(tuple, a)), tuple(w))


def apply(h, v):
    a = h.matrix
    return (
        a[0, 0] * v[0] + a[0, 1] * v[1] + h.w[0],
        a[1, 0] * v[0] + a[1, 1] * v[1] + h.w[1],
    )


def compose(h2, h1):
    """h2 after h1: (A2 A1, A2 w1 + w2)."""
    a = h2.matrix @ h1.matrix
    w = h2.matrix @ h1.vector + h2.vector
    return Isometry(tuple(map(tuple, a)), tuple(w))


def inverse(h):
    a = h.matrix.T  # orthogonal
    return Isometry(tuple(map(tuple, a)), tuple(-(a @ h.vector)))


def classify(h, tol=1e-9):
    """Branch on the five classes.

    Rotation centers solve (I - A) p = w; a near-singular system with A not
    close to the identity means the angle is too small to locate the center
    at this tolerance.
    """
    a = h.matrix
    w = h.vector
    near_identity = np.max(np.abs(a - np.eye(2))) <= tol
    if h.det > 0:
        if near_identity:
            if np.max(np.abs(w)) <= tol:
                return IsometryClass(kind=IDENTITY)
            return IsometryClass(kind=TRANSLATION, vector=(w[0], w[1]))
        angle = math.atan2(a[1, 0], a[0, 0])
        m = np.eye(2) - a
        det_m = float(np.linalg.det(m))
        if abs(det_m) < 0.5 * tol * tol:
            raise ToleranceError(
                "rotation angle too small to separate from a translation"
            )
        center = np.linalg.solve(m, w)
        return IsometryClass(
            kind=ROTATION, center=(float(center[0]), float(center[1])),
            angle=angle,
        )
    # det = -1: reflection or glide reflection
    axis_angle = 0.5 * math.atan2(a[0, 1], a[0, 0])
    u = (math.cos(axis_angle), math.sin(axis_angle))
    mirror_residual = np.max(np.abs(a @ w + w))
    if mirror_residual <= tol * max(1.0, float(np.max(np.abs(w)))):
        return IsometryClass(
            kind=REFLECTION,
            axis_point=(w[0] / 2.0, w[1] / 2.0),
            axis_dir=u,
        )
    shift = 0.5 * (np.eye(2) + a) @ w
    offset = 0.25 * (np.eye(2) - a) @ w
    return IsometryClass(
        kind=GLIDE,
        axis_point=(float(offset[0]), float(offset[1])),
        axis_dir=u,
        shift=(float(shift[0]), float(shift[1])),
    )


def rotation_commutator(h1, h2, tol=1e-9):
    """Closed-form translation vector of h2^-1 h1^-1 h2 h1 for two rotations.

    Equals (I - A2^-1)(I - A1^-1)(p2 - p1) where p1, p2 are the centers.
    """
    c1 = classify(h1, tol)
    c2 = classify(h2, tol)
    if c1.kind != ROTATION or c2.kind != ROTATION:
        raise PreconditionError("both inputs must classify as rotations")
    m1 = np.eye(2) - h1.matrix.T
    m2 = np.eye(2) - h2.matrix.T
    dp = np.asarray(c2.center) - np.asarray(c1.center)
    v = m2 @ (m1 @ dp)
    return (float(v[0]), float(v[1]))


def rigid_motions_mapping(p_i, p_k, p_j, p_l, tol=1e-9):
    """The two isometries taking (p_i, p_k) to (p_j, p_l).

    Requires |p_i p_k| = |p_j p_l| (within ``tol``) and nonzero.  Returns
    (direct, reflected): the orientation-preserving motion and its
    composition with the reflection across the line p_i p_k.
    """
    u = (p_k[0] - p_i[0], p_k[1] - p_i[1])
    v = (p_l[0] - p_j[0], p_l[1] - p_j[1])
    du = math.hypot(*u)
    dv = math.hypot(*v)
    if du == 0 or dv == 0:
        raise DegenerateTripleError("anchor points coincide")
    if abs(du - dv) > tol:
        raise PreconditionError(
            f"segment lengths differ: {du} vs {dv} (tol {tol})"
        )
    angle = math.atan2(v[1], v[0]) - math.atan2(u[1], u[0])
    c, s = math.cos(angle), math.sin(angle)
    a = np.array([[c, -s], [s, c]])
    w = np.asarray(p_j, dtype=float) - a @ np.asarray(p_i, dtype=float)
    direct = Isometry(tuple(map(tuple, a)), tuple(w))
    mirrored = compose(direct, reflection(p_i, u))
    for h in (direct, mirrored):
        img_i = apply(h, p_i)
        img_k = apply(h, p_k)
        if (
            math.hypot(img_i[0] - p_j[0], img_i[1] - p_j[1]) > 1e-10 * max(1.0, du)
            or math.hypot(img_k[0] - p_l[0], img_k[1] - p_l[1])
            > 1e-10 * max(1.0, du) + 2 * abs(du - dv)
        ):
            raise PreconditionError("anchor alignment failed verification")
    return direct, mirrored


def is_symmetry(arc, h, samples=40, tol=1e-7):
    """Numeric test of whether h maps the arc's underlying curve into itself.

    Samples the arc, pushes the points through h, and checks the residual of
    the defining function against the local gradient scale.  Raises when
    fewer than half the images land inside the evaluation domain.
    """
    if samples < 10:
        raise ParameterError("need at least 10 samples")
    from .curves import parameterize

    g2, _ = parameterize(arc)
    xs = arc.grid(samples)
    usable = 0
    for x in xs:
        p = (float(x), float(g2(float(x))))
        q = apply(h, p)
        if not arc.f.chain.domain.contains(q):
            continue
        usable += 1
        val = pfaff_eval(arc.f, q)
        grad = pfaff_gradient(arc.f, q)
        scale = max(1.0, math.hypot(*grad))
        if abs(val) > tol * scale:
            return False
    if usable < samples / 2:
        raise InconclusiveError(
            f"only {usable}/{samples} images were inside the domain"
        )
    return True


def _arclength_resample(arc, count):
    """Points on the arc at (approximately) equal arc-length parameters."""
    from .curves import parameterize

    g2, _ = parameterize(arc)
    dense = arc.grid(32 * count)
    ys = np.array([float(g2(float(x))) for x in dense])
    seg = np.hypot(np.diff(dense), np.diff(ys))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, cum[-1], count)
    xs = np.interp(targets, cum, dense)
    return [(float(x), float(g2(float(x)))) for x in xs]


def _polish_candidate(arc, h, pts, rounds=3):
    """Procrustes refinement: project images onto the curve, refit the motion."""
    from .curves import _newton_y

    want_det = 1.0 if h.det > 0 else -1.0
    cur = h
    for _ in range(rounds):
        proj = []
        kept = []
        for p in pts:
            q = apply(cur, p)
            if not arc.f.chain.domain.contains(q):
                continue
            try:
                y = _newton_y(arc.f, q[0], q[1], 1e-12 * max(1.0, abs(q[1])))
            except Exception:
                continue
            kept.append(p)
            proj.append((q[0], y))
        if len(kept) < 3:
            return cur
        a = np.asarray(kept, dtype=float)
        b = np.asarray(proj, dtype=float)
        ca, cb = a.mean(axis=0), b.mean(axis=0)
        m = (b - cb).T @ (a - ca)
        u, _, vt = np.linalg.svd(m)
        d = np.sign(np.linalg.det(u @ vt))
        fix = np.diag([1.0, want_det * d])
        rot = u @ fix @ vt
        if abs(np.linalg.det(rot) - want_det) > 0.5:
            return cur
        w = cb - rot @ ca
        cur = Isometry(tuple(map(tuple, rot)), tuple(w))
    return cur


def detect_symmetries(arc, samples=12, tol=1e-7):
    """Candidate-based symmetry search for the arc's underlying curve.

    Lines and circles have continuous symmetry groups and are reported as
    ("infinite", kind) instead of an enumeration.  Otherwise candidates come
    from rigid motions pairing equal-arc-length sample pairs (both
    traversal orders), plus axis-aligned reflections through the sample
    centroid and the identity; each candidate is Procrustes-polished before
    the residual test.
    """
    from .curves import classify_curve

    tagged = classify_curve(arc, samples=max(samples, 8))
    if tagged.kind in ("line", "circle"):
        return ("infinite", tagged.kind)

    pts = _arclength_resample(arc, samples)
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)

    raw = [identity(),
           reflection((cx, cy), (1.0, 0.0)),
           reflection((cx, cy), (0.0, 1.0))]
    n = len(pts)
    step = max(1, n // 6)
    chord = max(
        math.hypot(pts[-1][0] - pts[0][0], pts[-1][1] - pts[0][1]), 1e-9
    )
    for i in range(0, n - 1, step):
        for j in range(0, n - 1, step):
            for dst in ((pts[j], pts[j + 1]), (pts[j + 1], pts[j])):
                try:
                    direct, mirrored = rigid_motions_mapping(
                        pts[i], pts[i + 1], dst[0], dst[1], tol=1e-3 * chord
                    )
                except (PreconditionError, DegenerateTripleError):
                    continue
                raw.extend((direct, mirrored))

    found = []
    for h in raw:
        polished = _polish_candidate(arc, h, pts)
        if any(_close(polished, g) for g in found):
            continue
        try:
            if is_symmetry(arc, polished, samples=max(10, samples), tol=tol):
                found.append(polished)
        except InconclusiveError:
            continue
    return found


def _close(h, g, tol=1e-7):
    return (
        np.max(np.abs(h.matrix - g.matrix)) <= tol
        and np.max(np.abs(h.vector - g.vector)) <= tol
    )


def respected_pairs(points, symmetries, tol=1e-8):
    """Index pairs (i, j) with T(p_i) = p_j for some detected symmetry.

    This is the curve-respecting relation that marks which distance curves
    an arc symmetry preserves.
    """
    out = set()
    if isinstance(symmetries, tuple) and symmetries and symmetries[0] == "infinite":
        return out
    for t in symmetries:
        for i, p in enumerate(points):
            q = apply(t, p)
            for j, r in enumerate(points):
                if math.hypot(q[0] - r[0], q[1] - r[1]) <= tol * max(
                    1.0, math.hypot(*r)
                ):
                    out.add((i, j))
    return out


def isometry_text(h):
    """Row-major matrix entries then the vector: a11 a12 a21 a22 w1 w2."""
    a = h.a
    return (
        f"{a[0][0]!r} {a[0][1]!r} {a[1][0]!r} {a[1][1]!r} "
        f"{h.w[0]!r} {h.w[1]!r}"
    )


def parse_isometry_text(text):
    vals = [float(v) for v in text.split()]
    if len(vals) != 6:
        raise ValueError("expected six numbers")
    return Isometry(((vals[0], vals[1]), (vals[2], vals[3])), (vals[4], vals[5]))


def classification_report(h, tol=1e-9):
    """One line per the external reporting format: class then parameters."""
    c = classify(h, tol)
    if c.kind == IDENTITY:
        return "identity"
    if c.kind == TRANSLATION:
        return f"translation vector=({c.vector[0]!r},{c.vector[1]!r})"
    if c.kind == ROTATION:
        return (
            f"rotation center=({c.center[0]!r},{c.center[1]!r}) "
            f"angle={c.angle!r}"
        )
    if c.kind == REFLECTION:
        return (
            f"reflection axis_point=({c.axis_point[0]!r},{c.axis_point[1]!r}) "
            f"axis_dir=({c.axis_dir[0]!r},{c.axis_dir[1]!r})"
        )
    return (
        f"glide-reflection axis_point=({c.axis_point[0]!r},{c.axis_point[1]!r}) "
        f"axis_dir=({c.axis_dir[0]!r},{c.axis_dir[1]!r}) "
        f"shift=({c.shift[0]!r},{c.shift[1]!r})"
    )
