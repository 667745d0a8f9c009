"""Named point-configuration families, including the 3D log-circles pair.

The planar families cover the exceptional cases (parallel lines, orthogonal
lines, concentric circles), a generic line pair, and points lifted onto two
arcs.  The log-circles constructor places points on the two space curves

    (x - B)^2 + y^2 = D + A ln(x),        z = 0,
    x^2 + z^2 = D + A ln(x - B),          y = 0,

whose pair distances depend only on u = x (x' - B):

    dist^2 = -2u + A ln(u) + 2D - B^2,

so geometric x-progressions sharing one ratio span few distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import parameterize
from .errors import ConfigurationError, DomainError, ParameterError, WindowError
from .metrics import PointConfiguration, cluster_sorted

__all__ = [
    "Uniform",
    "Arithmetic",
    "Geometric",
    "ParallelLines",
    "OrthogonalLines",
    "GenericLines",
    "ConcentricCircles",
    "OnCurve",
    "LogCircles",
    "ConfigSpec",
    "Point3",
    "generate",
    "gen_log_circles",
    "distinct_distances_3d",
    "log_circle_invariant",
    "random_points_3d",
    "points_csv",
    "parse_config_text",
    "config_text",
]


# -- schemes ----------------------------------------------------------------


@dataclass(frozen=True)
class Uniform:
    """Equally spaced positions across the window interior."""


@dataclass(frozen=True)
class Arithmetic:
    """Unit-step progression from the window start (scaled when needed)."""

    step: float = 1.0


@dataclass(frozen=True)
class Geometric:
    """Geometric progression; ratio None means "choose a shared ratio"."""

    ratio: float = None

    def __post_init__(self):
        if self.ratio is not None and self.ratio <= 1:
            raise ParameterError("geometric ratio must exceed 1")


def _positions(scheme, lo, hi, count):
    """Scheme positions inside the open window (lo, hi)."""
    if count == 1:
        return np.array([0.5 * (lo + hi)])
    span = hi - lo
    pad = 1e-3 * span
    a, b = lo + pad, hi - pad
    if isinstance(scheme, Uniform) or isinstance(scheme, Arithmetic):
        return np.linspace(a, b, count)
    if isinstance(scheme, Geometric):
        ratio = scheme.ratio or 1.05
        weights = (ratio ** np.arange(count) - 1.0) / (ratio ** (count - 1) - 1.0)
        return a + (b - a) * weights
    raise ParameterError(f"unsupported scheme {scheme!r}")


# -- families ---------------------------------------------------------------


@dataclass(frozen=True)
class ParallelLines:
    separation: int = 1


@dataclass(frozen=True)
class OrthogonalLines:
    """Axis pair; the arithmetic scheme makes the squared coordinates an
    integer progression (x_i = sqrt(i)), the classical few-distance layout."""


@dataclass(frozen=True)
class GenericLines:
    angle: float = 0.6


@dataclass(frozen=True)
class ConcentricCircles:
    r1: float = 1.0
    r2: float = 2.0


@dataclass(frozen=True)
class OnCurve:
    arc1: object
    arc2: object


@dataclass(frozen=True)
class LogCircles:
    a: float = 2.0
    b: float = 1.0
    d: float = 5.0


@dataclass(frozen=True)
class ConfigSpec:
    family: object
    m: int
    n: int
    scheme: object = Arithmetic()
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ParameterError("point counts must be >= 1")


def generate(spec):
    """Deterministic point configuration for a planar family."""
    fam = spec.family
    m, n = spec.m, spec.n
    if isinstance(fam, LogCircles):
        raise ParameterError(
            "log-circles live in 3-space; use gen_log_circles"
        )
    if isinstance(fam, ParallelLines):
        if isinstance(spec.scheme, Arithmetic):
            step = int(spec.scheme.step) if float(spec.scheme.step).is_integer() else spec.scheme.step
            p1 = tuple((i * step, 0) for i in range(m))
            p2 = tuple((j * step, fam.separation) for j in range(n))
        else:
            xs1 = _positions(spec.scheme, 0.0, float(max(m, n)), m)
            xs2 = _positions(spec.scheme, 0.0, float(max(m, n)), n)
            p1 = tuple((float(x), 0.0) for x in xs1)
            p2 = tuple((float(x), float(fam.separation)) for x in xs2)
        return PointConfiguration(p1=p1, p2=p2, provenance="parallel-lines")

    if isinstance(fam, OrthogonalLines):
        if isinstance(spec.scheme, Arithmetic):
            xs = [math.sqrt(i * spec.scheme.step) for i in range(1, m + 1)]
            ys = [math.sqrt(j * spec.scheme.step) for j in range(1, n + 1)]
        else:
            xs = list(_positions(spec.scheme, 0.5, 0.5 + m, m))
            ys = list(_positions(spec.scheme, 0.5, 0.5 + n, n))
        # tilt the axis pair so neither line is vertical; distances are
        # rotation-invariant, the x-sorting invariant needs distinct x's
        ct, st = math.cos(0.3), math.sin(0.3)
        p1 = tuple((float(x * ct), float(x * st)) for x in xs)
        p2 = tuple(sorted((float(-y * st), float(y * ct)) for y in ys))
        return PointConfiguration(p1=p1, p2=p2, provenance="orthogonal-lines")

    if isinstance(fam, GenericLines):
        ca, sa = math.cos(fam.angle), math.sin(fam.angle)
        if abs(sa) < 1e-9 or abs(ca) < 1e-9:
            raise ParameterError("generic angle must avoid 0 and pi/2")
        ts1 = _positions(spec.scheme, 0.0, float(m), m)
        ts2 = _positions(spec.scheme, 0.0, float(n), n)
        p1 = tuple((float(t), 0.0) for t in ts1)
        p2 = tuple((float(t * ca), float(1.0 + t * sa)) for t in ts2)
        return PointConfiguration(p1=p1, p2=p2, provenance="generic-lines")

    if isinstance(fam, ConcentricCircles):
        grid = max(m, n)
        theta0 = 0.1  # generic offset keeps the x-coordinates tie-free
        p1 = sorted(
            (fam.r1 * math.cos(theta0 + 2 * math.pi * i / grid),
             fam.r1 * math.sin(theta0 + 2 * math.pi * i / grid))
            for i in range(m)
        )
        p2 = sorted(
            (fam.r2 * math.cos(theta0 + 2 * math.pi * j / grid),
             fam.r2 * math.sin(theta0 + 2 * math.pi * j / grid))
            for j in range(n)
        )
        return PointConfiguration(
            p1=tuple(p1), p2=tuple(p2), provenance="concentric-circles"
        )

    if isinstance(fam, OnCurve):
        g1, _ = parameterize(fam.arc1)
        g2, _ = parameterize(fam.arc2)
        xs1 = _positions(spec.scheme, fam.arc1.x_lo, fam.arc1.x_hi, m)
        if fam.arc2 is fam.arc1:
            # squeeze the second grid into an irrationally-offset subwindow
            # so the two grids can never collide
            lo, hi = fam.arc2.x_lo, fam.arc2.x_hi
            span = hi - lo
            shrink = math.sqrt(2) / 100.0
            for _ in range(8):
                xs2 = _positions(
                    spec.scheme, lo + shrink * span, hi - 1.21 * shrink * span, n
                )
                if not set(float(x) for x in xs1) & set(float(x) for x in xs2):
                    break
                shrink *= 1.37
        else:
            xs2 = _positions(spec.scheme, fam.arc2.x_lo, fam.arc2.x_hi, n)
        p1 = tuple((float(x), float(g1(float(x)))) for x in xs1)
        p2 = tuple((float(x), float(g2(float(x)))) for x in xs2)
        return PointConfiguration(p1=p1, p2=p2, provenance="on-curve")

    raise ParameterError(f"unknown family {fam!r}")


# -- log-circles ------------------------------------------------------------


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def as_tuple(self):
        return (self.x, self.y, self.z)


def _radicand_first(x, a, b, d):
    return d + a * math.log(x) - (x - b) ** 2


def _radicand_second(x, a, b, d):
    return d + a * math.log(x - b) - x * x


def _feasible_window(fn, lo, hi, scan=1000):
    """Largest contiguous positive stretch found by a sign scan."""
    xs = np.linspace(lo, hi, scan)
    ok = np.array([fn(float(x)) > 0 for x in xs])
    best = None
    start = None
    for k, good in enumerate(ok):
        if good and start is None:
            start = k
        if (not good or k == len(ok) - 1) and start is not None:
            stop = k if not good else k + 1
            if best is None or stop - start > best[1] - best[0]:
                best = (start, stop)
            start = None
    if best is None:
        return None
    return (float(xs[best[0]]), float(xs[best[1] - 1]))


def gen_log_circles(a=2.0, b=1.0, d=5.0, m=8, n=8, scheme=Uniform(),
                    window1=(1.0, 2.0), window2=(2.0, 2.3)):
    """Points on the two log-circles; returns (first list, second list).

    The first curve contributes (x, +sqrt(D + A ln x - (x-B)^2), 0) and the
    second (x', 0, +sqrt(D + A ln(x'-B) - x'^2)).  Windows are validated by
    a 10^3-point sign scan of the radicands.
    """
    f1 = lambda x: _radicand_first(x, a, b, d)
    f2 = lambda x: _radicand_second(x, a, b, d)
    for fn, window, excl in ((f1, window1, 0.0), (f2, window2, b)):
        if window[0] <= excl:
            raise WindowError(f"window {window} leaves the log's domain")
        bad = [
            float(x)
            for x in np.linspace(window[0], window[1], 1000)
            if fn(float(x)) <= 0
        ]
        if bad:
            feasible = _feasible_window(fn, excl + 1e-6, window[1] + 2.0)
            raise WindowError(
                f"radicand not positive across {window}",
                feasible=feasible,
            )

    if isinstance(scheme, Geometric) and scheme.ratio is None:
        # shared ratio across both progressions: u = x (x'-B) then runs over
        # ratio^(i+j), giving at most m+n-1 distinct values
        r1 = (window1[1] / window1[0]) ** (1.0 / max(m - 1, 1))
        v_lo, v_hi = window2[0] - b, window2[1] - b
        r2 = (v_hi / v_lo) ** (1.0 / max(n - 1, 1))
        ratio = min(r1, r2)
        xs1 = window1[0] * ratio ** np.arange(m)
        xs2 = b + v_lo * ratio ** np.arange(n)
    else:
        xs1 = _positions(scheme, window1[0], window1[1], m)
        xs2 = _positions(scheme, window2[0], window2[1], n)

    first = [Point3(float(x), math.sqrt(f1(float(x))), 0.0) for x in xs1]
    second = [Point3(float(x), 0.0, math.sqrt(f2(float(x)))) for x in xs2]
    for p in first:
        assert abs((p.x - b) ** 2 + p.y**2 - (d + a * math.log(p.x))) < 1e-10
    for q in second:
        assert abs(q.x**2 + q.z**2 - (d + a * math.log(q.x - b))) < 1e-10
    return first, second


def distinct_distances_3d(first, second, tol=1e-9):
    """Distinct pairwise distances between the 3D point lists."""
    if not first or not second:
        raise ParameterError("point lists must be nonempty")
    a = np.asarray([p.as_tuple() for p in first])
    c = np.asarray([q.as_tuple() for q in second])
    diff = a[:, None, :] - c[None, :, :]
    d2 = np.sum(diff * diff, axis=2).ravel()
    _, classes = cluster_sorted(d2, tol)
    return len(classes)


def log_circle_invariant(first, second, a=2.0, b=1.0, d=5.0):
    """Max deviation from dist^2 = -2u + A ln u + 2D - B^2, u = x(x'-B)."""
    worst = 0.0
    for p in first:
        for q in second:
            u = p.x * (q.x - b)
            if u <= 0:
                raise DomainError(f"u = {u} <= 0 for pair ({p}, {q})")
            d2 = (
                (p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2
            )
            closed = -2.0 * u + a * math.log(u) + 2.0 * d - b * b
            worst = max(worst, abs(d2 - closed))
    return worst


def random_points_3d(count, seed, box=(0.0, 10.0)):
    """Seeded generic 3D points for distinctness comparisons."""
    rng = np.random.default_rng(seed)
    lo, hi = box
    return [
        Point3(*(float(v) for v in rng.uniform(lo, hi, size=3)))
        for _ in range(count)
    ]


# -- plain-text config files and point dumps --------------------------------


def points_csv(points):
    """CSV dump x,y[,z]."""
    rows = [tuple(p.as_tuple()) if isinstance(p, Point3) else tuple(p)
            for p in points]
    width = len(rows[0]) if rows else 2
    header = "x,y,z" if width == 3 else "x,y"
    lines = [header]
    for row in rows:
        lines.append(",".join(_snum(v) for v in row))
    return "\n".join(lines) + "\n"


def _snum(v):
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


_FAMILY_NAMES = {
    "parallel": ParallelLines,
    "orthogonal": OrthogonalLines,
    "generic": GenericLines,
    "circles": ConcentricCircles,
    "logcircles": LogCircles,
}


def config_text(spec):
    """key=value lines for a ConfigSpec over a named (arc-free) family."""
    for name, cls in _FAMILY_NAMES.items():
        if isinstance(spec.family, cls):
            family_name = name
            break
    else:
        raise ParameterError("only named families serialize to config text")
    lines = [f"family={family_name}", f"m={spec.m}", f"n={spec.n}"]
    scheme = spec.scheme
    if isinstance(scheme, Uniform):
        lines.append("scheme=uniform")
    elif isinstance(scheme, Arithmetic):
        lines.append("scheme=arithmetic")
    else:
        lines.append("scheme=geometric")
        if scheme.ratio is not None:
            lines.append(f"ratio={scheme.ratio!r}")
    lines.append(f"seed={spec.seed}")
    if isinstance(spec.family, LogCircles):
        lines.append(f"A={spec.family.a!r}")
        lines.append(f"B={spec.family.b!r}")
        lines.append(f"D={spec.family.d!r}")
    return "\n".join(lines) + "\n"


def parse_config_text(text):
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, val = line.split("=", 1)
        kv[key.strip()] = val.strip()
    name = kv.get("family", "parallel")
    if name not in _FAMILY_NAMES:
        raise ParameterError(f"unknown family {name!r}")
    if name == "logcircles":
        family = LogCircles(
            a=float(kv.get("A", 2.0)),
            b=float(kv.get("B", 1.0)),
            d=float(kv.get("D", 5.0)),
        )
    else:
        family = _FAMILY_NAMES[name]()
    scheme_name = kv.get("scheme", "arithmetic")
    if scheme_name == "uniform":
        scheme = Uniform()
    elif scheme_name == "arithmetic":
        scheme = Arithmetic()
    elif scheme_name == "geometric":
        ratio = float(kv["ratio"]) if "ratio" in kv else None
        scheme = Geometric(ratio)
    else:
        raise ParameterError(f"unknown scheme {scheme_name!r}")
    return ConfigSpec(
        family=family,
        m=int(kv.get("m", 8)),
        n=int(kv.get("n", 8)),
        scheme=scheme,
        seed=int(kv.get("seed", 0)),
    )
