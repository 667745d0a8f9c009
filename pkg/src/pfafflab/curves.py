"""Monotone graph arcs of bivariate zero sets, and curve classification.

An arc is a piece of {f = 0} over an open x-interval on which the curve is
the graph of a strictly monotone function y = g(x).  Arcs come either from
the named builders below (which attach exact parameterizations) or from
predictor-corrector continuation, which splits at slope sign changes and
stops at vertical tangents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BracketError,
    ConvergenceError,
    GraphConditionError,
    SeedError,
)
from .pfaffian import (
    PfaffianFunction,
    builtin_chain,
    pfaff_eval,
    pfaff_gradient,
)
from .poly import Polynomial

__all__ = [
    "PlanarArc",
    "CurveClass",
    "solve_on_vertical",
    "parameterize",
    "extract_monotone_arc",
    "classify_curve",
    "degenerate_pair",
    "line_arc",
    "circle_arc",
    "exp_arc",
    "ln_arc",
    "arc_descriptor",
    "parse_arc_descriptor",
]

INCREASING = "increasing"
DECREASING = "decreasing"

GRAPH_TOL = 1e-9
PARAM_RESIDUAL = 1e-10


@dataclass(frozen=True)
class CurveClass:
    """Fit outcome: "line" with unit direction and offset, "circle" with
    center and radius, or "other"; the residual is the max fit deviation."""

    kind: str
    direction: tuple = None
    offset: float = None
    center: tuple = None
    radius: float = None
    residual: float = 0.0


@dataclass(frozen=True)
class PlanarArc:
    """Strictly monotone graph piece of a bivariate zero set.

    ``fy_sign`` records the sign of df/dy along the arc (the graph
    condition keeps it constant).  ``g2``/``dg2`` hold exact
    parameterizations when the builder knows them; otherwise queries go
    through Newton iteration warm-started from the continuation samples.
    """

    f: PfaffianFunction
    x_lo: float
    x_hi: float
    monotonicity: str
    fy_sign: int
    g2: object = field(default=None, compare=False)
    dg2: object = field(default=None, compare=False)
    samples: tuple = field(default=None, compare=False, repr=False)
    known_class: CurveClass = None
    name: str = ""

    def __post_init__(self):
        if self.x_lo >= self.x_hi:
            raise ValueError("empty x-interval")
        if self.monotonicity not in (INCREASING, DECREASING):
            raise ValueError(f"bad monotonicity {self.monotonicity!r}")

    @property
    def interval(self):
        return (self.x_lo, self.x_hi)

    def grid(self, count, margin=1e-9):
        span = self.x_hi - self.x_lo
        pad = max(margin, 1e-9 * span)
        return np.linspace(self.x_lo + pad, self.x_hi - pad, count)


def solve_on_vertical(f, x, bracket, tol, max_iter=200):
    """Root of y -> f(x, y) inside a sign-changing bracket.

    Bisection with secant acceleration; returns y with |f(x, y)| <= tol.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    flo = pfaff_eval(f, (x, lo))
    fhi = pfaff_eval(f, (x, hi))
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}] at x={x}")
    for _ in range(max_iter):
        if fhi != flo:
            y = hi - fhi * (hi - lo) / (fhi - flo)  # secant
            if not (lo < y < hi):
                y = 0.5 * (lo + hi)
        else:
            y = 0.5 * (lo + hi)
        fy = pfaff_eval(f, (x, y))
        if abs(fy) <= tol:
            return y
        if flo * fy < 0:
            hi, fhi = y, fy
        else:
            lo, flo = y, fy
        # stall guard: fall back to pure bisection when the secant pins
        # an endpoint
        if hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi), 1.0)):
            y = 0.5 * (lo + hi)
            if abs(pfaff_eval(f, (x, y))) <= tol:
                return y
            raise ConvergenceError(f"bracket collapsed at x={x} before |f| <= {tol}")
    raise ConvergenceError(f"no convergence after {max_iter} iterations at x={x}")


def _newton_y(f, x, y0, residual_target, y_range=None, max_iter=40):
    """Polish y so that |f(x, y)| <= residual_target, starting at y0."""
    y = float(y0)
    for _ in range(max_iter):
        val = pfaff_eval(f, (x, y))
        if abs(val) <= residual_target:
            return y
        _, fy = pfaff_gradient(f, (x, y))
        if abs(fy) <= GRAPH_TOL * max(1.0, abs(val)):
            raise GraphConditionError(f"df/dy vanishes near x={x}")
        step = val / fy
        y -= step
        if y_range is not None:
            y = min(max(y, y_range[0]), y_range[1])
    val = pfaff_eval(f, (x, y))
    if abs(val) <= residual_target:
        return y
    raise ConvergenceError(f"Newton stalled at x={x}, residual {val}")


def parameterize(arc):
    """Evaluator pair (g, g') for the arc.

    g(x) solves f(x, g(x)) = 0 with residual <= 1e-10; g'(x) = -f_x/f_y from
    the exact gradient.  Exact forms attached by the builders are used
    directly.
    """
    if arc.g2 is not None and arc.dg2 is not None:
        return arc.g2, arc.dg2

    f = arc.f
    if arc.samples is None:
        raise ValueError("arc carries neither exact forms nor samples")
    xs, ys = arc.samples
    ylo = float(np.min(ys))
    yhi = float(np.max(ys))
    pad = 0.05 * max(yhi - ylo, 1e-6)

    def g2_scalar(x):
        if not arc.x_lo < x < arc.x_hi:
            raise ValueError(f"x={x} outside arc interval {arc.interval}")
        y0 = float(np.interp(x, xs, ys))
        return _newton_y(f, float(x), y0, PARAM_RESIDUAL,
                         y_range=(ylo - pad, yhi + pad))

    def g2(x):
        if np.ndim(x) == 0:
            return g2_scalar(x)
        return np.array([g2_scalar(v) for v in np.asarray(x).ravel()]).reshape(
            np.shape(x)
        )

    def dg2(x):
        if np.ndim(x) != 0:
            return np.array([dg2(v) for v in np.asarray(x).ravel()]).reshape(
                np.shape(x)
            )
        y = g2_scalar(x)
        fx, fy = pfaff_gradient(f, (float(x), y))
        if abs(fy) <= GRAPH_TOL * max(1.0, abs(fx)):
            raise GraphConditionError(f"df/dy vanishes at x={x}")
        return -fx / fy

    return g2, dg2


def _slope(f, x, y):
    fx, fy = pfaff_gradient(f, (x, y))
    if abs(fy) <= GRAPH_TOL * max(1.0, abs(fx)):
        return None, fy
    return -fx / fy, fy


def extract_monotone_arc(f, seed, window, samples=20):
    """Trace the curve through ``seed`` across ``window`` and split it into
    strictly monotone graph arcs.

    Continuation steps are window-length / (50 * samples), halved when the
    corrector fails.  Arcs end at slope sign changes (located by bisection)
    and at vertical tangents.
    """
    x0, y0 = float(seed[0]), float(seed[1])
    lo, hi = float(window[0]), float(window[1])
    if not lo <= x0 <= hi:
        raise SeedError(f"seed x={x0} outside window {window}")
    val = pfaff_eval(f, (x0, y0))
    if abs(val) > 1e-8 * max(1.0, abs(y0)):
        raise SeedError(f"seed residual {val} too large")
    slope0, fy0 = _slope(f, x0, y0)
    if slope0 is None:
        raise GraphConditionError("df/dy vanishes at the seed")
    y0 = _newton_y(f, x0, y0, 1e-13 * max(1.0, abs(y0)))

    step0 = (hi - lo) / (50.0 * samples)

    def march(direction):
        pts = []
        x, y = x0, y0
        h = step0
        while True:
            if direction > 0 and x >= hi:
                break
            if direction < 0 and x <= lo:
                break
            xn = x + direction * h
            xn = min(max(xn, lo), hi)
            slope, _ = _slope(f, x, y)
            if slope is None:
                break
            try:
                yn = _newton_y(f, xn, y + slope * (xn - x),
                               1e-12 * max(1.0, abs(y)))
            except (ConvergenceError, GraphConditionError):
                if h > step0 / 64:
                    h *= 0.5
                    continue
                break
            # stop, do not cross, when the graph condition degrades
            _, fy = pfaff_gradient(f, (xn, yn))
            if abs(fy) <= GRAPH_TOL:
                break
            pts.append((xn, yn))
            x, y = xn, yn
            h = min(step0, h * 2)
            if xn == lo or xn == hi:
                break
        return pts

    left = march(-1)
    right = march(+1)
    chain = list(reversed(left)) + [(x0, y0)] + right
    xs = np.array([p[0] for p in chain])
    ys = np.array([p[1] for p in chain])
    slopes = np.empty(len(chain))
    for k, (x, y) in enumerate(chain):
        s, _ = _slope(f, x, y)
        slopes[k] = s if s is not None else 0.0

    # locate slope sign changes between consecutive samples; a slope that
    # merely touches zero (same sign on both sides) does not break the arc
    breaks = []
    nonzero = np.nonzero(slopes)[0]
    for k in range(len(chain) - 1):
        s1, s2 = slopes[k], slopes[k + 1]
        if s1 == 0.0:
            before = nonzero[nonzero < k]
            after = nonzero[nonzero > k]
            if before.size and after.size and (
                (slopes[before[-1]] > 0) != (slopes[after[0]] > 0)
            ):
                breaks.append((k, xs[k]))
        elif s2 != 0.0 and s1 * s2 < 0:
            breaks.append((k, _bisect_slope_zero(f, chain[k], chain[k + 1])))

    segments = []
    start_idx = 0
    start_x = xs[0]
    for k, bx in breaks:
        segments.append((start_idx, k + 1, start_x, bx))
        start_idx = k + 1
        start_x = bx
    segments.append((start_idx, len(chain), start_x, xs[-1]))

    arcs = []
    for i0, i1, a, b in segments:
        if i1 - i0 < 2 or b - a <= 1e-12:
            continue
        seg_slopes = slopes[i0:i1]
        mono = INCREASING if np.median(seg_slopes) > 0 else DECREASING
        fy_sign = 1 if pfaff_gradient(f, chain[i0])[1] > 0 else -1
        arcs.append(
            PlanarArc(
                f=f, x_lo=float(a), x_hi=float(b), monotonicity=mono,
                fy_sign=fy_sign,
                samples=(xs[i0:i1].copy(), ys[i0:i1].copy()),
                name=f.name,
            )
        )
    return arcs


def _bisect_slope_zero(f, p1, p2):
    """x where g' changes sign between two curve samples."""
    (x1, y1), (x2, y2) = p1, p2
    s1, _ = _slope(f, x1, y1)
    for _ in range(80):
        xm = 0.5 * (x1 + x2)
        ym = _newton_y(f, xm, 0.5 * (y1 + y2), 1e-12 * max(1.0, abs(y1)))
        sm, _ = _slope(f, xm, ym)
        if sm is None or sm == 0.0:
            return xm
        if (s1 > 0) != (sm > 0):
            x2, y2 = xm, ym
        else:
            x1, y1, s1 = xm, ym, sm
        if x2 - x1 < 1e-13 * max(1.0, abs(x1)):
            break
    return 0.5 * (x1 + x2)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def classify_curve(arc, samples=40, tol=1e-6):
    """Least-squares line fit and algebraic circle fit on sampled points.

    Returns the class whose max residual beats ``tol``, preferring the line;
    otherwise "other" carrying the smaller residual.  Builders may tag arcs
    with an exact class, which wins outright.
    """
    if samples < 5:
        raise ValueError("need at least 5 samples")
    if arc.known_class is not None:
        return arc.known_class
    g2, _ = parameterize(arc)
    xs = arc.grid(samples)
    ys = np.array([g2(float(x)) for x in xs])
    pts = np.column_stack([xs, ys])

    line_dir, line_off, line_res = _fit_line(pts)
    center, radius, circ_res = _fit_circle(pts)

    if line_res < tol:
        return CurveClass(kind="line", direction=line_dir, offset=line_off,
                          residual=float(line_res))
    if circ_res < tol:
        return CurveClass(kind="circle", center=center, radius=radius,
                          residual=float(circ_res))
    return CurveClass(kind="other", residual=float(min(line_res, circ_res)))


def _fit_line(pts):
    mean = pts.mean(axis=0)
    centered = pts - mean
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    direction = vt[0]
    if direction[0] < 0 or (direction[0] == 0 and direction[1] < 0):
        direction = -direction
    normal = np.array([-direction[1], direction[0]])
    residual = np.max(np.abs(centered @ normal))
    offset = float(mean @ normal)
    return (float(direction[0]), float(direction[1])), offset, residual


def _fit_circle(pts):
    # Kasa normal equations: 2*cx*x + 2*cy*y + k = x^2 + y^2
    x, y = pts[:, 0], pts[:, 1]
    a = np.column_stack([2 * x, 2 * y, np.ones_like(x)])
    b = x**2 + y**2
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    cx, cy, k = sol
    r2 = k + cx**2 + cy**2
    if r2 <= 0:
        return (float(cx), float(cy)), 0.0, np.inf
    radius = math.sqrt(r2)
    residual = np.max(np.abs(np.hypot(x - cx, y - cy) - radius))
    return (float(cx), float(cy)), float(radius), residual


def degenerate_pair(c1, c2, tol=1e-9):
    """Which exceptional pair the two classes form, if any.

    "parallel-lines" | "orthogonal-lines" | "concentric-circles" | "none".
    """
    if c1.kind == "line" and c2.kind == "line":
        d1 = np.asarray(c1.direction)
        d2 = np.asarray(c2.direction)
        cross = abs(d1[0] * d2[1] - d1[1] * d2[0])  # |sin angle|
        dot = abs(d1 @ d2)  # |cos angle|
        if cross < tol:
            return "parallel-lines"
        if dot < tol:
            return "orthogonal-lines"
    if c1.kind == "circle" and c2.kind == "circle":
        if math.hypot(c1.center[0] - c2.center[0],
                      c1.center[1] - c2.center[1]) < tol:
            return "concentric-circles"
    return "none"


# ---------------------------------------------------------------------------
# named arc builders (exact parameterizations, tagged classes)
# ---------------------------------------------------------------------------


def line_arc(slope, intercept, window, name="line"):
    """Arc of y = slope*x + intercept; vertical lines are out of scope."""
    chain = builtin_chain("empty", dim=2)
    q = (
        Polynomial.variable(2, 1)
        - Polynomial.variable(2, 0, coeff=slope)
        - Polynomial.constant(2, intercept)
    )
    f = PfaffianFunction(chain=chain, q_poly=q, name=name)
    norm = math.hypot(1.0, slope)
    direction = (1.0 / norm, slope / norm)
    if slope == 0:
        raise ValueError("horizontal lines are not strictly monotone arcs")
    mono = INCREASING if slope > 0 else DECREASING
    return PlanarArc(
        f=f, x_lo=float(window[0]), x_hi=float(window[1]), monotonicity=mono,
        fy_sign=1,
        g2=lambda x: slope * np.asarray(x, dtype=float) + intercept,
        dg2=lambda x: np.full_like(np.asarray(x, dtype=float), float(slope))
        if np.ndim(x) else float(slope),
        known_class=CurveClass(
            kind="line", direction=direction,
            offset=float(intercept * direction[0]), residual=0.0,
        ),
        name=name,
    )


def circle_arc(center, radius, window, upper=True, name="circle"):
    """Monotone arc of the circle; the window must avoid x = center_x."""
    cx, cy = float(center[0]), float(center[1])
    lo, hi = float(window[0]), float(window[1])
    if not (cx - radius < lo < hi < cx + radius):
        raise ValueError("window must sit strictly inside the circle's span")
    if lo < cx < hi:
        raise ValueError("window crosses the tangent point; arc not monotone")
    chain = builtin_chain("empty", dim=2)
    q = (
        (Polynomial.variable(2, 0) - Polynomial.constant(2, cx)) ** 2
        + (Polynomial.variable(2, 1) - Polynomial.constant(2, cy)) ** 2
        - Polynomial.constant(2, radius * radius)
    )
    f = PfaffianFunction(chain=chain, q_poly=q, name=name)
    sign = 1.0 if upper else -1.0

    def g2(x):
        x = np.asarray(x, dtype=float)
        val = cy + sign * np.sqrt(radius * radius - (x - cx) ** 2)
        return val if val.ndim else float(val)

    def dg2(x):
        x = np.asarray(x, dtype=float)
        val = -sign * (x - cx) / np.sqrt(radius * radius - (x - cx) ** 2)
        return val if val.ndim else float(val)

    increasing = (dg2(0.5 * (lo + hi)) > 0)
    return PlanarArc(
        f=f, x_lo=lo, x_hi=hi,
        monotonicity=INCREASING if increasing else DECREASING,
        fy_sign=1 if upper else -1,
        g2=g2, dg2=dg2,
        known_class=CurveClass(kind="circle", center=(cx, cy),
                               radius=float(radius), residual=0.0),
        name=name,
    )


def exp_arc(a=1.0, window=(0.0, 1.0), name="exp"):
    """Arc of y = e^(a x)."""
    chain = builtin_chain("exp", a=a, dim=2, axis=0)
    q = Polynomial.variable(3, 1) - Polynomial.variable(3, 2)
    f = PfaffianFunction(chain=chain, q_poly=q, name=name)
    aa = float(a)

    def g2(x):
        val = np.exp(aa * np.asarray(x, dtype=float))
        return val if val.ndim else float(val)

    def dg2(x):
        val = aa * np.exp(aa * np.asarray(x, dtype=float))
        return val if val.ndim else float(val)

    return PlanarArc(
        f=f, x_lo=float(window[0]), x_hi=float(window[1]),
        monotonicity=INCREASING if aa > 0 else DECREASING, fy_sign=1,
        g2=g2, dg2=dg2, name=name,
    )


def ln_arc(window=(0.5, 4.0), name="ln"):
    """Arc of y = ln x over a window inside (0, inf)."""
    if window[0] <= 0:
        raise ValueError("ln arc needs a window inside (0, inf)")
    chain = builtin_chain("recip-ln", dim=2, axis=0)
    q = Polynomial.variable(4, 1) - Polynomial.variable(4, 3)
    f = PfaffianFunction(chain=chain, q_poly=q, name=name)

    def g2(x):
        val = np.log(np.asarray(x, dtype=float))
        return val if val.ndim else float(val)

    def dg2(x):
        val = 1.0 / np.asarray(x, dtype=float)
        return val if val.ndim else float(val)

    return PlanarArc(
        f=f, x_lo=float(window[0]), x_hi=float(window[1]),
        monotonicity=INCREASING, fy_sign=1, g2=g2, dg2=dg2, name=name,
    )


NAMED_ARCS = {
    "exp": lambda window: exp_arc(1.0, window or (0.0, 1.0)),
    "ln": lambda window: ln_arc(window or (0.5, 4.0)),
    "line": lambda window: line_arc(3.0, 1.0, window or (0.0, 1.0)),
    "circle": lambda window: circle_arc((0.0, 0.0), 2.0, window or (0.2, 1.8)),
}


def arc_descriptor(arc):
    """One-line text form: function reference plus interval and direction."""
    ref = arc.name or arc.f.name or "anonymous"
    return f"{ref} {arc.x_lo!r} {arc.x_hi!r} {arc.monotonicity}"


def parse_arc_descriptor(text):
    ref, lo, hi, mono = text.split()
    if ref not in NAMED_ARCS:
        raise ValueError(f"unknown arc reference {ref!r}")
    arc = NAMED_ARCS[ref]((float(lo), float(hi)))
    if arc.monotonicity != mono:
        raise ValueError(f"descriptor direction {mono!r} does not match {ref!r}")
    return arc
