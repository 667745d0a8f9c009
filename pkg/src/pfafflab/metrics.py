"""Distance multiplicities, energies, and the bound evaluators.

Distances are compared as squared distances throughout.  Configurations
whose coordinates are all exact rationals (ints or Fractions) take an exact
path: squared distances are computed exactly and grouped by equality.
Float configurations cluster sorted squared distances with a relative gap
tolerance and compare pairs with the predicate

    |d1 - d2| <= tol * max(1, d1, d2),

which is shared verbatim by the proximity energy and the incidence counter
so that the counting identity between them is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import (
    ConfigurationError,
    ParameterError,
    UndefinedInputError,
)

__all__ = [
    "PointConfiguration",
    "DistanceHistogram",
    "ProximityParams",
    "BoundsReport",
    "distance_histogram",
    "energy",
    "proximity_energy",
    "bounds_report",
    "exponent_fit",
    "histogram_csv",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class PointConfiguration:
    """Two x-sorted point lists with no common point."""

    p1: tuple
    p2: tuple
    provenance: str = ""

    def __post_init__(self):
        p1 = tuple(tuple(p) for p in self.p1)
        p2 = tuple(tuple(p) for p in self.p2)
        if not p1 or not p2:
            raise ConfigurationError("both point sets must be nonempty")
        for pts, tag in ((p1, "first"), (p2, "second")):
            xs = [p[0] for p in pts]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ConfigurationError(
                    f"{tag} set must be strictly increasing in x"
                )
        if set(p1) & set(p2):
            raise ConfigurationError("point sets share a point")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @property
    def m(self):
        return len(self.p1)

    @property
    def n(self):
        return len(self.p2)

    @property
    def exact(self):
        """True when every coordinate is an exact rational."""
        return all(
            isinstance(c, Rational) for p in self.p1 + self.p2 for c in p
        )

    @property
    def integral(self):
        return all(isinstance(c, int) for p in self.p1 + self.p2 for c in p)


@dataclass(frozen=True)
class ProximityParams:
    """Index-window fraction c in (0, 1]."""

    c: float

    def __post_init__(self):
        if not 0 < self.c <= 1:
            raise ParameterError(f"proximity parameter {self.c} outside (0, 1]")

    def window(self, count):
        return math.floor(self.c * count)


@dataclass(frozen=True)
class DistanceHistogram:
    """Squared-distance classes with multiplicities; sum equals m*n."""

    classes: tuple  # ((representative, multiplicity), ...) sorted by rep
    total: int
    tol: float
    exact: bool = False
    # flat per-pair class ids in row-major (p1-index, p2-index) order
    pair_class: object = field(default=None, compare=False, repr=False)

    @property
    def distinct(self):
        return len(self.classes)

    def multiplicities(self):
        return tuple(r for _, r in self.classes)


def _squared_distances_exact(cfg):
    out = []
    for px, py in cfg.p1:
        for qx, qy in cfg.p2:
            dx = px - qx
            dy = py - qy
            out.append(dx * dx + dy * dy)
    return out


def squared_distance_matrix(cfg):
    """Float (m, n) matrix of squared distances."""
    a = np.asarray([[float(x), float(y)] for x, y in cfg.p1])
    b = np.asarray([[float(x), float(y)] for x, y in cfg.p2])
    dx = a[:, :1] - b[:, 0][None, :]
    dy = a[:, 1:2] - b[:, 1][None, :]
    return dx * dx + dy * dy


def cluster_sorted(values, tol):
    """Split a sorted float array into classes at relative gaps > tol.

    Returns (class ids aligned with input order, list of (mean, count)).
    """
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranked = values[order]
    if ranked.size == 0:
        return np.array([], dtype=np.int64), []
    gaps = np.diff(ranked)
    new_class = gaps > tol * np.maximum(1.0, ranked[1:])
    ids_ranked = np.concatenate([[0], np.cumsum(new_class)])
    ids = np.empty_like(ids_ranked)
    ids[order] = ids_ranked
    classes = []
    for k in range(int(ids_ranked[-1]) + 1):
        members = ranked[ids_ranked == k]
        classes.append((float(members.mean()), int(members.size)))
    return ids, classes


def distance_histogram(cfg, tol=DEFAULT_TOL):
    """All m*n squared distances grouped into classes.

    Exact-rational input groups by exact equality and ignores ``tol``;
    float input clusters sorted values at relative gap ``tol``.
    """
    m, n = cfg.m, cfg.n
    if cfg.integral:
        a = np.asarray(cfg.p1, dtype=np.int64)
        b = np.asarray(cfg.p2, dtype=np.int64)
        if max(np.max(np.abs(a)), np.max(np.abs(b)), 1) > 10**6:
            return _histogram_fraction(cfg, tol)
        dx = a[:, :1] - b[:, 0][None, :]
        dy = a[:, 1:2] - b[:, 1][None, :]
        d2 = dx * dx + dy * dy
        flat = d2.ravel()
        reps, ids, counts = np.unique(
            flat, return_inverse=True, return_counts=True
        )
        classes = tuple(
            (int(rep), int(cnt)) for rep, cnt in zip(reps, counts)
        )
        return DistanceHistogram(
            classes=classes, total=m * n, tol=tol, exact=True,
            pair_class=ids.astype(np.int64),
        )
    if cfg.exact:
        return _histogram_fraction(cfg, tol)

    d2 = squared_distance_matrix(cfg).ravel()
    ids, classes = cluster_sorted(d2, tol)
    return DistanceHistogram(
        classes=tuple(classes), total=m * n, tol=tol, exact=False,
        pair_class=ids,
    )


def _histogram_fraction(cfg, tol):
    values = _squared_distances_exact(cfg)
    reps = sorted(set(values))
    index = {v: k for k, v in enumerate(reps)}
    counts = [0] * len(reps)
    ids = np.empty(len(values), dtype=np.int64)
    for pos, v in enumerate(values):
        k = index[v]
        counts[k] += 1
        ids[pos] = k
    classes = tuple((rep, cnt) for rep, cnt in zip(reps, counts))
    return DistanceHistogram(
        classes=classes, total=cfg.m * cfg.n, tol=tol, exact=True,
        pair_class=ids,
    )


def energy(hist):
    """Sum of squared multiplicities; equals the quadruple count of pairs
    spanning equal distances."""
    return int(sum(r * r for _, r in hist.classes))


def _index_windows(cfg, c):
    params = ProximityParams(c)
    return params.window(cfg.m), params.window(cfg.n)


def proximity_energy(cfg, c, tol=DEFAULT_TOL):
    """Distance-energy quadruples restricted to index-close pairs.

    Counts ordered quadruples (i, j, i', j') with equal squared distance
    for (i, i') and (j, j'), |i - j| <= floor(c*m), |i' - j'| <= floor(c*n).
    """
    wm, wn = _index_windows(cfg, c)
    m, n = cfg.m, cfg.n
    if cfg.exact:
        hist = distance_histogram(cfg, tol)
        return _proximity_exact(hist, m, n, wm, wn)
    d2 = squared_distance_matrix(cfg).ravel()
    i_idx = np.repeat(np.arange(m), n)
    ip_idx = np.tile(np.arange(n), m)
    total = 0
    chunk = max(1, (1 << 22) // max(d2.size, 1))
    for start in range(0, d2.size, chunk):
        stop = min(start + chunk, d2.size)
        da = d2[start:stop, None]
        db = d2[None, :]
        scale = np.maximum(1.0, np.maximum(da, db))
        close = np.abs(da - db) <= tol * scale
        close &= np.abs(i_idx[start:stop, None] - i_idx[None, :]) <= wm
        close &= np.abs(ip_idx[start:stop, None] - ip_idx[None, :]) <= wn
        total += int(np.count_nonzero(close))
    return total


def _proximity_exact(hist, m, n, wm, wn):
    ids = hist.pair_class
    i_idx = np.repeat(np.arange(m), n)
    ip_idx = np.tile(np.arange(n), m)
    total = 0
    for k in range(hist.distinct):
        members = np.nonzero(ids == k)[0]
        mi = i_idx[members]
        mip = ip_idx[members]
        di = np.abs(mi[:, None] - mi[None, :]) <= wm
        dip = np.abs(mip[:, None] - mip[None, :]) <= wn
        total += int(np.count_nonzero(di & dip))
    return total


@dataclass(frozen=True)
class BoundsReport:
    """Lower-bound evaluations for one configuration size."""

    cs_lower: Fraction
    cs_satisfied: bool
    theorem_bound: float
    theorem_satisfied: bool
    ps_bound: float

    def as_dict(self):
        return {
            "cs_lower": float(self.cs_lower),
            "cs_satisfied": self.cs_satisfied,
            "theorem_bound": self.theorem_bound,
            "theorem_satisfied": self.theorem_satisfied,
            "ps_bound": self.ps_bound,
        }


def bounds_report(m, n, dcount, e, k=2):
    """Evaluate the three bounds at (m, n).

    cs_lower = (mn)^2 / |D| with the flag E * |D| >= (mn)^2 checked in
    integers; theorem_bound = min(m^(3/4) n^(3/4), m^2, n^2); ps_bound =
    m^(k/(2k-1)) n^((2k-2)/(2k-1)) + m + n.
    """
    if dcount < 1:
        raise UndefinedInputError("distinct count must be positive")
    if k < 1:
        raise ParameterError("degrees of freedom must be >= 1")
    cs_lower = Fraction((m * n) ** 2, dcount)
    cs_ok = e * dcount >= (m * n) ** 2
    theorem = min(m**0.75 * n**0.75, float(m * m), float(n * n))
    ps = m ** (k / (2 * k - 1)) * n ** ((2 * k - 2) / (2 * k - 1)) + m + n
    return BoundsReport(
        cs_lower=cs_lower,
        cs_satisfied=bool(cs_ok),
        theorem_bound=float(theorem),
        theorem_satisfied=bool(dcount >= theorem / 16.0),
        ps_bound=float(ps),
    )


def exponent_fit(samples):
    """Least-squares slope of log(value) against log(n)."""
    if len(samples) < 3:
        raise ParameterError("need at least 3 samples")
    ns = np.asarray([s[0] for s in samples], dtype=float)
    vs = np.asarray([s[1] for s in samples], dtype=float)
    if np.any(ns <= 0) or np.any(vs <= 0):
        raise ParameterError("samples must be positive")
    slope, _ = np.polyfit(np.log(ns), np.log(vs), 1)
    return float(slope)


def histogram_csv(hist):
    """CSV text with header d_squared,multiplicity."""
    lines = ["d_squared,multiplicity"]
    for rep, mult in hist.classes:
        lines.append(f"{_num_text(rep)},{mult}")
    return "\n".join(lines) + "\n"


def _num_text(v):
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return repr(float(v))
