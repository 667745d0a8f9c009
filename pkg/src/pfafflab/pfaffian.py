"""Chains of ODE-defined smooth functions and the polynomials built on them.

A chain of order r over an open box U in R^d is a tuple of smooth functions
q_1..q_r whose partial derivatives are polynomials in the coordinates and the
earlier chain entries (the triangular condition).  A function of the chain is
a polynomial Q(x_1..x_d, q_1..q_r); its format (alpha, beta, r) collects the
chain degree, the degree of Q, and the order.

Each builtin chain carries a closed-form evaluator.  The same chain can also
be evaluated by integrating its defining ODE system from an anchor point,
which exists to exercise the general definition; the closed forms act as the
oracle for that route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from scipy.integrate import solve_ivp

from .errors import (
    ConvergenceError,
    DomainError,
    ParameterError,
    PathError,
    UndefinedInputError,
)
from .poly import Polynomial

__all__ = [
    "Box",
    "Format",
    "PfaffianChain",
    "PfaffianFunction",
    "builtin_chain",
    "concat_chains",
    "chain_values",
    "with_ode_anchor",
    "pfaff_eval",
    "pfaff_gradient",
    "component_bound",
    "serialize_function",
    "parse_function",
]

ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box; infinite bounds allowed."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("bound tuples differ in length")
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ValueError("empty box")

    @property
    def dim(self):
        return len(self.lo)

    def contains(self, point):
        return all(a < x < b for x, a, b in zip(point, self.lo, self.hi))

    @classmethod
    def whole(cls, dim):
        return cls((-math.inf,) * dim, (math.inf,) * dim)

    def format_text(self):
        return ";".join(f"{a!r},{b!r}" for a, b in zip(self.lo, self.hi))

    @classmethod
    def parse_text(cls, text):
        lo, hi = [], []
        for part in text.split(";"):
            a, b = part.split(",")
            lo.append(float(a))
            hi.append(float(b))
        return cls(tuple(lo), tuple(hi))


@dataclass(frozen=True)
class Format:
    """Complexity triple (chain degree, polynomial degree, order)."""

    alpha: int
    beta: int
    order: int

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.order < 0:
            raise ValueError("format entries must be nonnegative")


@dataclass(frozen=True)
class ClosedForm:
    """Closed-form chain evaluator with a parseable tag for serialization."""

    tag: str
    fn: object = field(compare=False)


@dataclass(frozen=True)
class OdeAnchor:
    """Anchor point and chain values there; evaluation integrates the ODEs."""

    anchor: tuple
    values: tuple


@dataclass(frozen=True)
class PfaffianChain:
    """Triangular ODE system q_1..q_r over an open box.

    ``derivs[j][i]`` is the polynomial giving d(q_{j+1})/d(x_{i+1}); all
    derivative polynomials live in the d + r variables (x..., y...) with the
    triangular condition that the one for q_j never uses y_k with k > j.
    """

    dim: int
    order: int
    alpha: int
    derivs: tuple  # derivs[j][i] : Polynomial in dim + order vars
    domain: Box
    evaluator: object  # ClosedForm | OdeAnchor

    def __post_init__(self):
        if self.domain.dim != self.dim:
            raise ValueError("domain dimension mismatch")
        if len(self.derivs) != self.order:
            raise ValueError("need one derivative row per chain entry")
        for j, row in enumerate(self.derivs):
            if len(row) != self.dim:
                raise ValueError("need one derivative per coordinate")
            for poly in row:
                if poly.nvars != self.dim + self.order:
                    raise ValueError("derivative polynomial has wrong arity")
                if poly.max_var_used() >= self.dim + j + 1:
                    raise ValueError(
                        f"triangular condition violated in row {j + 1}"
                    )
                if poly.degree > self.alpha:
                    raise ValueError("derivative degree exceeds chain degree")
        if isinstance(self.evaluator, OdeAnchor):
            if not self.domain.contains(self.evaluator.anchor):
                raise ValueError("anchor point outside domain")
            if len(self.evaluator.values) != self.order:
                raise ValueError("anchor needs one value per chain entry")


@dataclass(frozen=True)
class PfaffianFunction:
    """Polynomial in the coordinates and the chain values."""

    chain: PfaffianChain
    q_poly: Polynomial
    name: str = ""

    def __post_init__(self):
        if self.q_poly.nvars != self.chain.dim + self.chain.order:
            raise ValueError(
                "defining polynomial must use d + r variables "
                f"({self.chain.dim} + {self.chain.order})"
            )

    @property
    def beta(self):
        return self.q_poly.degree

    @property
    def format(self):
        return Format(self.chain.alpha, self.beta, self.chain.order)


# ---------------------------------------------------------------------------
# builtin chains
# ---------------------------------------------------------------------------


def _zero(nvars):
    return Polynomial.zero(nvars)


def _build_closed(tag, fn):
    return ClosedForm(tag=tag, fn=fn)


def builtin_chain(kind, *, a=1.0, m=1.0, depth=2, exponents=None, dim=1, axis=0,
                  period=0):
    """Construct one of the builtin chains.

    kind: "empty" | "exp" | "exp-tower" | "tan" | "recip-ln" | "recip-power"
          | "monomial".
    ``dim`` is the ambient dimension and ``axis`` the coordinate the
    univariate kinds depend on; "monomial" takes ``exponents`` (one per
    coordinate) and fixes dim to their count.
    """
    if kind == "monomial":
        if exponents is None:
            raise ParameterError("monomial chain needs exponents")
        dim = len(exponents)
    if not 0 <= axis < dim:
        raise ParameterError(f"axis {axis} outside dimension {dim}")

    if kind == "empty":
        return PfaffianChain(
            dim=dim, order=0, alpha=0, derivs=(), domain=Box.whole(dim),
            evaluator=_build_closed(f"empty dim={dim}", lambda p: ()),
        )

    if kind == "exp":
        if a == 0:
            raise ParameterError("exp chain needs a != 0")
        nv = dim + 1
        row = [_zero(nv)] * dim
        row[axis] = Polynomial.variable(nv, dim, coeff=a)
        aa = float(a) if not isinstance(a, int) else a

        def ev(p, _a=aa, _axis=axis):
            return (math.exp(_a * p[_axis]),)

        return PfaffianChain(
            dim=dim, order=1, alpha=1, derivs=(tuple(row),),
            domain=Box.whole(dim),
            evaluator=_build_closed(f"exp a={aa!r} axis={axis} dim={dim}", ev),
        )

    if kind == "exp-tower":
        if a == 0:
            raise ParameterError("exp-tower chain needs a != 0")
        if depth < 1:
            raise ParameterError("exp-tower depth must be >= 1")
        nv = dim + depth
        rows = []
        for j in range(depth):
            # d(q_{j+1})/dx = a * q_1 * ... * q_{j+1}
            exps = [0] * nv
            for k in range(j + 1):
                exps[dim + k] = 1
            row = [_zero(nv)] * dim
            row[axis] = Polynomial(nv, [(tuple(exps), a)])
            rows.append(tuple(row))
        aa = float(a) if not isinstance(a, int) else a

        def ev(p, _a=aa, _axis=axis, _depth=depth):
            vals = []
            cur = math.exp(_a * p[_axis])
            vals.append(cur)
            for _ in range(_depth - 1):
                cur = math.exp(cur)
                vals.append(cur)
            return tuple(vals)

        return PfaffianChain(
            dim=dim, order=depth, alpha=depth, derivs=tuple(rows),
            domain=Box.whole(dim),
            evaluator=_build_closed(
                f"exp-tower a={aa!r} depth={depth} axis={axis} dim={dim}", ev
            ),
        )

    if kind == "tan":
        nv = dim + 1
        row = [_zero(nv)] * dim
        row[axis] = (
            Polynomial.constant(nv, 1)
            + Polynomial.variable(nv, dim, power=2)
        )
        lo = [-math.inf] * dim
        hi = [math.inf] * dim
        lo[axis] = period * math.pi - math.pi / 2
        hi[axis] = period * math.pi + math.pi / 2

        def ev(p, _axis=axis):
            return (math.tan(p[_axis]),)

        return PfaffianChain(
            dim=dim, order=1, alpha=2, derivs=(tuple(row),),
            domain=Box(tuple(lo), tuple(hi)),
            evaluator=_build_closed(f"tan period={period} axis={axis} dim={dim}", ev),
        )

    if kind in ("recip-ln", "recip-power"):
        if kind == "recip-power" and m <= 0:
            raise ParameterError("recip-power chain needs m > 0")
        nv = dim + 2
        row1 = [_zero(nv)] * dim
        row1[axis] = Polynomial.variable(nv, dim, power=2, coeff=-1)
        row2 = [_zero(nv)] * dim
        if kind == "recip-ln":
            row2[axis] = Polynomial.variable(nv, dim)

            def ev(p, _axis=axis):
                return (1.0 / p[_axis], math.log(p[_axis]))

            tag = f"recip-ln axis={axis} dim={dim}"
        else:
            exps = [0] * nv
            exps[dim] = 1
            exps[dim + 1] = 1
            row2[axis] = Polynomial(nv, [(tuple(exps), m)])
            mm = float(m) if not isinstance(m, int) else m

            def ev(p, _axis=axis, _m=mm):
                return (1.0 / p[_axis], p[_axis] ** _m)

            tag = f"recip-power m={mm!r} axis={axis} dim={dim}"
        lo = [-math.inf] * dim
        hi = [math.inf] * dim
        lo[axis] = 0.0
        return PfaffianChain(
            dim=dim, order=2, alpha=2, derivs=(tuple(row1), tuple(row2)),
            domain=Box(tuple(lo), tuple(hi)),
            evaluator=_build_closed(tag, ev),
        )

    if kind == "monomial":
        d = len(exponents)
        r = d + 1
        nv = d + r
        rows = []
        for j in range(d):
            # q_{j+1} = 1/x_{j+1}
            row = [_zero(nv)] * d
            row[j] = Polynomial.variable(nv, d + j, power=2, coeff=-1)
            rows.append(tuple(row))
        last = []
        for i in range(d):
            exps = [0] * nv
            exps[d + i] = 1
            exps[d + d] = 1
            last.append(Polynomial(nv, [(tuple(exps), exponents[i])]))
        rows.append(tuple(last))
        ms = tuple(float(e) for e in exponents)

        def ev(p, _ms=ms):
            prod = 1.0
            for x, e in zip(p, _ms):
                prod *= x**e
            return tuple(1.0 / x for x in p) + (prod,)

        tag = "monomial exponents=" + ",".join(repr(e) for e in ms)
        return PfaffianChain(
            dim=d, order=r, alpha=2, derivs=tuple(rows),
            domain=Box((0.0,) * d, (math.inf,) * d),
            evaluator=_build_closed(tag, ev),
        )

    raise ParameterError(f"unknown chain kind {kind!r}")


def concat_chains(first, second):
    """Stack two chains over the same ambient space into one.

    The result keeps the triangular condition because the second block never
    references the first block's entries.  Domains intersect.
    """
    if first.dim != second.dim:
        raise ValueError("chains live over different spaces")
    d = first.dim
    r1, r2 = first.order, second.order
    nv = d + r1 + r2
    rows = []
    for row in first.derivs:
        mapping = list(range(d + r1))
        rows.append(tuple(p.remap(nv, mapping) for p in row))
    for row in second.derivs:
        mapping = list(range(d)) + [d + r1 + k for k in range(r2)]
        rows.append(tuple(p.remap(nv, mapping) for p in row))
    lo = tuple(max(a, b) for a, b in zip(first.domain.lo, second.domain.lo))
    hi = tuple(min(a, b) for a, b in zip(first.domain.hi, second.domain.hi))
    ev1, ev2 = first.evaluator, second.evaluator
    if not isinstance(ev1, ClosedForm) or not isinstance(ev2, ClosedForm):
        raise ValueError("can only concatenate closed-form chains")

    def ev(p, _f1=ev1.fn, _f2=ev2.fn):
        return tuple(_f1(p)) + tuple(_f2(p))

    return PfaffianChain(
        dim=d, order=r1 + r2, alpha=max(first.alpha, second.alpha),
        derivs=tuple(rows), domain=Box(lo, hi),
        evaluator=_build_closed(f"concat[{ev1.tag}|{ev2.tag}]", ev),
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def chain_values(chain, point):
    """Values (q_1..q_r) at a point of the domain."""
    point = tuple(float(x) for x in point)
    if len(point) != chain.dim:
        raise ValueError(f"point has dimension {len(point)}, chain {chain.dim}")
    if not chain.domain.contains(point):
        raise DomainError(f"point {point} outside open domain")
    ev = chain.evaluator
    if isinstance(ev, ClosedForm):
        return tuple(ev.fn(point))
    return _integrate_chain(chain, ev, point)


def _integrate_chain(chain, anchor, point):
    """Integrate the derivative system along the segment anchor -> point."""
    start = tuple(float(x) for x in anchor.anchor)
    delta = tuple(p - s for p, s in zip(point, start))
    # The box is convex so interior endpoints keep the segment interior;
    # sample anyway to catch future non-box domains and bad anchors.
    for k in range(1, 16):
        t = k / 16.0
        mid = tuple(s + t * dx for s, dx in zip(start, delta))
        if not chain.domain.contains(mid):
            raise PathError(f"segment leaves domain near t={t}")
    if chain.order == 0:
        return ()
    if all(dx == 0 for dx in delta):
        return tuple(anchor.values)

    derivs = chain.derivs
    d = chain.dim

    def rhs(t, q):
        x = [s + t * dx for s, dx in zip(start, delta)]
        args = x + list(q)
        out = []
        for j in range(chain.order):
            total = 0.0
            for i in range(d):
                if delta[i] != 0:
                    total += float(derivs[j][i].eval(args)) * delta[i]
            out.append(total)
        return out

    sol = solve_ivp(
        rhs, (0.0, 1.0), [float(v) for v in anchor.values],
        method="RK45", rtol=ODE_RTOL, atol=ODE_ATOL,
    )
    if not sol.success:
        raise ConvergenceError(f"chain integration failed: {sol.message}")
    return tuple(sol.y[:, -1])


def with_ode_anchor(chain, anchor):
    """Copy of the chain that evaluates by integrating from ``anchor``.

    The anchor values are taken from the chain's current evaluator.
    """
    values = chain_values(chain, anchor)
    return replace(
        chain,
        evaluator=OdeAnchor(tuple(float(x) for x in anchor), values),
    )


def pfaff_eval(f, point):
    """Evaluate Q(x, q_1(x)..q_r(x))."""
    q = chain_values(f.chain, point)
    return f.q_poly.eval(tuple(point) + tuple(q))


def pfaff_gradient(f, point):
    """Exact gradient via the chain rule through the derivative polynomials."""
    point = tuple(point)
    q = chain_values(f.chain, point)
    args = point + tuple(q)
    d, r = f.chain.dim, f.chain.order
    grad = []
    for i in range(d):
        total = f.q_poly.diff(i).eval(args)
        for j in range(r):
            dq = f.q_poly.diff(d + j)
            if dq.is_zero():
                continue
            total = total + dq.eval(args) * f.chain.derivs[j][i].eval(args)
        grad.append(float(total))
    return tuple(grad)


# ---------------------------------------------------------------------------
# connected-component bound
# ---------------------------------------------------------------------------


def component_bound(fmt, d):
    """Closed-form cap on the connected components of a joint zero set.

    Exact integer: 2^(C(r,2)+1) * beta * (alpha+2*beta-1)^(d-1)
    * ((2d-1)(alpha+beta) - 2d + 2)^r.
    """
    if d < 1:
        raise ParameterError("ambient dimension must be >= 1")
    if fmt.beta == 0:
        raise UndefinedInputError("bound undefined for beta = 0")
    alpha, beta, r = fmt.alpha, fmt.beta, fmt.order
    return (
        2 ** (math.comb(r, 2) + 1)
        * beta
        * (alpha + 2 * beta - 1) ** (d - 1)
        * ((2 * d - 1) * (alpha + beta) - 2 * d + 2) ** r
    )


# ---------------------------------------------------------------------------
# plain-text serialization
# ---------------------------------------------------------------------------


def _poly_text(poly):
    if poly.is_zero():
        return "0"
    return " ".join(
        f"{_coeff_text(c)}:{','.join(str(e) for e in exps)}"
        for exps, c in poly.terms
    )


def _coeff_text(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return repr(c)


def _parse_coeff(text):
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return float(text)


def _parse_poly(line, nvars):
    line = line.strip()
    if line == "0":
        return Polynomial.zero(nvars)
    terms = []
    for item in line.split():
        coeff, exps = item.split(":")
        terms.append((tuple(int(e) for e in exps.split(",")), _parse_coeff(coeff)))
    return Polynomial(nvars, terms)


def serialize_function(f):
    """Text form: header, evaluator line, one line per derivative, then Q."""
    chain = f.chain
    lines = [
        f"{chain.dim} {chain.order} {chain.alpha} {f.beta} "
        f"domain={chain.domain.format_text()}"
    ]
    ev = chain.evaluator
    if isinstance(ev, ClosedForm):
        lines.append(f"builtin={ev.tag}")
    else:
        lines.append(
            "anchor=" + ",".join(repr(v) for v in ev.anchor)
            + " values=" + ",".join(repr(v) for v in ev.values)
        )
    for row in chain.derivs:
        for poly in row:
            lines.append(_poly_text(poly))
    lines.append(_poly_text(f.q_poly))
    return "\n".join(lines) + "\n"


def _rebuild_builtin(tag):
    """Reconstruct a builtin chain evaluator from its tag."""
    head, *pairs = tag.split()
    kw = {}
    for pair in pairs:
        key, val = pair.split("=")
        if key in ("axis", "dim", "depth", "period"):
            kw[key] = int(val)
        elif key == "exponents":
            kw[key] = tuple(float(v) for v in val.split(","))
        else:
            kw[key] = float(val)
    return builtin_chain(head, **kw)


def parse_function(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    d, r, alpha, _beta = int(head[0]), int(head[1]), int(head[2]), int(head[3])
    domain = Box.parse_text(lines[0].split("domain=", 1)[1])
    nv = d + r
    ev_line = lines[1]
    body = lines[2:]
    derivs = []
    idx = 0
    for _ in range(r):
        row = []
        for _ in range(d):
            row.append(_parse_poly(body[idx], nv))
            idx += 1
        derivs.append(tuple(row))
    q_poly = _parse_poly(body[idx], nv)

    if ev_line.startswith("builtin="):
        rebuilt = _rebuild_builtin(ev_line[len("builtin="):])
        evaluator = rebuilt.evaluator
    elif ev_line.startswith("anchor="):
        part = ev_line[len("anchor="):]
        anchor_text, values_text = part.split(" values=")
        evaluator = OdeAnchor(
            tuple(float(v) for v in anchor_text.split(",")),
            tuple(float(v) for v in values_text.split(",")),
        )
    else:
        raise ValueError("missing evaluator line")

    chain = PfaffianChain(
        dim=d, order=r, alpha=alpha, derivs=tuple(derivs),
        domain=domain, evaluator=evaluator,
    )
    return PfaffianFunction(chain=chain, q_poly=q_poly)
