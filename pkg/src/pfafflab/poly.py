"""Sparse multivariate polynomials.

Coefficients built from integers or fractions stay exact `Fraction`s;
anything else collapses to float, and mixed arithmetic promotes to float.
Exponent vectors are dense tuples of length `nvars`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["Polynomial", "as_coeff"]


def as_coeff(value):
    """Normalize a scalar: exact rationals become Fraction, the rest float."""
    if isinstance(value, Rational):
        return Fraction(value)
    return float(value)


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars, terms=()):
        self.nvars = int(nvars)
        acc = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise ValueError(
                    f"exponent vector {exps} has length {len(exps)}, expected {self.nvars}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = as_coeff(coeff)
            if exps in acc:
                acc[exps] = acc[exps] + coeff
            else:
                acc[exps] = coeff
        self._terms = {e: c for e, c in acc.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, [((0,) * nvars, value)])

    @classmethod
    def variable(cls, nvars, index, power=1, coeff=1):
        exps = [0] * nvars
        exps[index] = power
        return cls(nvars, [(tuple(exps), coeff)])

    # -- inspection --------------------------------------------------------

    @property
    def terms(self):
        """Terms as a sorted list of (exponent tuple, coefficient)."""
        return sorted(self._terms.items())

    @property
    def degree(self):
        """Max total degree; 0 for the zero polynomial."""
        if not self._terms:
            return 0
        return max(sum(e) for e in self._terms)

    def is_zero(self):
        return not self._terms

    def coefficient(self, exps):
        return self._terms.get(tuple(exps), 0)

    def max_var_used(self):
        """Largest variable index with a nonzero exponent, or -1."""
        top = -1
        for exps in self._terms:
            for i in range(self.nvars - 1, top, -1):
                if exps[i] > 0:
                    top = i
                    break
        return top

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable counts differ")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            terms[exps] = terms.get(exps, 0) + coeff
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                terms[exps] = terms.get(exps, 0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    # -- calculus / evaluation ---------------------------------------------

    def diff(self, index):
        """Partial derivative with respect to variable ``index``."""
        terms = {}
        for exps, coeff in self._terms.items():
            k = exps[index]
            if k == 0:
                continue
            lowered = list(exps)
            lowered[index] = k - 1
            lowered = tuple(lowered)
            terms[lowered] = terms.get(lowered, 0) + coeff * k
        return Polynomial(self.nvars, terms)

    def eval(self, values):
        """Evaluate at a sequence of ``nvars`` scalars."""
        values = tuple(values)
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(values)}")
        total = 0
        for exps, coeff in self._terms.items():
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def remap(self, new_nvars, index_map):
        """Reindex variables: old index i becomes ``index_map[i]``."""
        terms = {}
        for exps, coeff in self._terms.items():
            new = [0] * new_nvars
            for i, e in enumerate(exps):
                if e:
                    new[index_map[i]] += e
            terms[tuple(new)] = terms.get(tuple(new), 0) + coeff
        return Polynomial(new_nvars, terms)

    def __repr__(self):
        if not self._terms:
            return "Polynomial(0)"
        bits = []
        for exps, coeff in self.terms:
            mono = "*".join(f"x{i}^{e}" for i, e in enumerate(exps) if e)
            bits.append(f"{coeff}" + (f"*{mono}" if mono else ""))
        return "Polynomial(" + " + ".join(bits) + ")"
