"""Truncated Laurent series in the local parameter at infinity.

A :class:`LaurentSeries` stores the coefficients of ``t^v, t^{v+1}, ...`` up
to (but excluding) the absolute precision ``t^prec``; everything beyond is
unknown.  Coefficients are either ``Fraction`` (exact tier) or ``complex``;
the arithmetic is the same code for both.

The expansion of a curve at its point at infinity uses the substitution
``x = t^{-r} W^{i_s}``, ``y = t^{-s} W^{i_r}`` which satisfies
``x^{i_r} / y^{i_s} = t`` identically, so only the single unit series
``W = 1 + O(t)`` has to be found.  It solves

    W = 1 + sum_{(i, j) != (r, s)} lam[i, j] t^{i s - j r} W^{j i_s - i i_r}

and each coefficient of ``W`` is computed from strictly earlier ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

from .errors import LogTermError, OrderUnderflow


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True)
class LaurentSeries:
    """``sum_k coeffs[k] t^{valuation + k} + O(t^{valuation + len(coeffs)})``."""

    valuation: int
    coeffs: tuple

    # ---- construction
    @classmethod
    def make(cls, valuation: int, coeffs: Sequence) -> "LaurentSeries":
        """Normalize so that the leading stored coefficient is nonzero."""
        coeffs = list(coeffs)
        k = 0
        while k < len(coeffs) and _is_zero(coeffs[k]):
            k += 1
        return cls(valuation + k, tuple(coeffs[k:]))

    @classmethod
    def monomial(cls, degree: int, prec: int, c=Fraction(1)) -> "LaurentSeries":
        if prec <= degree:
            return cls(prec, ())
        return cls.make(degree, [c] + [c * 0] * (prec - degree - 1))

    @classmethod
    def constant(cls, c, prec: int) -> "LaurentSeries":
        return cls.monomial(0, prec, c)

    @property
    def prec(self) -> int:
        return self.valuation + len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        """Zero to the known precision."""
        return not self.coeffs

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, degree: int):
        """Coefficient of ``t^degree``; raises if beyond the known precision."""
        if degree >= self.prec:
            raise OrderUnderflow(f"coefficient of t^{degree} is beyond precision t^{self.prec}")
        if degree < self.valuation:
            return self._zero
        return self.coeffs[degree - self.valuation]

    @property
    def _zero(self):
        return self.coeffs[0] * 0 if self.coeffs else Fraction(0)

    def leading(self):
        if not self.coeffs:
            raise OrderUnderflow("series is zero to known precision")
        return self.coeffs[0]

    def truncate(self, prec: int) -> "LaurentSeries":
        if prec >= self.prec:
            return self
        if prec <= self.valuation:
            return LaurentSeries(prec, ())
        return LaurentSeries(self.valuation, self.coeffs[: prec - self.valuation])

    def map(self, fn: Callable) -> "LaurentSeries":
        return LaurentSeries.make(self.valuation, [fn(c) for c in self.coeffs])

    def to_complex(self) -> "LaurentSeries":
        return LaurentSeries(self.valuation, tuple(complex(c) for c in self.coeffs))

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by ``t^k``."""
        return LaurentSeries(self.valuation + k, self.coeffs)

    def scale_variable(self, u) -> "LaurentSeries":
        """``a(u t)``."""
        return LaurentSeries.make(self.valuation, [c * u ** (self.valuation + k) for k, c in enumerate(self.coeffs)])

    # ---- arithmetic
    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return other
        return LaurentSeries.constant(other, max(self.prec, 1))

    def __add__(self, other):
        other = self._coerce(other)
        v = min(self.valuation, other.valuation)
        p = min(self.prec, other.prec)
        if p <= v:
            return LaurentSeries(p, ())
        return LaurentSeries.make(v, [self[k] + other[k] if k >= v else 0 for k in range(v, p)])

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.valuation, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return LaurentSeries.make(self.valuation, [c * other for c in self.coeffs]) if other != 0 else LaurentSeries(self.prec, ())
        a, b = self, other
        v = a.valuation + b.valuation
        p = min(a.prec + b.valuation, b.prec + a.valuation)
        n = p - v
        if n <= 0:
            return LaurentSeries(p, ())
        ac, bc = a.coeffs, b.coeffs
        out = []
        for k in range(n):
            acc = 0
            for i in range(max(0, k - len(bc) + 1), min(k, len(ac) - 1) + 1):
                acc += ac[i] * bc[k - i]
            out.append(acc)
        return LaurentSeries.make(v, out)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        if not self.coeffs:
            raise OrderUnderflow("cannot invert a series that is zero to known precision")
        a = self.coeffs
        n = len(a)
        inv0 = 1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])
        out = [inv0]
        for k in range(1, n):
            acc = 0
            for i in range(1, k + 1):
                acc += a[i] * out[k - i]
            out.append(-acc * inv0)
        return LaurentSeries(-self.valuation, tuple(out))

    def __truediv__(self, other):
        if not isinstance(other, LaurentSeries):
            return self * (1 / Fraction(other) if isinstance(other, int) else 1 / other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponents only; use unit_power for rational ones")
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return LaurentSeries.constant(self.coeffs[0] * 0 + 1 if self.coeffs else Fraction(1), len(self.coeffs))
        unit = LaurentSeries(0, self.coeffs).unit_power(n)
        return unit.shift(self.valuation * n)

    def unit_power(self, alpha) -> "LaurentSeries":
        """``a^alpha`` for ``a = a_0 (1 + O(t))`` with valuation 0 (Miller recurrence).

        For non-integer ``alpha`` the branch with ``a_0^alpha`` principal is used;
        exact coefficients require ``a_0 = 1`` in that case.
        """
        if self.valuation != 0:
            raise OrderUnderflow("unit_power needs valuation 0")
        a = self.coeffs
        n = len(a)
        a0 = a[0]
        # Fraction(1) ** Fraction(1, 2) is a float; keep unit leading terms exact
        p0 = a0 * 0 + 1 if a0 == 1 else a0**alpha
        out = [p0]
        inv = 1 / a0 if not isinstance(a0, int) else Fraction(1, a0)
        for k in range(1, n):
            acc = 0
            for j in range(1, k + 1):
                acc += ((alpha + 1) * j - k) * a[j] * out[k - j]
            out.append(acc * inv / k)
        return LaurentSeries(0, tuple(out))

    # ---- calculus
    def derivative(self) -> "LaurentSeries":
        return LaurentSeries.make(self.valuation - 1, [(self.valuation + k) * c for k, c in enumerate(self.coeffs)])

    def integral(self) -> "LaurentSeries":
        """Antiderivative with zero constant term; a ``t^{-1}`` term raises LogTermError."""
        out = []
        for k, c in enumerate(self.coeffs):
            d = self.valuation + k
            if d == -1:
                if not _is_zero(c):
                    raise LogTermError("nonzero residue: antiderivative has a logarithm", residue=c)
                out.append(c * 0)
            else:
                out.append(c / (d + 1) if not isinstance(c, int) else Fraction(c, d + 1))
        return LaurentSeries.make(self.valuation + 1, out)

    def residue(self):
        """Coefficient of ``t^{-1}``."""
        return self[-1]

    def compose(self, b: "LaurentSeries") -> "LaurentSeries":
        """``a(b(t))`` for ``b`` of positive valuation."""
        if b.valuation < 1:
            raise OrderUnderflow("inner series must have positive valuation")
        bv = b.valuation
        bunit = b.shift(-bv)
        out = LaurentSeries(self.prec * bv, ())
        for k, c in enumerate(self.coeffs):
            if not _is_zero(c):
                out = out + (bunit**(self.valuation + k)).shift(bv * (self.valuation + k)) * c
        return out.truncate(self.prec * bv)

    def evaluate(self, t):
        """Numeric value of the truncated sum (numbers or numpy arrays)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + complex(c)
        return acc * t**self.valuation

    # ---- output
    def to_dict(self) -> dict:
        return {str(self.valuation + k): _fmt(c) for k, c in enumerate(self.coeffs)} | {"prec": str(self.prec)}

    def __repr__(self) -> str:
        terms = [f"({c})*t^{self.valuation + k}" for k, c in enumerate(self.coeffs) if not _is_zero(c)]
        return " + ".join(terms[:8]) + (" + ..." if len(terms) > 8 else "") + f" + O(t^{self.prec})"


def _fmt(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
    c = complex(c)
    return {"re": f"{c.real:.17g}", "im": f"{c.imag:.17g}"}


# --------------------------------------------------------------------------
# expansion at infinity


@dataclass(frozen=True)
class InfinityExpansion:
    """``x(t)``, ``y(t)`` and the unit ``W`` with ``x = t^{-r} W^{i_s}``, ``y = t^{-s} W^{i_r}``."""

    x: LaurentSeries
    y: LaurentSeries
    W: LaurentSeries
    order: int


def _unit_series(curve, order: int, field: Callable) -> LaurentSeries:
    r, s = curve.r, curve.s
    i_s, i_r = curve.bezout
    terms = []
    for (i, j), lam in curve.lam.items():
        if (i, j) == (r, s):
            continue
        terms.append((i * s - j * r, j * i_s - i * i_r, field(lam)))
    one = field(Fraction(1))
    zero = one * 0
    W = [one]
    powers: dict[int, list] = {m: [one] for _, m, _ in terms}
    for n in range(1, order):
        wn = zero
        for e, m, lam in terms:
            if n - e >= 0:
                wn += lam * powers[m][n - e]
        W.append(wn)
        # extend each W^m to index n (Miller, W_0 = 1)
        for m, P in powers.items():
            acc = zero
            for j in range(1, n + 1):
                acc += ((m + 1) * j - n) * W[j] * P[n - j]
            P.append(acc / n)
    return LaurentSeries(0, tuple(W))


def expand_at_infinity(curve, order: int | None = None, exact: bool = True) -> InfinityExpansion:
    """Expansion of the affine coordinates in the arithmetic local parameter.

    Parameters
    ----------
    curve : WCurve
    order : int, optional
        Number of coefficients of ``x`` and ``y`` (relative precision).  The
        default is ``4 g + 2 d_h + 16``.
    exact : bool
        ``Fraction`` coefficients if true, else ``complex``.

    Returns
    -------
    InfinityExpansion
        With ``f(x(t), y(t)) = O(t^{order - r s})``.

    Examples
    --------
    >>> from wsigma.curve import WCurve
    >>> E = expand_at_infinity(WCurve(2, 3, {(2, 1): 1}), 8)
    >>> [str(E.x[k]) for k in (-2, 0, 2)]
    ['1', '0', '1']
    """
    if order is None:
        order = default_order(curve)
    key = (order, exact)
    cache = curve.__dict__.setdefault("_expansions", {})
    if key in cache:
        return cache[key]
    field = (lambda c: c) if exact else (lambda c: complex(c))
    W = _unit_series(curve, order, field)
    i_s, i_r = curve.bezout
    x = W.unit_power(i_s).shift(-curve.r)
    y = W.unit_power(i_r).shift(-curve.s)
    res = InfinityExpansion(x, y, W, order)
    cache[key] = res
    return res


def default_order(curve) -> int:
    return 4 * curve.genus + 2 * curve.d_h + 16


def phi_infinity(curve, element: dict, order: int | None = None, exact: bool = True) -> LaurentSeries:
    """Image of a polynomial ``{(a, b): c}`` in ``x, y`` as a series in ``t``."""
    E = expand_at_infinity(curve, order, exact)
    return poly_series(element, E, exact)


def poly_series(element: dict, E: InfinityExpansion, exact: bool = True, cache: dict | None = None) -> LaurentSeries:
    """Substitute the expansion into ``{(a, b): c}`` (powers memoized in ``cache``)."""
    cache = {} if cache is None else cache

    def power(series_name: str, base: LaurentSeries, k: int) -> LaurentSeries:
        key = (series_name, k)
        if key not in cache:
            cache[key] = base**k if k else LaurentSeries.constant(base.coeffs[0] * 0 + 1, len(base.coeffs))
        return cache[key]

    total = None
    for (a, b), c in sorted(element.items()):
        c = c if exact else complex(c)
        term = power("x", E.x, a) * power("y", E.y, b) * c
        total = term if total is None else total + term
    if total is None:
        return LaurentSeries(E.order, ())
    return total
