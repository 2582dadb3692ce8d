"""Schur functions of Young diagrams in several variable systems.

Three incarnations of the same symmetric function are used:

* ``s_Lambda(v_1..v_n)``, a symmetric polynomial in ``n`` variables
  (:func:`schur_polynomial`);
* ``S_Lambda(T)``, the same function written in the scaled power sums
  ``T_k = (1/k) sum_i v_i^k`` (:func:`schur_in_T`);
* ``S_Lambda(u)``, obtained from ``S_Lambda(T)`` by renaming
  ``T_{Lambda_i + g - i} -> u_i`` (:func:`schur_in_u`).  For diagrams of
  numerical semigroups every hook length is a gap, so ``S_Lambda(T)`` only
  involves the ``g`` variables ``T_gap`` and the renaming is lossless.

All arithmetic is exact (``fractions.Fraction``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import IdentityFailure, IndexOutOfRange, SubstitutionCollision, TooFewVariables
from .semigroup import YoungDiagram, natural_index, semigroup_of_diagram, truncate_diagram

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class WeightedPolynomial:
    """Sparse polynomial with exact rational coefficients.

    ``weights[i]`` is the grading of variable ``i``; the package uses the
    positive convention ``weights[i] = Lambda_i + g - i`` (the negative of the
    curve weight of ``u_i``), so homogeneous pieces have nonnegative degree.
    """

    nvars: int
    terms: Mapping[Exponent, Fraction] = field(default_factory=dict)
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            c = Fraction(c)
            if c:
                if len(e) != self.nvars:
                    raise ValueError("exponent length does not match nvars")
                clean[tuple(e)] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: (self._wdeg(kv[0]), kv[0]))))

    def _wdeg(self, e: Exponent) -> int:
        w = self.weights or (1,) * self.nvars
        return sum(a * b for a, b in zip(e, w))

    # construction helpers
    @classmethod
    def constant(cls, nvars: int, c=1, weights=None) -> "WeightedPolynomial":
        return cls(nvars, {(0,) * nvars: Fraction(c)}, weights)

    @classmethod
    def variable(cls, nvars: int, i: int, weights=None) -> "WeightedPolynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)}, weights)

    def with_weights(self, weights: Sequence[int]) -> "WeightedPolynomial":
        return WeightedPolynomial(self.nvars, self.terms, tuple(weights))

    # arithmetic
    def _coerce(self, other) -> "WeightedPolynomial":
        if isinstance(other, WeightedPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        return WeightedPolynomial.constant(self.nvars, other, self.weights)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return WeightedPolynomial(self.nvars, out, self.weights or other.weights)

    __radd__ = __add__

    def __neg__(self):
        return WeightedPolynomial(self.nvars, {e: -c for e, c in self.terms.items()}, self.weights)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, WeightedPolynomial):
            c = Fraction(other)
            return WeightedPolynomial(self.nvars, {e: c * v for e, v in self.terms.items()}, self.weights)
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return WeightedPolynomial(self.nvars, out, self.weights or other.weights)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = WeightedPolynomial.constant(self.nvars, 1, self.weights)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, WeightedPolynomial):
            other = WeightedPolynomial.constant(self.nvars, other)
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, i: int) -> "WeightedPolynomial":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return WeightedPolynomial(self.nvars, out, self.weights)

    def evaluate(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, a in zip(point, e):
                if a:
                    term = term * x**a
            total = total + term
        return total

    def substitute(self, images: Sequence["WeightedPolynomial"]) -> "WeightedPolynomial":
        """Compose with ``var_i -> images[i]`` (all images in one common ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        ring = images[0].nvars if images else 0
        total = WeightedPolynomial(ring, {}, images[0].weights if images else None)
        cache: dict[tuple[int, int], WeightedPolynomial] = {}
        for e, c in self.terms.items():
            term = WeightedPolynomial.constant(ring, c, total.weights)
            for i, a in enumerate(e):
                if a:
                    if (i, a) not in cache:
                        cache[(i, a)] = images[i] ** a
                    term = term * cache[(i, a)]
            total = total + term
        return total

    def drop_variables(self, keep: Sequence[int], weights=None) -> "WeightedPolynomial":
        """Restrict to the variables ``keep``; raises if a dropped variable occurs."""
        keepset = set(keep)
        out = {}
        for e, c in self.terms.items():
            if any(a and i not in keepset for i, a in enumerate(e)):
                raise SubstitutionCollision(f"monomial {e} involves a dropped variable")
            out[tuple(e[i] for i in keep)] = c
        return WeightedPolynomial(len(keep), out, tuple(weights) if weights else None)

    def weighted_degrees(self) -> set[int]:
        return {self._wdeg(e) for e in self.terms}

    def homogeneous_part(self, degree: int) -> "WeightedPolynomial":
        return WeightedPolynomial(self.nvars, {e: c for e, c in self.terms.items() if self._wdeg(e) == degree}, self.weights)

    def to_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "weights": list(self.weights) if self.weights else None,
            "terms": [
                {"exponents": list(e), "numerator": str(c.numerator), "denominator": str(c.denominator)}
                for e, c in self.terms.items()
            ],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"u{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a)
            parts.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(parts)


# --------------------------------------------------------------------------
# determinants of polynomial matrices


def _determinant(matrix: Sequence[Sequence[WeightedPolynomial]], nvars: int) -> WeightedPolynomial:
    """Laplace expansion with memoization over used-column subsets (no division)."""
    m = len(matrix)
    if m == 0:
        return WeightedPolynomial.constant(nvars, 1)
    memo: dict[int, WeightedPolynomial] = {}

    def minor(mask: int) -> WeightedPolynomial:
        row = bin(mask).count("1")
        if row == m:
            return WeightedPolynomial.constant(nvars, 1)
        if mask in memo:
            return memo[mask]
        total = WeightedPolynomial(nvars)
        free_before = 0
        for c in range(m):
            if mask >> c & 1:
                continue
            entry = matrix[row][c]
            if entry.terms:
                term = entry * minor(mask | (1 << c))
                total = total + (term if free_before % 2 == 0 else -term)
            free_before += 1
        memo[mask] = total
        return total

    return minor(0)


def _jacobi_trudi(lam: YoungDiagram, seq: Sequence[WeightedPolynomial], nvars: int) -> WeightedPolynomial:
    """det(seq[lam_i - i + j]) with seq[k] = 0 for k < 0."""
    rows = lam.rows
    m = len(rows)
    zero = WeightedPolynomial(nvars)

    def entry(i, j):
        k = rows[i] - i + j
        return seq[k] if 0 <= k < len(seq) else zero

    return _determinant([[entry(i, j) for j in range(m)] for i in range(m)], nvars)


def complete_homogeneous(n: int, k: int) -> WeightedPolynomial:
    """h_k(v_1..v_n) as an explicit polynomial."""
    terms = {}

    def rec(i, left, acc):
        if i == n - 1:
            terms[tuple(acc + [left])] = Fraction(1)
            return
        for a in range(left, -1, -1):
            rec(i + 1, left - a, acc + [a])

    if n == 0:
        return WeightedPolynomial(0, {(): Fraction(1)} if k == 0 else {})
    rec(0, k, [])
    return WeightedPolynomial(n, terms)


def schur_polynomial(lam: YoungDiagram, n: int) -> WeightedPolynomial:
    """s_Lambda(v_1..v_n) through the Jacobi-Trudi determinant of complete homogeneous polynomials.

    Examples
    --------
    >>> s = schur_polynomial(YoungDiagram((2, 1)), 3)
    >>> s.terms[(1, 1, 1)]
    Fraction(2, 1)
    """
    if n < lam.length:
        raise TooFewVariables(f"diagram with {lam.length} rows needs at least {lam.length} variables")
    top = lam.rows[0] + lam.length if lam.rows else 1
    seq = [complete_homogeneous(n, k) for k in range(top)]
    return _jacobi_trudi(lam, seq, n)


def _fraction_det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for j in range(c, n):
                    m[r][j] -= f * m[c][j]
    return det


def schur_value(lam: YoungDiagram, point: Sequence) -> Fraction:
    """Exact value of s_Lambda at a rational point (Jacobi-Trudi on numbers)."""
    pt = [Fraction(v) for v in point]
    if len(pt) < lam.length:
        return Fraction(0)
    top = lam.rows[0] + lam.length if lam.rows else 1
    # h_k by the recurrence for prod_j 1/(1 - v_j z)
    h = [Fraction(1)] + [Fraction(0)] * top
    for v in pt:
        for k in range(1, top + 1):
            h[k] += v * h[k - 1]
    m = lam.length
    mat = [[h[lam.rows[i] - i + j] if lam.rows[i] - i + j >= 0 else Fraction(0) for j in range(m)] for i in range(m)]
    return _fraction_det(mat)


def _exp_series_in_T(size: int, sign_alternating: bool, keep: set[int] | None) -> list[WeightedPolynomial]:
    """Coefficients of exp(sum_k (+-)^{k-1} T_k z^k) up to z^size, polynomials in T_1..T_size.

    Uses the recurrence n c_n = sum_k k a_k c_{n-k} (Newton's identities for
    h_n resp. e_n in terms of power sums).
    """
    nv = size
    coeffs = [WeightedPolynomial.constant(nv, 1, tuple(range(1, nv + 1)))]
    weights = tuple(range(1, nv + 1))
    for n in range(1, size + 1):
        acc = WeightedPolynomial(nv, {}, weights)
        for k in range(1, n + 1):
            if keep is not None and k not in keep:
                continue
            sign = -1 if (sign_alternating and k % 2 == 0) else 1
            acc = acc + WeightedPolynomial.variable(nv, k - 1, weights) * coeffs[n - k] * (sign * k)
        coeffs.append(acc * Fraction(1, n))
    return coeffs


def schur_in_T(lam: YoungDiagram, keep: Iterable[int] | None = None) -> WeightedPolynomial:
    """S_Lambda written in the scaled power sums T_1..T_|Lambda|.

    With ``keep`` given, every ``T_k`` with ``k`` outside ``keep`` is set to
    zero before the determinant is expanded.  This is exact whenever no
    hook of ``Lambda`` has length ``k`` (the function does not depend on
    such ``T_k``), which holds for the non-gaps of a semigroup diagram.
    """
    size = max(lam.size, 1)
    keepset = set(keep) if keep is not None else None
    # the shorter of the two Jacobi-Trudi forms
    if lam.length <= len(lam.conjugate):
        seq = _exp_series_in_T(size, False, keepset)
        return _jacobi_trudi(lam, seq, size)
    seq = _exp_series_in_T(size, True, keepset)
    return _jacobi_trudi(YoungDiagram(lam.conjugate), seq, size)


def u_indices(lam: YoungDiagram) -> tuple[int, ...]:
    """Power-sum indices ``Lambda_i + g - i`` that become ``u_1..u_g``."""
    g = lam.length
    idx = tuple(lam.rows[i - 1] + g - i for i in range(1, g + 1))
    if len(set(idx)) != g:  # pragma: no cover - strictly decreasing by construction
        raise SubstitutionCollision(f"rows {lam.rows} give repeated indices {idx}")
    return idx


def schur_in_u(lam: YoungDiagram, full_check: bool = False) -> WeightedPolynomial:
    """S_Lambda(u) with ``u_i = T_{Lambda_i + g - i}``, graded by ``wt(u_i) = Lambda_i + g - i``.

    ``full_check`` expands in all power sums first and raises
    :class:`SubstitutionCollision` if a power sum other than the renamed
    ones survives (only sensible for small diagrams).

    Examples
    --------
    >>> print(schur_in_u(YoungDiagram((2, 1))))
    (1/3)*u2^3 + (-1)*u1
    """
    idx = u_indices(lam)
    ST = schur_in_T(lam, keep=None if full_check else idx)
    return ST.drop_variables([k - 1 for k in idx], weights=idx)


def power_sum_images(indices: Sequence[int], k: int) -> list[WeightedPolynomial]:
    """T_m(v_1..v_k) = (1/m) sum v_j^m for each m in ``indices``."""
    out = []
    for m in indices:
        terms = {}
        for j in range(k):
            e = [0] * k
            e[j] = m
            terms[tuple(e)] = Fraction(1, m)
        out.append(WeightedPolynomial(k, terms))
    return out


@dataclass(frozen=True)
class EpsilonReport:
    epsilon: int
    natural_index: tuple[int, ...]
    lhs: WeightedPolynomial | None  # None when certified by point evaluation
    rhs: WeightedPolynomial | None


def epsilon_sign(lam: YoungDiagram, k: int, symbolic: bool | None = None) -> EpsilonReport:
    """Sign relating the Schur function of the first ``k`` rows to derivatives of S_Lambda.

    Differentiates ``S_Lambda(u)`` along the natural index set of stratum ``k``,
    restricts ``u_i`` to the power sums ``T_{Lambda_i+g-i}`` of ``k`` variables
    and compares with ``s_{Lambda^(k)}`` in those ``k`` variables.

    The comparison is a full polynomial identity when ``symbolic`` (default
    for ``|Lambda| <= 12``); otherwise both sides are evaluated exactly at 16
    seeded random integer points, which certifies the identity up to the
    Schwartz-Zippel bound ``(|Lambda| / 10**6) ** 16``.
    """
    H = semigroup_of_diagram(lam)
    g = H.genus
    if not 0 <= k < g:
        raise IndexOutOfRange(f"k={k} outside 0..{g - 1}")
    if symbolic is None:
        symbolic = lam.size <= 12
    nat = natural_index(H, k)
    S = schur_in_u(lam)
    for i in nat:
        S = S.diff(i - 1)
    upper = truncate_diagram(H, k).upper
    if k == 0:
        lhs = WeightedPolynomial.constant(0, 1)
        rhs = WeightedPolynomial.constant(0, S.evaluate([0] * g))
    elif symbolic:
        lhs = schur_polynomial(upper, k)
        rhs = S.substitute(power_sum_images(u_indices(lam), k))
    else:
        rng = random.Random(1729 + k)
        pts = [[rng.randint(1, 10**6) for _ in range(k)] for _ in range(16)]
        lvals = [schur_value(upper, p) for p in pts]
        rvals = []
        for p in pts:
            T = [sum(Fraction(v) ** m for v in p) / m for m in u_indices(lam)]
            rvals.append(S.evaluate(T))
        if any(v == 0 for v in lvals):
            raise IdentityFailure("sample point hit a zero of the truncated Schur polynomial")
        ratios = {r / l for r, l in zip(rvals, lvals)}
        if len(ratios) != 1 or next(iter(ratios)) not in (1, -1):
            raise IdentityFailure(f"truncation identity fails (ratios {sorted(ratios)[:3]})", k=k, rows=lam.rows)
        eps = int(next(iter(ratios)))
        return EpsilonReport(eps, nat, None, None)
    if lhs.is_zero() or rhs.is_zero():
        raise IdentityFailure("a side of the truncation identity vanishes")
    e0 = next(iter(lhs.terms))
    ratio = rhs.terms.get(e0, Fraction(0)) / lhs.terms[e0]
    if ratio not in (1, -1) or rhs != lhs * ratio:
        raise IdentityFailure(f"truncation identity fails (ratio {ratio})", k=k, rows=lam.rows)
    return EpsilonReport(int(ratio), nat, lhs, rhs)


def partition_count_check(lam: YoungDiagram) -> int:
    """Number of standard tableaux from S_Lambda(T): coefficient of T_1^n times n!."""
    ST = schur_in_T(lam)
    e = (lam.size,) + (0,) * (max(lam.size, 1) - 1)
    return int(ST.terms.get(e, 0) * factorial(lam.size))
