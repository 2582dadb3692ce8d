"""Plane curves in Weierstrass canonical form.

A curve of type ``(r, s)`` (coprime, ``2 <= r < s``) is

    f(x, y) = y^r + A_1(x) y^{r-1} + ... + A_r(x),   A_i(x) = sum_j lam[i, j] x^j,

with ``deg A_i <= floor(i s / r)`` and ``lam[r, s] = -1``.  Weights are
``wt(x) = -r`` and ``wt(y) = -s``; the local parameter at the unique point at
infinity is ``t = x^{i_r} / y^{i_s}`` with ``i_s s - i_r r = 1``.

Polynomials in ``(x, y)`` are stored as dictionaries ``{(a, b): coeff}``
meaning ``sum coeff x^a y^b``; exact coefficients are ``Fraction``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Callable, Iterable, Mapping

import numpy as np
import sympy as sp

from .errors import (
    ConfigError,
    DegreeBoundViolated,
    NotCoprime,
    PointNotOnCurve,
    RHViolation,
    RootFindingFailure,
    SingularAffineModel,
    UnsupportedCurveClass,
)
from .semigroup import NumericalSemigroup, bezout_pair, build_semigroup, standard_basis

Poly2 = dict  # {(a, b): coefficient}

X_SYM, Y_SYM = sp.symbols("x y")


# --------------------------------------------------------------------------
# bivariate polynomial helpers


def padd(p: Poly2, q: Poly2, c=1) -> Poly2:
    out = dict(p)
    for e, v in q.items():
        out[e] = out.get(e, 0) + c * v
    return {e: v for e, v in out.items() if v != 0}


def pmul(p: Poly2, q: Poly2) -> Poly2:
    out: Poly2 = {}
    for (a1, b1), c1 in p.items():
        for (a2, b2), c2 in q.items():
            e = (a1 + a2, b1 + b2)
            out[e] = out.get(e, 0) + c1 * c2
    return {e: v for e, v in out.items() if v != 0}


def pscale(p: Poly2, c) -> Poly2:
    return {e: c * v for e, v in p.items() if c * v != 0}


def pdiff(p: Poly2, var: int) -> Poly2:
    out = {}
    for (a, b), c in p.items():
        k = (a, b)[var]
        if k:
            out[(a - 1, b) if var == 0 else (a, b - 1)] = c * k
    return out


def peval(p: Poly2, x, y):
    """Evaluate at numbers or numpy arrays (Horner in x for each power of y)."""
    x = np.asarray(x) if not isinstance(x, (int, float, complex, Fraction)) else x
    total = 0
    by_b: dict[int, dict[int, object]] = {}
    for (a, b), c in p.items():
        by_b.setdefault(b, {})[a] = c
    for b, col in by_b.items():
        deg = max(col)
        acc = 0
        for a in range(deg, -1, -1):
            acc = acc * x + (complex(col[a]) if a in col and not isinstance(x, Fraction) else col.get(a, 0))
        total = total + acc * (y**b if b else 1)
    return total


def to_sympy(p: Poly2, x=X_SYM, y=Y_SYM) -> sp.Expr:
    return sum((sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.nsimplify(c)) * x**a * y**b for (a, b), c in p.items())


def from_sympy(expr, x=X_SYM, y=Y_SYM) -> Poly2:
    poly = sp.Poly(sp.expand(expr), x, y)
    return {m: Fraction(int(sp.Rational(c).p), int(sp.Rational(c).q)) for m, c in poly.terms() if c != 0}


def compile_poly(p: Poly2) -> Callable:
    """Vectorized evaluator for a polynomial in (x, y)."""
    if not p:
        return lambda x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=complex) if np.ndim(x) or np.ndim(y) else 0j
    by_b: dict[int, np.ndarray] = {}
    for (a, b), c in p.items():
        arr = by_b.get(b)
        if arr is None or len(arr) <= a:
            new = np.zeros(a + 1 if arr is None else max(a + 1, len(arr)), dtype=complex)
            if arr is not None:
                new[: len(arr)] = arr
            arr = new
        arr[a] += complex(c)
        by_b[b] = arr
    items = [(b, arr[::-1].copy()) for b, arr in sorted(by_b.items())]

    def ev(x, y):
        tot = 0
        for b, coeffs in items:
            val = np.polyval(coeffs, x)
            tot = tot + (val * y**b if b else val)
        return tot

    return ev


# --------------------------------------------------------------------------
# the curve


@dataclass(frozen=True)
class MonomialBasis:
    monomials: tuple[tuple[int, int], ...]  # (a, b) for x^a y^b
    pole_orders: tuple[int, ...]  # -wt = a r + b s

    def to_dict(self) -> dict:
        return {"monomials": [list(m) for m in self.monomials], "pole_orders": list(self.pole_orders)}


@dataclass(frozen=True)
class BranchData:
    branch_x: tuple[complex, ...]
    ramification: tuple[tuple[int, ...], ...]  # indices of the points over each branch value
    infinity_index: int
    riemann_hurwitz_lhs: int
    riemann_hurwitz_rhs: int

    def to_dict(self) -> dict:
        return {
            "branch_x": [[repr(b.real), repr(b.imag)] for b in self.branch_x],
            "ramification": [list(e) for e in self.ramification],
            "infinity_index": self.infinity_index,
            "riemann_hurwitz": [self.riemann_hurwitz_lhs, self.riemann_hurwitz_rhs],
        }


class WCurve:
    """Weierstrass canonical curve of type ``(r, s)`` with exact rational coefficients.

    Parameters
    ----------
    r, s : int
        Coprime with ``2 <= r < s``.
    coefficients : mapping ``(i, j) -> rational``
        ``lam[i, j]``, the coefficient of ``x^j`` in ``A_i``.  ``lam[r, s]`` is
        forced to ``-1``.
    """

    def __init__(self, r: int, s: int, coefficients: Mapping[tuple[int, int], object] | None = None, name: str = ""):
        if not (2 <= r < s) or gcd(r, s) != 1:
            raise NotCoprime(f"(r, s) = ({r}, {s}) must be coprime with 2 <= r < s")
        self.r, self.s = int(r), int(s)
        self.name = name
        lam: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in (coefficients or {}).items():
            i, j, c = int(i), int(j), Fraction(c)
            if not 1 <= i <= r or j < 0:
                raise DegreeBoundViolated(f"lambda[{i},{j}] is outside 1 <= i <= {r}, j >= 0")
            if j > (i * s) // r:
                raise DegreeBoundViolated(f"deg A_{i} <= {(i * s) // r}, got x^{j}", i=i, j=j)
            if (i, j) == (r, s):
                if c != -1:
                    raise DegreeBoundViolated("lambda[r, s] is fixed to -1")
                continue
            if c:
                lam[(i, j)] = c
        lam[(r, s)] = Fraction(-1)
        self.lam = dict(sorted(lam.items()))

    # ---- basic data
    def __repr__(self) -> str:
        return f"WCurve(r={self.r}, s={self.s}, f={self.f_expr})"

    @cached_property
    def semigroup(self) -> NumericalSemigroup:
        return build_semigroup([self.r, self.s])

    @property
    def genus(self) -> int:
        return (self.r - 1) * (self.s - 1) // 2

    @property
    def d_h(self) -> int:
        return (self.r - 1) * self.s

    @cached_property
    def bezout(self) -> tuple[int, int]:
        return bezout_pair(self.r, self.s)

    def A(self, i: int) -> list[Fraction]:
        """Coefficients of ``A_i`` in increasing powers of ``x`` (``A_0 = 1``)."""
        if i == 0:
            return [Fraction(1)]
        deg = (i * self.s) // self.r
        return [self.lam.get((i, j), Fraction(0)) for j in range(deg + 1)]

    @cached_property
    def f(self) -> Poly2:
        p: Poly2 = {(0, self.r): Fraction(1)}
        for (i, j), c in self.lam.items():
            p[(j, self.r - i)] = p.get((j, self.r - i), 0) + c
        return p

    @cached_property
    def f_expr(self) -> sp.Expr:
        return to_sympy(self.f)

    @cached_property
    def f_x(self) -> Poly2:
        return pdiff(self.f, 0)

    @cached_property
    def f_y(self) -> Poly2:
        return pdiff(self.f, 1)

    def weight(self, a: int, b: int) -> int:
        """Sato-Weierstrass weight of ``x^a y^b``."""
        return -(a * self.r + b * self.s)

    def weight_lambda(self, i: int, j: int) -> int:
        """Weight of the coefficient ``lam[i, j]`` making ``f`` homogeneous of weight ``-r s``."""
        return -(i * self.s - j * self.r)

    def is_weight_homogeneous(self) -> bool:
        # term lam[i,j] x^j y^{r-i}: weight_lambda + weight(x^j y^{r-i}) = -rs
        return all(self.weight_lambda(i, j) + self.weight(j, self.r - i) == -self.r * self.s for (i, j) in self.lam)

    @property
    def is_monomial(self) -> bool:
        return list(self.lam) == [(self.r, self.s)]

    @property
    def is_cyclic(self) -> bool:
        """``y^r = F(x)`` after completing the r-th power (always true for r = 2)."""
        return self.r == 2 or all(i == self.r for (i, _) in self.lam)

    def monomial_limit(self) -> "WCurve":
        return WCurve(self.r, self.s, {}, name=f"monomial({self.r},{self.s})")

    def with_coefficients(self, coefficients) -> "WCurve":
        return WCurve(self.r, self.s, coefficients, name=self.name)

    # ---- algebra in R_X = Q[x, y] / (f)
    def reduce(self, p: Poly2) -> Poly2:
        """Normal form with ``y``-degree < r (``f`` is monic in ``y``)."""
        p = {e: v for e, v in p.items() if v != 0}
        r = self.r
        while True:
            top = max((b for (_, b) in p), default=0)
            if top < r:
                return p
            # replace x^a y^b (b >= r) by -sum_i A_i x^a y^{b-i}
            hi = {e: v for e, v in p.items() if e[1] == top}
            for e in hi:
                del p[e]
            for (a, b), v in hi.items():
                for (i, j), c in self.lam.items():
                    e = (a + j, b - i)
                    p[e] = p.get(e, 0) - v * c
            p = {e: v for e, v in p.items() if v != 0}

    def phi_basis(self, n: int) -> MonomialBasis:
        """The first ``n + 1`` monomials ``x^a y^b`` (``b < r``) by increasing pole order."""
        r, s = self.r, self.s
        items = []
        bound = (n + 1) * r + self.d_h + r
        for b in range(r):
            for a in range(0, bound // r + 2):
                items.append((a * r + b * s, (a, b)))
        items.sort()
        items = items[: n + 1]
        return MonomialBasis(tuple(m for _, m in items), tuple(o for o, _ in items))

    def phi_index(self, a: int, b: int) -> int:
        """Position of ``x^a y^b`` in the phi basis."""
        order = a * self.r + b * self.s
        return self.semigroup.elements_up_to(order).index(order)

    def module_constants(self) -> dict[tuple[int, int, int], list[Fraction]]:
        """``y^i y^j = sum_k a_{ijk}(x) y^k`` in ``R_X``, coefficients listed by powers of x."""
        self.require_smooth()
        out = {}
        r = self.r
        for i in range(r):
            for j in range(r):
                red = self.reduce({(0, i + j): Fraction(1)})
                for k in range(r):
                    col = {a: v for (a, b), v in red.items() if b == k}
                    deg = max(col, default=-1)
                    out[(i, j, k)] = [col.get(a, Fraction(0)) for a in range(deg + 1)]
        return out

    # ---- smoothness and numerics
    @cached_property
    def is_smooth(self) -> bool:
        x, y = X_SYM, Y_SYM
        f = self.f_expr
        G = sp.groebner([f, sp.diff(f, x), sp.diff(f, y)], y, x, order="lex", domain=sp.QQ)
        return list(G.exprs) == [1]

    def require_smooth(self) -> None:
        if not self.is_smooth:
            raise SingularAffineModel(f"affine model of {self} is singular")

    def require_cyclic(self) -> None:
        if not self.is_cyclic:
            raise UnsupportedCurveClass("analytic continuation needs y^r = F(x) or r = 2")

    @cached_property
    def numeric_A(self) -> list[np.ndarray]:
        """``A_i`` coefficient arrays in numpy.polyval order (highest power first)."""
        return [np.array([complex(c) for c in reversed(self.A(i))]) for i in range(self.r + 1)]

    def y_polynomial(self, x: complex) -> np.ndarray:
        return np.array([np.polyval(self.numeric_A[i], x) for i in range(self.r + 1)])

    def y_roots(self, x: complex) -> np.ndarray:
        return np.roots(self.y_polynomial(x))

    @cached_property
    def eval_f(self) -> Callable:
        return compile_poly(self.f)

    @cached_property
    def eval_fx(self) -> Callable:
        return compile_poly(self.f_x)

    @cached_property
    def eval_fy(self) -> Callable:
        return compile_poly(self.f_y)

    def check_point(self, x: complex, y: complex, tol: float = 1e-8) -> None:
        scale = 1 + abs(y) ** self.r + abs(x) ** self.s
        if abs(self.eval_f(x, y)) > tol * scale:
            raise PointNotOnCurve(f"({x}, {y}) is not on the curve", residual=abs(self.eval_f(x, y)))

    @cached_property
    def cyclic_model(self) -> tuple[list[Fraction], list[Fraction]]:
        """``(F, shift)`` with ``(y - shift(x))^r = F(x)``; coefficient lists by powers of x.

        For ``r = 2`` this completes the square, ``shift = -A_1 / 2``.
        """
        self.require_cyclic()
        A1 = self.A(1)
        if self.r == 2:
            shift = [-c / 2 for c in A1]
            sq = [Fraction(0)] * (2 * len(A1) - 1)
            for i, a in enumerate(A1):
                for j, b in enumerate(A1):
                    sq[i + j] += a * b / 4
            Ar = self.A(2)
            n = max(len(sq), len(Ar))
            F = [(sq[k] if k < len(sq) else 0) - (Ar[k] if k < len(Ar) else 0) for k in range(n)]
            return [Fraction(c) for c in F], shift
        Ar = self.A(self.r)
        return [-c for c in Ar], [Fraction(0)]

    @cached_property
    def branch_points(self) -> np.ndarray:
        """Roots of ``F`` for the cyclic model, Newton-polished, in a fixed order."""
        F, _ = self.cyclic_model
        coeffs = np.array([complex(c) for c in reversed(F)])
        roots = _polished_roots(coeffs)
        if len(roots) > 1:
            d = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots)) * 1e300
            if d.min() < 1e-9 * max(1.0, np.abs(roots).max()):
                raise SingularAffineModel("cyclic model has a repeated branch point")
        order = np.lexsort((roots.imag, roots.real))
        return roots[order]

    @cached_property
    def branch_x(self) -> np.ndarray:
        """Finite branch values of ``x`` (cached)."""
        return np.array(self.branch_data().branch_x, dtype=complex)

    def branch_data(self) -> BranchData:
        """Branch values of ``x`` with ramification indices and the Riemann-Hurwitz check."""
        self.require_smooth()
        x, y = X_SYM, Y_SYM
        disc = sp.Poly(sp.discriminant(self.f_expr, y), x)
        sqf = sp.Poly(sp.sqf_part(disc.as_expr()), x)
        coeffs = np.array([complex(c) for c in sqf.all_coeffs()])
        roots = _polished_roots(coeffs) if sqf.degree() > 0 else np.array([], dtype=complex)
        if len(roots) > 1:
            d = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots)) * 1e300
            if d.min() < 1e-9 * max(1.0, np.abs(roots).max()):
                raise RootFindingFailure("branch values closer than 1e-9")
        ram = []
        for b in roots:
            ys = self.y_roots(b)
            scale = 1 + np.abs(ys).max()
            clusters: list[list[complex]] = []
            for yv in ys:
                for cl in clusters:
                    if abs(cl[0] - yv) < 1e-4 * scale:
                        cl.append(yv)
                        break
                else:
                    clusters.append([yv])
            ram.append(tuple(sorted((len(c) for c in clusters), reverse=True)))
        lhs = 2 * self.genus - 2
        rhs = sum(e - 1 for es in ram for e in es) - (self.r + 1)
        if lhs != rhs or any(sum(es) != self.r for es in ram):
            raise RHViolation(f"Riemann-Hurwitz fails: {lhs} != {rhs}", ramification=ram)
        order = np.lexsort((roots.imag, roots.real))
        return BranchData(tuple(complex(b) for b in roots[order]), tuple(ram[i] for i in order), self.r, lhs, rhs)

    # ---- serialization
    def coefficient_table(self) -> list[list[int]]:
        return [[i, j, c.numerator, c.denominator] for (i, j), c in self.lam.items() if (i, j) != (self.r, self.s)]

    def to_dict(self) -> dict:
        return {"r": self.r, "s": self.s, "coefficients": self.coefficient_table(), "f": str(self.f_expr), "genus": self.genus}

    def fingerprint(self) -> str:
        import hashlib

        payload = json.dumps({"r": self.r, "s": self.s, "c": self.coefficient_table()}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _polished_roots(coeffs: np.ndarray) -> np.ndarray:
    """Companion-matrix roots (numpy) followed by Newton polishing."""
    roots = np.roots(coeffs)
    d = np.polyder(coeffs)
    for _ in range(3):
        step = np.polyval(coeffs, roots) / np.polyval(d, roots)
        roots = roots - np.where(np.isfinite(step), step, 0)
    return roots


# --------------------------------------------------------------------------
# configuration


def parse_curve(config: Mapping) -> WCurve:
    """Build a curve from ``{"curve": {"r", "s", "coefficients": [[i, j, num, den], ...]}}``.

    The inner table may also be passed directly.  Unknown keys are rejected.
    """
    table = config.get("curve", config)
    if not isinstance(table, Mapping):
        raise ConfigError("curve table must be a mapping")
    unknown = set(table) - {"r", "s", "coefficients", "name"}
    if unknown:
        raise ConfigError(f"unknown curve keys: {sorted(unknown)}")
    try:
        r, s = int(table["r"]), int(table["s"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("curve needs integer r and s") from exc
    coeffs = {}
    for row in table.get("coefficients", []):
        if len(row) not in (3, 4):
            raise ConfigError(f"coefficient row {row} must be [i, j, num] or [i, j, num, den]")
        i, j, num = int(row[0]), int(row[1]), int(row[2])
        den = int(row[3]) if len(row) == 4 else 1
        if den == 0:
            raise ConfigError("zero denominator")
        coeffs[(i, j)] = coeffs.get((i, j), Fraction(0)) + Fraction(num, den)
    return WCurve(r, s, coeffs, name=str(table.get("name", "")))


def load_curve(path: str | os.PathLike) -> WCurve:
    """Read a curve from a TOML or JSON file."""
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if path.endswith(".json"):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    else:
        try:
            import tomllib  # type: ignore[import-not-found]
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        try:
            data = tomllib.loads(raw.decode())
        except Exception as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return parse_curve(data)


def curve_from_polynomial(r: int, s: int, A: Iterable[Iterable[object]]) -> WCurve:
    """Convenience constructor from coefficient lists of ``A_1..A_r`` (increasing powers)."""
    coeffs = {}
    for i, Ai in enumerate(A, start=1):
        for j, c in enumerate(Ai):
            if Fraction(c) != 0:
                coeffs[(i, j)] = Fraction(c)
    return WCurve(r, s, coeffs)


# --------------------------------------------------------------------------
# monomial curves


@dataclass(frozen=True)
class MonomialCurveData:
    """Cyclic relations of the monomial ring of a semigroup."""

    generators: tuple[int, ...]
    gcds: tuple[int, ...]  # (r, r_j) for j = 2..m
    orders: tuple[int, ...]  # r / (r, r_j)
    exponents: tuple[int, ...]  # r_j / (r, r_j)
    ordered_e: tuple[int, ...]

    def binomials(self) -> list[str]:
        r = self.generators[0]
        return [f"Z{rj}^{o} - Z{r}^{e}" for rj, o, e in zip(self.generators[1:], self.orders, self.exponents)]

    def p_value(self, j: int, Z, Zp):
        """Trace idempotent ``(1/o) sum_m (Z'/Z)^m`` for the j-th relation (j >= 2)."""
        o = self.orders[j - 2]
        w = Fraction(Zp) / Fraction(Z) if not isinstance(Z, complex) else Zp / Z
        return sum(w**m for m in range(o)) / o

    def idempotent_identity(self) -> bool:
        """``p(Z, Z) = 1`` and ``p(Z, zeta Z) = 0`` for every nontrivial root of unity, exactly."""
        w = sp.Symbol("w")
        for o in self.orders:
            S = sum(w**m for m in range(o)) / sp.Integer(o)
            if S.subs(w, 1) != 1:
                return False
            for d in sp.divisors(o)[1:]:
                if sp.rem(sp.expand(S * o), sp.cyclotomic_poly(d, w), w) != 0:
                    return False
        return True

    def z_substitution_identity(self) -> bool:
        """Product of the idempotents under ``Z_a -> z^a`` equals ``(1/r) sum_i (z'/z)^{e_i}`` on the fiber."""
        w = sp.Symbol("w")
        r = self.generators[0]
        lhs = sp.Integer(1)
        for rj, o in zip(self.generators[1:], self.orders):
            lhs *= sum(w ** (rj * m) for m in range(o)) / sp.Integer(o)
        rhs = sum(w**e for e in self.ordered_e) / sp.Integer(r)
        return sp.rem(sp.expand(lhs - rhs), w**r - 1, w) == 0

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "gcds": list(self.gcds),
            "orders": list(self.orders),
            "exponents": list(self.exponents),
            "binomials": self.binomials(),
        }


def monomial_curve_data(H: NumericalSemigroup) -> MonomialCurveData:
    gens = H.generators
    r = gens[0]
    g_ = tuple(gcd(r, rj) for rj in gens[1:])
    return MonomialCurveData(
        gens,
        g_,
        tuple(r // d for d in g_),
        tuple(rj // d for rj, d in zip(gens[1:], g_)),
        standard_basis(H).ordered_e,
    )
