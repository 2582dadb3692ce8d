"""Abelian differentials, the one-form Sigma and the fundamental two-form Omega.

Everything algebraic is exact over Q.  A differential is stored by its
numerator ``N(x, y)`` in ``N dx / f_y``; its expansion at infinity is the
``dt``-coefficient series.  Two-point polynomials use exponent tuples
``(a, b, c, d)`` for ``x_P^a y_P^b x_Q^c y_Q^d``.

Conventions
-----------
* ``nu^I_i = phi_{i-1} dx / f_y`` (i = 1..g), ``phi`` the monomial basis.
* pairing ``<nu, nu'> = Res_{t=0} (int nu) nu'``.
* ``nu^II`` is dual, ``<nu^I_i, nu^II_j> = delta_ij``, and isotropic.
* ``Sigma(P, Q) = dx_P htilde(P; Q) / ((x_P - x_Q) f_y(P))``,
  ``Omega = d_Q Sigma(P, Q) + sum_i nu^I_i(P) nu^II_i(Q)``,
  ``Omega = F_Omega dx_P dx_Q / ((x_P - x_Q)^2 f_y(P) f_y(Q))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .curve import Poly2, WCurve, compile_poly as _compile, padd, pdiff, pmul, pscale
from .errors import (
    CoincidentFiber,
    CoincidentPoints,
    EvaluationAtRamification,
    GapMismatch,
    IdentityFailure,
    LogTermError,
    RankDeficiency,
)
from .semigroup import build_semigroup, standard_basis
from .series import InfinityExpansion, LaurentSeries, expand_at_infinity, poly_series

Poly4 = dict  # {(a, b, c, d): coefficient}

EXTENSIONS = ("P", "Q")


# --------------------------------------------------------------------------
# multi-exponent polynomial helpers


def _tadd(p: dict, q: dict, c=1) -> dict:
    out = dict(p)
    for e, v in q.items():
        out[e] = out.get(e, 0) + c * v
    return {e: v for e, v in out.items() if v != 0}


def _tmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: v for e, v in out.items() if v != 0}


def _tdiff(p: dict, k: int) -> dict:
    out: dict = {}
    for e, c in p.items():
        if e[k]:
            e2 = list(e)
            e2[k] -= 1
            out[tuple(e2)] = out.get(tuple(e2), 0) + c * e[k]
    return out


def _lift(p: Poly2, side: str) -> Poly4:
    """Embed a polynomial in (x, y) as a function of P or of Q."""
    if side == "P":
        return {(a, b, 0, 0): c for (a, b), c in p.items()}
    return {(0, 0, a, b): c for (a, b), c in p.items()}


def _swap(p: Poly4) -> Poly4:
    return {(c, d, a, b): v for (a, b, c, d), v in p.items()}


def _reduce4(curve: WCurve, p: Poly4) -> Poly4:
    """Reduce ``y_P`` and ``y_Q`` degrees below ``r`` using ``f``."""
    r = curve.r
    p = {e: v for e, v in p.items() if v != 0}
    for slot in (1, 3):
        xslot = slot - 1
        while True:
            top = max((e[slot] for e in p), default=0)
            if top < r:
                break
            hi = {e: v for e, v in p.items() if e[slot] == top}
            for e in hi:
                del p[e]
            for e, v in hi.items():
                for (i, j), c in curve.lam.items():
                    e2 = list(e)
                    e2[slot] -= i
                    e2[xslot] += j
                    e2 = tuple(e2)
                    p[e2] = p.get(e2, 0) - v * c
            p = {e: v for e, v in p.items() if v != 0}
    return p


def _divide_by_diagonal_square(p: Poly4) -> Poly4:
    """Exact division by ``(x_P - x_Q)^2`` coefficientwise in ``y_P^b y_Q^d``."""
    xp, xq = sp.symbols("xp xq")
    groups: dict[tuple[int, int], dict] = {}
    for (a, b, c, d), v in p.items():
        groups.setdefault((b, d), {})[(a, c)] = v
    out: Poly4 = {}
    divisor = sp.Poly((xp - xq) ** 2, xp, xq, domain=sp.QQ)
    for (b, d), terms in groups.items():
        poly = sp.Poly.from_dict({k: sp.Rational(v.numerator, v.denominator) for k, v in terms.items()}, xp, xq, domain=sp.QQ)
        q, rem = sp.div(poly, divisor)
        if not rem.is_zero:
            raise IdentityFailure("antisymmetric part of d_Q Sigma is not divisible by (x_P - x_Q)^2")
        for (a, c), v in q.terms():
            out[(a, b, c, d)] = Fraction(int(v.p), int(v.q))
    return out


def _compile4(p: Poly4) -> Callable:
    terms = [(e, complex(c)) for e, c in p.items()]
    exps = np.array([e for e, _ in terms], dtype=int).reshape(-1, 4)
    coeffs = np.array([c for _, c in terms], dtype=complex)

    def ev(xp, yp, xq, yq):
        xp, yp, xq, yq = (np.asarray(v, dtype=complex) for v in (xp, yp, xq, yq))
        base = np.stack(np.broadcast_arrays(xp, yp, xq, yq), axis=-1)  # (..., 4)
        mons = np.prod(base[..., None, :] ** exps, axis=-1)  # (..., nterms)
        out = mons @ coeffs
        return out if out.ndim else complex(out)

    return ev


def _frac_solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination; raises RankDeficiency if singular."""
    n = len(A)
    M = [list(row) + [bv] for row, bv in zip(A, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col] != 0), None)
        if piv is None:
            raise RankDeficiency("pairing system is singular; increase the series order")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        for i in range(n):
            if i != col and M[i][col] != 0:
                fac = M[i][col] * inv
                M[i] = [a - fac * c for a, c in zip(M[i], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


# --------------------------------------------------------------------------
# kernel


@dataclass(frozen=True)
class TwoPointKernel:
    """``htilde(P; Q) = sum_i Upsilon_i(P; x_Q) y_Q^i`` with ``htilde(P; P) = f_y(P)``.

    ``extension = "P"`` divides ``(f(x, y) - f(x, y')) / (y - y')`` with all
    ``A_j`` at ``x_P``; ``extension = "Q"`` evaluates ``A_j`` at ``x_Q``.
    Both agree on the fiber ``x_P = x_Q``.
    """

    curve: WCurve
    extension: str
    upsilon: tuple  # Upsilon_i as Poly4 without the y_Q^i factor
    kernel: dict  # Poly4
    h: dict  # Poly2, f_y
    d_h: int
    k_X: int

    @cached_property
    def _eval(self) -> Callable:
        return _compile4(self.kernel)

    @cached_property
    def _h_eval(self) -> Callable:
        return _compile(self.h)

    def __call__(self, P, Q):
        return self._eval(P[0], P[1], Q[0], Q[1])

    def upsilon_xy(self) -> list[Poly2]:
        """``Upsilon_i(x, y)`` for the default extension (no ``x_Q`` dependence)."""
        return [{(a, b): v for (a, b, c, d), v in u.items()} for u in self.upsilon]

    def to_dict(self) -> dict:
        return {
            "extension": self.extension,
            "upsilon": [_poly_json({(a, b, c): v for (a, b, c, d), v in u.items()}) for u in self.upsilon],
            "h_X": _poly_json(self.h),
            "d_h": self.d_h,
            "k_X": self.k_X,
        }


def two_point_kernel(curve: WCurve, extension: str = "P", check_smooth: bool = True) -> TwoPointKernel:
    """Division kernel of ``f`` and its diagonal value ``h_X = f_y``.

    Examples
    --------
    >>> K = two_point_kernel(WCurve(2, 3, {(2, 1): 1}))
    >>> K.upsilon_xy(), K.d_h, K.k_X
    ([{(0, 1): Fraction(1, 1)}, {(0, 0): Fraction(1, 1)}], 3, 0)
    """
    if extension not in EXTENSIONS:
        raise ValueError(f"extension must be one of {EXTENSIONS}")
    if check_smooth:
        curve.require_smooth()
    r = curve.r
    ups = []
    kernel: Poly4 = {}
    for i in range(r):
        u: Poly4 = {}
        for j in range(r - i):
            for deg, c in enumerate(curve.A(j)):
                if c:
                    e = (deg, r - 1 - i - j, 0, 0) if extension == "P" else (0, r - 1 - i - j, deg, 0)
                    u[e] = u.get(e, 0) + c
        ups.append(u)
        for (a, b, c, d), v in u.items():
            kernel[(a, b, c, i)] = kernel.get((a, b, c, i), 0) + v
    h = curve.f_y
    diag = {}
    for (a, b, c, d), v in kernel.items():
        diag[(a + c, b + d)] = diag.get((a + c, b + d), 0) + v
    if {e: v for e, v in diag.items() if v} != h:
        raise IdentityFailure("htilde(P; P) != f_y")
    d_h = (r - 1) * curve.s
    k_X = d_h - 2 * curve.genus - r + 1
    if k_X != 0:
        raise IdentityFailure(f"k_X = {k_X} != 0 for a plane curve")
    return TwoPointKernel(curve, extension, tuple(ups), kernel, h, d_h, k_X)


def trace_kernel(kernel: TwoPointKernel, P, Q, tol: float = 1e-10):
    """``p(P, Q) = htilde(P; Q) / h_X(P)``: 1 at ``P = Q``, 0 on the rest of the fiber."""
    hp = kernel._h_eval(P[0], P[1])
    scale = 1 + abs(P[1]) ** (kernel.curve.r - 1)
    if abs(hp) < tol * scale:
        raise EvaluationAtRamification("h_X vanishes at P", P=P)
    return kernel(P, Q) / hp


# --------------------------------------------------------------------------
# differentials


@dataclass(frozen=True)
class Differential:
    """``numerator(x, y) dx / f_y``."""

    curve: WCurve = field(repr=False, compare=False)
    numerator: dict  # Poly2
    kind: str
    label: str = ""

    def series(self, order: int | None = None, exact: bool = True) -> LaurentSeries:
        """``dt``-coefficient at infinity."""
        E = expand_at_infinity(self.curve, order, exact)
        return differential_series(self.numerator, self.curve, E, exact)

    @property
    def weight(self) -> int:
        """Exponent of the leading term ``t^w dt``."""
        return self.series().valuation

    @cached_property
    def _num(self) -> Callable:
        return _compile(self.numerator)

    @cached_property
    def _fy(self) -> Callable:
        return _compile(self.curve.f_y)

    def dx_coefficient(self, x, y):
        return self._num(x, y) / self._fy(x, y)

    def __add__(self, other: "Differential") -> "Differential":
        return Differential(self.curve, padd(self.numerator, other.numerator), self.kind, self.label)

    def scaled(self, c) -> "Differential":
        return Differential(self.curve, pscale(self.numerator, Fraction(c)), self.kind, self.label)

    def to_dict(self) -> dict:
        return {"label": self.label, "kind": self.kind, "numerator": _poly_json(self.numerator), "weight": self.weight}


def differential_series(numerator: Poly2, curve: WCurve, E: InfinityExpansion, exact: bool = True) -> LaurentSeries:
    cache = curve.__dict__.setdefault("_series_cache", {}).setdefault((E.order, exact), {})
    key = ("dx/fy",)
    if key not in cache:
        fy = poly_series(curve.f_y, E, exact, cache)
        cache[key] = E.x.derivative() / fy
    return poly_series(numerator, E, exact, cache) * cache[key]


def pairing(nu, nu2, order: int | None = None, exact: bool = True):
    """``<nu, nu'> = Res_{t=0} (int nu) nu'`` (antisymmetric)."""
    s1 = nu if isinstance(nu, LaurentSeries) else nu.series(order, exact)
    s2 = nu2 if isinstance(nu2, LaurentSeries) else nu2.series(order, exact)
    try:
        prim = s1.integral()
    except LogTermError:
        raise LogTermError("first argument of the pairing has a residue at infinity") from None
    return (prim * s2).residue()


def nuI_basis(curve: WCurve) -> list[Differential]:
    """``nu^I_i = phi_{i-1} dx / f_y``, leading exponents the gaps minus one."""
    curve.require_smooth()
    g = curve.genus
    basis = curve.phi_basis(g - 1).monomials if g else ()
    out = [Differential(curve, {m: Fraction(1)}, "first", f"nuI_{i + 1}") for i, m in enumerate(basis)]
    gaps = curve.semigroup.gaps
    got = [d.weight for d in out]
    want = [gaps[g - 1 - i] - 1 for i in range(g)]
    if got != want:
        raise GapMismatch(f"leading exponents {got} differ from gaps-1 {want}")
    return out


def exact_numerator(curve: WCurve, phi: Poly2) -> Poly2:
    """Numerator of ``d phi`` over ``dx / f_y``: ``phi_x f_y - phi_y f_x``."""
    num = padd(pmul(pdiff(phi, 0), curve.f_y), pmul(pdiff(phi, 1), curve.f_x), -1)
    return curve.reduce(num)


def _level(curve: WCurve, mono) -> int:
    return mono[0] * curve.r + mono[1] * curve.s


def _top(curve: WCurve, p: Poly2):
    return max(p, key=lambda m: _level(curve, m)) if p else None


@dataclass(frozen=True)
class LevelStructure:
    """Pole-order levels of ``N dx / f_y`` numerators for a plane curve.

    Levels ``< 2g - 1`` are holomorphic, ``2g - 1 + gap`` carry the second
    kind and ``2g - 1 + N(m)`` (m >= 1) are exact.
    """

    holomorphic: tuple[int, ...]
    second: tuple[int, ...]  # indexed so that second[j-1] belongs to nu^II_j
    exact_to: dict  # level -> m

    @classmethod
    def of(cls, curve: WCurve, max_level: int) -> "LevelStructure":
        H = curve.semigroup
        g = H.genus
        hol = tuple(n for n in H.elements_up_to(2 * g - 2))
        sec = tuple(2 * g - 1 + H.gaps[g - j] for j in range(1, g + 1))
        ex = {}
        for m, n in enumerate(H.elements_up_to(max(0, max_level - 2 * g + 1))):
            if m >= 1:
                ex[2 * g - 1 + n] = n
        return cls(hol, sec, ex)


def reduce_modulo_exact(curve: WCurve, num: Poly2) -> Poly2:
    """Remove exact parts from the top down until no exact level remains."""
    num = curve.reduce(dict(num))
    top_level = max((_level(curve, m) for m in num), default=0)
    L = LevelStructure.of(curve, top_level)
    H = curve.semigroup
    cache: dict[int, Poly2] = {}
    for lev in sorted(L.exact_to, reverse=True):
        mono = _mono_at(curve, lev)
        c = num.get(mono, 0)
        if not c:
            continue
        n = L.exact_to[lev]
        if n not in cache:
            cache[n] = exact_numerator(curve, {_mono_at(curve, n): Fraction(1)})
        d = cache[n]
        lead = d[_mono_at(curve, lev)]
        num = padd(num, d, -c / lead)
    return num


def _mono_at(curve: WCurve, level: int):
    """The unique monomial ``x^a y^b`` (b < r) of pole order ``level``."""
    for b in range(curve.r):
        rest = level - b * curve.s
        if rest >= 0 and rest % curve.r == 0:
            return (rest // curve.r, b)
    raise GapMismatch(f"{level} is not in the semigroup")


def _pairing_matrix(A: Sequence[LaurentSeries], B: Sequence[LaurentSeries]) -> list[list]:
    return [[pairing(a, b) for b in B] for a in A]


@dataclass(frozen=True)
class DifferentialBasis:
    """First and second kind bases plus the data of the Klein form.

    Attributes
    ----------
    nuI, nuII : lists of Differential
        ``nuII`` is the pointwise representative used in ``Omega``; modulo
        exact forms it equals ``nuII_pairing``.
    nuII_pairing : list of Differential
        Second-kind basis from the pairing solve with the ``-G/2`` correction.
    M : dict
        Coefficients of ``(d_Q Sigma(P,Q) - d_P Sigma(Q,P)) / (dx dx / f_y f_y)``
        in ``phi_a(P) phi_b(Q)``.
    F_omega : Poly4
        Klein fundamental form.
    """

    curve: WCurve = field(repr=False)
    kernel: TwoPointKernel = field(repr=False)
    nuI: tuple
    nuII: tuple
    nuII_pairing: tuple
    M: dict
    F_sigma: dict  # Poly4 numerator of d_Q Sigma times (x_P-x_Q)^2
    F_omega: dict
    gauge_shift: tuple  # symmetric matrix C (rows of Fractions)

    @property
    def genus(self) -> int:
        return len(self.nuI)

    def duality(self) -> dict:
        """Exact pairing blocks ``<I,I>``, ``<I,II>``, ``<II,II>``."""
        sI = [d.series() for d in self.nuI]
        sII = [d.series() for d in self.nuII]
        return {"I_I": _pairing_matrix(sI, sI), "I_II": _pairing_matrix(sI, sII), "II_II": _pairing_matrix(sII, sII)}

    @cached_property
    def _omega_eval(self) -> Callable:
        return _compile4(self.F_omega)

    @cached_property
    def _dsigma_eval(self) -> Callable:
        return _compile4(self.F_sigma)

    def omega(self, P, Q):
        """``Omega(P, Q) / (dx_P dx_Q)``."""
        return omega_form(self, P, Q)

    def to_dict(self) -> dict:
        return {
            "nuI": [d.to_dict() for d in self.nuI],
            "nuII": [d.to_dict() for d in self.nuII],
            "nuII_modulo_exact": [_poly_json(reduce_modulo_exact(self.curve, d.numerator)) for d in self.nuII],
            "klein_form": _poly_json(self.F_omega),
            "gauge_shift": [[_frac_str(c) for c in row] for row in self.gauge_shift],
        }


def nuII_by_pairing(curve: WCurve, nuI: Sequence[Differential]) -> list[Differential]:
    """Dual basis supported on the second-kind levels, then the ``-G/2`` symplectic fix."""
    g = len(nuI)
    L = LevelStructure.of(curve, 0)
    sI = [d.series() for d in nuI]
    cand = [{_mono_at(curve, lev): Fraction(1)} for lev in L.second]  # cand[j] for nu^II_{j+1}
    sC = [Differential(curve, c, "second").series() for c in cand]
    P = _pairing_matrix(sI, sC)  # P[i][k] = <nuI_i, cand_k>
    out = []
    for j in range(g):
        # unknowns: candidates k >= j (levels at most that of cand[j]); equations i >= j
        idx = list(range(j, g))
        A = [[P[i][k] for k in idx] for i in idx]
        b = [Fraction(1 if i == j else 0) for i in idx]
        sol = _frac_solve(A, b)
        num: Poly2 = {}
        for k, c in zip(idx, sol):
            num = padd(num, cand[k], c)
        out.append(Differential(curve, num, "second", f"nuII_{j + 1}"))
    sII = [d.series() for d in out]
    G = _pairing_matrix(sII, sII)
    fixed = []
    for j in range(g):
        num = dict(out[j].numerator)
        for k in range(g):
            if G[j][k]:
                num = padd(num, nuI[k].numerator, -G[j][k] / 2)
        fixed.append(Differential(curve, num, "second", f"nuII_{j + 1}"))
    return fixed


def _dsigma_numerator(curve: WCurve, K: TwoPointKernel) -> Poly4:
    """``F`` with ``d_Q Sigma(P, Q) = F dx_P dx_Q / ((x_P - x_Q)^2 f_y(P) f_y(Q))``."""
    h = K.kernel
    fyQ = _lift(curve.f_y, "Q")
    fxQ = _lift(curve.f_x, "Q")
    diag = {(1, 0, 0, 0): Fraction(1), (0, 0, 1, 0): Fraction(-1)}
    inner = _tadd(_tmul(fyQ, _tdiff(h, 2)), _tmul(fxQ, _tdiff(h, 3)), -1)
    F = _tadd(_tmul(fyQ, h), _tmul(diag, inner))
    return _reduce4(curve, F)


def differential_bases(curve: WCurve, extension: str = "P") -> DifferentialBasis:
    """Build ``nu^I``, ``nu^II`` and the Klein form from the antisymmetry of ``d_Q Sigma``.

    The decomposition ``d_Q Sigma(P,Q) - d_P Sigma(Q,P) =
    sum_i nu^I_i(Q) nu^II_i(P) - nu^I_i(P) nu^II_i(Q)`` determines ``nu^II``
    up to a symmetric combination of ``nu^I``; that freedom is fixed so the
    class modulo exact forms equals the pairing-route basis.
    """
    curve.require_smooth()
    K = two_point_kernel(curve, extension)
    g = curve.genus
    nuI = nuI_basis(curve)
    F = _dsigma_numerator(curve, K)
    D = _reduce4(curve, _tadd(F, _swap(F), -1))
    D = _divide_by_diagonal_square(D)
    D = _reduce4(curve, D)
    M: dict[tuple[int, int], Fraction] = {}
    for (a, b, c, d), v in D.items():
        key = (curve.phi_index(a, b), curve.phi_index(c, d))
        M[key] = M.get(key, 0) + v
    M = {k: v for k, v in M.items() if v}
    for (i, j), v in M.items():
        if M.get((j, i), 0) != -v:
            raise IdentityFailure("antisymmetric part is not antisymmetric")
        if i >= g and j >= g:
            raise IdentityFailure("antisymmetric part has a second-kind x second-kind term")
    nmax = max((max(k) for k in M), default=0)
    phis = curve.phi_basis(nmax).monomials
    raw = []
    for k in range(1, g + 1):
        num: Poly2 = {}
        for a in range(nmax + 1):
            v = M.get((a, k - 1), 0)
            if v:
                num[phis[a]] = num.get(phis[a], 0) + (v if a >= g else v / 2)
        raw.append(num)
    # align the symmetric nu^I gauge with the pairing route
    ref = nuII_by_pairing(curve, nuI)
    C = [[Fraction(0)] * g for _ in range(g)]
    final = []
    for k in range(g):
        diff = padd(reduce_modulo_exact(curve, raw[k]), ref[k].numerator, -1)
        for mono, v in diff.items():
            if _level(curve, mono) > 2 * g - 2:
                raise IdentityFailure(f"nu^II_{k + 1} from the Klein decomposition differs from the pairing basis beyond nu^I")
            C[k][curve.phi_index(*mono)] = v
        num = dict(raw[k])
        for a in range(g):
            if C[k][a]:
                num = padd(num, {phis[a]: Fraction(1)}, -C[k][a])
        final.append(Differential(curve, num, "second", f"nuII_{k + 1}"))
    for i in range(g):
        for j in range(g):
            if C[i][j] != C[j][i]:
                raise IdentityFailure("gauge shift between the two constructions is not symmetric")
    # Klein form: F_Omega = F + (x_P - x_Q)^2 sum_k phi_{k-1}(P) nuII_k(Q)
    diag2 = {(2, 0, 0, 0): Fraction(1), (1, 0, 1, 0): Fraction(-2), (0, 0, 2, 0): Fraction(1)}
    S: Poly4 = {}
    for k in range(g):
        S = _tadd(S, _tmul(_lift({phis[k]: Fraction(1)}, "P"), _lift(final[k].numerator, "Q")))
    F_omega = _reduce4(curve, _tadd(F, _tmul(diag2, S)))
    if _reduce4(curve, _tadd(F_omega, _swap(F_omega), -1)):
        raise IdentityFailure("Klein form is not symmetric")
    return DifferentialBasis(curve, K, tuple(nuI), tuple(final), tuple(ref), M, F, F_omega, tuple(tuple(r) for r in C))


def nuII_basis(curve: WCurve, extension: str = "P") -> list[Differential]:
    return list(differential_bases(curve, extension).nuII)


# --------------------------------------------------------------------------
# pointwise forms


def sigma_form(kernel: TwoPointKernel, P, Q, tol: float = 1e-12):
    """``Sigma(P, Q) / dx_P``."""
    dx = P[0] - Q[0]
    if np.any(np.abs(dx) < tol * (1 + np.abs(P[0]))):
        raise CoincidentFiber("x_P = x_Q")
    return kernel(P, Q) / (dx * kernel._h_eval(P[0], P[1]))


def dsigma_form(B: DifferentialBasis, P, Q, tol: float = 1e-12):
    """``d_Q Sigma(P, Q) / (dx_P dx_Q)``."""
    dx = P[0] - Q[0]
    if np.any(np.abs(dx) < tol * (1 + np.abs(P[0]))):
        raise CoincidentFiber("x_P = x_Q")
    fy = B.kernel._h_eval
    return B._dsigma_eval(P[0], P[1], Q[0], Q[1]) / (dx**2 * fy(P[0], P[1]) * fy(Q[0], Q[1]))


def omega_form(B: DifferentialBasis, P, Q, tol: float = 1e-12):
    """``Omega(P, Q) / (dx_P dx_Q)`` from the Klein form."""
    dx = P[0] - Q[0]
    if np.any(np.abs(dx) < tol * (1 + np.abs(P[0]))):
        raise CoincidentFiber("x_P = x_Q")
    fy = B.kernel._h_eval
    return B._omega_eval(P[0], P[1], Q[0], Q[1]) / (dx**2 * fy(P[0], P[1]) * fy(Q[0], Q[1]))


def omega_from_parts(B: DifferentialBasis, P, Q):
    """``d_Q Sigma(P,Q) + sum_i nu^I_i(P) nu^II_i(Q)`` (per ``dx_P dx_Q``)."""
    val = dsigma_form(B, P, Q)
    for a, b in zip(B.nuI, B.nuII):
        val = val + a.dx_coefficient(*P) * b.dx_coefficient(*Q)
    return val


def klein_limit(B: DifferentialBasis, Q, t: float = 1e-3):
    """``F_Omega(P, Q) / (phi_{g-1}(P) (x_P - x_Q)^2)`` at the point ``P(t)`` near infinity."""
    E = expand_at_infinity(B.curve, exact=False)
    xp, yp = E.x.evaluate(t), E.y.evaluate(t)
    phi = B.nuI[-1].numerator
    val = B._omega_eval(xp, yp, Q[0], Q[1])
    return val / (_compile(phi)(xp, yp) * (xp - Q[0]) ** 2)


# --------------------------------------------------------------------------
# expansions at infinity


def sigma_form_series(curve: WCurve, u, order: int = 12, extension: str = "P") -> LaurentSeries:
    """``t_P Sigma(P, Q) / dt_P`` along ``t_P = u t_Q`` as a series in ``t_Q`` (exact).

    Needs ``u^r != 1``.  Only the germ at infinity is used, so singular
    (e.g. monomial) curves are allowed.
    """
    u = Fraction(u)
    K = two_point_kernel(curve, extension, check_smooth=False)
    r, s = curve.r, curve.s
    n = order + curve.d_h + 2 * s + 4
    E = expand_at_infinity(curve, n)
    xQ, yQ = E.x, E.y
    xP, yP = E.x.scale_variable(u), E.y.scale_variable(u)
    # t_P dx_P/dt_P = t (d/dt)(x(u t)) evaluated in t = t_Q
    dxP = xP.derivative().shift(1)
    cache: dict = {}

    def mono(base: LaurentSeries, name: str, k: int) -> LaurentSeries:
        if (name, k) not in cache:
            cache[(name, k)] = base**k if k else LaurentSeries.constant(Fraction(1), n)
        return cache[(name, k)]

    ht = None
    for (a, b, c, d), v in K.kernel.items():
        term = mono(xP, "xP", a) * mono(yP, "yP", b) * mono(xQ, "xQ", c) * mono(yQ, "yQ", d) * v
        ht = term if ht is None else ht + term
    hP = None
    for (a, b), v in curve.f_y.items():
        term = mono(xP, "xP", a) * mono(yP, "yP", b) * v
        hP = term if hP is None else hP + term
    res = dxP * ht / ((xP - xQ) * hP)
    return res.truncate(order)


def sigma_H(H_or_curve, u) -> Fraction:
    """Monomial oracle ``-(1/(1 - u^r)) sum_i u^{e_i}`` for ``t_P Sigma_H / dt_P``."""
    H = H_or_curve.semigroup if isinstance(H_or_curve, WCurve) else H_or_curve
    sb = standard_basis(H)
    u = Fraction(u)
    return -sum(u**e for e in sb.ordered_e) / (1 - u**sb.r)


@dataclass(frozen=True)
class MonomialKernelOracle:
    """Closed forms of ``Sigma_H`` and ``d_Q Sigma_H`` in ``t_P, t_Q`` (sympy)."""

    r: int
    e: tuple[int, ...]
    tP: sp.Symbol
    tQ: sp.Symbol

    @property
    def sigma(self) -> sp.Expr:
        tP, tQ, r = self.tP, self.tQ, self.r
        return -(tQ**r / (tQ**r - tP**r)) * sum((tP / tQ) ** e for e in self.e) / tP

    @property
    def dsigma_closed(self) -> sp.Expr:
        tP, tQ, r = self.tP, self.tQ, self.r
        inner = sum(e * tP**e / tQ ** (e - 2 * r) - (e - r) * tP ** (e + r) / tQ ** (e - r) for e in self.e)
        return inner / ((tQ**r - tP**r) ** 2 * tP * tQ)

    @property
    def dsigma(self) -> sp.Expr:
        return sp.diff(self.sigma, self.tQ)

    def singular_part(self) -> sp.Expr:
        """Terms of ``d_Q Sigma_H`` (region ``|t_Q| < |t_P|``) with a pole at ``t_Q = 0``.

        Indexed by ``e_i - r k > 0`` with ``k >= 1``; there are exactly ``g`` of them.
        """
        tP, tQ, r = self.tP, self.tQ, self.r
        out = 0
        for e in self.e:
            k = 1
            while e - r * k > 0:
                out += -(e - k * r) * tP ** (e - r * k - 1) / tQ ** (e - r * k + 1)
                k += 1
        return out

    def singular_count(self) -> int:
        return sum(max(0, (e - 1) // self.r) for e in self.e)

    def antisymmetric_difference(self) -> sp.Expr:
        swapped = self.dsigma.subs({self.tP: self.tQ, self.tQ: self.tP}, simultaneous=True)
        return self.dsigma - swapped


def monomial_kernel_oracle(H) -> MonomialKernelOracle:
    sb = standard_basis(H)
    tP, tQ = sp.symbols("t_P t_Q")
    return MonomialKernelOracle(sb.r, tuple(sb.ordered_e), tP, tQ)


# --------------------------------------------------------------------------
# serialization helpers


def _frac_str(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)


def _poly_json(p: dict) -> list:
    return [{"exponents": list(e), "coefficient": _frac_str(v)} for e, v in sorted(p.items())]


# --------------------------------------------------------------------------
# third kind and the double integral


@dataclass(frozen=True)
class ThirdKind:
    """``nu^III(P) = Sigma(P, P1) - Sigma(P, P2)``: simple poles with residues +1 at P1, -1 at P2."""

    kernel: TwoPointKernel = field(repr=False)
    P1: tuple
    P2: tuple

    def dx_coefficient(self, x, y):
        P = (x, y)
        return sigma_form(self.kernel, P, self.P1) - sigma_form(self.kernel, P, self.P2)

    def residue(self, point, radius: float | None = None, nodes: int = 256) -> complex:
        """``(1 / 2 pi i) oint`` on a small circle around ``point`` on its own sheet."""
        from .quadrature import SheetTracker

        curve = self.kernel.curve
        poles = np.array([self.P1[0], self.P2[0]] + list(curve.branch_x), dtype=complex)
        far = np.abs(poles - point[0])
        far = far[far > 1e-12]
        if radius is None:
            radius = min(1e-2, 0.25 * float(far.min())) if far.size else 1e-2

        def value(m: int) -> complex:
            th = 2 * np.pi * np.arange(m + 1) / m
            xs = point[0] + radius * np.exp(1j * th)
            ys = SheetTracker(curve).along(np.concatenate([[point[0] + radius], xs]), _nearest_root(curve, point[0] + radius, point[1]))[1:]
            vals = self.dx_coefficient(xs[:-1], ys[:-1]) * (1j * radius * np.exp(1j * th[:-1]))
            return complex(np.mean(vals) / 1j)

        full, half = value(nodes), value(nodes // 2)
        if abs(full - half) > 1e-9 * max(1.0, abs(full)):
            from .errors import QuadratureNonConvergence

            raise QuadratureNonConvergence(f"residue quadrature not converged ({abs(full - half):.2e})")
        return full


def _nearest_root(curve: WCurve, x: complex, y_hint: complex) -> complex:
    roots = curve.y_roots(x)
    return complex(roots[int(np.argmin(np.abs(roots - y_hint)))])


def third_kind(kernel: TwoPointKernel, P1, P2) -> ThirdKind:
    if abs(P1[0] - P2[0]) < 1e-12 and abs(P1[1] - P2[1]) < 1e-12:
        raise CoincidentPoints("P1 = P2")
    return ThirdKind(kernel, tuple(P1), tuple(P2))


def _candidate_routes(curve: WCurve, x0: complex, x1: complex, obst: list):
    """Straight route first, then routes looping once (either way) around each branch point."""
    from .quadrature import route

    pts = np.array(obst + [x0, x1], dtype=complex)
    sep = np.abs(np.subtract.outer(np.array(obst), np.array(obst)))
    sep = sep[sep > 0]
    scale = max(1.0, float(np.max(np.abs(pts))))
    clearance = 0.3 * float(sep.min()) if sep.size else 0.1 * scale
    yield route(x0, x1, obst, clearance)
    for b in sorted(curve.branch_x, key=lambda b: abs(b - x0)):
        others = np.array([o for o in obst if o != b], dtype=complex)
        rho = 0.4 * float(np.min(np.abs(others - b))) if others.size else 0.5
        ang0 = np.angle(x0 - b)
        for direction in (1, -1):
            for turns in range(1, curve.r):
                th = ang0 + direction * 2 * np.pi * np.arange(12 * turns + 1) / 12
                loop = list(b + rho * np.exp(1j * th))
                yield route(x0, loop[0], obst, clearance)[:-1] + loop[:-1] + route(loop[-1], x1, obst, clearance)


def find_route(curve: WCurve, start, end, obstacles=()) -> list:
    """First candidate polyline from ``start`` to ``end`` whose continuation of ``y`` arrives on ``end``'s sheet."""
    from .errors import PathThroughSingularity
    from .quadrature import SheetTracker, _pieces

    obst = list(curve.branch_x) + list(obstacles)
    tracker = SheetTracker(curve)
    for verts in _candidate_routes(curve, complex(start[0]), complex(end[0]), obst):
        xs = [verts[0]]
        for a, b in zip(verts[:-1], verts[1:]):
            xs += [q for _, q in _pieces(complex(a), complex(b), np.asarray(obst, dtype=complex), 0.5)]
        if abs(tracker.along(xs, start[1])[-1] - end[1]) <= 1e-6 * (1 + abs(end[1])):
            return verts
    raise PathThroughSingularity("no candidate route reaches the requested sheet", wanted=end[1])


def _key(P) -> tuple:
    return (round(complex(P[0]).real, 12), round(complex(P[0]).imag, 12), round(complex(P[1]).real, 12), round(complex(P[1]).imag, 12))


def _path_integrals(curve: WCurve, start, end, fn, obstacles, vertices=None):
    from .errors import PathThroughSingularity
    from .quadrature import integrate_path

    obst = list(curve.branch_x) + list(obstacles)
    if vertices is None and _key(start) > _key(end):
        # a canonical orientation makes reversing the endpoints reverse the path
        return -_path_integrals(curve, end, start, fn, obstacles)
    candidates = [vertices] if vertices is not None else _candidate_routes(curve, complex(start[0]), complex(end[0]), obst)
    for verts in candidates:
        res = integrate_path(curve, verts, start[1], fn, obst)
        if abs(res.y_end - end[1]) <= 1e-6 * (1 + abs(end[1])):
            return res.values
    raise PathThroughSingularity("continuation along the path arrives on another sheet", wanted=end[1])


@dataclass(frozen=True)
class PiData:
    """``Pi`` together with the first-kind integrals along the same two paths."""

    value: complex
    abel_P: np.ndarray  # int_{P2}^{P1} nu^I
    abel_Q: np.ndarray  # int_{Q2}^{Q1} nu^I


def pi_data(B: DifferentialBasis, P1, P2, Q1, Q2, path_P=None, path_Q=None) -> PiData:
    """``Pi^{P1,P2}_{Q1,Q2} = int_{P2}^{P1} (Sigma(P,Q1) - Sigma(P,Q2)) + sum_i int nu^I_i int nu^II_i``.

    Paths are polylines in the x-plane (default: straight with detours) and
    must avoid branch points and the fibers of ``Q1``, ``Q2``.  The value
    depends on the homology class of the paths; ``abel_P`` and ``abel_Q``
    record ``int nu^I`` along exactly those paths.
    """
    curve = B.curve
    g = B.genus
    if P1 == P2 or Q1 == Q2:
        return PiData(0j, np.zeros(g, dtype=complex), np.zeros(g, dtype=complex))
    nuI, nuII = B.nuI, B.nuII

    def fP(x, y):
        P = (x, y)
        rows = [sigma_form(B.kernel, P, Q1) - sigma_form(B.kernel, P, Q2)]
        rows += [d.dx_coefficient(x, y) for d in nuI]
        return np.array(rows)

    def fQ(x, y):
        return np.array([d.dx_coefficient(x, y) for d in list(nuII) + list(nuI)])

    IP = _path_integrals(curve, P2, P1, fP, [Q1[0], Q2[0]], path_P)
    IQ = _path_integrals(curve, Q2, Q1, fQ, [], path_Q)
    return PiData(complex(IP[0] + np.dot(IP[1:], IQ[:g])), np.asarray(IP[1:]), np.asarray(IQ[g:]))


def pi_integral(B: DifferentialBasis, P1, P2, Q1, Q2, path_P=None, path_Q=None) -> complex:
    """``Pi^{P1,P2}_{Q1,Q2}``, antisymmetric in each pair and symmetric under exchanging them."""
    return pi_data(B, P1, P2, Q1, Q2, path_P, path_Q).value
