"""Riemann theta with characteristics, the sigma function and its identity checks.

``theta[delta](z, tau) = sum_n exp(pi i {(n + d'')^t tau (n + d'') + 2 (n + d'')^t (z + d')})``

``sigma(u) = eps exp(u^t eta' omega'^-1 u / 2) theta[delta_X]((2 omega')^-1 u) / D``

with ``D = d_nat theta[delta_X]((2 omega')^-1 u)`` at ``u = 0`` along the
natural index of the curve.  Every check of :func:`verify_suite` returns a
:class:`CheckResult` with the observed residual and its tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .curve import WCurve
from .errors import IdentityFailure, NotPositiveDefinite, SuiteFailure, ValidationError
from .kleinforms import DifferentialBasis, differential_bases, find_route, pi_data
from .periods import AbelMap, CycleSystem, PeriodMatrices, homology_cycles, period_matrices, random_points, riemann_constant
from .schur import epsilon_sign, schur_in_u
from .semigroup import natural_index, young_diagram

THETA_EPS = 1e-14


# --------------------------------------------------------------------------
# theta


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Half-integer characteristic ``[delta''; delta']`` reduced into ``[0, 1)``."""

    delta1: np.ndarray  # delta'
    delta2: np.ndarray  # delta''

    def __post_init__(self):
        for name in ("delta1", "delta2"):
            v = np.mod(np.asarray(getattr(self, name), dtype=float), 1.0)
            object.__setattr__(self, name, v)

    @classmethod
    def zero(cls, g: int) -> "ThetaCharacteristic":
        return cls(np.zeros(g), np.zeros(g))

    @property
    def parity(self) -> int:
        """``+1`` for even, ``-1`` for odd: ``theta[delta](-z) = parity * theta[delta](z)``."""
        return 1 if int(round(4 * float(self.delta1 @ self.delta2))) % 2 == 0 else -1

    def to_dict(self) -> dict:
        return {"delta1": [f"{x:g}" for x in self.delta1], "delta2": [f"{x:g}" for x in self.delta2], "parity": self.parity}


def _check_tau(tau: np.ndarray) -> np.ndarray:
    Y = 0.5 * (tau.imag + tau.imag.T)
    try:
        return np.linalg.cholesky(Y)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Im tau is not positive definite") from exc


def _radius(g: int, nderiv: int, eps: float) -> float:
    # terms outside the ellipsoid are below exp(-pi R^2) times a polynomial in R
    return float(np.sqrt((np.log(1.0 / eps) + 2.0 * (g + nderiv) + 4.0) / np.pi)) + 0.5


def _enumerate(T: np.ndarray, R: float) -> np.ndarray:
    """Integer points ``m`` with ``|T m| <= R`` (``T`` upper triangular), by coordinate bounding."""
    g = T.shape[0]
    out: list[list[int]] = []
    m = [0] * g

    def rec(i: int, rem: float) -> None:
        if i < 0:
            out.append(list(m))
            return
        c = -sum(T[i, j] * m[j] for j in range(i + 1, g)) / T[i, i]
        w = np.sqrt(max(rem, 0.0)) / T[i, i]
        for k in range(int(np.ceil(c - w)), int(np.floor(c + w)) + 1):
            m[i] = k
            rec(i - 1, rem - (T[i, i] * (k - c)) ** 2)
        m[i] = 0

    rec(g - 1, R * R)
    return np.array(out, dtype=float).reshape(-1, g)


@lru_cache(maxsize=64)
def _offsets(tau_key: bytes, g: int, R: float) -> np.ndarray:
    tau = np.frombuffer(tau_key, dtype=complex).reshape(g, g)
    T = _check_tau(tau).T
    # enlarge by the image of the unit cube so rounding the centre loses nothing
    pad = 0.5 * float(np.sum(np.linalg.norm(T, axis=0)))
    return _enumerate(T, R + pad)


def _directions(derivs: Sequence, g: int) -> list[np.ndarray]:
    out = []
    for d in derivs:
        if isinstance(d, (int, np.integer)):
            v = np.zeros(g, dtype=complex)
            v[int(d)] = 1.0
            out.append(v)
        else:
            out.append(np.asarray(d, dtype=complex).reshape(g))
    return out


def theta(z, tau, char: ThetaCharacteristic | None = None, derivs: Sequence = (), eps: float = THETA_EPS) -> complex:
    """Theta with characteristic and directional derivatives.

    Parameters
    ----------
    z : array_like, shape (g,)
    tau : array_like, shape (g, g)
        Symmetric with positive definite imaginary part.
    char : ThetaCharacteristic, optional
        Defaults to the zero characteristic.
    derivs : sequence
        Each entry is a 0-based coordinate index or a direction vector; the
        result is the product of the corresponding directional derivatives.
    eps : float
        Relative truncation target for the ellipsoid sum.
    """
    tau = np.asarray(tau, dtype=complex)
    g = tau.shape[0]
    z = np.asarray(z, dtype=complex).reshape(g)
    char = char or ThetaCharacteristic.zero(g)
    Y = 0.5 * (tau.imag + tau.imag.T)
    _check_tau(tau)
    dirs = _directions(derivs, g)
    b = np.linalg.solve(Y, z.imag)
    centre = -(char.delta2 + b)
    R = _radius(g, len(dirs), eps)
    n = _offsets(np.ascontiguousarray(tau).tobytes(), g, round(R, 6)) + np.round(centre)
    v = n + char.delta2
    E = 1j * np.pi * (np.einsum("ni,ij,nj->n", v, tau, v) + 2 * v @ (z + char.delta1))
    pref = np.ones(len(v), dtype=complex)
    for d in dirs:
        pref = pref * (2j * np.pi * (v @ d))
    top = float(np.max(E.real))
    return complex(np.exp(top) * np.sum(pref * np.exp(E - top)))


# --------------------------------------------------------------------------
# sigma


@dataclass(frozen=True)
class SigmaContext:
    """Everything ``sigma`` needs; immutable once built.

    ``scale`` multiplies the defining formula; it is 1 unless the context
    was produced by :meth:`schur_normalized`.
    """

    curve: WCurve = field(repr=False)
    basis: DifferentialBasis = field(repr=False)
    periods: PeriodMatrices
    characteristic: ThetaCharacteristic
    epsilon: int
    natural_index: tuple
    normalization: complex
    abel: AbelMap = field(repr=False)
    extension: str = "P"
    scale: complex = 1.0

    @property
    def genus(self) -> int:
        return self.periods.genus

    @cached_property
    def A(self) -> np.ndarray:
        """``(2 omega')^-1``: maps ``u`` to the theta argument."""
        return np.linalg.inv(2 * self.periods.omega1)

    @cached_property
    def quadratic_form(self) -> np.ndarray:
        """``eta' omega'^-1``, symmetric."""
        return self.periods.eta1 @ np.linalg.inv(self.periods.omega1)

    def theta_u(self, u, derivs: Sequence[int] = ()) -> complex:
        """``theta[delta_X]((2 omega')^-1 u)`` with 0-based ``u``-derivatives."""
        dirs = [self.A[:, j] for j in derivs]
        return theta(self.A @ np.asarray(u, dtype=complex), self.periods.tau, self.characteristic, dirs)

    def sigma(self, u) -> complex:
        u = np.asarray(u, dtype=complex).reshape(self.genus)
        q = 0.5 * u @ self.quadratic_form @ u
        return complex(self.scale * self.epsilon * np.exp(q) * self.theta_u(u) / self.normalization)

    __call__ = sigma

    def schur_normalized(self, **fit_options) -> "SigmaContext":
        """Context rescaled so the fitted leading Schur coefficient is exactly 1."""
        fit = schur_fit(self, **fit_options)
        return replace(self, scale=self.scale / fit.factor)

    def with_periods(self, periods: PeriodMatrices) -> "SigmaContext":
        """Same curve and differentials, another symplectic homology basis."""
        return build_context(self.curve, self.extension, basis=self.basis, periods=periods, abel=self.abel)

    def to_dict(self) -> dict:
        return {
            "genus": self.genus,
            "characteristic": self.characteristic.to_dict(),
            "epsilon": self.epsilon,
            "natural_index": list(self.natural_index),
            "normalization": _c(self.normalization),
            "scale": _c(self.scale),
            "periods": self.periods.to_dict(),
        }


def _c(z: complex) -> dict:
    z = complex(z)
    return {"re": f"{z.real:.17g}", "im": f"{z.imag:.17g}"}


def build_context(
    curve: WCurve,
    extension: str = "P",
    cache_dir=None,
    basis: DifferentialBasis | None = None,
    periods: PeriodMatrices | None = None,
    abel: AbelMap | None = None,
    samples: int = 40,
    order: int | None = None,
) -> SigmaContext:
    """Periods, Riemann constant characteristic, sign and normalization for ``sigma``."""
    B = basis or differential_bases(curve, extension)
    pm = periods or period_matrices(curve, basis=B if cache_dir is None else None, extension=extension, cache_dir=cache_dir)
    ab = abel or AbelMap(curve, B.nuI, order)
    rc = riemann_constant(curve, pm, ab, samples=samples)
    char = ThetaCharacteristic(rc.delta1, rc.delta2)
    H = curve.semigroup
    lam = young_diagram(H)
    eps = epsilon_sign(lam, 0).epsilon
    nat = natural_index(H, 0)
    ctx = SigmaContext(curve, B, pm, char, eps, nat, 1.0, ab, extension)
    D = ctx.theta_u(np.zeros(curve.genus), [i - 1 for i in nat])
    if abs(D) < 1e-10:
        raise IdentityFailure("normalizing theta derivative vanishes", value=abs(D))
    return replace(ctx, normalization=D)


def sigma(ctx: SigmaContext, u) -> complex:
    return ctx.sigma(u)


# --------------------------------------------------------------------------
# Taylor data


def taylor_blocks(ctx: SigmaContext, v: np.ndarray, degrees: Iterable[int], rho: float = 0.6, nodes: int = 64) -> dict[int, complex]:
    """Weighted-homogeneous blocks ``B_d(v)`` of ``sigma(eps^w v) = sum_d eps^d B_d(v)`` by FFT on ``|eps| = rho``."""
    w = np.array(_u_weights(ctx.curve), dtype=float)
    k = np.arange(nodes)
    e = rho * np.exp(2j * np.pi * k / nodes)
    h = np.array([ctx.sigma(ei**w * v) for ei in e])
    return {d: complex(np.mean(h * np.exp(-2j * np.pi * k * d / nodes)) / rho**d) for d in degrees}


def _u_weights(curve: WCurve) -> list[int]:
    """Positive grading of ``u_i``: ``Lambda_i + g - i``, the i-th largest gap."""
    lam = young_diagram(curve.semigroup)
    g = lam.length
    return [lam.rows[i - 1] + g - i for i in range(1, g + 1)]


@dataclass(frozen=True)
class SchurFit:
    monomials: tuple
    fitted: np.ndarray
    expected: np.ndarray
    factor: complex  # fitted / expected on the first monomial
    relative_error: float
    lower_blocks: float  # largest lower-degree block relative to the leading one

    def to_dict(self) -> dict:
        return {
            "monomials": [list(m) for m in self.monomials],
            "fitted": [_c(z) for z in self.fitted],
            "expected": [f"{float(x):.17g}" for x in self.expected],
            "factor": _c(self.factor),
            "relative_error": f"{self.relative_error:.3e}",
            "lower_blocks": f"{self.lower_blocks:.3e}",
        }


def schur_fit(ctx: SigmaContext, samples: int | None = None, rho: float = 0.6, seed: int = 3) -> SchurFit:
    """Least-squares fit of the lowest weighted block of ``sigma`` against ``S_Lambda(u)``."""
    lam = young_diagram(ctx.curve.semigroup)
    S = schur_in_u(lam)
    w = _u_weights(ctx.curve)
    size = lam.size
    monos = [a for a in itertools.product(*(range(size // wi + 1) for wi in w)) if sum(x * y for x, y in zip(a, w)) == size]
    monos.sort(key=lambda a: (tuple(-x for x in a)))
    rng = np.random.default_rng(seed)
    n = samples or max(6, 3 * len(monos))
    rows, rhs, lower = [], [], 0.0
    for _ in range(n):
        v = np.exp(2j * np.pi * rng.random(ctx.genus)) * (0.5 + rng.random(ctx.genus))
        blocks = taylor_blocks(ctx, v, range(size + 1), rho)
        lead = blocks[size]
        rows.append([np.prod(v ** np.array(a)) for a in monos])
        rhs.append(lead)
        lower = max(lower, max((abs(blocks[d]) for d in range(size)), default=0.0) / max(abs(lead), 1e-300))
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    expected = np.array([float(S.terms.get(tuple(a), 0)) for a in monos])
    i0 = int(np.argmax(np.abs(expected)))
    factor = coef[i0] / expected[i0]
    rel = float(np.linalg.norm(coef / factor - expected) / np.linalg.norm(expected))
    return SchurFit(tuple(tuple(a) for a in monos), coef, expected, complex(factor), rel, float(lower))


def weierstrass_sigma_coefficients(g2: complex, g3: complex, degree: int) -> np.ndarray:
    """Taylor coefficients of the Weierstrass sigma function up to ``u^degree``.

    Uses the classical recurrence
    ``a_{m,n} = 3(m+1) a_{m+1,n-1} + 16/3 (n+1) a_{m-2,n+1} - 1/3 (2m+3n-1)(4m+6n-1) a_{m-1,n}``
    for ``sigma = sum a_{m,n} (g2/2)^m (2 g3)^n u^{4m+6n+1} / (4m+6n+1)!``.
    """
    from math import factorial

    a: dict[tuple[int, int], float] = {(0, 0): 1.0}

    def get(m, n):
        return a.get((m, n), 0.0) if m >= 0 and n >= 0 else 0.0

    out = np.zeros(degree + 1, dtype=complex)
    for total in range(0, degree):
        for n in range(0, total // 6 + 1):
            rem = total - 6 * n
            if rem % 4:
                continue
            m = rem // 4
            if (m, n) != (0, 0):
                a[(m, n)] = 3 * (m + 1) * get(m + 1, n - 1) + 16.0 / 3 * (n + 1) * get(m - 2, n + 1) - (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) / 3.0 * get(m - 1, n)
            k = 4 * m + 6 * n + 1
            if k <= degree:
                out[k] += a[(m, n)] * (g2 / 2) ** m * (2 * g3) ** n / factorial(k)
    return out


def sigma_taylor_1d(ctx: SigmaContext, degree: int, rho: float = 1.0, nodes: int = 64) -> np.ndarray:
    """Taylor coefficients of ``sigma`` for genus one by FFT on ``|u| = rho``."""
    if ctx.genus != 1:
        raise ValidationError("one-variable Taylor coefficients need genus 1")
    k = np.arange(nodes)
    u = rho * np.exp(2j * np.pi * k / nodes)
    h = np.array([ctx.sigma([x]) for x in u])
    return np.array([np.mean(h * np.exp(-2j * np.pi * k * d / nodes)) / rho**d for d in range(degree + 1)])


# --------------------------------------------------------------------------
# verification suite


@dataclass(frozen=True)
class CheckResult:
    check: str
    residual: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)

    def to_dict(self) -> dict:
        return {"check": self.check, "residual": f"{self.residual:.3e}", "tolerance": f"{self.tolerance:.1e}", "pass": self.passed} | (
            {"details": self.details} if self.details else {}
        )


def _random_u(ctx: SigmaContext, rng: np.random.Generator) -> np.ndarray:
    # a random point in a fundamental cell, centred on the origin
    a = rng.random(ctx.genus) - 0.5
    b = rng.random(ctx.genus) - 0.5
    return ctx.periods.lattice_vector(a, b)


def check_translation(ctx: SigmaContext, samples: int = 20, tol: float = 1e-8, seed: int = 11) -> CheckResult:
    """``sigma(u + l) = sigma(u) exp(L(u + l/2, l)) chi(l)`` on all ``2g`` generators."""
    pm = ctx.periods
    g = ctx.genus
    d1, d2 = ctx.characteristic.delta1, ctx.characteristic.delta2
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = _random_u(ctx, rng)
        su = ctx.sigma(u)
        for k in range(2 * g):
            l1 = np.zeros(g)
            l2 = np.zeros(g)
            (l1 if k < g else l2)[k % g] = 1
            ell = pm.lattice_vector(l1, l2)

            def L(a, l1=l1, l2=l2):
                return 2 * a @ (pm.eta1 @ l1 + pm.eta2 @ l2)

            chi = np.exp(1j * np.pi * (2 * (l1 @ d2 - l2 @ d1) + l1 @ l2))
            lhs = ctx.sigma(u + ell)
            rhs = su * np.exp(L(u + 0.5 * ell)) * chi
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return CheckResult("translation", worst, tol, {"samples": samples})


def check_parity(ctx: SigmaContext, samples: int = 50, tol: float = 1e-9, seed: int = 5) -> CheckResult:
    """``sigma(-u) / sigma(u)`` is the same sign at every sample."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(samples):
        u = _random_u(ctx, rng)
        ratios.append(ctx.sigma(-u) / ctx.sigma(u))
    ratios = np.array(ratios)
    sign = 1.0 if np.mean(ratios.real) > 0 else -1.0
    return CheckResult("parity", float(np.max(np.abs(ratios - sign))), tol, {"sign": int(sign), "samples": samples})


def check_schur(ctx: SigmaContext, tol: float = 1e-6, **opts) -> CheckResult:
    """Lowest weighted block of ``sigma`` against ``S_Lambda(u)``."""
    fit = schur_fit(ctx, **opts)
    return CheckResult("schur", max(fit.relative_error, fit.lower_blocks), tol, fit.to_dict())


def check_quadratic_form(ctx: SigmaContext, tol: float = 1e-9) -> CheckResult:
    K = ctx.quadratic_form
    return CheckResult("quadratic_form", float(np.max(np.abs(K - K.T)) / max(1.0, float(np.max(np.abs(K))))), tol)


def check_legendre(ctx: SigmaContext, tol: float = 1e-6) -> CheckResult:
    pm = ctx.periods
    return CheckResult("legendre", pm.legendre_residual, tol, {"symplectic_residual": f"{pm.symplectic_residual:.3e}", "tau_symmetry": f"{pm.tau_symmetry:.3e}"})


def jrfr_sides(ctx: SigmaContext, P, Q, Ps: Sequence, Pps: Sequence) -> tuple[complex, complex]:
    """Both sides of the fundamental relation for one point tuple.

    The left side is ``exp(sum_i Pi^{P,Q}_{P_i,P'_i})``; ``int_Q^P nu^I`` and
    ``int_{P'_i}^{P_i} nu^I`` are taken along the same paths as ``Pi`` so the
    right side sees consistent lifts.
    """
    curve = ctx.curve
    B = ctx.basis
    fibres = [p[0] for p in list(Ps) + list(Pps)]
    path_P = find_route(curve, Q, P, fibres)
    total = 0j
    a = None
    b = np.zeros(ctx.genus, dtype=complex)
    for Pi_, Ppi in zip(Ps, Pps):
        data = pi_data(B, P, Q, Pi_, Ppi, path_P=path_P)
        total += data.value
        a = data.abel_P
        b = b + data.abel_Q
    z = ctx.abel(P) - ctx.abel.divisor(Ps)
    lhs = np.exp(total)
    rhs = ctx.sigma(z) * ctx.sigma(z - a + b) / (ctx.sigma(z - a) * ctx.sigma(z + b))
    return complex(lhs), complex(rhs)


def check_jrfr(ctx: SigmaContext, tuples: int = 5, tol: float = 1e-6, seed: int = 23) -> CheckResult:
    rng = np.random.default_rng(seed)
    g = ctx.genus
    worst = 0.0
    for _ in range(tuples):
        pts = random_points(ctx.curve, 2 + 2 * g, rng, radius=1.2)
        lhs, rhs = jrfr_sides(ctx, pts[0], pts[1], pts[2 : 2 + g], pts[2 + g :])
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    return CheckResult("rjfr", worst, tol, {"tuples": tuples})


def check_kempf(ctx: SigmaContext, k: int | None = None, samples: int = 10, zero_tol: float = 1e-7, nonzero_floor: float = 1e-3, seed: int = 31) -> CheckResult:
    """On ``w(S^k X)``: derivatives of order below ``n_k`` vanish, the natural one does not."""
    g = ctx.genus
    ks = [k] if k is not None else list(range(g))
    rng = np.random.default_rng(seed)
    worst_zero, smallest = 0.0, np.inf
    H = ctx.curve.semigroup
    for kk in ks:
        nat = natural_index(H, kk)
        nk = len(nat)
        for _ in range(samples if kk > 0 else 1):
            u = ctx.abel.divisor(random_points(ctx.curve, kk, rng)) if kk > 0 else np.zeros(g, dtype=complex)
            for m in range(nk):
                for I in itertools.combinations_with_replacement(range(g), m):
                    worst_zero = max(worst_zero, abs(ctx.theta_u(u, I)))
            smallest = min(smallest, abs(ctx.theta_u(u, [i - 1 for i in nat])))
    residual = max(worst_zero / zero_tol, nonzero_floor / max(smallest, 1e-300))
    return CheckResult("kempf", residual, 1.0, {"max_low_order": f"{worst_zero:.3e}", "min_natural": f"{smallest:.3e}", "strata": ks})


SUITES = {
    "translation": check_translation,
    "parity": check_parity,
    "schur": check_schur,
    "rjfr": check_jrfr,
    "kempf": check_kempf,
    "legendre": check_legendre,
}


def verify_suite(ctx: SigmaContext, which: Iterable[str], raise_on_failure: bool = False, tolerance: float | None = None) -> list[CheckResult]:
    """Run the named checks; ``tolerance`` overrides each check's default."""
    results = []
    for name in which:
        if name not in SUITES:
            raise ValidationError(f"unknown check {name!r}; choose from {sorted(SUITES)}")
        fn = SUITES[name]
        kwargs = {}
        if tolerance is not None and name != "kempf":
            kwargs["tol"] = tolerance
        results.append(fn(ctx, **kwargs))
    if raise_on_failure and not all(r.passed for r in results):
        raise SuiteFailure("verification failed", table=[r.to_dict() for r in results])
    return results
