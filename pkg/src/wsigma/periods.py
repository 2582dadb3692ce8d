"""Homology cycles, period matrices, Abel maps and the Riemann constant.

The analytic tier covers cyclic models ``ytilde^r = F(x)``: every curve with
``r = 2`` (after ``ytilde = y + A_1 / 2``) and curves ``y^r = F(x)``.

Cycles.  For an edge ``(a, b)`` of a spanning tree of the branch points and
a sheet ``j``, the cycle runs from ``a`` to ``b`` on sheet ``j``, once
counter-clockwise around ``b``, back to ``a`` on the next sheet and once
clockwise around ``a``.  It is realised as an explicit closed polyline with
``y`` continued along it; intersection numbers are counted from crossings
whose lifts lie on the same sheet.

Periods.  On an edge, ``ytilde = ytilde_m (1 - xi^2)^{1/r} prod_c ((x - c)/(m - c))^{1/r}``
with ``x = m + xi (b - a)/2``, so each term ``P(x) ytilde^p`` of a
differential is integrated by Gauss-Jacobi with weight ``(1 - xi^2)^{p/r}``.
Half periods: ``omega' = (1/2) int_alpha nu^I``, ``eta' = -(1/2) int_alpha nu^II``.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree

from .curve import Poly2, WCurve, padd, pmul
from .errors import (
    AmbiguousCharacteristic,
    IdentityFailure,
    NotPositiveDefinite,
    PathThroughSingularity,
    QuadratureNonConvergence,
    SymplecticViolation,
)
from .kleinforms import DifferentialBasis, Differential, differential_bases
from .quadrature import SheetTracker, gauss_jacobi, integrate_path, route, segment_distance
from .series import expand_at_infinity

CACHE_VERSION = 1


# --------------------------------------------------------------------------
# cyclic model


@dataclass(frozen=True)
class CyclicForm:
    """``sum_k terms[k](x) ytilde^{k - r + 1} / r dx`` for a differential ``N dx / f_y``."""

    r: int
    terms: tuple  # terms[k] = coefficient list (increasing powers) of P_k


def cyclic_form(curve: WCurve, numerator: Poly2) -> CyclicForm:
    """Rewrite ``N(x, y) / f_y`` in ``ytilde``; ``f_y = r ytilde^{r-1}`` on the cyclic model."""
    F, shift = curve.cyclic_model
    r = curve.r
    s_poly: Poly2 = {(a, 0): c for a, c in enumerate(shift) if c}
    # y = ytilde + shift(x); powers of y in (x, ytilde)
    ypow: list[Poly2] = [{(0, 0): Fraction(1)}]
    ylin = padd({(0, 1): Fraction(1)}, s_poly)
    top = max((b for (_, b) in numerator), default=0)
    for _ in range(top):
        ypow.append(pmul(ypow[-1], ylin))
    acc: Poly2 = {}
    for (a, b), c in numerator.items():
        acc = padd(acc, pmul({(a, 0): c}, ypow[b]))
    # reduce ytilde^r = F(x)
    Fp: Poly2 = {(a, 0): c for a, c in enumerate(F) if c}
    while True:
        hi = {e: v for e, v in acc.items() if e[1] >= r}
        if not hi:
            break
        for e in hi:
            del acc[e]
        for (a, b), v in hi.items():
            acc = padd(acc, pmul({(a, b - r): v}, Fp))
    terms = []
    for k in range(r):
        col = {a: v for (a, b), v in acc.items() if b == k}
        deg = max(col, default=-1)
        terms.append(tuple(col.get(a, Fraction(0)) for a in range(deg + 1)))
    return CyclicForm(r, tuple(terms))


def _edge_integrals(curve: WCurve, forms: Sequence[CyclicForm], a: complex, b: complex, ym: complex, tol: float = 1e-13) -> np.ndarray:
    """``int_a^b`` of each form on the branch with ``ytilde(m) = ym``, ``m = (a + b)/2``."""
    c_all = curve.branch_points
    others = np.array([c for c in c_all if abs(c - a) > 1e-12 and abs(c - b) > 1e-12], dtype=complex)
    r = curve.r
    m = 0.5 * (a + b)
    half = 0.5 * (b - a)

    def run(n: int) -> np.ndarray:
        out = np.zeros(len(forms), dtype=complex)
        for k in range(r):
            p = k - r + 1
            if not any(len(f.terms[k]) for f in forms):
                continue
            xi, w = gauss_jacobi(n, p / r)
            x = m + half * xi
            logG = np.sum(np.log((x[:, None] - others[None, :]) / (m - others[None, :])), axis=1) if others.size else np.zeros_like(x)
            base = ym**p * np.exp((p / r) * logG) * w * half / r
            for i, f in enumerate(forms):
                coeffs = f.terms[k]
                if coeffs:
                    out[i] += np.sum(np.polyval(np.array([complex(c) for c in reversed(coeffs)]), x) * base)
        return out

    n = 48
    prev = run(n)
    while n < 1536:
        n *= 2
        cur = run(n)
        if np.max(np.abs(cur - prev)) <= tol * max(1.0, float(np.max(np.abs(cur)))):
            return cur
        prev = cur
    raise QuadratureNonConvergence(f"edge [{a}, {b}] did not converge")


# --------------------------------------------------------------------------
# cycles


@dataclass(frozen=True)
class Cycle:
    edge: tuple[int, int]
    sheet_out: int  # sheet index of ytilde at the edge midpoint on the outgoing leg
    sheet_back: int  # sheet index on the returning leg
    vertices: np.ndarray
    y: np.ndarray  # continued y at the vertices


@dataclass(frozen=True)
class CycleSystem:
    """Raw cycles, their intersection matrix and the symplectic change of basis.

    ``basis`` rows are integer combinations of raw cycles: rows ``0..g-1``
    are ``alpha_1..alpha_g`` and rows ``g..2g-1`` are ``beta_1..beta_g``.
    """

    cycles: tuple
    raw_intersection: np.ndarray
    basis: np.ndarray
    edges: tuple

    @property
    def genus(self) -> int:
        return len(self.cycles) // 2

    @property
    def intersection(self) -> np.ndarray:
        return self.basis @ self.raw_intersection @ self.basis.T

    def to_dict(self) -> dict:
        return {
            "edges": [list(e) for e in self.edges],
            "raw_cycles": [{"edge": list(c.edge), "sheets": [c.sheet_out, c.sheet_back]} for c in self.cycles],
            "raw_intersection": self.raw_intersection.tolist(),
            "symplectic_basis": self.basis.tolist(),
            "intersection": self.intersection.tolist(),
        }


def _spanning_edges(points: np.ndarray) -> list[tuple[int, int]]:
    d = np.abs(points[:, None] - points[None, :])
    tree = minimum_spanning_tree(d).tocoo()
    edges = sorted((int(min(i, j)), int(max(i, j))) for i, j in zip(tree.row, tree.col))
    return edges


def _sheet_index(curve: WCurve, x: complex, y: complex, a: complex, b: complex) -> int:
    """Index ``j`` with ``ytilde(m) = zeta^j ytilde_m0`` after continuing ``(x, y)`` to the midpoint."""
    m = 0.5 * (a + b)
    ym = SheetTracker(curve).along([x, m], y)[-1]
    F, shift = curve.cyclic_model
    yt = ym - np.polyval(np.array([complex(c) for c in reversed(shift)]), m)
    y0 = _reference_root(curve, m)
    ratio = yt / y0
    j = int(round(np.angle(ratio) / (2 * np.pi / curve.r))) % curve.r
    if abs(ratio - np.exp(2j * np.pi * j / curve.r)) > 1e-6:
        raise IdentityFailure("sheet identification failed")
    return j


def _reference_root(curve: WCurve, m: complex) -> complex:
    F, _ = curve.cyclic_model
    Fm = np.polyval(np.array([complex(c) for c in reversed(F)]), m)
    return complex(Fm ** (1.0 / curve.r))


def _y_from_tilde(curve: WCurve, x: complex, yt: complex) -> complex:
    _, shift = curve.cyclic_model
    return yt + complex(np.polyval(np.array([complex(c) for c in reversed(shift)]), x))


def _cycle_polyline(a: complex, b: complex, rho: float, delta: float, n_leg: int = 24, n_circ: int = 40) -> tuple[np.ndarray, int, int]:
    """Closed polyline; returns vertices and the indices of the two leg midpoints."""
    d = b - a
    u = d / abs(d)
    nrm = 1j * u
    m = 0.5 * (a + b)
    A0, B0 = a + rho * u, b - rho * u
    s = np.linspace(0, 1, n_leg + 1)
    # quadratic Bezier legs through m +/- delta n
    ctrl_out = 2 * (m + delta * nrm) - 0.5 * (A0 + B0)
    ctrl_back = 2 * (m - delta * nrm) - 0.5 * (A0 + B0)
    out_leg = (1 - s) ** 2 * A0 + 2 * s * (1 - s) * ctrl_out + s**2 * B0
    back_leg = (1 - s) ** 2 * B0 + 2 * s * (1 - s) * ctrl_back + s**2 * A0
    th = np.linspace(0, 2 * np.pi, n_circ + 1)
    circ_b = b + rho * np.exp(1j * (np.angle(-u) + th))  # ccw around b
    circ_a = a + rho * np.exp(1j * (np.angle(u) - th))  # cw around a
    verts = np.concatenate([out_leg, circ_b[1:], back_leg[1:], circ_a[1:]])
    i_out = n_leg // 2
    i_back = len(out_leg) + n_circ + n_leg // 2
    return verts, i_out, i_back


def homology_cycles(curve: WCurve) -> CycleSystem:
    """Cycles ``(edge, sheet)`` for a spanning tree of the branch points, reduced to a symplectic basis."""
    curve.require_cyclic()
    curve.require_smooth()
    pts = curve.branch_points
    r = curve.r
    edges = _spanning_edges(pts)
    dmin = float(np.min(np.abs(pts[:, None] - pts[None, :]) + np.eye(len(pts)) * 1e300))
    tracker = SheetTracker(curve)
    cycles = []
    idx = 0
    for (i, j) in edges:
        a, b = pts[i], pts[j]
        L = abs(b - a)
        for k in range(r - 1):
            rho = 0.06 * dmin * (1 + 0.13 * idx)
            delta = L * (0.12 + 0.09 * k + 0.011 * idx)
            verts, i_out, i_back = _cycle_polyline(a, b, rho, delta)
            # start on the sheet whose ytilde at the midpoint is zeta^k times the reference
            m = 0.5 * (a + b)
            yt_m = _reference_root(curve, m) * np.exp(2j * np.pi * k / r)
            y_m = _y_from_tilde(curve, m, yt_m)
            y_start = tracker.along([m, verts[i_out]], y_m)[-1]
            ys_fwd = tracker.along(verts[i_out:], y_start)
            ys_bwd = tracker.along(verts[: i_out + 1][::-1], y_start)[::-1]
            ys = np.concatenate([ys_bwd[:-1], ys_fwd])
            if abs(ys[-1] - ys[0]) > 1e-8 * (1 + abs(ys[0])):
                raise IdentityFailure("cycle does not close on the curve")
            s_out = _sheet_index(curve, verts[i_out], ys[i_out], a, b)
            s_back = _sheet_index(curve, verts[i_back], ys[i_back], a, b)
            cycles.append(Cycle((i, j), s_out, s_back, verts, ys))
            idx += 1
    K = _intersections(curve, cycles)
    basis = symplectic_basis(K)
    return CycleSystem(tuple(cycles), K, basis, tuple(edges))


def _intersections(curve: WCurve, cycles: Sequence[Cycle]) -> np.ndarray:
    n = len(cycles)
    K = np.zeros((n, n), dtype=int)
    tracker = SheetTracker(curve)
    for i in range(n):
        for j in range(i + 1, n):
            K[i, j] = _intersection_number(cycles[i], cycles[j], tracker)
            K[j, i] = -K[i, j]
    return K


def _intersection_number(c1: Cycle, c2: Cycle, tracker: SheetTracker) -> int:
    p1, q1 = c1.vertices[:-1], c1.vertices[1:]
    p2, q2 = c2.vertices[:-1], c2.vertices[1:]
    d1 = (q1 - p1)[:, None]
    d2 = (q2 - p2)[None, :]
    w = p2[None, :] - p1[:, None]
    den = (np.conj(d1) * d2).imag
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (np.conj(w) * d2).imag / den
        t = (np.conj(w) * d1).imag / den
    hit = (np.abs(den) > 0) & (s >= 0) & (s < 1) & (t >= 0) & (t < 1)
    total = 0
    for a, b in zip(*np.nonzero(hit)):
        X = p1[a] + s[a, b] * (q1[a] - p1[a])
        y1 = tracker.along([p1[a], X], c1.y[a])[-1]
        y2 = tracker.along([p2[b], X], c2.y[b])[-1]
        roots = tracker.curve.y_roots(X)
        if int(np.argmin(np.abs(roots - y1))) == int(np.argmin(np.abs(roots - y2))):
            total += int(np.sign(den[a, b]))
    return total


def symplectic_basis(K: np.ndarray) -> np.ndarray:
    """Integer unimodular ``B`` with ``B K B^T = [[0, 1], [-1, 0]]`` (blocks of size g)."""
    n = K.shape[0]
    if n % 2 or not np.array_equal(K, -K.T):
        raise SymplecticViolation("intersection matrix is not antisymmetric of even size")
    vecs = [np.eye(n, dtype=object)[i] for i in range(n)]
    Kobj = K.astype(object)

    def pair(u, v):
        return int(u @ Kobj @ v)

    alphas, betas = [], []
    while vecs:
        v = vecs.pop(0)
        while True:
            vals = [(abs(pair(v, u)), k) for k, u in enumerate(vecs) if pair(v, u) != 0]
            if not vals:
                raise SymplecticViolation("intersection form is degenerate")
            mval, k = min(vals)
            if mval == 1:
                break
            u = vecs[k]
            m = pair(v, u)
            changed = False
            for kk in range(len(vecs)):
                if kk != k:
                    q = pair(v, vecs[kk]) // m
                    if q:
                        vecs[kk] = vecs[kk] - q * u
                        changed = True
            if not changed:
                raise SymplecticViolation("intersection form is not unimodular")
        w = vecs.pop(k)
        if pair(v, w) == -1:
            w = -w
        newvecs = []
        for u in vecs:
            newvecs.append(u + pair(w, u) * v - pair(v, u) * w)
        vecs = newvecs
        alphas.append(v)
        betas.append(w)
    B = np.array(alphas + betas, dtype=object)
    J = B @ Kobj @ B.T
    g = n // 2
    Jstd = np.block([[np.zeros((g, g), dtype=int), np.eye(g, dtype=int)], [-np.eye(g, dtype=int), np.zeros((g, g), dtype=int)]])
    if not np.array_equal(J.astype(int), Jstd):
        raise SymplecticViolation("symplectic reduction failed")
    return B.astype(int)


# --------------------------------------------------------------------------
# period matrices


@dataclass(frozen=True)
class PeriodMatrices:
    """Half-period matrices; ``omega1[i, j] = (1/2) int_{alpha_j} nu^I_i``."""

    omega1: np.ndarray
    omega2: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray

    @property
    def genus(self) -> int:
        return self.omega1.shape[0]

    @cached_property
    def tau(self) -> np.ndarray:
        return np.linalg.solve(self.omega1, self.omega2)

    @property
    def legendre_matrix(self) -> np.ndarray:
        return self.omega2 @ self.eta1.T - self.omega1 @ self.eta2.T

    @property
    def legendre_residual(self) -> float:
        g = self.genus
        return float(np.max(np.abs(self.legendre_matrix - 0.5j * np.pi * np.eye(g))))

    @property
    def symplectic_residual(self) -> float:
        """``M J M^t = (2 pi / i) J`` for the full periods ``M = 2 [[w', w''], [e', e'']]``."""
        g = self.genus
        M = 2 * np.block([[self.omega1, self.omega2], [self.eta1, self.eta2]])
        J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]])
        return float(np.max(np.abs(M @ J @ M.T - (2 * np.pi / 1j) * J)))

    @property
    def tau_symmetry(self) -> float:
        return float(np.max(np.abs(self.tau - self.tau.T)))

    def validate(self, tol: float = 1e-6) -> None:
        if self.tau_symmetry > 1e-9 * max(1.0, float(np.max(np.abs(self.tau)))):
            raise SymplecticViolation(f"tau not symmetric ({self.tau_symmetry:.2e})")
        if np.min(np.linalg.eigvalsh(0.5 * (self.tau.imag + self.tau.imag.T))) <= 0:
            raise NotPositiveDefinite("Im tau is not positive definite")
        if self.legendre_residual > tol:
            raise SymplecticViolation(f"Legendre residual {self.legendre_residual:.2e}")

    def lattice_vector(self, m1: Sequence[int], m2: Sequence[int]) -> np.ndarray:
        return 2 * self.omega1 @ np.asarray(m1) + 2 * self.omega2 @ np.asarray(m2)

    def to_dict(self) -> dict:
        return {
            "omega1": _cmat(self.omega1),
            "omega2": _cmat(self.omega2),
            "eta1": _cmat(self.eta1),
            "eta2": _cmat(self.eta2),
            "tau": _cmat(self.tau),
            "legendre_residual": f"{self.legendre_residual:.17g}",
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PeriodMatrices":
        return cls(*(_cmat_load(d[k]) for k in ("omega1", "omega2", "eta1", "eta2")))

    def transformed(self, gamma: np.ndarray) -> "PeriodMatrices":
        """Periods in the basis ``(alpha', beta')`` with rows ``gamma @ (alpha, beta)`` (gamma symplectic)."""
        g = self.genus
        A, Bm, C, D = gamma[:g, :g], gamma[:g, g:], gamma[g:, :g], gamma[g:, g:]
        w1 = self.omega1 @ A.T + self.omega2 @ Bm.T
        w2 = self.omega1 @ C.T + self.omega2 @ D.T
        e1 = self.eta1 @ A.T + self.eta2 @ Bm.T
        e2 = self.eta1 @ C.T + self.eta2 @ D.T
        return PeriodMatrices(w1, w2, e1, e2)


def _cmat(a: np.ndarray) -> list:
    return [[{"re": f"{z.real:.17g}", "im": f"{z.imag:.17g}"} for z in row] for row in np.atleast_2d(a)]


def _cmat_load(rows) -> np.ndarray:
    return np.array([[complex(float(z["re"]), float(z["im"])) for z in row] for row in rows], dtype=complex)


def cycle_periods(curve: WCurve, cycles: CycleSystem, diffs: Sequence[Differential]) -> np.ndarray:
    """``int_{gamma} nu`` for every differential (rows) and symplectic cycle (columns)."""
    forms = [cyclic_form(curve, d.numerator) for d in diffs]
    pts = curve.branch_points
    r = curve.r
    per_edge: dict = {}
    raw = np.zeros((len(diffs), len(cycles.cycles)), dtype=complex)
    for n, c in enumerate(cycles.cycles):
        a, b = pts[c.edge[0]], pts[c.edge[1]]
        if c.edge not in per_edge:
            per_edge[c.edge] = _sheet_integrals(curve, forms, a, b)
        I = per_edge[c.edge]
        raw[:, n] = I[c.sheet_out] - I[c.sheet_back]
    return raw @ cycles.basis.T


def _sheet_integrals(curve: WCurve, forms: Sequence[CyclicForm], a: complex, b: complex) -> list[np.ndarray]:
    """Edge integrals on every sheet, from the reference sheet by the factors ``zeta^{j p}``."""
    r = curve.r
    m = 0.5 * (a + b)
    y0 = _reference_root(curve, m)
    out = []
    for j in range(r):
        zeta = np.exp(2j * np.pi * j / r)
        out.append(_edge_integrals(curve, forms, a, b, y0 * zeta))
    return out


def period_matrices(
    curve: WCurve,
    basis: DifferentialBasis | None = None,
    cycles: CycleSystem | None = None,
    extension: str = "P",
    cache_dir: str | os.PathLike | None = None,
    validate: bool = True,
) -> PeriodMatrices:
    """Half periods of ``nu^I`` and quasi-periods of ``nu^II`` on a symplectic basis."""
    path = None
    if cache_dir is not None and basis is None and cycles is None:
        path = os.path.join(os.fspath(cache_dir), f"periods-{curve.fingerprint()}-{extension}.json")
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            if data.get("version") == CACHE_VERSION:
                return PeriodMatrices.from_dict(data)
    B = basis or differential_bases(curve, extension)
    C = cycles or homology_cycles(curve)
    g = curve.genus
    I1 = cycle_periods(curve, C, B.nuI)
    I2 = cycle_periods(curve, C, B.nuII)
    pm = PeriodMatrices(0.5 * I1[:, :g], 0.5 * I1[:, g:], -0.5 * I2[:, :g], -0.5 * I2[:, g:])
    if validate:
        pm.validate()
    if path is not None:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(pm.to_dict() | {"version": CACHE_VERSION}, fh, sort_keys=True, indent=1)
        os.replace(tmp, path)
    return pm


# --------------------------------------------------------------------------
# Abel map


class AbelMap:
    """``wtilde(P) = int_infinity^P nu^I`` along a series patch at infinity then a routed polyline.

    The value is defined modulo the period lattice; a fixed routing rule
    makes it deterministic.
    """

    def __init__(self, curve: WCurve, nuI: Sequence[Differential], order: int | None = None):
        self.curve = curve
        self.nuI = list(nuI)
        self.E = expand_at_infinity(curve, order, exact=False)
        self.prims = [d.series(order, exact=False).integral() for d in self.nuI]
        R = max(1.0, float(np.max(np.abs(curve.branch_x)))) if len(curve.branch_x) else 1.0
        self.t0 = (64.0 * R) ** (-1.0 / curve.r)
        self.obstacles = list(curve.branch_x)
        sep = np.abs(np.subtract.outer(curve.branch_x, curve.branch_x))
        sep = sep[sep > 0]
        self.clearance = 0.3 * float(sep.min()) if sep.size else 0.3

    def _start(self, k: int):
        t = self.t0 * np.exp(2j * np.pi * (k + 0.25) / self.curve.r)
        x, y = self.E.x.evaluate(t), self.E.y.evaluate(t)
        y = SheetTracker(self.curve).newton(x, y)
        w = np.array([p.evaluate(t) for p in self.prims])
        return x, y, w

    def _integrand(self, xs, ys):
        return np.array([d.dx_coefficient(xs, ys) for d in self.nuI])

    def __call__(self, P) -> np.ndarray:
        """Abel image of a single finite point ``P = (x, y)``."""
        from .kleinforms import _candidate_routes

        x1, y1 = complex(P[0]), complex(P[1])
        self.curve.check_point(x1, y1, 1e-7)
        starts = [self._start(k) for k in range(self.curve.r)]
        routes = [_candidate_routes(self.curve, s[0], x1, self.obstacles) for s in starts]
        # straight routes from every start first, then routes looping around a branch point
        for layer in itertools.count():
            progressed = False
            for (x0, y0, w0), gen in zip(starts, routes):
                verts = next(gen, None)
                if verts is None:
                    continue
                progressed = True
                res = integrate_path(self.curve, verts, y0, self._integrand, self.obstacles)
                if abs(res.y_end - y1) <= 1e-7 * (1 + abs(y1)):
                    return w0 + res.values
            if not progressed:
                break
        raise PathThroughSingularity("no route from infinity reaches the requested sheet", P=P)

    def divisor(self, points: Sequence) -> np.ndarray:
        total = np.zeros(len(self.nuI), dtype=complex)
        for P in points:
            total = total + self(P)
        return total


def abel_map(curve: WCurve, points: Sequence, nuI: Sequence[Differential] | None = None) -> np.ndarray:
    """``wtilde(P_1, ..., P_k) = sum_i int_infinity^{P_i} nu^I``; the shifted map equals it on this tier."""
    if nuI is None:
        from .kleinforms import nuI_basis

        nuI = nuI_basis(curve)
    return AbelMap(curve, nuI).divisor(points)


def random_points(curve: WCurve, n: int, rng: np.random.Generator, radius: float = 1.5) -> list[tuple[complex, complex]]:
    """Random finite points away from branch points."""
    out = []
    bx = curve.branch_x
    while len(out) < n:
        x = complex(rng.normal() * radius, rng.normal() * radius)
        if bx.size and np.min(np.abs(bx - x)) < 0.15:
            continue
        ys = curve.y_roots(x)
        out.append((x, complex(ys[rng.integers(len(ys))])))
    return out


# --------------------------------------------------------------------------
# Riemann constant


@dataclass(frozen=True)
class RiemannConstantResult:
    delta1: np.ndarray
    delta2: np.ndarray
    max_value: float  # largest |theta| of the winner on the samples
    runner_up: float  # smallest max |theta| among the other characteristics
    scale: float


def riemann_constant(curve: WCurve, periods: PeriodMatrices, abel: AbelMap, samples: int = 40, seed: int = 7, tol: float = 1e-8) -> RiemannConstantResult:
    """The half characteristic with ``theta[delta]((2 omega')^{-1} wtilde(D)) = 0`` for ``D`` in ``S^{g-1} X``."""
    from itertools import product

    from .thetasigma import ThetaCharacteristic, theta

    g = curve.genus
    rng = np.random.default_rng(seed)
    A = np.linalg.inv(2 * periods.omega1)
    tau = periods.tau
    if g == 1:
        zs = [np.zeros(1, dtype=complex)]
    else:
        zs = [A @ abel.divisor(random_points(curve, g - 1, rng)) for _ in range(samples)]
    generic = A @ abel.divisor(random_points(curve, g, rng))
    chars = [np.array(c, dtype=float) / 2 for c in product((0, 1), repeat=2 * g)]
    scores = []
    for c in chars:
        ch = ThetaCharacteristic(c[:g], c[g:])
        vals = [abs(theta(z, tau, ch)) for z in zs]
        scale = max(1.0, abs(theta(generic, tau, ch)))
        scores.append((max(vals) / scale, ch, scale))
    scores.sort(key=lambda s: s[0])
    passing = [s for s in scores if s[0] < tol]
    if len(passing) > 1:
        raise AmbiguousCharacteristic(f"{len(passing)} characteristics vanish on the samples")
    if not passing:
        raise IdentityFailure(f"no characteristic vanishes on w(S^(g-1)X) (best {scores[0][0]:.2e})")
    best, ch, scale = passing[0]
    return RiemannConstantResult(ch.delta1, ch.delta2, best, scores[1][0] if len(scores) > 1 else np.inf, scale)
