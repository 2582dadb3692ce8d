"""Quadrature rules and sheet tracking along paths in the x-plane.

Rules come from numpy (Gauss-Legendre) and scipy (Gauss-Jacobi); this
module only adds the curve-specific plumbing: routing polylines around
branch points, continuing ``y`` along them, and integrating differentials.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .errors import NewtonStall, PathThroughSingularity, QuadratureNonConvergence


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=None)
def gauss_jacobi(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``(1 - xi)^alpha (1 + xi)^alpha`` on ``[-1, 1]``."""
    x, w = roots_jacobi(n, alpha, alpha)
    return x, w


def segment_distance(a: complex, b: complex, c: np.ndarray) -> np.ndarray:
    """Distance from points ``c`` to the segment ``[a, b]``."""
    c = np.asarray(c, dtype=complex)
    d = b - a
    if d == 0:
        return np.abs(c - a)
    s = np.clip(((c - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(a + s * d - c)


def route(x0: complex, x1: complex, obstacles: Sequence[complex], clearance: float, depth: int = 0) -> list[complex]:
    """Polyline from ``x0`` to ``x1`` keeping ``clearance`` from every obstacle.

    Endpoints themselves may be closer than ``clearance``; the interior of
    the path is pushed sideways around offending points.
    """
    obs = np.asarray([o for o in obstacles if abs(o - x0) > 1e-14 and abs(o - x1) > 1e-14], dtype=complex)
    if obs.size == 0 or depth > 12:
        return [x0, x1]
    d = segment_distance(x0, x1, obs)
    k = int(np.argmin(d))
    if d[k] >= clearance:
        return [x0, x1]
    c = obs[k]
    seg = x1 - x0
    s = ((c - x0) * np.conj(seg)).real / abs(seg) ** 2
    if s <= 0.0 or s >= 1.0:
        return [x0, x1]
    foot = x0 + s * seg
    normal = 1j * seg / abs(seg)
    side = 1.0 if ((foot - c) * np.conj(normal)).real >= 0 else -1.0
    via = c + side * normal * 1.6 * clearance
    left = route(x0, via, obstacles, clearance, depth + 1)
    right = route(via, x1, obstacles, clearance, depth + 1)
    return left[:-1] + right


class SheetTracker:
    """Analytic continuation of ``y`` on ``f(x, y) = 0`` by predictor-corrector Newton."""

    def __init__(self, curve):
        self.curve = curve
        self.f = curve.eval_f
        self.fx = curve.eval_fx
        self.fy = curve.eval_fy

    def newton(self, x: complex, y: complex, iters: int = 8) -> complex:
        for _ in range(iters):
            fy = self.fy(x, y)
            if fy == 0:
                raise NewtonStall("f_y vanished during continuation")
            dy = self.f(x, y) / fy
            y = y - dy
            if abs(dy) <= 1e-15 * (1 + abs(y)):
                break
        return y

    def step(self, x0: complex, y0: complex, x1: complex) -> complex:
        """Continue from ``(x0, y0)`` to ``x1``; the caller keeps steps short."""
        fy = self.fy(x0, y0)
        pred = y0 - self.fx(x0, y0) / fy * (x1 - x0)
        y1 = self.newton(x1, pred)
        # guard: the corrected value must be the root nearest the prediction
        roots = self.curve.y_roots(x1)
        k = int(np.argmin(np.abs(roots - y1)))
        others = np.delete(roots, k)
        if others.size and np.min(np.abs(others - y1)) < 2.0 * abs(y1 - y0) + 1e-300:
            raise NewtonStall("continuation step too long for the root separation")
        return y1

    def roots_batch(self, xs: np.ndarray) -> np.ndarray:
        """All ``y``-roots over each ``x`` (rows), from batched companion matrices plus one Newton polish."""
        xs = np.asarray(xs, dtype=complex)
        r = self.curve.r
        C = np.stack([np.polyval(self.curve.numeric_A[i], xs) for i in range(1, r + 1)], axis=-1)
        comp = np.zeros((len(xs), r, r), dtype=complex)
        comp[:, 0, :] = -C
        if r > 1:
            comp[:, np.arange(1, r), np.arange(r - 1)] = 1.0
        R = np.linalg.eigvals(comp)
        X = np.broadcast_to(xs[:, None], R.shape)
        fy = self.fy(X, R)
        ok = fy != 0
        R = np.where(ok, R - np.where(ok, self.f(X, R) / np.where(ok, fy, 1), 0), R)
        return R

    def along(self, xs: Sequence[complex], y0: complex) -> np.ndarray:
        """``y`` at each of ``xs`` (``xs[0]`` carries ``y0``), subdividing when needed.

        Each new value is the root nearest the first-order prediction and
        must be well separated from the other roots; otherwise the step is
        redone by guarded Newton continuation on halved steps.
        """
        xs = np.asarray(xs, dtype=complex)
        out = np.empty(len(xs), dtype=complex)
        y = complex(y0)
        out[0] = y
        if len(xs) == 1:
            return out
        R = self.roots_batch(xs)
        for k in range(1, len(xs)):
            xa, xb = complex(xs[k - 1]), complex(xs[k])
            fy = self.fy(xa, y)
            pred = y - self.fx(xa, y) / fy * (xb - xa) if fy != 0 else y
            d = np.abs(R[k] - pred)
            j = int(np.argmin(d))
            cand = complex(R[k, j])
            others = np.delete(R[k], j)
            if others.size == 0 or np.min(np.abs(others - cand)) >= 2.0 * abs(cand - y) + 4.0 * d[j]:
                y = cand
            else:
                y = self._continue(xa, y, xb, 0)
            out[k] = y
        return out

    def _continue(self, xa: complex, ya: complex, xb: complex, depth: int) -> complex:
        try:
            return self.step(xa, ya, xb)
        except NewtonStall:
            if depth > 30:
                raise
            xm = 0.5 * (xa + xb)
            ym = self._continue(xa, ya, xm, depth + 1)
            return self._continue(xm, ym, xb, depth + 1)


@dataclass
class PathIntegral:
    values: np.ndarray  # one entry per integrand
    y_end: complex
    vertices: list
    y_vertices: np.ndarray


def _pieces(a: complex, b: complex, obstacles: np.ndarray, ratio: float) -> list[tuple[complex, complex]]:
    """Split ``[a, b]`` so each piece is at most ``ratio`` times its distance to the obstacles."""
    if obstacles.size == 0:
        return [(a, b)]
    out = []
    stack = [(a, b)]
    while stack:
        p, q = stack.pop()
        dist = float(np.min(segment_distance(p, q, obstacles)))
        if dist <= 1e-13 * (1 + abs(p)):
            raise PathThroughSingularity(f"path segment [{p}, {q}] hits a singular point")
        if abs(q - p) > ratio * dist and len(out) + len(stack) < 20000:
            m = 0.5 * (p + q)
            stack.append((m, q))
            stack.append((p, m))
        else:
            out.append((p, q))
    return out


def integrate_path(
    curve,
    vertices: Sequence[complex],
    y0: complex,
    integrands: Callable[[np.ndarray, np.ndarray], np.ndarray],
    obstacles: Sequence[complex] = (),
    nodes: int = 16,
    ratio: float = 0.5,
) -> PathIntegral:
    """Integrate ``integrands(x, y) dx`` (shape ``(m, n)`` for ``n`` nodes) along a polyline.

    ``y`` starts at ``y0`` over ``vertices[0]`` and is continued node by node.
    Each straight piece is short compared with its distance to ``obstacles``
    (branch points and poles), so Gauss-Legendre converges geometrically.
    """
    tracker = SheetTracker(curve)
    obs = np.asarray(list(obstacles), dtype=complex)
    xi, wi = gauss_legendre(nodes)
    total = None
    y = complex(y0)
    yv = [y]
    for va, vb in zip(vertices[:-1], vertices[1:]):
        for p, q in _pieces(complex(va), complex(vb), obs, ratio):
            xs = 0.5 * (p + q) + 0.5 * (q - p) * xi
            ys = tracker.along(np.concatenate([[p], xs, [q]]), y)
            vals = np.asarray(integrands(xs, ys[1:-1]))
            contrib = vals @ wi * (0.5 * (q - p))
            total = contrib if total is None else total + contrib
            y = ys[-1]
        yv.append(y)
    if total is None:
        total = np.zeros(np.asarray(integrands(np.array([vertices[0]]), np.array([y0]))).shape[0], dtype=complex)
    return PathIntegral(np.asarray(total), y, list(vertices), np.array(yv))


def circle_integral(f: Callable[[np.ndarray], np.ndarray], center: complex, radius: float, n: int = 256) -> complex:
    """``(1 / 2 pi i) oint f(x) dx`` by the trapezoid rule, checked against ``n / 2`` nodes."""

    def trap(m: int) -> complex:
        th = 2 * np.pi * np.arange(m) / m
        x = center + radius * np.exp(1j * th)
        dx = 1j * radius * np.exp(1j * th)
        return complex(np.mean(f(x) * dx) / 1j)

    full, half = trap(n), trap(n // 2)
    if abs(full - half) > 1e-9 * max(1.0, abs(full)):
        raise QuadratureNonConvergence(f"circle quadrature not converged ({abs(full - half):.2e})")
    return full
