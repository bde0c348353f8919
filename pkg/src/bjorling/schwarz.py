"""Schwarz solution of the planar-geodesic Bjorling problem.

Given a regular planar curve c, the holomorphic null triple

    Phi(z) = (x'(z), y'(z), i*sqrt(x'(z)^2 + y'(z)^2))

integrates to the unique minimal surface through c with the in-plane normal:
f(z) = c(t0) + Re  int_{t0}^{z} Phi dw.  The square root carries the strip
branch from the continuation module (positive on the real axis), so the third
component is i*(positive) there and the s = 0 grid row reproduces the curve.

Quadrature is an adaptive embedded Gauss pair (7/15 nodes) per polyline
segment; the integrand is entire inside the clamped strip, so panels almost
never split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import continuation
from .continuation import (
    DEFAULT_REFINEMENT,
    BranchValue,
    PathPolyline,
    derivative_series,
    nearest_zero_distance,
    speed_squared,
    strip_sqrt,
)
from .curves import InvalidCurveParameters, PlanarCurve, regularity_margin

MAX_QUAD_DEPTH = 20
DEFAULT_QUAD_TOL = 1e-11

_G7_NODES, _G7_WEIGHTS = np.polynomial.legendre.leggauss(7)
_G15_NODES, _G15_WEIGHTS = np.polynomial.legendre.leggauss(15)


class QuadratureFailure(RuntimeError):
    """Adaptive refinement exceeded the maximum depth without converging."""


class StripTooWide(ValueError):
    """Requested |Im z| exceeds 0.9x the distance to the nearest speed^2 zero."""


def _weighted_sum(weights, values):
    # fixed-order accumulation: bitwise reproducible independent of array shape
    out = weights[0] * values[0]
    for w, v in zip(weights[1:], values[1:]):
        out = out + w * v
    return out


def _quad_recursive(f, a: complex, b: complex, tol: float, depth: int):
    scale = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    v7 = f(mid + scale * _G7_NODES)
    v15 = f(mid + scale * _G15_NODES)
    i7 = scale * _weighted_sum(_G7_WEIGHTS, v7)
    i15 = scale * _weighted_sum(_G15_WEIGHTS, v15)
    err = float(np.max(np.abs(i15 - i7)))
    floor = 5e-16 * float(np.max(np.abs(i15))) if i15.size else 0.0
    if err <= max(tol, floor) or abs(b - a) < 1e-14:
        return i15
    if depth >= MAX_QUAD_DEPTH:
        raise QuadratureFailure(
            "adaptive quadrature did not reach tol=%g between %s and %s" % (tol, a, b))
    left = _quad_recursive(f, a, mid, 0.5 * tol, depth + 1)
    right = _quad_recursive(f, mid, b, 0.5 * tol, depth + 1)
    return left + right


def integrate_segment(f, a, b, tol: float = DEFAULT_QUAD_TOL):
    """Integrate a vector integrand f: (n,) complex -> (n, m) along [a, b]."""
    return _quad_recursive(f, complex(a), complex(b), tol, 0)


class HolomorphicTriple:
    """The null curve Phi = (x', y', i*sqrt(x'^2+y'^2)) with the strip branch.

    phi1^2 + phi2^2 + phi3^2 = 0 holds identically; on the real axis phi3 is
    purely imaginary with positive imaginary part.
    """

    def __init__(self, curve: PlanarCurve, refinement: float = DEFAULT_REFINEMENT):
        margin = regularity_margin(curve, 256)
        if margin <= 0:
            raise InvalidCurveParameters(
                "curve %s is not regular (speed^2 min = %g)" % (curve.label, margin))
        self.curve = curve
        self.refinement = refinement
        self._dx, self._dy = derivative_series(curve)

    def velocity(self, z):
        return self._dx(z), self._dy(z)

    def axis_values(self, t):
        """Phi on the real axis; phi3 = i*positive sqrt, no continuation needed."""
        t = np.asarray(t, dtype=float)
        vx = self._dx(t)
        vy = self._dy(t)
        w = np.sqrt(vx * vx + vy * vy)
        return np.stack([vx.astype(complex), vy.astype(complex), 1j * w], axis=-1)

    def __call__(self, z):
        """Phi at a scalar or 1-d array of strip points (vertical continuation)."""
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        vx = self._dx(zs)
        vy = self._dy(zs)
        w = np.array([strip_sqrt(self.curve, p, self.refinement) for p in zs])
        out = np.stack([vx, vy, 1j * w], axis=-1)
        if np.isscalar(z) or np.asarray(z).ndim == 0:
            return out[0]
        return out

    def sqrt_grid(self, t_vals, s_vals):
        """Strip-branch sqrt(speed^2) on the t x s grid, marched per s level.

        Every column starts from the positive axis value; levels move away
        from s = 0 so each step references the level one closer to the axis.
        Columns whose step rotates the argument by >= pi/4 fall back to the
        scalar halving tracker.
        """
        t_vals = np.asarray(t_vals, dtype=float)
        s_vals = np.asarray(s_vals, dtype=float)
        nt, ns = len(t_vals), len(s_vals)
        sp_axis = speed_squared(self.curve, t_vals)
        w_axis = np.sqrt(np.asarray(sp_axis, dtype=float))
        if np.any(w_axis <= 0):
            raise InvalidCurveParameters("speed vanishes on the axis")
        W = np.empty((ns, nt), dtype=complex)
        order = np.argsort(np.abs(s_vals), kind="stable")
        prev_by_sign = {1: (0.0, w_axis.astype(complex)), -1: (0.0, w_axis.astype(complex))}
        f = lambda zz: speed_squared(self.curve, zz)
        for idx in order:
            s = s_vals[idx]
            if s == 0.0:
                W[idx] = w_axis
                continue
            sign = 1 if s > 0 else -1
            s_prev, w_prev = prev_by_sign[sign]
            cand = np.sqrt(speed_squared(self.curve, t_vals + 1j * s).astype(complex))
            flip = (cand * np.conj(w_prev)).real < 0
            cand[flip] = -cand[flip]
            bad = np.abs(np.angle(cand / w_prev)) >= continuation.ARG_STEP_LIMIT
            for j in np.nonzero(bad)[0]:
                cand[j] = continuation._advance_sqrt(
                    f, complex(t_vals[j], s_prev), complex(t_vals[j], s), complex(w_prev[j]))
            W[idx] = cand
            prev_by_sign[sign] = (s, cand)
        return W

    def grid_values(self, t_vals, s_vals):
        """Phi on the grid, shape (ns, nt, 3); rows follow s_vals order."""
        t_vals = np.asarray(t_vals, dtype=float)
        s_vals = np.asarray(s_vals, dtype=float)
        W = self.sqrt_grid(t_vals, s_vals)
        Z = t_vals[None, :] + 1j * s_vals[:, None]
        phi = np.empty((len(s_vals), len(t_vals), 3), dtype=complex)
        phi[:, :, 0] = self._dx(Z)
        phi[:, :, 1] = self._dy(Z)
        phi[:, :, 2] = 1j * W
        return phi


def phi(curve: PlanarCurve) -> HolomorphicTriple:
    """Null triple of the Schwarz solution for a regular planar curve."""
    return HolomorphicTriple(curve)


def planar_normal(curve: PlanarCurve, t):
    """Unit normal (-y', x', 0)/|c'| of the Bjorling data along the curve."""
    dx, dy = derivative_series(curve)
    vx = np.asarray(dx(np.asarray(t, dtype=float)), dtype=float)
    vy = np.asarray(dy(np.asarray(t, dtype=float)), dtype=float)
    speed = np.hypot(vx, vy)
    return np.stack([-vy / speed, vx / speed, 0.0 * speed], axis=-1)


def schwarz_integrate(triple: HolomorphicTriple, z0, z1, path: PathPolyline | None = None,
                      tol: float = DEFAULT_QUAD_TOL) -> np.ndarray:
    """Re integral of Phi from z0 to z1 along a polyline (default: straight).

    The sqrt branch is continued along the actual path, so homotopic paths in
    the zero-free strip agree and paths winding around a speed^2 zero pick up
    the monodromy sign.
    """
    z0, z1 = complex(z0), complex(z1)
    if path is None:
        if z0 == z1:
            return np.zeros(3)
        path = PathPolyline(vertices=(z0, z1))
    if complex(path.vertices[0]) != z0 or complex(path.vertices[-1]) != z1:
        raise ValueError("path endpoints must match z0 and z1")
    seed = BranchValue(point=z0, value=strip_sqrt(triple.curve, z0, triple.refinement))
    chain = continuation.sqrt_along_path(triple.curve, path, seed)
    pts = np.array([bv.point for bv in chain], dtype=complex)
    vals = np.array([bv.value for bv in chain], dtype=complex)
    dx, dy = triple._dx, triple._dy

    def integrand(zs):
        zs = np.asarray(zs, dtype=complex)
        cand = np.sqrt(speed_squared(triple.curve, zs).astype(complex))
        idx = np.abs(zs[:, None] - pts[None, :]).argmin(axis=1)
        ref = vals[idx]
        flip = (cand * np.conj(ref)).real < 0
        cand[flip] = -cand[flip]
        return np.stack([dx(zs), dy(zs), 1j * cand], axis=-1)

    n_seg = len(path.vertices) - 1
    total = np.zeros(3, dtype=complex)
    for a, b in zip(path.vertices, path.vertices[1:]):
        total = total + integrate_segment(integrand, a, b, tol / n_seg)
    return np.real(total)


def surface_point(triple: HolomorphicTriple, t: float, s: float,
                  tol: float = DEFAULT_QUAD_TOL) -> np.ndarray:
    """Anchored surface value f(t + i s) = c(t) + Re int_t^{t+is} Phi dw."""
    base = np.asarray(triple.curve.point3d(float(t)), dtype=float)
    if s == 0.0:
        return base
    dx, dy = triple._dx, triple._dy
    curve = triple.curve
    w_ref = [complex(strip_sqrt(curve, float(t), triple.refinement))]

    def integrand(zs):
        zs = np.asarray(zs, dtype=complex)
        cand = np.sqrt(speed_squared(curve, zs).astype(complex))
        flip = (cand * np.conj(w_ref[0])).real < 0
        cand[flip] = -cand[flip]
        return np.stack([dx(zs), dy(zs), 1j * cand], axis=-1)

    # march in refinement-sized subsegments so the sign reference stays valid
    n = max(1, int(math.ceil(abs(s) / triple.refinement)))
    total = np.zeros(3, dtype=complex)
    prev = complex(t)
    for j in range(1, n + 1):
        nxt = complex(t, s * j / n)
        total = total + integrate_segment(integrand, prev, nxt, tol / n)
        w_ref[0] = continuation._advance_sqrt(
            lambda zz: speed_squared(curve, zz), prev, nxt, w_ref[0])
        prev = nxt
    return base + np.real(total)


@dataclass
class PatchGrid:
    """Sampled Schwarz surface patch with its exact null-triple values.

    ``points[l, j]`` is f(t_vals[j] + i s_vals[l]); ``phi`` carries Phi at the
    same nodes so conformal quantities need no differencing.
    """

    curve: PlanarCurve
    t_vals: np.ndarray
    s_vals: np.ndarray
    points: np.ndarray
    phi: np.ndarray

    @property
    def geodesic_row(self) -> int | None:
        idx = int(np.argmin(np.abs(self.s_vals)))
        return idx if abs(self.s_vals[idx]) < 1e-12 else None

    def conformal_factor(self) -> np.ndarray:
        """E = G = (1/2) sum |phi_i|^2 on the grid."""
        return 0.5 * np.sum(np.abs(self.phi) ** 2, axis=-1)

    def null_residual(self) -> float:
        """max |phi1^2 + phi2^2 + phi3^2| over the grid."""
        return float(np.max(np.abs(np.sum(self.phi**2, axis=-1))))

    def conformality_residuals(self) -> tuple[float, float]:
        """(max |E-G|/E, max |F|/E) from the exact first fundamental form."""
        ft = np.real(self.phi)
        fs = -np.imag(self.phi)
        E = np.sum(ft * ft, axis=-1)
        G = np.sum(fs * fs, axis=-1)
        F = np.sum(ft * fs, axis=-1)
        return float(np.max(np.abs(E - G) / E)), float(np.max(np.abs(F) / E))


def strip_limit(curve: PlanarCurve, t_range=None) -> float:
    """Largest usable |Im z|: 0.9x the distance to the nearest speed^2 zero."""
    return 0.9 * nearest_zero_distance(curve, t_range)


def surface_patch(curve: PlanarCurve, t_range, s_range, nt: int, ns: int,
                  tol: float = DEFAULT_QUAD_TOL, workers: int = 1) -> PatchGrid:
    """Sample the anchored Schwarz surface on a t x s grid.

    The row s = 0 (when present) reproduces the input curve to quadrature
    accuracy.  Raises StripTooWide when |s| exceeds the clamped strip.
    """
    if nt < 2 or ns < 2:
        raise ValueError("nt and ns must be at least 2")
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    s_lo, s_hi = float(s_range[0]), float(s_range[1])
    cap = strip_limit(curve, (t_lo, t_hi))
    if max(abs(s_lo), abs(s_hi)) > cap + 1e-12:
        raise StripTooWide(
            "requested |s| up to %g exceeds the usable strip half-width %g"
            % (max(abs(s_lo), abs(s_hi)), cap))
    triple = HolomorphicTriple(curve)
    t_vals = np.linspace(t_lo, t_hi, nt)
    s_vals = np.linspace(s_lo, s_hi, ns)
    W = triple.sqrt_grid(t_vals, s_vals)
    Z = t_vals[None, :] + 1j * s_vals[:, None]
    phi_grid = np.empty((ns, nt, 3), dtype=complex)
    phi_grid[:, :, 0] = triple._dx(Z)
    phi_grid[:, :, 1] = triple._dy(Z)
    phi_grid[:, :, 2] = 1j * W

    # cumulative integral along the axis, then along each vertical column
    axis_int = _axis_cumulative(triple, t_vals, tol)
    if workers > 1:
        vert_int = _vertical_cumulative_parallel(triple, t_vals, s_vals, W, tol, workers)
    else:
        vert_int = _vertical_cumulative(triple, t_vals, s_vals, W, tol)

    anchor = np.asarray(curve.point3d(t_vals[0]), dtype=float)
    total = axis_int[None, :, :] + vert_int
    points = anchor[None, None, :] + np.real(total)
    return PatchGrid(curve=curve, t_vals=t_vals, s_vals=s_vals, points=points, phi=phi_grid)


def _axis_cumulative(triple: HolomorphicTriple, t_vals, tol: float) -> np.ndarray:
    nt = len(t_vals)
    out = np.zeros((nt, 3), dtype=complex)

    def integrand(zs):
        return triple.axis_values(np.real(zs))

    seg_tol = tol / max(1, nt)
    for j in range(1, nt):
        out[j] = out[j - 1] + integrate_segment(integrand, t_vals[j - 1], t_vals[j], seg_tol)
    return out


def _vertical_cumulative(triple: HolomorphicTriple, t_vals, s_vals, W, tol: float,
                         columns=None) -> np.ndarray:
    """Vertical cumulative integrals, batched across columns per s step.

    For each step the embedded pair is evaluated on all columns at once; only
    columns whose error estimate fails the per-step tolerance are redone with
    the scalar adaptive integrator.
    """
    t_vals = np.asarray(t_vals, dtype=float)
    s_vals = np.asarray(s_vals, dtype=float)
    if columns is not None:
        t_vals = t_vals[columns]
        W = W[:, columns]
    nt, ns = len(t_vals), len(s_vals)
    out = np.zeros((ns, nt, 3), dtype=complex)
    step_tol = tol / max(1, ns)
    order = np.argsort(np.abs(s_vals), kind="stable")
    prev_by_sign = {1: (0.0, None), -1: (0.0, None)}
    curve = triple.curve

    def batch_eval(nodes, s_a, s_b, w_ref):
        # nodes: (n,) in [-1, 1] mapped onto the vertical step per column
        mid, half = 0.5 * (s_a + s_b), 0.5 * (s_b - s_a)
        ss = mid + half * nodes
        Zn = t_vals[None, :] + 1j * ss[:, None]
        cand = np.sqrt(speed_squared(curve, Zn).astype(complex))
        flip = (cand * np.conj(w_ref)[None, :]).real < 0
        cand[flip] = -cand[flip]
        ok = np.abs(np.angle(cand / w_ref[None, :])) < 0.5 * math.pi
        vals = np.empty(Zn.shape + (3,), dtype=complex)
        vals[:, :, 0] = triple._dx(Zn)
        vals[:, :, 1] = triple._dy(Zn)
        vals[:, :, 2] = 1j * cand
        return vals, np.all(ok, axis=0)

    for idx in order:
        s = s_vals[idx]
        if s == 0.0:
            continue
        sign = 1 if s > 0 else -1
        s_prev, prev_idx = prev_by_sign[sign]
        base = out[prev_idx] if prev_idx is not None else np.zeros((nt, 3), dtype=complex)
        w_ref = W[prev_idx] if prev_idx is not None else np.sqrt(
            speed_squared(curve, t_vals).astype(complex))
        half = 0.5 * (s - s_prev) * 1j
        v7, ok7 = batch_eval(_G7_NODES, s_prev, s, w_ref)
        v15, ok15 = batch_eval(_G15_NODES, s_prev, s, w_ref)
        i7 = half * _weighted_sum(_G7_WEIGHTS, v7)
        i15 = half * _weighted_sum(_G15_WEIGHTS, v15)
        err = np.max(np.abs(i15 - i7), axis=-1)
        floor = 5e-16 * np.max(np.abs(i15), axis=-1)
        good = ok7 & ok15 & (err <= np.maximum(step_tol, floor))
        step = i15
        for j in np.nonzero(~good)[0]:
            step[j] = _vertical_segment_scalar(triple, t_vals[j], s_prev, s, step_tol)
        out[idx] = base + step
        prev_by_sign[sign] = (s, idx)
    return out


def _vertical_cumulative_parallel(triple, t_vals, s_vals, W, tol, workers):
    from concurrent.futures import ThreadPoolExecutor

    nt = len(t_vals)
    workers = max(1, min(int(workers), nt))
    chunks = np.array_split(np.arange(nt), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda cols: _vertical_cumulative(triple, t_vals, s_vals, W, tol, columns=cols),
            chunks))
    return np.concatenate(parts, axis=1)


def _vertical_segment_scalar(triple, t, s_a, s_b, tol):
    curve = triple.curve
    dx, dy = triple._dx, triple._dy

    def integrand(zs):
        zs = np.asarray(zs, dtype=complex)
        w = np.array([strip_sqrt(curve, p, triple.refinement) for p in zs])
        return np.stack([dx(zs), dy(zs), 1j * w], axis=-1)

    return integrate_segment(integrand, complex(t, s_a), complex(t, s_b), tol)
