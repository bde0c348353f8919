"""Independent differential-geometry checks on sampled patches.

Mean curvature and the geodesic property are re-derived from patch points by
central differences only, so they act as an oracle against the construction
pipeline rather than consuming its Weierstrass data.  The symmetry check works
on the null triple directly (it is a resolution-independent identity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import PlanarCurve
from .schwarz import HolomorphicTriple, PatchGrid

_W_FLOOR = 1e-14


class DegenerateMetric(ArithmeticError):
    """EG - F^2 fell below 1e-14 at an interior vertex."""


def _dot(u, v):
    return np.sum(u * v, axis=-1)


def mean_curvature_residual(points: np.ndarray, ht: float, hs: float) -> float:
    """max |H| over interior vertices from central-difference stencils.

    H = (E N - 2 F M + G L) / (2 (E G - F^2)); expected O(h^2) for patches of
    a minimal surface.
    """
    P = np.asarray(points, dtype=float)
    ft = (P[1:-1, 2:] - P[1:-1, :-2]) / (2.0 * ht)
    fs = (P[2:, 1:-1] - P[:-2, 1:-1]) / (2.0 * hs)
    ftt = (P[1:-1, 2:] - 2.0 * P[1:-1, 1:-1] + P[1:-1, :-2]) / ht**2
    fss = (P[2:, 1:-1] - 2.0 * P[1:-1, 1:-1] + P[:-2, 1:-1]) / hs**2
    fts = (P[2:, 2:] - P[2:, :-2] - P[:-2, 2:] + P[:-2, :-2]) / (4.0 * ht * hs)
    E = _dot(ft, ft)
    F = _dot(ft, fs)
    G = _dot(fs, fs)
    W = E * G - F * F
    if float(np.min(W)) < _W_FLOOR:
        raise DegenerateMetric("EG - F^2 = %g at an interior vertex" % float(np.min(W)))
    n = np.cross(ft, fs)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    L = _dot(ftt, n)
    M = _dot(fts, n)
    N = _dot(fss, n)
    H = (E * N - 2.0 * F * M + G * L) / (2.0 * W)
    return float(np.max(np.abs(H)))


def geodesic_residual(curve: PlanarCurve, patch: PatchGrid) -> float:
    """max geodesic-curvature witness: the sideways tangential part of c''(t).

    c'' is projected onto the discrete tangent plane at (t, 0) and the
    component along the curve direction is removed - that part is pure
    reparametrization (the curves here are not arclength parametrized), not a
    failure of the geodesic property.  Requires s = 0 as an interior row.
    """
    row = patch.geodesic_row
    if row is None or row == 0 or row == len(patch.s_vals) - 1:
        raise ValueError("patch must contain s = 0 as an interior row")
    ht = patch.t_vals[1] - patch.t_vals[0]
    hs = patch.s_vals[1] - patch.s_vals[0]
    P = patch.points
    ft = (P[row, 2:] - P[row, :-2]) / (2.0 * ht)
    fs = (P[row + 1, 1:-1] - P[row - 1, 1:-1]) / (2.0 * hs)
    d2 = curve.derivative().derivative()
    t_int = patch.t_vals[1:-1]
    acc = np.stack([d2.x(t_int), d2.y(t_int), np.zeros_like(t_int)], axis=-1)
    # tangential component: solve the 2x2 Gram system per sample
    e = _dot(ft, ft)
    f = _dot(ft, fs)
    g = _dot(fs, fs)
    bt = _dot(acc, ft)
    bs = _dot(acc, fs)
    det = e * g - f * f
    alpha = (bt * g - bs * f) / det
    beta = (bs * e - bt * f) / det
    tangential = alpha[..., None] * ft + beta[..., None] * fs
    unit_t = ft / np.linalg.norm(ft, axis=-1, keepdims=True)
    sideways = tangential - _dot(tangential, unit_t)[..., None] * unit_t
    return float(np.max(np.linalg.norm(sideways, axis=-1)))


def symmetry_residual(curve: PlanarCurve, angle: float | None = None,
                      t_samples: int = 64, s_values=(0.0,)) -> float:
    """max |Phi(z + angle) - R_angle Phi(z)| with R a rotation about the x3-axis.

    For an epitrochoid the natural angle 2*pi/(k+1) is used by default; a
    circle is equivariant under every angle.
    """
    if angle is None:
        if curve.epitrochoid is None:
            raise ValueError("angle required for a curve without dihedral symmetry")
        angle = 2.0 * math.pi / (curve.epitrochoid.k + 1)
    triple = HolomorphicTriple(curve)
    t = np.linspace(curve.domain[0], curve.domain[1], t_samples, endpoint=False)
    s = np.asarray(s_values, dtype=float)
    a = triple.grid_values(t, s)
    b = triple.grid_values(t + angle, s)
    c, sn = math.cos(angle), math.sin(angle)
    rotated = np.empty_like(a)
    rotated[..., 0] = c * a[..., 0] - sn * a[..., 1]
    rotated[..., 1] = sn * a[..., 0] + c * a[..., 1]
    rotated[..., 2] = a[..., 2]
    return float(np.max(np.abs(b - rotated)))


@dataclass(frozen=True)
class VerificationReport:
    max_mean_curvature: float
    geodesic_residual: float
    conformality_residual: float
    symmetry_residual: float | None
    null_residual: float
    nt: int
    ns: int
    t_range: tuple[float, float]
    s_range: tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "max_mean_curvature": self.max_mean_curvature,
            "geodesic_residual": self.geodesic_residual,
            "conformality_residual": self.conformality_residual,
            "symmetry_residual": self.symmetry_residual,
            "null_residual": self.null_residual,
            "grid": {"nt": self.nt, "ns": self.ns,
                     "t_range": list(self.t_range), "s_range": list(self.s_range)},
        }


def verification_report(curve: PlanarCurve, patch: PatchGrid) -> VerificationReport:
    """Bundle of all residuals for one sampled patch."""
    ht = patch.t_vals[1] - patch.t_vals[0]
    hs = patch.s_vals[1] - patch.s_vals[0]
    conf = max(patch.conformality_residuals())
    if curve.epitrochoid is not None:
        sym = symmetry_residual(curve)
    elif curve.label == "circle":
        sym = symmetry_residual(curve, angle=math.pi / 3.0)
    else:
        sym = None
    return VerificationReport(
        max_mean_curvature=mean_curvature_residual(patch.points, ht, hs),
        geodesic_residual=geodesic_residual(curve, patch),
        conformality_residual=conf,
        symmetry_residual=sym,
        null_residual=patch.null_residual(),
        nt=len(patch.t_vals),
        ns=len(patch.s_vals),
        t_range=(float(patch.t_vals[0]), float(patch.t_vals[-1])),
        s_range=(float(patch.s_vals[0]), float(patch.s_vals[-1])),
    )
