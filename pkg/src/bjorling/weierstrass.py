"""Weierstrass data (g, eta) of the Schwarz surface and consistency checks.

Convention: Phi = ((1 - g^2) eta/2, i (1 + g^2) eta/2, g eta) so that
eta = phi1 - i phi2 and, for a planar geodesic,

    g = i sqrt((x' + i y')/(x' - i y')),     eta = (x'(z) - i y'(z)) dz,

with the sqrt determination tied to the strip branch of the speed.  The
metric density is the conformal factor E = (1/4)(1 + |g|^2)^2 |eta/dz|^2,
which equals x'^2 + y'^2 on the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .continuation import derivative_series, strip_sqrt
from .curves import PlanarCurve
from .schwarz import HolomorphicTriple, phi, surface_point


class DivisionNearZero(ArithmeticError):
    """g = phi3/(phi1 - i phi2) evaluated at a pole of g."""


@dataclass
class WeierstrassData:
    """Evaluable pair (g, eta/d(chart)) in a named chart."""

    g: Callable
    eta: Callable
    chart: str = "z-strip"


def data_from_curve(curve: PlanarCurve) -> WeierstrassData:
    """Weierstrass data on the strip straight from the curve series."""
    dx, dy = derivative_series(curve)

    def eta(z):
        return dx(z) - 1j * dy(z)

    def g(z):
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        w = np.array([strip_sqrt(curve, p) for p in zs])
        out = 1j * w / (dx(zs) - 1j * dy(zs))
        if np.isscalar(z) or np.asarray(z).ndim == 0:
            return complex(out[0])
        return out

    return WeierstrassData(g=g, eta=eta, chart="z-strip")


def data_from_phi(triple: HolomorphicTriple) -> WeierstrassData:
    """Weierstrass data recovered from the null triple: g = phi3/(phi1 - i phi2)."""

    def eta(z):
        v = triple(z)
        return v[..., 0] - 1j * v[..., 1]

    def g(z):
        v = triple(z)
        den = v[..., 0] - 1j * v[..., 1]
        if np.min(np.abs(den)) < 1e-13:
            raise DivisionNearZero("phi1 - i*phi2 vanishes: pole of g at z=%s" % (z,))
        return v[..., 2] / den

    return WeierstrassData(g=g, eta=eta, chart="z-strip")


def metric_density(data: WeierstrassData, z):
    """Conformal factor (1/4)(1 + |g|^2)^2 |eta|^2 at a chart point."""
    gv = data.g(z)
    ev = data.eta(z)
    return 0.25 * (1.0 + np.abs(gv) ** 2) ** 2 * np.abs(ev) ** 2


def stereographic(n):
    """Projection from the north pole: (n1 + i n2)/(1 - n3)."""
    n = np.asarray(n, dtype=float)
    return (n[..., 0] + 1j * n[..., 1]) / (1.0 - n[..., 2])


def gauss_map_check(curve: PlanarCurve, t_samples, h: float = 1e-3) -> float:
    """max |sigma(nu(t)) - g(t)| with nu the patch normal at (t, 0).

    The s-tangent comes from central differencing of the Schwarz surface at
    step h; the t-tangent along the geodesic row is the exact curve velocity.
    """
    data = data_from_curve(curve)
    triple = phi(curve)
    dx, dy = derivative_series(curve)
    worst = 0.0
    for t in np.asarray(t_samples, dtype=float):
        f_up = surface_point(triple, t, +h, tol=1e-13)
        f_dn = surface_point(triple, t, -h, tol=1e-13)
        fs = (f_up - f_dn) / (2.0 * h)
        ft = np.array([float(dx(t)), float(dy(t)), 0.0])
        nu = np.cross(ft, fs)
        nu = nu / np.linalg.norm(nu)
        worst = max(worst, abs(stereographic(nu) - data.g(t)))
    return worst


def period_residual(curve: PlanarCurve, tol: float = 1e-12) -> np.ndarray:
    """Re of the loop integral of Phi over the closed curve at s = 0."""
    if not curve.closed:
        raise ValueError("period residual is defined for closed curves")
    from .schwarz import integrate_segment

    triple = phi(curve)

    def integrand(zs):
        return triple.axis_values(np.real(zs))

    t_lo, t_hi = curve.domain
    total = integrate_segment(integrand, t_lo, t_hi, tol)
    return np.real(total)
