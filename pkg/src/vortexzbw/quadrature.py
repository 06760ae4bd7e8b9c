"""Deterministic 2D quadrature over (kperp, k_z) with certified accuracy.

The azimuthal angle is never sampled: every integrand handled here is
azimuth-reduced (winding factors integrate to exact 2 pi or 0
analytically), so the measure is 2 pi kperp dkperp dk_z on a truncated
rectangle.  Rules are composite Gauss-Legendre panels of fixed order.

A grid is certified by construction:
  * the domain is extended until the packet mass it misses is below
    eps_trunc (checked through the norm integral),
  * panel counts are doubled until a set of registered integrals (norm,
    first moments, and an oscillatory probe at the largest requested
    time) is stable to eps_conv; the previous refinement level is kept
    embedded in the grid so every later integral carries a two-level
    error estimate.

Summation uses numpy's pairwise reduction in a fixed order, so results
are bit-reproducible run to run and do not depend on worker counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import packet as pk
from .errors import DomainError, GridConvergenceError

__all__ = [
    "QuadratureGrid",
    "IntegralResult",
    "build_grid",
    "integrate",
    "panel_rule",
]

PANEL_ORDER = 16

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(PANEL_ORDER)

MAX_DOUBLINGS = 8
MAX_EXTENSIONS = 6


def panel_rule(a: float, b: float, n_panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with n_panels panels on [a, b]."""
    if not (b > a):
        raise ValueError("empty integration interval")
    if n_panels < 1:
        raise ValueError("need at least one panel")
    edges = np.linspace(a, b, n_panels + 1)
    lo = edges[:-1]
    half = 0.5 * (edges[1:] - lo)
    mid = lo + half
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Certified nodes and weights over the truncated (kperp, k_z) rectangle.

    Holds two refinement levels: the accepted fine rule and the embedded
    coarse rule (half the panel count per axis) used for error estimates.
    """

    kp: np.ndarray
    wkp: np.ndarray
    kz: np.ndarray
    wkz: np.ndarray
    kp_coarse: np.ndarray
    wkp_coarse: np.ndarray
    kz_coarse: np.ndarray
    wkz_coarse: np.ndarray
    kp_max: float
    kz_lo: float
    kz_hi: float
    eps_trunc: float
    eps_conv: float
    t_max: float
    params_key: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_perp(self) -> int:
        return self.kp.size

    @property
    def n_z(self) -> int:
        return self.kz.size

    def weights_2d(self, coarse: bool = False) -> np.ndarray:
        """Full measure 2 pi kperp wkp wkz as an (n_perp, n_z) array."""
        if coarse:
            kp, wkp, wkz = self.kp_coarse, self.wkp_coarse, self.wkz_coarse
        else:
            kp, wkp, wkz = self.kp, self.wkp, self.wkz
        return 2.0 * math.pi * (kp * wkp)[:, None] * wkz[None, :]

    def nodes_2d(self, coarse: bool = False) -> tuple[np.ndarray, np.ndarray]:
        if coarse:
            return np.meshgrid(self.kp_coarse, self.kz_coarse, indexing="ij")
        return np.meshgrid(self.kp, self.kz, indexing="ij")


@dataclass(frozen=True)
class IntegralResult:
    """Weighted-sum result with an embedded two-level error estimate."""

    value: complex | float
    error_estimate: float
    nodes_used: tuple[int, int]

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")


def _weighted_sum(kp, wkp, kz, wkz, values) -> complex | float:
    w = 2.0 * math.pi * (kp * wkp)[:, None] * wkz[None, :]
    return np.sum(w * values)


def _registered_integrals(params: pk.BGParams, kp, wkp, kz, wkz, t_max: float):
    """Norm, <kperp>, <k_z>, and an oscillatory probe on a candidate rule."""
    r = pk.momentum_radial_profile(params, kp)
    lt = pk.momentum_longitudinal_magnitude(params, kz)
    dens = (r * r)[:, None] * (lt * lt)[None, :]
    kp2 = kp[:, None]
    kz2 = kz[None, :]
    vals = [
        _weighted_sum(kp, wkp, kz, wkz, dens),
        _weighted_sum(kp, wkp, kz, wkz, dens * kp2),
        _weighted_sum(kp, wkp, kz, wkz, dens * kz2),
    ]
    if t_max > 0:
        e = np.sqrt(1.0 + kp2 * kp2 + kz2 * kz2)
        vals.append(_weighted_sum(kp, wkp, kz, wkz, dens * np.cos(2.0 * e * t_max)))
    return np.array(vals)


def _initial_panels(params: pk.BGParams, kp_max, kz_lo, kz_hi, t_max):
    """Panel counts sized to the packet's momentum feature widths."""
    feat_p = 1.0 / params.w0
    feat_z = 1.0 / params.sigma_z
    n_p = max(4, int(math.ceil((kp_max / feat_p) / 4.0)) + 2)
    n_z = max(4, int(math.ceil(((kz_hi - kz_lo) / feat_z) / 4.0)) + 2)
    if t_max > 0:
        # phase 2 E t sweeps across the domain; budget ~2 periods per panel
        pmax2 = kp_max**2 + max(abs(kz_lo), abs(kz_hi)) ** 2
        periods = t_max * (math.sqrt(1.0 + pmax2) - 1.0) / math.pi
        n_p += int(math.ceil(periods / 2.0))
        n_z += int(math.ceil(periods / 2.0))
    return n_p, n_z


def build_grid(
    params: pk.BGParams,
    eps_trunc: float = 1e-10,
    eps_conv: float = 1e-8,
    t_max: float = 0.0,
    min_panels_perp: int = 0,
    min_panels_z: int = 0,
) -> QuadratureGrid:
    """Build a certified grid for the packet's momentum density.

    The domain covers the Bessel ring / vortex peak plus wide Gaussian
    tails; it grows until the norm integral sits within eps_trunc of 1,
    and panel counts double until the registered integrals are
    eps_conv-stable.  min_panels_* floors the panel counts (used when a
    caller needs extra node density, e.g. for real-space transforms).

    Raises GridConvergenceError with diagnostics when either loop hits
    its hard cap.
    """
    for name, eps in (("eps_trunc", eps_trunc), ("eps_conv", eps_conv)):
        if not (0.0 < eps <= 1e-2):
            raise ValueError(f"{name} must lie in (0, 1e-2]")
    if t_max < 0:
        raise ValueError("t_max must be >= 0")

    # initial truncation from Gaussian tail scales (tail mass ~ 1e-21,
    # far below any permitted eps_trunc; the loop below re-checks)
    spread_p = (math.sqrt(2.0 * params.ell) + 8.0) / params.w0
    kp_max = params.k_r + spread_p
    dz = 7.0 / params.sigma_z
    extensions = 0
    while True:
        kz_lo = params.k0z - dz
        kz_hi = params.k0z + dz
        n_p0, n_z0 = _initial_panels(params, kp_max, kz_lo, kz_hi, t_max)
        n_p0 = max(n_p0, min_panels_perp)
        n_z0 = max(n_z0, min_panels_z)

        n_p, n_z = n_p0, n_z0
        kp_c, wkp_c = panel_rule(0.0, kp_max, n_p)
        kz_c, wkz_c = panel_rule(kz_lo, kz_hi, n_z)
        vals_c = _registered_integrals(params, kp_c, wkp_c, kz_c, wkz_c, t_max)
        doublings = 0
        converged = False
        while doublings <= MAX_DOUBLINGS:
            kp_f, wkp_f = panel_rule(0.0, kp_max, 2 * n_p)
            kz_f, wkz_f = panel_rule(kz_lo, kz_hi, 2 * n_z)
            vals_f = _registered_integrals(params, kp_f, wkp_f, kz_f, wkz_f, t_max)
            scale = np.maximum(1.0, np.abs(vals_f))
            delta = np.max(np.abs(vals_f - vals_c) / scale)
            if delta <= eps_conv:
                converged = True
                break
            n_p, n_z = 2 * n_p, 2 * n_z
            kp_c, wkp_c, kz_c, wkz_c, vals_c = kp_f, wkp_f, kz_f, wkz_f, vals_f
            doublings += 1
        if not converged:
            raise GridConvergenceError(
                "panel doubling did not stabilize the registered integrals",
                diagnostics={
                    "params": params.key(),
                    "panels": (n_p, n_z),
                    "last_delta": float(delta),
                    "eps_conv": eps_conv,
                },
            )

        norm = float(np.real(vals_f[0]))
        if abs(norm - 1.0) <= eps_trunc:
            return QuadratureGrid(
                kp=kp_f,
                wkp=wkp_f,
                kz=kz_f,
                wkz=wkz_f,
                kp_coarse=kp_c,
                wkp_coarse=wkp_c,
                kz_coarse=kz_c,
                wkz_coarse=wkz_c,
                kp_max=kp_max,
                kz_lo=kz_lo,
                kz_hi=kz_hi,
                eps_trunc=eps_trunc,
                eps_conv=eps_conv,
                t_max=t_max,
                params_key=params.key(),
                diagnostics={
                    "norm": norm,
                    "doublings": doublings,
                    "extensions": extensions,
                    "panels": (2 * n_p, 2 * n_z),
                },
            )
        extensions += 1
        if extensions > MAX_EXTENSIONS:
            raise GridConvergenceError(
                "domain extension did not reach the truncation target",
                diagnostics={
                    "params": params.key(),
                    "norm": norm,
                    "kp_max": kp_max,
                    "dz": dz,
                    "eps_trunc": eps_trunc,
                },
            )
        kp_max *= 1.4
        dz *= 1.4


def integrate(grid: QuadratureGrid, integrand) -> IntegralResult:
    """Integrate a node-wise function over the certified grid.

    integrand(kp2d, kz2d) must return an array over the given nodes; it
    is evaluated on the fine and the embedded coarse level, and the
    difference of the two weighted sums is the error estimate.  NaN or
    Inf values raise DomainError rather than propagating silently.
    """
    kpf, kzf = grid.nodes_2d(coarse=False)
    vf = np.asarray(integrand(kpf, kzf))
    if not np.all(np.isfinite(vf)):
        raise DomainError("integrand produced non-finite values on the fine grid")
    fine = np.sum(grid.weights_2d(coarse=False) * vf)

    kpc, kzc = grid.nodes_2d(coarse=True)
    vc = np.asarray(integrand(kpc, kzc))
    if not np.all(np.isfinite(vc)):
        raise DomainError("integrand produced non-finite values on the coarse grid")
    coarse = np.sum(grid.weights_2d(coarse=True) * vc)

    value = complex(fine) if np.iscomplexobj(vf) else float(np.real(fine))
    return IntegralResult(
        value=value,
        error_estimate=float(abs(fine - coarse)),
        nodes_used=(grid.n_perp, grid.n_z),
    )
