"""Energy decomposition of the packet into Dirac coefficient fields.

For the initial bispinor (Phi, 0, 0, 0) the split onto the u/v basis at
each momentum node has coefficients

    a1 = Phi / (1 + gamma^2 p^2),
    b3 = -gamma p_z a1 * (1 + gamma^2 p^2) / (1 + gamma^2 p^2) = -gamma p_z Phi / (1 + gamma^2 p^2),
    b4 = -gamma p_plus Phi / (1 + gamma^2 p^2),

and recombining a1 u1 + b3 v3 + b4 v4 restores the initial spinor
exactly.  Because the azimuthal dependence of every term is a pure
winding e^{i m phi_k}, the state is stored azimuth-reduced: per
component c we keep two REAL radial-longitudinal kernels pos_c and
neg_c over the (kperp, k_z) grid plus an integer winding m_c, and the
evolved component amplitude is

    psi_c(k, t) = (-i)^ell e^{i m_c phi_k} e^{-i k_z z0}
                  (pos_c e^{-iEt} + neg_c e^{+iEt}).

The windings are (ell, ell, ell, ell+1) for spin-up and
(ell, ell, ell-1, ell) for spin-down; sum_c pos_c neg_c = 0 node-wise,
so the momentum density sum_c |psi_c|^2 = Phi^2 is exactly constant in
time.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .packet import BGParams, momentum_longitudinal_magnitude, momentum_radial_profile
from .quadrature import QuadratureGrid, build_grid

__all__ = [
    "MomentumSample",
    "CoefficientLevel",
    "DiracPacketState",
    "decompose",
    "negative_energy_fraction",
    "windings_for",
]


def windings_for(spin: str, ell: int) -> tuple[int, int, int, int]:
    """Azimuthal quantum number of each bispinor component."""
    if spin == "up":
        return (ell, ell, ell, ell + 1)
    if spin == "down":
        return (ell, ell, ell - 1, ell)
    raise NotImplementedError(
        "only pure spin-up or spin-down initial polarizations are supported"
    )


@dataclass(frozen=True)
class MomentumSample:
    """One momentum node with its cached kinematics and coefficients.

    weight includes the full measure (2 pi from the analytic azimuth,
    kperp, and both 1D quadrature weights).  phi is the real
    radial-longitudinal magnitude; the winding phase e^{i ell phi_k}
    and the center phase e^{-i k_z z0} are factored out.  b4 carries
    one extra azimuthal unit (e^{i(ell+1) phi_k}) tracked symbolically
    through the component winding, not stored in the complex value.
    """

    kperp: float
    kz: float
    weight: float
    phi: float
    energy: float
    gamma: float
    a1: float
    b3: complex
    b4: complex


@dataclass(frozen=True, eq=False)
class CoefficientLevel:
    """Coefficient kernels on one refinement level of the grid."""

    kp: np.ndarray
    kz: np.ndarray
    w2d: np.ndarray
    energy: np.ndarray
    gamma: np.ndarray
    phi: np.ndarray
    pos: np.ndarray
    neg: np.ndarray


def _build_level(params: BGParams, spin: str, kp, wkp, kz, wkz) -> CoefficientLevel:
    rad = momentum_radial_profile(params, kp)
    lon = momentum_longitudinal_magnitude(params, kz)
    phi = rad[:, None] * lon[None, :]
    kp2 = kp[:, None]
    kz2 = kz[None, :]
    p_sq = kp2 * kp2 + kz2 * kz2
    energy = np.sqrt(1.0 + p_sq)
    gamma = 1.0 / (energy + 1.0)
    g2p2 = gamma * gamma * p_sq
    a = phi / (1.0 + g2p2)

    shape = (4,) + phi.shape
    pos = np.zeros(shape)
    neg = np.zeros(shape)
    if spin == "up":
        pos[0] = a
        pos[2] = a * gamma * kz2
        pos[3] = a * gamma * kp2
        neg[0] = a * g2p2
        neg[2] = -a * gamma * kz2
        neg[3] = -a * gamma * kp2
    else:
        pos[1] = a
        pos[2] = a * gamma * kp2
        pos[3] = -a * gamma * kz2
        neg[1] = a * g2p2
        neg[2] = -a * gamma * kp2
        neg[3] = a * gamma * kz2

    w2d = 2.0 * np.pi * (kp * wkp)[:, None] * wkz[None, :]
    return CoefficientLevel(
        kp=kp, kz=kz, w2d=w2d, energy=energy, gamma=gamma, phi=phi, pos=pos, neg=neg
    )


@dataclass(frozen=True, eq=False)
class DiracPacketState:
    """Azimuth-reduced positive/negative-energy coefficient field.

    Immutable; evaluation at a time t is a pure function of the stored
    kernels.  Carries both the fine and the embedded coarse level of
    its quadrature grid so expectation values keep two-level error
    estimates.
    """

    params: BGParams
    spin: str
    windings: tuple[int, int, int, int]
    fine: CoefficientLevel
    coarse: CoefficientLevel
    grid: QuadratureGrid
    negative_dropped: bool = False

    def level(self, which: str = "fine") -> CoefficientLevel:
        if which == "fine":
            return self.fine
        if which == "coarse":
            return self.coarse
        raise ValueError("level must be 'fine' or 'coarse'")

    def momentum_components(self, t: float, which: str = "fine") -> np.ndarray:
        """Evolved kernels F_c(t) = pos_c e^{-iEt} + neg_c e^{+iEt}, shape (4, n_perp, n_z)."""
        lev = self.level(which)
        ph = np.exp(-1j * lev.energy * t)
        return lev.pos * ph[None, :, :] + lev.neg * np.conj(ph)[None, :, :]

    def pair_time_kernels(self, i: int, j: int, which: str = "fine"):
        """Real kernels (P0, P2, PS) of the bilinear F_i^* F_j.

        Re[F_i^* F_j] = P0 + P2 cos(2Et) and Im[F_i^* F_j] = PS sin(2Et);
        valid whenever components i and j share a winding (the only case
        that survives the analytic azimuthal integral).
        """
        lev = self.level(which)
        pi, pj = lev.pos[i], lev.pos[j]
        ni, nj = lev.neg[i], lev.neg[j]
        return pi * pj + ni * nj, pi * nj + ni * pj, pi * nj - ni * pj

    def norm_at(self, t: float, which: str = "fine") -> float:
        """Total momentum-space probability of the evolved state."""
        lev = self.level(which)
        comps = self.momentum_components(t, which)
        dens = np.sum(np.abs(comps) ** 2, axis=0)
        return float(np.sum(lev.w2d * dens))

    @property
    def negative_energy_fraction(self) -> float:
        lev = self.fine
        return float(np.sum(lev.w2d * np.sum(lev.neg * lev.neg, axis=0)))

    def without_negative(self) -> "DiracPacketState":
        """Copy with the negative-energy branch removed (b = 0 by hand).

        The result is still an exact solution (the positive sector alone
        evolves by a pure phase) but is no longer normalized to 1.
        """
        f = replace(self.fine, neg=np.zeros_like(self.fine.neg))
        c = replace(self.coarse, neg=np.zeros_like(self.coarse.neg))
        return replace(self, fine=f, coarse=c, negative_dropped=True)

    def sample(self, ip: int, iz: int, which: str = "fine") -> MomentumSample:
        """MomentumSample view of one node (spin-up states only)."""
        if self.spin != "up":
            raise NotImplementedError("sample() is defined for the spin-up split")
        lev = self.level(which)
        kperp = float(lev.kp[ip])
        kz = float(lev.kz[iz])
        gamma = float(lev.gamma[ip, iz])
        a1 = float(lev.pos[0, ip, iz])
        return MomentumSample(
            kperp=kperp,
            kz=kz,
            weight=float(lev.w2d[ip, iz]),
            phi=float(lev.phi[ip, iz]),
            energy=float(lev.energy[ip, iz]),
            gamma=gamma,
            a1=a1,
            b3=complex(-gamma * kz * a1),
            b4=complex(-gamma * kperp * a1),
        )


def decompose(
    params: BGParams,
    grid: QuadratureGrid | None = None,
    spin: str = "up",
    eps_trunc: float = 1e-10,
    eps_conv: float = 1e-8,
    t_max: float = 0.0,
) -> DiracPacketState:
    """Split the packet into positive/negative-energy coefficient kernels.

    When grid is omitted a certified grid is built for the given
    tolerances (t_max matters whenever the state will be evolved: the
    grid must resolve the oscillation at the largest requested time).
    A supplied grid must have been built for the same parameters.
    """
    windings = windings_for(spin, params.ell)
    if grid is None:
        grid = build_grid(params, eps_trunc=eps_trunc, eps_conv=eps_conv, t_max=t_max)
    elif grid.params_key != params.key():
        raise ValueError("quadrature grid was built for different packet parameters")
    fine = _build_level(params, spin, grid.kp, grid.wkp, grid.kz, grid.wkz)
    coarse = _build_level(
        params, spin, grid.kp_coarse, grid.wkp_coarse, grid.kz_coarse, grid.wkz_coarse
    )
    return DiracPacketState(
        params=params, spin=spin, windings=windings, fine=fine, coarse=coarse, grid=grid
    )


def negative_energy_fraction(params: BGParams, grid: QuadratureGrid | None = None) -> float:
    """Probability carried by the negative-energy branch, in [0, 1).

    Equals the integral of |Phi|^2 gamma^2 p^2 / (1 + gamma^2 p^2); small
    for every non-relativistic packet.
    """
    if grid is None:
        grid = build_grid(params)
    rad = momentum_radial_profile(params, grid.kp)
    lon = momentum_longitudinal_magnitude(params, grid.kz)
    dens = (rad * rad)[:, None] * (lon * lon)[None, :]
    p_sq = (grid.kp**2)[:, None] + (grid.kz**2)[None, :]
    energy = np.sqrt(1.0 + p_sq)
    g2p2 = p_sq / (energy + 1.0) ** 2
    frac = dens * g2p2 / (1.0 + g2p2)
    return float(np.sum(grid.weights_2d() * frac))
