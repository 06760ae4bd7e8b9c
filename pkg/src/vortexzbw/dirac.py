"""Free-particle Dirac algebra in the standard (Dirac) representation.

Conventions
-----------
Natural units hbar = m = c = 1 throughout: energies in units of m c^2,
momenta in 1/lambdabar_C, lengths in lambdabar_C, times in hbar/(m c^2).
The Hamiltonian is H(p) = alpha . p + beta with

    alpha_i = [[0, sigma_i], [sigma_i, 0]],    beta = diag(1, 1, -1, -1).

Plane-wave spinors (not unit-normalized; squared norm 1 + g^2 p^2):

    u_1 = (1, 0, p_z g, p_+ g)         positive energy, spin up
    u_2 = (0, 1, p_- g, -p_z g)        positive energy, spin down
    v_3 = (-p_z g, -p_+ g, 1, 0)       negative energy
    v_4 = (-p_- g, p_z g, 0, 1)        negative energy

with p_+- = p_x +- i p_y and g = 1/(E + 1) the kinematic spinor factor.
These satisfy H u = +E u, H v = -E v and are mutually orthogonal at
fixed p.  The identity 1 + g^2 p^2 = 2 E g is used all over the
observable kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ALPHA",
    "BETA",
    "MomentumVec",
    "UnitSystem",
    "NATURAL_UNITS",
    "ELECTRON_SI",
    "energy",
    "gamma_factor",
    "spinor_u",
    "spinor_v",
    "spinor_norm_sq",
    "dirac_hamiltonian",
    "project_energy_sectors",
]

_SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

_Z2 = np.zeros((2, 2), dtype=complex)

#: alpha matrices, shape (3, 4, 4)
ALPHA = np.stack([np.block([[_Z2, s], [s, _Z2]]) for s in _SIGMA])

#: beta matrix, diag(1, 1, -1, -1)
BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class MomentumVec:
    """Cartesian momentum in units of 1/lambdabar_C."""

    px: float
    py: float
    pz: float

    @property
    def p_sq(self) -> float:
        return self.px * self.px + self.py * self.py + self.pz * self.pz

    @property
    def p_perp(self) -> float:
        return float(np.hypot(self.px, self.py))

    @property
    def p_plus(self) -> complex:
        return self.px + 1.0j * self.py

    @property
    def p_minus(self) -> complex:
        return self.px - 1.0j * self.py

    def as_array(self) -> np.ndarray:
        return np.array([self.px, self.py, self.pz], dtype=float)


@dataclass(frozen=True)
class UnitSystem:
    """Physical constants defining the unit conversions.

    The whole computation runs in natural units; a UnitSystem is only a
    pure rescaling layer for inputs/outputs.  The defaults (all ones)
    make every conversion the identity.
    """

    hbar: float = 1.0
    mass: float = 1.0
    c: float = 1.0
    name: str = "natural"

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0 or self.c <= 0:
            raise ValueError("unit constants must be positive")

    @property
    def compton_wavelength(self) -> float:
        """Reduced Compton wavelength hbar/(m c), the natural length."""
        return self.hbar / (self.mass * self.c)

    @property
    def natural_time(self) -> float:
        return self.hbar / (self.mass * self.c * self.c)

    @property
    def natural_energy(self) -> float:
        return self.mass * self.c * self.c

    @property
    def natural_momentum(self) -> float:
        return self.mass * self.c

    def length_from_natural(self, x):
        return x * self.compton_wavelength

    def length_to_natural(self, x):
        return x / self.compton_wavelength

    def time_from_natural(self, t):
        return t * self.natural_time

    def time_to_natural(self, t):
        return t / self.natural_time

    def momentum_from_natural(self, k):
        return k * self.natural_momentum

    def momentum_to_natural(self, k):
        return k / self.natural_momentum

    def energy_from_natural(self, e):
        return e * self.natural_energy

    def energy_to_natural(self, e):
        return e / self.natural_energy


NATURAL_UNITS = UnitSystem()

ELECTRON_SI = UnitSystem(
    hbar=1.054571817e-34,
    mass=9.1093837015e-31,
    c=2.99792458e8,
    name="electron_si",
)


def energy(p) -> np.ndarray | float:
    """Relativistic dispersion E(p) = sqrt(1 + p^2), p the momentum norm.

    Accepts the scalar |p| or an array of momentum magnitudes.
    """
    p = np.asarray(p, dtype=float)
    out = np.sqrt(1.0 + p * p)
    if p.ndim == 0:
        return float(out)
    return out


def gamma_factor(p) -> np.ndarray | float:
    """Kinematic spinor factor g(p) = 1/(E(p) + 1).

    Ranges over (0, 1/2]: 1/2 at rest, -> 0 ultrarelativistically.
    """
    return 1.0 / (energy(p) + 1.0)


def _as_momentum(p) -> MomentumVec:
    if isinstance(p, MomentumVec):
        return p
    px, py, pz = (float(v) for v in p)
    return MomentumVec(px, py, pz)


def spinor_u(p, s: int) -> np.ndarray:
    """Positive-energy spinor u_s(p), s in {1, 2}.  Not unit-normalized."""
    p = _as_momentum(p)
    g = gamma_factor(np.sqrt(p.p_sq))
    if s == 1:
        return np.array([1.0, 0.0, p.pz * g, p.p_plus * g], dtype=complex)
    if s == 2:
        return np.array([0.0, 1.0, p.p_minus * g, -p.pz * g], dtype=complex)
    raise ValueError("positive-energy spin index must be 1 or 2")


def spinor_v(p, s: int) -> np.ndarray:
    """Negative-energy spinor v_s(p), s in {3, 4}.  Not unit-normalized."""
    p = _as_momentum(p)
    g = gamma_factor(np.sqrt(p.p_sq))
    if s == 3:
        return np.array([-p.pz * g, -p.p_plus * g, 1.0, 0.0], dtype=complex)
    if s == 4:
        return np.array([-p.p_minus * g, p.pz * g, 0.0, 1.0], dtype=complex)
    raise ValueError("negative-energy spin index must be 3 or 4")


def spinor_norm_sq(p) -> float:
    """Common squared norm 1 + g^2 p^2 = 2 E g of all four basis spinors."""
    p = _as_momentum(p)
    g = gamma_factor(np.sqrt(p.p_sq))
    return 1.0 + g * g * p.p_sq


def dirac_hamiltonian(p) -> np.ndarray:
    """4x4 momentum-space Hamiltonian alpha . p + beta."""
    p = _as_momentum(p)
    return (
        p.px * ALPHA[0] + p.py * ALPHA[1] + p.pz * ALPHA[2] + BETA
    )


def project_energy_sectors(psi: np.ndarray, p) -> tuple[np.ndarray, np.ndarray]:
    """Split a 4-spinor into positive/negative energy parts at momentum p.

    Uses the projectors Lambda_+- = (E +- H)/(2E); the parts recombine
    to the input exactly and are H-eigenvectors with eigenvalues +-E.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise ValueError("psi must be a 4-spinor")
    p = _as_momentum(p)
    H = dirac_hamiltonian(p)
    E = energy(np.sqrt(p.p_sq))
    Hpsi = H @ psi
    pos = (E * psi + Hpsi) / (2.0 * E)
    neg = (E * psi - Hpsi) / (2.0 * E)
    return pos, neg
