"""Shared fixtures and independent numerical oracles.

The oracles here deliberately avoid the library's quadrature engine,
energy-sector decomposition, and azimuth-reduced kernels: they evolve
the full 4-component amplitude node by node with the closed matrix
exponential e^{-iHt} = cos(Et) I - i sin(Et) H / E (valid because
H^2 = E^2 for the free Hamiltonian) and integrate with plain trapezoid
rules plus a uniform azimuth grid (exact for the trigonometric
polynomials that appear).  Agreement between the two routes is then a
real cross-check, not a tautology.
"""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vortexzbw.dirac import ALPHA, BETA
from vortexzbw.packet import (
    momentum_amplitude,
    momentum_longitudinal_magnitude,
    momentum_radial_profile,
)

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def momentum_box(params, n_kp=800, n_kz=800):
    """Dense uniform (kp, kz) grid covering the packet's momentum support."""
    kp_max = params.k_r + (math.sqrt(2.0 * params.ell) + 8.0) / params.w0
    kp = np.linspace(kp_max * 0.5e-6, kp_max, n_kp)
    half = 7.0 / params.sigma_z
    kz = np.linspace(params.k0z - half, params.k0z + half, n_kz)
    return kp, kz


def dense_momentum_moment(params, observable, n_kp=800, n_kz=800):
    """Trapezoid integral of observable(kp, kz) |Phi|^2 d^3k / (azimuth done).

    observable takes broadcastable (kp[:, None], kz[None, :]) arrays.
    """
    kp, kz = momentum_box(params, n_kp, n_kz)
    rad = momentum_radial_profile(params, kp)
    lon = momentum_longitudinal_magnitude(params, kz)
    dens = 2.0 * math.pi * (kp * rad**2)[:, None] * (lon**2)[None, :]
    vals = observable(kp[:, None], kz[None, :]) * dens
    return float(np.trapezoid(np.trapezoid(vals, kz, axis=1), kp, axis=0))


def evolve_exact(psi0, px, py, pz, t):
    """Apply e^{-iHt} to amplitudes psi0[..., 4] at momenta (px, py, pz).

    Uses e^{-iHt} = cos(Et) - i sin(Et) H/E, exact for the free
    Hamiltonian; fully vectorized over leading axes.
    """
    px, py, pz = np.broadcast_arrays(px, py, pz)
    energy = np.sqrt(1.0 + px**2 + py**2 + pz**2)
    ham = (
        ALPHA[0] * px[..., None, None]
        + ALPHA[1] * py[..., None, None]
        + ALPHA[2] * pz[..., None, None]
        + BETA
    )
    rot = np.cos(energy * t)[..., None, None] * np.eye(4) - 1j * (
        np.sin(energy * t) / energy
    )[..., None, None] * ham
    return np.einsum("...ij,...j->...i", rot, psi0)


def oracle_bilinear_series(params, t, matrix, weight_power=0, n_phi=16, n_kp=500, n_kz=500):
    """<psi_t| matrix |psi_t> integrated over momentum, by brute force.

    Builds the initial amplitude (Phi, 0, 0, 0) with its full azimuthal
    phase on a (kp, phi, kz) product grid, evolves every node exactly,
    and integrates psi^dag matrix psi with trapezoid x uniform-azimuth
    weights.  weight_power multiplies the integrand by kp^weight_power
    (unused here but kept for radial moments).
    """
    kp, kz = momentum_box(params, n_kp, n_kz)
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)

    out = np.zeros((), dtype=complex)
    acc = np.zeros((n_kp, n_kz), dtype=complex)
    for ph in phi:
        px = kp[:, None] * math.cos(ph)
        py = kp[:, None] * math.sin(ph)
        pz = kz[None, :] * np.ones((n_kp, 1))
        amp = momentum_amplitude(params, kp[:, None], ph, kz[None, :])
        psi0 = np.zeros((n_kp, n_kz, 4), dtype=complex)
        psi0[..., 0] = amp
        psi_t = evolve_exact(psi0, px, py, pz, t)
        dens = np.einsum("...i,ij,...j->...", np.conj(psi_t), matrix, psi_t)
        acc += dens
    acc *= (2.0 * math.pi / n_phi) * kp[:, None] ** (1 + weight_power)
    out = np.trapezoid(np.trapezoid(acc, kz, axis=1), kp, axis=0)
    return complex(out)


def oracle_velocity(params, t, n_phi=16, n_kp=500, n_kz=500):
    """Velocity expectation 3-vector by the brute-force route."""
    return np.array(
        [
            oracle_bilinear_series(params, t, ALPHA[i], 0, n_phi, n_kp, n_kz).real
            for i in range(3)
        ]
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
