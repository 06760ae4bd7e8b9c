"""Energy decomposition against independent projector and propagator oracles."""

import numpy as np
import pytest

from conftest import dense_momentum_moment, evolve_exact
from vortexzbw.dirac import project_energy_sectors
from vortexzbw.packet import BGParams
from vortexzbw.quadrature import build_grid
from vortexzbw.state import (
    DiracPacketState,
    decompose,
    negative_energy_fraction,
    windings_for,
)

NR = BGParams(ell=1, k_r=0.04, w0=40.0, sigma_z=40.0, k0z=0.05)
REL = BGParams(ell=1, k_r=0.2, w0=10.0, sigma_z=10.0, k0z=0.5)


def node_subset(state, n=60):
    """Deterministic strided subset of grid node indices."""
    lev = state.fine
    ips = np.linspace(0, lev.kp.size - 1, int(np.sqrt(n)), dtype=int)
    izs = np.linspace(0, lev.kz.size - 1, int(np.sqrt(n)), dtype=int)
    return [(ip, iz) for ip in ips for iz in izs]


class TestWindings:
    def test_spin_up(self):
        assert windings_for("up", 2) == (2, 2, 2, 3)
        assert windings_for("up", 0) == (0, 0, 0, 1)

    def test_spin_down(self):
        assert windings_for("down", 2) == (2, 2, 1, 2)
        assert windings_for("down", 0) == (0, 0, -1, 0)

    def test_unsupported_polarization(self):
        with pytest.raises(NotImplementedError):
            windings_for("transverse", 1)


class TestProjectorOracle:
    """Stored kernels must equal the Lambda_+- split of (Phi, 0, 0, 0).

    At phi_k = 0 every winding phase is 1 and the factored-out global
    phase is common to both routes, so the azimuth-reduced kernels are
    directly comparable to a four-spinor projector split with p = (kperp, 0, kz).
    """

    @pytest.mark.parametrize("spin", ["up", "down"])
    def test_kernels_match_projectors(self, spin):
        state = decompose(REL, spin=spin)
        lev = state.fine
        for ip, iz in node_subset(state):
            phi = lev.phi[ip, iz]
            psi0 = np.zeros(4, dtype=complex)
            psi0[0 if spin == "up" else 1] = phi
            p = (float(lev.kp[ip]), 0.0, float(lev.kz[iz]))
            pos_ref, neg_ref = project_energy_sectors(psi0, p)
            assert np.max(np.abs(lev.pos[:, ip, iz] - pos_ref)) < 1e-12
            assert np.max(np.abs(lev.neg[:, ip, iz] - neg_ref)) < 1e-12

    def test_kernels_recombine_to_initial(self):
        state = decompose(REL)
        lev = state.fine
        initial = lev.pos + lev.neg
        assert np.max(np.abs(initial[0] - lev.phi)) < 1e-13
        for c in (1, 2, 3):
            assert np.max(np.abs(initial[c])) < 1e-13

    def test_pos_neg_nodewise_orthogonal(self):
        state = decompose(REL)
        lev = state.fine
        cross = np.sum(lev.pos * lev.neg, axis=0)
        assert np.max(np.abs(cross)) < 1e-15 * np.max(lev.phi**2)


class TestEvolutionOracle:
    """momentum_components(t) must equal e^{-iHt} applied node-wise."""

    @pytest.mark.parametrize("t", [0.0, 0.7, 4.3])
    def test_components_match_exact_propagator(self, t):
        state = decompose(REL, t_max=5.0)
        lev = state.fine
        comps = state.momentum_components(t)
        for ip, iz in node_subset(state, n=36):
            psi0 = np.zeros(4, dtype=complex)
            psi0[0] = lev.phi[ip, iz]
            ref = evolve_exact(psi0, float(lev.kp[ip]), 0.0, float(lev.kz[iz]), t)
            assert np.max(np.abs(comps[:, ip, iz] - ref)) < 1e-12

    def test_pair_time_kernels_reproduce_bilinears(self):
        state = decompose(REL, t_max=3.0)
        lev = state.fine
        for i, j in ((0, 2), (1, 3), (0, 3), (1, 2)):
            p0, p2, ps = state.pair_time_kernels(i, j)
            for t in (0.0, 0.9, 2.7):
                comps = state.momentum_components(t)
                bil = np.conj(comps[i]) * comps[j]
                arg = 2.0 * lev.energy * t
                assert np.max(np.abs(bil.real - (p0 + p2 * np.cos(arg)))) < 1e-13
                assert np.max(np.abs(bil.imag - ps * np.sin(arg))) < 1e-13

    def test_norm_conserved_in_time(self):
        state = decompose(NR, t_max=10.0)
        norms = [state.norm_at(t) for t in (0.0, 1.0, 10.0)]
        for n in norms:
            assert abs(n - 1.0) < 1e-9
        assert max(norms) - min(norms) < 1e-12


class TestNegativeFraction:
    def test_against_dense_oracle(self):
        got = negative_energy_fraction(REL)
        ref = dense_momentum_moment(
            REL, lambda kp, kz: (np.sqrt(1.0 + kp**2 + kz**2) - 1.0)
            / (2.0 * np.sqrt(1.0 + kp**2 + kz**2))
        )
        assert abs(got - ref) < 1e-6

    def test_state_property_matches_module_function(self):
        state = decompose(REL)
        assert abs(state.negative_energy_fraction - negative_energy_fraction(REL, state.grid)) < 1e-13

    def test_small_for_nonrelativistic(self):
        assert negative_energy_fraction(NR) < 5e-3

    def test_without_negative(self):
        state = decompose(REL)
        frac = state.negative_energy_fraction
        stripped = state.without_negative()
        assert stripped.negative_dropped
        assert stripped.negative_energy_fraction == 0.0
        # positive sector alone: norm = 1 - frac, constant in time
        assert abs(stripped.norm_at(0.0) - (1.0 - frac)) < 1e-10
        assert abs(stripped.norm_at(2.0) - stripped.norm_at(0.0)) < 1e-13
        # original is untouched
        assert state.negative_energy_fraction == frac


class TestStateInterface:
    def test_decompose_rejects_foreign_grid(self):
        grid = build_grid(NR)
        with pytest.raises(ValueError):
            decompose(REL, grid=grid)

    def test_level_name_validation(self):
        state = decompose(NR)
        with pytest.raises(ValueError):
            state.level("medium")

    def test_sample_view(self):
        state = decompose(REL)
        lev = state.fine
        s = state.sample(3, 5)
        assert s.kperp == float(lev.kp[3])
        assert s.kz == float(lev.kz[5])
        assert s.a1 == float(lev.pos[0, 3, 5])
        assert abs(s.b3 - (-s.gamma * s.kz * s.a1)) < 1e-15
        assert abs(s.b4 - (-s.gamma * s.kperp * s.a1)) < 1e-15
        assert abs(s.energy - np.sqrt(1.0 + s.kperp**2 + s.kz**2)) < 1e-14

    def test_sample_spin_down_unsupported(self):
        state = decompose(NR, spin="down")
        with pytest.raises(NotImplementedError):
            state.sample(0, 0)

    def test_coarse_level_consistent(self):
        state = decompose(NR)
        assert state.coarse.kp.size == state.grid.kp_coarse.size
        assert abs(state.norm_at(0.0, which="coarse") - 1.0) < 1e-7

    def test_state_is_frozen(self):
        state = decompose(NR)
        with pytest.raises(Exception):
            state.spin = "down"
