#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
链参数构造测试
"""

import cmath
import math

import numpy as np
import pytest

from core.wire_builder import (
    JunctionKind,
    JunctionProfile,
    PairingParameters,
    WireParameters,
    assemble_m,
    bond_table,
    build_pi_junction,
    build_uniform_kitaev,
    effective_pairing,
    pairing_sign_changes,
)


def short_profile(gamma=1.0, t=0.5, upsilon=0.2):
    return JunctionProfile(kind=JunctionKind.SHORT_JUNCTION, gamma=gamma, tunneling=t, upsilon=upsilon)


class TestUniformKitaev:

    def test_kitaev_limit_bonds(self):
        params = build_uniform_kitaev(4, 1.0, 1.0, 0.0)
        assert params.bonds == ((2.0, 0.0),) * 3
        assert params.mu == 0.0

    def test_partial_pairing_bonds(self):
        params = build_uniform_kitaev(6, 1.0, 0.5, 0.3)
        assert params.bonds == ((1.5, 0.5),) * 5
        assert params.mu == 0.3

    @pytest.mark.parametrize('n_sites', [3, 2, 5, 0])
    def test_rejects_odd_or_small_chain(self, n_sites):
        with pytest.raises(ValueError):
            build_uniform_kitaev(n_sites, 1.0, 1.0, 0.0)

    def test_indices(self):
        params = build_uniform_kitaev(6, 1.0, 0.5, 0.0)
        assert list(params.site_indices()) == [-3, -2, -1, 0, 1, 2]
        assert list(params.bond_indices()) == [-3, -2, -1, 0, 1]


class TestWireParameters:

    def test_bond_count_checked(self):
        with pytest.raises(ValueError, match='bonds'):
            WireParameters(n_sites=4, mu=0.0, bonds=((1.0, 1.0),) * 2)

    def test_non_finite_mu_rejected(self):
        with pytest.raises(ValueError, match='mu'):
            WireParameters(n_sites=4, mu=math.nan, bonds=((1.0, 1.0),) * 3)

    def test_hopping_pairing_round_trip(self):
        rng = np.random.default_rng(7)
        params = WireParameters(n_sites=10, mu=0.1, bonds=tuple(map(tuple, rng.normal(size=(9, 2)))))
        rebuilt = WireParameters.from_hopping_pairing(10, 0.1, params.hopping(), params.pairing())
        np.testing.assert_allclose(rebuilt.alphas(), params.alphas(), rtol=0, atol=1e-14)
        np.testing.assert_allclose(rebuilt.betas(), params.betas(), rtol=0, atol=1e-14)

    def test_bond_lookup_uses_physical_index(self):
        params = build_pi_junction(8, short_profile(), 0.0)
        assert params.bond(-4) == params.bonds[0]
        with pytest.raises(IndexError):
            params.bond(3)


class TestPiJunction:

    def test_short_junction_center_bonds(self):
        params = build_pi_junction(8, short_profile(), 0.0)
        assert params.bond(-1) == pytest.approx((0.3, 0.7))
        assert params.bond(0) == pytest.approx((0.7, 0.3))

    def test_short_junction_outer_bonds(self):
        params = build_pi_junction(8, short_profile(), 0.0)
        assert params.bond(-3) == (0.0, 2.0)
        assert params.bond(2) == (2.0, 0.0)

    def test_short_junction_requires_upsilon_below_gamma(self):
        with pytest.raises(ValueError, match='upsilon'):
            short_profile(gamma=0.5, t=0.5, upsilon=0.6)

    def test_short_junction_requires_weak_tunneling(self):
        with pytest.raises(ValueError, match='tunneling'):
            short_profile(t=1.0)

    @pytest.mark.parametrize('gamma,t,upsilon,mu', [
        (1.0, 0.5, 0.2, 0.0),
        (0.5, 0.3, 0.1, 0.4),
        (0.8, 0.9, 0.5, -0.3),
    ])
    def test_single_sign_change(self, gamma, t, upsilon, mu):
        params = build_pi_junction(12, short_profile(gamma, t, upsilon), mu)
        assert pairing_sign_changes(params) == 1

    def test_long_junction_layout(self):
        profile = JunctionProfile(kind=JunctionKind.LONG_JUNCTION, gamma=0.8, normal_length=4,
                                  normal_hopping=0.6)
        params = build_pi_junction(16, profile, 0.1)
        pairing = dict(zip(params.bond_indices(), params.pairing()))
        hopping = dict(zip(params.bond_indices(), params.hopping()))

        assert [n for n, g in pairing.items() if g == 0] == [-2, -1, 0, 1]
        assert all(pairing[n] == pytest.approx(-0.8) for n in range(-8, -2))
        assert all(pairing[n] == pytest.approx(0.8) for n in range(2, 7))
        assert hopping[0] == pytest.approx(0.6)
        assert pairing_sign_changes(params) == 1

    def test_long_junction_must_fit(self):
        profile = JunctionProfile(kind=JunctionKind.LONG_JUNCTION, gamma=1.0, normal_length=6)
        with pytest.raises(ValueError):
            build_pi_junction(8, profile, 0.0)

    def test_long_junction_needs_normal_region(self):
        with pytest.raises(ValueError, match='normal_length'):
            JunctionProfile(kind=JunctionKind.LONG_JUNCTION, normal_length=0)


class TestAssembleM:

    def test_kitaev_limit_matrix(self):
        m = assemble_m(build_uniform_kitaev(4, 1.0, 1.0, 0.0)).matrix
        assert np.all(np.diag(m) == 0.0)
        assert np.all(np.diag(m, -1) == 2.0)
        assert np.all(np.diag(m, 1) == 0.0)

    def test_normal_chain_is_symmetric(self):
        m = assemble_m(build_uniform_kitaev(4, 1.0, 0.0, 0.5)).matrix
        np.testing.assert_array_equal(m, m.T)
        assert np.all(np.diag(m) == 0.5)
        assert np.all(np.diag(m, 1) == 1.0)

    def test_short_junction_elementwise(self):
        profile = short_profile(gamma=0.7, t=0.4, upsilon=0.3)
        mu = 0.25
        m = assemble_m(build_pi_junction(6, profile, mu)).matrix

        expected = np.zeros((6, 6))
        for i, n in enumerate(range(-3, 3)):
            expected[i, i] = mu
        table = {-3: (0.3, 1.7), -2: (0.3, 1.7), -1: (0.1, 0.7), 0: (0.7, 0.1), 1: (1.7, 0.3)}
        for n, (alpha, beta) in table.items():
            i = n + 3
            expected[i + 1, i] = alpha
            expected[i, i + 1] = beta

        np.testing.assert_allclose(m, expected, atol=1e-15)

    def test_exactly_tridiagonal(self):
        m = assemble_m(build_pi_junction(20, short_profile(), 0.3)).matrix
        rows, cols = np.indices(m.shape)
        assert np.all(m[np.abs(rows - cols) > 1] == 0.0)

    def test_matrix_is_read_only(self):
        m = assemble_m(build_uniform_kitaev(4, 1.0, 1.0, 0.0))
        with pytest.raises(ValueError):
            m.matrix[0, 0] = 1.0

    def test_bdg_spectrum_is_plus_minus_singular_values(self):
        m = assemble_m(build_pi_junction(10, short_profile(), 0.2))
        energies = np.linalg.eigvalsh(m.bdg_matrix())
        sigma = np.linalg.svd(m.matrix, compute_uv=False)
        np.testing.assert_allclose(np.sort(energies), np.sort(np.concatenate([sigma, -sigma])) / 2.0,
                                   atol=1e-12)

    def test_bond_table(self):
        params = build_pi_junction(8, short_profile(), 0.0)
        table = list(bond_table(params))
        assert table[0][0] == -4
        assert table[3] == (-1, pytest.approx(0.3), pytest.approx(0.7))


class TestEffectivePairing:

    def base(self, **overrides):
        values = dict(alpha_so=0.8, delta=0.3 + 0.1j, g_factor=2.0, b_field=1.5, e_hat_arg=0.4)
        values.update(overrides)
        return PairingParameters(**values)

    def test_doubling_field_halves_magnitude(self):
        weak = effective_pairing(self.base())
        strong = effective_pairing(self.base(b_field=3.0))
        assert abs(strong) == pytest.approx(abs(weak) / 2.0)
        assert cmath.phase(strong) == pytest.approx(cmath.phase(weak))

    def test_reversed_orientation_flips_sign(self):
        value = effective_pairing(self.base())
        flipped = effective_pairing(self.base(e_hat_arg=0.4 + math.pi))
        assert flipped == pytest.approx(-value)

    def test_zero_gap(self):
        assert effective_pairing(self.base(delta=0.0)) == 0

    @pytest.mark.parametrize('b_field', [0.0, -1.0])
    def test_rejects_non_positive_field(self, b_field):
        with pytest.raises(ValueError, match='b_field'):
            self.base(b_field=b_field)

    def test_bohr_magneton_override(self):
        assert effective_pairing(self.base(), bohr_magneton=2.0) == pytest.approx(
            effective_pairing(self.base()) / 2.0)
