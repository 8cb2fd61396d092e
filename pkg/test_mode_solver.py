#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
单粒子模式求解测试
"""

import numpy as np
import pytest
from scipy import linalg

from core.mode_solver import (
    Sector,
    Symmetry,
    analytic_junction_modes,
    dispersion,
    dispersion_curve,
    edge_splitting_scan,
    fit_decay_slope,
    parity_reflect,
    quasi_zero_splitting,
    solve_modes,
    subspace_overlap,
    zero_modes_by_recursion,
)
from core.wire_builder import (
    JunctionKind,
    JunctionProfile,
    assemble_m,
    build_pi_junction,
    build_uniform_kitaev,
)

SHORT = JunctionProfile(kind=JunctionKind.SHORT_JUNCTION, gamma=1.0, tunneling=0.5, upsilon=0.2)


def short_junction(n_sites=40, mu=0.2, profile=SHORT):
    return build_pi_junction(n_sites, profile, mu)


def eta_basis(modes):
    return np.column_stack([mode.profile for mode in modes if mode.sector == Sector.ETA])


class TestSolveModes:

    def test_kitaev_limit_levels(self):
        modes = solve_modes(assemble_m(build_uniform_kitaev(8, 1.0, 1.0, 0.0)))
        assert modes.n_levels == 8
        assert modes.lambdas[0] < 1e-12
        np.testing.assert_allclose(modes.lambdas[1:], 2.0, atol=1e-12)
        assert modes.zero_count() == 2

    def test_uniform_gap_matches_dense_oracle(self):
        m = assemble_m(build_uniform_kitaev(40, 1.0, 0.5, 0.0))
        modes = solve_modes(m)
        oracle = np.sqrt(np.clip(np.linalg.eigvalsh(m.matrix @ m.matrix.T), 0.0, None))
        np.testing.assert_allclose(modes.lambdas[1:], oracle[1:], atol=1e-10)
        assert modes.lambdas[1] > 0.9

    def test_short_junction_has_four_majoranas(self):
        modes = solve_modes(assemble_m(short_junction()))
        assert modes.zero_count() == 4
        assert len(modes.zero_levels()) == 2
        assert np.all(modes.pairing_residuals() < 1e-10)

    def test_levels_pair_phi_and_xi(self):
        modes = solve_modes(assemble_m(short_junction()))
        m = modes.matrix.matrix
        for lam, phi, xi in modes.levels:
            assert np.linalg.norm(m.T @ phi - lam * xi) < 1e-10
        assert [level[0] for level in modes.levels] == modes.lambdas.tolist()

    @pytest.mark.parametrize('mu', [0.0, 0.2, 0.5, -0.4])
    def test_junction_zero_count_insensitive_to_mu(self, mu):
        modes = solve_modes(assemble_m(short_junction(mu=mu)))
        assert modes.zero_count() == 4

    def test_long_junction_has_four_majoranas(self):
        profile = JunctionProfile(kind=JunctionKind.LONG_JUNCTION, gamma=1.0, normal_length=4)
        modes = solve_modes(assemble_m(build_pi_junction(40, profile, 0.0)))
        assert modes.zero_count() == 4

    def test_vectors_are_orthonormal_and_complete(self):
        modes = solve_modes(assemble_m(short_junction(20)))
        identity = np.eye(20)
        np.testing.assert_allclose(modes.phi @ modes.phi.T, identity, atol=1e-12)
        np.testing.assert_allclose(modes.xi.T @ modes.xi, identity, atol=1e-12)

    def test_five_term_relation_on_xi(self):
        params = short_junction(16, mu=0.3)
        modes = solve_modes(assemble_m(params))
        a, b, mu = params.alphas(), params.betas(), params.mu

        for k in range(modes.n_levels):
            xi = modes.xi[:, k]
            for n in range(2, 14):
                lhs = (a[n] * b[n + 1] * xi[n + 2]
                       + mu * (a[n] + b[n]) * xi[n + 1]
                       + (a[n] ** 2 + b[n - 1] ** 2 + mu ** 2) * xi[n]
                       + mu * (a[n - 1] + b[n - 1]) * xi[n - 1]
                       + b[n - 1] * a[n - 2] * xi[n - 2])
                assert lhs == pytest.approx(modes.lambdas[k] ** 2 * xi[n], abs=1e-10)

    def test_eigh_route_agrees_with_svd(self):
        m = assemble_m(build_uniform_kitaev(12, 1.0, 0.6, 0.3))
        by_svd = solve_modes(m)
        by_eigh = solve_modes(m, method='eigh')
        np.testing.assert_allclose(by_eigh.lambdas, by_svd.lambdas, atol=1e-7)
        assert np.all(by_eigh.pairing_residuals()[by_eigh.lambdas > 1e-3] < 1e-10)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match='未知'):
            solve_modes(assemble_m(short_junction(8)), method='qr')

    def test_bdg_energies_symmetric(self):
        modes = solve_modes(assemble_m(short_junction(10)))
        energies = modes.bdg_energies()
        assert len(energies) == 20
        np.testing.assert_allclose(energies, -energies[::-1])


class TestZeroModeRecursion:

    def test_kitaev_edge_modes_single_component(self):
        modes = zero_modes_by_recursion(build_uniform_kitaev(8, 1.0, 1.0, 0.0))
        assert len(modes) == 2

        eta = next(m for m in modes if m.sector == Sector.ETA)
        nu = next(m for m in modes if m.sector == Sector.NU)
        assert eta.symmetry == Symmetry.EDGE_LEFT
        assert nu.symmetry == Symmetry.EDGE_RIGHT
        np.testing.assert_allclose(eta.profile, np.eye(8)[0], atol=1e-12)
        np.testing.assert_allclose(nu.profile, np.eye(8)[7], atol=1e-12)
        assert eta.pivot_count > 0

    def test_antisymmetric_junction_mode_at_zero_mu(self):
        params = short_junction(8, mu=0.0)
        modes = zero_modes_by_recursion(params)
        antisymmetric = [m for m in modes if m.symmetry == Symmetry.ANTISYMMETRIC]
        assert len(antisymmetric) == 1

        support = params.site_indices()[np.abs(antisymmetric[0].profile) > 1e-10]
        assert sorted(support) == [-1, 1]

    def test_parity_of_junction_modes(self):
        modes = zero_modes_by_recursion(short_junction(40, mu=0.3))
        for mode in modes:
            if mode.symmetry == Symmetry.SYMMETRIC:
                np.testing.assert_allclose(mode.parity_partner(), mode.profile, atol=1e-6)
            elif mode.symmetry == Symmetry.ANTISYMMETRIC:
                np.testing.assert_allclose(mode.parity_partner(), -mode.profile, atol=1e-6)

    def test_geometric_decay_ratio(self):
        mu = 0.3
        params = short_junction(40, mu=mu)
        modes = zero_modes_by_recursion(params)
        antisymmetric = next(m for m in modes if m.symmetry == Symmetry.ANTISYMMETRIC)
        sites = list(params.site_indices())

        profile = antisymmetric.profile
        for n in range(1, 5):
            ratio = profile[sites.index(n + 1)] / profile[sites.index(n)]
            assert ratio == pytest.approx(-mu / 2.0, rel=1e-8)

    def test_residuals_within_tolerance(self):
        for mode in zero_modes_by_recursion(short_junction(40)):
            assert mode.energy_residual <= 1e-10

    def test_four_modes_two_per_sector(self):
        modes = zero_modes_by_recursion(short_junction(40))
        sectors = [m.sector for m in modes]
        assert sectors.count(Sector.ETA) == 2
        assert sectors.count(Sector.NU) == 2

    def test_kernel_agrees_with_singular_vectors(self):
        params = short_junction(40)
        modes = solve_modes(assemble_m(params))
        numeric = modes.phi[:, modes.zero_levels()]
        angles = linalg.subspace_angles(numeric, eta_basis(zero_modes_by_recursion(params)))
        assert np.max(angles) < 1e-6


class TestAnalyticModes:

    def test_zero_mu_support(self):
        symmetric, antisymmetric = analytic_junction_modes(0.0, 0.5, 0.2, 12)
        sites = np.arange(-6, 6)
        assert sorted(sites[np.abs(symmetric.profile) > 0]) == [-2, 0, 2]
        assert sorted(sites[np.abs(antisymmetric.profile) > 0]) == [-1, 1]
        # φ_{±2}/φ₀ = −(t−υ)/2
        assert symmetric.profile[8] / symmetric.profile[6] == pytest.approx(-0.15)

    def test_exact_parity(self):
        symmetric, antisymmetric = analytic_junction_modes(0.4, 0.5, 0.2, 16)
        np.testing.assert_array_equal(parity_reflect(symmetric.profile), symmetric.profile)
        np.testing.assert_array_equal(parity_reflect(antisymmetric.profile), -antisymmetric.profile)

    def test_unit_norm_and_small_residual(self):
        for mode in analytic_junction_modes(0.2, 0.5, 0.2, 60):
            assert np.linalg.norm(mode.profile) == pytest.approx(1.0)
            assert mode.energy_residual < 1e-12
            assert mode.sector == Sector.ETA

    def test_overlap_with_numeric_kernel(self):
        params = short_junction(60, mu=0.2)
        basis = eta_basis(zero_modes_by_recursion(params))
        for mode in analytic_junction_modes(0.2, 0.5, 0.2, 60):
            assert subspace_overlap(mode.profile, basis) > 0.999

    def test_matches_recursion_by_symmetry(self):
        modes = zero_modes_by_recursion(short_junction(30, mu=0.2))
        symmetric, antisymmetric = analytic_junction_modes(0.2, 0.5, 0.2, 30)
        for analytic in (symmetric, antisymmetric):
            numeric = next(m for m in modes if m.sector == Sector.ETA and m.symmetry == analytic.symmetry)
            assert abs(np.dot(numeric.profile, analytic.profile)) > 0.999

    @pytest.mark.parametrize('mu', [1.0, -1.2])
    def test_rejects_large_mu(self, mu):
        with pytest.raises(ValueError, match='mu'):
            analytic_junction_modes(mu, 0.5, 0.2, 20)


class TestEdgeSplitting:

    def test_kitaev_limit_zero_splitting(self):
        scan = edge_splitting_scan(SHORT, 0.0, [12, 16, 20])
        for _, splitting in scan:
            assert splitting < 1e-12

    def test_splitting_decays_with_length(self):
        profile = JunctionProfile(kind=JunctionKind.SHORT_JUNCTION, gamma=0.5, tunneling=0.5, upsilon=0.2)
        scan = edge_splitting_scan(profile, 0.4, [20, 30, 40, 60])
        assert len(scan) == 4
        assert scan.decay_slope is not None
        assert scan.decay_slope < 0
        assert all(band > splitting for _, splitting, band in scan.points)

    def test_single_length_has_no_fit(self):
        scan = edge_splitting_scan(SHORT, 0.2, [20])
        assert len(scan) == 1
        assert scan.decay_slope is None

    def test_parallel_scan_keeps_order(self):
        profile = JunctionProfile(kind=JunctionKind.UNIFORM_KITAEV, gamma=0.5)
        serial = edge_splitting_scan(profile, 0.4, [10, 14, 18])
        parallel = edge_splitting_scan(profile, 0.4, [10, 14, 18], max_workers=3)
        np.testing.assert_allclose(np.array(parallel.points), np.array(serial.points))

    def test_rejects_unsorted_lengths(self):
        with pytest.raises(ValueError):
            edge_splitting_scan(SHORT, 0.2, [30, 20])

    def test_quasi_zero_manifold_size(self):
        uniform = solve_modes(assemble_m(build_uniform_kitaev(12, 1.0, 0.5, 0.4)))
        splitting, band = quasi_zero_splitting(uniform, JunctionKind.UNIFORM_KITAEV)
        assert splitting == uniform.lambdas[0]
        assert band == uniform.lambdas[1]

    def test_fit_floor(self):
        assert fit_decay_slope([10, 20], [1e-3, 1e-20]) is None
        assert fit_decay_slope([10, 20], [1e-2, 1e-4]) == pytest.approx(np.log(1e-2) / 10)


class TestDispersion:

    def test_gap_at_zero_momentum(self):
        point = dispersion(0.0, 1.0, 0.3)
        assert point.e_plus == pytest.approx(1.3)
        assert point.e_minus == pytest.approx(0.7)

    @pytest.mark.parametrize('k', [-1.5, -0.2, 0.3, 2.0])
    def test_gapless_branches_are_shifted_parabolas(self, k):
        point = dispersion(k, 0.8, 0.0)
        assert point.e_plus == pytest.approx(k * k + 0.64 + 1.6 * abs(k))
        assert point.e_minus == pytest.approx((abs(k) - 0.8) ** 2)

    def test_even_in_momentum(self):
        grid = np.linspace(-3, 3, 61)
        curve = dispersion_curve(grid, 1.2, 0.4)
        plus = np.array([p.e_plus for p in curve])
        minus = np.array([p.e_minus for p in curve])
        np.testing.assert_allclose(plus, plus[::-1])
        np.testing.assert_allclose(minus, minus[::-1])
        assert np.all(plus >= minus)
