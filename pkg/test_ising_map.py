#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
虚时Ising映射测试
"""

import math

import numpy as np
import pytest
from scipy import linalg

from core.bath_models import BathSpec
from core.ising_map import (
    IsingInstance,
    KernelSpec,
    KernelVariant,
    Tendency,
    build_instance,
    correlation_rows,
    decay_exponent,
    enumerate_partition,
    ferro_para_diagnostic,
    frustrated_kernel,
    kernel_g,
    kernel_g_asymptotic,
)


def brute_force(couplings):
    """全部 2^L 个构型直接求和"""
    n = couplings.shape[0]
    codes = np.arange(2 ** n)
    spins = 1.0 - 2.0 * ((codes[:, None] >> np.arange(n)) & 1)
    energies = 0.5 * np.einsum('ki,ij,kj->k', spins, couplings, spins)
    weights = np.exp(energies)
    z = weights.sum()
    correlations = (weights[:, None] * spins[:, :1] * spins).sum(axis=0) / z
    return z / 2 ** n, correlations


def pure_kernel(s=0.5, lam=0.8):
    return KernelSpec(variant=KernelVariant.PURE_DEPHASING, spec=BathSpec(s=s, lam=lam))


class TestKernels:

    def test_propagator_at_origin(self):
        spec = BathSpec(s=1.0, lam=1.0, omega_c=1.0, omega_uc=2.0)
        assert kernel_g(spec, 0.0) == pytest.approx(math.gamma(2.0) / 4.0 * 4.0)

    @pytest.mark.parametrize('s', [0.3, 1.0, 2.0])
    def test_propagator_asymptotics(self, s):
        spec = BathSpec(s=s, lam=1.0)
        assert kernel_g(spec, 1e6) == pytest.approx(kernel_g_asymptotic(spec, 1e6), rel=1e-5)

    def test_propagator_rejects_negative_interval(self):
        with pytest.raises(ValueError, match='dtau'):
            kernel_g(BathSpec(s=1.0, lam=1.0), -1.0)

    def test_frustrated_ohmic_kernel(self):
        assert frustrated_kernel(0.5, 1.0, 2.0) == pytest.approx(0.25 / 2.0 ** 2.5)

    def test_frustrated_sub_ohmic_kernel(self):
        assert frustrated_kernel(1.0, 0.5, 4.0) == pytest.approx(math.exp(-2.0) / 16.0)

    @pytest.mark.parametrize('lam,s,dtau', [(0.5, 1.5, 1.0), (0.5, 0.0, 1.0), (-0.1, 0.5, 1.0), (0.5, 0.5, 0.0)])
    def test_frustrated_kernel_rejects(self, lam, s, dtau):
        with pytest.raises(ValueError):
            frustrated_kernel(lam, s, dtau)

    def test_kernel_spec_checks_variant(self):
        with pytest.raises(ValueError, match='FrustratedSubOhmic'):
            KernelSpec(variant='FrustratedSubOhmic', spec=BathSpec(s=1.0, lam=0.5))
        with pytest.raises(ValueError, match='FrustratedOhmic'):
            KernelSpec(variant=KernelVariant.FRUSTRATED_OHMIC, spec=BathSpec(s=0.5, lam=0.5))


class TestDiagnostic:

    @pytest.mark.parametrize('s,tendency', [
        (0.5, Tendency.FERROMAGNETIC),
        (1.0, Tendency.MARGINAL),
        (1.5, Tendency.PARAMAGNETIC),
    ])
    def test_pure_dephasing(self, s, tendency):
        kernel = pure_kernel(s=s)
        assert decay_exponent(kernel) == pytest.approx(s + 1.0)
        assert ferro_para_diagnostic(kernel) == tendency

    def test_frustrated_ohmic_is_paramagnetic(self):
        kernel = KernelSpec(variant=KernelVariant.FRUSTRATED_OHMIC, spec=BathSpec(s=1.0, lam=0.3))
        assert decay_exponent(kernel) == pytest.approx(2.18)
        assert ferro_para_diagnostic(kernel) == Tendency.PARAMAGNETIC

    def test_frustrated_sub_ohmic_decays_exponentially(self):
        kernel = KernelSpec(variant=KernelVariant.FRUSTRATED_SUB_OHMIC, spec=BathSpec(s=0.5, lam=0.3))
        assert decay_exponent(kernel) == math.inf
        assert ferro_para_diagnostic(kernel) == Tendency.PARAMAGNETIC


class TestBuildInstance:

    def test_toeplitz_structure(self):
        instance = build_instance(pure_kernel(), 10, 0.5)
        couplings = instance.couplings
        np.testing.assert_array_equal(couplings, couplings.T)
        np.testing.assert_array_equal(np.diag(couplings), 0.0)
        np.testing.assert_array_equal(couplings, linalg.toeplitz(couplings[0]))

    def test_midpoint_weights(self):
        kernel = pure_kernel(s=0.5, lam=0.8)
        instance = build_instance(kernel, 4, 0.5)
        expected = 0.64 * kernel_g(kernel.spec, 1.0) * 0.25
        assert instance.couplings[0, 2] == pytest.approx(expected)

    def test_frustrated_weights_carry_coupling(self):
        kernel = KernelSpec(variant=KernelVariant.FRUSTRATED_OHMIC, spec=BathSpec(s=1.0, lam=0.5))
        instance = build_instance(kernel, 3, 1.0)
        assert instance.couplings[0, 1] == pytest.approx(0.25)

    def test_couplings_are_read_only(self):
        instance = build_instance(pure_kernel(), 4, 1.0)
        with pytest.raises(ValueError):
            instance.couplings[0, 1] = 1.0

    @pytest.mark.parametrize('L', [1, 25, True, 4.0])
    def test_rejects_slice_count(self, L):
        with pytest.raises(ValueError, match='L'):
            build_instance(pure_kernel(), L, 1.0)

    def test_long_chain_without_enumeration(self):
        instance = build_instance(pure_kernel(), 64, 1.0, for_enumeration=False)
        assert instance.couplings.shape == (64, 64)

    def test_rejects_non_positive_width(self):
        with pytest.raises(ValueError, match='delta_tau'):
            build_instance(pure_kernel(), 4, 0.0)

    def test_instance_rejects_non_toeplitz(self):
        couplings = np.array([[0.0, 1.0, 0.5], [1.0, 0.0, 2.0], [0.5, 2.0, 0.0]])
        with pytest.raises(ValueError, match='只依赖'):
            IsingInstance(n_slices=3, delta_tau=1.0, couplings=couplings, lam=0.5)


class TestEnumeration:

    def test_free_spins(self):
        instance = IsingInstance(n_slices=5, delta_tau=1.0, couplings=np.zeros((5, 5)), lam=0.0)
        result = enumerate_partition(instance)
        assert result.z_ratio == pytest.approx(1.0)
        np.testing.assert_allclose(result.correlations, [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-15)

    @pytest.mark.parametrize('s,lam,L', [(0.5, 0.8, 6), (1.0, 1.2, 9), (1.5, 2.0, 12)])
    def test_matches_brute_force(self, s, lam, L):
        instance = build_instance(pure_kernel(s=s, lam=lam), L, 0.7)
        z_ratio, correlations = brute_force(np.asarray(instance.couplings))
        result = enumerate_partition(instance)

        assert result.z_ratio == pytest.approx(z_ratio, rel=1e-12)
        assert result.log_z_ratio == pytest.approx(math.log(z_ratio), abs=1e-12)
        np.testing.assert_allclose(result.correlations, correlations, rtol=1e-12, atol=1e-14)

    def test_multiple_blocks_match_brute_force(self):
        instance = build_instance(pure_kernel(s=0.6, lam=0.9), 18, 0.5)
        z_ratio, correlations = brute_force(np.asarray(instance.couplings))
        result = enumerate_partition(instance)

        assert result.z_ratio == pytest.approx(z_ratio, rel=1e-10)
        np.testing.assert_allclose(result.correlations, correlations, rtol=1e-10, atol=1e-13)

    def test_thread_pool_matches_serial(self):
        instance = build_instance(pure_kernel(s=0.4, lam=1.1), 19, 0.5)
        serial = enumerate_partition(instance)
        pooled = enumerate_partition(instance, max_workers=4)
        assert pooled.log_z_ratio == serial.log_z_ratio
        np.testing.assert_array_equal(pooled.correlations, serial.correlations)

    def test_magnetization_vanishes(self):
        instance = build_instance(pure_kernel(s=0.5, lam=1.0), 12, 1.0)
        result = enumerate_partition(instance, max_workers=2)
        assert np.max(np.abs(result.magnetization)) < 1e-12
        assert result.correlations[-1] > 0.0

    def test_magnetization_across_blocks(self):
        result = enumerate_partition(build_instance(pure_kernel(s=0.6, lam=0.9), 18, 0.5))
        assert result.magnetization.shape == (18,)
        assert np.max(np.abs(result.magnetization)) < 1e-12

    @pytest.mark.parametrize('coupling', [-1.3, 0.2, 0.75, 3.0])
    def test_two_slices_match_tanh(self, coupling):
        couplings = np.array([[0.0, coupling], [coupling, 0.0]])
        instance = IsingInstance(n_slices=2, delta_tau=1.0, couplings=couplings, lam=1.0)
        result = enumerate_partition(instance)
        assert result.correlations[1] == pytest.approx(math.tanh(coupling), rel=1e-14, abs=1e-15)
        assert result.z_ratio == pytest.approx(math.cosh(coupling), rel=1e-13)

    @pytest.mark.parametrize('s', [0.5, 1.5])
    def test_correlations_decrease_with_separation(self, s):
        result = enumerate_partition(build_instance(pure_kernel(s=s, lam=1.0), 12, 1.0))
        assert np.all(np.diff(result.correlations) <= 1e-15)

    def test_sub_ohmic_correlations_reach_further(self):
        sub = enumerate_partition(build_instance(pure_kernel(s=0.5, lam=1.0), 12, 1.0))
        sup = enumerate_partition(build_instance(pure_kernel(s=1.5, lam=1.0), 12, 1.0))
        assert sub.correlations[-1] > sup.correlations[-1] > 0.0

    def test_ferromagnetic_couplings_raise_z(self):
        result = enumerate_partition(build_instance(pure_kernel(s=0.5, lam=1.0), 10, 1.0))
        assert result.z_ratio > 1.0
        assert result.correlations[0] == pytest.approx(1.0)
        assert np.all(result.correlations > 0)

    def test_overflow_keeps_log(self):
        couplings = linalg.toeplitz([0.0, 800.0, 800.0, 800.0])
        instance = IsingInstance(n_slices=4, delta_tau=1.0, couplings=couplings, lam=1.0)
        result = enumerate_partition(instance)
        assert result.z_ratio == math.inf
        assert result.log_z_ratio == pytest.approx(4800.0 - 3.0 * math.log(2.0), rel=1e-12)

    def test_correlation_rows(self):
        result = enumerate_partition(build_instance(pure_kernel(), 5, 1.0))
        rows = correlation_rows(result)
        assert [row['r'] for row in rows] == [0, 1, 2, 3, 4]
        assert rows[0]['correlation'] == pytest.approx(1.0)
        assert all(abs(row['magnetization']) < 1e-12 for row in rows)
