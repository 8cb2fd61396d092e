#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
spectrum 运行器 - 链的单粒子谱与色散关系
"""

from typing import Any, Dict, List

import numpy as np
import pandas as pd

from adapters.kv_format import dump_wire
from config.settings import ConfigError
from core.mode_solver import dispersion_curve, quasi_zero_splitting, solve_modes
from core.runners.base_runner import BaseRunner, ParameterSpec, RunContext, RunnerResult
from core.wire_builder import (
    JunctionKind,
    JunctionProfile,
    WireParameters,
    assemble_m,
    build_pi_junction,
    build_uniform_kitaev,
    pairing_sign_changes,
)
from utils.validators import validate_even_sites, validate_finite, validate_positive

PROFILE_KINDS = {
    'uniform': JunctionKind.UNIFORM_KITAEV,
    'short': JunctionKind.SHORT_JUNCTION,
    'long': JunctionKind.LONG_JUNCTION,
}


def wire_parameter_schema() -> List[ParameterSpec]:
    """spectrum 与 zero-modes 共用的链参数"""
    return [
        ParameterSpec('profile', 'str', 'short', '链结构', choices=tuple(PROFILE_KINDS)),
        ParameterSpec('N', 'int', 40, '格点数', check=validate_even_sites,
                      requirement='N 必须为不小于4的偶数'),
        ParameterSpec('mu', 'float', 0.2, '化学势', check=validate_finite, requirement='必须为有限值'),
        ParameterSpec('gamma', 'float', 1.0, '体内配对', check=validate_finite, requirement='必须为有限值'),
        ParameterSpec('t', 'float', 0.5, '结处跃迁 (uniform 时为体内跃迁)', check=validate_finite,
                      requirement='必须为有限值'),
        ParameterSpec('upsilon', 'float', 0.2, '结处配对', check=validate_finite, requirement='必须为有限值'),
        ParameterSpec('normal_length', 'int', 4, '长结正常区键数', check=lambda v: v >= 1,
                      requirement='必须 ≥ 1'),
        ParameterSpec('normal_hopping', 'float', 1.0, '长结正常区跃迁', check=validate_finite,
                      requirement='必须为有限值'),
    ]


def junction_profile(params: Dict[str, Any]) -> JunctionProfile:
    try:
        return JunctionProfile(kind=PROFILE_KINDS[params['profile']], gamma=params['gamma'],
                               tunneling=params['t'], upsilon=params['upsilon'],
                               normal_length=params['normal_length'],
                               normal_hopping=params['normal_hopping'])
    except ValueError as e:
        raise ConfigError('profile', str(e))


def build_wire(params: Dict[str, Any]) -> WireParameters:
    """
    按参数构造链；uniform 用 t 作体内跃迁，其余按结剖面构造

    Args:
        params: 已校验的参数

    Returns:
        WireParameters: 链参数
    """
    if params['profile'] == 'uniform':
        return build_uniform_kitaev(params['N'], params['t'], params['gamma'], params['mu'])
    return build_pi_junction(params['N'], junction_profile(params), params['mu'])


def check_wire(params: Dict[str, Any]) -> None:
    profile = junction_profile(params)
    if profile.kind == JunctionKind.LONG_JUNCTION:
        try:
            build_wire(params)
        except ValueError as e:
            raise ConfigError('normal_length', str(e))


class SpectrumRunner(BaseRunner):
    """单粒子谱运行器"""

    name = 'spectrum'
    section = 'spectrum'
    module_name = 'mode_solver'
    description = '计算链的单粒子谱 Λ_k 与纳米线色散关系'

    def parameter_schema(self) -> List[ParameterSpec]:
        return wire_parameter_schema() + [
            ParameterSpec('method', 'str', 'svd', '谱分解方法', choices=('svd', 'eigh')),
            ParameterSpec('zero_tol', 'float', 1e-10, '零能判据', check=validate_positive,
                          requirement='必须大于0'),
            ParameterSpec('k_so', 'float', 1.0, '自旋轨道波矢', check=validate_finite, requirement='必须为有限值'),
            ParameterSpec('delta_abs', 'float', 0.5, '有效配对 |Δ|', check=lambda v: v >= 0,
                          requirement='必须 ≥ 0'),
            ParameterSpec('k_min', 'float', -3.0, '色散波矢下限', check=validate_finite, requirement='必须为有限值'),
            ParameterSpec('k_max', 'float', 3.0, '色散波矢上限', check=validate_finite, requirement='必须为有限值'),
            ParameterSpec('k_points', 'int', 121, '色散采样点数', check=lambda v: v >= 2, requirement='必须 ≥ 2'),
        ]

    def check(self, params: Dict[str, Any]) -> None:
        check_wire(params)
        if params['k_min'] >= params['k_max']:
            raise ConfigError('k_max', f"必须大于 k_min: {params['k_max']}")

    def run(self, params: Dict[str, Any], context: RunContext) -> RunnerResult:
        wire = build_wire(params)
        modes = solve_modes(assemble_m(wire), method=params['method'], zero_tol=params['zero_tol'])
        splitting, band_minimum = quasi_zero_splitting(modes, PROFILE_KINDS[params['profile']])

        spectrum = pd.DataFrame(
            [(k, lam, residual, phi[0] ** 2 + phi[-1] ** 2, xi[0] ** 2 + xi[-1] ** 2)
             for k, ((lam, phi, xi), residual) in enumerate(zip(modes.levels, modes.pairing_residuals()))],
            columns=['level', 'lambda', 'residual', 'phi_edge_weight', 'xi_edge_weight'])

        k_grid = np.linspace(params['k_min'], params['k_max'], params['k_points'])
        points = dispersion_curve(k_grid, params['k_so'], params['delta_abs'])
        dispersion = pd.DataFrame([(p.k, p.e_plus, p.e_minus) for p in points],
                                  columns=['k', 'e_plus', 'e_minus'])

        self.logger.info(f"谱计算完成: N={wire.n_sites}, 零能Majorana数={modes.zero_count(params['zero_tol'])}")
        return RunnerResult(
            tables={'spectrum.csv': spectrum, 'dispersion.csv': dispersion},
            texts={'wire.txt': dump_wire(wire)},
            summary={
                'n_sites': wire.n_sites,
                'zero_count': modes.zero_count(params['zero_tol']),
                'band_minimum': modes.band_minimum(params['zero_tol']),
                'splitting': splitting,
                'quasi_band_minimum': band_minimum,
                'pairing_sign_changes': pairing_sign_changes(wire),
                'max_residual': float(modes.pairing_residuals().max()),
            },
        )
