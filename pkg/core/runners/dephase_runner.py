#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
dephase 运行器 - 纯退相干曲线、密度矩阵演化、交叉验证与 1/f 探针
"""

from typing import Any, Dict, List

import numpy as np
import pandas as pd

from config.settings import ConfigError
from core.bath_models import BathSpec, polaron_energy_shift
from core.dephasing_dynamics import (
    CurveMethod,
    QubitState,
    cross_validation_report,
    decoherence_curve,
    evolve_offdiagonal,
    long_time_plateau,
    one_over_f_divergence_probe,
)
from core.runners.base_runner import BaseRunner, ParameterSpec, RunContext, RunnerResult
from utils.validators import validate_non_negative, validate_positive

METHODS = {'closed': CurveMethod.CLOSED_FORM, 'quadrature': CurveMethod.QUADRATURE}

# 交叉验证矩阵
CROSS_CHECK_S = (0.5, 1.0, 1.5, 3.0)
CROSS_CHECK_LAMBDA = (0.3, 1.0)
CROSS_CHECK_OMEGA_T = (0.1, 1.0, 10.0, 100.0)

PROBE_S_GRID = (0.2, 0.1, 0.05, 0.025)


def time_grid(params: Dict[str, Any]) -> np.ndarray:
    """linear 从 0 均匀取点；log 在 0 之后按对数取点"""
    if params['grid'] == 'linear':
        return np.linspace(0.0, params['t_max'], params['t_points'])
    return np.concatenate([[0.0], np.geomspace(params['t_min'], params['t_max'], params['t_points'] - 1)])


class DephaseRunner(BaseRunner):
    """纯退相干运行器"""

    name = 'dephase'
    section = 'dephase'
    module_name = 'dephasing_dynamics'
    description = '计算退相干函数 I(t) 与量子比特约化密度矩阵'

    def parameter_schema(self) -> List[ParameterSpec]:
        return [
            ParameterSpec('s', 'float', 1.0, '谱指数', check=validate_positive,
                          requirement='s 必须大于0 (s = 0 用 --probe)'),
            ParameterSpec('lam', 'float', 1.0, '耦合 λ', check=validate_non_negative, requirement='必须 ≥ 0'),
            ParameterSpec('omega_c', 'float', 1.0, '红外截断', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('omega_uc', 'float', 1.0, '紫外截断', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('grid', 'str', 'log', '时间网格', choices=('log', 'linear')),
            ParameterSpec('t_min', 'float', 0.01, '对数网格起点', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('t_max', 'float', 100.0, '终止时间', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('t_points', 'int', 121, '时间点数', check=lambda v: v >= 2, requirement='必须 ≥ 2'),
            ParameterSpec('method', 'str', 'closed', '计算方法', choices=tuple(METHODS)),
            ParameterSpec('rel_tol', 'float', 1e-8, '数值积分相对容差', check=validate_positive,
                          requirement='必须大于0'),
            ParameterSpec('cross_validate', 'bool', False, '输出闭式解与数值积分的交叉验证'),
            ParameterSpec('probe', 'bool', False, '在 t_max 处输出 s → 0 探针'),
        ]

    def check(self, params: Dict[str, Any]) -> None:
        if params['omega_c'] > params['omega_uc']:
            raise ConfigError('omega_c', f"必须 ≤ omega_uc: {params['omega_c']}")
        if params['grid'] == 'log' and params['t_min'] >= params['t_max']:
            raise ConfigError('t_min', f"必须小于 t_max: {params['t_min']}")

    def run(self, params: Dict[str, Any], context: RunContext) -> RunnerResult:
        spec = BathSpec(s=params['s'], lam=params['lam'], omega_c=params['omega_c'], omega_uc=params['omega_uc'])
        curve = decoherence_curve(spec, time_grid(params), METHODS[params['method']], params['rel_tol'])
        states = evolve_offdiagonal(QubitState.plus(), curve)

        tables = {
            'curve.csv': pd.DataFrame({
                't': curve.times,
                're': curve.values.real,
                'im': curve.values.imag,
                'abs': curve.modulus,
            }),
            'qubit.csv': pd.DataFrame({
                't': curve.times,
                'rho00': [state.rho[0, 0].real for state in states],
                'rho11': [state.rho[1, 1].real for state in states],
                'coherence_re': [state.coherence().real for state in states],
                'coherence_im': [state.coherence().imag for state in states],
                'purity': [state.purity() for state in states],
            }),
        }
        documents = {}
        summary = {
            'regime': spec.regime.value,
            'final_t': float(curve.times[-1]),
            'final_abs': float(curve.modulus[-1]),
            'plateau': long_time_plateau(spec),
            'polaron_energy_shift': polaron_energy_shift(spec),
        }

        if params['cross_validate']:
            report = cross_validation_report(CROSS_CHECK_S, CROSS_CHECK_LAMBDA, CROSS_CHECK_OMEGA_T,
                                             omega_uc=params['omega_uc'], rel_tol=params['rel_tol'])
            documents['cross_validation.json'] = report
            summary['max_cross_validation_error'] = report['max_relative_error']

        if params['probe']:
            points = one_over_f_divergence_probe(params['lam'], params['omega_uc'], params['t_max'], PROBE_S_GRID)
            tables['probe.csv'] = pd.DataFrame([(p.s, p.modulus, p.exponent_magnitude) for p in points],
                                               columns=['s', 'modulus', 'exponent_magnitude'])

        self.logger.info(f"退相干计算完成: s={spec.s}, lam={spec.lam}, |I(t_max)|={summary['final_abs']:.6g}")
        return RunnerResult(tables=tables, documents=documents, summary=summary)
