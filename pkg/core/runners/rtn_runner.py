#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
rtn 运行器 - 涨落子系综轨迹与功率谱
"""

import math
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from adapters.kv_format import dump_ensemble
from config.settings import ConfigError
from core.bath_models import (
    RTNEnsemble,
    ensemble_psd,
    psd_estimate,
    psd_slope,
    simulate_rtn,
)
from core.runners.base_runner import BaseRunner, ParameterSpec, RunContext, RunnerResult
from utils.validators import validate_finite, validate_positive

# 斜率拟合的对数频段数
PSD_SLOPE_BINS = 20


class RTNRunner(BaseRunner):
    """随机电报噪声运行器"""

    name = 'rtn'
    section = 'rtn'
    module_name = 'bath_models'
    description = '模拟涨落子系综并估计功率谱'

    def parameter_schema(self) -> List[ParameterSpec]:
        return [
            ParameterSpec('distribution', 'str', 'log-uniform', '速率分布', choices=('log-uniform', 'explicit')),
            ParameterSpec('n_fluctuators', 'int', 100, '涨落子数目', check=lambda v: v >= 1, requirement='必须 ≥ 1'),
            ParameterSpec('rate_min', 'float', 1e-4, '最小速率', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('rate_max', 'float', 1e-1, '最大速率', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('amplitude', 'float', 1.0, '总幅度', check=validate_finite, requirement='必须为有限值'),
            ParameterSpec('rates', 'floats', None, 'explicit 分布的速率列表 (逗号分隔)'),
            ParameterSpec('amplitudes', 'floats', None, 'explicit 分布的幅度列表 (逗号分隔)'),
            ParameterSpec('dt', 'float', 1.0, '采样间隔', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('n_samples', 'int', 32768, '采样点数', check=lambda v: v >= 2, requirement='必须 ≥ 2'),
            ParameterSpec('segments', 'int', 8, '功率谱分段数', check=lambda v: v >= 1, requirement='必须 ≥ 1'),
        ]

    def check(self, params: Dict[str, Any]) -> None:
        if params['distribution'] == 'explicit':
            rates, amplitudes = params['rates'], params['amplitudes']
            if not rates or amplitudes is None or len(rates) != len(amplitudes):
                raise ConfigError('rates', "explicit 分布需要等长的 rates 与 amplitudes")
        elif params['rate_min'] >= params['rate_max']:
            raise ConfigError('rate_min', f"必须小于 rate_max: {params['rate_min']}")

        if params['n_samples'] % params['segments'] != 0:
            raise ConfigError('segments', f"n_samples={params['n_samples']} 不能被整除")

    def build_ensemble(self, params: Dict[str, Any], seed: int) -> RTNEnsemble:
        if params['distribution'] == 'explicit':
            return RTNEnsemble.explicit(params['rates'], params['amplitudes'], seed=seed)
        return RTNEnsemble.log_uniform(params['n_fluctuators'], params['rate_min'], params['rate_max'],
                                       amplitude=params['amplitude'], seed=seed)

    def run(self, params: Dict[str, Any], context: RunContext) -> RunnerResult:
        ensemble = self.build_ensemble(params, context.seed)
        dt = params['dt']
        samples = simulate_rtn(ensemble, params['n_samples'] * dt, dt)
        omega, power = psd_estimate(samples, dt, params['segments'])

        summary = {
            'fluctuators': len(ensemble.fluctuators),
            'mean': float(samples.mean()),
            'variance': float(samples.var()),
            'fastest_rate_dt': float(ensemble.rates.max() * dt),
            'psd_slope': None,
        }

        # Dutta-Horn 区的中心两个数量级
        rates = ensemble.rates
        center = 2.0 * math.sqrt(rates.min() * rates.max())
        try:
            summary['psd_slope'] = psd_slope(omega, power, center / 10.0, center * 10.0, bins=PSD_SLOPE_BINS)
        except ValueError as e:
            self.logger.warning(f"无法拟合功率谱斜率: {e}")

        return RunnerResult(
            tables={
                'trajectory.csv': pd.DataFrame({'t': np.arange(len(samples)) * dt, 'x': samples}),
                'psd.csv': pd.DataFrame({'omega': omega, 'power': power,
                                         'analytic': ensemble_psd(ensemble, omega)}),
            },
            texts={'ensemble.txt': dump_ensemble(ensemble)},
            summary=summary,
        )
