#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
zero-modes 运行器 - 递推零模、与解析级数解比较、边缘劈裂
"""

from typing import Any, Dict, List, Sequence

import pandas as pd

from adapters.kv_format import dump_wire
from core.mode_solver import (
    Sector,
    analytic_junction_modes,
    fit_decay_slope,
    quasi_zero_splitting,
    solve_modes,
    subspace_overlap,
    zero_modes_by_recursion,
)
from core.runners.base_runner import BaseRunner, ParameterSpec, RunContext, RunnerResult
from core.runners.spectrum_runner import PROFILE_KINDS, build_wire, check_wire, wire_parameter_schema
from core.wire_builder import assemble_m
from utils.validators import validate_positive


class ZeroModesRunner(BaseRunner):
    """零模运行器"""

    name = 'zero-modes'
    section = 'zero_modes'
    module_name = 'mode_solver'
    description = '用三项递推求零模并按宇称分类'

    def parameter_schema(self) -> List[ParameterSpec]:
        return wire_parameter_schema() + [
            ParameterSpec('tol', 'float', 1e-10, '残差容差', check=validate_positive, requirement='必须大于0'),
        ]

    def check(self, params: Dict[str, Any]) -> None:
        check_wire(params)

    def _analytic_overlaps(self, params: Dict[str, Any], modes) -> Dict[str, float]:
        eta = {mode.symmetry.value: mode.profile for mode in modes if mode.sector == Sector.ETA}
        overlaps = {}
        for analytic in analytic_junction_modes(params['mu'], params['t'], params['upsilon'], params['N']):
            numeric = eta.get(analytic.symmetry.value)
            overlaps[analytic.symmetry.value] = (
                0.0 if numeric is None else subspace_overlap(analytic.profile, numeric[:, None]))
        return overlaps

    def run(self, params: Dict[str, Any], context: RunContext) -> RunnerResult:
        wire = build_wire(params)
        modes = zero_modes_by_recursion(wire, params['tol'])
        spectrum = solve_modes(assemble_m(wire))
        splitting, band_minimum = quasi_zero_splitting(spectrum, PROFILE_KINDS[params['profile']])

        profiles = pd.DataFrame({'site': wire.site_indices()})
        for index, mode in enumerate(modes):
            profiles[f'mode_{index}'] = mode.profile

        mode_summary = pd.DataFrame([
            {'mode': index, 'sector': mode.sector.value, 'symmetry': mode.symmetry.value,
             'energy_residual': mode.energy_residual, 'pivot_count': mode.pivot_count}
            for index, mode in enumerate(modes)
        ], columns=['mode', 'sector', 'symmetry', 'energy_residual', 'pivot_count'])

        summary = {
            'n_sites': wire.n_sites,
            'zero_modes': len(modes),
            'bdg_zero_count': spectrum.zero_count(params['tol']),
            'splitting': splitting,
            'band_minimum': band_minimum,
        }

        if params['profile'] == 'short' and params['gamma'] == 1.0 and abs(params['mu']) < 1.0:
            summary['analytic_overlap'] = self._analytic_overlaps(params, modes)

        self.logger.info(f"零模计算完成: N={wire.n_sites}, 零模数={len(modes)}")
        return RunnerResult(
            tables={'zero_modes.csv': profiles, 'zero_mode_summary.csv': mode_summary},
            texts={'wire.txt': dump_wire(wire)},
            summary=summary,
        )

    def sweep_row(self, params: Dict[str, Any], context: RunContext) -> Dict[str, Any]:
        wire = build_wire(params)
        spectrum = solve_modes(assemble_m(wire))
        splitting, band_minimum = quasi_zero_splitting(spectrum, PROFILE_KINDS[params['profile']])
        return {
            'zero_modes': len(zero_modes_by_recursion(wire, params['tol'])),
            'bdg_zero_count': spectrum.zero_count(params['tol']),
            'splitting': splitting,
            'band_minimum': band_minimum,
        }

    def summarize_sweep(self, rows: List[Dict[str, Any]], axes: Sequence[str],
                        context: RunContext) -> RunnerResult:
        if 'N' not in axes:
            return RunnerResult()

        ok_rows = [row for row in rows if row['status'] == 'ok']
        slope = fit_decay_slope([row['N'] for row in ok_rows], [row['splitting'] for row in ok_rows])
        return RunnerResult(summary={'decay_slope': slope})
