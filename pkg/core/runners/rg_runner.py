#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
rg 运行器 - 重整化群流轨迹与相分类
"""

from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from core.rg_flow import classify_phase, closed_form_flow, fixed_points, integrate_flow
from core.runners.base_runner import BaseRunner, ParameterSpec, RunContext, RunnerResult
from utils.validators import validate_non_negative, validate_positive

# 相图绘图脚本模板，读取同目录的 sweep.csv
PLOT_TEMPLATE = '''#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
相图绘制脚本: python plot_phase_diagram.py [sweep.csv] [phase_diagram.png]
"""

import sys

import matplotlib.pyplot as plt
import pandas as pd

LABEL_COLORS = {{
    'SuperOhmicPerturbative': 'tab:blue',
    'OhmicFrustrated': 'tab:green',
    'CriticalIntermediate': 'tab:orange',
    'Localized': 'tab:red',
}}
S_STAR = {s_star!r}


def main():
    source = sys.argv[1] if len(sys.argv) > 1 else 'sweep.csv'
    target = sys.argv[2] if len(sys.argv) > 2 else 'phase_diagram.png'

    table = pd.read_csv(source)
    table = table[table['status'] == 'ok']

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, group in table.groupby('label'):
        ax.scatter(group['s'], group['lam0'], color=LABEL_COLORS.get(label, 'gray'), label=label)
    ax.axvline(S_STAR, color='black', linestyle='--', linewidth=0.8)
    ax.axvline(1.0, color='black', linestyle=':', linewidth=0.8)
    ax.set_xlabel('s')
    ax.set_ylabel('lambda_0')
    ax.legend(fontsize='small')
    fig.tight_layout()
    fig.savefig(target, dpi=150)


if __name__ == '__main__':
    main()
'''


class RGRunner(BaseRunner):
    """RG流运行器"""

    name = 'rg'
    section = 'rg'
    module_name = 'rg_flow'
    description = '积分 ∂λ/∂ℓ = (1−s)λ − λ³ 并给出退相干相'

    def parameter_schema(self) -> List[ParameterSpec]:
        return [
            ParameterSpec('s', 'float', 0.9, '谱指数', check=validate_non_negative, requirement='s 必须 ≥ 0'),
            ParameterSpec('lam0', 'float', 0.1, '初始耦合 λ₀', check=validate_non_negative,
                          requirement='lam0 必须 ≥ 0'),
            ParameterSpec('ell_max', 'float', 40.0, '积分终点', check=validate_positive, requirement='必须大于0'),
            ParameterSpec('step', 'float', 0.1, '名义步长', check=validate_positive, requirement='必须大于0'),
        ]

    def _phase(self, params: Dict[str, Any], context: RunContext):
        return classify_phase(params['s'], params['lam0'], context.s_star, context.s_star_uncertainty)

    def run(self, params: Dict[str, Any], context: RunContext) -> RunnerResult:
        trajectory = integrate_flow(params['lam0'], params['s'], params['ell_max'], params['step'])
        ell, lam = trajectory.as_arrays()
        closed = closed_form_flow(params['lam0'], params['s'], ell).lam

        positive = closed > 0
        max_error = float(np.max(np.abs(lam[positive] - closed[positive]) / closed[positive])) \
            if positive.any() else 0.0

        phase = self._phase(params, context)
        self.logger.info(f"RG流完成: s={params['s']}, lam0={params['lam0']}, 相={phase.label.value}")
        return RunnerResult(
            tables={'trajectory.csv': pd.DataFrame({'ell': ell, 'lambda': lam, 'lambda_closed_form': closed})},
            summary={
                **phase.as_dict(),
                'terminal_lambda': trajectory.terminal_lambda,
                'max_relative_error': max_error,
                'fixed_points': [{'lambda_star': p.lambda_star, 'stability': p.stability.value}
                                 for p in fixed_points(params['s'])],
            },
        )

    def sweep_row(self, params: Dict[str, Any], context: RunContext) -> Dict[str, Any]:
        phase = self._phase(params, context)
        trajectory = integrate_flow(params['lam0'], params['s'], params['ell_max'], params['step'])
        return {
            'label': phase.label.value,
            'entropy_class': phase.entropy_class.value,
            'free_coupling': phase.free_coupling,
            'perturbative_warning': phase.perturbative_warning,
            'terminal_lambda': trajectory.terminal_lambda,
        }

    def summarize_sweep(self, rows: List[Dict[str, Any]], axes: Sequence[str],
                        context: RunContext) -> RunnerResult:
        return RunnerResult(
            texts={'plot_phase_diagram.py': PLOT_TEMPLATE.format(s_star=context.s_star)},
            summary={'s_star': context.s_star, 's_star_uncertainty': context.s_star_uncertainty},
        )
