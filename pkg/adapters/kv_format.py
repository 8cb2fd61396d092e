#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
键值文本格式适配器
链参数与涨落子系综的YAML读写，浮点数按 repr 写出，读回后逐位相同
"""

from typing import Dict

import yaml

from core.bath_models import RateDistribution, RTNEnsemble
from core.wire_builder import WireParameters, bond_table


def _load_mapping(text: str, kind: str) -> Dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ValueError(f"{kind} 文本解析失败: {e}")
    if not isinstance(data, dict) or data.get('kind') != kind:
        raise ValueError(f"不是 {kind} 文本")
    return data


def dump_wire(params: WireParameters) -> str:
    """
    链参数 → 文本

    Args:
        params: 链参数

    Returns:
        str: 每个键一行 [n, alpha, beta]
    """
    data = {
        'kind': 'wire',
        'n_sites': params.n_sites,
        'mu': params.mu,
        'bonds': [[n, alpha, beta] for n, alpha, beta in bond_table(params)],
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, allow_unicode=True)


def load_wire(text: str) -> WireParameters:
    """
    文本 → 链参数，键编号必须连续且从 −N/2 开始

    Args:
        text: dump_wire 写出的文本

    Returns:
        WireParameters: 链参数
    """
    data = _load_mapping(text, 'wire')
    n_sites = data.get('n_sites')
    rows = data.get('bonds') or []
    if not isinstance(n_sites, int):
        raise ValueError(f"n_sites 必须为整数: {n_sites}")

    expected = list(range(-(n_sites // 2), n_sites // 2 - 1))
    if [row[0] for row in rows] != expected:
        raise ValueError("键编号不连续或不是从 −N/2 开始")

    return WireParameters(n_sites=n_sites, mu=data.get('mu'),
                          bonds=tuple((row[1], row[2]) for row in rows))


def dump_ensemble(ensemble: RTNEnsemble) -> str:
    """涨落子系综 → 文本"""
    data = {
        'kind': 'rtn_ensemble',
        'rate_distribution': ensemble.rate_distribution.value,
        'seed': ensemble.seed,
        'rate_min': ensemble.rate_min,
        'rate_max': ensemble.rate_max,
        'fluctuators': [[rate, amplitude] for rate, amplitude in ensemble.fluctuators],
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, allow_unicode=True)


def load_ensemble(text: str) -> RTNEnsemble:
    """文本 → 涨落子系综"""
    data = _load_mapping(text, 'rtn_ensemble')
    return RTNEnsemble(fluctuators=tuple(tuple(row) for row in data.get('fluctuators') or []),
                       rate_distribution=RateDistribution(data.get('rate_distribution')),
                       seed=data.get('seed', 0),
                       rate_min=data.get('rate_min'),
                       rate_max=data.get('rate_max'))
