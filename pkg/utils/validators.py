#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
参数验证模块
"""

import math
import re
from numbers import Integral, Real
from typing import Optional


def validate_finite(value) -> bool:
    """
    验证是否为有限实数

    Args:
        value: 待验证的值

    Returns:
        bool: 是否有效
    """
    if isinstance(value, bool) or not isinstance(value, Real):
        return False

    return math.isfinite(float(value))


def validate_positive(value) -> bool:
    """
    验证是否为有限正数

    Args:
        value: 待验证的值

    Returns:
        bool: 是否有效
    """
    return validate_finite(value) and float(value) > 0


def validate_non_negative(value) -> bool:
    """验证是否为有限非负数"""
    return validate_finite(value) and float(value) >= 0


def validate_in_range(value, low: float, high: float,
                      include_low: bool = True,
                      include_high: bool = True) -> bool:
    """
    验证数值是否落在区间内

    Args:
        value: 待验证的值
        low: 下界
        high: 上界
        include_low: 是否包含下界
        include_high: 是否包含上界

    Returns:
        bool: 是否有效
    """
    if not validate_finite(value):
        return False

    value = float(value)
    above = value >= low if include_low else value > low
    below = value <= high if include_high else value < high
    return above and below


def validate_even_sites(n_sites, minimum: int = 4) -> bool:
    """
    验证链长: 偶数且不小于最小值

    Args:
        n_sites: 格点数 N
        minimum: 最小格点数

    Returns:
        bool: 是否有效
    """
    if isinstance(n_sites, bool) or not isinstance(n_sites, Integral):
        return False

    return n_sites >= minimum and n_sites % 2 == 0


def validate_seed(seed) -> bool:
    """验证随机种子为非负整数"""
    if isinstance(seed, bool) or not isinstance(seed, Integral):
        return False

    return seed >= 0


def sanitize_filename(filename: str) -> str:
    """
    清理文件名，移除不安全字符

    Args:
        filename: 原始文件名

    Returns:
        str: 清理后的文件名
    """
    if not filename:
        return "unnamed"

    # 移除路径分隔符和不安全字符
    safe_filename = re.sub(r'[<>:"/\\|?*]', '_', filename)

    # 移除控制字符
    safe_filename = re.sub(r'[\x00-\x1f\x7f]', '', safe_filename)

    if len(safe_filename) > 255:
        safe_filename = safe_filename[:255]

    if not safe_filename.strip() or safe_filename.strip() in ('.', '..'):
        safe_filename = "unnamed"

    return safe_filename.strip()


def validate_config(config: dict) -> tuple[bool, Optional[str]]:
    """
    验证配置字典

    Args:
        config: 配置字典

    Returns:
        tuple[bool, Optional[str]]: (是否有效, 错误信息)
    """
    try:
        required_sections = ['logging', 'run', 'physics']

        for section in required_sections:
            if section not in config:
                return False, f"缺少必要的配置节: {section}"

        run_config = config.get('run', {})

        max_workers = run_config.get('max_workers')
        if isinstance(max_workers, bool) or not isinstance(max_workers, int) or max_workers < 1:
            return False, f"无效的并发数 run.max_workers: {max_workers}"

        max_points = run_config.get('max_sweep_points')
        if isinstance(max_points, bool) or not isinstance(max_points, int) or max_points < 1:
            return False, f"无效的扫描点上限 run.max_sweep_points: {max_points}"

        if not validate_seed(run_config.get('seed')):
            return False, f"无效的随机种子 run.seed: {run_config.get('seed')}"

        if not run_config.get('output_dir'):
            return False, "缺少输出目录 run.output_dir"

        physics_config = config.get('physics', {})
        s_star = physics_config.get('s_star')
        if not validate_in_range(s_star, 0.0, 1.0, include_low=False, include_high=False):
            return False, f"无效的相边界 physics.s_star: {s_star}"

        uncertainty = physics_config.get('s_star_uncertainty')
        if not validate_non_negative(uncertainty):
            return False, f"无效的相边界误差 physics.s_star_uncertainty: {uncertainty}"

        return True, None

    except Exception as e:
        return False, f"配置验证异常: {str(e)}"
