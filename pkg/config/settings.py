#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
配置管理模块
内置默认值 → 环境变量 (PIQLAB_*) → YAML配置文件，逐层覆盖；命令行参数在解析阶段最后覆盖
"""

import copy
import os
from typing import Any, Dict, Optional

import yaml

TOOL_NAME = 'piqlab'
TOOL_VERSION = '1.0.0'

# 每个子命令一个配置节
COMMAND_SECTIONS = ('spectrum', 'zero_modes', 'dephase', 'ising', 'rg', 'rtn', 'sweep')

DEFAULT_CONFIG: Dict[str, Any] = {
    'logging': {
        'level': 'INFO',
        'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        'file': None,
        'max_size': '10MB',
        'backup_count': 5,
    },

    'run': {
        'output_dir': 'runs/latest',
        'seed': 0,
        'max_workers': 4,
        'max_sweep_points': 10000,
    },

    # 局域相边界来自外部数值结果
    'physics': {
        's_star': 0.76,
        's_star_uncertainty': 0.01,
    },

    **{section: {} for section in COMMAND_SECTIONS},
}


class ConfigError(ValueError):
    """配置或命令行参数错误，消息中给出出错的键"""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    加载配置

    Args:
        config_path: YAML配置文件路径

    Returns:
        Dict[str, Any]: 合并后的配置字典
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    config = _load_env_config(config)

    if config_path:
        if not os.path.exists(config_path):
            raise ConfigError('--config', f"配置文件不存在: {config_path}")
        if not config_path.endswith(('.yaml', '.yml')):
            raise ConfigError('--config', f"不支持的配置文件格式: {config_path}")

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                file_config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError('--config', f"YAML解析失败: {e}")

        if not isinstance(file_config, dict):
            raise ConfigError('--config', "配置文件顶层必须是映射")

        _check_known_keys(file_config)
        config = _merge_config(config, file_config)

    return config


def _check_known_keys(file_config: Dict) -> None:
    for section, values in file_config.items():
        if section not in DEFAULT_CONFIG:
            raise ConfigError(section, "未知的配置节")
        if not isinstance(values, dict):
            raise ConfigError(section, "配置节必须是映射")

        # 子命令节的键由对应运行器的参数表检查
        if section in COMMAND_SECTIONS:
            continue
        for key in values:
            if key not in DEFAULT_CONFIG[section]:
                raise ConfigError(f"{section}.{key}", "未知的配置键")


def _merge_config(base_config: Dict, override_config: Dict) -> Dict:
    """
    递归合并配置字典

    Args:
        base_config: 基础配置
        override_config: 覆盖配置

    Returns:
        Dict: 合并后的配置
    """
    result = base_config.copy()

    for key, value in override_config.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _merge_config(result[key], value)
        else:
            result[key] = value

    return result


def _load_env_config(config: Dict) -> Dict:
    """
    从环境变量加载配置

    Args:
        config: 基础配置

    Returns:
        Dict: 更新后的配置
    """
    env_mappings = {
        'PIQLAB_OUTPUT_DIR': ('run', 'output_dir', str),
        'PIQLAB_LOG_LEVEL': ('logging', 'level', str),
        'PIQLAB_MAX_WORKERS': ('run', 'max_workers', int),
        'PIQLAB_SEED': ('run', 'seed', int),
        'PIQLAB_MAX_SWEEP_POINTS': ('run', 'max_sweep_points', int),
        'PIQLAB_S_STAR': ('physics', 's_star', float),
    }

    for env_var, (section, key, convert) in env_mappings.items():
        env_value = os.getenv(env_var)
        if env_value is None:
            continue

        try:
            config[section][key] = convert(env_value)
        except ValueError:
            raise ConfigError(env_var, f"无法转换环境变量取值: {env_value}")

    return config


# 示例配置文件内容（可以保存为 piqlab.yaml）
EXAMPLE_CONFIG_YAML = """
# π结Majorana量子比特实验配置文件

logging:
  level: "INFO"
  file: "logs/piqlab.log"

run:
  output_dir: "runs/latest"
  seed: 0
  max_workers: 4
  max_sweep_points: 10000

physics:
  s_star: 0.76
  s_star_uncertainty: 0.01

zero_modes:
  profile: "short"
  N: 40
  gamma: 1.0
  t: 0.5
  upsilon: 0.2
  mu: 0.2

dephase:
  s: 1.0
  lam: 1.0
  t_max: 100.0

rg:
  s: 0.9
  lam0: 0.1
  ell_max: 40.0

sweep:
  target: "rg"
  axes:
    s: {start: 0.5, stop: 1.5, step: 0.1}
    lam0: [0.1, 0.5]
"""
