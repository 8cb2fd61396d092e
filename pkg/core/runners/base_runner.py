#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
运行器基类
每个子命令对应一个运行器: 声明参数表，校验参数，调用所属模块并返回待写出的表格和文档
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd

from config.settings import ConfigError
from utils.logger import get_logger


def _parse_bool(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ('true', '1', 'yes', 'on'):
        return True
    if value in ('false', '0', 'no', 'off'):
        return False
    raise ValueError(f"无法解析为布尔值: {text}")


def _parse_float_list(text) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(',') if v.strip()]


def _parse_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError(f"需要整数: {value}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"需要整数: {value}")
        return int(value)
    return int(str(value).strip())


_CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    'float': float,
    'int': _parse_int,
    'str': str,
    'bool': lambda v: v if isinstance(v, bool) else _parse_bool(v),
    'floats': _parse_float_list,
}


@dataclass(frozen=True)
class ParameterSpec:
    """
    单个参数的声明

    Attributes:
        name: 参数名，同时是配置键和命令行开关 (--name)
        kind: float/int/str/bool/floats
        default: 默认值
        help: 说明
        choices: 可选值
        check: 取值检查，返回 False 时报错
        requirement: 检查失败时的说明
    """
    name: str
    kind: str
    default: Any
    help: str = ''
    choices: Optional[Sequence[str]] = None
    check: Optional[Callable[[Any], bool]] = None
    requirement: str = ''

    def convert(self, value: Any) -> Any:
        """把配置文件或命令行里的值转换成声明的类型"""
        if value is None:
            return None
        try:
            converted = _CONVERTERS[self.kind](value)
        except (TypeError, ValueError) as e:
            raise ConfigError(self.name, f"类型应为 {self.kind}: {e}")

        if self.choices and converted not in self.choices:
            raise ConfigError(self.name, f"取值必须是 {list(self.choices)} 之一: {converted}")
        return converted

    @property
    def flag(self) -> str:
        return '--' + self.name.replace('_', '-')


@dataclass
class RunContext:
    """运行级参数"""
    seed: int = 0
    max_workers: int = 1
    s_star: float = 0.76
    s_star_uncertainty: float = 0.01


@dataclass
class RunnerResult:
    """
    运行结果

    Attributes:
        tables: 文件名 → 表格 (写成CSV)
        documents: 文件名 → 字典 (写成JSON)
        texts: 文件名 → 文本
        summary: 写入清单 results 字段的摘要
    """
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    documents: Dict[str, Dict] = field(default_factory=dict)
    texts: Dict[str, str] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)


class BaseRunner(ABC):
    """运行器基类"""

    # 子命令名、配置节名、所属模块名
    name: str = ''
    section: str = ''
    module_name: str = ''
    description: str = ''

    def __init__(self):
        self.logger = get_logger(f"runner.{self.name}")
        self.success_count = 0
        self.failure_count = 0

    @abstractmethod
    def parameter_schema(self) -> List[ParameterSpec]:
        """
        参数表

        Returns:
            List[ParameterSpec]: 参数声明
        """

    @abstractmethod
    def run(self, params: Dict[str, Any], context: RunContext) -> RunnerResult:
        """
        执行计算

        Args:
            params: 已校验的参数
            context: 运行级参数

        Returns:
            RunnerResult: 待写出的结果
        """

    def check(self, params: Dict[str, Any]) -> None:
        """参数间的约束，子类按需覆盖，出错时抛出 ConfigError"""

    def sweep_row(self, params: Dict[str, Any], context: RunContext) -> Dict[str, Any]:
        """
        扫描中单个网格点的一行结果，默认取 run() 的标量摘要

        Args:
            params: 已校验的参数
            context: 运行级参数

        Returns:
            Dict[str, Any]: 行数据
        """
        summary = self.run(params, context).summary
        return {k: v for k, v in summary.items() if isinstance(v, (int, float, str, bool)) or v is None}

    def summarize_sweep(self, rows: List[Dict[str, Any]], axes: Sequence[str],
                        context: RunContext) -> RunnerResult:
        """扫描结束后的汇总，默认为空"""
        return RunnerResult()

    def schema_map(self) -> Dict[str, ParameterSpec]:
        return {spec.name: spec for spec in self.parameter_schema()}

    def defaults(self) -> Dict[str, Any]:
        return {spec.name: spec.default for spec in self.parameter_schema()}

    def resolve(self, *layers: Dict[str, Any]) -> Dict[str, Any]:
        """
        按顺序叠加参数层 (默认值在最底层)，后面的覆盖前面的

        Args:
            layers: 参数字典，值为 None 的键视为未设置

        Returns:
            Dict[str, Any]: 转换类型后的参数
        """
        schema = self.schema_map()
        params = self.defaults()
        for layer in layers:
            for key, value in layer.items():
                if key not in schema:
                    raise ConfigError(f"{self.section}.{key}", "未知的参数")
                if value is not None:
                    params[key] = schema[key].convert(value)
        return params

    def validate(self, params: Dict[str, Any]) -> None:
        """
        逐项检查参数取值，再检查参数间约束

        Args:
            params: 参数

        Raises:
            ConfigError: 参数不合法
        """
        for spec in self.parameter_schema():
            value = params.get(spec.name)
            if spec.check is not None and value is not None and not spec.check(value):
                raise ConfigError(spec.name, f"{spec.requirement}: {value}")
        self.check(params)

    def record_success(self):
        self.success_count += 1

    def record_failure(self):
        self.failure_count += 1

    def get_stats(self) -> Dict:
        total = self.success_count + self.failure_count
        success_rate = (self.success_count / total * 100) if total > 0 else 0

        return {
            'name': self.name,
            'module': self.module_name,
            'success_count': self.success_count,
            'failure_count': self.failure_count,
            'success_rate': round(success_rate, 2)
        }
