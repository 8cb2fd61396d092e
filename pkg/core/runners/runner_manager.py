#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
运行器管理器 - 按子命令名查找运行器
"""

from typing import Dict, List, Optional

from .base_runner import BaseRunner
from .dephase_runner import DephaseRunner
from .ising_runner import IsingRunner
from .rg_runner import RGRunner
from .rtn_runner import RTNRunner
from .spectrum_runner import SpectrumRunner
from .zero_modes_runner import ZeroModesRunner

from utils.logger import get_logger


class RunnerManager:
    """运行器管理器"""

    def __init__(self):
        self.logger = get_logger(__name__)
        self.runners: Dict[str, BaseRunner] = {}

        self._initialize_builtin_runners()

        self.logger.debug(f"运行器管理器初始化完成，共加载 {len(self.runners)} 个运行器")

    def _initialize_builtin_runners(self):
        builtin_runners = [
            SpectrumRunner(),
            ZeroModesRunner(),
            DephaseRunner(),
            IsingRunner(),
            RGRunner(),
            RTNRunner(),
        ]

        for runner in builtin_runners:
            self.register_runner(runner)

    def register_runner(self, runner: BaseRunner):
        """
        注册运行器，同名时替换

        Args:
            runner: 运行器实例
        """
        if runner.name in self.runners:
            self.logger.warning(f"替换已注册的运行器: {runner.name}")
        self.runners[runner.name] = runner

    def get_runner(self, name: str) -> BaseRunner:
        """
        根据子命令名获取运行器

        Args:
            name: 子命令名

        Returns:
            BaseRunner: 运行器实例
        """
        runner = self.find_runner(name)
        if runner is None:
            raise KeyError(f"没有名为 {name} 的运行器")
        return runner

    def find_runner(self, name: str) -> Optional[BaseRunner]:
        return self.runners.get(name)

    def list_runners(self) -> List[BaseRunner]:
        return list(self.runners.values())

    def get_stats(self) -> Dict:
        return {
            'total_runners': len(self.runners),
            'runner_details': [runner.get_stats() for runner in self.runners.values()],
        }
