#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
运行服务 - 把 RunConfig 分派给运行器，写出结果和清单
"""

import concurrent.futures
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

from adapters.output_writer import OutputWriter
from core.parsers.run_config_parser import RunCommand, RunConfig
from core.runners.base_runner import BaseRunner, RunContext
from core.runners.runner_manager import RunnerManager
from services.manifest_service import ManifestService
from utils.logger import run_logger

SWEEP_TABLE = 'sweep.csv'


class RunExecutionError(RuntimeError):
    """模块计算失败，带上模块名和参数"""

    def __init__(self, module: str, params: Dict[str, Any], cause: Exception):
        self.module = module
        self.params = params
        self.cause = cause
        super().__init__(f"{module} 计算失败: {cause} | 参数: {params}")


@dataclass
class RunOutcome:
    """
    一次运行的结果

    Attributes:
        manifest_path: 清单路径
        status: ok / partial / error
        results: 写入清单的摘要
        files: 写出的数据文件 (不含清单)
        failed_points: 扫描中失败的网格点序号
    """
    manifest_path: str
    status: str
    results: Dict[str, Any] = field(default_factory=dict)
    files: List[str] = field(default_factory=list)
    failed_points: List[int] = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        return 0 if self.status == 'ok' else 1


class RunService:
    """运行服务"""

    def __init__(self, manager: Optional[RunnerManager] = None):
        self.manager = manager or RunnerManager()

    def run(self, run_config: RunConfig) -> RunOutcome:
        if run_config.command == RunCommand.SWEEP:
            return self.sweep(run_config)
        return self.execute(run_config)

    def execute(self, run_config: RunConfig) -> RunOutcome:
        """
        执行单次运行

        Args:
            run_config: 运行配置

        Returns:
            RunOutcome: 运行结果

        Raises:
            RunExecutionError: 模块计算失败，失败前已写出 status=error 的清单
        """
        runner = self.manager.get_runner(run_config.command.value)
        writer = OutputWriter(run_config.output_dir)
        manifests = ManifestService(run_config.output_dir)
        manifest = manifests.start(run_config.echo())

        log = run_logger.bind(command=runner.name)
        log.info("开始运行", output_dir=run_config.output_dir, seed=run_config.seed)
        try:
            result = runner.run(run_config.parameters, run_config.context())
        except Exception as e:
            runner.record_failure()
            log.error("运行失败", module=runner.module_name, error=e)
            manifests.finish(manifest, writer.files, {'error': str(e), 'module': runner.module_name},
                             status='error')
            raise RunExecutionError(runner.module_name, run_config.parameters, e) from e

        runner.record_success()
        writer.write_result(result)
        path = manifests.finish(manifest, writer.files, result.summary)
        return RunOutcome(manifest_path=path, status='ok', results=result.summary, files=writer.files)

    def _evaluate_point(self, runner: BaseRunner, params: Dict[str, Any],
                        context: RunContext) -> Dict[str, Any]:
        runner.validate(params)
        return runner.sweep_row(params, context)

    def sweep(self, run_config: RunConfig) -> RunOutcome:
        """
        在网格上执行扫描，每个网格点一行，失败的点记为 status=error

        Args:
            run_config: 带扫描网格的运行配置

        Returns:
            RunOutcome: 有失败点时 status 为 partial
        """
        spec = run_config.sweep
        runner = self.manager.get_runner(spec.target.value)
        context = run_config.context()
        points = spec.points()

        writer = OutputWriter(run_config.output_dir)
        manifests = ManifestService(run_config.output_dir)
        manifest = manifests.start(run_config.echo())
        log = run_logger.bind(command='sweep', target=runner.name)
        log.info("开始扫描", points=len(points), workers=run_config.max_workers)

        with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, run_config.max_workers)) as executor:
            futures = [
                executor.submit(self._evaluate_point, runner, {**run_config.parameters, **point}, context)
                for point in points
            ]

            # 按网格序号收集
            rows = []
            failed = []
            for index, (point, future) in enumerate(zip(points, futures)):
                row = {'index': index, **point}
                try:
                    values = future.result()
                    row.update(status='ok', error='')
                    row.update({k: v for k, v in values.items() if k not in row})
                    runner.record_success()
                except Exception as e:
                    runner.record_failure()
                    failed.append(index)
                    log.error("扫描点失败", index=index, params=point, error=e)
                    row.update(status='error', error=str(e))
                rows.append(row)

        leading = ['index', *spec.axis_names, 'status', 'error']
        columns = leading + [key for key in dict.fromkeys(k for row in rows for k in row) if key not in leading]
        writer.write_table(SWEEP_TABLE, pd.DataFrame(rows, columns=columns))

        extra = runner.summarize_sweep(rows, spec.axis_names, context)
        writer.write_result(extra)

        status = 'partial' if failed else 'ok'
        results = {
            'target': runner.name,
            'points': len(points),
            'failed': len(failed),
            'failed_points': failed,
            **extra.summary,
        }
        path = manifests.finish(manifest, writer.files, results, status=status)
        log.info("扫描完成", points=len(points), failed=len(failed))
        return RunOutcome(manifest_path=path, status=status, results=results,
                          files=writer.files, failed_points=failed)
