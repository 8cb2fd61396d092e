#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
π结Majorana量子比特数值实验 - 主程序入口
"""

import os
import sys
from typing import Optional, Sequence

# 添加项目根目录到Python路径
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

from core.parsers.run_config_parser import ConfigError, RunConfig, build_arg_parser, resolve_config
from core.runners.runner_manager import RunnerManager
from services.run_service import RunExecutionError, RunOutcome, RunService
from utils.logger import configure_from_settings, get_logger, run_logger


def _print_outcome(outcome: RunOutcome):
    mark = '✓' if outcome.exit_status == 0 else '✗'
    print(f"{mark} 运行结束: {outcome.status}")
    for name in outcome.files:
        print(f"  {name}")
    print(f"  清单: {outcome.manifest_path}")


def cmd_execute(run_config: RunConfig, service: RunService) -> int:
    """命令行：单次运行"""
    logger = get_logger(__name__)

    try:
        outcome = service.execute(run_config)
    except RunExecutionError as e:
        logger.error(f"运行失败: {e}")
        print(f"错误: {e}", file=sys.stderr)
        return 1

    _print_outcome(outcome)
    return outcome.exit_status


def cmd_sweep(run_config: RunConfig, service: RunService) -> int:
    """命令行：参数扫描"""
    outcome = service.sweep(run_config)
    _print_outcome(outcome)
    if outcome.failed_points:
        print(f"  失败的网格点: {outcome.failed_points}", file=sys.stderr)
    return outcome.exit_status


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    主函数

    Args:
        argv: 命令行参数，None 时取 sys.argv

    Returns:
        int: 退出码，0 表示所有请求的计算都成功
    """
    manager = RunnerManager()
    parser = build_arg_parser(manager, handlers={'*': cmd_execute, 'sweep': cmd_sweep})
    args = parser.parse_args(argv)

    # 如果没有指定命令，显示帮助
    if not args.command:
        parser.print_help()
        return 1

    try:
        run_config = resolve_config(args, manager)
    except ConfigError as e:
        parser.error(str(e))

    configure_from_settings(run_config.settings['logging'], level=run_config.log_level)
    run_logger.info("开始执行", command=run_config.command.value, target=run_config.target.value)

    return args.func(run_config, RunService(manager))


if __name__ == "__main__":
    sys.exit(main())
