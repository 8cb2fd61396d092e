#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
运行配置解析器 - 把命令行参数与配置文件合并成 RunConfig

优先级: 命令行 > 配置文件中的子命令节 > 运行器默认值；
运行级参数 (输出目录、种子) 为 命令行 > 配置文件 > 环境变量 > 内置默认值
"""

import argparse
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from config.settings import TOOL_NAME, TOOL_VERSION, ConfigError, load_config
from core.runners.base_runner import RunContext
from core.runners.runner_manager import RunnerManager
from utils.logger import LOG_LEVELS
from utils.validators import validate_config, validate_seed

__all__ = [
    'ConfigError', 'RunCommand', 'RunConfig', 'SweepAxis', 'SweepSpec',
    'build_arg_parser', 'expand_axis', 'parse_config', 'resolve_config',
]

SWEEP_KEYS = ('target', 'axes', 'set')


class RunCommand(str, Enum):
    """子命令"""
    SPECTRUM = 'spectrum'
    ZERO_MODES = 'zero-modes'
    DEPHASE = 'dephase'
    ISING = 'ising'
    RG = 'rg'
    RTN = 'rtn'
    SWEEP = 'sweep'

    @property
    def section(self) -> str:
        return self.value.replace('-', '_')


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: Tuple[Any, ...]


@dataclass
class SweepSpec:
    """扫描网格: 各轴的笛卡尔积，最后一个轴变化最快"""
    target: RunCommand
    axes: List[SweepAxis]

    @property
    def axis_names(self) -> List[str]:
        return [axis.name for axis in self.axes]

    @property
    def size(self) -> int:
        return math.prod(len(axis.values) for axis in self.axes)

    def points(self) -> List[Dict[str, Any]]:
        names = self.axis_names
        return [dict(zip(names, combo)) for combo in itertools.product(*(axis.values for axis in self.axes))]


@dataclass
class RunConfig:
    """
    解析后的运行配置

    Attributes:
        command: 子命令
        parameters: 已校验的参数 (sweep 时为扫描目标的基准参数)
        output_dir: 输出目录
        seed: 随机种子
        max_workers: 并发数
        log_level: 日志级别
        settings: 合并后的完整配置
        sweep: 扫描网格
    """
    command: RunCommand
    parameters: Dict[str, Any]
    output_dir: str
    seed: int
    max_workers: int = 1
    log_level: str = 'INFO'
    settings: Dict[str, Any] = field(default_factory=dict)
    sweep: Optional[SweepSpec] = None

    @property
    def target(self) -> RunCommand:
        """实际执行的运行器"""
        return self.sweep.target if self.sweep else self.command

    def context(self) -> RunContext:
        physics = self.settings.get('physics', {})
        return RunContext(seed=self.seed, max_workers=self.max_workers,
                          s_star=physics.get('s_star', 0.76),
                          s_star_uncertainty=physics.get('s_star_uncertainty', 0.01))

    def echo(self) -> Dict[str, Any]:
        """写入清单的完整配置回显"""
        return {
            'tool': TOOL_NAME,
            'command': self.command.value,
            'parameters': self.parameters,
            'output_dir': self.output_dir,
            'seed': self.seed,
            'max_workers': self.max_workers,
            'log_level': self.log_level,
            'physics': self.settings.get('physics', {}),
            'sweep': None if self.sweep is None else {
                'target': self.sweep.target.value,
                'axes': {axis.name: list(axis.values) for axis in self.sweep.axes},
            },
        }


def build_arg_parser(manager: Optional[RunnerManager] = None,
                     handlers: Optional[Dict[str, Callable]] = None) -> argparse.ArgumentParser:
    """
    构造命令行解析器，每个运行器的参数表生成一组 --参数 开关

    Args:
        manager: 运行器管理器
        handlers: 子命令名 → 处理函数，'*' 为默认处理函数

    Returns:
        argparse.ArgumentParser: 解析器
    """
    manager = manager or RunnerManager()
    handlers = handlers or {}

    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="π结Majorana量子比特与退相干数值实验",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
示例用法:
  # 短π结零模
  python main.py zero-modes --profile short --N 40 --gamma 1 --t 0.5 --upsilon 0.2 --mu 0.2

  # 欧姆热库退相干曲线
  python main.py dephase --s 1 --lam 1 --t-max 1000

  # RG相图扫描
  python main.py sweep --target rg --axis s 0.5 1.5 0.1 --values lam0 0.1,0.5
        """
    )

    parser.add_argument('--config', '-c', default=None, help='YAML配置文件路径')
    parser.add_argument('--output-dir', '-o', default=None, help='输出目录')
    parser.add_argument('--seed', type=int, default=None, help='随机种子')
    parser.add_argument('--log-level', default=None, choices=LOG_LEVELS, help='日志级别')
    parser.add_argument('--verbose', '-v', action='store_true', help='详细输出')
    parser.add_argument('--version', action='version', version=f'{TOOL_NAME} {TOOL_VERSION}')

    subparsers = parser.add_subparsers(dest='command', help='可用命令')

    for runner in manager.list_runners():
        sub = subparsers.add_parser(runner.name, help=runner.description, allow_abbrev=False)
        for spec in runner.parameter_schema():
            if spec.kind == 'bool':
                sub.add_argument(spec.flag, dest=spec.name, action='store_const', const=True,
                                 default=None, help=spec.help)
            else:
                sub.add_argument(spec.flag, dest=spec.name, default=None, help=spec.help,
                                 metavar=spec.kind.upper())
        handler = handlers.get(runner.name, handlers.get('*'))
        if handler:
            sub.set_defaults(func=handler)

    sub = subparsers.add_parser(RunCommand.SWEEP.value, help='在参数网格上批量运行', allow_abbrev=False)
    sub.add_argument('--target', default=None, choices=[r.name for r in manager.list_runners()],
                     help='扫描目标子命令')
    sub.add_argument('--axis', nargs=4, action='append', metavar=('NAME', 'START', 'STOP', 'STEP'),
                     help='等步长扫描轴')
    sub.add_argument('--values', nargs=2, action='append', metavar=('NAME', 'V1,V2'),
                     help='枚举扫描轴')
    sub.add_argument('--set', action='append', metavar='KEY=VALUE', help='固定参数')
    handler = handlers.get(RunCommand.SWEEP.value, handlers.get('*'))
    if handler:
        sub.set_defaults(func=handler)

    return parser


def expand_axis(name: str, start: Any, stop: Any, step: Any, max_points: int) -> List[float]:
    """
    start, start+step, …, stop (含端点)，数值取到12位小数以消除累积误差

    Args:
        name: 轴名
        start: 起点
        stop: 终点
        step: 步长 (> 0)
        max_points: 点数上限

    Returns:
        List[float]: 轴上的取值
    """
    try:
        start, stop, step = float(start), float(stop), float(step)
    except (TypeError, ValueError):
        raise ConfigError(name, f"扫描轴端点和步长必须为数值: {start}, {stop}, {step}")

    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise ConfigError(name, "扫描轴端点和步长必须有限")
    if step <= 0:
        raise ConfigError(name, f"步长必须大于0: {step}")
    if stop < start:
        return []

    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count > max_points:
        raise ConfigError(name, f"扫描轴点数 {count} 超过上限 {max_points}")
    return [round(start + k * step, 12) for k in range(count)]


def _load_command_sections(settings: Dict, manager: RunnerManager) -> None:
    for runner in manager.list_runners():
        schema = runner.schema_map()
        for key in settings.get(runner.section, {}):
            if key not in schema:
                raise ConfigError(f"{runner.section}.{key}", "未知的参数")

    for key in settings.get('sweep', {}):
        if key not in SWEEP_KEYS:
            raise ConfigError(f"sweep.{key}", "未知的配置键")


def _parse_assignments(items: Sequence[str]) -> Dict[str, str]:
    fixed = {}
    for item in items:
        if '=' not in item:
            raise ConfigError('--set', f"格式应为 KEY=VALUE: {item}")
        key, value = item.split('=', 1)
        fixed[key.strip()] = value.strip()
    return fixed


def _resolve_sweep(args: argparse.Namespace, settings: Dict,
                   manager: RunnerManager) -> Tuple[SweepSpec, Dict[str, Any]]:
    section = settings.get('sweep', {})
    max_points = settings['run']['max_sweep_points']

    target_name = args.target or section.get('target')
    if not target_name:
        raise ConfigError('--target', "缺少扫描目标")
    runner = manager.find_runner(target_name)
    if runner is None:
        raise ConfigError('--target', f"未知的扫描目标: {target_name}")
    schema = runner.schema_map()

    raw_axes: Dict[str, List[Any]] = {}
    config_axes = section.get('axes') or {}
    if not isinstance(config_axes, dict):
        raise ConfigError('sweep.axes', "必须是映射")
    for name, spec in config_axes.items():
        if isinstance(spec, dict):
            raw_axes[name] = expand_axis(name, spec.get('start'), spec.get('stop'), spec.get('step'), max_points)
        elif isinstance(spec, list):
            raw_axes[name] = spec
        else:
            raise ConfigError(f"sweep.axes.{name}", "必须是列表或 {start, stop, step}")

    for name, start, stop, step in args.axis or []:
        raw_axes[name] = expand_axis(name, start, stop, step, max_points)
    for name, listing in args.values or []:
        raw_axes[name] = [v for v in listing.split(',') if v.strip()]

    if not raw_axes:
        raise ConfigError('--axis', "扫描网格为空")

    axes = []
    for name, values in raw_axes.items():
        if name not in schema:
            raise ConfigError(name, f"{runner.name} 没有这个参数")
        if not values:
            raise ConfigError(name, "扫描轴为空")
        axes.append(SweepAxis(name=name, values=tuple(schema[name].convert(v) for v in values)))

    sweep = SweepSpec(target=RunCommand(runner.name), axes=axes)
    if sweep.size > max_points:
        raise ConfigError('run.max_sweep_points', f"网格点数 {sweep.size} 超过上限 {max_points}")

    fixed = dict(section.get('set') or {})
    fixed.update(_parse_assignments(args.set or []))
    base = runner.resolve(settings.get(runner.section, {}), fixed)
    return sweep, base


def resolve_config(args: argparse.Namespace, manager: Optional[RunnerManager] = None,
                   config_path: Optional[str] = None) -> RunConfig:
    """
    由解析好的命令行参数生成 RunConfig

    Args:
        args: argparse 结果
        manager: 运行器管理器
        config_path: 未给 --config 时使用的配置文件

    Returns:
        RunConfig: 运行配置

    Raises:
        ConfigError: 未知键、类型错误或参数越界
    """
    manager = manager or RunnerManager()
    settings = load_config(args.config or config_path)

    is_valid, message = validate_config(settings)
    if not is_valid:
        raise ConfigError('config', message)
    _load_command_sections(settings, manager)

    run_settings = settings['run']
    seed = args.seed if args.seed is not None else run_settings['seed']
    if not validate_seed(seed):
        raise ConfigError('--seed', f"必须为非负整数: {seed}")

    log_level = args.log_level or ('DEBUG' if args.verbose else settings['logging']['level'])
    command = RunCommand(args.command)

    sweep = None
    if command == RunCommand.SWEEP:
        sweep, parameters = _resolve_sweep(args, settings, manager)
    else:
        runner = manager.get_runner(command.value)
        flags = {spec.name: getattr(args, spec.name, None) for spec in runner.parameter_schema()}
        parameters = runner.resolve(settings.get(runner.section, {}), flags)
        runner.validate(parameters)

    return RunConfig(command=command, parameters=parameters,
                     output_dir=args.output_dir or run_settings['output_dir'],
                     seed=seed, max_workers=run_settings['max_workers'],
                     log_level=log_level, settings=settings, sweep=sweep)


def parse_config(argv: Optional[Sequence[str]] = None, config_path: Optional[str] = None,
                 manager: Optional[RunnerManager] = None) -> RunConfig:
    """
    解析命令行参数列表

    Args:
        argv: 参数列表，None 时取 sys.argv
        config_path: 默认配置文件
        manager: 运行器管理器

    Returns:
        RunConfig: 运行配置
    """
    manager = manager or RunnerManager()
    args = build_arg_parser(manager).parse_args(argv)
    if not args.command:
        raise ConfigError('command', "缺少子命令")
    return resolve_config(args, manager, config_path)
