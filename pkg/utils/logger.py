#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
日志管理模块

计算模块用 StructuredLogger 输出 "消息 | 键=值" 形式的日志，数值统一按
有效数字格式化，便于在扫描日志中对比参数。
"""

import os
import logging
import logging.handlers
from numbers import Integral, Real
from typing import Any, Dict, Optional

import numpy as np

DEFAULT_FORMAT = '%(asctime)s %(levelname)s [%(name)s] %(message)s'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def setup_logging(level: str = 'INFO',
                  log_file: Optional[str] = None,
                  format_string: Optional[str] = None,
                  max_size: str = '10MB',
                  backup_count: int = 5) -> logging.Logger:
    """
    设置全局日志配置，重复调用时替换旧的处理器

    Args:
        level: 日志级别 (DEBUG/INFO/WARNING/ERROR)
        log_file: 轮转日志文件路径，为空时只输出到 stderr
        format_string: 日志格式
        max_size: 单个日志文件最大大小，如 "10MB"
        backup_count: 轮转保留的文件数

    Returns:
        logging.Logger: 根日志器
    """
    if level.upper() not in LOG_LEVELS:
        raise ValueError(f"未知的日志级别: {level}")
    numeric_level = getattr(logging, level.upper())
    formatter = logging.Formatter(format_string or DEFAULT_FORMAT)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    handlers = [logging.StreamHandler()]
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.handlers.RotatingFileHandler(
            log_file, maxBytes=_parse_size(max_size), backupCount=backup_count, encoding='utf-8'))

    for handler in handlers:
        handler.setLevel(numeric_level)
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    return root_logger


def configure_from_settings(settings: Dict[str, Any], level: Optional[str] = None) -> logging.Logger:
    """按配置的 logging 段设置日志，level 非空时覆盖配置中的级别"""
    return setup_logging(level=level or settings.get('level', 'INFO'),
                         log_file=settings.get('file'),
                         format_string=settings.get('format'),
                         max_size=settings.get('max_size', '10MB'),
                         backup_count=settings.get('backup_count', 5))


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def _parse_size(size_str: str) -> int:
    """
    解析大小字符串为字节数

    Args:
        size_str: 大小字符串，如 "512KB", "10MB", "1GB"

    Returns:
        int: 字节数
    """
    size_str = str(size_str).upper().strip()
    units = {'KB': 1024, 'MB': 1024 ** 2, 'GB': 1024 ** 3}

    for suffix, factor in units.items():
        if size_str.endswith(suffix):
            return int(size_str[:-2]) * factor

    return int(size_str)


def _format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)) or isinstance(value, Integral):
        return str(value)
    if isinstance(value, Real):
        return f"{float(value):.6g}"
    if isinstance(value, np.ndarray):
        return f"array{value.shape}"
    return str(value)


class StructuredLogger:
    """
    结构化日志器，消息形如 "message | key=value | ..."

    bind() 返回带固定字段的新日志器，例如一次运行的 command。
    """

    def __init__(self, name: str, context: Optional[Dict[str, Any]] = None):
        self.logger = get_logger(name)
        self.name = name
        self.context = dict(context or {})

    def bind(self, **context) -> 'StructuredLogger':
        return StructuredLogger(self.name, {**self.context, **context})

    def debug(self, message: str, **kwargs):
        self._log(logging.DEBUG, message, kwargs)

    def info(self, message: str, **kwargs):
        self._log(logging.INFO, message, kwargs)

    def warning(self, message: str, **kwargs):
        self._log(logging.WARNING, message, kwargs)

    def error(self, message: str, **kwargs):
        self._log(logging.ERROR, message, kwargs)

    def _log(self, level: int, message: str, fields: Dict[str, Any]):
        if not self.logger.isEnabledFor(level):
            return

        fields = {**self.context, **fields}
        if fields:
            message = message + " | " + " | ".join(f"{k}={_format_value(v)}" for k, v in fields.items())
        self.logger.log(level, message)


run_logger = StructuredLogger('piqlab.run')
