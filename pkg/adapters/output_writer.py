#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
输出写入适配器
把运行结果写成CSV/JSON/文本，并按写出顺序记录文件，供清单计算摘要
"""

import json
import math
import os
from enum import Enum
from typing import Any, List

import numpy as np
import pandas as pd

from utils.logger import get_logger
from utils.validators import sanitize_filename


def to_jsonable(value: Any) -> Any:
    """numpy 标量/数组、枚举、元组转成 json 可写的类型，非有限浮点数写成 "inf"/"nan" 字符串"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def dumps_json(data: Any) -> str:
    """键排序、缩进固定的JSON文本"""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False) + '\n'


class OutputWriter:
    """结果写入器"""

    def __init__(self, output_dir: str):
        """
        初始化写入器

        Args:
            output_dir: 输出目录，不存在时创建
        """
        self.output_dir = output_dir
        self.logger = get_logger(__name__)
        self.written: List[str] = []
        os.makedirs(output_dir, exist_ok=True)

    def _path(self, name: str) -> str:
        safe_name = sanitize_filename(name)
        if safe_name in self.written:
            raise ValueError(f"同一次运行中重复写出文件: {safe_name}")
        self.written.append(safe_name)
        return os.path.join(self.output_dir, safe_name)

    def write_table(self, name: str, table: pd.DataFrame) -> str:
        path = self._path(name)
        table.to_csv(path, index=False, lineterminator='\n')
        self.logger.debug(f"写出表格: {path} ({len(table)} 行)")
        return path

    def write_json(self, name: str, data: Any) -> str:
        path = self._path(name)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(dumps_json(data))
        return path

    def write_text(self, name: str, text: str) -> str:
        path = self._path(name)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        return path

    def write_result(self, result) -> List[str]:
        """
        按 表格 → 文档 → 文本 的顺序写出一个运行结果

        Args:
            result: RunnerResult

        Returns:
            List[str]: 写出的文件路径
        """
        paths = [self.write_table(name, table) for name, table in result.tables.items()]
        paths += [self.write_json(name, data) for name, data in result.documents.items()]
        paths += [self.write_text(name, text) for name, text in result.texts.items()]
        return paths

    @property
    def files(self) -> List[str]:
        """相对输出目录的文件名，按字典序"""
        return sorted(self.written)
