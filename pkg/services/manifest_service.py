#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
运行清单服务 - 记录配置回显、版本、时间戳和每个输出文件的摘要
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List

import jsonschema

from adapters.output_writer import dumps_json
from config.settings import TOOL_NAME, TOOL_VERSION
from utils.logger import run_logger

MANIFEST_NAME = 'manifest.json'
SCHEMA_VERSION = '1.0'

MANIFEST_SCHEMA = {
    'type': 'object',
    'required': ['schema_version', 'tool', 'tool_version', 'config_echo', 'started', 'finished',
                 'status', 'output_files', 'results'],
    'properties': {
        'schema_version': {'const': SCHEMA_VERSION},
        'tool': {'type': 'string'},
        'tool_version': {'type': 'string'},
        'config_echo': {'type': 'object'},
        'started': {'type': 'string'},
        'finished': {'type': 'string'},
        'status': {'enum': ['ok', 'partial', 'error']},
        'output_files': {
            'type': 'array',
            'items': {
                'type': 'object',
                'required': ['path', 'sha256', 'bytes'],
                'properties': {
                    'path': {'type': 'string'},
                    'sha256': {'type': 'string', 'pattern': '^[0-9a-f]{64}$'},
                    'bytes': {'type': 'integer', 'minimum': 0},
                },
                'additionalProperties': False,
            },
        },
        'results': {'type': 'object'},
    },
    'additionalProperties': False,
}


def timestamp() -> str:
    """当前UTC时间，设置了 SOURCE_DATE_EPOCH 时取该值"""
    epoch = os.environ.get('SOURCE_DATE_EPOCH')
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.strftime('%Y-%m-%dT%H:%M:%SZ')


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """
    运行清单

    Attributes:
        config_echo: 解析后的完整运行配置
        started: 开始时间
        finished: 结束时间
        status: ok / partial (扫描中有失败点) / error
        output_files: 文件列表 (path, sha256, bytes)
        results: 运行器摘要
    """
    config_echo: Dict[str, Any]
    started: str
    finished: str = ''
    status: str = 'ok'
    output_files: List[Dict[str, Any]] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    tool: str = TOOL_NAME
    tool_version: str = TOOL_VERSION
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return json.loads(dumps_json(asdict(self)))

    def validate(self) -> None:
        """按 MANIFEST_SCHEMA 校验，失败时抛出 jsonschema.ValidationError"""
        jsonschema.validate(self.to_dict(), MANIFEST_SCHEMA)


class ManifestService:
    """清单服务"""

    def __init__(self, output_dir: str):
        self.output_dir = output_dir

    def start(self, config_echo: Dict[str, Any]) -> RunManifest:
        return RunManifest(config_echo=config_echo, started=timestamp())

    def describe_files(self, names: List[str]) -> List[Dict[str, Any]]:
        """
        计算文件摘要

        Args:
            names: 相对输出目录的文件名

        Returns:
            List[Dict[str, Any]]: 按文件名排序的 (path, sha256, bytes)
        """
        entries = []
        for name in sorted(names):
            if name == MANIFEST_NAME:
                continue
            path = os.path.join(self.output_dir, name)
            entries.append({'path': name, 'sha256': sha256_file(path), 'bytes': os.path.getsize(path)})
        return entries

    def finish(self, manifest: RunManifest, files: List[str], results: Dict[str, Any],
               status: str = 'ok') -> str:
        """
        补全清单、校验并写出

        Args:
            manifest: start() 返回的清单
            files: 本次运行写出的文件
            results: 运行器摘要
            status: 运行状态

        Returns:
            str: 清单路径
        """
        manifest.output_files = self.describe_files(files)
        manifest.results = results
        manifest.status = status
        manifest.finished = timestamp()
        manifest.validate()

        path = os.path.join(self.output_dir, MANIFEST_NAME)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(dumps_json(manifest.to_dict()))

        run_logger.info("运行清单已写出", path=path, files=len(manifest.output_files), status=status)
        return path


def load_manifest(path: str) -> Dict[str, Any]:
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    jsonschema.validate(data, MANIFEST_SCHEMA)
    return data


def verify_manifest(path: str) -> List[str]:
    """
    对照磁盘文件检查清单

    Args:
        path: manifest.json 路径

    Returns:
        List[str]: 缺失或摘要不一致的文件名，全部一致时为空
    """
    data = load_manifest(path)
    base = os.path.dirname(os.path.abspath(path))
    mismatched = []
    for entry in data['output_files']:
        file_path = os.path.join(base, entry['path'])
        if not os.path.isfile(file_path) or sha256_file(file_path) != entry['sha256']:
            mismatched.append(entry['path'])
    return mismatched

