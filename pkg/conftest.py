#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试公共配置
"""

import os
import sys

import pytest

# 添加项目根目录到Python路径
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)


@pytest.fixture
def output_dir(tmp_path):
    """每个测试独立的输出目录"""
    return str(tmp_path / 'run')


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """屏蔽外部环境变量对配置的影响"""
    for name in list(os.environ):
        if name.startswith('PIQLAB_') or name == 'SOURCE_DATE_EPOCH':
            monkeypatch.delenv(name, raising=False)
