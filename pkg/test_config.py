#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
配置、参数校验与文本格式测试
"""

import logging

import numpy as np
import pytest

from adapters.kv_format import dump_ensemble, dump_wire, load_ensemble, load_wire
from config.settings import DEFAULT_CONFIG, EXAMPLE_CONFIG_YAML, ConfigError, load_config
from core.bath_models import RateDistribution, RTNEnsemble
from core.parsers.run_config_parser import expand_axis, parse_config
from core.runners.base_runner import ParameterSpec
from core.runners.rg_runner import RGRunner
from core.wire_builder import JunctionKind, JunctionProfile, WireParameters, build_pi_junction
from utils.logger import StructuredLogger, _parse_size, configure_from_settings, setup_logging
from utils.validators import (
    sanitize_filename,
    validate_config,
    validate_even_sites,
    validate_in_range,
    validate_seed,
)


def write_yaml(tmp_path, text, name='piqlab.yaml'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestLoadConfig:

    def test_defaults(self):
        config = load_config()
        assert config['run'] == DEFAULT_CONFIG['run']
        assert config['physics']['s_star'] == 0.76

    def test_defaults_are_not_shared(self):
        config = load_config()
        config['run']['seed'] = 99
        assert DEFAULT_CONFIG['run']['seed'] == 0

    def test_env_overrides_defaults(self, monkeypatch):
        monkeypatch.setenv('PIQLAB_SEED', '7')
        monkeypatch.setenv('PIQLAB_S_STAR', '0.7')
        config = load_config()
        assert config['run']['seed'] == 7
        assert config['physics']['s_star'] == 0.7

    def test_file_overrides_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv('PIQLAB_SEED', '7')
        monkeypatch.setenv('PIQLAB_MAX_WORKERS', '3')
        config = load_config(write_yaml(tmp_path, "run:\n  seed: 9\n"))
        assert config['run']['seed'] == 9
        assert config['run']['max_workers'] == 3

    def test_bad_env_value(self, monkeypatch):
        monkeypatch.setenv('PIQLAB_MAX_WORKERS', 'many')
        with pytest.raises(ConfigError, match='PIQLAB_MAX_WORKERS'):
            load_config()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match='--config'):
            load_config(str(tmp_path / 'absent.yaml'))

    def test_unsupported_suffix(self, tmp_path):
        with pytest.raises(ConfigError, match='格式'):
            load_config(write_yaml(tmp_path, "run: {}\n", name='piqlab.json'))

    def test_yaml_syntax_error(self, tmp_path):
        with pytest.raises(ConfigError, match='YAML'):
            load_config(write_yaml(tmp_path, "run: [unclosed\n"))

    def test_top_level_must_be_mapping(self, tmp_path):
        with pytest.raises(ConfigError, match='映射'):
            load_config(write_yaml(tmp_path, "- 1\n- 2\n"))

    def test_unknown_section(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            load_config(write_yaml(tmp_path, "plotting:\n  dpi: 100\n"))
        assert excinfo.value.key == 'plotting'

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            load_config(write_yaml(tmp_path, "run:\n  threads: 2\n"))
        assert excinfo.value.key == 'run.threads'

    def test_example_config_resolves(self, tmp_path):
        path = write_yaml(tmp_path, EXAMPLE_CONFIG_YAML)
        run_config = parse_config(['zero-modes'], config_path=path)
        assert run_config.parameters['N'] == 40
        assert run_config.parameters['mu'] == 0.2
        assert run_config.settings['logging']['file'] == 'logs/piqlab.log'


class TestValidators:

    @pytest.mark.parametrize('value,expected', [(4, True), (40, True), (2, False), (5, False), (4.0, False),
                                                (True, False)])
    def test_even_sites(self, value, expected):
        assert validate_even_sites(value) is expected

    @pytest.mark.parametrize('value,expected', [(0, True), (12, True), (-1, False), (1.5, False), (False, False)])
    def test_seed(self, value, expected):
        assert validate_seed(value) is expected

    def test_in_range_bounds(self):
        assert validate_in_range(1.0, 0.0, 1.0)
        assert not validate_in_range(1.0, 0.0, 1.0, include_high=False)
        assert not validate_in_range(float('nan'), 0.0, 1.0)

    @pytest.mark.parametrize('name,expected', [
        ('curve.csv', 'curve.csv'),
        ('../curve.csv', '.._curve.csv'),
        ('a:b*c', 'a_b_c'),
        ('', 'unnamed'),
        ('..', 'unnamed'),
    ])
    def test_sanitize_filename(self, name, expected):
        assert sanitize_filename(name) == expected

    def test_validate_config_accepts_defaults(self):
        assert validate_config(load_config()) == (True, None)

    @pytest.mark.parametrize('section,key,value,fragment', [
        ('run', 'max_workers', 0, 'max_workers'),
        ('run', 'max_sweep_points', -5, 'max_sweep_points'),
        ('run', 'seed', -1, 'seed'),
        ('run', 'output_dir', '', 'output_dir'),
        ('physics', 's_star', 1.2, 's_star'),
        ('physics', 's_star_uncertainty', -0.1, 's_star_uncertainty'),
    ])
    def test_validate_config_rejects(self, section, key, value, fragment):
        config = load_config()
        config[section][key] = value
        is_valid, message = validate_config(config)
        assert not is_valid
        assert fragment in message

    def test_validate_config_requires_sections(self):
        is_valid, message = validate_config({'logging': {}, 'run': {}})
        assert not is_valid
        assert 'physics' in message


class TestParameterSpec:

    def test_int_conversion(self):
        spec = ParameterSpec('N', 'int', 40)
        assert spec.convert('42') == 42
        assert spec.convert(42.0) == 42
        with pytest.raises(ConfigError, match='N'):
            spec.convert('4.5')
        with pytest.raises(ConfigError):
            spec.convert(True)

    def test_bool_conversion(self):
        spec = ParameterSpec('probe', 'bool', False)
        assert spec.convert('yes') is True
        assert spec.convert('off') is False
        assert spec.convert(True) is True
        with pytest.raises(ConfigError):
            spec.convert('maybe')

    def test_float_list_conversion(self):
        spec = ParameterSpec('rates', 'floats', None)
        assert spec.convert('0.1, 0.2,0.3') == [0.1, 0.2, 0.3]
        assert spec.convert([1, 2]) == [1.0, 2.0]

    def test_choices(self):
        spec = ParameterSpec('grid', 'str', 'log', choices=('log', 'linear'))
        with pytest.raises(ConfigError, match='grid'):
            spec.convert('cubic')

    def test_flag(self):
        assert ParameterSpec('t_max', 'float', 1.0).flag == '--t-max'

    def test_resolve_layers(self):
        runner = RGRunner()
        params = runner.resolve({'s': 0.5}, {'s': '0.7', 'lam0': None})
        assert params['s'] == 0.7
        assert params['lam0'] == 0.1

    def test_resolve_rejects_unknown_key(self):
        with pytest.raises(ConfigError) as excinfo:
            RGRunner().resolve({'beta': 1.0})
        assert excinfo.value.key == 'rg.beta'


class TestExpandAxis:

    def test_inclusive_grid(self):
        values = expand_axis('s', 0.5, 1.5, 0.1, 100)
        assert len(values) == 11
        assert values[3] == 0.8
        assert values[-1] == 1.5

    def test_string_endpoints(self):
        assert expand_axis('N', '20', '40', '10', 100) == [20.0, 30.0, 40.0]

    def test_reversed_range_is_empty(self):
        assert expand_axis('s', 1.0, 0.5, 0.1, 100) == []

    @pytest.mark.parametrize('start,stop,step', [(0.0, 1.0, 0.0), (0.0, 1.0, -0.1), ('a', 1.0, 0.1),
                                                 (0.0, float('inf'), 0.1)])
    def test_rejects_bad_axis(self, start, stop, step):
        with pytest.raises(ConfigError, match='s'):
            expand_axis('s', start, stop, step, 100)

    def test_point_limit(self):
        with pytest.raises(ConfigError, match='上限'):
            expand_axis('s', 0.0, 1.0, 0.001, 100)


class TestKeyValueFormat:

    def test_wire_round_trip_is_exact(self):
        profile = JunctionProfile(kind=JunctionKind.SHORT_JUNCTION, gamma=0.7, tunneling=0.1 + 0.2,
                                  upsilon=1.0 / 3.0)
        wire = build_pi_junction(12, profile, 0.1 + 0.7)
        loaded = load_wire(dump_wire(wire))
        assert loaded.n_sites == wire.n_sites
        assert loaded.mu == wire.mu
        assert loaded.bonds == wire.bonds

    def test_wire_text_lists_bond_indices(self):
        text = dump_wire(WireParameters(n_sites=4, mu=0.0, bonds=((1.0, 0.5),) * 3))
        assert 'kind: wire' in text
        assert '[-2, 1.0, 0.5]' in text

    def test_wire_bonds_must_be_contiguous(self):
        text = "kind: wire\nn_sites: 4\nmu: 0.0\nbonds:\n- [-2, 1.0, 0.5]\n- [0, 1.0, 0.5]\n- [1, 1.0, 0.5]\n"
        with pytest.raises(ValueError, match='不连续'):
            load_wire(text)

    def test_wire_rejects_other_kind(self):
        with pytest.raises(ValueError, match='wire'):
            load_wire("kind: rtn_ensemble\n")

    def test_wire_rejects_bad_yaml(self):
        with pytest.raises(ValueError, match='解析失败'):
            load_wire("kind: [wire\n")

    def test_ensemble_round_trip_is_exact(self):
        ensemble = RTNEnsemble.log_uniform(7, 1e-3, 1e-1, amplitude=1.3, seed=17)
        loaded = load_ensemble(dump_ensemble(ensemble))
        assert loaded.rate_distribution == RateDistribution.LOG_UNIFORM
        assert loaded.seed == 17
        assert loaded.rate_min == 1e-3 and loaded.rate_max == 1e-1
        np.testing.assert_array_equal(loaded.rates, ensemble.rates)
        np.testing.assert_array_equal(loaded.amplitudes, ensemble.amplitudes)


class TestLogging:

    def test_parse_size(self):
        assert _parse_size('512KB') == 512 * 1024
        assert _parse_size('10MB') == 10 * 1024 ** 2
        assert _parse_size('2048') == 2048

    def test_file_handler(self, tmp_path):
        log_file = tmp_path / 'logs' / 'piqlab.log'
        root = setup_logging(level='DEBUG', log_file=str(log_file))
        try:
            logging.getLogger('piqlab.test').debug("写入测试日志")
            for handler in root.handlers:
                handler.flush()
            assert "写入测试日志" in log_file.read_text(encoding='utf-8')
        finally:
            setup_logging(level='WARNING')

    def test_rejects_unknown_level(self):
        with pytest.raises(ValueError):
            setup_logging(level='TRACE')

    def test_configure_from_settings(self, tmp_path):
        log_file = tmp_path / 'run.log'
        root = configure_from_settings({'level': 'INFO', 'file': str(log_file), 'max_size': '1MB'},
                                       level='ERROR')
        try:
            assert root.level == logging.ERROR
            assert len(root.handlers) == 2
        finally:
            setup_logging(level='WARNING')

    def test_structured_fields(self, caplog):
        log = StructuredLogger('piqlab.test').bind(command='rg')
        with caplog.at_level(logging.INFO, logger='piqlab.test'):
            log.info("积分完成", lam=np.float64(0.31575012345), steps=np.int64(40), trajectory=np.zeros(3))
        assert caplog.messages == ["积分完成 | command=rg | lam=0.31575 | steps=40 | trajectory=array(3,)"]

    def test_bound_fields_do_not_leak(self, caplog):
        base = StructuredLogger('piqlab.test')
        base.bind(command='rg')
        with caplog.at_level(logging.INFO, logger='piqlab.test'):
            base.info("无字段")
        assert caplog.messages == ["无字段"]
