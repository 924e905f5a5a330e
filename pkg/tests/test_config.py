################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import json

import pytest

from geoshort.Log import Log
from geoshort.Config import Config
from geoshort.Errors import ConfigError


@pytest.fixture
def log():
    log = Log(quiet = True)
    log.messages = []
    log.add_listener(lambda msg: log.messages.append(msg['log']))
    yield log
    log.close()


def test_defaults(log):
    config = Config(log.get('Config')).prepare({})

    assert config['version'] == '0.3'
    assert config['scenario']['kind'] == 'single_flow'
    assert config['stop']['max-iter'] == 10000
    assert config['region']['kind'] == 'none'
    assert config['output']['csv']
    assert log.messages == []


def test_clamp_warns(log):
    config = Config(log.get('Config')).prepare(
        {'scenario': {'threads': 100}, 'stop': {'max-iter': -5}})

    assert config['scenario']['threads'] == 64
    assert config['stop']['max-iter'] == 0

    msgs = [m['msg'] for m in log.messages if m['level'] == 'warning']
    assert 'Clamping "scenario.threads" from 100 to max 64' in msgs
    assert 'Clamping "stop.max-iter" from -5 to min 0' in msgs
    assert all(m['source'] == 'Config' for m in log.messages)


@pytest.mark.parametrize('config', [
    {'scenario': {'kind': 'dance'}},
    {'stop': {'max-iter': 1.5}},
    {'params': {'relaxed': 'yes'}},
    {'params': 3},
    [],
])
def test_bad_values(log, config):
    with pytest.raises(ConfigError):
        Config(log.get('Config')).prepare(config)


def test_upgrade_from_flat_stop(tmp_path):
    path = str(tmp_path / 'geoshort.log')
    log = Log(path, quiet = True)

    config = Config(log.get('Config')).prepare({
        'version': '0.1', 'iterations': 50, 'residual-tol': 1e-6,
        'manifold': 'flat_torus'})
    log.close()

    assert config['version'] == '0.3'
    assert config['stop']['max-iter'] == 50
    assert config['stop']['residual-tol'] == 1e-6
    assert config['manifold'] == {'name': 'flat_torus', 'params': {}}
    assert 'iterations' not in config

    with open(path) as f: lines = f.read().splitlines()
    assert 'I:Config:Upgrading config from 0.1 to 0.3' in lines


def test_newer_version_warns(log):
    Config(log.get('Config')).prepare({'version': '9.0'})
    assert any('newer' in m['msg'] for m in log.messages)


def test_load(log, tmp_path):
    config = Config(log.get('Config'))

    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'manifold': {'name': 'flat_torus'}}))
    assert config.load(str(path))['manifold']['name'] == 'flat_torus'

    with pytest.raises(ConfigError):
        config.load(str(tmp_path / 'missing.json'))

    path.write_text('{"manifold": ')
    with pytest.raises(ConfigError):
        config.load(str(path))


def test_override(log):
    config = Config(log.get('Config'))
    c = config.override(config.prepare({}), seed = 5, max_iter = 7,
                        out = 'results', svg = True)

    assert c['scenario']['seed'] == 5
    assert c['stop']['max-iter'] == 7
    assert c['output']['dir'] == 'results'
    assert c['output']['svg']

    c = config.override(config.prepare({}))
    assert not c['output']['svg']
    assert c['output']['dir'] == '.'
