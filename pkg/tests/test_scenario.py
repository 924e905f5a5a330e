################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import math

import pytest

from geoshort.Log import Log
from geoshort.Config import Config
from geoshort.Scenario import Scenario, run_scenario
from geoshort.Errors import ConfigError


_ZIGZAG = {
    'scenario': {'kind': 'single_flow'},
    'manifold': {'name': 'flat_torus'},
    'loop': {'kind': 'zigzag', 'params': {'n': 32, 'amplitude': 0.05}},
    'params': {'E': 10, 'R': 0.1, 'L': 16, 'relaxed': True},
}


@pytest.fixture
def log():
    log = Log(quiet = True)
    yield log
    log.close()


def _prepare(log, config): return Config(log.get('Config')).prepare(config)


def test_single_flow(log):
    report = run_scenario(_prepare(log, _ZIGZAG), log.get('Scenario'))

    assert report['kind'] == 'single_flow'
    assert report['title'] == 'single_flow on flat_torus'
    assert report['result']['classification'] == 'converged_geodesic'
    assert report['params']['L'] == 16
    assert [l['role'] for l in report['loops']] == ['initial', 'critical']
    assert report['trace'][-1] == pytest.approx(1.0, abs = 1e-6)
    assert report['manifold']['name'] == 'flat_torus'
    assert 'region' not in report

    # Relaxed parameter clauses surface as report warnings
    assert report['warnings']
    assert all(w['level'] == 'warning' for w in report['warnings'])
    assert 'elapsed' in report['timing']


def test_region_audit(log):
    config = _prepare(log, {
        'scenario': {'kind': 'region_audit'},
        'manifold': {'name': 'flat_torus'},
        'region': {'kind': 'complement-ball',
                   'params': {'radius': 0.2, 'rho': 0.05, 'eta': 0.02}},
        'audit': {'samples': 200, 'pushout-samples': 100},
    })
    report = Scenario(config, log.get('Scenario')).run()

    assert report['result']['convexity']['passed']
    assert report['result']['pushout']['samples'] == 100
    assert report['region']['kind'] == 'complement-ball'
    assert report['region_field']


def test_scenarios_needing_regions(log):
    for kind in ('minimize_in_class', 'region_audit'):
        config = _prepare(log, dict(_ZIGZAG, scenario = {'kind': kind}))
        with pytest.raises(ConfigError):
            run_scenario(config, log.get('Scenario'))

    config = _prepare(log, {'scenario': {'kind': 'minmax_sweep'},
                            'dichotomy': {'enabled': True}})
    with pytest.raises(ConfigError):
        run_scenario(config, log.get('Scenario'))


def test_csv_loops(log, tmp_path):
    tmp_path.joinpath('loop.csv').write_text(
        '0.0,0.5\n0.25,0.5\n0.5,0.5\n0.75,0.5\n')
    config = _prepare(log, dict(_ZIGZAG, loop = {'kind': 'csv',
                                                 'file': 'loop.csv'}))
    scenario = Scenario(config, log.get('Scenario'), base = str(tmp_path))

    m = scenario.manifold()
    assert len(scenario.loop(m)) == 4

    scenario.base = str(tmp_path / 'elsewhere')
    with pytest.raises(ConfigError):
        scenario.loop(m)

    tmp_path.joinpath('loop.csv').write_text('not,a,loop\n')
    scenario.base = str(tmp_path)
    with pytest.raises(ConfigError):
        scenario.loop(m)


def test_bad_loop_parameters(log):
    config = _prepare(log, dict(_ZIGZAG, loop = {'kind': 'zigzag',
                                                 'params': {'colour': 1}}))
    scenario = Scenario(config, log.get('Scenario'))
    with pytest.raises(ConfigError):
        scenario.loop(scenario.manifold())


def test_derived_params(log):
    config = _prepare(log, dict(_ZIGZAG, params = {'relaxed': True}))
    scenario = Scenario(config, log.get('Scenario'))
    m = scenario.manifold()

    params = scenario.params(m, 1.0)
    assert params.relaxed
    assert params.L == math.ceil(1.0 / params.R)
