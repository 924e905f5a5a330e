################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import json
import math
import os

import pytest

from geoshort import main
from geoshort.Report import read_report, read_loop_csv, report_digest


_ZIGZAG = {
    'scenario': {'kind': 'single_flow'},
    'manifold': {'name': 'flat_torus'},
    'loop': {'kind': 'zigzag', 'params': {'n': 32, 'amplitude': 0.05}},
    'params': {'E': 10, 'R': 0.1, 'L': 16, 'relaxed': True},
    'stop': {'record-stride': 1},
}


def _write(tmp_path, config, name = 'scenario.json'):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


def test_list_manifolds(capsys):
    assert main(['list-manifolds']) == 0
    out = capsys.readouterr().out
    for name in ('sphere', 'flat_torus', 'revolution', 'ellipsoid',
                 'perturbed_torus'):
        assert name in out


def test_config_errors_exit_2(tmp_path):
    path = _write(tmp_path, {'manifold': {'name': 'klein_bottle'}})
    assert main(['run', path, '--out', str(tmp_path)]) == 2

    assert main(['run', str(tmp_path / 'missing.json')]) == 2

    path = _write(tmp_path, dict(_ZIGZAG,
                                 scenario = {'kind': 'minimize_in_class'}))
    assert main(['run', path, '--out', str(tmp_path)]) == 2


def test_run_writes_outputs(tmp_path):
    path = _write(tmp_path, _ZIGZAG)
    out = str(tmp_path / 'out')

    assert main(['run', path, '--out', out, '--svg']) == 0

    for name in ('report.json', 'loop-initial.csv', 'loop-critical.csv',
                 'report.svg'):
        assert os.path.exists(os.path.join(out, name))

    report = read_report(os.path.join(out, 'report.json'))
    assert report['result']['classification'] == 'converged_geodesic'
    assert report['digest'] == report_digest(report)
    assert report['config']['output']['dir'] == out

    P = read_loop_csv(os.path.join(out, 'loop-critical.csv'))
    assert P.shape == (32, 2)

    with open(os.path.join(out, 'report.svg')) as f:
        assert f.read().lstrip().startswith('<?xml')


def test_runs_are_deterministic(tmp_path):
    path = _write(tmp_path, _ZIGZAG)
    out = str(tmp_path / 'out')
    digests = []

    for i in range(2):
        assert main(['run', path, '--out', out, '--seed', '3']) == 0
        digests.append(read_report(os.path.join(out, 'report.json'))['digest'])

    assert digests[0] == digests[1]


def test_max_iter_override(tmp_path):
    path = _write(tmp_path, _ZIGZAG)
    out = str(tmp_path / 'out')

    assert main(['run', path, '--out', out, '--max-iter', '1']) == 0
    report = read_report(os.path.join(out, 'report.json'))
    assert report['result']['classification'] == 'max_iterations'
    assert os.path.exists(os.path.join(out, 'loop-final.csv'))


def test_csv_loop_next_to_config(tmp_path):
    tmp_path.joinpath('start.csv').write_text(
        '\n'.join('%r,0.5' % (i / 32) for i in range(32)) + '\n')
    path = _write(tmp_path, dict(_ZIGZAG, loop = {'kind': 'csv',
                                                  'file': 'start.csv'},
                                 params = {'E': 10, 'R': 0.1, 'L': 16,
                                           'relaxed': True}))
    out = str(tmp_path / 'out')

    assert main(['run', path, '--out', out]) == 0
    report = read_report(os.path.join(out, 'report.json'))
    assert report['result']['classification'] == 'converged_geodesic'


def test_audit_groups(tmp_path, capsys):
    out = str(tmp_path / 'audit')
    assert main(['audit-groups', '--max-order', '4', '--no-extras',
                 '--out', out]) == 0

    assert 'passed True' in capsys.readouterr().out
    report = read_report(os.path.join(out, 'report.json'))
    assert report['kind'] == 'group_audit'
    assert report['result']['summary']['groups'] == 5


# The configuration shown in README.md
_NECK = {
    'scenario': {'kind': 'minimize_in_class'},
    'manifold': {'name': 'revolution', 'params': {'profile': 'cosh'}},
    'region': {'kind': 'band', 'params': {'half_width': 0.75, 'rho': 1.0,
                                          'eta': 0.05}},
    'loop': {'kind': 'parallel', 'params': {'z': 0.7, 'n': 64}},
    'params': {'relaxed': True},
    'stop': {'max-iter': 500},
}


def test_band_without_collar_constants_exits_2(tmp_path):
    region = {'kind': 'band', 'params': {'half_width': 0.75}}
    path = _write(tmp_path, dict(_NECK, region = region))
    assert main(['run', path, '--out', str(tmp_path)]) == 2


def test_echoed_config_reproduces_run(tmp_path):
    path = _write(tmp_path, _NECK)
    out = str(tmp_path / 'out')

    assert main(['run', path, '--out', out, '--max-iter', '2']) == 0
    first = read_report(os.path.join(out, 'report.json'))
    assert first['result']['flow']['classification'] == 'max_iterations'
    assert first['result']['trapped']
    assert first['config']['stop']['max-iter'] == 2

    # The report carries the config with overrides applied
    echoed = _write(tmp_path, first['config'], 'echoed.json')
    assert main(['run', echoed]) == 0
    again = read_report(os.path.join(out, 'report.json'))

    assert again['result']['flow']['classification'] == \
        first['result']['flow']['classification']
    assert again['result']['meets'] == first['result']['meets']
    assert again['digest'] == first['digest']


@pytest.mark.slow
def test_documented_neck_config(tmp_path):
    path = _write(tmp_path, _NECK)
    out = str(tmp_path / 'out')

    assert main(['run', path, '--out', out]) == 0
    report = read_report(os.path.join(out, 'report.json'))
    flow = report['result']['flow']

    assert flow['classification'] == 'converged_geodesic'
    assert flow['length'] == pytest.approx(2 * math.pi, rel = 0.01)
    assert report['result']['trapped']
    assert report['result']['witness'] is None
