################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import math

import numpy as np
import pytest

from geoshort import Surfaces
from geoshort.Manifold import (TangentVector, christoffel, exp_map, log_map,
                               distance, minimizing_segment, conv_bound)
from geoshort.Errors import DomainError, ConfigError, NoUniqueGeodesic


def test_flat_torus_christoffel_vanishes():
    m = Surfaces.flat_torus()
    assert np.allclose(christoffel(m, [0.3, 0.7]), 0)


def test_sphere_christoffel():
    m = Surfaces.sphere()
    th = math.pi / 3
    G = christoffel(m, [th, 0.0])

    assert G[0, 1, 1] == pytest.approx(-math.sin(th) * math.cos(th))
    assert G[1, 0, 1] == pytest.approx(1 / math.tan(th))
    assert G[1, 1, 0] == pytest.approx(1 / math.tan(th))
    assert G[0, 0, 0] == pytest.approx(0)


def test_catenoid_waist_christoffel():
    m = Surfaces.revolution('cosh')
    G = christoffel(m, [0.0, 1.0])
    assert G[0, 1, 1] == pytest.approx(0, abs = 1e-12)


def test_closed_form_metrics():
    m = Surfaces.sphere(radius = 2.0)
    g = m.metric_at(np.array([[math.pi / 4, 1.0]]))[0]
    assert np.allclose(g, [[4, 0], [0, 4 * math.sin(math.pi / 4) ** 2]])

    m = Surfaces.revolution('cosh')
    g = m.metric_at(np.array([[0.5, 0.0]]))[0]
    assert np.allclose(g, [[1 + math.sinh(0.5) ** 2, 0],
                           [0, math.cosh(0.5) ** 2]])


def test_metric_positive_and_periodic():
    for m in (Surfaces.sphere(), Surfaces.flat_torus(),
              Surfaces.revolution('cosh'), Surfaces.ellipsoid(),
              Surfaces.perturbed_torus()):
        lo = m.lower + 1e-3
        hi = m.upper - 1e-3
        X, Y = np.meshgrid(np.linspace(lo[0], hi[0], 100),
                           np.linspace(lo[1], hi[1], 100))
        P = np.stack([X.ravel(), Y.ravel()], axis = 1)

        g = m.metric_at(P)
        assert np.allclose(g, np.swapaxes(g, -1, -2))
        assert np.linalg.eigvalsh(g).min() > 0

        for k, per in enumerate(m.periods):
            if per is None: continue
            shifted = P.copy()
            shifted[:, k] += per
            assert np.allclose(m.metric_at(shifted), g)


def test_exp_map():
    m = Surfaces.sphere()
    assert np.allclose(exp_map(m, TangentVector([1.0, 2.0], [0, 0])),
                       [1.0, 2.0])

    p = exp_map(m, TangentVector([math.pi / 2, 0], [0, 1]), math.pi / 2)
    assert np.allclose(p, [math.pi / 2, math.pi / 2])

    m = Surfaces.flat_torus()
    p = exp_map(m, TangentVector([0.1, 0.2], [1, 0]), 0.5)
    assert np.allclose(p, [0.6, 0.2])


def test_log_map():
    m = Surfaces.sphere()
    v = log_map(m, [1.0, 1.0], [1.0, 1.0])
    assert np.allclose(v.components, 0)

    v = log_map(m, [math.pi / 2, 0], [math.pi / 2, math.pi / 4])
    assert v.norm(m) == pytest.approx(math.pi / 4)
    assert v.components[0] == pytest.approx(0, abs = 1e-12)

    m = Surfaces.flat_torus()
    v = log_map(m, [0.9, 0.5], [0.1, 0.5])
    assert np.allclose(v.components, [0.2, 0])


def test_pole_difference_is_zero():
    m = Surfaces.ellipsoid()
    pole = np.array([[0.0, 0.0], [math.pi, 0.0]])

    # g_phi_phi vanishes at the poles so every periodic image has norm 0
    assert np.array_equal(m.diff(pole, pole), np.zeros((2, 2)))
    assert np.allclose(m.log(pole, pole), 0)

    D = m.diff([[0.0, 0.1]], [[0.0, 6.2]])
    assert D[0, 1] == pytest.approx(6.1 - 2 * math.pi)


def test_log_map_beyond_convexity_bound():
    m = Surfaces.sphere()
    with pytest.raises(NoUniqueGeodesic):
        log_map(m, [math.pi / 2, 0], [math.pi / 2, 3.0])


def test_distance():
    m = Surfaces.sphere()
    assert distance(m, [1.0, 1.0], [1.0, 1.0]) == 0
    assert distance(m, [math.pi / 2, 0], [math.pi / 2, math.pi / 2]) == \
        pytest.approx(math.pi / 2)

    m = Surfaces.flat_torus()
    assert distance(m, [0, 0], [0.5, 0.5]) == pytest.approx(math.sqrt(2) / 2)


def test_minimizing_segment():
    m = Surfaces.sphere()
    seg = minimizing_segment(m, [math.pi / 2, 0], [math.pi / 2, 1.0])
    assert seg.length == pytest.approx(1.0)
    assert np.allclose(seg.midpoint(), [math.pi / 2, 0.5])
    assert np.allclose(seg.end, [math.pi / 2, 1.0])

    seg = minimizing_segment(m, [1.0, 1.0], [1.0, 1.0])
    assert seg.length == 0

    m = Surfaces.flat_torus()
    seg = minimizing_segment(m, [0.9, 0.5], [0.1, 0.7])
    assert np.allclose(m.diff(seg.midpoint(), [0.0, 0.6]), 0, atol = 1e-12)

    with pytest.raises(NoUniqueGeodesic):
        minimizing_segment(m, [0.1, 0.1], [0.4, 0.1], R = 0.2)


def test_conv_bound():
    assert conv_bound(Surfaces.sphere()) == pytest.approx(math.pi / 2 * 0.9)
    assert conv_bound(Surfaces.flat_torus()) == pytest.approx(0.25 * 0.9)
    assert conv_bound(Surfaces.sphere(radius = 1e-6, safety = 1.0)) < 1e-5


def test_exp_log_round_trip_by_shooting():
    m = Surfaces.perturbed_torus()
    rng = np.random.default_rng(1)
    P = rng.uniform(0, 1, (20, 2))
    Q = P + rng.uniform(-0.08, 0.08, (20, 2))

    V = m.log(P, Q)
    E = m.exp(P, V)
    assert np.abs(m.diff(E, m.wrap(Q))).max() < 1e-6

    d = m.distance(P, Q)
    assert np.allclose(d, m.distance(Q, P), atol = 1e-8)


def test_speed_conservation():
    m = Surfaces.perturbed_torus()
    P = np.array([[0.3, 0.4], [0.6, 0.5]])
    V = np.array([[0.2, 0.05], [-0.1, 0.15]])

    xs, vs = m.trajectory(P, V)
    speed = m.norm(xs, vs)
    assert np.max(np.abs(speed - speed[0]) / speed[0]) < 1e-6


def test_domain_errors():
    m = Surfaces.sphere()
    with pytest.raises(DomainError) as e:
        m.check_domain(np.array([[4.0, 0.0]]), 'exp_map')
    assert str(e.value).startswith('exp_map:')

    with pytest.raises(ConfigError):
        Surfaces.make('klein_bottle')

    with pytest.raises(ConfigError):
        Surfaces.make('sphere', {'radius': 1, 'colour': 'red'})


def test_registry():
    names = [entry['name'] for entry in Surfaces.list_manifolds()]
    assert names == sorted(['sphere', 'flat_torus', 'revolution', 'ellipsoid',
                            'perturbed_torus'])

    m = Surfaces.make('flat_torus', {'periods': [2, 1]})
    assert m.periods == [2.0, 1.0]
    assert m.describe()['exact']
