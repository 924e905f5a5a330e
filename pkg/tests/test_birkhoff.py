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
from geoshort.Loop import (DiscreteLoop, latitude, parallel, torus_line,
                           zigzag, polygon, loop_metric)
from geoshort.Birkhoff import (BirkhoffParams, FlowStop, validate_params,
                               choose_params, even_replace, odd_replace,
                               const_speed, birkhoff_step, homotopy_phi,
                               iterate_flow, geodesic_residual, to_form)
from geoshort.Region import cap
from geoshort.Errors import ParamsError, FlowStepRefused, ConfigError


def test_validate_params():
    m = Surfaces.sphere()
    p = validate_params(4 * math.pi ** 2, 0.6, 110, m)
    assert p.n == 220
    assert not p.warnings

    with pytest.raises(ParamsError) as e:
        validate_params(100, 0.5, 5, m)
    assert any('sqrt(E)' in c for c in e.value.clauses)

    region = cap(m, theta0 = 1.0, rho = 0.5, eta = 0.1)
    with pytest.raises(ParamsError) as e:
        validate_params(1, 0.3, 20, m, region)
    assert any('rho/2' in c for c in e.value.clauses)

    with pytest.raises(ParamsError):
        validate_params(1, 0.8, 20, m)


def test_relaxed_params_warn():
    m = Surfaces.sphere()
    p = validate_params(100, 0.5, 5, m, relaxed = True)
    assert p.relaxed
    assert len(p.warnings) == 2

    # Radius clauses stay strict
    with pytest.raises(ParamsError):
        validate_params(100, 0.9, 5, m, relaxed = True)


def test_choose_params():
    m = Surfaces.sphere()
    p = choose_params(m, 2 * math.pi)
    assert p.E == pytest.approx((1.05 * 2 * math.pi) ** 2)
    assert p.R == pytest.approx(0.99 * 0.9 * math.pi / 4)
    assert p.E / p.R ** 2 <= p.L

    p = choose_params(m, 2 * math.pi, relaxed = True)
    assert p.L == math.ceil(2 * math.pi / p.R)

    with pytest.raises(ConfigError):
        choose_params(m, 1.0, radius_factor = 1.5)


def test_even_replace_fixes_geodesics():
    m = Surfaces.sphere()
    params = BirkhoffParams(50, 0.6, 16)
    equator = latitude(m, math.pi / 2, 32)

    out = even_replace(equator, params)
    assert np.allclose(m.diff(out.points, equator.points), 0, atol = 1e-9)


def test_even_replace_zigzag():
    m = Surfaces.flat_torus()
    params = BirkhoffParams(10, 0.1, 16)
    loop = zigzag(m, 32, 0.05)

    out = even_replace(loop, params)
    assert np.allclose(out.points[:, 1], 0)
    assert np.allclose(out.points[:, 0], loop.points[:, 0])
    assert out.length == pytest.approx(1.0)
    assert loop.length == pytest.approx(
        32 * math.sqrt((1 / 32) ** 2 + 0.05 ** 2))

    out = odd_replace(loop, params)
    assert np.allclose(out.points[:, 1], 0.05)


def test_odd_replace_wraps_around():
    m = Surfaces.flat_torus()
    params = BirkhoffParams(10, 0.35, 4)
    P = [[0.0, 0.0], [0.1, 0.02], [0.25, 0.0], [0.4, 0.03],
         [0.5, 0.0], [0.6, 0.01], [0.75, 0.0], [0.9, 0.04]]
    out = odd_replace(polygon(m, P), params)

    # Breakpoint 0 is the midpoint of the arc from b_7 to b_1
    assert np.allclose(m.diff(out.points[0], [0.0, 0.03]), 0, atol = 1e-12)
    assert np.allclose(out.points[1::2], np.asarray(P)[1::2])


def test_even_replace_sphere_midpoints():
    m = Surfaces.sphere()
    params = BirkhoffParams(50, 0.6, 16)
    P = latitude(m, math.pi / 2, 32).points.copy()
    P[1::2, 0] += 0.05

    out = even_replace(polygon(m, P), params)
    assert np.allclose(out.points[1::2, 0], math.pi / 2)
    assert np.allclose(out.points[1::2, 1], P[1::2, 1])


def test_const_speed():
    m = Surfaces.flat_torus()
    line = torus_line(m, 8)
    assert np.allclose(const_speed(line).points, line.points)

    P = [[0.0, 0.5], [0.5, 0.5], [0.6, 0.5], [0.7, 0.5], [0.8, 0.5],
         [0.9, 0.5]]
    even = const_speed(polygon(m, P))
    assert np.allclose(even.lengths, 1 / 6)
    assert np.allclose(even.points[0], [0.0, 0.5])

    point = DiscreteLoop(m, np.tile([0.3, 0.3], (6, 1)))
    assert np.allclose(const_speed(point).points, point.points)


def test_step_fixed_point_and_shortening():
    m = Surfaces.sphere()
    params = BirkhoffParams(50, 0.6, 16)
    equator = latitude(m, math.pi / 2, 32)
    assert loop_metric(birkhoff_step(equator, params), equator) <= 1e-6
    assert geodesic_residual(equator) <= 1e-6

    t = Surfaces.flat_torus()
    params = BirkhoffParams(10, 0.1, 16)
    loop = zigzag(t, 32, 0.05)
    out = birkhoff_step(loop, params)
    assert out.length < loop.length
    assert out.length == pytest.approx(1.0, abs = 1e-4)

    lat = latitude(m, math.pi / 3, 32)
    assert birkhoff_step(lat, BirkhoffParams(50, 0.6, 16)).length < lat.length


def test_step_refusals():
    m = Surfaces.flat_torus()
    loop = zigzag(m, 32, 0.05)

    with pytest.raises(FlowStepRefused):
        birkhoff_step(loop, BirkhoffParams(1.0, 0.1, 16))

    with pytest.raises(FlowStepRefused):
        birkhoff_step(loop, BirkhoffParams(10, 0.1, 8))

    with pytest.raises(FlowStepRefused) as e:
        birkhoff_step(loop, BirkhoffParams(10, 0.05, 16, relaxed = True))
    assert 'anchor spacing' in str(e.value)


def _wobbly_loop(m, rng, n = 48):
    t = 2 * math.pi * np.arange(n) / n
    jitter = lambda s: rng.uniform(-s, s, n)

    if m.name == 'flat_torus':
        r = 0.15 + jitter(0.01)
        P = 0.5 + np.stack([r * np.cos(t), r * np.sin(t)], axis = 1)
    elif m.name == 'sphere':
        P = np.stack([math.pi / 2 + 0.2 * np.sin(2 * t) + jitter(0.05),
                      t + jitter(0.02)], axis = 1)
    else:
        P = np.stack([0.3 + 0.2 * np.sin(t) + jitter(0.05),
                      t + jitter(0.02)], axis = 1)

    loop = polygon(m, P)
    params = choose_params(m, 1.2 * loop.length, relaxed = True)
    return to_form(loop, params), params


_SURFACES = [Surfaces.flat_torus, Surfaces.sphere,
             lambda: Surfaces.revolution('cosh')]


@pytest.mark.parametrize('make', _SURFACES)
def test_monotone_on_random_loops(make):
    m = make()
    rng = np.random.default_rng(7)

    for k in range(5):
        loop, params = _wobbly_loop(m, rng)
        assert birkhoff_step(loop, params).length <= loop.length + 1e-8


def _distance_to_image(m, P, image):
    # Chart-nearest image sample, so the result bounds the true distance
    D = m.diff(P[:, None], image[None])
    j = np.argmin(m.norm(P[:, None], D), axis = 1)
    return m.distance(P, image[j])


@pytest.mark.parametrize('make', _SURFACES)
def test_homotopy_stays_near_image(make):
    m = make()
    rng = np.random.default_rng(11)
    loop, params = _wobbly_loop(m, rng)
    image = loop.image()

    for s in np.linspace(0, 1, 5):
        P = homotopy_phi(loop, s, params).points
        d = _distance_to_image(m, P, image)
        assert d.max() <= 4 * params.R + 1e-6


@pytest.mark.parametrize('make, center', [
    (Surfaces.flat_torus, (0.5, 0.5)),
    (Surfaces.sphere, (math.pi / 2, 0.0))])
def test_homotopy_trapped_in_convex_ball(make, center):
    m = make()
    rng = np.random.default_rng(5)
    n = 32
    t = 2 * math.pi * np.arange(n) / n
    r = 0.12 + rng.uniform(-0.02, 0.02, n)
    P = np.asarray(center) + np.stack([r * np.cos(t), r * np.sin(t)], axis = 1)

    loop = polygon(m, m.wrap(P))
    params = BirkhoffParams(100, 0.1, n // 2, relaxed = True)
    C = np.tile(center, (len(loop.image()), 1))
    radius = m.distance(C, loop.image()).max()

    # A ball of radius below 2R within the convexity radius is convex
    assert radius <= 2 * params.R <= m.conv_bound()

    for s in np.linspace(0, 1, 9):
        Q = homotopy_phi(loop, s, params)
        X = np.concatenate([Q.points, Q.image()])
        C = np.tile(center, (len(X), 1))
        assert m.distance(C, X).max() <= radius + 1e-6


def test_homotopy_phi():
    m = Surfaces.flat_torus()
    params = BirkhoffParams(10, 0.1, 16)
    loop = zigzag(m, 32, 0.05)

    assert np.allclose(homotopy_phi(loop, 0, params).points, loop.points)
    assert loop_metric(homotopy_phi(loop, 1, params),
                       birkhoff_step(loop, params)) <= 1e-8

    quarter = homotopy_phi(loop, 0.25, params)
    assert np.allclose(quarter.points[0::2, 1], 0)
    assert np.allclose(quarter.points[1::2, 1], 0.025)
    assert np.allclose(quarter.points[:, 0], loop.points[:, 0])

    # Support stays within 4R of the image
    for s in np.linspace(0, 1, 9):
        P = homotopy_phi(loop, s, params).points
        assert np.all(np.abs(P[:, 1] - 0.025) <= 0.025 + 4 * params.R)


def test_residual_of_corners():
    m = Surfaces.flat_torus()
    assert geodesic_residual(torus_line(m, 16)) == pytest.approx(0, abs = 1e-7)
    assert geodesic_residual(zigzag(m, 32, 0.05)) >= \
        2 * math.atan(0.05 * 32) - 1e-9


def test_flow_converges_on_torus():
    m = Surfaces.flat_torus()
    params = BirkhoffParams(10, 0.1, 16)
    result = iterate_flow(zigzag(m, 32, 0.05), params)

    assert result.classification == 'converged_geodesic'
    assert result.length == pytest.approx(1.0, abs = 1e-4)
    assert result.monotone()
    assert result.iterations <= 50


def test_flow_collapses_latitude():
    m = Surfaces.sphere()
    loop = latitude(m, math.pi / 3, 64)
    params = choose_params(m, loop.length, relaxed = True)
    result = iterate_flow(loop, params, FlowStop(max_iter = 2000))

    assert result.classification == 'point_loop'
    assert result.monotone()


def test_flow_records_and_budget():
    m = Surfaces.flat_torus()
    params = BirkhoffParams(10, 0.1, 16)
    stop = FlowStop.from_json({'max-iter': 1, 'record-stride': 1,
                               'residual-tol': 1e-12})
    result = iterate_flow(zigzag(m, 32, 0.05), params, stop)

    assert result.classification == 'max_iterations'
    assert [i for i, loop in result.recorded] == [0, 1]
    assert result.to_json()['stop']['max_iter'] == 1

    with pytest.raises(ConfigError):
        FlowStop.from_json({'speed': 3})


@pytest.mark.slow
def test_flow_finds_catenoid_waist():
    m = Surfaces.revolution('cosh', arc_step = 0.02)
    loop = parallel(m, 0.5, 32)
    params = choose_params(m, loop.length, relaxed = True)
    result = iterate_flow(loop, params)

    assert result.classification == 'converged_geodesic'
    assert result.length == pytest.approx(2 * math.pi, rel = 0.01)
    assert np.allclose(result.loop.points[:, 0], 0, atol = 0.05)
