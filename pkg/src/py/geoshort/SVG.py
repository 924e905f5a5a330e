################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import io

import numpy as np
import matplotlib
matplotlib.use('Agg')
from matplotlib.figure import Figure

__all__ = ['render_svg', 'region_field', 'DEFAULT_STYLE']


DEFAULT_STYLE = {
    'width': 6.0,
    'height': 6.0,
    'loop-color': '#1f77b4',
    'initial-color': '#999999',
    'candidate-color': '#d62728',
    'region-color': '#ff7f0e',
    'line-width': 1.0,
    'sparkline': True,
}


_RC = {'svg.hashsalt': 'geoshort', 'svg.fonttype': 'none',
       'path.simplify': False}


def region_field(m, region, resolution = 64):
    '''Signed distance sampled on the chart box, for plotting.'''
    lo, hi = np.asarray(m.lower, float), np.asarray(m.upper, float)
    x = np.linspace(lo[0], hi[0], resolution)
    y = np.linspace(lo[1], hi[1], resolution)
    X, Y = np.meshgrid(x, y)
    d = region.signed_distance(np.stack([X.ravel(), Y.ravel()], axis = 1))
    return dict(x = x.tolist(), y = y.tolist(),
                d = d.reshape(X.shape).tolist(), eta = region.eta)


def _unwrap(P, periods):
    '''Continuous polyline through the breakpoints, closed at the end.'''
    P = np.asarray(P, dtype = float)
    if not len(P): return P
    P = np.concatenate([P, P[:1]])

    for k, per in enumerate(periods or []):
        if per is None: continue
        step = np.diff(P[:, k])
        step -= per * np.round(step / per)
        P[1:, k] = P[0, k] + np.cumsum(step)

    return P


def render_svg(report, style = None, path = None):
    '''Chart-plane picture of a report's loops as SVG text.

    Loops come from `report['loops']` (dicts with points and a role), the
    region from `report['region_field']` and the sparkline from
    `report['trace']`.'''
    s = dict(DEFAULT_STYLE)
    s.update(style or {})

    manifold = report.get('manifold') or {}
    periods = manifold.get('periods')
    loops = report.get('loops') or []
    trace = report.get('trace') or []
    field = report.get('region_field')

    with matplotlib.rc_context(_RC):
        fig = Figure(figsize = (s['width'], s['height']))
        spark = s['sparkline'] and len(trace) > 1

        if spark:
            ax = fig.add_axes([0.1, 0.3, 0.85, 0.65])
            sx = fig.add_axes([0.1, 0.07, 0.85, 0.15])
        else: ax = fig.add_axes([0.1, 0.1, 0.85, 0.85])

        if field is not None:
            x, y, d = (np.asarray(field[k]) for k in 'xyd')
            eta = field['eta']
            ax.contourf(x, y, d, levels = [d.min() - 1, 0],
                        colors = [s['region-color']], alpha = 0.25)
            ax.contour(x, y, d, levels = sorted([-3 * eta, 0, eta]),
                       colors = s['region-color'], linewidths = 0.6,
                       linestyles = ['dotted', 'solid', 'dashed'])

        for loop in loops:
            P = _unwrap(loop.get('points', []), periods)
            if not len(P): continue

            role = loop.get('role', 'final')
            color = s['loop-color']
            width = s['line-width']
            if role == 'initial': color = s['initial-color']
            if role in ('candidate', 'critical'):
                color = s['candidate-color']
                width *= 2

            ax.plot(P[:, 0], P[:, 1], color = color, linewidth = width,
                    marker = '.', markersize = 2)

        if 'lower' in manifold:
            ax.set_xlim(manifold['lower'][0], manifold['upper'][0])
            ax.set_ylim(manifold['lower'][1], manifold['upper'][1])

        ax.set_title(str(report.get('title', '')), fontsize = 9)

        if spark:
            sx.plot(np.arange(len(trace)), trace, color = s['loop-color'],
                    linewidth = 0.8)
            sx.tick_params(labelsize = 6)

        buf = io.StringIO()
        fig.savefig(buf, format = 'svg', metadata = {'Date': None})

    svg = buf.getvalue()

    if path is not None:
        with open(path, 'w', encoding = 'utf-8') as f: f.write(svg)

    return svg
