################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import os
import json

import numpy as np

from . import util
from .Loop import DiscreteLoop

__all__ = ['report_digest', 'write_report', 'read_report', 'write_loop_csv',
           'read_loop_csv']


def report_digest(report):
    '''sha256 over the canonical dump, excluding timing and the digest.'''
    body = dict((k, v) for k, v in report.items()
                if k not in ('timing', 'digest'))
    return util.digest(body)


def write_report(report, path):
    '''Write a report as sorted, indented JSON; `path` may be a directory.'''
    if os.path.isdir(path): path = os.path.join(path, 'report.json')

    report = util.jsonable(report)
    report['digest'] = report_digest(report)

    with open(path, 'w', encoding = 'utf-8') as f:
        json.dump(report, f, sort_keys = True, indent = 2,
                  separators = (',', ': '))
        f.write('\n')

    return path


def read_report(path):
    with open(path, 'r', encoding = 'utf-8') as f: return json.load(f)


def write_loop_csv(path, loop):
    P = loop.points if isinstance(loop, DiscreteLoop) else np.asarray(loop)
    np.savetxt(path, P, fmt = '%.17g', delimiter = ',')
    return path


def read_loop_csv(path, m = None):
    '''Breakpoints from CSV, as a loop when a manifold is given.'''
    P = np.loadtxt(path, delimiter = ',', ndmin = 2)
    return P if m is None else DiscreteLoop(m, P, op = 'read_loop_csv')
