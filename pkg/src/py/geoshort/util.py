################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import os
import math
import json
import hashlib
from datetime import datetime

try:
    from importlib.metadata import version as _dist_version
except ImportError: _dist_version = None


_package_dir = os.path.dirname(os.path.abspath(__file__))


def _find_version():
    try:
        return _dist_version('geoshort').strip('\'"')
    except Exception: pass

    try:
        path = os.path.join(_package_dir, '..', '..', '..', 'package.json')
        with open(path, 'r') as f: return json.load(f)['version']
    except Exception: return '0.0.0'


_version = _find_version()


def get_resource(path): return os.path.join(_package_dir, path)
def get_version(): return _version
def timestamp(): return datetime.now().strftime('%Y%m%d-%H%M%S')


def parse_version(s):
    parts = []

    for part in str(s).split('+')[0].split('.')[:3]:
        digits = ''
        for c in part:
            if not c.isdigit(): break
            digits += c
        parts.append(int(digits or 0))

    while len(parts) < 3: parts.append(0)
    return tuple(parts)


def version_less(a, b): return parse_version(a) < parse_version(b)


def thread_count():
    try:
        return max(1, int(os.environ.get('GEOSHORT_THREADS', '1')))
    except ValueError: return 1


def log_floats(o, places = 6):
    if isinstance(o, float): return round(o, places)
    if isinstance(o, dict):
        return {k: log_floats(v, places) for k, v in o.items()}
    if isinstance(o, (list, tuple)): return [log_floats(x, places) for x in o]
    return o


def log_json(o): return json.dumps(log_floats(jsonable(o)))


def jsonable(o):
    '''Convert numpy values, sets and non-finite floats into plain JSON.'''
    if hasattr(o, 'tolist'): o = o.tolist()
    if isinstance(o, dict): return {str(k): jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)): return [jsonable(x) for x in o]
    if isinstance(o, (set, frozenset)): return sorted(jsonable(x) for x in o)
    if isinstance(o, float) and not math.isfinite(o): return None
    return o


def hash_dump(o):
    s = json.dumps(jsonable(o), separators = (',', ':'), sort_keys = True)
    return s.encode('utf8')


def digest(o):
    h = hashlib.sha256()
    h.update('v1'.encode('utf8'))
    h.update(hash_dump(o))
    return h.hexdigest()


def map_ordered(fn, items, threads = None):
    '''Map `fn` over `items`, in threads when configured, keeping order.'''
    items = list(items)
    if threads is None: threads = thread_count()

    if threads <= 1 or len(items) < 2: return [fn(x) for x in items]

    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers = threads) as pool:
        return list(pool.map(fn, items))
