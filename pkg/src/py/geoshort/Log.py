################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import os
import sys
import traceback

from . import util

__all__ = ['Log', 'get_logger', 'set_default']


_here = os.path.normcase(os.path.abspath(__file__))


def _caller():
    '''`file:line` of the nearest frame outside this module.'''
    f = sys._getframe(1)
    while f is not None and \
            os.path.normcase(os.path.abspath(f.f_code.co_filename)) == _here:
        f = f.f_back

    if f is None: return '?:0'
    return '%s:%d' % (os.path.basename(f.f_code.co_filename), f.f_lineno)


class Logger(object):
    '''Named source of log lines, e.g. `Flow` or `Region`.'''

    def __init__(self, log, name, level):
        self.log = log
        self.name = name
        self.level = level


    def set_level(self, level): self.level = level
    def _enabled(self, level): return self.level <= level <= Log.ERROR
    def is_debug(self): return self._enabled(Log.DEBUG)


    def _log(self, level, msg, *args, where = None):
        if not self._enabled(level): return
        if args: msg %= args
        self.log._emit(msg, level, self.name, where or _caller())


    def debug  (self, *args, **kw): self._log(Log.DEBUG,   *args, **kw)
    def info   (self, *args, **kw): self._log(Log.INFO,    *args, **kw)
    def message(self, *args, **kw): self._log(Log.MESSAGE, *args, **kw)
    def warning(self, *args, **kw): self._log(Log.WARNING, *args, **kw)
    def error  (self, *args, **kw): self._log(Log.ERROR,   *args, **kw)


    def exception(self, *args, **kw):
        msg = traceback.format_exc().rstrip()
        if args: msg = args[0] % args[1:] + '\n' + msg
        self._log(Log.ERROR, msg, **kw)


class Log(object):
    '''Run log: `<level>:<source>:<msg>` lines to an optional file, which
    rolls over to `<path>.1` .. `<path>.<keep>`, and to stderr.'''

    DEBUG    = 0
    INFO     = 1
    MESSAGE  = 2
    WARNING  = 3
    ERROR    = 4

    level_names = 'debug info message warning error'.split()


    def __init__(self, path = None, verbose = False, quiet = False, keep = 8,
                 max_bytes = 1 << 24):
        self.path = path
        self.quiet = quiet
        self.keep = int(keep)
        self.max_bytes = int(max_bytes)
        self.level = self.DEBUG if verbose else self.INFO
        self.listeners = []
        self.loggers = {}

        self.f = None
        self.written = 0
        if path is not None: self._roll()

        self._emit('Log started v%s' % util.get_version())
        self._emit(util.timestamp())


    def __enter__(self): return self
    def __exit__(self, *exc): self.close()


    def add_listener(self, listener): self.listeners.append(listener)
    def remove_listener(self, listener): self.listeners.remove(listener)


    def get(self, name, level = None):
        if name not in self.loggers:
            self.loggers[name] = Logger(self, name,
                                        self.level if level is None else level)
        return self.loggers[name]


    def set_level(self, level):
        self.level = level
        for logger in self.loggers.values(): logger.set_level(level)


    def _emit(self, msg, level = INFO, source = '', where = None):
        if not msg: return

        hdr = '%s:%s:' % ('DIMWE'[level], source)
        text = '\n'.join(hdr + line for line in msg.split('\n'))

        if self.f is not None:
            if self.max_bytes <= self.written + len(text) + 1: self._roll()
            self.f.write(text + '\n')
            self.f.flush()
            self.written += len(text) + 1

        if not self.quiet or self.WARNING <= level:
            print(text, file = sys.stderr)

        # Listeners collect warnings and errors for reports
        if level == self.INFO or not self.listeners: return

        entry = dict(level = self.level_names[level], source = source,
                     msg = msg)
        if where is not None: entry['where'] = where

        for listener in list(self.listeners):
            try:
                listener(dict(log = entry))
            except Exception:
                traceback.print_exc()


    def close(self):
        if self.f is not None: self.f.close()
        self.f = None


    def _roll(self):
        '''Shift `<path>.k` to `<path>.k+1`, dropping the oldest, and start a
        fresh file.'''
        self.close()

        names = [self.path] + ['%s.%d' % (self.path, k)
                               for k in range(1, self.keep + 1)]
        if os.path.exists(names[-1]): os.unlink(names[-1])

        for src, dst in reversed(list(zip(names, names[1:]))):
            if os.path.exists(src): os.rename(src, dst)

        self.f = open(self.path, 'w')
        self.written = 0


_default = None


def set_default(log):
    global _default
    _default = log


def get_logger(name):
    global _default
    if _default is None: _default = Log(quiet = True)
    return _default.get(name)
