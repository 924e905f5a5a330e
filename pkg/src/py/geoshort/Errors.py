################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

__all__ = '''GeoError DomainError EscapeError NoUniqueGeodesic HorizonError
RefinementNeeded ResampleNeeded FlowStepRefused ContractionRefused ConfigError
ParamsError PreconditionError NotSplitSES UnsupportedField'''.split()


class GeoError(Exception):
    exit_code = 3

    def __init__(self, op, msg, *args):
        if len(args): msg %= args
        Exception.__init__(self, '%s: %s' % (op, msg))
        self.op = op
        self.msg = msg


    def to_json(self):
        return dict(type = type(self).__name__, op = self.op, msg = self.msg)


# Numerical failures
class DomainError(GeoError): pass


class EscapeError(GeoError):
    def __init__(self, op, t, index = None):
        GeoError.__init__(self, op, 'trajectory left the chart at t=%.6g', t)
        self.t = t
        self.index = index


class NoUniqueGeodesic(GeoError): pass
class HorizonError(GeoError): pass


class RefinementNeeded(GeoError):
    def __init__(self, op, index, msg = 'sample spacing too coarse'):
        GeoError.__init__(self, op, '%s at index %d', msg, index)
        self.index = index


class ResampleNeeded(GeoError): pass
class FlowStepRefused(GeoError): pass
class ContractionRefused(GeoError): pass


# Misconfiguration
class ConfigError(GeoError):
    exit_code = 2


class ParamsError(ConfigError):
    def __init__(self, op, clauses):
        ConfigError.__init__(self, op, '; '.join(clauses))
        self.clauses = list(clauses)


class PreconditionError(ConfigError): pass
class NotSplitSES(ConfigError): pass
class UnsupportedField(ConfigError): pass
