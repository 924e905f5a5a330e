################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import copy
import json

from . import util
from .Log import get_logger
from .Errors import ConfigError

__all__ = ['Config']


# Stop criteria kept at the top level before schema 0.2
_FLAT_STOP = 'residual-tol length-decrement point-factor record-stride'.split()


class Config(object):
    def __init__(self, log = None):
        self.log = log if log is not None else get_logger('Config')

        with open(util.get_resource('scenario-template.json'), 'r',
                  encoding = 'utf-8') as f:
            self.template = json.load(f)

        self.version = self.template['version']['default']


    def load(self, path):
        try:
            with open(path, 'r', encoding = 'utf-8') as f: config = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigError('load_config', 'cannot read %s: %s', path, e)

        return self.prepare(config)


    def prepare(self, config):
        if not isinstance(config, dict):
            raise ConfigError('load_config', 'config must be a JSON object')

        config = copy.deepcopy(config)
        if not 'version' in config: config['version'] = self.version

        self.upgrade(config)
        self._defaults(config)
        return config


    def _convert(self, name, template, value):
        type = template['type']

        try:
            if type == 'int':
                if isinstance(value, bool) or \
                        (isinstance(value, float) and not value.is_integer()):
                    raise ValueError(value)
                value = int(value)

            if type == 'float':
                if isinstance(value, bool): raise ValueError(value)
                value = float(value)

            if type == 'text': value = str(value)
            if type == 'bool' and not isinstance(value, bool):
                raise ValueError(value)
            if type == 'dict' and not isinstance(value, dict):
                raise ValueError(value)
            if type == 'list' and not isinstance(value, list):
                raise ValueError(value)

        except (TypeError, ValueError):
            raise ConfigError('config', '"%s" expects %s, got %s', name, type,
                              json.dumps(value))

        if 'values' in template and value not in template['values']:
            raise ConfigError('config', '"%s" must be one of %s, got %s', name,
                              ', '.join(template['values']), json.dumps(value))

        return value


    def __defaults(self, config, name, template, path):
        if 'type' in template:
            if not name in config:
                config[name] = copy.deepcopy(template['default'])
                return

            value = self._convert(path, template, config[name])

            if 'max' in template and template['max'] < value:
                self.log.warning('Clamping "%s" from %s to max %s' % (
                    path, value, template['max']))
                value = template['max']

            elif 'min' in template and value < template['min']:
                self.log.warning('Clamping "%s" from %s to min %s' % (
                    path, value, template['min']))
                value = template['min']

            config[name] = value

        else:
            if not name in config: config[name] = {}
            if not isinstance(config[name], dict):
                raise ConfigError('config', 'section "%s" must be an object',
                                  path)

            for key, tmpl in template.items():
                self.__defaults(config[name], key, tmpl, path + '.' + key)


    def _defaults(self, config):
        for name, tmpl in self.template.items():
            self.__defaults(config, name, tmpl, name)


    def upgrade(self, config):
        version = str(config['version'])

        if util.version_less(self.version, version):
            self.log.warning('Config version %s is newer than %s' % (
                version, self.version))

        if util.version_less(version, self.version):
            self.log.info('Upgrading config from %s to %s' %
                          (version, self.version))

        if util.version_less(version, '0.2'):
            stop = config.get('stop')
            if not isinstance(stop, dict): config['stop'] = stop = {}

            if 'iterations' in config:
                stop['max-iter'] = config.pop('iterations')

            for key in _FLAT_STOP:
                if key in config: stop[key] = config.pop(key)

            if isinstance(config.get('manifold'), str):
                config['manifold'] = dict(name = config['manifold'])

        config['version'] = self.version


    def override(self, config, seed = None, max_iter = None, out = None,
                 svg = None):
        '''Apply command line overrides on top of a prepared config.'''
        if seed is not None: config['scenario']['seed'] = int(seed)
        if max_iter is not None: config['stop']['max-iter'] = int(max_iter)
        if out is not None: config['output']['dir'] = out
        if svg: config['output']['svg'] = True

        self._defaults(config)
        return config
