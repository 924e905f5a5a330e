#!/usr/bin/env python3

################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

__all__ = ['run', 'main']


def _parse_args(argv = None):
    import argparse

    parser = argparse.ArgumentParser(
        description = 'Closed geodesics by Birkhoff curve shortening')

    parser.add_argument('-v', '--verbose', action = 'store_true',
                        help = 'Verbose output')
    parser.add_argument('-l', '--log', metavar = 'FILE',
                        help = 'Set a log file')

    sub = parser.add_subparsers(dest = 'command', metavar = 'COMMAND')
    sub.required = True

    p = sub.add_parser('run', help = 'Run a scenario config')
    p.add_argument('config', help = 'Scenario JSON file')
    p.add_argument('--out', metavar = 'DIR', help = 'Output directory')
    p.add_argument('--svg', action = 'store_true',
                   help = 'Also render report.svg')
    p.add_argument('--seed', type = int, help = 'Random seed')
    p.add_argument('--max-iter', type = int, help = 'Iteration budget')

    p = sub.add_parser('audit-groups', help = 'Audit the group catalog')
    p.add_argument('--max-order', default = 24, type = int,
                   help = 'Largest group order in the catalog')
    p.add_argument('--no-extras', action = 'store_true',
                   help = 'Leave A5 out of the catalog')
    p.add_argument('--out', metavar = 'DIR', help = 'Output directory')

    sub.add_parser('list-manifolds', help = 'List registered manifolds')

    return parser.parse_args(argv)


def _run_config(args, log):
    import os
    from . import Report
    from .Config import Config
    from .Scenario import Scenario
    from .SVG import render_svg

    config = Config(log.get('Config'))
    cfg = config.override(config.load(args.config), seed = args.seed,
                          max_iter = args.max_iter, out = args.out,
                          svg = args.svg)

    base = os.path.dirname(os.path.abspath(args.config))
    report = Scenario(cfg, log.get('Scenario'), base).run()

    out = cfg['output']['dir']
    os.makedirs(out, exist_ok = True)
    path = Report.write_report(report, out)
    log.get('Report').info('Wrote %s' % path)

    if cfg['output']['csv']:
        for loop in report['loops']:
            Report.write_loop_csv(
                os.path.join(out, 'loop-%s.csv' % loop['role']),
                loop['points'])

    if cfg['output']['svg']:
        render_svg(report, path = os.path.join(out, 'report.svg'))

    return report


def _audit_groups(args, log):
    import os
    from . import Report
    from .GroupAudit import audit_catalog

    result = audit_catalog(args.max_order, not args.no_extras,
                           log = log.get('Audit'))

    if args.out is not None:
        os.makedirs(args.out, exist_ok = True)
        Report.write_report(dict(kind = 'group_audit', result = result),
                            args.out)

    summary = result['summary']
    print('groups %d, pairs %d, splits %d, passed %s' % (
        summary['groups'], summary['pairs'], summary['splits'],
        summary['passed']))
    return result


def _list_manifolds(args, log):
    from . import util
    from .Surfaces import list_manifolds

    for entry in list_manifolds():
        print('%-16s %s' % (entry['name'], entry['help']))
        print('%-16s %s' % ('', util.log_json(entry['params'])))


def main(argv = None):
    '''Run the command line and return the exit code.'''
    from .Log import Log, set_default
    from .Errors import GeoError

    args = _parse_args(argv)
    commands = {
        'run': _run_config,
        'audit-groups': _audit_groups,
        'list-manifolds': _list_manifolds,
    }

    with Log(args.log, args.verbose, quiet = not args.verbose) as log:
        set_default(log)
        logger = log.get('Main')

        try:
            commands[args.command](args, log)
            return 0

        except GeoError as e:
            logger.error(str(e))
            return e.exit_code

        except Exception:
            logger.exception('Unexpected failure')
            return 3


def run():
    import sys
    sys.exit(main())


if __name__ == '__main__': run()
