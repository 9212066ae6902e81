import argparse
import json
import logging
import sys
from fractions import Fraction

from engine.config import OUTPUT_FORMATS, load_config
from engine.easiness import ALL_CELLS, FIXED_POINTS
from engine.framework import exit_code, run_check
from engine.maximality import SERIES

USAGE_ERROR = 64

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _bounds(text):
    try:
        harvest, closure = (int(part) for part in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected H,C (two integers), got {text!r}")
    return harvest, closure


def _coefficients(text):
    """'1:1,1:-1,2/3:5' -> [(1, 1), (1, -1), (2/3, 5)]"""
    pairs = []
    try:
        for item in text.split(','):
            alpha, beta = item.split(':')
            pairs.append((Fraction(alpha), Fraction(beta)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b pairs separated by commas, got {text!r}")
    return pairs


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument('--verbose', action='store_true', help='Log progress to stderr')
    common.add_argument('--seed', type=int, help='Seed for every sampled path')
    common.add_argument('--output', choices=OUTPUT_FORMATS, help='json (default) or a printed text report')
    common.add_argument('--workers', type=int, help='Worker processes for series runs')

    parser = _Parser(prog='cli.py', description='Exact engine for categories of partitions and their linear maps.')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    sub = commands.add_parser('enumerate', parents=[common], help='List all partitions of a pair of colored words')
    sub.add_argument('upper', help="Upper word over {o, b}, '' for the empty word")
    sub.add_argument('lower', help='Lower word')

    sub = commands.add_parser('close', parents=[common], help='Close a generator set under the category operations')
    sub.add_argument('--gens', type=str, required=True, help='Partition file, one per line, # comments')
    sub.add_argument('--bound', type=int, help='Maximal number of legs kept')
    sub.add_argument('--linear', action='store_true', help='Close the maps T_π instead of the partitions')
    sub.add_argument('--n', type=int, help='Matrix size for --linear')
    sub.add_argument('--real', action='store_true', help='Ignore colors (all-white words)')

    for name, text in (('envelope', 'Compute the easy envelope of a group'),
                       ('brauer', 'Compare the easy envelope with the expected named category')):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument('--group', type=str, required=True, help='Group spec as JSON, e.g. {"kind":"SN","N":4}')
        sub.add_argument('--bound', type=int, help='Maximal number of legs')

    sub = commands.add_parser('level', parents=[common], help='Probe the easiness level of a group')
    sub.add_argument('--group', type=str, required=True)
    sub.add_argument('--pmax', type=int, default=1, help='Largest level tried')
    sub.add_argument('--bounds', type=_bounds, help='Harvest and closure bounds as H,C')
    sub.add_argument('--harvest', choices=(FIXED_POINTS, ALL_CELLS), default=FIXED_POINTS)

    sub = commands.add_parser('presentation', parents=[common], help='Probe the presentation level of a group')
    sub.add_argument('--group', type=str, required=True)
    sub.add_argument('--rmax', type=int, default=1)
    sub.add_argument('--bound', type=int)

    sub = commands.add_parser('verify-halflib', parents=[common], help='Verify the half-liberation intertwiners')
    sub.add_argument('--n', type=int, required=True)
    sub.add_argument('--legs', type=int, choices=(3, 4), default=3)
    sub.add_argument('--samples', type=int, default=20, help='Classical samples per relation target')

    sub = commands.add_parser('maximality', parents=[common], help='Run an order-2 maximality series')
    sub.add_argument('--series', choices=tuple(SERIES), required=True)
    sub.add_argument('--n', type=int, required=True)
    sub.add_argument('--bound', type=int)
    sub.add_argument('--coeffs', type=_coefficients, help="Coefficient pairs, e.g. '1:1,1:-1,2:-3'")
    sub.add_argument('--budget', type=int, default=50, help='Maximal number of sampled (π, σ) pairs')

    sub = commands.add_parser('replay', parents=[common], help='Re-verify a stored capping certificate')
    sub.add_argument('--cert', type=str, required=True)
    return parser


def _params(args):
    command = args.command
    if command == 'enumerate':
        return {"upper": args.upper, "lower": args.lower}
    if command == 'close':
        return {"gens": args.gens, "bound": args.bound, "linear": args.linear, "n": args.n, "real": args.real}
    if command in ('envelope', 'brauer'):
        return {"group": args.group, "bound": args.bound}
    if command == 'level':
        harvest_bound, closure_bound = args.bounds if args.bounds else (None, None)
        return {"group": args.group, "pmax": args.pmax, "harvest_bound": harvest_bound,
                "closure_bound": closure_bound, "harvest": args.harvest}
    if command == 'presentation':
        return {"group": args.group, "rmax": args.rmax, "bound": args.bound}
    if command == 'verify-halflib':
        return {"n": args.n, "legs": args.legs, "compliance_samples": args.samples}
    if command == 'maximality':
        return {"series": args.series, "n": args.n, "bound": args.bound, "coefficients": args.coeffs,
                "budget": args.budget}
    return {"cert": args.cert}


def run(argv=None):
    """
    Parse ``argv``, run the check and print its export.

    :return: 0 pass, 1 fail, 2 inconclusive, 64 usage error
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return USAGE_ERROR
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format='%(asctime)s %(name)s %(levelname)s %(message)s')

    try:
        config = load_config().with_overrides(seed=args.seed, output=args.output, workers=args.workers)
    except ValueError as e:
        print(f"cli.py: {e}", file=sys.stderr)
        return USAGE_ERROR

    # domain errors come back as fail/inconclusive exports; what escapes are unreadable parameters
    try:
        export = run_check(args.command, config, quiet=config.output == 'json', **_params(args))
    except (ValueError, OSError) as e:
        logger.debug("usage error in %s", args.command, exc_info=True)
        print(f"cli.py {args.command}: {e}", file=sys.stderr)
        return USAGE_ERROR

    if config.output == 'json':
        print(json.dumps(export, indent=2, sort_keys=True, default=str))
    return exit_code(export["verdict"])


if __name__ == '__main__':
    sys.exit(run())
