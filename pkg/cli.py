#!/usr/bin/env python3
"""
riskreg command line

Closed-form tail expectations, Monte Carlo Basel I/II experiments, the
empirical past/future volatility pipeline and the bank response model.
Every stochastic subcommand is a pure function of its flags and seed.

Usage:
    python cli.py tail-expect --n 60 --alpha 0.01
    python cli.py curve --n-min 30 --n-max 1200 --alphas 0.01,0.001
    python cli.py sim stddev-hist --seed 1
    python cli.py empirical --synthetic --seed 1 --format json
    python cli.py response --seed 1
    python cli.py report --output summary.pdf

Exit codes: 0 success, 1 I/O failure, 2 invalid input.
"""

import argparse
import contextlib
import logging
import sys

import config
import montecarlo
import panel
import response
import statfn
import utils

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2


class UsageError(statfn.DomainError):
    """Raised for flag combinations argparse cannot reject on its own."""
    pass


def _float_list(text):
    try:
        return tuple(float(part) for part in text.split(',') if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


@contextlib.contextmanager
def _open_output(path, binary=False):
    if path in (None, '-'):
        yield sys.stdout.buffer if binary else sys.stdout
        return
    mode = 'wb' if binary else 'w'
    kwargs = {} if binary else {'encoding': 'utf-8', 'newline': ''}
    with open(path, mode, **kwargs) as f:
        yield f


def _emit(args, rows, header, document):
    """Write a table as CSV, or the full document as JSON."""
    with _open_output(args.output) as out:
        if args.format == 'json':
            utils.write_json(document, out)
        else:
            utils.write_csv(rows, header, out)


def _require_seed(args):
    if args.seed is None:
        raise UsageError("a seed is required: pass --seed or set RISKREG_SEED")
    return args.seed


def _fat_params(args):
    if getattr(args, 'normal', False):
        return None
    return montecarlo.FatTailParams(epsilon=args.epsilon, jump=args.jump)


# --- subcommands --------------------------------------------------------------

def cmd_tail_expect(args):
    spec = statfn.TailSpec(args.n, args.alpha, 'upper' if args.upper else 'lower')
    ratio = statfn.cond_tail_expectation(spec)
    row = {'n': spec.n, 'alpha': spec.alpha, 'side': spec.side, 'ratio': ratio}
    if args.format == 'text':
        with _open_output(args.output) as out:
            out.write(f"{ratio!r}\n")
        return
    _emit(args, [row], list(row), row)


def cmd_curve(args):
    if args.n_min > args.n_max:
        raise UsageError(f"--n-min ({args.n_min}) exceeds --n-max ({args.n_max})")
    if args.step < 1:
        raise UsageError(f"--step must be at least 1, got {args.step}")
    if not args.alphas:
        raise UsageError("--alphas needs at least one tail mass")
    n_values = list(range(args.n_min, args.n_max + 1, args.step))
    if n_values[-1] != args.n_max:
        n_values.append(args.n_max)
    rows = statfn.tail_curve(n_values, args.alphas, 'upper' if args.upper else 'lower')
    header = ['n'] + [f"alpha={a:g}" for a in args.alphas]
    _emit(args, rows, header, rows)


def cmd_sim(args):
    seed = _require_seed(args)
    if args.experiment == 'fat-moments':
        params = montecarlo.FatTailParams(epsilon=args.epsilon, jump=args.jump)
        result = montecarlo.fat_moments_experiment(params, draws=args.draws, seed=seed, threads=args.threads)
        rows = [{'statistic': stat, 'simulated': result['simulated'][stat], 'population': result['population'][stat]}
                for stat in ('mean', 'std', 'kurtosis')]
        _emit(args, rows, ['statistic', 'simulated', 'population'], result)
        return

    if args.experiment == 'tail-count':
        result = montecarlo.tail_count_experiment(args.m, args.n, args.beta, seed=seed, threads=args.threads)
        row = dict(result['params'], seed=seed, count=result['count'], expected=result['expected'])
        _emit(args, [row], list(row), result)
        return

    sim = montecarlo.SimConfig(m=args.m, n=args.n, seed=seed, distribution=_fat_params(args),
                               sigma=args.sigma, threads=args.threads)
    if args.experiment == 'stddev-hist':
        report = montecarlo.basel1_experiment(sim, bin_width=args.bin_width)
    else:
        report = montecarlo.basel2_experiment(sim, yearly_window=args.window, bin_width=args.bin_width)
    _emit(args, report.histogram_rows(), ['bin_left', 'bin_right', 'count'], report.to_dict())


def cmd_empirical(args):
    spec = panel.WindowSpec(past_len=args.past, future_len=args.future, min_future=args.min_future)
    groups = panel.QuantileGroups(args.groups)
    date_range = None
    if args.synthetic:
        seed = _require_seed(args)
        data, date_range = panel.synthetic_panel(args.securities, args.dates, spec, args.sigma, seed, args.threads)
    elif args.input:
        data = panel.load_panel(args.input)
    else:
        raise UsageError("pass --input FILE or --synthetic")
    if args.start or args.end:
        date_range = (args.start or data.dates[0], args.end or data.dates[-1])

    report = panel.ratio_report(data, spec, groups, date_range)
    _emit(args, report.long_rows(), ['date', 'group', 'mean_ratio', 'count'], report.to_dict())


def cmd_response(args):
    seed = _require_seed(args)
    rule = response.CapitalRule(kind=args.rule, c=args.c, yearly_window=args.window)
    report = response.bank_experiment(m=args.m, n=args.n, banks=args.banks, budget=args.budget, rule=rule,
                                      seed=seed, shared=not args.independent, threads=args.threads)
    rows = [{'bank': bank, 'chosen': chosen, 'exposure': exposure, 'excess_ratio': excess}
            for bank, (chosen, exposure, excess)
            in enumerate(zip(report.chosen, report.exposures, report.excess_ratios))]
    _emit(args, rows, ['bank', 'chosen', 'exposure', 'excess_ratio'], report.to_dict())


def summary_tables():
    """Closed-form tables for the PDF summary."""
    n_values = (10, 30, 60, 120, 252, 600, 1200, 1260)
    tail_rows = []
    for n in n_values:
        law = statfn.StdDevLaw(n)
        tail_rows.append([str(n), statfn.k_n(n)]
                         + [statfn.cond_tail_expectation(statfn.TailSpec(n, a)) for a in config.TAIL_ALPHAS]
                         + [statfn.sample_std_cdf(law, 1.0)])

    multiplier = statfn.basel_multiplier(config.BASEL_HORIZON_DAYS, config.BASEL_CONFIDENCE,
                                         config.BASEL_SUPERVISORY_FACTOR)
    expected = statfn.expected_tail_count(config.SECURITIES, config.MONTHLY_PERIODS, config.TAIL_COUNT_BETA)
    moments = montecarlo.fat_tail_population_moments(montecarlo.FatTailParams())

    return [
        {
            'heading': 'Expected sample standard deviation in the lower tail',
            'note': 'Ratios to the true standard deviation for normal returns.',
            'header': ['n', 'K_n'] + [f"E[s | {a:.1%} tail]" for a in config.TAIL_ALPHAS] + ['P(s < sigma)'],
            'rows': tail_rows,
        },
        {
            'heading': 'Capital rule arithmetic',
            'header': ['quantity', 'value'],
            'rows': [
                [f"Basel multiplier (sqrt({config.BASEL_HORIZON_DAYS}) x z{config.BASEL_CONFIDENCE:.0%} "
                 f"x {config.BASEL_SUPERVISORY_FACTOR:g})", multiplier],
                [f"Expected securities below {config.TAIL_COUNT_BETA:g} sigma "
                 f"(m={config.SECURITIES}, n={config.MONTHLY_PERIODS})", expected],
            ],
        },
        {
            'heading': 'Fat-tail jump model',
            'note': f"epsilon = {config.FAT_TAIL_EPSILON:g}, jump = {config.FAT_TAIL_JUMP:g}",
            'header': ['mean', 'std', 'kurtosis'],
            'rows': [[moments.mean, moments.std, moments.kurtosis]],
        },
    ]


def cmd_report(args):
    pdf = utils.generate_summary_pdf('Volatility-based capital: closed-form summary', summary_tables(),
                                     footer='riskreg summary report')
    with _open_output(args.output, binary=True) as out:
        out.write(pdf.getvalue())


# --- parser ---------------------------------------------------------------------

def _add_output(parser, formats=('csv', 'json'), default='csv'):
    parser.add_argument('--format', choices=formats, default=default, help=f"Output format (default: {default})")
    parser.add_argument('--output', metavar='PATH', help='Write to PATH instead of stdout')


def _add_seed(parser):
    parser.add_argument('--seed', type=int, default=config.DEFAULT_SEED,
                        help='Master seed (default: RISKREG_SEED)')
    parser.add_argument('--threads', type=int, default=config.THREADS,
                        help='Worker threads; never changes results (default: RISKREG_THREADS or 1)')


def _add_fat_tail(parser):
    parser.add_argument('--epsilon', type=float, default=config.FAT_TAIL_EPSILON,
                        help=f"Half-width of the replaced band (default: {config.FAT_TAIL_EPSILON:g})")
    parser.add_argument('--jump', type=float, default=config.FAT_TAIL_JUMP,
                        help=f"Jump size h (default: {config.FAT_TAIL_JUMP:g})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog='riskreg',
        description='Sample volatility tail statistics and capital-rule simulations',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
Examples:
  python cli.py tail-expect --n 60 --alpha 0.001
  python cli.py curve --alphas 0.01,0.001 --format json
  python cli.py sim stddev-hist --m 1000 --n 1260 --seed 7
  python cli.py sim basel2-hist --seed 7 --threads 4
  python cli.py sim fat-moments --draws 1000000 --seed 7
  python cli.py empirical --input data/toy_panel.csv --past 3 --future 3
  python cli.py response --m 1000 --n 60 --banks 10 --seed 7 --independent
        '''
    )
    parser.add_argument('--log-level', default=config.LOG_LEVEL,
                        choices=config.LOG_LEVELS, help='Logging threshold on stderr')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)

    p = commands.add_parser('tail-expect', help='Conditional tail expectation of the sample std / sigma')
    p.add_argument('--n', type=int, required=True, help='Number of return observations')
    p.add_argument('--alpha', type=float, required=True, help='Tail mass in (0, 1]')
    p.add_argument('--upper', action='store_true', help='Condition on the upper tail')
    _add_output(p, formats=('text', 'csv', 'json'), default='text')
    p.set_defaults(handler=cmd_tail_expect)

    p = commands.add_parser('curve', help='Tail expectation over a range of n (one column per alpha)')
    p.add_argument('--n-min', type=int, default=config.CURVE_N_MIN)
    p.add_argument('--n-max', type=int, default=config.CURVE_N_MAX)
    p.add_argument('--step', type=int, default=config.CURVE_N_STEP)
    p.add_argument('--alphas', type=_float_list, default=config.TAIL_ALPHAS)
    p.add_argument('--upper', action='store_true')
    _add_output(p)
    p.set_defaults(handler=cmd_curve)

    sim = commands.add_parser('sim', help='Monte Carlo experiments')
    experiments = sim.add_subparsers(dest='experiment', metavar='EXPERIMENT', required=True)

    for name, help_text in (('stddev-hist', 'Histogram of standardized sample stds (Basel I risk)'),
                            ('basel2-hist', 'Histogram of standardized Basel II sums')):
        p = experiments.add_parser(name, help=help_text)
        p.add_argument('--m', type=int, default=config.SECURITIES, help='Number of securities')
        p.add_argument('--n', type=int, default=config.DAILY_PERIODS, help='Returns per security')
        p.add_argument('--normal', action='store_true', help='Normal returns instead of the fat-tail model')
        p.add_argument('--sigma', type=float, default=1.0, help='Scale of the returns')
        p.add_argument('--bin-width', type=float, default=config.HISTOGRAM_BIN_WIDTH)
        if name == 'basel2-hist':
            p.add_argument('--window', type=int, default=config.TRADING_DAYS_PER_YEAR,
                           help='Rolling yearly window length')
        _add_fat_tail(p)
        _add_seed(p)
        _add_output(p)
        p.set_defaults(handler=cmd_sim)

    p = experiments.add_parser('fat-moments', help='Simulated vs exact moments of the fat-tail model')
    p.add_argument('--draws', type=int, default=config.FAT_TAIL_DRAWS)
    _add_fat_tail(p)
    _add_seed(p)
    _add_output(p)
    p.set_defaults(handler=cmd_sim)

    p = experiments.add_parser('tail-count', help='Securities with sample std below beta * sigma')
    p.add_argument('--m', type=int, default=config.SECURITIES)
    p.add_argument('--n', type=int, default=config.MONTHLY_PERIODS)
    p.add_argument('--beta', type=float, default=config.TAIL_COUNT_BETA)
    _add_seed(p)
    _add_output(p)
    p.set_defaults(handler=cmd_sim)

    p = commands.add_parser('empirical', help='Future/past volatility ratios by past-volatility quantile')
    source = p.add_mutually_exclusive_group()
    source.add_argument('--input', metavar='CSV', help='Panel file with header date,security_id,return')
    source.add_argument('--synthetic', action='store_true', help='Use an equal-volatility simulated panel')
    p.add_argument('--past', type=int, default=config.MONTHLY_PERIODS, help='Past window length')
    p.add_argument('--future', type=int, default=config.MONTHLY_PERIODS, help='Maximum future window length')
    p.add_argument('--min-future', type=int, default=config.MIN_FUTURE)
    p.add_argument('--groups', type=_float_list, default=config.QUANTILE_BREAKPOINTS,
                   help='Quantile breakpoints (default: 0.01,0.1,0.9,0.99)')
    p.add_argument('--start', help='First as-of date (ISO 8601)')
    p.add_argument('--end', help='Last as-of date (ISO 8601)')
    p.add_argument('--securities', type=int, default=config.SYNTHETIC_SECURITIES)
    p.add_argument('--dates', type=int, default=config.SYNTHETIC_AS_OF_DATES, help='Synthetic as-of dates')
    p.add_argument('--sigma', type=float, default=config.SYNTHETIC_SIGMA)
    _add_seed(p)
    _add_output(p)
    p.set_defaults(handler=cmd_empirical)

    p = commands.add_parser('response', help='Bank allocation under a capital rule')
    p.add_argument('--m', type=int, default=config.SECURITIES)
    p.add_argument('--n', type=int, default=config.MONTHLY_PERIODS)
    p.add_argument('--banks', type=int, default=config.BANKS)
    p.add_argument('--budget', type=float, default=config.BANK_BUDGET)
    p.add_argument('--rule', choices=config.CAPITAL_RULES, default='basel1')
    p.add_argument('--c', type=float, default=config.BASEL_MULTIPLIER, help='Capital multiple')
    p.add_argument('--window', type=int, default=config.TRADING_DAYS_PER_YEAR, help='basel2 rolling window')
    p.add_argument('--independent', action='store_true', help='Each bank sees its own resampled histories')
    _add_seed(p)
    _add_output(p, default='json')
    p.set_defaults(handler=cmd_response)

    p = commands.add_parser('report', help='PDF summary of the closed-form tables')
    p.add_argument('--output', metavar='PATH', required=True, help='PDF file to write')
    p.set_defaults(handler=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    logging.basicConfig(level=args.log_level, format='%(levelname)s: %(name)s: %(message)s', stream=sys.stderr)

    try:
        args.handler(args)
        return EXIT_OK
    except statfn.DomainError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except Exception as e:
        logger.exception("Unexpected failure")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
