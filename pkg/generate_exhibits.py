#!/usr/bin/env python3
"""
Generate every exhibit's data set into RISKREG_OUTPUT_DIR.

Tail-expectation curve, Basel I/II histograms for the fat-tail model,
fat-tail moments, the synthetic empirical ratio report, the bank response
report and the closed-form summary PDF. Uses RISKREG_SEED (default 0).
"""

import os
import sys

import config
import montecarlo
import panel
import response
import statfn
import utils
from cli import summary_tables

SEED = config.DEFAULT_SEED if config.DEFAULT_SEED is not None else 0


def _write_csv(filename, rows, header):
    path = os.path.join(config.OUTPUT_DIR, filename)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        utils.write_csv(rows, header, f)
    return path


def _write_json(filename, document):
    path = os.path.join(config.OUTPUT_DIR, filename)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        utils.write_json(document, f)
    return path


def curve_exhibit():
    n_values = list(range(config.CURVE_N_MIN, config.CURVE_N_MAX + 1, config.CURVE_N_STEP))
    rows = statfn.tail_curve(n_values, config.TAIL_ALPHAS)
    header = ['n'] + [f"alpha={a:g}" for a in config.TAIL_ALPHAS]
    return [_write_csv('tail_curve.csv', rows, header)]


def histogram_exhibits():
    sim = montecarlo.SimConfig(m=config.SECURITIES, n=config.DAILY_PERIODS, seed=SEED,
                               distribution=montecarlo.FatTailParams(), threads=config.THREADS)
    paths = []
    for report in (montecarlo.basel1_experiment(sim), montecarlo.basel2_experiment(sim)):
        stem = report.name.replace('-', '_')
        paths.append(_write_csv(f"{stem}.csv", report.histogram_rows(), ['bin_left', 'bin_right', 'count']))
        paths.append(_write_json(f"{stem}.json", report.to_dict()))
        print(f"    {report.name}: minimum {report.minimum:.4f}, "
              f"{report.count_below(0.85)} of {report.histogram.total} at or below 0.85")
    return paths


def fat_moments_exhibit():
    result = montecarlo.fat_moments_experiment(montecarlo.FatTailParams(), seed=SEED, threads=config.THREADS)
    print(f"    simulated std {result['simulated']['std']:.4f}, kurtosis {result['simulated']['kurtosis']:.2f}")
    return [_write_json('fat_moments.json', result)]


def empirical_exhibit():
    spec = panel.WindowSpec()
    data, date_range = panel.synthetic_panel(seed=SEED, spec=spec, threads=config.THREADS)
    report = panel.ratio_report(data, spec, panel.QuantileGroups(), date_range)
    overall = ', '.join(f"{name} {value:.2f}" for name, value in report.overall.items() if value is not None)
    print(f"    overall ratios: {overall}")
    return [
        _write_csv('empirical_ratios.csv', report.long_rows(), ['date', 'group', 'mean_ratio', 'count']),
        _write_json('empirical_ratios.json', report.to_dict()),
    ]


def response_exhibit():
    report = response.bank_experiment(seed=SEED, shared=False, threads=config.THREADS)
    print(f"    mean excess risk ratio {report.mean_excess_ratio:.3f}")
    return [_write_json('response.json', report.to_dict())]


def summary_exhibit():
    pdf = utils.generate_summary_pdf('Volatility-based capital: closed-form summary', summary_tables(),
                                     footer='riskreg summary report')
    path = os.path.join(config.OUTPUT_DIR, 'summary.pdf')
    with open(path, 'wb') as f:
        f.write(pdf.getvalue())
    return [path]


EXHIBITS = [
    ('tail expectation curve', curve_exhibit),
    ('Basel I/II histograms', histogram_exhibits),
    ('fat-tail moments', fat_moments_exhibit),
    ('synthetic empirical ratios', empirical_exhibit),
    ('bank response', response_exhibit),
    ('summary PDF', summary_exhibit),
]


def generate_exhibits():
    """Run every exhibit; returns (written, failed) counts."""
    os.makedirs(config.OUTPUT_DIR, exist_ok=True)
    print(f"Generating exhibits into {config.OUTPUT_DIR} (seed {SEED})")

    written, failed = 0, 0
    for name, build in EXHIBITS:
        print(f"  {name}")
        try:
            for path in build():
                print(f"    wrote {os.path.basename(path)} ({os.path.getsize(path)} bytes)")
                written += 1
        except (statfn.DomainError, OSError) as e:
            print(f"    Error generating {name}: {e}")
            failed += 1

    print(f"\nWrote {written} files, {failed} exhibits failed")
    return written, failed


if __name__ == '__main__':
    try:
        _, failed = generate_exhibits()
        sys.exit(0 if failed == 0 else 1)
    except Exception as e:
        print(f"Fatal error: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)
