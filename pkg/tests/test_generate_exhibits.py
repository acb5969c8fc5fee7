"""Batch exhibit run into a temporary output directory."""
import json

import pytest

import generate_exhibits


def test_curve_exhibit(output_dir):
    output_dir.mkdir()
    (path,) = generate_exhibits.curve_exhibit()
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == 'n,alpha=0.01,alpha=0.001'
    assert len(lines) == 1 + len(range(30, 1201, 10))


@pytest.mark.slow
def test_generate_exhibits_writes_every_file(output_dir, capsys):
    written, failed = generate_exhibits.generate_exhibits()
    assert failed == 0
    names = {p.name for p in output_dir.iterdir()}
    assert names == {
        'tail_curve.csv', 'stddev_hist.csv', 'stddev_hist.json', 'basel2_hist.csv', 'basel2_hist.json',
        'fat_moments.json', 'empirical_ratios.csv', 'empirical_ratios.json', 'response.json', 'summary.pdf',
    }
    assert written == len(names)
    assert json.loads((output_dir / 'response.json').read_text(encoding="utf-8"))['mean_excess_ratio'] > 1.0
    assert 'Wrote 10 files, 0 exhibits failed' in capsys.readouterr().out
