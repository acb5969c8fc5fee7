"""Tests for the CSV/JSON writers and the PDF summary."""
import io
import json
import math

import numpy as np

import utils


def test_write_json_is_strict_and_plain():
    out = io.StringIO()
    utils.write_json({'a': np.float64(1.5), 'b': np.int64(3), 'c': math.nan, 'd': (1, 2), 'e': np.bool_(True)}, out)
    text = out.getvalue()
    assert text.endswith('\n')
    assert json.loads(text) == {'a': 1.5, 'b': 3, 'c': None, 'd': [1, 2], 'e': True}


def test_write_csv_keeps_full_precision_and_blanks_missing_values():
    out = io.StringIO()
    utils.write_csv([{'x': 0.1 + 0.2, 'y': None}, {'x': math.nan, 'y': 2}], ['x', 'y'], out)
    assert out.getvalue() == 'x,y\n0.30000000000000004,\n,2\n'


def test_format_number():
    assert utils.format_number(3) == '3'
    assert utils.format_number(0.123456) == '0.1235'
    assert utils.format_number(None) == '-'
    assert utils.format_number(math.nan) == '-'


def test_summary_pdf_is_deterministic():
    tables = [{'heading': 'Numbers', 'header': ['n', 'value'], 'rows': [['60', 0.76], ['1260', 0.93]],
               'note': 'Example table.'}]
    first = utils.generate_summary_pdf('Summary', tables, footer='footer')
    second = utils.generate_summary_pdf('Summary', tables, footer='footer')
    assert first.getvalue().startswith(b'%PDF')
    assert first.getvalue() == second.getvalue()
