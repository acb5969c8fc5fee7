"""Shared test fixtures for riskreg."""
import io

import pytest

import config
import panel

TOY_CSV = """date,security_id,return
2001-01-31,A,0.01
2001-01-31,B,0.05
2001-02-28,A,0.03
2001-02-28,B,-0.01
2001-03-31,A,0.02
2001-03-31,B,0.02
2001-04-30,A,0.00
2001-04-30,B,0.02
2001-05-31,A,0.04
2001-05-31,B,0.02
2001-06-30,A,0.02
2001-06-30,B,0.08
"""


@pytest.fixture
def toy_csv():
    """Two securities over six month-ends; hand-computed stds at 2001-03-31."""
    return TOY_CSV


@pytest.fixture
def toy_panel(toy_csv):
    return panel.load_panel(io.StringIO(toy_csv))


@pytest.fixture
def toy_path(tmp_path, toy_csv):
    path = tmp_path / "toy.csv"
    path.write_text(toy_csv, encoding="utf-8")
    return path


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Redirect batch exhibit output into the test's tmp dir."""
    out = tmp_path / "exhibits"
    monkeypatch.setattr(config, "OUTPUT_DIR", str(out))
    return out


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    """Tests pass seeds explicitly; an ambient RISKREG_SEED must not leak in."""
    monkeypatch.setattr(config, "DEFAULT_SEED", None)
