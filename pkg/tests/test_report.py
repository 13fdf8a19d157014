import numpy as np
import pytest

from pinchlab.errors import DomainError
from pinchlab.report import SWEEP_COLUMNS, loglog_slope, sweep, sweep_csv, thread_cap


def test_loglog_slope():
    x = np.array([1, 2, 4, 8.0])
    assert np.isclose(loglog_slope(x, 3 * x ** 0.7), 0.7)
    assert np.isnan(loglog_slope([1.0], [1.0]))


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("PINCHLAB_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("PINCHLAB_THREADS", "zero")
    assert thread_cap() == 1


@pytest.fixture(scope="module")
def small_sweep():
    return sweep([0.02, 0.1, 0.05], refine=3)


def test_sweep_rows_are_sorted_and_monotone(small_sweep):
    rows, summary = small_sweep
    assert [r["delta"] for r in rows] == [0.1, 0.05, 0.02]
    eps = [r["eps"] for r in rows]
    assert eps[0] > eps[1] > eps[2] > summary["eps_floor"]
    assert summary["slope_log_dH_vs_log_eps"] > 0
    assert np.isclose(summary["exponent_distortion_q"], 0.2)


def test_sweep_csv_layout(small_sweep):
    text = sweep_csv(*small_sweep)
    lines = text.splitlines()
    assert lines[0].split(",") == SWEEP_COLUMNS
    assert len([ln for ln in lines if not ln.startswith("#")]) == 4
    assert any(ln.startswith("# slope_log_dH_vs_log_eps,") for ln in lines)


def test_parallel_sweep_matches_serial(small_sweep):
    rows, _ = sweep([0.02, 0.1, 0.05], refine=3, workers=2)
    assert rows == small_sweep[0]


def test_empty_sweep_is_refused():
    with pytest.raises(DomainError):
        sweep([])
