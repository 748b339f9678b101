import numpy as np
import pytest

from threshold_lab.bands import RateFit
from threshold_lab.plotting import emit_plot, g_curve_data, rate_plot_data

RHO = {4: 1.0, 8: 625 / 1054}


def test_g_curve_above_axis_inside_band():
    data = g_curve_data(4, RHO, 1.65)
    assert data["x"][0] == pytest.approx(0.65) and data["x"][-1] == 1.0
    assert np.all(data["y"] > 0)


def test_g_curve_touches_zero_at_endpoint():
    data = g_curve_data(4, RHO, 1.6, points=801)
    assert np.min(data["y"]) == pytest.approx(0.0, abs=1e-8)


def test_emit_plot_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot("g-curve", g_curve_data(4, RHO, 1.65), a)
    emit_plot("g-curve", g_curve_data(4, RHO, 1.65), b)
    text = a.read_text()
    assert text.startswith("<?xml") and "<svg" in text
    assert a.read_bytes() == b.read_bytes()


def test_rate_plot(tmp_path):
    n = np.array([400, 800, 1600])
    gaps = tuple(3.0 / n**2)
    fit = RateFit(5, tuple(n), gaps, -2.0, np.log(3.0), 0.0)
    data = rate_plot_data(fit)
    assert np.allclose(data["y"], fit.slope * data["x"] + fit.intercept)
    emit_plot("rate-loglog", data, tmp_path / "r.svg")
    assert "slope -2.0000" in (tmp_path / "r.svg").read_text()


def test_emit_plot_errors(tmp_path):
    with pytest.raises(ValueError):
        emit_plot("histogram", {"x": [1], "y": [1]}, tmp_path / "x.svg")
    with pytest.raises(OSError, match="missing"):
        emit_plot("g-curve", g_curve_data(4, RHO, 1.65), tmp_path / "missing" / "x.svg")
