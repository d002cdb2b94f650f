# tests/test_reports.py
import numpy as np
import pytest

from core.measures import ErrorReport
from data.reports import (
    BENCH_COLUMNS,
    DECAY_COEFFICIENT_COLUMNS,
    SWEEP_COLUMNS,
    read_csv,
    write_bench,
    write_coefficient_errors,
    write_decay_coefficients,
    write_error_curve,
    write_errors_per_point,
    write_loss_history,
    write_singular_values,
    write_sweep_summary,
)


def test_singular_values_with_tail_energy(tmp_path):
    path = tmp_path / "sigma.csv"
    write_singular_values(path, np.array([2.0, 1.0, 1.0]))
    frame = read_csv(path)
    assert list(frame["j"]) == [1, 2, 3]
    np.testing.assert_allclose(frame["tail_energy"], [2 / 6, 1 / 6, 0.0])


def test_floats_survive_the_text_format(tmp_path):
    path = tmp_path / "curve.csv"
    values = np.array([[1 / 3, np.pi], [np.e, 1e-300]])
    report = ErrorReport(L_list=[0, 4], E_G=values, E_NN=values * 2, E_V=values / 2)
    write_error_curve(path, report)
    frame = read_csv(path)
    np.testing.assert_array_equal(frame["mean_E_G"], values.mean(axis=0))
    assert path.read_text().splitlines()[0] == "L,mean_E_G,mean_E_V,mean_E_NN"


def test_errors_per_point_layout(tmp_path):
    path = tmp_path / "points.csv"
    E = np.arange(6.0).reshape(3, 2)
    write_errors_per_point(path, ErrorReport(L_list=[1, 2], E_G=E, E_NN=E + 1, E_V=E - 1))
    frame = read_csv(path)
    assert len(frame) == 6
    row = frame.iloc[3]
    assert (row["point"], row["L"], row["E_G"], row["E_NN"], row["E_V"]) == (1, 2, 3.0, 4.0, 2.0)


def test_loss_and_coefficient_reports(tmp_path):
    write_loss_history(tmp_path / "loss.csv", {2: [np.array([1.0, 0.5]), np.array([2.0, 1.0])], 0: []})
    losses = read_csv(tmp_path / "loss.csv")
    assert list(losses["network"]) == [0, 0, 1, 1]
    assert list(losses["epoch"]) == [0, 1, 0, 1]

    write_coefficient_errors(tmp_path / "coef.csv", {1: np.array([0.1]), 0: np.zeros(0)})
    assert list(read_csv(tmp_path / "coef.csv")["mode"]) == [1]


def test_bench_header(tmp_path):
    write_bench(tmp_path / "bench.csv", [(10, 100, 1e-2, 5e-3, 1e-5, 1000.0, 500.0)])
    frame = read_csv(tmp_path / "bench.csv")
    assert list(frame.columns) == BENCH_COLUMNS
    assert frame["ratio_GPOD_PODNN"][0] == pytest.approx(500.0)


def test_decay_coefficients_and_sweep_summary(tmp_path):
    write_decay_coefficients(tmp_path / "mu.csv", np.array([0.1, 0.0125]))
    mu = read_csv(tmp_path / "mu.csv")
    assert list(mu.columns) == DECAY_COEFFICIENT_COLUMNS
    assert list(mu["j"]) == [1, 2]
    assert mu["mu"][1] == 0.0125

    curves = {"H=4": [(0, 1.0, 1.0, 1.0), (1, 0.5, 0.25, 0.75)], "H=6": [(0, 1.0, 1.0, 1.0)]}
    write_sweep_summary(tmp_path / "sweep.csv", curves)
    summary = read_csv(tmp_path / "sweep.csv")
    assert list(summary.columns) == SWEEP_COLUMNS
    assert list(summary["variant"]) == ["H=4", "H=4", "H=6"]
    assert summary["mean_E_V"][1] == 0.25
