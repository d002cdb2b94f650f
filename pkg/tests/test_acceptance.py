# tests/test_acceptance.py
"""Desk-scale end-to-end checks. Run with `pytest -m slow`."""
from pathlib import Path

import numpy as np
import pytest

from core.galerkin import gpod_error_curve
from core.helmholtz import HelmholtzProblem
from core.pod import assemble_snapshots, centered_pod
from core.sampling import halton
from core.transform import ALGEBRAIC, MATERN, DecaySpec
from data.experiment_config import ExperimentConfig
from stages.manager import PipelineManager

pytestmark = pytest.mark.slow

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def desk_config(name, output_dir, **nn_overrides):
    config = ExperimentConfig.load(CONFIG_DIR / name)
    data = config.to_dict()
    data["nn"].update(nn_overrides)
    data["output_dir"] = str(output_dir)
    return ExperimentConfig.from_dict(data)


@pytest.fixture(scope="module")
def helmholtz_desk(tmp_path_factory):
    config = desk_config("helmholtz_desk.json", tmp_path_factory.mktemp("helmholtz_desk"))
    manager = PipelineManager(config, workers=4)
    report = manager.run_pipeline()
    return manager, report


def test_eckart_young_on_desk_snapshots():
    problem = HelmholtzProblem(1.0, DecaySpec(family=MATERN, J=10, theta=0.1, nu=0.5, l=0.1), 4)
    snapshots = assemble_snapshots(problem, halton(64, 10), workers=4)
    basis = centered_pod(snapshots)
    X = snapshots.data - basis.mean[:, None]
    total = np.sum(basis.singular_values ** 2)
    for L in range(1, basis.rank + 1):
        V = basis.V[:, :L]
        residual = np.linalg.norm(X - V @ (V.conj().T @ X)) ** 2
        assert abs(residual - np.sum(basis.singular_values[L:] ** 2)) <= 1e-9 * total


def test_singular_value_decay_follows_coefficient_decay():
    points = halton(128, 20)
    families = [
        DecaySpec(family=ALGEBRAIC, J=20, theta=0.1, r=3.0),
        DecaySpec(family=ALGEBRAIC, J=20, theta=0.1, r=2.0),
        DecaySpec(family=MATERN, J=20, theta=0.1, nu=0.5, l=0.1),
    ]
    tails = []
    for spec in families:
        snapshots = assemble_snapshots(HelmholtzProblem(1.0, spec, 4), points, workers=4)
        tails.append(centered_pod(snapshots).tail_energy(10))
    assert tails[0] < tails[1] < tails[2]


def test_error_ordering_on_desk_run(helmholtz_desk):
    _, report = helmholtz_desk
    assert report.check_ordering()


def test_surrogate_improves_on_the_mean(helmholtz_desk):
    _, report = helmholtz_desk
    e_nn = dict(zip(report.L_list, report.mean("E_NN")))
    assert e_nn[10] <= 0.5 * e_nn[0]


def test_online_speedup(helmholtz_desk):
    manager, _ = helmholtz_desk
    summary = manager.ensure("bench")
    assert summary["data"]["L"] == 10
    assert summary["data"]["ratio_GPOD_PODNN"] >= 10.0


def test_maxwell_galerkin_error_decreases(tmp_path):
    config = desk_config("maxwell_desk.json", tmp_path)
    problem = config.build_problem()
    basis = centered_pod(assemble_snapshots(problem, config.train_set(), workers=4), L=10)
    test_set = config.test_set()
    hf = assemble_snapshots(problem, test_set, workers=4).data
    rows = gpod_error_curve(problem, basis, test_set, list(range(basis.L + 1)), hf)
    e_g = [row[1] for row in rows]
    for previous, current in zip(e_g, e_g[1:]):
        assert current <= 1.05 * previous
