import json
import math
from dataclasses import replace

import numpy as np
import pytest

from spinlb.algebra import build_structure_tensor, enumerate_basis
from spinlb.bounds import (
    BETHE_PER_SPIN,
    BoundReport,
    ClusterModel,
    OptimizerConfig,
    anderson_bound,
    density_matrix,
    objective,
    sandwich_check,
    variational_bound,
)
from spinlb.errors import DegeneratePointError
from spinlb.oracle import min_eigenvalue, represent, spectrum_positivity
from spinlb.symmetry import ConstraintSet, build_constraints

QUICK = OptimizerConfig(restarts=8, seed=0)


@pytest.fixture(scope="module")
def tensors():
    return {n: build_structure_tensor(n) for n in (2, 3, 4, 5, 6)}


def setup(n, tensors):
    t = tensors[n]
    return ClusterModel(n), t, build_constraints(n, t.basis)


def dense_objective(b, t, model):
    n = model.n
    tau = sum(bk * represent(m, n) for bk, m in zip(b, t.basis))
    sq = tau @ tau
    return float(np.trace(represent(model.hamiltonian(), n) @ sq).real / np.trace(sq).real * model.per_spin_factor)


def test_bethe_constant():
    assert BETHE_PER_SPIN == pytest.approx(-1.77259, abs=1e-5)


def test_model_bonds():
    m = ClusterModel(4)
    assert m.bonds == [(1, 2), (2, 3), (3, 4)]
    assert m.per_spin_factor == pytest.approx(1 / 3)


def test_objective_at_identity_is_zero(tensors):
    model, t, _ = setup(4, tensors)
    b = np.zeros(t.size)
    b[0] = 1.0
    value, grad = objective(b, t, model)
    assert value == 0.0
    # cross term 2 b_0 b_bond tr(A_bond^2) / (n - 1) per bond
    bonds = [t.index(enumerate_basis(4)[k]) for k in (1, 4, 6)]
    expected = np.zeros(t.size)
    expected[bonds] = 2.0
    np.testing.assert_allclose(grad, expected, atol=1e-14)


def test_objective_degenerate_point(tensors):
    model, t, _ = setup(3, tensors)
    with pytest.raises(DegeneratePointError):
        objective(np.zeros(t.size), t, model)


def test_two_site_minimum_is_singlet(tensors):
    # tau = singlet projector (1 - s1.s2) / 4
    model, t, cs = setup(2, tensors)
    assert objective([0.25, -0.25], t, model)[0] == pytest.approx(-3.0, abs=1e-12)
    report = variational_bound(model, t, cs, QUICK)
    assert report.variational_per_spin == pytest.approx(-3.0, abs=1e-8)
    assert report.anderson_per_spin == pytest.approx(-3.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_objective_matches_dense(n, tensors):
    model, t, _ = setup(n, tensors)
    rng = np.random.default_rng(n)
    draws = 100 if n <= 5 else 20
    for _ in range(draws):
        b = rng.normal(size=t.size)
        assert abs(objective(b, t, model)[0] - dense_objective(b, t, model)) < 1e-9


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_scale_invariance(n, tensors):
    model, t, _ = setup(n, tensors)
    rng = np.random.default_rng(10 + n)
    for _ in range(20):
        b = rng.normal(size=t.size)
        base = objective(b, t, model)[0]
        for c in (-1.0, 0.01, 100.0):
            assert abs(objective(c * b, t, model)[0] - base) < 1e-10


def test_gradient_finite_differences(tensors):
    from spinlb.verify import finite_difference

    model, t, _ = setup(4, tensors)
    rng = np.random.default_rng(0)
    for _ in range(5):
        b = rng.uniform(-1, 1, t.size)
        _, g = objective(b, t, model)
        fd = finite_difference(lambda v: objective(v, t, model)[0], b)
        assert np.linalg.norm(g - fd) <= 1e-6 * np.linalg.norm(fd)


# lowest open-chain eigenvalues per bond, from an independent Kronecker build and LAPACK
@pytest.mark.parametrize(
    "n, expected",
    [(2, -3.0), (3, -2.0), (4, -2.1547005), (5, -1.9278863), (6, -1.9948617), (7, -1.8908265)],
)
def test_anderson_values(n, expected):
    assert anderson_bound(ClusterModel(n)) == pytest.approx(expected, abs=1e-7)


def test_anderson_solvers_agree():
    model = ClusterModel(6)
    assert anderson_bound(model, "jacobi") == pytest.approx(anderson_bound(model, "lapack"), abs=1e-10)


def test_anderson_is_lowest_eigenvalue_of_open_chain():
    # closed form for four sites: -(3 + 2 sqrt 3)
    h = represent(ClusterModel(4).hamiltonian(), 4)
    assert min_eigenvalue(h) == pytest.approx(-(3 + 2 * math.sqrt(3)), abs=1e-10)


def test_sandwich_examples():
    assert sandwich_check(BoundReport(5, -1.9279, -1.8685))
    assert sandwich_check(BoundReport(3, -2.0, -2.0))
    assert not sandwich_check(BoundReport(9, -1.9, -1.5))
    assert not sandwich_check(BoundReport(4, -2.0, -2.1))
    assert not sandwich_check(BoundReport(4, -2.0, None, status="infeasible"))


@pytest.mark.parametrize("n, expected", [(3, -2.0), (4, -2.0), (5, -1.8685)])
def test_variational_small(n, expected, tensors):
    model, t, cs = setup(n, tensors)
    report = variational_bound(model, t, cs, QUICK)
    assert report.status == "ok"
    assert report.variational_per_spin == pytest.approx(expected, abs=2e-3)
    assert report.variational_per_spin >= report.anderson_per_spin - 1e-9
    assert sandwich_check(report)
    assert report.best_constraint_residual < QUICK.feas_tol


def test_optimum_is_a_density_matrix(tensors):
    model, t, cs = setup(4, tensors)
    report = variational_bound(model, t, cs, QUICK)
    rho = density_matrix(report.a_coefficients, t)
    assert report.a_coefficients[0] == pytest.approx(1.0)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert spectrum_positivity(rho)
    energy = np.trace(represent(model.hamiltonian(), 4) @ rho).real * model.per_spin_factor
    assert energy == pytest.approx(report.variational_per_spin, abs=1e-9)


def test_random_squares_are_positive(tensors):
    for n in (3, 4, 5):
        t = tensors[n]
        rng = np.random.default_rng(n)
        for _ in range(10):
            a = t.a_vector(rng.normal(size=t.size))
            assert spectrum_positivity(density_matrix(a, t))


def test_restart_determinism(tensors):
    model, t, cs = setup(5, tensors)
    r1 = variational_bound(model, t, cs, QUICK)
    r2 = variational_bound(model, t, cs, QUICK)
    assert json.dumps(r1.to_json(), sort_keys=True) == json.dumps(r2.to_json(), sort_keys=True)


def test_parallel_matches_sequential(tensors):
    model, t, cs = setup(4, tensors)
    seq = variational_bound(model, t, cs, QUICK)
    par = variational_bound(model, t, cs, replace(QUICK, jobs=2))
    assert seq.to_json() == par.to_json()


def test_infeasible_constraints_reported(tensors):
    # a_0 = 1 forces <s1.s2> = 3, outside the physical range [-3, 1]
    model, t, _ = setup(2, tensors)
    cs = ConstraintSet(n=2, translation=[], a_equalities=[(0, 1)], b_orbits=[[0], [1]])
    report = variational_bound(model, t, cs, replace(QUICK, restarts=3, max_outer=8))
    assert report.status == "infeasible"
    assert report.variational_per_spin is None
    assert not sandwich_check(report)


def test_report_json_has_no_timing():
    doc = BoundReport(3, -2.0, -2.0, wall_time=1.5).to_json()
    assert "wall_time" not in doc
    assert BoundReport(3, -2.0, -2.0, wall_time=1.5).to_json(timing=True)["wall_time"] == 1.5


def test_config_roundtrip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"restarts": 5, "seed": 3}))
    cfg = OptimizerConfig.load(path)
    assert cfg.restarts == 5 and cfg.seed == 3 and cfg.penalty_init == 10
    with pytest.raises(ValueError):
        OptimizerConfig.from_dict({"restart": 5})


def test_basis_size_used_by_model(tensors):
    assert tensors[6].size == len(enumerate_basis(6)) == 76
