import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from droopalloc.allocation import (GFL_LEANING, GFM_LEANING, MIXED, FrozenProblem, classify,
                                   gradient, grid_certify, inner_optimize, objective,
                                   outer_iterate, projected_descent, residual_check,
                                   seed_equilibrium, start_points)
from droopalloc.allocation.sweep import (apply_overrides, parse_param_path, parse_range,
                                         sweep)
from droopalloc.caselib import load_builtin
from droopalloc.errors import InfeasibleError, InvalidArgumentError, SeedInstabilityError
from droopalloc.network import assemble
from droopalloc.numerics import default_weights, lyapunov_solve, newton_equilibrium


def _unstable_case():
    case = load_builtin("base")
    return apply_overrides(case, [((1, "K_PLL_I"), -1.0), ((2, "K_PLL_I"), -1.0)])


# ---- objective and gradient -------------------------------------------

def test_objective_of_negative_identity():
    # P = I/2, S = I/4: trace = 2 * 1/2 * 1/4
    value, cert = objective(-np.eye(2))
    assert value == pytest.approx(0.25, abs=1e-15)
    assert cert.lyap_residual <= 1e-15


@settings(max_examples=25, deadline=None)
@given(c=st.floats(0.01, 100.0), seed=st.integers(0, 1000))
def test_objective_is_linear_in_the_output_weight(c, seed):
    r = np.random.default_rng(seed)
    A = r.normal(size=(4, 4))
    A -= (np.max(np.linalg.eigvals(A).real) + 0.5) * np.eye(4)
    Q, S = default_weights(4)
    assert objective(A, Q, c * S)[0] == pytest.approx(c * objective(A, Q, S)[0], rel=1e-10)


def test_gradient_vanishes_for_zero_direction():
    A = -np.eye(3)
    P = lyapunov_solve(A, np.eye(3))
    assert np.array_equal(gradient(A, [np.zeros((3, 3))], P, np.eye(3)), [0.0])


def test_scalar_gradient_matches_closed_form():
    # a p + p a = -q -> p = -q/(2a); J = p s; dJ/da = q s / (2 a^2)
    a, q, s = -2.0, 1.0, 0.5
    P = lyapunov_solve(np.array([[a]]), np.array([[q]]))
    g = gradient(np.array([[a]]), [np.eye(1)], P, np.array([[s]]))
    assert g[0] == pytest.approx(q * s / (2 * a * a), rel=1e-14)


def test_base_case_gradient_matches_central_differences(base_problem):
    k = np.array([300.0, 700.0])
    f, g, _ = base_problem.evaluate(k)
    for i in range(2):
        h = 1e-3 * k[i]
        e = np.zeros(2)
        e[i] = h
        fd = (base_problem.value(k + e) - base_problem.value(k - e)) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-12 * abs(f))
    assert base_problem.affine


def test_frozen_blocks_match_direct_linearisation(base_system, base_equilibrium, base_problem):
    from droopalloc.numerics import jacobians, reduce_effective
    k = np.array([123.0, 987.0])
    direct = reduce_effective(jacobians(base_system, (base_equilibrium.x, base_equilibrium.y), k))
    assert np.allclose(base_problem.effective(k), direct, rtol=0, atol=1e-10 * np.abs(direct).max())


# ---- inner optimiser ---------------------------------------------------

def test_start_points_are_deterministic_and_in_the_box():
    a = start_points([0, 0], [10, 10], np.array([3.0, 4.0]), 8, seed=7)
    b = start_points([0, 0], [10, 10], np.array([3.0, 4.0]), 8, seed=7)
    assert [p.tolist() for p, _ in a] == [p.tolist() for p, _ in b]
    assert [lab for _, lab in a[:3]] == ["nominal", "midpoint", "corner"]
    assert all(np.all((0 <= p) & (p <= 10)) for p, _ in a)


def test_collapsed_box_returns_the_single_point(base_problem):
    res = inner_optimize(base_problem, [5.0, 5.0], [5.0, 5.0])
    assert res.gains.tolist() == [5.0, 5.0]


def test_descent_history_is_monotone_and_feasible(base_problem):
    lower, upper = np.array([0.0, 0.0]), np.array([1200.0, 1200.0])
    k, f, cert, its, pgn, hist = projected_descent(base_problem, [10.0, 10.0], lower, upper)
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    assert np.all(k >= lower) and np.all(k <= upper)
    assert cert.spectral_abscissa < 0


def test_inner_result_respects_bounds_exactly(base_problem):
    res = inner_optimize(base_problem, [0.0, 0.0], [1200.0, 1200.0])
    assert np.all(res.gains >= 0.0) and np.all(res.gains <= 1200.0)
    assert res.objective == min(r.objective for r in res.starts if r.feasible)


def test_infeasible_box_reports_abscissae():
    case = _unstable_case()
    sys = assemble(case)
    rep = newton_equilibrium(sys, sys.flat_start())
    problem = FrozenProblem(sys, rep.x, rep.y)
    with pytest.raises(InfeasibleError) as info:
        inner_optimize(problem, [5.0, 5.0], [15.0, 15.0], starts=3)
    assert info.value.abscissae and all(a > 0 for a in info.value.abscissae)


def test_grid_certify_detects_a_better_grid_point():
    pts = 3
    rows = [(i, j, float(i + j), -1.0, True) for j in range(pts) for i in range(pts)]
    assert grid_certify(rows, 0.0, [0, 0], [2, 2], pts)[0]
    ok, gmin, slack = grid_certify(rows, 5.0, [0, 0], [2, 2], pts)
    assert (ok, gmin, slack) == (False, 0.0, 1.0)


# ---- outer iteration ---------------------------------------------------

def test_residual_check_is_zero_at_its_own_equilibrium(base_system, base_equilibrium):
    R, ok = residual_check(base_system, (base_equilibrium.x, base_equilibrium.y),
                           base_system.nominal_gains)
    assert ok and R <= 1e-9


def test_seed_instability_is_reported():
    case = _unstable_case()
    with pytest.raises(SeedInstabilityError) as info:
        seed_equilibrium(assemble(case), case.nominal_gains())
    assert max(np.real(info.value.eigenvalues)) > 0


def test_outer_iteration_result(base_case):
    res = outer_iterate(base_case)
    assert res.converged
    assert res.residuals[-1] <= res.epsilon
    assert res.certificate.spectral_abscissa < 0
    data = json.loads(json.dumps(res.to_dict(assemble(base_case))))
    assert set(data) >= {"converged", "epsilon", "gains", "nominal_gains", "certificate",
                         "iterations", "seed_residual"}
    assert data["iterations"][0]["k"] == 1
    assert "bus1.unified.pt" in data["iterations"][0]["equilibrium"]["x"]


def test_iteration_cap_gives_unconverged_result(base_case):
    res = outer_iterate(base_case, epsilon=1e-30, max_outer=2, starts=2)
    assert not res.converged
    assert len(res.iterations) == 2


def test_outer_iteration_is_deterministic(base_case):
    a = outer_iterate(base_case, starts=4)
    b = outer_iterate(base_case, starts=4)
    assert a.gains.tolist() == b.gains.tolist()
    assert a.certificate.objective == b.certificate.objective


# ---- allocation labels -------------------------------------------------

def test_labels_follow_the_band():
    rep = classify([102.0, 98.0, 100.5], [100.0, 100.0, 100.0], [1, 2, 3])
    assert [b.label for b in rep.buses] == [GFL_LEANING, GFM_LEANING, MIXED]
    assert rep.buses[0].relative_change == pytest.approx(0.02)
    assert any("heuristic" in n for n in rep.notes)
    assert "GFL-leaning" in rep.table()


def test_classify_needs_a_reference():
    with pytest.raises(InvalidArgumentError):
        classify([1.0], None, [1])
    with pytest.raises(InvalidArgumentError):
        classify([1.0, 2.0], [1.0], [1, 2])


# ---- sweeps ------------------------------------------------------------

def test_parameter_paths_and_ranges(base_case):
    assert parse_param_path(base_case, "bus2.K_PLL_I") == (2, "K_PLL_I")
    for bad in ("bus9.K_P", "bus1.nope", "K_P"):
        with pytest.raises(InvalidArgumentError):
            parse_param_path(base_case, bad)
    assert parse_range("0:1:3").tolist() == [0.0, 0.5, 1.0]
    with pytest.raises(InvalidArgumentError):
        parse_range("0:1")


def test_sweep_marks_unstable_points(base_case):
    rows = sweep(base_case, ["bus1.K_PLL_I"], [[5.0, -1.0]])
    assert [r["feasible"] for _, r in rows] == [True, False]
    assert rows[1][1]["spectral_abscissa"] > 0
