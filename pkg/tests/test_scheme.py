"""Time stepper tests: the tridiagonal core, Picard behavior, step-by-step
state bookkeeping, energy margins, and agreement with an independently
assembled dense-solver oracle."""

import numpy as np
import pytest

from memburgers import scheme
from memburgers.gridops import second_diff_values
from memburgers.mesh import build_graded_mesh, build_mesh_from_levels, build_spatial_grid
from memburgers.problems import (
    ManufacturedProblem,
    SeparableForcing,
    example1,
    example2,
    f_half,
)
from memburgers.quadrature import compute_weights
from memburgers.scheme import (
    NonconvergenceError,
    SchemeConfig,
    SolverState,
    StabilityViolationError,
    first_step,
    general_step,
    new_state,
    solve,
    tridiagonal_solve,
)

from oracles import dense_trajectory


def _zero_problem(alpha=0.5):
    return ManufacturedProblem(
        name="zero",
        alpha=alpha,
        u0=lambda x: np.zeros_like(x),
        exact=lambda x, t: np.zeros_like(x),
        forcing=SeparableForcing(terms=()),
        sigma={},
    )


def test_tridiagonal_hand_solution():
    x = tridiagonal_solve([-1.0, -1.0], [2.0, 2.0, 2.0], [-1.0, -1.0], [1.0, 0.0, 1.0])
    assert np.allclose(x, [1.0, 1.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("m", [1, 2, 5, 40])
def test_tridiagonal_matches_dense_solve(m):
    rng = np.random.default_rng(m)
    lower = rng.normal(size=m - 1)
    upper = rng.normal(size=m - 1)
    diag = 4.0 + rng.random(size=m)  # dominant, hence well conditioned
    rhs = rng.normal(size=m)
    full = np.diag(diag)
    if m > 1:
        full += np.diag(lower, -1) + np.diag(upper, 1)
    expected = np.linalg.solve(full, rhs)
    got = tridiagonal_solve(lower, diag, upper, rhs)
    assert np.allclose(got, expected, rtol=1e-12, atol=1e-13)


def test_tridiagonal_band_length_validation():
    with pytest.raises(ValueError):
        tridiagonal_solve([1.0], [2.0, 2.0, 2.0], [1.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        tridiagonal_solve([1.0, 1.0], [2.0, 2.0, 2.0], [1.0, 1.0], [1.0, 1.0])


def test_scheme_config_validation():
    with pytest.raises(ValueError):
        SchemeConfig(eps=0.0)
    with pytest.raises(ValueError):
        SchemeConfig(max_steps=0)
    with pytest.raises(ValueError):
        SchemeConfig(f_mode="trapezoid")


def test_zero_data_stays_exactly_zero():
    problem = _zero_problem()
    mesh = build_graded_mesh(1.0, 6, 1.5)
    grid = build_spatial_grid(1.0, 8)
    result = solve(problem, mesh, grid, 0.5, SchemeConfig(), keep_trajectory=True)
    for level in result.trajectory:
        assert np.array_equal(level.values, np.zeros(grid.J + 1))
    # the zero start satisfies the zero fixed point on the first pass
    assert all(r.iterations == 1 for r in result.reports)


def test_first_step_without_convection_is_one_tridiagonal_solve():
    # with N(.) switched off the fixed point is reached after one solve and
    # certified on the second (increment exactly 0); the result must match
    # a directly assembled solve bit for bit
    alpha = 0.5
    problem = example1(alpha)
    mesh = build_graded_mesh(1.0, 4, 1.0)
    grid = build_spatial_grid(1.0, 16)
    weights = compute_weights(mesh, alpha)
    config = SchemeConfig(f_mode="endpoint_average", include_convection=False)

    state = new_state(mesh, grid, problem)
    u0 = state.U_prev.copy()
    u1, report = first_step(state, mesh, grid, weights, problem, config)

    k1 = float(mesh.k[0])
    h = grid.h
    fh = f_half(problem.forcing, mesh, 1, config.f_mode, grid)
    a = 1.0 / k1
    c = weights.w[1, 1] * k1 / (h * h)
    m = grid.J - 1
    diag = np.full(m, a + 2.0 * c)
    off = np.full(m - 1, -c)
    rhs = u0[1:-1] / k1 + fh.values[1:-1]
    expected = np.zeros(grid.J + 1)
    expected[1:-1] = tridiagonal_solve(off, diag, off, rhs)

    assert np.array_equal(u1.values, expected)
    assert report.iterations == 2
    assert report.final_increment == 0.0


def test_first_step_matches_dense_oracle():
    alpha = 0.5
    problem = example1(alpha)
    mesh = build_graded_mesh(1.0, 8, 1.0)
    grid = build_spatial_grid(1.0, 16)
    weights = compute_weights(mesh, alpha)
    config = SchemeConfig(eps=1e-11, f_mode="endpoint_average")
    state = new_state(mesh, grid, problem)
    u1, _ = first_step(state, mesh, grid, weights, problem, config)
    reference = dense_trajectory(problem, mesh, grid, alpha, config.f_mode)
    assert np.max(np.abs(u1.values - reference[1])) <= 1e-8


def test_full_solve_matches_dense_oracle():
    alpha = 0.75
    problem = example2(alpha)
    mesh = build_graded_mesh(1.0, 4, 1.6)
    grid = build_spatial_grid(1.0, 8)
    config = SchemeConfig(eps=1e-12, f_mode="interval_average")
    result = solve(problem, mesh, grid, alpha, config, keep_trajectory=True)
    reference = dense_trajectory(problem, mesh, grid, alpha, config.f_mode)
    for level, ref in zip(result.trajectory, reference):
        assert np.max(np.abs(level.values - ref)) <= 1e-7


def test_nonconvergence_reports_failing_step():
    problem = example1(0.5)
    mesh = build_graded_mesh(1.0, 4, 1.0)
    grid = build_spatial_grid(1.0, 32)
    config = SchemeConfig(eps=1e-14, max_steps=1)
    with pytest.raises(NonconvergenceError) as info:
        solve(problem, mesh, grid, 0.5, config)
    assert info.value.step == 1
    assert info.value.iterations == 1
    assert info.value.increment > 0.0


def test_stability_margins_nonnegative_across_configs():
    cases = [
        (example1(0.25), 1.0, "endpoint_average"),
        (example1(0.75), 1.6, "midpoint"),
        (example2(0.25), 2.0, "interval_average"),
        (example2(0.75), 8.0 / 7.0, "interval_average"),
    ]
    for problem, grading, f_mode in cases:
        mesh = build_graded_mesh(1.0, 32, grading)
        grid = build_spatial_grid(1.0, 32)
        result = solve(problem, mesh, grid, problem.alpha, SchemeConfig(f_mode=f_mode))
        assert all(r.stability_margin >= -1e-9 for r in result.reports)


def test_energy_bound_recomputed_from_trajectory():
    # independent re-evaluation of ||U^n|| <= ||U^0|| + 2 sum k_l ||f^{l-1/2}||
    alpha = 0.5
    problem = example1(alpha)
    mesh = build_graded_mesh(1.0, 16, 1.3)
    grid = build_spatial_grid(1.0, 24)
    config = SchemeConfig(f_mode="interval_average")
    result = solve(problem, mesh, grid, alpha, config, keep_trajectory=True)

    def l2(vals):
        return float(np.sqrt(grid.h * np.dot(vals[1:-1], vals[1:-1])))

    budget = l2(result.trajectory[0].values)
    for n in range(1, mesh.N + 1):
        fh = f_half(problem.forcing, mesh, n, config.f_mode, grid)
        budget += 2.0 * float(mesh.k[n - 1]) * l2(fh.values)
        assert l2(result.trajectory[n].values) <= budget + 1e-9


def test_stability_check_raises_on_violation():
    mesh = build_graded_mesh(1.0, 2, 1.0)
    grid = build_spatial_grid(1.0, 4)
    state = SolverState(mesh, grid, np.zeros(grid.J + 1))
    too_big = np.zeros(grid.J + 1)
    too_big[1:-1] = 1.0
    with pytest.raises(StabilityViolationError):
        scheme._check_stability(state, too_big, grid.h, step=1)


def test_state_progression_and_stored_differences():
    alpha = 0.4
    problem = example1(alpha)
    mesh = build_graded_mesh(1.0, 3, 1.2)
    grid = build_spatial_grid(1.0, 12)
    weights = compute_weights(mesh, alpha)
    config = SchemeConfig(eps=1e-10)

    state = new_state(mesh, grid, problem)
    assert state.n == 0
    assert state.d_first is None
    assert state.d_half.shape == (0, grid.J + 1)

    u1, r1 = first_step(state, mesh, grid, weights, problem, config)
    assert state.n == 1 and r1.step == 1
    assert np.array_equal(state.d_first, second_diff_values(u1.values, grid.h))
    assert state.d_half.shape == (0, grid.J + 1)

    u1_vals = u1.values.copy()
    u2, r2 = general_step(state, mesh, grid, weights, problem, config)
    assert state.n == 2 and r2.step == 2
    v = 0.5 * (u2.values + u1_vals)  # the stored unknown is the half level
    assert np.allclose(state.d_half[0], second_diff_values(v, grid.h), atol=1e-10)


def test_step_order_misuse_raises():
    alpha = 0.5
    problem = example1(alpha)
    mesh = build_graded_mesh(1.0, 2, 1.0)
    grid = build_spatial_grid(1.0, 8)
    weights = compute_weights(mesh, alpha)
    config = SchemeConfig()

    state = new_state(mesh, grid, problem)
    with pytest.raises(ValueError):
        general_step(state, mesh, grid, weights, problem, config)
    first_step(state, mesh, grid, weights, problem, config)
    with pytest.raises(ValueError):
        first_step(state, mesh, grid, weights, problem, config)
    general_step(state, mesh, grid, weights, problem, config)
    with pytest.raises(ValueError):
        general_step(state, mesh, grid, weights, problem, config)  # past mesh.N


def test_alpha_mismatch_raises():
    problem = example1(0.5)
    mesh = build_graded_mesh(1.0, 2, 1.0)
    grid = build_spatial_grid(1.0, 8)
    with pytest.raises(ValueError):
        solve(problem, mesh, grid, 0.6, SchemeConfig())


def test_boundary_values_exactly_zero():
    problem = example2(0.3)
    mesh = build_graded_mesh(1.0, 8, 1.6)
    grid = build_spatial_grid(1.0, 16)
    config = SchemeConfig(f_mode="interval_average")
    result = solve(problem, mesh, grid, 0.3, config, keep_trajectory=True)
    for level in result.trajectory:
        assert level.values[0] == 0.0
        assert level.values[-1] == 0.0


def test_solve_is_deterministic():
    problem = example1(0.25)
    mesh = build_graded_mesh(1.0, 8, 1.0)
    grid = build_spatial_grid(1.0, 16)
    config = SchemeConfig()
    a = solve(problem, mesh, grid, 0.25, config)
    b = solve(problem, mesh, grid, 0.25, config)
    assert np.array_equal(a.final.values, b.final.values)
    assert [r.iterations for r in a.reports] == [r.iterations for r in b.reports]


def test_single_step_mesh():
    problem = example1(0.5)
    mesh = build_mesh_from_levels([0.0, 1.0])
    grid = build_spatial_grid(1.0, 8)
    result = solve(problem, mesh, grid, 0.5, SchemeConfig(), keep_trajectory=True)
    assert len(result.reports) == 1
    assert len(result.trajectory) == 2
    assert np.array_equal(result.final.values, result.trajectory[1].values)
    assert result.max_fp_iterations == result.reports[0].iterations
