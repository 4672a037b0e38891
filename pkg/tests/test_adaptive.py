import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lldp.adaptive import (AdaptiveConfig, SolverStats, error_norm, initial_step, integrate,
                           integrate_on_mesh, next_step)
from lldp.bench import reference_solution, relative_error
from lldp.errors import IntegrationFailure, StepComputationError, UsageError
from lldp.problem import OdeProblem
from lldp.rk import DP45, LLDP45, dp_step, lldp_step
from lldp.testset import make_problem

CRUDE = dict(rtol=1e-3, atol=1e-6)
NONLINEAR = ("pernolin", "stiffnolin", "fpu", "bruss", "rigid", "chm", "vdp1", "vdp100")


def zero_field(t0=0.0, T=1.0):
    return OdeProblem(lambda t, x: np.zeros(2), [1.0, -2.0], t0, T,
                      jacobian=lambda t, x: np.zeros((2, 2)))


def check_stats(sol):
    s = sol.stats
    n = s.accepted_steps + s.failed_steps
    assert s.f_evals == 6 * n + 1
    if sol.method == LLDP45:
        assert s.jacobian_evals == n and s.expm_evals == n
    else:
        assert s.jacobian_evals == 0 and s.expm_evals == 0


# --- pieces -----------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(UsageError):
        AdaptiveConfig(rtol=0.0)
    with pytest.raises(UsageError):
        AdaptiveConfig(atol=-1.0)
    with pytest.raises(UsageError):
        AdaptiveConfig(method="rk4")
    assert AdaptiveConfig(1e-3, 1e-6).tr == pytest.approx(1e-3)


def test_default_bounds():
    h_min, h_max = AdaptiveConfig().bounds(make_problem("vdp100").problem)
    assert h_max == 30.0
    assert h_min == 16.0 * np.finfo(float).eps * 300.0


def test_initial_step_zero_field():
    assert initial_step(zero_field(), AdaptiveConfig(**CRUDE)) == 0.1


def test_initial_step_formula():
    p = OdeProblem(lambda t, x: np.ones(1), [1.0], 0.0, 1.0)
    h0 = initial_step(p, AdaptiveConfig(h_max=0.5, **CRUDE))
    assert h0 == pytest.approx(0.200951, abs=5e-7)
    assert h0 == pytest.approx(1.0 / (1.0 / (0.8 * 1e-3 ** 0.2)), rel=1e-15)


def test_initial_step_clamped_to_h_max():
    p = OdeProblem(lambda t, x: np.ones(1), [1.0], 0.0, 1.0)
    assert initial_step(p, AdaptiveConfig(h_max=0.05, **CRUDE)) == 0.05


def test_error_norm_examples():
    cfg = AdaptiveConfig(rtol=1e-3, atol=1e-6)
    assert error_norm(np.ones(3), np.ones(3), np.zeros(3), cfg) == 0.0
    assert error_norm(np.array([2.0]), np.array([4.0]), np.array([0.01]), cfg) == pytest.approx(0.0025)
    assert error_norm(np.array([1e-9]), np.array([0.0]), np.array([1e-6]), cfg) == pytest.approx(1e-3)


def test_next_step_branches():
    cfg = AdaptiveConfig(**CRUDE)
    bounds = (1e-10, 10.0)
    assert next_step(1.0, 1e-3, False, cfg, bounds) == pytest.approx(0.8)
    assert next_step(1.0, 32e-3, False, cfg, bounds) == pytest.approx(0.4)
    assert next_step(1.0, 1e6, False, cfg, bounds) == pytest.approx(0.1)
    assert next_step(1.0, 2e-3, True, cfg, bounds) == 0.5
    assert next_step(1.0, 0.0, False, cfg, bounds) == 10.0
    assert next_step(1.0, 1e-12, False, cfg, bounds) == 10.0


@given(st.floats(min_value=1e-8, max_value=1.0), st.floats(min_value=0.0, max_value=1e8),
       st.booleans())
def test_next_step_within_bounds(h, error, fail):
    cfg = AdaptiveConfig(**CRUDE)
    h_new = next_step(h, error, fail, cfg, (1e-9, 2.0))
    assert 1e-9 <= h_new <= 2.0
    if error > cfg.rtol:
        assert h_new <= h


# --- whole integrations ---------------------------------------------------------------

@pytest.mark.parametrize("method", [LLDP45, DP45])
def test_zero_field_takes_h_max(method):
    p = zero_field()
    sol = integrate(p, AdaptiveConfig(method=method, h_max=0.1, **CRUDE))
    assert sol.stats.accepted_steps == 10 and sol.stats.failed_steps == 0
    assert np.array_equal(sol.states[-1], p.x0)
    assert sol.mesh[-1] == 1.0
    check_stats(sol)


def test_perlin_lldp_crude():
    named = make_problem("perlin")
    sol = integrate(named.problem, AdaptiveConfig(**CRUDE))
    assert 10 <= sol.stats.accepted_steps <= 30
    exact = np.array([named.analytic_reference(t) for t in sol.mesh])
    assert relative_error(exact, sol.states, complex_pairs=True) <= 1e-6


def test_stifflin_dp_crude_step_count():
    sol = integrate(make_problem("stifflin").problem, AdaptiveConfig(method=DP45, **CRUDE))
    assert 30 <= sol.stats.accepted_steps <= 90


@pytest.mark.parametrize("method", [LLDP45, DP45])
@pytest.mark.parametrize("name", ["pernolin", "stiffnolin", "bruss", "rigid", "chm", "vdp1", "fpu"])
def test_accepted_steps_pass_error_test(name, method):
    p = make_problem(name).problem
    cfg = AdaptiveConfig(method=method, **CRUDE)
    sol = integrate(p, cfg)
    fsal = None
    for n in range(len(sol.mesh) - 1):
        t, h = sol.mesh[n], sol.interpolants[n].h
        if method == LLDP45:
            out = lldp_step(p, t, sol.states[n], h, fsal_in=fsal)
        else:
            out = dp_step(p, t, sol.states[n], h, fsal_in=fsal)
        assert error_norm(sol.states[n], out.y5, out.err_vec, cfg) <= cfg.rtol
        assert np.array_equal(out.y5, sol.states[n + 1])
        fsal = out.fsal_f
    assert sol.mesh[-1] == p.T
    check_stats(sol)


@pytest.mark.parametrize("method", [LLDP45, DP45])
def test_integration_is_deterministic(method):
    p = make_problem("vdp1").problem
    cfg = AdaptiveConfig(method=method, **CRUDE)
    a, b = integrate(p, cfg), integrate(p, cfg)
    assert np.array_equal(a.mesh, b.mesh) and np.array_equal(a.states, b.states)
    assert (a.stats.accepted_steps, a.stats.failed_steps, a.stats.f_evals) == \
        (b.stats.accepted_steps, b.stats.failed_steps, b.stats.f_evals)


def test_mesh_closure_on_awkward_interval():
    p = OdeProblem(lambda t, x: -x, [1.0], 0.1, 0.7 + 1e-13, jacobian=lambda t, x: [[-1.0]])
    for method in (LLDP45, DP45):
        sol = integrate(p, AdaptiveConfig(method=method, **CRUDE))
        assert sol.mesh[-1] == p.T
        assert np.all(np.diff(sol.mesh) > 0)


def test_failure_when_step_underflows():
    # blows up at t = 1
    p = OdeProblem(lambda t, x: x * x, [1.0], 0.0, 2.0, jacobian=lambda t, x: [[2.0 * x[0]]])
    with pytest.raises(IntegrationFailure) as info:
        integrate(p, AdaptiveConfig(method=DP45, **CRUDE))
    assert info.value.t < 1.0


@pytest.mark.parametrize("name", NONLINEAR)
@pytest.mark.parametrize("method", [LLDP45, DP45])
def test_tighter_tolerance_is_more_accurate(name, method):
    named = make_problem(name)
    errs = []
    for rtol, atol in ((1e-3, 1e-6), (1e-6, 1e-9)):
        sol = integrate(named.problem, AdaptiveConfig(rtol, atol, method=method))
        check_stats(sol)
        errs.append(relative_error(reference_solution(name, sol.mesh), sol.states, named.complex_pairs))
    assert errs[1] <= errs[0]


# --- dense path and fixed mesh ------------------------------------------------------------

def test_solution_path_call():
    p = make_problem("bruss").problem
    sol = integrate(p, AdaptiveConfig(**CRUDE))
    assert np.array_equal(sol(sol.mesh[3]), sol.states[3])
    assert np.array_equal(sol(p.T), sol.states[-1])
    with pytest.raises(UsageError):
        sol(p.T + 1.0)


def test_fixed_mesh_counts_and_y4():
    p = make_problem("bruss").problem
    mesh = np.linspace(0.0, 2.0, 41)
    sol = integrate_on_mesh(p, mesh, LLDP45)
    assert sol.stats.accepted_steps == 40 and sol.stats.f_evals == 6 * 40 + 1
    assert np.array_equal(sol.mesh, mesh)
    sol4 = integrate_on_mesh(p, mesh, LLDP45, use="y4")
    assert sol4.stats.f_evals == 1 + 6 + 7 * 39
    with pytest.raises(UsageError):
        integrate_on_mesh(p, [0.0, 0.0], LLDP45)


def test_fixed_mesh_keeps_partial_stats_on_failure():
    p = make_problem("vdp100").problem
    dp = integrate(p, AdaptiveConfig(method=DP45, **CRUDE))
    stats = SolverStats()
    with pytest.raises(StepComputationError):
        integrate_on_mesh(p, dp.mesh, LLDP45, stats=stats)
    assert 0 < stats.accepted_steps < len(dp.mesh) - 1
