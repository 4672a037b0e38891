"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
collected into the terminal summary.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from lldp.adaptive import AdaptiveConfig, integrate, integrate_on_mesh
from lldp.bench import simulation_a, simulation_b, simulation_d
from lldp.matexp import DEFAULT_ORDER, PadeOrder, exp_chain, expm, inf_norm
from lldp.problem import OdeProblem
from lldp.rk import (A_EXACT, ALPHA_EXACT, B_EXACT, BHAT_EXACT, C_EXACT, DP45, LLDP45,
                     dp45_tableau, dp_step, eval_dense, lldp_step)
from lldp.testset import make_problem

RESULTS = []


def verdict(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def taylor_expm(a, terms=30):
    s = max(0, int(np.ceil(np.log2(max(inf_norm(a), 1e-300)))) + 1)
    b = a / 2.0 ** s
    term = np.eye(a.shape[0])
    out = term.copy()
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


# --- 1 ------------------------------------------------------------------------------

def test_criterion_1_tableau():
    tab = dp45_tableau()
    residuals = [
        abs(tab.b.sum() - 1.0),
        abs(tab.b_hat.sum() - 1.0),
        np.max(np.abs(tab.a.sum(axis=1) - tab.c)),
        np.max(np.abs(tab.a[6, :6] - tab.b[:6])),
        np.max(np.abs(tab.alpha.sum(axis=1) - tab.b)),
    ]
    exact = (sum(B_EXACT) == 1 and sum(BHAT_EXACT) == 1
             and all(sum(r, Fraction(0)) == c for r, c in zip(A_EXACT, C_EXACT))
             and all(sum(r) == b for r, b in zip(ALPHA_EXACT, B_EXACT)))
    worst = max(residuals)
    verdict(1, exact and worst <= 1e-15, f"tableau identities, worst float residual {worst:.1e} (<= 1e-15)")


# --- 2 ------------------------------------------------------------------------------

def test_criterion_2_matrix_exponential():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    high = PadeOrder(6, 6)
    err_high = err_default = err_chain = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 14))
        a = rng.standard_normal((n, n))
        h = float(rng.uniform(0.1, 2.0))
        a *= float(rng.uniform(0.05, 5.0)) / inf_norm(a * h)
        oracle = taylor_expm(a * h)
        scale = inf_norm(oracle)
        m_high, _ = expm(a, h, high)
        m_default, _ = expm(a, h, DEFAULT_ORDER)
        err_high = max(err_high, inf_norm(m_high - oracle) / scale)
        err_default = max(err_default, inf_norm(m_default - oracle) / scale)
        err_chain = max(err_chain, inf_norm(exp_chain(a, h)[1] - m_default) / inf_norm(m_default))
    elapsed = time.perf_counter() - start
    print(f"    info: default (3,3) order vs Taylor, worst {err_default:.1e}")
    ok = err_high <= 1e-8 and err_chain <= 1e-6 and elapsed < 1.0
    verdict(2, ok, f"expm (6,6) vs 30-term Taylor worst {err_high:.1e} (<= 1e-8); "
                   f"chain M_1 vs expm worst {err_chain:.1e} (<= 1e-6); {elapsed:.2f} s")


# --- 3 ------------------------------------------------------------------------------

def test_criterion_3_linear_exactness():
    start = time.perf_counter()
    crude = AdaptiveConfig(1e-3, 1e-6)
    stiff = make_problem("stifflin")
    sol = integrate(stiff.problem, crude)
    exact = np.array([stiff.analytic_reference(t) for t in sol.mesh])
    from lldp.bench import relative_error
    re_stiff = relative_error(exact, sol.states)
    n_stiff = sol.stats.accepted_steps
    per = make_problem("perlin")
    sol = integrate(per.problem, crude)
    exact = np.array([per.analytic_reference(t) for t in sol.mesh])
    re_per = relative_error(exact, sol.states, complex_pairs=True)
    n_per = sol.stats.accepted_steps
    elapsed = time.perf_counter() - start
    ok = re_stiff <= 1e-10 and n_stiff <= 30 and re_per <= 1e-6 and n_per <= 30 and elapsed < 1.0
    verdict(3, ok, f"stifflin RE {re_stiff:.1e} in {n_stiff} steps; perlin RE {re_per:.1e} "
                   f"in {n_per} steps; {elapsed:.2f} s")


# --- 4 ------------------------------------------------------------------------------

# Brusselator from (1.5, 3) at t = 0.5, 1, 1.5, 2, computed with 40-digit
# Taylor integration (mpmath.odefun) and frozen here
BRUSS_TIMES = (0.5, 1.0, 1.5, 2.0)
BRUSS_EXACT = np.array([
    [2.427347712578140598611, 1.567471102644918313007],
    [1.968732436863113501394, 1.387224265807548034131],
    [1.273149788788974019313, 1.778761269481624555207],
    [0.7836527176641998021285, 2.263802701489876455746],
])
STEPS = [1.0 / (10 * 2 ** k) for k in range(5)]


def _orders(method, use):
    p = make_problem("bruss").problem
    errs = []
    for h in STEPS:
        n = int(round(2.0 / h))
        sol = integrate_on_mesh(p, np.linspace(0.0, 2.0, n + 1), method, use=use)
        idx = [int(round(t / h)) for t in BRUSS_TIMES]
        errs.append(np.max(np.abs(sol.states[idx] - BRUSS_EXACT)))
    slopes = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    return errs, slopes


@pytest.mark.parametrize("method, use, target", [
    (LLDP45, "y5", 5.0), (LLDP45, "y4", 4.0), (DP45, "y5", 5.0),
])
def test_criterion_4_convergence_order(method, use, target):
    errs, slopes = _orders(method, use)
    order = slopes[-1]
    detail = (f"{method} {use} order {order:.2f} (target {target:.0f} +- 0.4), "
              f"pair slopes {', '.join(f'{s:.2f}' for s in slopes)}, "
              f"errors {errs[0]:.1e} .. {errs[-1]:.1e}")
    verdict(4, abs(order - target) <= 0.4, detail)


# --- 5 ------------------------------------------------------------------------------

def test_criterion_5_a_stability():
    lines = []
    ok = True
    for lam in (-1e2, -1e4, -1e6):
        p = OdeProblem(lambda t, x, lam=lam: lam * x, [1.0], 0.0, 1.0,
                       jacobian=lambda t, x, lam=lam: [[lam]])
        y1 = lldp_step(p, 0.0, p.x0, 1.0, DEFAULT_ORDER).y5[0]
        ok &= abs(y1) <= 1.0
        lines.append(f"lldp |y1|={abs(y1):.1e} at {lam:.0e}")
    p = OdeProblem(lambda t, x: -1e4 * x, [1.0], 0.0, 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            y_dp = abs(dp_step(p, 0.0, p.x0, 1.0).y5[0])
        except Exception:
            y_dp = math.inf
    ok &= y_dp > 1.0
    verdict(5, ok, "; ".join(lines) + f"; dp |y1|={y_dp:.1e} at -1e+04 (> 1 expected)")


# --- 6, 7 -------------------------------------------------------------------------------

SIM_B_PROBLEMS = ("perlin", "pernolin", "stifflin", "stiffnolin", "bruss", "vdp100")
EXPECTED_DP_RE = {"stifflin": 1.1e-3, "stiffnolin": 1.4e-2, "bruss": 7.7e-2}


@pytest.fixture(scope="module")
def simulation_b_rows():
    start = time.perf_counter()
    rows = {name: {r.method: r for r in simulation_b(name, "crude")} for name in SIM_B_PROBLEMS}
    return rows, time.perf_counter() - start


def test_criterion_6_simulation_b(simulation_b_rows):
    rows, elapsed = simulation_b_rows
    ok = elapsed < 120.0
    parts = []
    for name in ("perlin", "pernolin", "stifflin", "stiffnolin"):
        ll, dp = rows[name][LLDP45], rows[name][DP45]
        good = ll.accepted_steps < dp.accepted_steps and ll.relative_error < dp.relative_error
        ok &= good
        parts.append(f"{name} steps {ll.accepted_steps}/{dp.accepted_steps} "
                     f"RE {ll.relative_error:.1e}/{dp.relative_error:.1e}")
    ll, dp = rows["vdp100"][LLDP45], rows["vdp100"][DP45]
    ok &= 2 * ll.accepted_steps <= dp.accepted_steps
    parts.append(f"vdp100 steps {ll.accepted_steps}/{dp.accepted_steps}")
    for name, expected in EXPECTED_DP_RE.items():
        re = rows[name][DP45].relative_error
        ok &= expected / 10 <= re <= expected * 10
        parts.append(f"dp {name} RE {re:.1e} vs {expected:.1e}")
    verdict(6, ok, "; ".join(parts) + f"; {elapsed:.1f} s")


def test_criterion_7_accounting(simulation_b_rows):
    rows, _ = simulation_b_rows
    ok = True
    checked = 0
    for by_method in rows.values():
        for r in by_method.values():
            if r.status != "ok":
                continue
            n = r.accepted_steps + r.failed_steps
            ok &= r.f_evals == 6 * n + 1
            if r.method == LLDP45:
                ok &= r.jacobian_evals == n and r.expm_evals == n
            else:
                ok &= r.jacobian_evals == 0 and r.expm_evals == 0
            checked += 1
    ok &= checked == 2 * len(SIM_B_PROBLEMS)
    verdict(7, ok, f"f_evals = 6(accepted+failed)+1 and one Jacobian/exponential per LLDP attempt "
                   f"on {checked} runs")


# --- 8 ------------------------------------------------------------------------------

def test_criterion_8_dense_output():
    start = time.perf_counter()
    worst = 0.0
    for name in ("bruss", "stiffnolin", "pernolin", "vdp1"):
        for method in (LLDP45, DP45):
            sol = integrate(make_problem(name).problem, AdaptiveConfig(1e-3, 1e-6, method=method))
            for n, di in enumerate(sol.interpolants):
                y0, y1 = sol.states[n], sol.states[n + 1]
                worst = max(worst,
                            np.max(np.abs(eval_dense(di, 0.0) - y0)) / max(np.max(np.abs(y0)), 1.0),
                            np.max(np.abs(eval_dense(di, 1.0) - y1)) / max(np.max(np.abs(y1)), 1.0))
    rows = {r.method: r for r in simulation_d("stifflin", "crude", 4)}
    counts = all(r.dense_points == 4 * r.accepted_steps + 1 for r in rows.values())
    re = rows[LLDP45].relative_error
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and counts and re <= 1e-10 and elapsed < 10.0
    verdict(8, ok, f"endpoint mismatch {worst:.1e} (<= 1e-12); dense counts 4*steps+1: {counts}; "
                   f"stifflin dense RE {re:.1e} (<= 1e-10); {elapsed:.1f} s")


# --- 9 ------------------------------------------------------------------------------

def test_criterion_9_failure_rendering():
    rows = {r.method: r for r in simulation_a("vdp100", "crude")}
    ll = rows[LLDP45]
    ok = ll.status == "failed" and math.isnan(ll.relative_error) and rows[DP45].status == "ok"
    verdict(9, ok, f"simulation A vdp100 crude: lldp45 row status '{ll.status}', "
                   f"RE {ll.relative_error}, after {ll.accepted_steps} of "
                   f"{rows[DP45].accepted_steps} mesh steps")
