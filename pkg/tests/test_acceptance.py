"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred to calibration.
"""

import dataclasses
import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from wavecert.bounds import (ExpansionPlan, delta, entropy_integral, epsilon_plan,
                             select_plan, sigma, tail_bound)
from wavecert.constants import assemble
from wavecert.simulate import covariance_decay_check, empirical_tail, mean_square_profile
from wavecert.spectral import gaussian_model, scale_model
from wavecert.wavelet import check_conditions, gram_matrix, make_meyer


def report(num, ok, detail):
    line = f"ACCEPTANCE {num} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line, flush=True)
    assert ok, line


def test_criterion_1_wavelet_admissibility(pair):
    t0 = time.monotonic()
    rep = check_conditions(pair, alpha=1.0, gamma=0.25)
    y = np.linspace(-np.pi, np.pi, 1000)
    pou = max(
        float(np.max(np.abs(
            sum(np.abs(pair.phi_hat(y + 2 * np.pi * k)) ** 2 for k in range(-2, 3))
            - 1.0))), 0.0)
    g = gram_matrix(pair, 2, 3)
    gram_defect = float(np.max(np.abs(g - np.eye(g.shape[0]))))
    elapsed = time.monotonic() - t0
    ok = rep.all_satisfied and pou < 1e-10 and gram_defect < 1e-6 and elapsed < 30.0
    report(1, ok, f"conditions={rep.all_satisfied}, partition defect={pou:.2e}, "
                  f"gram defect={gram_defect:.2e}, {elapsed:.1f}s")


def test_criterion_2_entropy_dominance(ledger):
    t0 = time.monotonic()
    worst = -np.inf
    for eps0 in np.geomspace(1e-4, 10.0, 20):
        i_val = entropy_integral(float(eps0), ledger.sigma_c, ledger.alpha, ledger.T)
        d_val = delta(float(eps0), ledger.sigma_c, ledger.alpha, ledger.T)
        worst = max(worst, i_val - d_val)
        if not i_val <= d_val + 1e-10 * max(1.0, d_val):
            report(2, False, f"I({eps0:g}) = {i_val:g} > delta = {d_val:g}")
    elapsed = time.monotonic() - t0
    report(2, elapsed < 10.0,
           f"I <= delta on 20 log-spaced eps0, worst gap {worst:.3e}, {elapsed:.1f}s")


def test_criterion_3_coefficient_decay(pair, model):
    t0 = time.monotonic()
    worst = 0.0
    for j in range(3):
        rep = covariance_decay_check(pair, model, j, 8)
        worst = max(worst, rep.offdiag_max_ratio, rep.diag_ratio)
        if not rep.all_ok:
            report(3, False, f"slack ratio >= 1 at level {j}")
    elapsed = time.monotonic() - t0
    report(3, worst < 1.0 and elapsed < 120.0,
           f"max slack ratio {worst:.3e} over j <= 2, |k|,|l| <= 8, {elapsed:.1f}s")


def test_criterion_4_deterministic_dominance(pair, model, ledger, grid257):
    t0 = time.monotonic()
    worst = -np.inf
    worst_plan = None
    for n in (1, 2, 3):
        for k0p in (2, 8, 32):
            for k in (2, 8, 32):
                plan = ExpansionPlan(n, k0p, (k,) * n)
                prof = mean_square_profile(pair, model, plan, grid257)
                eps = epsilon_plan(plan, ledger)
                slack = prof.sup / eps
                if slack > worst:
                    worst, worst_plan = slack, plan
                if prof.sup > eps:
                    report(4, False, f"{plan}: ms sup {prof.sup:g} > eps {eps:g}")
    elapsed = time.monotonic() - t0
    report(4, worst < 1.0 and elapsed < 600.0,
           f"27-plan sweep dominated; worst sup/eps = {worst:.3e} at {worst_plan}, "
           f"{elapsed:.1f}s")


def test_criterion_5_stochastic_dominance(pair, model, ledger, grid257):
    t0 = time.monotonic()
    plans = [ExpansionPlan(1, 2, (2,)),
             ExpansionPlan(2, 8, (8, 8)),
             ExpansionPlan(3, 32, (32, 32, 32))]
    for plan in plans:
        eps = epsilon_plan(plan, ledger)
        d = delta(eps, ledger.sigma_c, ledger.alpha, ledger.T)
        u_values = [8.0 * d * f for f in (1.01, 1.5, 2.0, 3.0, 5.0)]
        rep = empirical_tail(pair, model, ledger, plan, grid257, u_values,
                             n_rep=2000, seed=20260810)
        for (est, hw), cert in zip(rep.empirical_tail, rep.certified_tail):
            if not est - hw <= cert:
                report(5, False, f"{plan}: empirical {est:g} - {hw:g} > {cert:g}")
        if not rep.deterministic_ok:
            report(5, False, f"{plan}: ms sup exceeds certified eps")
    elapsed = time.monotonic() - t0
    report(5, elapsed < 900.0,
           f"3 plans x 5 thresholds dominated at n_rep=2000, {elapsed:.1f}s")


def _delta_vec(eps, consts):
    g = np.minimum(eps, sigma(0.5 * consts.T, consts.sigma_c, consts.alpha))
    return (g / np.sqrt(2.0)) * (
        np.sqrt(np.log(consts.T + 1.0))
        + (consts.sigma_c / g) ** (0.5 / consts.alpha) / (1.0 - 0.5 / consts.alpha))


def _restricted_min_count(u, p, consts, kmax=32, nmax=3):
    """Exhaustive oracle over the restricted plan space, feasibility judged
    definitionally per plan (u > 8 delta and certified bound <= p)."""
    best = None
    ks = np.arange(1, kmax + 1, dtype=float)
    for n in range(1, nmax + 1):
        grids = np.meshgrid(*([ks] * n), indexing="ij")
        eps_detail = sum(consts.A / (2.0 ** (0.5 * j) * np.sqrt(g))
                         for j, g in enumerate(grids))
        cnt_detail = sum(2.0 * g + 1.0 for g in grids)
        for k0p in range(1, kmax + 1):
            eps = eps_detail + consts.B / math.sqrt(k0p) + consts.C / 2.0 ** (0.5 * n)
            d = _delta_vec(eps, consts)
            gap = u - np.sqrt(8.0 * u * d)
            feas = (u > 8.0 * d) & (
                2.0 * np.exp(-np.minimum(gap * gap / (2.0 * eps * eps), 745.0)) <= p)
            if np.any(feas):
                cnt = np.where(feas, cnt_detail + 2.0 * k0p + 1.0, np.inf)
                m = float(np.min(cnt))
                if best is None or m < best:
                    best = m
    return best


def test_criterion_6_planner_soundness(ledger):
    t0 = time.monotonic()
    rng = np.random.default_rng(1234)
    compared = 0
    for i in range(50):
        eps_t = float(np.exp(rng.uniform(np.log(5.0), np.log(3e4))))
        p = float(rng.uniform(0.001, 0.5))
        d = delta(eps_t, ledger.sigma_c, ledger.alpha, ledger.T)
        s = (math.sqrt(8.0 * d)
             + math.sqrt(8.0 * d + 4.0 * math.sqrt(2.0 * math.log(2.0 / p)) * eps_t)) / 2.0
        u = float(s * s * rng.uniform(1.0, 3.0))
        plan = select_plan(u, p, ledger)
        eps = epsilon_plan(plan, ledger)
        dd = delta(eps, ledger.sigma_c, ledger.alpha, ledger.T)
        if not (u > 8.0 * dd and tail_bound(u, eps, dd).value <= p):
            report(6, False, f"instance {i}: returned plan infeasible")
        best = _restricted_min_count(u, p, ledger)
        if best is not None:
            compared += 1
            if best < 0.8 * plan.total_terms:
                report(6, False,
                       f"instance {i}: exhaustive found {best:g} terms vs "
                       f"returned {plan.total_terms}")
    elapsed = time.monotonic() - t0
    report(6, elapsed < 300.0,
           f"50 instances feasible; restricted exhaustive never beat 0.8x "
           f"({compared} non-vacuous comparisons), {elapsed:.1f}s")


def test_criterion_7_resolution_stability(model):
    base = assemble(make_meyer(4096), model, T=1.0, alpha=1.0, beta=0.75)
    fine = assemble(make_meyer(8192), model, T=1.0, alpha=1.0, beta=0.75, scale=2)
    worst_key, worst = None, 0.0
    for k, v in base.to_dict().items():
        w = fine.to_dict()[k]
        rel = abs(w - v) / max(abs(v), 1e-300)
        if rel > worst:
            worst_key, worst = k, rel
    report(7, worst < 1e-6,
           f"ledger stable under node/term doubling; worst {worst:.2e} at {worst_key}")


def test_criterion_8_homogeneity(pair, model, ledger):
    worst = 0.0
    for lam in (0.25, 4.0):
        scaled = assemble(pair, scale_model(model, lam), T=1.0, alpha=1.0, beta=0.75)
        for key in ("A", "B", "C"):
            ref = getattr(ledger, key) * math.sqrt(lam)
            rel = abs(getattr(scaled, key) - ref) / ref
            worst = max(worst, rel)
    report(8, worst < 1e-8, f"A,B,C scale by sqrt(lam); worst rel dev {worst:.2e}")


def test_criterion_9_verify_reproducibility(tmp_path):
    cfg = {
        "model": {"kind": "gaussian", "parameters": {"theta": 1.0}},
        "T": 1.0, "alpha": 1.0, "beta": 0.75,
        "plan": {"n": 1, "k0p": 4, "kj": [4]},
        "grid_points": 65, "replicates": 1000, "seed": 314159,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    outputs = []
    for tag, threads in (("a", "1"), ("b", "4")):
        out = tmp_path / tag
        env = dict(os.environ)
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            env[var] = threads
        proc = subprocess.run(
            [sys.executable, "-m", "wavecert.cli", "verify",
             "--config", str(cfg_path), "--output", str(out)],
            env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        payload = json.loads((out / "verify.json").read_text())
        payload.pop("meta")
        outputs.append((payload, (out / "replicates.csv").read_bytes()))
    ok = outputs[0][0] == outputs[1][0] and outputs[0][1] == outputs[1][1]
    report(9, ok, "verify bit-identical across runs and thread counts "
                  "(modulo meta)")
