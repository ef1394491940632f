"""The constant ledger: integrals, series, composites, and their invariants."""

import dataclasses
import math

import numpy as np
import pytest

from wavecert.constants import (assemble, compute_Q1, compute_c_alpha,
                                compute_spectral_constants,
                                compute_wavelet_integrals, default_delta_q)
from wavecert.seriessum import damped_power_sum, power_sum
from wavecert.simulate import CoefficientIndex, basis_matrix
from wavecert.spectral import scale_model

# zeta(3/2) frozen from the 1e7-term direct sum with bracketed integral tail
ZETA_3_2 = 2.6123753486854883
# Q1 at (beta, delta) = (3/4, 1/3) frozen from the same dual-resolution oracle
Q1_FROZEN = 18.378610263249506


def zeta_oracle(s, n):
    k = np.arange(1, n + 1, dtype=float)
    partial = float(np.sum(np.sort(k**-s)))
    hi = n ** (1.0 - s) / (s - 1.0)
    lo = (n + 1.0) ** (1.0 - s) / (s - 1.0)
    return partial + 0.5 * (hi + lo)


def test_power_sum_against_independent_oracle():
    for s in (1.25, 1.5, 1.75, 2.0, 2.25):
        assert power_sum(s) == pytest.approx(zeta_oracle(s, 10**7), rel=1e-9)
    assert power_sum(1.5) == pytest.approx(ZETA_3_2, rel=1e-10)


def test_power_sum_rejects_divergent_exponent():
    with pytest.raises(ValueError):
        power_sum(1.0)


def test_damped_power_sum_geometric_closed_form():
    r = 2.0**-0.5
    assert damped_power_sum(0.0, r) == pytest.approx(2.0 + math.sqrt(2.0), abs=1e-12)
    assert damped_power_sum(1.0, r) == pytest.approx(1.0 / (1.0 - r) ** 2, rel=1e-12)


def test_wavelet_integrals_dual_paths(pair):
    w = compute_wavelet_integrals(pair, alpha=1.0, beta=0.75)
    # direct c2 never exceeds the sup-based bound c2 <= (sup |psi_hat|)^beta c0
    sup_psi = float(np.max(np.abs(pair.psi_hat(np.linspace(0, 9, 40001)))))
    assert w["c2"] <= sup_psi**0.75 * w["c0"] * (1.0 + 1e-12)
    assert w["c3"] <= sup_psi**0.75 * w["c1"] * (1.0 + 1e-12)
    # nonnegativity of the log-weighted integrals
    assert w["c1"] >= 0.0 and w["c3"] >= 0.0
    # support-localized lower bound: ln(1+|v|) >= ln(1+2pi/3) on the support,
    # so with alpha = 1 exactly c3 >= ln(1+2pi/3) c2
    assert w["c3"] >= math.log1p(2.0 * np.pi / 3.0) * w["c2"] * (1.0 - 1e-12)


def test_wavelet_integrals_reject_bad_beta(pair):
    with pytest.raises(ValueError):
        compute_wavelet_integrals(pair, alpha=1.0, beta=0.5)
    with pytest.raises(ValueError):
        compute_wavelet_integrals(pair, alpha=1.0, beta=1.0)


def test_spectral_constants_positive_finite(pair, model):
    s = compute_spectral_constants(pair, model, T=1.0)
    for k, v in s.items():
        assert np.isfinite(v) and v > 0.0, k


def test_spectral_constants_density_scaling(pair, model):
    s1 = compute_spectral_constants(pair, model, T=1.0)
    lam = 3.0
    s2 = compute_spectral_constants(pair, scale_model(model, lam), T=1.0)
    for k in ("A_psi", "A1_psi", "A_phi", "A1_phi"):
        assert s2[k] == pytest.approx(lam * s1[k], rel=1e-12)
    for k in ("B1_psi", "B1_phi"):
        assert s2[k] == pytest.approx(s1[k], rel=1e-12)


def test_spectral_constants_affine_in_T(pair, model):
    s1 = compute_spectral_constants(pair, model, T=1.0)
    s2 = compute_spectral_constants(pair, model, T=2.0)
    w = compute_wavelet_integrals(pair, alpha=1.0, beta=0.75)
    assert s2["B1_psi"] - s1["B1_psi"] == pytest.approx(
        w["c2"] / (2.0 * np.pi), rel=1e-10)
    assert s2["B1_phi"] - s1["B1_phi"] == pytest.approx(
        w["cphi2"] / (2.0 * np.pi), rel=1e-10)


def test_c_alpha_reference_value():
    assert compute_c_alpha(1.0, 1.0) == pytest.approx(math.log(math.e + 1.0),
                                                      rel=1e-9)


def test_c_alpha_vanishes_with_T():
    for t_small in (1e-3, 1e-6):
        ca = compute_c_alpha(t_small, 1.0)
        assert ca <= t_small * math.log(math.e + 1.0 / t_small) * (1 + 1e-9)
    assert compute_c_alpha(1e-9, 1.0) < 1e-7


def test_c_alpha_defining_inequality_on_grid():
    for T, alpha in ((1.0, 1.0), (2.0, 0.75), (0.5, 2.0)):
        ca = compute_c_alpha(T, alpha)
        h = np.linspace(T / 10000.0, T, 10000)
        assert np.all(h <= ca / np.log(np.exp(alpha) + 1.0 / h) ** alpha)


def test_q1_dual_resolution_oracle():
    val = compute_Q1(0.75, 1.0 / 3.0)
    assert val == pytest.approx(Q1_FROZEN, rel=1e-9)
    # independent low/high-resolution oracles agree with each other too
    cd = (1.0 / 3.0) ** (1.0 / 3.0) * (2.0 / 3.0) ** (2.0 / 3.0)
    lo = ((0.5 * zeta_oracle(1.25, 10**4)) ** 2
          + cd**0.75 * zeta_oracle(1.25, 10**4) * zeta_oracle(1.25, 10**4))
    hi = ((0.5 * zeta_oracle(1.25, 10**7)) ** 2
          + cd**0.75 * zeta_oracle(1.25, 10**7) * zeta_oracle(1.25, 10**7))
    assert lo == pytest.approx(hi, rel=1e-9)
    assert val == pytest.approx(hi, rel=1e-9)


def test_q1_rejects_divergence_boundary():
    beta = 0.75
    with pytest.raises(ValueError):
        compute_Q1(beta, 2.0 - 1.0 / beta)  # l-series becomes harmonic
    with pytest.raises(ValueError):
        compute_Q1(beta, 0.0)
    with pytest.raises(ValueError):
        compute_Q1(0.4, 0.2)


def test_q1_symmetric_split_constant():
    # c_delta at delta = 1/2 equals 1/2; verify through the assembled formula
    beta, dq = 0.8, 0.5
    expected = (0.5 * power_sum(0.5 + beta)) ** 2 + 0.5**beta * power_sum(
        1.0 + dq * beta) * power_sum((2.0 - dq) * beta)
    assert compute_Q1(beta, dq) == pytest.approx(expected, rel=1e-12)


def test_default_delta_q_is_interval_midpoint():
    assert default_delta_q(0.75) == pytest.approx((2.0 - 1.0 / 0.75) / 2.0)


def test_ledger_fields_finite_and_consistent(ledger):
    d = ledger.to_dict()
    for k, v in d.items():
        assert np.isfinite(v), k
    assert ledger.sigma_c == ledger.B0 + ledger.B1 + ledger.B2
    assert ledger.beta == 1.0 - 0.25  # gamma = 1/4 default


def test_ledger_round_trip(ledger):
    from wavecert.constants import BoundConstants
    again = BoundConstants.from_dict(ledger.to_dict())
    assert again == ledger


def test_literal_b_variant(pair, model, ledger):
    lit = assemble(pair, model, literal_b=True)
    expected = math.sqrt(6.0 * ledger.A_phi * ledger.B1_phi**2 * power_sum(1.5)
                         + 4.0 * ledger.A1_psi * ledger.B1_psi**2)
    assert lit.B == pytest.approx(expected, rel=1e-9)
    # every other field is unchanged
    for k, v in lit.to_dict().items():
        if k != "B":
            assert v == pytest.approx(ledger.to_dict()[k], rel=1e-12)


def test_series_convergence_certificates():
    # every ledger series has exponent > 1 and a tail below 1e-10 relative:
    # doubling the term budget must not move the value
    for s in (1.25, 1.5, 1.75, 2.0):
        assert power_sum(s) == pytest.approx(power_sum(s, scale=2), rel=1e-10)
    assert damped_power_sum(1.0, 2.0**-0.5) == pytest.approx(
        damped_power_sum(1.0, 2.0**-0.5, scale=2), rel=1e-10)


def test_increment_constant_empirical_anchor(pair, ledger):
    # |psi_jk(t)-psi_jk(s)| |psi_jl(t)-psi_jl(s)| <=
    #   (j+1)^{2a} 2^{3j-2} K^2 / (|k|^b |l|^b ln(e^a + 1/|t-s|)^{2a})
    rng = np.random.default_rng(7)
    a, b, K = ledger.alpha, ledger.beta, ledger.K
    for j in range(3):
        ks = [k for k in range(-8, 9) if k != 0]
        idx = tuple(CoefficientIndex("detail", j, k) for k in ks)
        for _ in range(20):
            t, s = rng.uniform(0.0, 1.0, 2)
            if t == s:
                continue
            vals = basis_matrix(pair, idx, np.array([t, s]))
            diff = np.abs(vals[:, 0] - vals[:, 1])
            logf = math.log(math.exp(a) + 1.0 / abs(t - s)) ** (2.0 * a)
            lhs = np.outer(diff, diff)
            kk = np.abs(np.array(ks, dtype=float))
            rhs = ((j + 1.0) ** (2 * a) * 2.0 ** (3 * j - 2) * K**2
                   / (np.outer(kk**b, kk**b) * logf))
            off = ~np.eye(len(ks), dtype=bool)
            assert np.all(lhs[off] <= rhs[off])
