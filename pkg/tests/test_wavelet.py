"""Meyer pair construction, basis evaluation, and admissibility checks."""

import dataclasses

import numpy as np
import pytest

from wavecert.wavelet import (FOUR_THIRDS_PI, TWO_THIRDS_PI, EIGHT_THIRDS_PI,
                              check_conditions, eval_basis, gram_matrix,
                              make_meyer, meyer_phi_hat, meyer_psi_hat)

# Frozen by the step-halving trapezoid oracle on (1/2 pi) int phi_hat
# (512..32768 panels agree to 1e-12) and confirmed by scipy.integrate.quad.
MEYER_PHI_AT_0 = 1.0518219027880313


def test_phi_hat_core_and_support(pair):
    y = np.linspace(-TWO_THIRDS_PI, TWO_THIRDS_PI, 101)
    assert np.all(pair.phi_hat(y) == 1.0)
    far = FOUR_THIRDS_PI + np.linspace(1e-12, 50.0, 1001)
    assert np.all(pair.phi_hat(far) == 0.0)
    assert np.all(pair.phi_hat(-far) == 0.0)


def test_psi_hat_support_is_exact(pair):
    inner = np.linspace(-TWO_THIRDS_PI, TWO_THIRDS_PI, 101)
    assert np.all(pair.psi_hat(inner) == 0.0)
    assert pair.psi_hat(np.array([np.pi / 2]))[0] == 0.0  # pi/2 < 2pi/3
    far = EIGHT_THIRDS_PI + np.linspace(1e-12, 30.0, 501)
    assert np.all(pair.psi_hat(far) == 0.0)


def test_vanishing_moments_exact(pair):
    # zero tolerance: these are exact by the compact support of phi_hat
    assert complex(pair.psi_hat(np.array([0.0]))[0]) == 0.0
    assert complex(pair.psi_hat_d1(np.array([0.0]))[0]) == 0.0


def test_partition_of_unity(pair):
    y = np.linspace(-np.pi, np.pi, 1000)
    total = sum(np.abs(pair.phi_hat(y + 2.0 * np.pi * k)) ** 2 for k in range(-2, 3))
    assert np.max(np.abs(total - 1.0)) < 1e-10


def test_sup_constants_dominate_grid_evaluations(pair):
    rng = np.random.default_rng(3)
    y = rng.uniform(-9.0, 9.0, 20000)
    assert np.all(np.abs(pair.phi_hat(y)) <= pair.c_phi)
    assert np.all(np.abs(pair.phi_hat_d1(y)) <= pair.c_phi_prime)
    assert np.all(np.abs(pair.psi_hat_d1(y)) <= pair.c_psi_prime)
    assert np.all(np.abs(pair.psi_hat_d2(y)) <= pair.c_psi_dprime)


def test_c_psi_dprime_against_finite_difference_oracle(pair):
    # Richardson-refined central differences on a dense grid, halving the
    # step until the sup changes by < 1e-8
    y = np.linspace(TWO_THIRDS_PI, EIGHT_THIRDS_PI, 100001)
    h = 1e-3
    prev = None
    for _ in range(30):
        d2a = (meyer_psi_hat(y + h) - 2 * meyer_psi_hat(y) + meyer_psi_hat(y - h)) / h**2
        d2b = (meyer_psi_hat(y + h / 2) - 2 * meyer_psi_hat(y)
               + meyer_psi_hat(y - h / 2)) / (h / 2) ** 2
        cur = float(np.max(np.abs((4.0 * d2b - d2a) / 3.0)))
        if prev is not None and abs(cur - prev) < 1e-8:
            break
        prev = cur
        h /= 2
    assert cur == pytest.approx(pair.c_psi_dprime, rel=1e-6)


def test_eval_basis_phi_at_zero_frozen_value(pair):
    assert eval_basis(pair, "scaling", 0, 0, 0.0) == pytest.approx(
        MEYER_PHI_AT_0, abs=1e-8)
    # two quadrature resolutions agree
    assert eval_basis(pair, "scaling", 0, 0, 0.0, scale=2) == pytest.approx(
        MEYER_PHI_AT_0, abs=1e-8)


def test_eval_basis_shift_identity(pair):
    for k, t in [(3, 3.4), (-2, -1.3), (5, 5.0)]:
        assert eval_basis(pair, "scaling", 0, k, t) == pytest.approx(
            eval_basis(pair, "scaling", 0, 0, t - k), abs=1e-10)


def test_eval_basis_dilation_identity(pair):
    # psi_{1,3}(t) = sqrt(2) psi(2t - 3)
    for s in [-0.7, 0.0, 0.35, 1.2]:
        t = (s + 3.0) / 2.0
        assert eval_basis(pair, "mother", 1, 3, t) == pytest.approx(
            np.sqrt(2.0) * eval_basis(pair, "mother", 0, 0, s), abs=1e-10)


def test_eval_basis_rejects_bad_levels(pair):
    with pytest.raises(ValueError):
        eval_basis(pair, "mother", -1, 0, 0.0)
    with pytest.raises(ValueError):
        eval_basis(pair, "scaling", 1, 0, 0.0)
    with pytest.raises(ValueError):
        eval_basis(pair, "ricker", 0, 0, 0.0)


def test_eval_basis_quadrature_stability(pair):
    cases = [("scaling", 0, 2, 0.3), ("mother", 0, -1, 0.8),
             ("mother", 2, 5, 0.45), ("mother", 3, -7, 0.9)]
    for kind, j, k, t in cases:
        v1 = eval_basis(pair, kind, j, k, t)
        v2 = eval_basis(pair, kind, j, k, t, scale=2)
        assert abs(v1 - v2) < 1e-8


def test_gram_small_cases(pair):
    g = gram_matrix(pair, 0, 1)
    assert np.max(np.abs(g - np.eye(g.shape[0]))) < 1e-6
    g2 = gram_matrix(pair, 2, 3)
    assert np.allclose(np.diag(g2), 1.0, atol=1e-6)
    assert np.array_equal(g2, g2.T)


def test_gram_scaling_mother_cross_level_orthogonality(pair):
    # <phi_00, psi_1k>: the supports [0, 4pi/3] and [4pi/3, 16pi/3] meet in a
    # null set, so a brute-force overlap quadrature vanishes identically
    y = np.linspace(TWO_THIRDS_PI, 6.0 * np.pi, 20001)
    for k in range(-5, 6):
        overlap = np.trapezoid(
            pair.phi_hat(y) * np.abs(pair.psi_hat(y / 2.0)), y)
        assert overlap == 0.0
        i_phi = [("scaling", 0, 0)]
        i_psi = [("mother", 1, k)]
        from wavecert.wavelet import atom_product_matrix
        assert abs(atom_product_matrix(pair, i_phi, i_psi)[0, 0]) < 1e-6


def test_gram_rejects_large_requests(pair):
    with pytest.raises(ValueError):
        gram_matrix(pair, 4, 1)
    with pytest.raises(ValueError):
        gram_matrix(pair, 1, 6)


def test_orthonormality_desk_scale(pair):
    g = gram_matrix(pair, 2, 3)
    assert np.max(np.abs(g - np.eye(g.shape[0]))) < 1e-6


def test_conditions_meyer_default(pair):
    rep = check_conditions(pair, alpha=1.0, gamma=0.25)
    assert rep.all_satisfied
    for e in rep.entries:
        assert np.isfinite(e.value) or e.name.startswith("sup")


def test_conditions_larger_alpha(pair):
    rep1 = check_conditions(pair, alpha=1.0, gamma=0.49)
    rep2 = check_conditions(pair, alpha=2.0, gamma=0.49)
    assert rep2.all_satisfied
    # larger log exponent inflates the psi-side integral (support sits at
    # |v| >= 2pi/3 where ln(1+|v|) > 1)
    assert (rep2.entry("log_moment_psi").value
            > rep1.entry("log_moment_psi").value)


def test_conditions_broken_pair_detected(pair):
    def fake_psi_hat(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-0.5 * y * y) + 0.0j

    def fake_psi_hat_d1(y):
        y = np.asarray(y, dtype=float)
        return -y * np.exp(-0.5 * y * y) + 0.0j

    broken = dataclasses.replace(pair, psi_hat=fake_psi_hat,
                                 psi_hat_d1=fake_psi_hat_d1)
    rep = check_conditions(broken, alpha=1.0, gamma=0.25)
    assert not rep.entry("psi_hat_zero_at_origin").satisfied
    assert not rep.all_satisfied


def test_condition_report_round_trip(pair):
    rep = check_conditions(pair, alpha=1.0, gamma=0.25)
    d = rep.to_dict()
    assert d["all_satisfied"] is True
    assert {e["name"] for e in d["entries"]} == {e.name for e in rep.entries}
