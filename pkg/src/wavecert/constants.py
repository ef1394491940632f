"""The constant ledger behind the certified uniform error bound.

Everything here is an explicit number computed from the wavelet pair and the
spectral model: log-weighted wavelet integrals (c0..c3 and their scaling
analogues), spectral constants from the integration-by-parts coefficient
decay (A_psi, A1_psi, A_phi, A1_phi), time-domain basis bounds (B1_psi,
B1_phi), the composite increment constants K, K_phi, the double-series bound
Q1, the diagonal series constants q, q1, q2, q_phi1, the three
modulus-of-continuity constants B0, B1, B2 whose sum is the sigma-modulus
constant, and the final rate constants A, B, C entering

    eps_plan = sum_j A / (2^{j/2} sqrt(k_j)) + B / sqrt(k0') + C / 2^{n/2}.

All quadratures run over compact supports, all series carry integral-test
tail remainders, and every field is reproducible to < 1e-6 relative under
doubling of quadrature nodes and series terms (the ``scale`` knob).
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConditionFailure
from .quadrature import integrate
from .seriessum import damped_power_sum, power_sum
from .spectral import SpectralModel, tail_moment
from .wavelet import WaveletPair


@dataclass(frozen=True)
class BoundConstants:
    """Flat, auditable ledger; field names double as the JSON keys."""

    alpha: float
    beta: float
    delta_q: float
    T: float
    c0: float
    c1: float
    c2: float
    c3: float
    cphi0: float
    cphi1: float
    cphi2: float
    cphi3: float
    c_alpha: float
    A_psi: float
    A1_psi: float
    A_phi: float
    A1_phi: float
    B1_psi: float
    B1_phi: float
    K: float
    K_phi: float
    Q1: float
    q: float
    q1: float
    q2: float
    q_phi1: float
    B0: float
    B1: float
    B2: float
    sigma_c: float
    A: float
    B: float
    C: float

    def __post_init__(self):
        for f in dc_fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v):
                raise ValueError(f"ledger field {f.name} is not finite: {v}")
            if f.name not in ("alpha", "beta", "delta_q", "T") and v < 0.0:
                raise ValueError(f"ledger field {f.name} is negative: {v}")
        if self.sigma_c != self.B0 + self.B1 + self.B2:
            raise ValueError("sigma_c must equal B0 + B1 + B2 exactly")

    def to_dict(self) -> dict:
        return {f.name: float(getattr(self, f.name)) for f in dc_fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundConstants":
        return cls(**{f.name: float(d[f.name]) for f in dc_fields(cls)})


def _two_sided_band_integral(fn, lo: float, hi: float, breaks, *, scale: int = 1) -> float:
    """int over |y| in [lo, hi] of fn(|y|-symmetric integrand), one call."""
    return 2.0 * integrate(fn, lo, hi, breakpoints=breaks, scale=scale)


def compute_wavelet_integrals(pair: WaveletPair, alpha: float, beta: float, *,
                              scale: int = 1) -> dict:
    """Log-weighted moduli integrals of both symbols.

    c0 = int |psi_hat|^(1-beta), c1 = int (ln(1+|v|))^alpha |psi_hat|^(1-beta),
    c2 = int |psi_hat|, c3 = int (ln(1+|v|))^alpha |psi_hat|, and the
    analogous cphi* for the scaling symbol, all over the compact supports.
    """
    if not 0.5 < beta < 1.0:
        raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
    if not alpha > 0.5:
        raise ValueError(f"alpha must exceed 1/2, got {alpha}")
    g = 1.0 - beta
    out = {}
    for prefix, hat, (lo, hi), breaks in (
        ("c", pair.psi_hat, pair.support_psi, pair.psi_breaks),
        ("cphi", pair.phi_hat, pair.support_phi, pair.phi_breaks),
    ):
        mod = lambda v, h=hat: np.abs(h(v))
        logw = lambda v: np.log1p(np.abs(v)) ** alpha
        out[prefix + "0"] = _two_sided_band_integral(
            lambda v: mod(v) ** g, lo, hi, breaks, scale=scale)
        out[prefix + "1"] = _two_sided_band_integral(
            lambda v: logw(v) * mod(v) ** g, lo, hi, breaks, scale=scale)
        out[prefix + "2"] = _two_sided_band_integral(
            mod, lo, hi, breaks, scale=scale)
        out[prefix + "3"] = _two_sided_band_integral(
            lambda v: logw(v) * mod(v), lo, hi, breaks, scale=scale)
    return out


def hat_derivative_l1(pair: WaveletPair, which: str, *, scale: int = 1) -> float:
    """int |d/dy hat(y)| dy over the compact support (both signs of y)."""
    if which == "psi":
        lo, hi = pair.support_psi
        fn, breaks = pair.psi_hat_d1, pair.psi_breaks
        bands = ((-hi, -lo), (lo, hi))
        breaks = breaks + tuple(-c for c in breaks)
    else:
        lo, hi = pair.support_phi
        fn, breaks = pair.phi_hat_d1, pair.phi_breaks
        bands = ((-hi, hi),)
        breaks = breaks + tuple(-c for c in breaks)
    return sum(
        integrate(lambda y: np.abs(fn(y)), a, b, breakpoints=breaks, scale=scale)
        for a, b in bands
    )


def compute_spectral_constants(pair: WaveletPair, model: SpectralModel, T: float, *,
                               scale: int = 1) -> dict:
    """Spectral decay constants and time-domain basis bounds.

    A_psi scales the off-diagonal coefficient covariances as
    A_psi / (2^{4j} |k-l|), A1_psi the diagonal as A1_psi / 2^{5j};
    A_phi, A1_phi are the scaling-function analogues.  B1_psi and B1_phi are
    the interval-length-dependent sup bounds on the basis functions.
    """
    if not T > 0.0:
        raise ValueError("T must be positive")
    i_rd1_z4 = tail_moment(model, 4.0, "derivative", scale=scale)
    i_r_z3 = tail_moment(model, 3.0, "density", scale=scale)
    i_r_z4 = tail_moment(model, 4.0, "density", scale=scale)
    i_rd1 = tail_moment(model, 0.0, "derivative", scale=scale)
    i_r = tail_moment(model, 0.0, "density", scale=scale)
    if not all(np.isfinite(v) for v in (i_rd1_z4, i_r_z3, i_r_z4, i_rd1, i_r)):
        raise ConditionFailure(
            "spectral moment conditions fail: a weighted density integral diverges")
    two_pi = 2.0 * np.pi
    cpp2 = pair.c_psi_dprime**2
    a_psi = cpp2 / two_pi * (i_rd1_z4 + 2.0 * i_r_z3)
    a1_psi = cpp2 / two_pi * i_r_z4
    a_phi = (pair.c_phi**2 * i_rd1 + 2.0 * pair.c_phi * pair.c_phi_prime * i_r) / two_pi
    a1_phi = pair.c_phi**2 / two_pi * i_r
    int_psi = _two_sided_band_integral(
        lambda v: np.abs(pair.psi_hat(v)), *pair.support_psi, pair.psi_breaks,
        scale=scale)
    int_phi = _two_sided_band_integral(
        lambda v: np.abs(pair.phi_hat(v)), *pair.support_phi, pair.phi_breaks,
        scale=scale)
    b1_psi = (hat_derivative_l1(pair, "psi", scale=scale) + T * int_psi) / two_pi
    b1_phi = (hat_derivative_l1(pair, "phi", scale=scale) + T * int_phi) / two_pi
    return {
        "A_psi": a_psi, "A1_psi": a1_psi, "A_phi": a_phi, "A1_phi": a1_phi,
        "B1_psi": b1_psi, "B1_phi": b1_phi,
    }


def compute_c_alpha(T: float, alpha: float) -> float:
    """Smallest constant with h <= c_alpha / (ln(e^alpha + 1/h))^alpha on (0, T].

    Equals sup_h h (ln(e^alpha + 1/h))^alpha, located by a coarse grid and a
    golden-section polish refined to 1e-10; the result is inflated by 1e-12
    relatively so the defining inequality holds at any sample point.
    """
    if not (T > 0.0 and alpha > 0.0):
        raise ValueError("T and alpha must be positive")

    def f(h):
        return h * np.log(np.exp(alpha) + 1.0 / h) ** alpha

    h = np.linspace(T / 4096.0, T, 4096)
    vals = f(h)
    i = int(np.argmax(vals))
    best = float(vals[i])
    a = h[max(i - 1, 0)]
    b = min(h[min(i + 1, len(h) - 1)], T)
    res = minimize_scalar(lambda x: -f(x), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * T})
    best = max(best, float(-res.fun), float(f(np.asarray([T]))[0] if np.ndim(T) else f(T)))
    return best * (1.0 + 1e-12)


def compute_Q1(beta: float, delta_q: float, *, scale: int = 1) -> float:
    """Uniform bound on the off-diagonal double series.

    Q1 = (sum_k 1/(2 k^(1/2+beta)))^2
       + c_delta^beta * sum_m m^-(1+delta*beta) * sum_l l^-((2-delta)*beta)
    with c_delta = delta^delta (1-delta)^(1-delta); requires
    delta_q in (0, 2 - 1/beta) so both series converge.
    """
    if not 0.5 < beta < 1.0:
        raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
    if not 0.0 < delta_q < 2.0 - 1.0 / beta:
        raise ValueError(
            f"delta_q must lie in (0, 2 - 1/beta) = (0, {2.0 - 1.0 / beta:g}), "
            f"got {delta_q}")
    c_delta = delta_q**delta_q * (1.0 - delta_q) ** (1.0 - delta_q)
    first = (0.5 * power_sum(0.5 + beta, scale=scale)) ** 2
    second = (c_delta**beta * power_sum(1.0 + delta_q * beta, scale=scale)
              * power_sum((2.0 - delta_q) * beta, scale=scale))
    return first + second


def default_delta_q(beta: float) -> float:
    """Midpoint of the admissible interval (0, 2 - 1/beta)."""
    return 0.5 * (2.0 - 1.0 / beta)


def assemble(pair: WaveletPair, model: SpectralModel, T: float = 1.0,
             alpha: float = 1.0, beta: float = 0.75,
             delta_q: Optional[float] = None, *, scale: int = 1,
             literal_b: bool = False) -> BoundConstants:
    """Compute the full ledger culminating in A, B, C and sigma_c.

    ``literal_b`` switches the scaling-side rate constant B to the variant
    that mixes in A1_psi * B1_psi^2 (kept only for comparison; the default
    uses scaling-side quantities throughout).
    """
    if delta_q is None:
        delta_q = default_delta_q(beta)
    w = compute_wavelet_integrals(pair, alpha, beta, scale=scale)
    s = compute_spectral_constants(pair, model, T, scale=scale)
    c_alpha = compute_c_alpha(T, alpha)
    q1_series = compute_Q1(beta, delta_q, scale=scale)

    ln5a = np.log(5.0) ** alpha
    c0, c1, c2, c3 = w["c0"], w["c1"], w["c2"], w["c3"]
    f0, f1, f2, f3 = w["cphi0"], w["cphi1"], w["cphi2"], w["cphi3"]
    a_psi, a1_psi = s["A_psi"], s["A1_psi"]
    a_phi, a1_phi = s["A_phi"], s["A1_phi"]
    b1_psi, b1_phi = s["B1_psi"], s["B1_phi"]

    def increment_constant(c_prime, i0, i1, i2, i3):
        return (2.0 ** (3.0 + alpha - beta) * np.pi**beta * c_prime**beta
                * (ln5a * i0 + i1)
                + np.pi * T * 2.0 ** (alpha - 1.0) * (ln5a * i2 + i3)
                + c_alpha * i2) / np.pi

    k_psi = increment_constant(pair.c_psi_prime, c0, c1, c2, c3)
    k_phi = increment_constant(pair.c_phi_prime, f0, f1, f2, f3)

    z_1pb = power_sum(1.0 + beta, scale=scale)
    z_2b = power_sum(2.0 * beta, scale=scale)
    z_32 = power_sum(1.5, scale=scale)
    z_2 = power_sum(2.0, scale=scale)
    series_ja = damped_power_sum(alpha, 2.0**-0.5, scale=scale)

    q = 2.0**alpha * a_psi * k_psi * (ln5a * c2 + c3) / np.pi * z_1pb
    q1 = 0.5 * a1_psi * k_psi**2 * z_2b
    q2 = 2.0 ** (2.0 * alpha) * a1_psi / np.pi**2 * (ln5a * c2 + c3) ** 2
    q_phi1 = 0.5 * a1_phi * k_phi**2 * z_2b

    b0 = np.sqrt(q1 + a_psi * q1_series * k_psi**2) * series_ja
    b1 = np.sqrt(q + q1 + q2 + a_psi * q1_series * k_psi**2) * series_ja
    b2 = np.sqrt(q_phi1 + a_phi * k_phi**2 * q1_series)

    a_rate = b1_psi * np.sqrt(6.0 * a_psi * z_32 + 4.0 * a1_psi)
    if literal_b:
        b_rate = np.sqrt(6.0 * a_phi * b1_phi**2 * z_32 + 4.0 * a1_psi * b1_psi**2)
    else:
        b_rate = b1_phi * np.sqrt(6.0 * a_phi * z_32 + 4.0 * a1_phi)
    c_rate = (2.0 + np.sqrt(2.0)) * np.sqrt(
        3.0 * a_psi * b1_psi**2 * z_32**2
        + (a1_psi * b1_psi**2 + c2 * a_psi * b1_psi / np.pi) * z_2
        + c2**2 * a1_psi / (32.0 * np.pi**2)
    )

    return BoundConstants(
        alpha=alpha, beta=beta, delta_q=delta_q, T=T,
        c0=c0, c1=c1, c2=c2, c3=c3,
        cphi0=f0, cphi1=f1, cphi2=f2, cphi3=f3,
        c_alpha=c_alpha,
        A_psi=a_psi, A1_psi=a1_psi, A_phi=a_phi, A1_phi=a1_phi,
        B1_psi=b1_psi, B1_phi=b1_phi,
        K=k_psi, K_phi=k_phi, Q1=q1_series,
        q=q, q1=q1, q2=q2, q_phi1=q_phi1,
        B0=b0, B1=b1, B2=b2, sigma_c=b0 + b1 + b2,
        A=a_rate, B=b_rate, C=c_rate,
    )
