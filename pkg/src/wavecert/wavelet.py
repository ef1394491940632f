"""Meyer wavelet pair in the Fourier domain.

The scaling symbol is built from the degree-7 taper

    nu(x) = x^4 (35 - 84 x + 70 x^2 - 20 x^3),    nu(x) + nu(1-x) = 1,

giving ``phi_hat(y) = 1`` on |y| <= 2pi/3, ``cos(pi/2 nu(3|y|/2pi - 1))`` on
the taper band 2pi/3 <= |y| <= 4pi/3 and exactly 0 beyond.  The mother symbol
follows from the two-scale relation phi_hat(y) = m0(y/2) phi_hat(y/2) with
m0 the 2pi-periodisation of phi_hat(2*), which collapses to

    psi_hat(y) = exp(-i y / 2) * b(y),
    b(y) = phi_hat(y/2) * (phi_hat(y - 2pi) + phi_hat(y + 2pi)),

so |psi_hat| is supported on the band 2pi/3 <= |y| <= 8pi/3.  All derivatives
are analytic piecewise expressions (the taper join is C^3, enough for the
second derivative of psi_hat required by the admissibility conditions).

Time-domain basis functions phi_jk, psi_jk are recovered by quadrature of
the inverse transform over those compact bands; the convention throughout is
forward ``ghat(y) = int exp(-i y x) g(x) dx`` and inverse with the 1/2pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .quadrature import complex_fourier, cosine_transform, integrate, panel_nodes

TWO_THIRDS_PI = 2.0 * np.pi / 3.0
FOUR_THIRDS_PI = 4.0 * np.pi / 3.0
EIGHT_THIRDS_PI = 8.0 * np.pi / 3.0


def nu(x: np.ndarray) -> np.ndarray:
    """Meyer taper polynomial on [0, 1], C^3 at both ends."""
    x = np.asarray(x, dtype=float)
    return x**4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))


def nu_d1(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 140.0 * x**3 * (1.0 - x) ** 3


def nu_d2(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 420.0 * x**2 * (1.0 - x) ** 2 * (1.0 - 2.0 * x)


def _taper_s(ay: np.ndarray) -> np.ndarray:
    return 3.0 * ay / (2.0 * np.pi) - 1.0


def meyer_phi_hat(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    ay = np.abs(y)
    out = np.zeros_like(ay)
    out[ay <= TWO_THIRDS_PI] = 1.0
    taper = (ay > TWO_THIRDS_PI) & (ay < FOUR_THIRDS_PI)
    out[taper] = np.cos(0.5 * np.pi * nu(_taper_s(ay[taper])))
    return out


def meyer_phi_hat_d1(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    ay = np.abs(y)
    out = np.zeros_like(ay)
    taper = (ay > TWO_THIRDS_PI) & (ay < FOUR_THIRDS_PI)
    s = _taper_s(ay[taper])
    out[taper] = -0.75 * np.sin(0.5 * np.pi * nu(s)) * nu_d1(s) * np.sign(y[taper])
    return out


def meyer_phi_hat_d2(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    ay = np.abs(y)
    out = np.zeros_like(ay)
    taper = (ay > TWO_THIRDS_PI) & (ay < FOUR_THIRDS_PI)
    s = _taper_s(ay[taper])
    g = 0.5 * np.pi * nu(s)
    out[taper] = -(9.0 / (8.0 * np.pi)) * (
        0.5 * np.pi * np.cos(g) * nu_d1(s) ** 2 + np.sin(g) * nu_d2(s)
    )
    return out


def meyer_psi_profile(y) -> np.ndarray:
    """Real even profile b with psi_hat(y) = exp(-i y/2) b(y)."""
    y = np.asarray(y, dtype=float)
    return meyer_phi_hat(0.5 * y) * (
        meyer_phi_hat(y - 2.0 * np.pi) + meyer_phi_hat(y + 2.0 * np.pi)
    )


def meyer_psi_profile_d1(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    u = meyer_phi_hat(0.5 * y)
    v = meyer_phi_hat(y - 2.0 * np.pi) + meyer_phi_hat(y + 2.0 * np.pi)
    du = 0.5 * meyer_phi_hat_d1(0.5 * y)
    dv = meyer_phi_hat_d1(y - 2.0 * np.pi) + meyer_phi_hat_d1(y + 2.0 * np.pi)
    return du * v + u * dv


def meyer_psi_profile_d2(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    u = meyer_phi_hat(0.5 * y)
    v = meyer_phi_hat(y - 2.0 * np.pi) + meyer_phi_hat(y + 2.0 * np.pi)
    du = 0.5 * meyer_phi_hat_d1(0.5 * y)
    dv = meyer_phi_hat_d1(y - 2.0 * np.pi) + meyer_phi_hat_d1(y + 2.0 * np.pi)
    d2u = 0.25 * meyer_phi_hat_d2(0.5 * y)
    d2v = meyer_phi_hat_d2(y - 2.0 * np.pi) + meyer_phi_hat_d2(y + 2.0 * np.pi)
    return d2u * v + 2.0 * du * dv + u * d2v


def meyer_psi_hat(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return np.exp(-0.5j * y) * meyer_psi_profile(y)


def meyer_psi_hat_d1(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return np.exp(-0.5j * y) * (meyer_psi_profile_d1(y) - 0.5j * meyer_psi_profile(y))


def meyer_psi_hat_d2(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    b = meyer_psi_profile(y)
    return np.exp(-0.5j * y) * (
        meyer_psi_profile_d2(y) - 1.0j * meyer_psi_profile_d1(y) - 0.25 * b
    )


@dataclass(frozen=True)
class WaveletPair:
    """Fourier-domain scaling/mother pair with derivatives and sup-constants.

    ``support_phi`` and ``support_psi`` are bands in |y| outside which the
    evaluators return exactly zero.  ``psi_profile`` is the real even modulus
    profile and ``psi_phase`` the linear phase slope, i.e.
    ``psi_hat(y) = exp(-i * psi_phase * y) * psi_profile(y)``; the fast block
    quadratures rely on this factorisation.
    """

    phi_hat: Callable
    psi_hat: Callable
    phi_hat_d1: Callable
    psi_hat_d1: Callable
    psi_hat_d2: Callable
    support_phi: tuple[float, float]
    support_psi: tuple[float, float]
    c_phi: float
    c_phi_prime: float
    c_psi_prime: float
    c_psi_dprime: float
    phi_profile: Callable = field(repr=False, default=None)
    psi_profile: Callable = field(repr=False, default=None)
    psi_phase: float = 0.5
    phi_breaks: tuple[float, ...] = ()
    psi_breaks: tuple[float, ...] = ()
    label: str = "meyer"

    def __hash__(self):  # frozen dataclass with callables: identity-based
        return hash((self.label, id(self.phi_hat), id(self.psi_hat)))


@dataclass(frozen=True)
class ConditionEntry:
    name: str
    satisfied: bool
    value: float
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "satisfied": bool(self.satisfied),
            "value": float(self.value),
            "tolerance": float(self.tolerance),
        }


@dataclass(frozen=True)
class ConditionReport:
    """Per-condition verdicts, each carrying the number that justified it."""

    entries: tuple[ConditionEntry, ...]

    @property
    def all_satisfied(self) -> bool:
        return all(e.satisfied for e in self.entries)

    def entry(self, name: str) -> ConditionEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "all_satisfied": self.all_satisfied,
            "entries": [e.to_dict() for e in self.entries],
        }


def _polished_sup(f, lo: float, hi: float, n_grid: int) -> float:
    """Grid sup of |f| on [lo, hi], polished by bounded scalar maximisation.

    The returned value is inflated by 1e-9 relatively so it dominates |f| at
    any sample point despite the finite termination of the polish step.
    """
    y = np.linspace(lo, hi, n_grid)
    vals = np.abs(f(y))
    i = int(np.argmax(vals))
    best = float(vals[i])
    a = y[max(i - 1, 0)]
    b = y[min(i + 1, n_grid - 1)]
    if b > a:
        res = minimize_scalar(
            lambda t: -float(np.abs(f(np.asarray([t]))[0])),
            bounds=(a, b),
            method="bounded",
            options={"xatol": 1e-13},
        )
        best = max(best, float(-res.fun))
    return best * (1.0 + 1e-9)


@lru_cache(maxsize=8)
def make_meyer(grid_points: int = 4096) -> WaveletPair:
    """Construct the Meyer pair with certified sup-constants.

    The sup-norms of |phi_hat|, |phi_hat'|, |psi_hat'| and |psi_hat''| are
    computed as polished grid suprema over the compact supports;
    ``grid_points`` controls the starting grid (doubling it must not move any
    constant by more than ~1e-9, which the stability tests exercise).
    """
    c_phi = _polished_sup(meyer_phi_hat, 0.0, FOUR_THIRDS_PI, grid_points)
    c_phi_prime = _polished_sup(meyer_phi_hat_d1, TWO_THIRDS_PI, FOUR_THIRDS_PI, grid_points)
    c_psi_prime = _polished_sup(
        lambda y: np.abs(meyer_psi_hat_d1(y)), TWO_THIRDS_PI, EIGHT_THIRDS_PI, grid_points
    )
    c_psi_dprime = _polished_sup(
        lambda y: np.abs(meyer_psi_hat_d2(y)), TWO_THIRDS_PI, EIGHT_THIRDS_PI, grid_points
    )
    return WaveletPair(
        phi_hat=meyer_phi_hat,
        psi_hat=meyer_psi_hat,
        phi_hat_d1=meyer_phi_hat_d1,
        psi_hat_d1=meyer_psi_hat_d1,
        psi_hat_d2=meyer_psi_hat_d2,
        support_phi=(0.0, FOUR_THIRDS_PI),
        support_psi=(TWO_THIRDS_PI, EIGHT_THIRDS_PI),
        c_phi=c_phi,
        c_phi_prime=c_phi_prime,
        c_psi_prime=c_psi_prime,
        c_psi_dprime=c_psi_dprime,
        phi_profile=meyer_phi_hat,
        psi_profile=meyer_psi_profile,
        psi_phase=0.5,
        phi_breaks=(TWO_THIRDS_PI,),
        psi_breaks=(FOUR_THIRDS_PI,),
        label="meyer",
    )


# ---------------------------------------------------------------------------
# atoms: dilated/shifted basis functions described in the Fourier domain
# ---------------------------------------------------------------------------

def atom_band(pair: WaveletPair, kind: str, j: int) -> tuple[float, float]:
    """Support band in |y| of the level-j atom's Fourier transform."""
    if kind == "scaling":
        lo, hi = pair.support_phi
    else:
        lo, hi = pair.support_psi
    s = float(2**j)
    return lo * s, hi * s


def atom_profile(pair: WaveletPair, kind: str) -> Callable:
    return pair.phi_profile if kind == "scaling" else pair.psi_profile


def atom_center(pair: WaveletPair, kind: str, j: int, k: int) -> float:
    """Time-domain phase center: ghat_jk(y) = 2^{-j/2} m(y/2^j) e^{-i y c}."""
    off = 0.0 if kind == "scaling" else pair.psi_phase
    return (k + off) / float(2**j)


def atom_breakpoints(pair: WaveletPair, kind: str, j: int) -> tuple[float, ...]:
    """Interior joins of the level-j symbol, where smoothness drops to C^3."""
    breaks = pair.phi_breaks if kind == "scaling" else pair.psi_breaks
    s = float(2**j)
    return tuple(c * s for c in breaks)


def atom_product_matrix(pair: WaveletPair, atoms_row, atoms_col, weight=None,
                        *, scale: int = 1) -> np.ndarray:
    """Matrix of (1/2pi) int W(z) conj(ghat_a)(z) ghat_b(z) dz over atom lists.

    ``weight`` is an even nonnegative spectral weight (identically 1 when
    omitted, which yields plain L2 inner products).  Each (level, level)
    group reduces to a single cosine transform in the center differences,
    evaluated over the intersection of the two compact bands.
    """
    atoms_row = list(atoms_row)
    atoms_col = list(atoms_col)
    out = np.zeros((len(atoms_row), len(atoms_col)))

    def groups(atoms):
        g: dict[tuple[str, int], list[int]] = {}
        for i, (kind, j, _k) in enumerate(atoms):
            g.setdefault((kind, j), []).append(i)
        return g

    grow = groups(atoms_row)
    gcol = groups(atoms_col)
    for (kind1, j1), rows in grow.items():
        lo1, hi1 = atom_band(pair, kind1, j1)
        m1 = atom_profile(pair, kind1)
        for (kind2, j2), cols in gcol.items():
            lo2, hi2 = atom_band(pair, kind2, j2)
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if hi <= lo:
                continue
            m2 = atom_profile(pair, kind2)
            s1, s2 = float(2**j1), float(2**j2)

            def w(z, m1=m1, m2=m2, s1=s1, s2=s2):
                p = m1(z / s1) * m2(z / s2)
                return p if weight is None else p * weight(z)

            c1 = np.array([atom_center(pair, kind1, j1, atoms_row[i][2]) for i in rows])
            c2 = np.array([atom_center(pair, kind2, j2, atoms_col[i][2]) for i in cols])
            xi = c1[:, None] - c2[None, :]
            uniq, inv = np.unique(xi.ravel(), return_inverse=True)
            breaks = atom_breakpoints(pair, kind1, j1) + atom_breakpoints(pair, kind2, j2)
            vals = cosine_transform(w, lo, hi, uniq, breakpoints=breaks, scale=scale)
            block = vals[inv].reshape(xi.shape) / (np.pi * np.sqrt(s1 * s2))
            out[np.ix_(rows, cols)] = block
    return out


def gram_matrix(pair: WaveletPair, levels: int, shifts: int, *, scale: int = 1) -> np.ndarray:
    """L2 Gram matrix of {phi_0k} and {psi_jk, j <= levels} for |k| <= shifts.

    Desk-scale only: levels <= 3 and shifts <= 5.  Entries are evaluated in
    the Fourier domain; the result is exactly symmetric.
    """
    if levels > 3 or shifts > 5:
        raise ValueError("gram_matrix is desk-scale: levels <= 3, shifts <= 5")
    atoms = [("scaling", 0, k) for k in range(-shifts, shifts + 1)]
    for j in range(levels + 1):
        atoms += [("mother", j, k) for k in range(-shifts, shifts + 1)]
    g = atom_product_matrix(pair, atoms, atoms)
    return 0.5 * (g + g.T)


# ---------------------------------------------------------------------------
# time-domain evaluation
# ---------------------------------------------------------------------------

def _hat_intervals(pair: WaveletPair, kind: str, j: int) -> list[tuple[float, float]]:
    lo, hi = atom_band(pair, kind, j)
    if lo <= 0.0:
        return [(-hi, hi)]
    return [(-hi, -lo), (lo, hi)]


def eval_basis(pair: WaveletPair, kind: str, j: int, k: int, t: float, *,
               scale: int = 1) -> float:
    """Value of phi_0k or psi_jk at time t by inverse-transform quadrature.

    Computes (1/2pi) int exp(i t y) ghat_jk(y) dy over the compact support of
    ghat_jk(y) = 2^{-j/2} exp(-i k y / 2^j) ghat(y / 2^j).  The imaginary
    residue of the quadrature must stay below 1e-9 and is discarded.
    """
    if kind not in ("scaling", "mother"):
        raise ValueError(f"unknown basis kind {kind!r}")
    if j < 0:
        raise ValueError("level j must be nonnegative")
    if kind == "scaling" and j != 0:
        raise ValueError("scaling functions only enter at level 0")
    hat = pair.phi_hat if kind == "scaling" else pair.psi_hat
    sj = float(2**j)

    def ghat_jk(y):
        return np.exp(1j * (t - k / sj) * y) * hat(y / sj) / np.sqrt(sj)

    osc = abs(t - k / sj) + 1.0
    breaks = atom_breakpoints(pair, kind, j)
    breaks = breaks + tuple(-c for c in breaks)
    total = 0.0 + 0.0j
    for a, b in _hat_intervals(pair, kind, j):
        total += complex_fourier(ghat_jk, a, b, breakpoints=breaks, osc=osc, scale=scale)
    total /= 2.0 * np.pi
    if abs(total.imag) >= 1e-9:
        raise ValueError(f"imaginary quadrature residue {total.imag:.3e} too large")
    return float(total.real)


def basis_values(pair: WaveletPair, kind: str, j: int, k: int, t, *,
                 scale: int = 1) -> np.ndarray:
    """Vectorised phi_0k/psi_jk over an array of times (profile fast path).

    Uses the modulus/phase factorisation of the pair, so it matches
    :func:`eval_basis` to quadrature tolerance while amortising the node set
    across all times.
    """
    t = np.asarray(t, dtype=float)
    lo, hi = atom_band(pair, kind, j)
    m = atom_profile(pair, kind)
    sj = float(2**j)
    c = atom_center(pair, kind, j, k)
    vals = cosine_transform(lambda z: m(z / sj), lo, hi, t - c,
                            breakpoints=atom_breakpoints(pair, kind, j), scale=scale)
    return vals / (np.pi * np.sqrt(sj))


# ---------------------------------------------------------------------------
# admissibility conditions
# ---------------------------------------------------------------------------

def _time_modulus(hat_fn, intervals, x: np.ndarray, *, breakpoints=(),
                  scale: int = 1) -> np.ndarray:
    """|g(x)| for g the inverse transform of hat_fn over the given bands."""
    from .quadrature import _segment_nodes

    x = np.asarray(x, dtype=float)
    xmax = float(np.max(np.abs(x))) if x.size else 1.0
    total = np.zeros(x.shape, dtype=complex)
    for a, b in intervals:
        prev = None
        for doubling in range(10):
            z, w = _segment_nodes(a, b, breakpoints, xmax + 1.0, scale, doubling)
            hw = hat_fn(z) * w
            part = np.einsum("ij,j->i", np.exp(1j * x[:, None] * z[None, :]), hw)
            if prev is not None and np.max(np.abs(part - prev)) <= 1e-11 * max(
                1.0, float(np.max(np.abs(part)))
            ):
                break
            prev = part
        total += part
    return np.abs(total) / (2.0 * np.pi)


def _decay_envelope(hat_fn, intervals, *, breakpoints=(), scale: int = 1) -> tuple[float, bool]:
    """Fit M with |g(x)| <= M/(1+|x|)^2 on a grid and validate on a finer one."""
    x_fit = np.linspace(0.0, 40.0, 1201)
    vals = _time_modulus(hat_fn, intervals, x_fit, breakpoints=breakpoints, scale=scale)
    m = float(np.max(vals * (1.0 + x_fit) ** 2))
    x_val = np.linspace(0.0, 60.0, 1801) + 0.0007
    check = _time_modulus(hat_fn, intervals, x_val, breakpoints=breakpoints, scale=scale)
    ok = bool(np.all(check <= m / (1.0 + x_val) ** 2 * (1.0 + 1e-8) + 1e-13))
    return m, ok and np.isfinite(m)


def check_conditions(pair: WaveletPair, alpha: float, gamma: float, *,
                     scale: int = 1) -> ConditionReport:
    """Verify the wavelet-side admissibility conditions at (alpha, gamma).

    Checks, in order: vanishing of psi_hat and its derivative at the origin;
    boundedness of the sup-constants; integrability of psi_hat';
    vanishing of both symbols at infinity; finiteness of the two log-weighted
    integrals with exponent ``gamma``; and a decreasing integrable envelope
    M/(1+x)^2 dominating |phi| and |psi| on a validation grid.  Failures are
    recorded in the report, never raised.
    """
    if not alpha > 0.5:
        raise ValueError("alpha must exceed 1/2")
    if not 0.0 < gamma < 0.5:
        raise ValueError("gamma must lie in (0, 1/2)")
    entries = []
    psi0 = complex(np.asarray(pair.psi_hat(np.array([0.0])))[0])
    dpsi0 = complex(np.asarray(pair.psi_hat_d1(np.array([0.0])))[0])
    entries.append(ConditionEntry("psi_hat_zero_at_origin", abs(psi0) == 0.0,
                                  abs(psi0), 0.0))
    entries.append(ConditionEntry("psi_hat_derivative_zero_at_origin",
                                  abs(dpsi0) == 0.0, abs(dpsi0), 0.0))

    for name, val in (
        ("sup_phi_hat", pair.c_phi),
        ("sup_phi_hat_derivative", pair.c_phi_prime),
        ("sup_psi_hat_second_derivative", pair.c_psi_dprime),
    ):
        entries.append(ConditionEntry(name, bool(np.isfinite(val)) and val >= 0.0,
                                      float(val), np.inf))

    psi_lo, psi_hi = pair.support_psi
    phi_lo, phi_hi = pair.support_phi
    psi_breaks = pair.psi_breaks + tuple(-c for c in pair.psi_breaks)
    int_dpsi = sum(
        integrate(lambda y: np.abs(pair.psi_hat_d1(y)), a, b,
                  breakpoints=psi_breaks, scale=scale)
        for (a, b) in ((-psi_hi, -psi_lo), (psi_lo, psi_hi))
    )
    entries.append(ConditionEntry("psi_hat_derivative_integrable",
                                  bool(np.isfinite(int_dpsi)), int_dpsi, np.inf))

    y_far = np.linspace(1.0, 50.0, 777)
    tail = max(
        float(np.max(np.abs(pair.phi_hat(phi_hi + y_far)))),
        float(np.max(np.abs(pair.psi_hat(psi_hi + y_far)))),
    )
    entries.append(ConditionEntry("hats_vanish_at_infinity", tail == 0.0, tail, 0.0))

    log_psi = 2.0 * integrate(
        lambda y: np.log1p(np.abs(y)) ** alpha * np.abs(pair.psi_hat(y)) ** gamma,
        psi_lo, psi_hi, breakpoints=pair.psi_breaks, scale=scale,
    )
    log_phi = 2.0 * integrate(
        lambda y: np.log1p(np.abs(y)) ** alpha * np.abs(pair.phi_hat(y)) ** gamma,
        0.0, phi_hi, breakpoints=pair.phi_breaks, scale=scale,
    )
    entries.append(ConditionEntry("log_moment_psi", bool(np.isfinite(log_psi)),
                                  log_psi, np.inf))
    entries.append(ConditionEntry("log_moment_phi", bool(np.isfinite(log_phi)),
                                  log_phi, np.inf))

    phi_breaks = pair.phi_breaks + tuple(-c for c in pair.phi_breaks)
    m_phi, ok_phi = _decay_envelope(pair.phi_hat, [(-phi_hi, phi_hi)],
                                    breakpoints=phi_breaks, scale=scale)
    m_psi, ok_psi = _decay_envelope(
        pair.psi_hat, [(-psi_hi, -psi_lo), (psi_lo, psi_hi)],
        breakpoints=psi_breaks, scale=scale,
    )
    entries.append(ConditionEntry("decay_envelope_phi", ok_phi, m_phi, 1e-8))
    entries.append(ConditionEntry("decay_envelope_psi", ok_psi, m_psi, 1e-8))
    return ConditionReport(tuple(entries))
