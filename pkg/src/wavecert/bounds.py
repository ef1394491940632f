"""Certified tail bound and truncation planning.

The approximation residual has intrinsic modulus sigma(h) = c / ln(e^alpha +
1/h)^alpha with c = B0 + B1 + B2 from the ledger.  The entropy functional

    I(eps0) = 2^{-1/2} int_0^gamma sqrt(ln(T / (2 sigma_inv(eps)) + 1)) d eps,
    gamma = min(eps0, sigma(T/2)),

is dominated by the closed form delta(eps0), and the uniform deviation
satisfies  P(sup |X - X_plan| > u) <= 2 exp(-(u - sqrt(8 u delta))^2 /
(2 eps^2)) for u > 8 delta, with eps the certified truncation error of the
plan.  ``select_plan`` inverts this: given (u, p) it finds the largest
admissible eps and allocates truncation indices with near-minimal term count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import quad

from .constants import BoundConstants
from .errors import InfeasiblePlanError


@dataclass(frozen=True)
class ExpansionPlan:
    """Truncation parameters (n, k0', k_0..k_{n-1}) of the expansion."""

    n: int
    k0p: int
    kj: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one detail level")
        if self.k0p < 1:
            raise ValueError("scaling truncation k0' must be >= 1")
        kj = tuple(int(k) for k in self.kj)
        object.__setattr__(self, "kj", kj)
        if len(kj) != self.n:
            raise ValueError(f"expected {self.n} detail truncations, got {len(kj)}")
        if any(k < 1 for k in kj):
            raise ValueError("detail truncations must be >= 1")

    @property
    def total_terms(self) -> int:
        """Number of expansion terms: shifts |k| <= k0p resp. k_j per level."""
        return (2 * self.k0p + 1) + sum(2 * k + 1 for k in self.kj)

    def to_dict(self) -> dict:
        return {"n": self.n, "k0p": self.k0p, "kj": list(self.kj)}

    @classmethod
    def from_dict(cls, d: dict) -> "ExpansionPlan":
        return cls(n=int(d["n"]), k0p=int(d["k0p"]), kj=tuple(int(k) for k in d["kj"]))


class TailProbability(NamedTuple):
    value: float
    vacuous: bool


@dataclass(frozen=True)
class TailBound:
    """Evaluated certificate for one truncation error level."""

    epsilon: float
    delta_eps: float
    u_min: float  # = 8 * delta_eps; below this the bound is vacuous
    bound_fn: Callable[[float], TailProbability]

    def probability(self, u: float) -> TailProbability:
        return self.bound_fn(u)

    def to_dict(self, u_values=()) -> dict:
        d = {
            "epsilon": float(self.epsilon),
            "delta_eps": float(self.delta_eps),
            "u_min": float(self.u_min),
        }
        if len(u_values):
            d["curve"] = [
                {"u": float(u), "probability": self.bound_fn(float(u)).value,
                 "vacuous": self.bound_fn(float(u)).vacuous}
                for u in u_values
            ]
        return d


def sigma(eps: float, c: float, alpha: float) -> float:
    """Logarithmic modulus c / (ln(e^alpha + 1/eps))^alpha."""
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    return c / math.log(math.exp(alpha) + 1.0 / eps) ** alpha


def sigma_inv(t: float, c: float, alpha: float) -> float:
    """Inverse modulus: 1 / (exp((c/t)^(1/alpha)) - e^alpha).

    Defined for 0 < t < c / alpha^alpha; values within 1e-12 of the upper
    boundary are rejected (the pole).
    """
    hi = c / alpha**alpha
    if not 0.0 < t < hi * (1.0 - 1e-12):
        raise ValueError(f"t must lie in (0, {hi:g}) away from the pole, got {t}")
    return 1.0 / (math.exp((c / t) ** (1.0 / alpha)) - math.exp(alpha))


def delta(eps0: float, c: float, alpha: float, T: float) -> float:
    """Closed-form dominator of the entropy integral.

    gamma = min(eps0, sigma(T/2));
    delta = (gamma/sqrt2) (sqrt(ln(T+1)) + (1 - 1/(2 alpha))^{-1} (c/gamma)^{1/(2 alpha)}).
    """
    if not (eps0 > 0.0 and c > 0.0 and T > 0.0 and alpha > 0.5):
        raise ValueError("need eps0, c, T > 0 and alpha > 1/2")
    g = min(eps0, sigma(0.5 * T, c, alpha))
    return (g / math.sqrt(2.0)) * (
        math.sqrt(math.log(T + 1.0))
        + (c / g) ** (0.5 / alpha) / (1.0 - 0.5 / alpha)
    )


def _log_covering(eps: float, c: float, alpha: float, T: float) -> float:
    """ln(T / (2 sigma_inv(eps)) + 1), stable for tiny eps."""
    x = (c / eps) ** (1.0 / alpha)
    if x < 30.0:
        return math.log(0.5 * T * (math.exp(x) - math.exp(alpha)) + 1.0)
    # (T/2)(e^x - e^a) + 1 = (T/2) e^x (1 - e^(a-x) + (2/T) e^(-x))
    return math.log(0.5 * T) + x + math.log1p(-math.exp(alpha - x)
                                              + (2.0 / T) * math.exp(-x))


def entropy_integral(eps0: float, c: float, alpha: float, T: float) -> float:
    """Numerical entropy functional I(eps0) (for verifying its dominator).

    The integrable endpoint singularity eps^(-1/(2 alpha)) is removed by the
    substitution eps = gamma * w^(2 alpha / (2 alpha - 1)) before adaptive
    quadrature.
    """
    if not (eps0 > 0.0 and c > 0.0 and T > 0.0 and alpha > 0.5):
        raise ValueError("need eps0, c, T > 0 and alpha > 1/2")
    g = min(eps0, sigma(0.5 * T, c, alpha))
    p = 2.0 * alpha / (2.0 * alpha - 1.0)

    def integrand(w: float) -> float:
        if w <= 0.0:
            return 0.0
        eps = g * w**p
        return math.sqrt(_log_covering(eps, c, alpha, T)) * g * p * w ** (p - 1.0)

    val, _err = quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val / math.sqrt(2.0)


def epsilon_plan(plan: ExpansionPlan, consts: BoundConstants) -> float:
    """Certified mean-square truncation error of a plan."""
    detail = sum(
        consts.A / (2.0 ** (0.5 * j) * math.sqrt(k)) for j, k in enumerate(plan.kj)
    )
    return detail + consts.B / math.sqrt(plan.k0p) + consts.C / 2.0 ** (0.5 * plan.n)


def tail_bound(u: float, eps: float, delta_eps: float) -> TailProbability:
    """Certified exceedance probability for threshold u.

    Returns 2 exp(-(u - sqrt(8 u delta))^2 / (2 eps^2)) clamped to <= 1 for
    u > 8 delta; at or below 8 delta the bound carries no information and is
    returned as probability 1 with the vacuous flag set.
    """
    if not u > 0.0:
        raise ValueError("u must be positive")
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if delta_eps < 0.0:
        raise ValueError("delta_eps must be nonnegative")
    if u <= 8.0 * delta_eps:
        return TailProbability(1.0, True)
    gap = u - math.sqrt(8.0 * u * delta_eps)
    raw = 2.0 * math.exp(-(gap * gap) / (2.0 * eps * eps))
    return TailProbability(min(raw, 1.0), False)


def tail_bound_for(eps: float, consts: BoundConstants) -> TailBound:
    """TailBound certificate at truncation error eps under the ledger."""
    d = delta(eps, consts.sigma_c, consts.alpha, consts.T)
    return TailBound(
        epsilon=eps, delta_eps=d, u_min=8.0 * d,
        bound_fn=lambda u: tail_bound(u, eps, d),
    )


# ---------------------------------------------------------------------------
# inverse problem: pick a plan meeting (u, p_target)
# ---------------------------------------------------------------------------

def _feasible_eps(u: float, p_target: float, consts: BoundConstants, T: float,
                  eps: float) -> bool:
    d = delta(eps, consts.sigma_c, consts.alpha, T)
    if u <= 8.0 * d:
        return False
    return tail_bound(u, eps, d).value <= p_target


def _largest_feasible_eps(u: float, p_target: float, consts: BoundConstants,
                          T: float) -> float:
    lo = None
    guess = u / 8.0
    for _ in range(1200):
        if _feasible_eps(u, p_target, consts, T, guess):
            lo = guess
            break
        guess *= 0.5
        if guess < 1e-280:
            break
    if lo is None:
        raise InfeasiblePlanError(
            f"no positive truncation error satisfies u={u:g}, p={p_target:g} "
            "under these constants")
    hi = lo
    for _ in range(1200):
        hi *= 2.0
        if not _feasible_eps(u, p_target, consts, T, hi):
            break
    else:
        raise InfeasiblePlanError("could not bracket the feasibility boundary")
    # the bound must be monotone in eps on the bracket for bisection to apply
    probes = np.geomspace(lo, hi, 64)
    flags = [_feasible_eps(u, p_target, consts, T, float(e)) for e in probes]
    if any(a and not b for a, b in zip(flags[1:], flags[:-1])):
        raise RuntimeError("tail bound is not monotone in eps on the bracket")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if _feasible_eps(u, p_target, consts, T, mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * lo:
            break
    return lo


def _geom_partial(n: int, ratio_log2: float) -> float:
    return sum(2.0 ** (-ratio_log2 * i) for i in range(n))


def _continuous_plan(consts: BoundConstants, eps_star: float, n: int
                     ) -> Optional[ExpansionPlan]:
    """Lagrange-optimal allocation at fixed n: k_j ~ 2^{-j/3}, split of the
    remaining budget between detail and scaling sides by marginal count."""
    eps_c = consts.C / 2.0 ** (0.5 * n)
    rem = eps_star - eps_c
    if rem <= 0.0:
        return None
    c0 = _geom_partial(n, 1.0 / 3.0)
    a_n = consts.A * c0**1.5
    wa = a_n ** (2.0 / 3.0)
    wb = consts.B ** (2.0 / 3.0)
    eps_a = rem * wa / (wa + wb)
    eps_b = rem - eps_a
    kappa = (consts.A * c0 / eps_a) ** 2
    kj = tuple(max(1, math.ceil(kappa * 2.0 ** (-j / 3.0))) for j in range(n))
    k0p = max(1, math.ceil((consts.B / eps_b) ** 2))
    return ExpansionPlan(n=n, k0p=k0p, kj=kj)


def _trim(plan: ExpansionPlan, consts: BoundConstants, eps_star: float
          ) -> ExpansionPlan:
    """Greedy decrement of each truncation index while the budget holds."""
    k0p, kj = plan.k0p, list(plan.kj)
    changed = True
    while changed:
        changed = False
        if k0p > 1:
            trial = ExpansionPlan(plan.n, k0p - 1, tuple(kj))
            if epsilon_plan(trial, consts) <= eps_star:
                k0p -= 1
                changed = True
        for j in range(plan.n):
            if kj[j] > 1:
                kj[j] -= 1
                trial = ExpansionPlan(plan.n, k0p, tuple(kj))
                if epsilon_plan(trial, consts) <= eps_star:
                    changed = True
                else:
                    kj[j] += 1
    return ExpansionPlan(plan.n, k0p, tuple(kj))


def _box_search(consts: BoundConstants, eps_star: float, kmax: int = 36,
                nmax: int = 3) -> Optional[ExpansionPlan]:
    """Exact minimal-count plan with n <= nmax and all indices <= kmax.

    For each detail combination the optimal scaling index follows from the
    leftover budget, so the search is exact over the box.
    """
    best = None
    best_count = np.inf
    ks = np.arange(1, kmax + 1, dtype=float)
    for n in range(1, nmax + 1):
        budget = eps_star - consts.C / 2.0 ** (0.5 * n)
        if budget <= 0.0:
            continue
        level_terms = [consts.A / (2.0 ** (0.5 * j) * np.sqrt(ks)) for j in range(n)]
        detail_eps = level_terms[0]
        for lt in level_terms[1:]:
            detail_eps = detail_eps[..., None] + lt
        detail_count = 2.0 * ks + 1.0
        counts = detail_count
        for _ in range(n - 1):
            counts = counts[..., None] + detail_count
        rem = budget - detail_eps
        ok = rem > consts.B / math.sqrt(kmax)
        if not np.any(ok):
            continue
        k0p_need = np.where(ok, np.ceil((consts.B / np.where(ok, rem, 1.0)) ** 2), np.inf)
        k0p_need = np.maximum(k0p_need, 1.0)
        ok &= k0p_need <= kmax
        total = np.where(ok, counts + 2.0 * k0p_need + 1.0, np.inf)
        i = np.unravel_index(int(np.argmin(total)), total.shape)
        if total[i] < best_count:
            best_count = float(total[i])
            kj = tuple(int(ks[idx]) for idx in i)
            best = ExpansionPlan(n=n, k0p=int(k0p_need[i]), kj=kj)
    return best


def select_plan(u: float, p_target: float, consts: BoundConstants,
                T: Optional[float] = None) -> ExpansionPlan:
    """Smallest-term-count plan whose certificate meets (u, p_target).

    Bisects for the largest admissible truncation error eps* (the bound is
    verified to be monotone in eps first), then allocates indices: budget
    split across the three error terms seeded at equal thirds and optimised
    by marginal cost, Lagrange allocation k_j ~ 2^{-j/3} within the detail
    side, greedy trimming, and an exact small-box search so that no compact
    competitor plan beats the returned count.  The returned plan always
    satisfies epsilon_plan(plan) <= eps* (post-hoc checked).
    """
    if not 0.0 < p_target < 1.0:
        raise ValueError("p_target must lie in (0, 1)")
    if not u > 0.0:
        raise ValueError("u must be positive")
    T = consts.T if T is None else T
    eps_star = _largest_feasible_eps(u, p_target, consts, T)

    candidates = []
    for n in range(1, 65):
        cand = _continuous_plan(consts, eps_star, n)
        if cand is None:
            continue
        if epsilon_plan(cand, consts) <= eps_star:
            candidates.append(_trim(cand, consts, eps_star))
    box = _box_search(consts, eps_star)
    if box is not None:
        candidates.append(box)
    if not candidates:
        raise InfeasiblePlanError(
            f"feasible eps* = {eps_star:g} admits no plan with n <= 64")
    plan = min(candidates, key=lambda pl: (pl.total_terms, pl.n, pl.k0p, pl.kj))

    eps_plan = epsilon_plan(plan, consts)
    d = delta(eps_plan, consts.sigma_c, consts.alpha, T)
    if eps_plan > eps_star * (1.0 + 1e-9) or u <= 8.0 * d or (
            tail_bound(u, eps_plan, d).value > p_target):
        raise RuntimeError("planner postcondition failed; this is a bug")
    return plan
