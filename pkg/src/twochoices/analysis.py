"""Exact analytics for the complete-graph counting chain.

On the complete graph (allowing an agent to sample itself) the number of
agents holding the superior opinion is an absorbing birth-death chain on
{0, ..., n} with one-step probabilities

    up(i)   = (1 - i/n) * (alpha + (1 - alpha) * (i/n)^2)
    down(i) = (i/n) * (1 - alpha) * (1 - i/n)^2

and absorption at n.  The ratio down/up of the continuum drift,

    ratio(x) = (1 - alpha) * x * (1 - x) / (alpha + (1 - alpha) * x^2),

controls everything: below the critical bias 1/9 it exceeds 1 on an interval
(x_low, x_high), and starts inside that interval take exp(Theta(n)) steps to
reach consensus.  A start fraction above the critical fraction p_c — the root
of an explicit log-integral of the ratio — restores fast consensus.

Sub-critical expectations overflow float64 spectacularly, so every sum of
positive terms here (step-count recursion, expected visit counts) is carried
in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Union

import numpy as np

from ._util import ceil_count

# Bias level separating "fast from every start" from "slow starts exist".
CRITICAL_BIAS = 1.0 / 9.0

# |1 - 8*alpha/(1-alpha)| can land a few ulps below zero when alpha is the
# closest double to 1/9; treat that as exactly zero.
_DISCRIMINANT_EPS = 1e-14

_LOG10 = math.log(10.0)


class ThresholdUndefinedError(ValueError):
    """Raised when a start-fraction threshold is requested for a bias that has none."""


class Regime(str, Enum):
    FAST_ANY_P = "FastAnyP"
    FAST_ABOVE_THRESHOLD = "FastAboveThreshold"
    SLOW_BELOW_THRESHOLD = "SlowBelowThreshold"
    UNCLASSIFIED = "Unclassified"


def _check_alpha(alpha: float, *, allow_one: bool = True) -> None:
    hi_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (0.0 < alpha and hi_ok):
        top = "1" if allow_one else "1 (exclusive)"
        raise ValueError(f"bias must lie in (0, {top}], got alpha={alpha}")


@dataclass(frozen=True)
class BirthDeathKernel:
    """One-step transition probabilities of the counting chain."""

    n: int
    alpha: float
    up: np.ndarray  # shape (n+1,), up[i] = P(i -> i+1)
    down: np.ndarray  # down[i] = P(i -> i-1)
    stay: np.ndarray  # stay[i] = 1 - up[i] - down[i]


def transition_kernel(n: int, alpha: float) -> BirthDeathKernel:
    """Birth-death kernel of the counting chain on {0, ..., n}."""
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    _check_alpha(alpha)
    x = np.arange(n + 1, dtype=np.float64) / n
    up = (1.0 - x) * (alpha + (1.0 - alpha) * x * x)
    down = x * (1.0 - alpha) * (1.0 - x) ** 2
    stay = 1.0 - up - down
    return BirthDeathKernel(n=n, alpha=alpha, up=up, down=down, stay=stay)


def drift_ratio(x, alpha: float):
    """down/up ratio of the continuum drift at occupied fraction x.

    Accepts scalars or arrays; zero at both endpoints, and identically zero
    for alpha = 1.
    """
    _check_alpha(alpha)
    x = np.asarray(x, dtype=np.float64)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ValueError("fraction x must lie in [0, 1]")
    out = (1.0 - alpha) * x * (1.0 - x) / (alpha + (1.0 - alpha) * x * x)
    return float(out) if out.ndim == 0 else out


class DriftExtrema(NamedTuple):
    """Peak of the drift ratio and, when it exceeds 1, its unit crossings."""

    x_star: float  # argmax of the ratio
    r: float  # peak value; > 1 exactly when alpha < 1/9
    x_low: Optional[float]  # ratio = 1 crossings, present iff alpha <= 1/9
    x_high: Optional[float]


def drift_extrema(alpha: float) -> DriftExtrema:
    """Closed-form peak and unit crossings of the drift ratio."""
    _check_alpha(alpha, allow_one=False)
    beta = alpha / (1.0 - alpha)
    x_star = math.sqrt(beta * beta + beta) - beta
    r = drift_ratio(x_star, alpha)
    disc = 1.0 - 8.0 * beta
    if disc < -_DISCRIMINANT_EPS:
        return DriftExtrema(x_star, r, None, None)
    root = math.sqrt(max(disc, 0.0))
    return DriftExtrema(x_star, r, (1.0 - root) / 4.0, (1.0 + root) / 4.0)


def log_drift_integral(x: float, alpha: float) -> float:
    """Integral of log(drift ratio) from x_low to x, in closed form.

    Zero at x_low, increasing up to x_high, then decreasing and eventually
    negative; its unique root in (x_high, 1) is the critical start fraction.
    Defined for 0 < alpha < 1/9 and x in [x_low, 1).
    """
    if not 0.0 < alpha < CRITICAL_BIAS:
        raise ValueError(
            f"log-integral is defined only for bias in (0, 1/9), got alpha={alpha}"
        )
    x_low = drift_extrema(alpha).x_low
    if not x_low <= x < 1.0:
        raise ValueError(f"x must lie in [x_low, 1) = [{x_low}, 1), got x={x}")
    beta = alpha / (1.0 - alpha)
    s = math.sqrt(beta)  # sqrt(alpha / (1 - alpha))

    def antiderivative(t: float) -> float:
        # d/dt [ t*log((1-alpha)t / (alpha + (1-alpha)t^2)) - (1-t)*log(1-t)
        #        - 2s*atan(t/s) ] = log(ratio(t))
        core = t * math.log((1.0 - alpha) * t / (alpha + (1.0 - alpha) * t * t))
        core -= (1.0 - t) * math.log1p(-t)
        core -= 2.0 * s * math.atan(t / s)
        return core

    return antiderivative(x) - antiderivative(x_low)


def critical_fraction(alpha: float, tol: float = 1e-10) -> float:
    """Start fraction above which consensus is fast despite alpha < 1/9.

    Bisection on the log-integral over (x_high, 1); the bracket is valid
    because the integral is positive just past x_high and diverges to -inf
    at 1.
    """
    _check_alpha(alpha, allow_one=False)
    if alpha >= CRITICAL_BIAS:
        raise ThresholdUndefinedError(
            f"every start fraction is fast for alpha >= 1/9, got alpha={alpha}"
        )
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    lo = drift_extrema(alpha).x_high + 1e-9
    hi = 1.0 - 1e-12
    f_lo = log_drift_integral(lo, alpha)
    f_hi = log_drift_integral(hi, alpha)
    if not (f_lo > 0.0 > f_hi):
        raise ArithmeticError(
            f"root bracket failed for alpha={alpha}: g({lo})={f_lo}, g({hi})={f_hi}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if log_drift_integral(mid, alpha) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MeanTime:
    """Expected consensus steps, stored as a natural log to survive overflow."""

    log_value: float

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    @property
    def log10(self) -> float:
        return self.log_value / _LOG10


def _log_up_and_ratio(kern: BirthDeathKernel) -> tuple[np.ndarray, np.ndarray]:
    """log(up[i]) and log(down[i]/up[i]) for transient states i < n.

    down is 0 at i=0 (and everywhere for alpha=1); the resulting -inf terms
    drop out of the logaddexp accumulations naturally.
    """
    with np.errstate(divide="ignore"):
        log_up = np.log(kern.up[: kern.n])
        log_ratio = np.log(kern.down[: kern.n]) - log_up
    return log_up, log_ratio


def mean_consensus_time(n: int, alpha: float, p: float) -> MeanTime:
    """Exact expected steps to all-ones from ceil(p*n) initial ones.

    Standard absorbing birth-death identity: with S(k) the expected steps to
    go from k to k+1,

        S(0) = 1/up(0),   S(k) = 1/up(k) + (down(k)/up(k)) * S(k-1),

    the answer is the sum of S(k) over the start's upward path.  Both the
    recursion and the final sum run in log space.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"start fraction must lie in [0, 1), got p={p}")
    kern = transition_kernel(n, alpha)
    start = ceil_count(p, n)
    if start >= n:
        return MeanTime(-math.inf)
    log_up, log_ratio = _log_up_and_ratio(kern)
    log_s = np.empty(n, dtype=np.float64)
    log_s[0] = -log_up[0]
    for k in range(1, n):
        log_s[k] = np.logaddexp(-log_up[k], log_ratio[k] + log_s[k - 1])
    return MeanTime(float(np.logaddexp.reduce(log_s[start:])))


@dataclass(frozen=True)
class VisitProfile:
    """Expected visit counts of the counting chain, in log space.

    ``log_down_jumps[k]`` is log E[number of k -> k-1 transitions] and
    ``log_visits[k]`` is log E[number of visits to state k] before
    absorption, for a chain started at ``start``.
    """

    n: int
    alpha: float
    start: int
    log_down_jumps: np.ndarray  # shape (n+1,)
    log_visits: np.ndarray  # shape (n+1,)


def visit_profile(n: int, alpha: float, start: int) -> VisitProfile:
    """Expected down-jump and visit counts from a fixed start state.

    Downward crossings satisfy a first-step recursion in the down/up ratio
    f(k) = down(k)/up(k):

        jumps(n) = 0
        jumps(k) = f(k) * (1 + jumps(k+1))   for k >= start
        jumps(k) = f(k) * jumps(k+1)         for k < start

    and visits(k) counts the initial visit (k >= start) plus one return per
    adjacent downward crossing.
    """
    kern = transition_kernel(n, alpha)
    if not 0 <= start <= n:
        raise ValueError(f"start state must lie in [0, {n}], got {start}")
    _, log_ratio = _log_up_and_ratio(kern)
    neg_inf = -math.inf
    log_jumps = np.full(n + 1, neg_inf, dtype=np.float64)
    for k in range(n - 1, -1, -1):
        if k >= start:
            log_jumps[k] = log_ratio[k] + np.logaddexp(0.0, log_jumps[k + 1])
        else:
            log_jumps[k] = log_ratio[k] + log_jumps[k + 1]
    log_visits = np.empty(n + 1, dtype=np.float64)
    for k in range(n + 1):
        tail = log_jumps[k + 1] if k < n else neg_inf
        crossings = np.logaddexp(log_jumps[k], tail)
        if k >= start:
            log_visits[k] = np.logaddexp(0.0, crossings)
        else:
            log_visits[k] = crossings
    return VisitProfile(
        n=n, alpha=alpha, start=start, log_down_jumps=log_jumps, log_visits=log_visits
    )


def mean_time_from_visits(n: int, alpha: float, start: int) -> MeanTime:
    """Expected consensus steps assembled from the visit profile.

    Each visit to a transient state k costs a Geometric(up(k) + down(k))
    number of steps, so E[T] = sum_k visits(k) / (up(k) + down(k)).
    """
    profile = visit_profile(n, alpha, start)
    kern = transition_kernel(n, alpha)
    leave = kern.up[:n] + kern.down[:n]  # > 0 on transient states
    log_terms = profile.log_visits[:n] - np.log(leave)
    return MeanTime(float(np.logaddexp.reduce(log_terms)))


def consensus_time_lower_bound(n: int, alpha: float, p: float) -> float:
    """Universal lower bound on the expected consensus steps.

    Each agent must flip at least once, each step flips at most one agent,
    and a coupon-collector argument over the (1 - p) share still at opinion
    0 gives n * log(n - ceil(p*n) + 1) / (2 * max(alpha, 1 - alpha)).
    """
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    _check_alpha(alpha)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"start fraction must lie in [0, 1), got p={p}")
    remaining = n - ceil_count(p, n)
    return n * math.log(remaining + 1) / (2.0 * max(alpha, 1.0 - alpha))


def classify_regime(alpha: float, p: float) -> Regime:
    """Which consensus-time regime a (bias, start fraction) pair falls in.

    Float comparison against the critical bias is exact: the boundary value
    itself is reported UNCLASSIFIED rather than silently assigned a side.
    """
    _check_alpha(alpha)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"start fraction must lie in [0, 1), got p={p}")
    if alpha == CRITICAL_BIAS:
        return Regime.UNCLASSIFIED
    if alpha > CRITICAL_BIAS:
        return Regime.FAST_ANY_P
    if p >= critical_fraction(alpha):
        return Regime.FAST_ABOVE_THRESHOLD
    return Regime.SLOW_BELOW_THRESHOLD


@dataclass(frozen=True)
class ThresholdReport:
    """Threshold landscape for one bias level (field names match the CLI JSON)."""

    alpha: float
    x_star: float
    r: float
    x_low: Optional[float]
    x_high: Optional[float]
    p_c: Optional[float]
    regime: Optional[Regime]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "x_star": self.x_star,
            "r": self.r,
            "x_low": self.x_low,
            "x_high": self.x_high,
            "p_c": self.p_c,
            "regime": self.regime.value if self.regime is not None else None,
        }


def threshold_report(
    alpha: float, tol: float = 1e-10, p: Optional[float] = None
) -> ThresholdReport:
    """Drift extrema, critical fraction, and (given p) the regime label."""
    ext = drift_extrema(alpha)
    p_c = critical_fraction(alpha, tol) if alpha < CRITICAL_BIAS else None
    regime: Optional[Regime]
    if p is not None:
        regime = classify_regime(alpha, p)
    elif alpha > CRITICAL_BIAS:
        regime = Regime.FAST_ANY_P
    elif alpha == CRITICAL_BIAS:
        regime = Regime.UNCLASSIFIED
    else:
        regime = None  # below-threshold side depends on p
    return ThresholdReport(
        alpha=alpha,
        x_star=ext.x_star,
        r=ext.r,
        x_low=ext.x_low,
        x_high=ext.x_high,
        p_c=p_c,
        regime=regime,
    )
