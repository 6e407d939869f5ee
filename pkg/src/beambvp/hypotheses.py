"""Growth-limit estimates and existence-criterion certificates.

The two existence criteria for the beam problem hinge on the limits

    f0   = lim of f(u)/u as u -> 0+,
    finf = lim of f(u)/u as u -> infinity.

``certify_f0_zero`` handles the small-amplitude criterion (f0 = 0): it
fixes the largest admissible slope epsilon = 1 - alpha and finds the
largest radius rho1 such that f(u) <= epsilon * u on (0, rho1].
``certify_finf_zero`` handles the large-amplitude criterion (finf = 0):
either f is bounded by some L (Case 1), or there are eta = 1 - alpha,
rho2, sigma with f(u) <= eta * u beyond rho2 and f(u) <= eta * sigma
below it (Case 2); the enclosing radius is rho_hat2 = max(sigma, rho2).

Limits can only be probed on finite schedules, so every estimate carries
its raw (u, f(u)/u) samples for audit; a function that misbehaves beyond
the schedule defeats the estimator, which is a documented limitation.
The scan-based construction of rho2 and sigma is one admissible choice
among many; any pair satisfying the inequalities would do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import quadrature
from .errors import HypothesisViolation
from .exprlang import ExprEvalError
from .kernel import KernelContext
from .quadrature import QuadratureSettings

CONVERGENCE_RTOL = 1e-4
DIVERGENCE_LIMIT = 1e8
SCAN_POINTS = 10**4
RHO1_CAP = 1e3
RHO1_MIN = 1e-6
BOUNDEDNESS_CAP = 1e6
MARGIN_SLACK = 1e-12

ScalarFn = Callable[[float], float]


@dataclass(frozen=True)
class LimitEstimate:
    """Plain-limit estimate of f(u)/u along a geometric schedule.

    ``samples`` keeps every (u, f(u)/u) pair evaluated so the convergence
    claim can be audited.  ``divergent`` is set when the ratios climb past
    1e8, or when f itself overflows the float range mid-schedule.
    """

    value: Optional[float]
    converged: bool
    divergent: bool
    samples: tuple[tuple[float, float], ...]

    def is_zero(self) -> bool:
        return self.converged and self.value is not None and abs(self.value) < CONVERGENCE_RTOL


def _ratio_schedule(f: ScalarFn, us: list[float]) -> LimitEstimate:
    samples: list[tuple[float, float]] = []
    for u in us:
        try:
            fu = f(u)
        except ExprEvalError:
            return LimitEstimate(None, False, True, tuple(samples))
        if fu < 0.0:
            raise HypothesisViolation("H1", f"f({u}) = {fu} < 0")
        samples.append((u, fu / u))
    ratios = [r for _, r in samples]
    if ratios[-1] >= DIVERGENCE_LIMIT and ratios[-1] > ratios[-2]:
        return LimitEstimate(None, False, True, tuple(samples))
    converged = abs(ratios[-1] - ratios[-2]) < CONVERGENCE_RTOL * (1.0 + abs(ratios[-1]))
    return LimitEstimate(ratios[-1], converged, False, tuple(samples))


def estimate_f0(f: ScalarFn) -> LimitEstimate:
    """f(u)/u along u = 10^-k, k = 1..12."""
    return _ratio_schedule(f, [10.0**-k for k in range(1, 13)])


def estimate_finf(f: ScalarFn) -> LimitEstimate:
    """f(u)/u along u = 10^k, k = 1..8."""
    return _ratio_schedule(f, [10.0**k for k in range(1, 9)])


@dataclass(frozen=True)
class F0Certificate:
    """f(u) <= epsilon * u holds on (0, rho1], with epsilon <= 1 - alpha."""

    epsilon: float
    rho1: float


@dataclass(frozen=True)
class FInfCertificate:
    """Case 1: f <= L everywhere probed.  Case 2: f(u) <= eta * u past
    rho2 and f <= eta * sigma on [0, rho2]; rho_hat2 = max(sigma, rho2)."""

    bounded_case: bool
    L: Optional[float] = None
    eta: Optional[float] = None
    rho2: Optional[float] = None
    sigma: Optional[float] = None
    rho_hat2: Optional[float] = None


def _scan_grid(lo_exp: float, hi_exp: float) -> np.ndarray:
    return np.logspace(lo_exp, hi_exp, SCAN_POINTS)


def certify_f0_zero(f: ScalarFn, ctx: KernelContext) -> Optional[F0Certificate]:
    """Certificate for the small-amplitude criterion, or None.

    epsilon is pinned at its largest admissible value 1 - alpha (this
    maximizes rho1; the criterion only needs the inequality).  rho1 is
    located by scanning a log grid up to 1e3 and bisecting the first
    envelope crossing of f(u) = epsilon * u; the greatest certifiable
    radius is capped at 1e3.  Returns None when the f0 estimate is not
    approximately zero or no radius >= 1e-6 exists.
    """
    if not estimate_f0(f).is_zero():
        return None
    epsilon = 1.0 - ctx.alpha
    us = _scan_grid(-9.0, math.log10(RHO1_CAP))
    margins = np.array([f(float(u)) - epsilon * u for u in us])
    bad = np.nonzero(margins > MARGIN_SLACK)[0]
    if bad.size == 0:
        return F0Certificate(epsilon=epsilon, rho1=RHO1_CAP)
    first_bad = int(bad[0])
    if first_bad == 0:
        return None
    lo, hi = float(us[first_bad - 1]), float(us[first_bad])
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) - epsilon * mid <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, lo):
            break
    if lo < RHO1_MIN:
        return None
    return F0Certificate(epsilon=epsilon, rho1=lo)


def certify_finf_zero(f: ScalarFn, ctx: KernelContext) -> Optional[FInfCertificate]:
    """Certificate for the large-amplitude criterion, or None.

    Boundedness probe: scan f on a log grid over (0, 1e6] (plus u = 0);
    if the supremum shows no growth in the last decade it is taken as
    stable and Case 1 returns L = observed sup * (1 + 1e-6).  Otherwise
    Case 2 constants are built from the same scan with eta = 1 - alpha.
    """
    if not estimate_finf(f).is_zero():
        return None
    us = _scan_grid(-9.0, math.log10(BOUNDEDNESS_CAP))
    fvals = np.array([f(float(u)) for u in us])
    f_at_zero = f(0.0)
    sup_full = max(float(np.max(fvals)), f_at_zero)
    head = us <= BOUNDEDNESS_CAP / 10.0
    sup_head = max(float(np.max(fvals[head])), f_at_zero)
    if sup_full <= sup_head * (1.0 + 1e-9):
        return FInfCertificate(bounded_case=True, L=sup_full * (1.0 + 1e-6))

    eta = 1.0 - ctx.alpha
    margins = fvals - eta * us
    bad = np.nonzero(margins > MARGIN_SLACK)[0]
    if bad.size == 0:
        rho2 = float(us[0])
    elif int(bad[-1]) == len(us) - 1:
        return None  # f still above the admissible ray at the probe cap
    else:
        rho2 = float(us[int(bad[-1])])
    below = us <= rho2
    sigma = max(float(np.max(fvals[below])), f_at_zero) / eta
    return FInfCertificate(
        bounded_case=False, eta=eta, rho2=rho2, sigma=sigma, rho_hat2=max(sigma, rho2)
    )


@dataclass(frozen=True)
class H1H2Report:
    h1: bool
    h2: bool
    alpha: float


def check_h1_h2(
    f: ScalarFn, a: ScalarFn, quad: QuadratureSettings = quadrature.DEFAULT_SETTINGS
) -> H1H2Report:
    """Sampled verdicts on the two standing hypotheses.

    h1: f >= 0 at 1e4 scan points of [0, 1e6] (continuity comes from the
    expression grammar; points where f overflows the float range are
    skipped, since overflow says magnitude, not sign).  h2: a >= 0 on
    sampled [0, 1] and its total mass alpha lies strictly in (0, 1).
    """
    h1 = True
    for u in [0.0, *(_scan_grid(-9.0, 6.0).tolist())]:
        try:
            if f(float(u)) < 0.0:
                h1 = False
                break
        except ExprEvalError:
            continue
    sample_ts = np.union1d(np.linspace(0.0, 1.0, 1001), quadrature.nodes(0.0, 1.0, quad))
    a_nonneg = all(a(float(t)) >= 0.0 for t in sample_ts)
    alpha = quadrature.integrate(a, 0.0, 1.0, quad)
    return H1H2Report(h1=h1, h2=a_nonneg and 0.0 < alpha < 1.0, alpha=alpha)


@dataclass(frozen=True)
class HypothesisReport:
    """Everything the analysis command reports about f and a."""

    alpha: float
    beta: float
    f0_estimate: LimitEstimate
    finf_estimate: LimitEstimate
    epsilon: float  # largest admissible slope, 1 - alpha
    rho1: Optional[float]
    bounded_case: Optional[bool]
    L: Optional[float]
    eta: Optional[float]
    rho2: Optional[float]
    sigma: Optional[float]
    rho_hat2: Optional[float]
    f0_zero_applicable: bool
    finf_zero_applicable: bool


def build_report(f: ScalarFn, ctx: KernelContext) -> HypothesisReport:
    """Run both estimates and both certifications against a valid context."""
    f0 = estimate_f0(f)
    finf = estimate_finf(f)
    cert0 = certify_f0_zero(f, ctx)
    certinf = certify_finf_zero(f, ctx)
    return HypothesisReport(
        alpha=ctx.alpha,
        beta=ctx.beta,
        f0_estimate=f0,
        finf_estimate=finf,
        epsilon=1.0 - ctx.alpha,
        rho1=cert0.rho1 if cert0 else None,
        bounded_case=certinf.bounded_case if certinf else None,
        L=certinf.L if certinf else None,
        eta=certinf.eta if certinf else None,
        rho2=certinf.rho2 if certinf else None,
        sigma=certinf.sigma if certinf else None,
        rho_hat2=certinf.rho_hat2 if certinf else None,
        f0_zero_applicable=cert0 is not None,
        finf_zero_applicable=certinf is not None,
    )
