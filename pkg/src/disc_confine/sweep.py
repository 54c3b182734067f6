"""Bisection for confinement thresholds and the subleading-coefficient check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .channels import build_channel, check_kind, inverse_square_channel
from .criteria import (
    CriterionVerdict,
    channel_threshold_radius,
    check_alpha_beta,
    check_pointwise_bound,
    combine,
    integral_test,
    paper_pauli,
    paper_schrodinger,
)
from .errors import CallerError
from .fields import CRITICAL_CUTOFF_T, SQRT3, PowerLaw, SubleadingCritical
from .gauge import calibrate_bound_constant, gauge_profile
from .weyl import (
    BORDERLINE,
    ESA,
    LIMIT_POINT,
    NOT_ESA,
    OdeSolverConfig,
    classify_endpoint,
    classify_operator,
)

CAVEAT = (
    "The subleading constants 1/sqrt(3) (Schrodinger) and 1/(2 alpha) (Pauli) are "
    "certified only on the confining side, via the analytic criteria; their "
    "sharpness rests on an external theorem that this artifact does not reproduce."
)

RETRY_FACTOR = 100.0


@dataclass
class SweepResult:
    """Final bracket of a threshold search.

    ``bracket = (lo, hi)`` with lo non-confining and hi confining;
    ``log`` lists every classification made, in order.
    """

    param_name: str
    bracket: tuple
    estimate: float
    iterations: int
    log: list = field(default_factory=list)
    tol: float = 0.05

    def to_json(self):
        return {
            "param_name": self.param_name,
            "bracket": list(self.bracket),
            "estimate": self.estimate,
            "iterations": self.iterations,
            "tol": self.tol,
            "log": self.log,
        }


def bisect_threshold(decide: Callable, lo: float, hi: float, tol: float,
                     cfg: OdeSolverConfig, param_name: str) -> SweepResult:
    """Bisection on a monotone yes/no question.

    ``decide(x, cfg)`` returns True (confining), False (not confining) or
    None (undecided). An undecided midpoint is retried once with eps_min
    divided by 100; if still undecided it counts as confining and is
    flagged, since the thresholds are closed on the confining side.
    """
    if not tol >= 0.01:
        raise CallerError("tol must be at least 0.01")
    if not lo < hi:
        raise CallerError("need lo < hi")
    log = []

    def probe(x, role):
        entry = {"role": role, "value": x, "retried": False, "flagged": False}
        ans = decide(x, cfg)
        if ans is None:
            entry["retried"] = True
            ans = decide(x, cfg.with_eps_min(cfg.eps_min / RETRY_FACTOR))
            if ans is None:
                entry["flagged"] = True
                ans = True
        entry["confining"] = bool(ans)
        log.append(entry)
        return bool(ans)

    if probe(lo, "lo"):
        raise CallerError(f"lower end {param_name}={lo} is already confining")
    if not probe(hi, "hi"):
        raise CallerError(f"upper end {param_name}={hi} is not confining")
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid, "mid"):
            hi = mid
        else:
            lo = mid
        log[-1]["bracket"] = [lo, hi]
        it += 1
    return SweepResult(param_name, (lo, hi), 0.5 * (lo + hi), it, log, tol)


def sweep_alpha(kind="schrodinger", lo: float = 0.5, hi: float = 1.5, tol: float = 0.05,
                cfg: Optional[OdeSolverConfig] = None, m_range=(-2, 2),
                r0: float = 0.5) -> SweepResult:
    """Threshold in alpha for PowerLaw(alpha, r0) over channels ``m_range``."""
    kind = check_kind(kind)
    cfg = cfg or OdeSolverConfig()

    def decide(alpha, c):
        agg = classify_operator(PowerLaw(alpha, r0), kind, m_range, c).aggregate
        return True if agg == ESA else False if agg == NOT_ESA else None

    return bisect_threshold(decide, lo, hi, tol, cfg, "alpha")


def sweep_inverse_square(lo: float = 0.5, hi: float = 1.0, tol: float = 0.01,
                         cfg: Optional[OdeSolverConfig] = None) -> SweepResult:
    """Threshold in c for the model potential c / (1 - r)^2."""
    cfg = cfg or OdeSolverConfig()

    def decide(c, cf):
        v = classify_endpoint(inverse_square_channel(c), cf).verdict
        return None if v == BORDERLINE else v == LIMIT_POINT

    return bisect_threshold(decide, lo, hi, tol, cfg, "c")


def verify_subleading(kind="schrodinger", d: Optional[float] = None, alpha: float = 1.5,
                      beta: float = 1.0, m_values=(0,), t_min: float = 1e-30,
                      n_points: int = 2000) -> CriterionVerdict:
    """Confining side of the subleading threshold, via the analytic criteria.

    The field is lead/t^2 - d/(t^2 ln(1/t)) near the boundary, with
    lead = sqrt(3)/2 (Schrodinger) or alpha (Pauli). For every m the
    pointwise bound with the boundary-layer G is checked on a log grid of
    distances from the channel threshold radius down to ``t_min``; the
    integral test for the same G must diverge. The caveat on sharpness is
    attached to the diagnostics.
    """
    kind = check_kind(kind)
    if kind == "schrodinger":
        lead, t_cut, G = SQRT3 / 2, CRITICAL_CUTOFF_T, paper_schrodinger()
        d = 1.0 / SQRT3 if d is None else float(d)
        constant = 1.0 / SQRT3
    else:
        check_alpha_beta(alpha, beta)
        lead, t_cut, G = alpha, math.exp(-2.0 * (alpha + 1.0)), paper_pauli(alpha)
        d = 1.0 / (2.0 * alpha) if d is None else float(d)
        constant = 1.0 / (2.0 * alpha)
    fld = SubleadingCritical(lead, d, t_cut)
    C = calibrate_bound_constant(kind, alpha)
    prof = gauge_profile(fld)
    parts = []
    for m in m_values:
        t_m = 1.0 - channel_threshold_radius(m, kind, C, alpha)
        t = np.geomspace(t_m, t_min, n_points + 1)[1:]
        if kind == "schrodinger":
            V1 = build_channel(fld, m, kind).potential_t
        else:
            ceiling = beta * alpha

            def V1(tt, m=m):
                return (0.75 + (prof.r2a_t(tt) - m) ** 2) / (1.0 - tt) ** 2 - ceiling / tt**2

        v = check_pointwise_bound(V1, G, t, variable="t")
        v.diagnostics["m"] = m
        parts.append(v)
    parts.append(integral_test(G))
    out = combine(parts, kind=kind, d=d, constant=constant, caveat=CAVEAT,
                  alpha=alpha if kind == "pauli" else None,
                  beta=beta if kind == "pauli" else None)
    return out
