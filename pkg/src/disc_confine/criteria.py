"""Analytic limit-point criteria built on a gauge function G.

A potential V = V1 + V2 (V2 bounded) is limit point at x = 1 when

    V1(x) + 1/(4 (1-x)^2) >= G'(1-x)^2                        (pointwise)

and either the dyadic sum  sum_n 4^-n exp(-2 G(2^-n rho0))  or, under
1/(2t) <= G'(t) <= 1/t, the integral  int_0 t exp(-2 G(t)) dt  diverges.

G is handled through the log variable l = ln t: ``g_log(l)`` is G and
``tg_log(l)`` is t G'(t). Every exp(-2G) is formed in log space, so the
tests reach distances far below the double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from . import quadrature
from .channels import build_channel, check_kind
from .errors import CallerError, HypothesisViolation, NumericError
from .fields import SQRT3, Critical, CriticalPauli
from .gauge import (
    calibrate_bound_constant,
    critical_cutoff_t,
    gauge_profile,
    r2a_lower_bound_t,
)

SATISFIED = "Satisfied"
VIOLATED = "Violated"
INCONCLUSIVE = "Inconclusive"

# Relative slack for comparisons that hold with equality in exact arithmetic.
EQUALITY_RTOL = 1e-12
LN2 = math.log(2.0)
LN10 = math.log(10.0)


@dataclass
class CriterionVerdict:
    """Outcome of a criterion check; Violated always carries a witness."""

    outcome: str
    witness: Optional[dict] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.outcome == VIOLATED and self.witness is None:
            raise ValueError("a Violated verdict needs a witness")

    @property
    def satisfied(self) -> bool:
        return self.outcome == SATISFIED

    def to_json(self):
        return {"outcome": self.outcome, "witness": self.witness,
                "diagnostics": self.diagnostics}


def combine(verdicts, **diagnostics) -> CriterionVerdict:
    """Conjunction: Violated if any part is, Satisfied if all are."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.outcome == VIOLATED:
            return CriterionVerdict(VIOLATED, v.witness, {"parts": [x.to_json() for x in verdicts], **diagnostics})
    outcome = SATISFIED if all(v.satisfied for v in verdicts) else INCONCLUSIVE
    return CriterionVerdict(outcome, None, {"parts": [x.to_json() for x in verdicts], **diagnostics})


# G functions -----------------------------------------------------------------

@dataclass(frozen=True)
class GFunction:
    """Gauge function G on (0, 1/2) given in the log variable l = ln t.

    ``g_log`` and ``tg_log`` describe G and t G'(t) on (0, d0). With
    ``ramp`` (the default for the built-in families) G' is continued
    linearly from its value at d0 down to 0 at 2 d0 and G is constant
    beyond, so G is differentiable and G' = 0 on (2 d0, 1/2).
    """

    g_log: Callable
    tg_log: Callable
    d0: float
    family: str = "custom"
    params: tuple = ()
    ramp: bool = True

    def __post_init__(self):
        if not (0.0 < self.d0 < 0.25):
            raise CallerError("d0 must lie in (0, 1/4) so that 2 d0 < 1/2")

    def _split(self, ell):
        ell = np.asarray(ell, dtype=float)
        l0 = math.log(self.d0)
        return ell, l0, ell > l0

    def G_log(self, ell):
        ell, l0, far = self._split(ell)
        base = np.asarray(self.g_log(np.minimum(ell, l0)), dtype=float)
        if not (self.ramp and np.any(far)):
            return base if base.ndim else float(base)
        d0 = self.d0
        gp0 = float(self.tg_log(l0)) / d0
        t = np.minimum(np.exp(ell), 2 * d0)
        extra = gp0 / d0 * (2 * d0 * (t - d0) - 0.5 * (t * t - d0 * d0))
        out = np.where(far, base + extra, base)
        return out if out.ndim else float(out)

    def tGprime_log(self, ell):
        ell, l0, far = self._split(ell)
        base = np.asarray(self.tg_log(np.minimum(ell, l0)), dtype=float)
        if not np.any(far):
            return base if base.ndim else float(base)
        if self.ramp:
            d0 = self.d0
            t = np.exp(ell)
            ramped = t * (float(self.tg_log(math.log(d0))) / d0) * np.clip(2 * d0 - t, 0.0, None) / d0
            out = np.where(far, ramped, base)
        else:
            out = np.asarray(self.tg_log(ell), dtype=float)
        return out if out.ndim else float(out)

    def g(self, t):
        """G(t) for t in (0, 1/2)."""
        return self.G_log(np.log(_check_distance(t)))

    def gprime(self, t):
        """G'(t) for t in (0, 1/2)."""
        t = _check_distance(t)
        return self.tGprime_log(np.log(t)) / t

    def to_json(self):
        return {"family": self.family, "params": dict(self.params), "d0": self.d0}


def _check_distance(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0.0)) or np.any(t >= 0.5):
        raise CallerError("G is defined on (0, 1/2)")
    return t


def log_only(d0: float = 0.1) -> GFunction:
    """G(t) = ln t, the classical choice."""
    return GFunction(lambda l: np.asarray(l, dtype=float) * 1.0,
                     lambda l: np.ones_like(np.asarray(l, dtype=float)),
                     d0, "log")


def log_loglog(kappa: float, d0: float = 0.1) -> GFunction:
    """G(t) = ln t + kappa ln ln(1/t)."""
    k = float(kappa)

    def g(l):
        l = np.asarray(l, dtype=float)
        return l + k * np.log(-l)

    def tg(l):
        return 1.0 - k / (-np.asarray(l, dtype=float))

    return GFunction(g, tg, d0, "loglog", (("kappa", k),))


def log_half_loglog(d0: float = 0.1) -> GFunction:
    """G(t) = ln t + (1/2) ln ln(1/t)."""
    gf = log_loglog(0.5, d0)
    return GFunction(gf.g_log, gf.tg_log, d0, "loghalfloglog")


def _boundary_layer_g(c: float, d0: float, family: str, params=()) -> GFunction:
    """G(t) = ln t + (1/2) ln ln(1/t) + int_t^d0 c / (u ln^2(1/u)) du."""
    L0 = -math.log(d0)

    def g(l):
        l = np.asarray(l, dtype=float)
        L = -l
        return l + 0.5 * np.log(L) + c * (1.0 / L0 - 1.0 / L)

    def tg(l):
        L = -np.asarray(l, dtype=float)
        return 1.0 - 0.5 / L - c / (L * L)

    return GFunction(g, tg, d0, family, tuple(params))


def paper_schrodinger() -> GFunction:
    """The G used for the spinless critical field: c = 4, d0 = e^-4."""
    return _boundary_layer_g(4.0, math.exp(-4.0), "paper-schrodinger")


def paper_pauli(alpha: float) -> GFunction:
    """The G used for the Pauli critical field: c = 2(alpha+1), d0 = e^-2(alpha+1)."""
    alpha = float(alpha)
    if not alpha > 0:
        raise CallerError("alpha must be positive")
    c = 2.0 * (alpha + 1.0)
    return _boundary_layer_g(c, math.exp(-c), "paper-pauli", (("alpha", alpha),))


def custom_g(f: Callable, d0: float = 0.1) -> GFunction:
    """G(t) = ln t + (1/2) ln ln(1/t) + int_t^d0 f(u) du for a vectorised f >= 0."""
    l0 = math.log(d0)

    def tail(l):
        l = np.atleast_1d(np.asarray(l, dtype=float))
        order = np.argsort(l)
        edges = np.append(l[order], l0)
        panels = quadrature.integrate_panels(
            lambda x: np.exp(x) * f(np.exp(x)), edges, rtol=1e-12, atol=1e-300
        )
        cum = np.cumsum(panels[::-1])[::-1]
        out = np.empty_like(l)
        out[order] = cum
        return out

    def g(l):
        l_arr = np.asarray(l, dtype=float)
        out = l_arr + 0.5 * np.log(-l_arr) + tail(l_arr).reshape(l_arr.shape)
        return out

    def tg(l):
        l = np.asarray(l, dtype=float)
        t = np.exp(l)
        return 1.0 - 0.5 / (-l) - t * np.asarray(f(t), dtype=float)

    return GFunction(g, tg, d0, "custom")


def g_from_name(name: str) -> GFunction:
    """Parse the CLI names: log, loghalfloglog, loglog:<kappa>,
    paper-schrodinger, paper-pauli:<alpha>."""
    key, _, arg = name.partition(":")
    if key == "log" and not arg:
        return log_only()
    if key == "loghalfloglog" and not arg:
        return log_half_loglog()
    if key == "paper-schrodinger" and not arg:
        return paper_schrodinger()
    try:
        if key == "paper-pauli":
            return paper_pauli(float(arg or 1.5))
        if key == "loglog":
            return log_loglog(float(arg or 1.0))
    except ValueError:
        raise CallerError(f"bad parameter in G name {name!r}") from None
    raise CallerError(f"unknown G family {name!r}")


# Pointwise bound and admissibility ------------------------------------------------

def _eval_on(fn, x):
    try:
        out = np.asarray(fn(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(v))) for v in x])


def check_pointwise_bound(V1: Callable, G: GFunction, grid, variable: str = "r") -> CriterionVerdict:
    """V1(x) + 1/(4 (1-x)^2) >= G'(1-x)^2 at every grid point.

    With ``variable="r"`` the grid holds radii in (1/2, 1) and V1 takes a
    radius; with ``variable="t"`` both use the distance t = 1 - x, which
    stays accurate below 1e-16. Both sides are compared after
    multiplication by t^2.
    """
    x = np.atleast_1d(np.asarray(grid, dtype=float))
    if variable == "r":
        if np.any(~(x > 0.5)) or np.any(x >= 1.0):
            raise CallerError("grid must lie in (1/2, 1)")
        t = 1.0 - x
    elif variable == "t":
        if np.any(~(x > 0.0)) or np.any(x >= 0.5):
            raise CallerError("distance grid must lie in (0, 1/2)")
        t = x
    else:
        raise CallerError("variable must be 'r' or 't'")
    v = _eval_on(V1, x)
    if not np.all(np.isfinite(v)):
        bad = int(np.flatnonzero(~np.isfinite(v))[0])
        raise NumericError("V1 is not finite", where=float(x[bad]))
    lhs = t * t * v + 0.25
    rhs = np.asarray(G.tGprime_log(np.log(t)), dtype=float) ** 2
    margin = lhs - rhs
    ok = margin >= -EQUALITY_RTOL * np.maximum(np.abs(rhs), np.abs(lhs))
    diag = {"points": int(x.size), "min_scaled_margin": float(np.min(margin)),
            "variable": variable}
    if np.all(ok):
        return CriterionVerdict(SATISFIED, None, diag)
    i = int(np.flatnonzero(~ok)[0])
    witness = {variable: float(x[i]), "t2_lhs": float(lhs[i]), "t2_rhs": float(rhs[i])}
    return CriterionVerdict(VIOLATED, witness, diag)


def check_gprime_bounds(G: GFunction, t_grid, lower: float = 0.0,
                        upper: float = 1.0) -> CriterionVerdict:
    """lower <= t G'(t) <= upper on the distance grid."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    tg = np.asarray(G.tGprime_log(np.log(t)), dtype=float)
    slack = EQUALITY_RTOL * max(1.0, abs(upper))
    bad = (tg < lower - slack) | (tg > upper + slack)
    diag = {"points": int(t.size), "min_tGprime": float(tg.min()), "max_tGprime": float(tg.max())}
    if not np.any(bad):
        return CriterionVerdict(SATISFIED, None, diag)
    i = int(np.flatnonzero(bad)[0])
    return CriterionVerdict(VIOLATED, {"t": float(t[i]), "tGprime": float(tg[i])}, diag)


def _ell_grid(lo_ell, hi_ell, n):
    return np.linspace(lo_ell, hi_ell, n)


def check_admissibility(G: GFunction, variant: str = "integral", n: int = 10_000,
                        t_min: float = 1e-300) -> CriterionVerdict:
    """Conditions on G' on a log grid of (t_min, d0).

    ``variant="sum"``: 0 <= t G' <= 1; ``"integral"``: 1/2 <= t G' <= 1.
    Both also require G' = 0 on (2 d0, 1/2).
    """
    if variant not in ("sum", "integral"):
        raise CallerError("variant must be 'sum' or 'integral'")
    lower = 0.5 if variant == "integral" else 0.0
    t = np.exp(_ell_grid(math.log(t_min), math.log(G.d0), n))
    near = check_gprime_bounds(G, t, lower, 1.0)
    far_t = np.linspace(2 * G.d0, 0.5, 64, endpoint=False)
    far_vals = np.asarray(G.tGprime_log(np.log(far_t)), dtype=float)
    if np.any(far_vals != 0.0):
        i = int(np.flatnonzero(far_vals != 0.0)[0])
        return CriterionVerdict(VIOLATED, {"t": float(far_t[i]), "tGprime": float(far_vals[i])},
                                {"reason": "G' does not vanish beyond 2 d0"})
    near.diagnostics["variant"] = variant
    return near


def check_monotonicity(G: GFunction, t_lo: float, t_hi: float, n: int = 10_000) -> CriterionVerdict:
    """t exp(-2 G(t)) nonincreasing on [t_lo, t_hi] (adjacent-point comparison)."""
    ell = _ell_grid(math.log(t_lo), math.log(t_hi), n)
    logh = ell - 2.0 * np.asarray(G.G_log(ell), dtype=float)
    step = np.diff(logh)
    bad = step > EQUALITY_RTOL * np.maximum(1.0, np.abs(logh[1:]))
    diag = {"points": n, "max_log_step": float(step.max())}
    if not np.any(bad):
        return CriterionVerdict(SATISFIED, None, diag)
    i = int(np.flatnonzero(bad)[0])
    return CriterionVerdict(VIOLATED, {"t": float(math.exp(ell[i + 1])), "log_increase": float(step[i])}, diag)


# Divergence ladder -----------------------------------------------------------

SLOPE_TOLERANCE = 0.05
TAIL_MARGIN = 10.0


def _ladder_verdict(log_terms, label):
    """Three-way divergence verdict for a positive series given by ln T_n.

    Over the last three decades of n, the slope sigma of ln(n T_n) against
    ln n is fitted. sigma >= -0.05 means the terms decay no faster than
    about c/n: divergence. Otherwise T_n <= T_N (n/N)^-(1-sigma) bounds the
    tail by N T_N / (-sigma); convergence is declared when ten times this
    bound stays below the partial sum.
    """
    log_terms = np.asarray(log_terms, dtype=float)
    N = log_terms.size
    n = np.arange(1, N + 1, dtype=float)
    lo = max(1, int(N // 1000))
    idx = np.unique(np.geomspace(lo, N, 256).astype(int)) - 1
    x = np.log(n[idx])
    y = x + log_terms[idx]
    sigma, _ = np.polyfit(x, y, 1)
    log_total = float(logsumexp(log_terms))
    checkpoints = [2**k for k in range(0, int(math.log2(N)) + 1)]
    partial = [float(logsumexp(log_terms[:c])) for c in checkpoints]
    diag = {
        "terms": N,
        "slope": float(sigma),
        "log_partial_sums": dict(zip(map(str, checkpoints), partial)),
        "ladder": label,
    }
    if sigma >= -SLOPE_TOLERANCE:
        return CriterionVerdict(SATISFIED, None, diag)
    log_tail = math.log(N) + float(log_terms[-1]) - math.log(-sigma)
    diag["log_tail_bound"] = log_tail
    diag["log_total"] = log_total
    if math.log(TAIL_MARGIN) + log_tail <= log_total:
        witness = {"n": N, "log_term": float(log_terms[-1]), "log_partial_sum": log_total,
                   "log_tail_bound": log_tail}
        return CriterionVerdict(VIOLATED, witness, diag)
    return CriterionVerdict(INCONCLUSIVE, None, diag)


def sum_test(G: GFunction, rho0: Optional[float] = None, n_max: int = 2**16) -> CriterionVerdict:
    """Divergence of sum_{n>=1} 4^-n exp(-2 G(2^-n rho0)).

    Satisfied means divergence, Violated convergence. With ``rho0=None``
    the scales d0/2, d0/8 and d0/32 are tested and the verdict is the common
    one (Inconclusive if they disagree).
    """
    if n_max < 32:
        raise CallerError("n_max must be at least 32")
    if rho0 is None:
        parts = [sum_test(G, G.d0 / k, n_max) for k in (2, 8, 32)]
        outcomes = {p.outcome for p in parts}
        outcome = outcomes.pop() if len(outcomes) == 1 else INCONCLUSIVE
        witness = parts[0].witness if outcome == VIOLATED else None
        return CriterionVerdict(outcome, witness,
                                {"per_rho0": {str(G.d0 / k): p.to_json() for k, p in zip((2, 8, 32), parts)}})
    if not (0.0 < rho0 <= G.d0 / 2 * (1 + 1e-12)):
        raise CallerError("rho0 must lie in (0, d0/2]")
    n = np.arange(1, n_max + 1, dtype=float)
    ell = math.log(rho0) - n * LN2
    log_terms = -2.0 * n * LN2 - 2.0 * np.asarray(G.G_log(ell), dtype=float)
    if not np.all(np.isfinite(log_terms)):
        raise NumericError("non-finite term in the dyadic sum")
    v = _ladder_verdict(log_terms, "dyadic terms")
    v.diagnostics["rho0"] = rho0
    return v


def _log_integral(G: GFunction, a_ell: float, b_ell: float) -> float:
    """ln int_{e^a}^{e^b} t exp(-2 G(t)) dt, computed as an integral in l."""
    if b_ell <= a_ell:
        return -math.inf
    mid = 0.5 * (a_ell + b_ell)
    shift = 2.0 * mid - 2.0 * float(G.G_log(mid))

    def h(ell):
        return np.exp(2.0 * ell - 2.0 * np.asarray(G.G_log(ell), dtype=float) - shift)

    edges = np.linspace(a_ell, b_ell, max(2, int(math.ceil(b_ell - a_ell)) + 1))
    val = float(quadrature.integrate_panels(h, edges, rtol=1e-12, atol=0.0).sum())
    if not val > 0.0:
        raise NumericError("integral of t exp(-2G) is not positive", where=(a_ell, b_ell))
    return shift + math.log(val)


def integral_test(G: GFunction, eps_min: Optional[float] = None, upper: Optional[float] = None,
                  decades: Optional[int] = None) -> CriterionVerdict:
    """Divergence of I(eps) = int_eps^upper t exp(-2 G(t)) dt as eps -> 0.

    The range is cut into decades of t (``decades`` of them, default 2000,
    i.e. down to t = upper * 1e-2000; or as many as fit above ``eps_min``).
    The decade increments form the series fed to the same ladder verdict as
    :func:`sum_test`: increments decaying like c/k or slower (I growing like
    ln ln(1/eps) or faster) mean divergence. G must satisfy
    1/2 <= t G' <= 1; otherwise the verdict is Inconclusive with the reason.
    """
    upper = G.d0 if upper is None else float(upper)
    if not (0.0 < upper <= G.d0 * (1 + 1e-12)):
        raise CallerError("upper must lie in (0, d0]")
    if eps_min is not None:
        if not (0.0 < eps_min < upper):
            raise CallerError("need 0 < eps_min < upper")
        K = int(math.floor(math.log10(upper / eps_min)))
    else:
        K = 2000 if decades is None else int(decades)
    if K < 32:
        raise CallerError("the ladder needs at least 32 decades")
    top = math.log(upper)
    bottom = top - K * LN10
    adm = check_gprime_bounds(G, np.exp(np.linspace(max(bottom, -700.0), top, 10_000)), 0.5, 1.0)
    if adm.outcome == SATISFIED and bottom < -700.0:
        ell = np.linspace(bottom, -700.0, 10_000)
        tg = np.asarray(G.tGprime_log(ell), dtype=float)
        if np.any(tg < 0.5 - EQUALITY_RTOL) or np.any(tg > 1.0 + EQUALITY_RTOL):
            adm = CriterionVerdict(VIOLATED, {"log_t": float(ell[np.argmax((tg < 0.5) | (tg > 1))])})
    if adm.outcome != SATISFIED:
        return CriterionVerdict(INCONCLUSIVE, None, {
            "reason": "G violates 1/(2t) <= G'(t) <= 1/t below d0",
            "witness": adm.witness,
        })
    log_incr = np.array([
        _log_integral(G, top - (k + 1) * LN10, top - k * LN10) for k in range(K)
    ])
    v = _ladder_verdict(log_incr, "decade increments of I(eps)")
    marks = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000]
    v.diagnostics["log_I_at_decade"] = {
        str(k): float(logsumexp(log_incr[:k])) for k in marks if k <= K
    }
    v.diagnostics["upper"] = upper
    return v


@dataclass(frozen=True)
class Bracket:
    """Truncated sum and the two integrals that bracket it."""

    lower: float
    total: float
    upper: float
    rho0: float
    n_max: int

    def __iter__(self):
        return iter((self.lower, self.total, self.upper))

    def holds(self, rtol: float = 1e-6) -> bool:
        return self.lower <= self.total * (1 + rtol) and self.total <= self.upper * (1 + rtol)

    def to_json(self):
        return {"lower": self.lower, "sum": self.total, "upper": self.upper,
                "rho0": self.rho0, "n_max": self.n_max, "holds": self.holds()}


def sum_integral_bracket(G: GFunction, rho0: float, n_max: int = 40) -> Bracket:
    """rho0^-2 int_{t_N}^{rho0} h <= sum_{n<=N} 4^-n e^{-2G(t_n)} <= 2 rho0^-2 int_{t_{N+1}}^{rho0/2} h.

    Here h(t) = t exp(-2G(t)), t_n = 2^-n rho0 and N = ``n_max``; the
    truncation points are the ones for which both inequalities hold term by
    term. Requires 1/2 <= t G' <= 1 and h nonincreasing on [t_{N+1}, rho0];
    a failure raises HypothesisViolation naming the grid point.
    """
    if n_max < 1:
        raise CallerError("n_max must be positive")
    if not rho0 > 0.0:
        raise CallerError("rho0 must be positive")
    if rho0 >= 0.5:
        raise CallerError("rho0 must be below 1/2")
    t_last = rho0 * 2.0 ** -(n_max + 1)
    grid = np.exp(np.linspace(math.log(t_last), math.log(rho0), 10_000))
    adm = check_gprime_bounds(G, grid, 0.5, 1.0)
    if adm.outcome != SATISFIED:
        raise HypothesisViolation(
            f"1/(2t) <= G'(t) <= 1/t fails at t={adm.witness['t']:.6g}"
        )
    mono = check_monotonicity(G, t_last, rho0)
    if mono.outcome != SATISFIED:
        raise HypothesisViolation(
            f"t exp(-2G(t)) increases at t={mono.witness['t']:.6g}"
        )
    lr = math.log(rho0)
    n = np.arange(1, n_max + 1, dtype=float)
    log_terms = -2.0 * n * LN2 - 2.0 * np.asarray(G.G_log(lr - n * LN2), dtype=float)
    total = float(np.exp(logsumexp(log_terms)))
    lower = math.exp(_log_integral(G, lr - n_max * LN2, lr) - 2 * lr)
    upper = 2.0 * math.exp(_log_integral(G, lr - (n_max + 1) * LN2, lr - LN2) - 2 * lr)
    return Bracket(lower, total, upper, rho0, n_max)


# Channel inequalities -------------------------------------------------------

def _kind_constant(kind, alpha):
    return SQRT3 / 2 if kind == "schrodinger" else alpha


def channel_threshold_radius(m: int, kind="schrodinger", C: Optional[float] = None,
                             alpha: float = 1.5, step: float = 1e-3) -> float:
    """Smallest grid radius r >= r0 with 1/(t ln^2(1/t)) >= k ln(1/t) + m - C.

    t = 1 - r, r0 is the cutoff of the matching critical field, and k is
    sqrt(3)/2 (Schrodinger) or alpha (Pauli). The grid is uniform with
    spacing ``step`` in ln(1/t).
    """
    kind = check_kind(kind)
    if C is None:
        C = calibrate_bound_constant(kind, alpha)
    k = _kind_constant(kind, alpha)
    sigma0 = -math.log(critical_cutoff_t(kind, alpha))
    start = 0
    while start * step < 700.0:
        sig = sigma0 + step * np.arange(start, start + 4096)
        rhs = k * sig + m - C
        ok = (rhs <= 0.0) | (sig - 2.0 * np.log(sig) >= np.log(np.maximum(rhs, 1e-300)))
        if np.any(ok):
            return float(-math.expm1(-sig[int(np.argmax(ok))]))
        start += 4096
    raise NumericError("no threshold radius above 1 - 1e-300", where=m)


def check_alpha_beta(alpha: float, beta: float) -> None:
    """Raise CallerError unless beta >= 1 and alpha >= (beta + sqrt(beta^2 + 3)) / 2."""
    if not beta >= 1.0:
        raise CallerError("beta must be at least 1")
    if not alpha >= (beta + math.sqrt(beta * beta + 3.0)) / 2.0 * (1 - 1e-15):
        raise CallerError(
            f"alpha={alpha} is below (beta + sqrt(beta^2 + 3))/2 for beta={beta}"
        )


@dataclass
class ChannelInequalities:
    """Results of the boundary-layer inequalities for one channel."""

    kind: str
    m: int
    r_m: float
    C: float
    gauge_bound: CriterionVerdict
    pointwise: CriterionVerdict
    gprime_lower: CriterionVerdict
    alpha: Optional[float] = None
    beta: Optional[float] = None

    @property
    def satisfied(self) -> bool:
        return self.gauge_bound.satisfied and self.pointwise.satisfied and self.gprime_lower.satisfied

    def to_json(self):
        return {
            "kind": self.kind, "m": self.m, "r_m": self.r_m, "C": self.C,
            "alpha": self.alpha, "beta": self.beta,
            "gauge_bound": self.gauge_bound.to_json(),
            "pointwise": self.pointwise.to_json(),
            "gprime_lower": self.gprime_lower.to_json(),
        }


def check_channel_inequalities(kind="schrodinger", m: int = 0, alpha: float = 1.5,
                               beta: float = 1.0, n_points: int = 1000,
                               t_min: float = 1e-8) -> ChannelInequalities:
    """Check, on a log grid of (r_m, 1 - t_min), the critical-field chain.

    1. r^2 a of the critical field dominates the lower bound with calibrated C.
    2. The pointwise criterion with the boundary-layer G. For Schrodinger V1
       is the channel potential of the critical field. For Pauli the field
       term is replaced by its largest admissible value beta alpha / t^2,
       so the check covers every field between the two bounds.
    3. t G'(t) >= 1/2.
    """
    kind = check_kind(kind)
    if kind == "pauli":
        check_alpha_beta(alpha, beta)
        field = CriticalPauli(alpha)
        G = paper_pauli(alpha)
    else:
        field = Critical()
        G = paper_schrodinger()
        alpha = beta = None
    a_ = 1.5 if alpha is None else alpha
    C = calibrate_bound_constant(kind, a_)
    r_m = channel_threshold_radius(m, kind, C, a_)
    t_m = 1.0 - r_m
    if not t_m > t_min:
        raise CallerError("r_m is already beyond 1 - t_min")
    t = np.geomspace(t_m, t_min, n_points + 1)[1:]

    prof = gauge_profile(field)
    r2a = prof.r2a_t(t)
    bound = r2a_lower_bound_t(kind, t, C, a_)
    gap = r2a - bound
    tol = 1e-9 * np.abs(r2a)
    if np.all(gap >= -tol):
        gb = CriterionVerdict(SATISFIED, None, {"min_relative_gap": float(np.min(gap / np.abs(r2a)))})
    else:
        i = int(np.argmax(gap < -tol))
        gb = CriterionVerdict(VIOLATED, {"t": float(t[i]), "r2a": float(r2a[i]), "bound": float(bound[i])})

    if kind == "schrodinger":
        ch = build_channel(field, m, kind)
        V1 = ch.potential_t
    else:
        ceiling = beta * alpha

        def V1(tt):
            r = 1.0 - tt
            return (0.75 + (prof.r2a_t(tt) - m) ** 2) / r**2 - ceiling / tt**2

    pw = check_pointwise_bound(V1, G, t, variable="t")
    gl = check_gprime_bounds(G, t, 0.5, 1.0)
    return ChannelInequalities(kind, int(m), r_m, C, gb, pw, gl, alpha, beta)
