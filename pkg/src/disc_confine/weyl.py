"""Numerical limit-point / limit-circle oracle at a singular endpoint.

The channel equation -u'' + q u = 0 is integrated toward the endpoint in the
variable s = ln(1/t), t the distance to the endpoint, so that a potential
c / t^2 becomes autonomous. With U = u and Y = t du/dr the system reads

    U' = Y,    Y' = -Y + t^2 q U          (' = d/ds).

The fundamental matrix is carried in QR form Phi = Q(theta) R: theta is the
Pruefer angle of the first solution (tan theta = Y/U is its scaled
log-derivative, so zeros of u are just passages of theta through pi/2),
ln R11 and ln R22 - ln R11 are accumulated in log space, and
eta = R12 / R11 settles to a constant. The Wronskian is exp(ln R11 + ln R22)/t.

At spectral parameter 0 a real equation with both solutions in L^2 near the
endpoint is limit circle there, and one solution outside L^2 makes it limit
point, so no complex arithmetic is needed.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .channels import Channel, build_channel, check_kind
from .errors import CallerError, NumericError
from .fields import FieldSpec

LIMIT_POINT = "LimitPoint"
LIMIT_CIRCLE = "LimitCircle"
BORDERLINE = "Borderline"

ESA = "EssentiallySelfAdjoint"
NOT_ESA = "NotEssentiallySelfAdjoint"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class OdeSolverConfig:
    """Integration and tail-fit settings.

    ``start`` is the interior anchor radius, ``ladder`` the factor between
    successive distances of the reported epsilon ladder. ``exponent_resolution``
    and ``log_resolution`` are the widths of the undecided bands of the
    tail fit (see :func:`classify_endpoint`).
    """

    eps_min: float = 1e-10
    rtol: float = 1e-10
    atol: float = 1e-12
    start: float = 0.7
    ladder: float = 10.0
    max_step: float = 0.05
    segment: float = 0.25
    exponent_resolution: float = 5e-3
    log_resolution: float = 0.25

    def __post_init__(self):
        if not (0.0 < self.start < 1.0):
            raise CallerError("start must lie in (0, 1)")
        if not (0.0 < self.eps_min < 1.0 - self.start):
            raise CallerError("need 0 < eps_min < 1 - start")
        if not self.ladder > 1.0:
            raise CallerError("ladder factor must exceed 1")
        if not (0.0 < self.rtol < 1e-2 and self.atol > 0.0):
            raise CallerError("rtol must lie in (0, 1e-2) and atol be positive")

    def with_eps_min(self, eps_min):
        return OdeSolverConfig(**{**asdict(self), "eps_min": eps_min})


@dataclass
class Classification:
    """Verdict at one endpoint.

    ``tail_exponents`` holds, per solution, the fitted tail model
    |u|^2 dr ~ exp(-p s) s^(-kappa) ds with s = ln(1/t). ``log_integrals``
    are ln int_start^(1-eps) |u_j|^2 dr on ``eps_ladder``. ``confidence``
    is the distance of the deciding statistic from its undecided band in
    units of the band width (negative inside the band).
    """

    verdict: str
    tail_exponents: list
    eps_ladder: list
    log_integrals: list
    confidence: float
    wronskian_drift: float
    endpoint: int = 1
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "verdict": self.verdict,
            "tail_exponents": self.tail_exponents,
            "eps_ladder": self.eps_ladder,
            "log_integrals": self.log_integrals,
            "confidence": self.confidence,
            "wronskian_drift": self.wronskian_drift,
            "endpoint": self.endpoint,
            "diagnostics": self.diagnostics,
        }


def _rhs_factory(c2_of_s):
    def rhs(s, y):
        th, _, delta, _, j1, j2, ref_l, ref_s = y
        c2 = c2_of_s(s)
        sn, cs = math.sin(th), math.cos(th)
        s2, c2t = 2.0 * sn * cs, cs * cs - sn * sn
        one = 1.0 + c2
        dth = c2 * cs * cs - sn * sn - sn * cs
        dl1 = sn * cs * one - sn * sn
        ddelta = -one * s2 - c2t
        ratio = math.exp(delta)
        deta = (one * c2t - s2) * ratio
        scale = math.exp(2.0 * (y[1] - ref_l) - (s - ref_s))
        u2 = y[3] * cs - ratio * sn
        return [dth, dl1, ddelta, deta, scale * cs * cs, scale * u2 * u2, 0.0, 0.0]

    return rhs


def _tail_fit(s, g, s_from):
    """Least-squares fit g(s) = A - p s - kappa ln s on s >= s_from."""
    sel = s >= s_from
    ss, gg = s[sel], g[sel]
    if ss.size < 6:
        raise NumericError("too few samples in the asymptotic window", where=float(s_from))
    X = np.column_stack([np.ones_like(ss), -ss, -np.log(ss)])
    coef, *_ = np.linalg.lstsq(X, gg, rcond=None)
    resid = gg - X @ coef
    return float(coef[1]), float(coef[2]), float(np.sqrt(np.mean(resid**2)))


def _solution_verdict(p, kappa, cfg):
    """Divergence of int exp(-p s) s^-kappa ds, with the undecided bands.

    Returns (diverges, margin): diverges is True/False, or None when the fit
    sits inside an undecided band.
    """
    rp, rk = cfg.exponent_resolution, cfg.log_resolution
    if p > rp:
        return False, (p - rp) / rp
    if p < -rp:
        return True, (-p - rp) / rp
    # Logarithmic regime: ds/s still diverges, so kappa <= 1 (within the
    # band) counts as divergence; a faster log decay is not resolvable.
    if kappa <= 1.0 + rk:
        return True, (1.0 + rk - kappa) / rk
    return None, -(kappa - 1.0 - rk) / rk


def _distance_ladder(cfg, t_start):
    eps = []
    e = 1.0
    while True:
        e /= cfg.ladder
        if e <= cfg.eps_min * (1 + 1e-12):
            break
        if e < t_start:
            eps.append(e)
    eps.append(cfg.eps_min)
    return eps


def classify_endpoint(ch: Channel, cfg: Optional[OdeSolverConfig] = None,
                      endpoint: int = 1) -> Classification:
    """Limit point / limit circle verdict for ``ch`` at r = 1 (or r = 0).

    Two solutions with (u, u') = (1, 0) and (0, 1) at ``cfg.start`` are
    integrated to distance ``cfg.eps_min`` from the endpoint. The tail of
    each integrand |u_j|^2 dr is fitted as exp(-p s) s^-kappa ds; p > 0 means
    the integral converges, p < 0 diverges, and |p| within the resolution is
    the logarithmic regime where kappa <= 1 diverges. LimitPoint if one
    solution's integral diverges, LimitCircle if both converge, Borderline
    otherwise.
    """
    cfg = cfg or OdeSolverConfig()
    if endpoint == 1:
        t_start = 1.0 - cfg.start

        def c2_of_s(s):
            t = math.exp(-s)
            return t * t * ch.potential_t(t)

        onset = ch.onset_t
    elif endpoint == 0:
        t_start = cfg.start

        if ch.potential_r is not None:
            def c2_of_s(s):
                x = math.exp(-s)
                return x * x * ch.potential_r(x)
        else:
            def c2_of_s(s):
                x = math.exp(-s)
                return x * x * ch.potential_t(1.0 - x)

        onset = None
    else:
        raise CallerError("endpoint must be 0 or 1")
    if cfg.eps_min >= t_start:
        raise CallerError("eps_min must be closer to the endpoint than the anchor")

    s0 = -math.log(t_start)
    s_end = -math.log(cfg.eps_min)
    ladder = _distance_ladder(cfg, t_start)
    ladder_s = [-math.log(e) for e in ladder]
    breaks = set(ladder_s)
    if endpoint == 1 and ch.field is not None:
        for tc in ch.field.radial.cutoffs_t:
            sc = -math.log(tc)
            if s0 < sc < s_end:
                breaks.add(sc)
    n_seg = max(1, int(math.ceil((s_end - s0) / cfg.segment)))
    breaks.update(np.linspace(s0, s_end, n_seg + 1)[1:-1].tolist())
    knots = [s0] + sorted(b for b in breaks if s0 < b < s_end) + [s_end]

    rhs = _rhs_factory(c2_of_s)
    # theta, ln R11, ln R22 - ln R11, eta, J1, J2, (segment references)
    state = np.array([0.0, 0.0, -s0, 0.0, 0.0, 0.0, 0.0, s0])
    log_I = [-math.inf, -math.inf]
    samples_s, samples_g = [], [[], []]
    ladder_logI = {}
    wr0 = 2 * state[1] + state[2] + s0
    wr_drift = 0.0
    for sa, sb in zip(knots[:-1], knots[1:]):
        state[4:6] = 0.0
        state[6], state[7] = state[1], sa
        sol = solve_ivp(rhs, (sa, sb), state, method="DOP853", rtol=cfg.rtol,
                        atol=cfg.atol, max_step=cfg.max_step)
        if not sol.success:
            t_at = math.exp(-float(sol.t[-1]))
            where = 1.0 - t_at if endpoint == 1 else t_at
            raise NumericError(f"integration failed: {sol.message}", where=where)
        y = sol.y[:, -1]
        base = 2.0 * state[1] - sa
        for j in (0, 1):
            if y[4 + j] > 0.0:
                log_I[j] = np.logaddexp(log_I[j], base + math.log(y[4 + j]))
        state = y.copy()
        th, l1, delta, eta = state[:4]
        cs, sn = math.cos(th), math.sin(th)
        u2 = eta * cs - math.exp(delta) * sn
        samples_s.append(sb)
        samples_g[0].append(2 * l1 - sb + math.log(max(cs * cs, 1e-300)))
        samples_g[1].append(2 * l1 - sb + math.log(max(u2 * u2, 1e-300)))
        wr_drift = max(wr_drift, abs(2 * l1 + delta + sb - wr0))
        if any(abs(sb - ls) < 1e-12 for ls in ladder_s):
            ladder_logI[sb] = list(log_I)

    s_arr = np.array(samples_s)
    s_on = s0 if onset is None else max(s0, -math.log(onset))
    s_from = s_on + 0.4 * (s_end - s_on)
    tails, verdicts, margins = [], [], []
    for j in (0, 1):
        p, kappa, rms = _tail_fit(s_arr, np.array(samples_g[j]), s_from)
        div, margin = _solution_verdict(p, kappa, cfg)
        tails.append({"p": p, "kappa": kappa, "fit_rms": rms})
        verdicts.append(div)
        margins.append(margin)
    if any(v is True for v in verdicts):
        verdict = LIMIT_POINT
        confidence = max(m for v, m in zip(verdicts, margins) if v is True)
    elif all(v is False for v in verdicts):
        verdict = LIMIT_CIRCLE
        confidence = min(margins)
    else:
        verdict = BORDERLINE
        confidence = max(m for v, m in zip(verdicts, margins) if v is None)

    eps_out = [e for e, ls in zip(ladder, ladder_s) if ls in ladder_logI]
    logI_out = [[ladder_logI[ls][j] for ls in ladder_s if ls in ladder_logI] for j in (0, 1)]
    cauchy = [
        float(np.exp(logI_out[j][-1] - logI_out[j][-2]) - 1.0) if len(logI_out[j]) > 1 else None
        for j in (0, 1)
    ]
    return Classification(
        verdict=verdict,
        tail_exponents=tails,
        eps_ladder=eps_out,
        log_integrals=logI_out,
        confidence=float(confidence),
        wronskian_drift=float(wr_drift),
        endpoint=endpoint,
        diagnostics={
            "fit_window_s": [s_from, s_end],
            "last_relative_increment": cauchy,
            "segments": len(knots) - 1,
        },
    )


MIN_ENDPOINT0_EPS = 1e-12


@dataclass
class OperatorReport:
    """Per-channel verdicts at r = 1 plus the aggregate."""

    field: dict
    kind: str
    m: list
    per_channel: list
    aggregate: str
    note: str
    endpoint0: str = "analytic"

    def to_json(self):
        return {
            "field": self.field,
            "kind": self.kind,
            "m": self.m,
            "per_channel": self.per_channel,
            "aggregate": self.aggregate,
            "note": self.note,
            "endpoint0": self.endpoint0,
        }


def parse_m_range(m_range):
    """Inclusive (lo, hi) pair, "a..b" string or iterable of ints -> sorted list."""
    if isinstance(m_range, str):
        try:
            lo, hi = (int(x) for x in m_range.split(".."))
        except ValueError:
            raise CallerError(f"m range must look like 'a..b', got {m_range!r}") from None
        ms = list(range(lo, hi + 1))
    elif isinstance(m_range, tuple) and len(m_range) == 2:
        ms = list(range(int(m_range[0]), int(m_range[1]) + 1))
    else:
        ms = sorted({int(m) for m in m_range})
    if not ms:
        raise CallerError("m range is empty")
    if max(abs(m) for m in ms) > 64:
        raise CallerError("|m| must not exceed 64")
    return ms


def worker_count(n_tasks):
    env = os.environ.get("DISC_CONFINE_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise CallerError("DISC_CONFINE_THREADS must be a positive integer") from None
        if cap < 1:
            raise CallerError("DISC_CONFINE_THREADS must be a positive integer")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def classify_operator(spec, kind="schrodinger", m_range=(-5, 5),
                      cfg: Optional[OdeSolverConfig] = None,
                      check_endpoint0: bool = False) -> OperatorReport:
    """Classify every channel in ``m_range`` at r = 1.

    Endpoint 0 is limit point for every channel because q_m >= 3/(4 r^2);
    ``check_endpoint0`` additionally runs the oracle there. Aggregate is
    EssentiallySelfAdjoint iff all tested channels are LimitPoint,
    NotEssentiallySelfAdjoint iff some channel is LimitCircle, else
    Undetermined. Only the listed m are tested.
    """
    kind = check_kind(kind)
    spec = spec if isinstance(spec, FieldSpec) else FieldSpec(spec)
    cfg = cfg or OdeSolverConfig()
    ms = parse_m_range(m_range)
    cfg0 = None
    if check_endpoint0:
        cfg0 = OdeSolverConfig(**{**asdict(cfg), "start": 1.0 - cfg.start,
                                  "eps_min": max(cfg.eps_min, MIN_ENDPOINT0_EPS)})

    def one(m):
        ch = build_channel(spec, m, kind)
        res = classify_endpoint(ch, cfg)
        entry = {
            "m": m,
            "verdict": res.verdict,
            "tail_exponents": res.tail_exponents,
            "confidence": res.confidence,
        }
        if cfg0 is not None:
            entry["endpoint0_verdict"] = classify_endpoint(ch, cfg0, endpoint=0).verdict
        return entry

    with ThreadPoolExecutor(max_workers=worker_count(len(ms))) as pool:
        per_channel = list(pool.map(one, ms))  # map keeps m order

    verdicts = [e["verdict"] for e in per_channel]
    if check_endpoint0:
        verdicts += [e["endpoint0_verdict"] for e in per_channel]
    if all(v == LIMIT_POINT for v in verdicts):
        aggregate = ESA
    elif any(v == LIMIT_CIRCLE for v in verdicts):
        aggregate = NOT_ESA
    else:
        aggregate = UNDETERMINED
    note = (f"only the {len(ms)} channels m = {ms[0]}..{ms[-1]} were tested; "
            "the verdict for all m is an extrapolation")
    return OperatorReport(spec.to_json(), kind, ms, per_channel, aggregate, note,
                          "numeric" if check_endpoint0 else "analytic")
