"""Partial-wave channels and the non-radial perturbation bound.

After splitting into angular momenta m and conjugating with r^(-1/2), each
channel is the half-line problem -u'' + q_m(r) u on (0, 1) with

    Schrodinger:  q_m(r) = 3/(4 r^2) + (r^2 a(r) - m)^2 / r^2
    Pauli:        q_m(r) = (Schrodinger q_m)(r) - B(r).

The inner scalar potential 1/r^2 is already folded into these formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import quadrature
from .errors import CallerError, DomainError, HypothesisViolation, NumericError
from .fields import FieldSpec, NonradialPerturbation, RadialField
from .gauge import DEFAULT_TOL, GaugeProfile, gauge_profile

KINDS = ("schrodinger", "pauli")


def check_kind(kind) -> str:
    kind = str(kind).lower()
    if kind not in KINDS:
        raise CallerError(f"operator kind must be one of {KINDS}, got {kind!r}")
    return kind


@dataclass(frozen=True)
class Channel:
    """One partial-wave problem.

    ``potential_t`` gives q_m at distance ``t = 1 - r`` from the boundary
    (scalar or array). ``onset_t`` marks where the field switches on, which
    the endpoint oracle uses to place its asymptotic fitting window.
    """

    m: int
    kind: str
    potential_t: Callable
    field: Optional[FieldSpec] = None
    profile: Optional[GaugeProfile] = None
    onset_t: Optional[float] = None
    label: str = ""
    # Same potential keyed by the radius itself; exact near r = 0.
    potential_r: Optional[Callable] = None

    def __call__(self, r):
        return eval_potential(self, r)


def build_channel(spec, m: int, kind="schrodinger", tol: float = DEFAULT_TOL) -> Channel:
    """Channel m of the Schrodinger or Pauli operator for a radial field.

    Any non-radial perturbation on ``spec`` is ignored here; see
    :func:`perturbation_bounds`.
    """
    kind = check_kind(kind)
    if int(m) != m:
        raise CallerError("m must be an integer")
    m = int(m)
    spec = spec if isinstance(spec, FieldSpec) else FieldSpec(spec)
    radial = spec.radial
    prof = gauge_profile(spec, tol)
    r2a_t = prof.r2a_t
    field_t = radial.field_t

    if kind == "schrodinger":
        def potential_t(t):
            if np.ndim(t) == 0:
                r = 1.0 - t
                return (0.75 + (r2a_t(t) - m) ** 2) / (r * r)
            r = 1.0 - np.asarray(t)
            return (0.75 + (r2a_t(t) - m) ** 2) / r**2
    else:
        def potential_t(t):
            if np.ndim(t) == 0:
                r = 1.0 - t
                return (0.75 + (r2a_t(t) - m) ** 2) / (r * r) - field_t(t)
            r = 1.0 - np.asarray(t)
            return (0.75 + (r2a_t(t) - m) ** 2) / r**2 - field_t(t)

    pauli = kind == "pauli"

    def potential_r(r):
        t = 1.0 - r
        q = (0.75 + (r2a_t(t) - m) ** 2) / (r * r)
        return q - field_t(t) if pauli else q

    onset = max(radial.cutoffs_t) if radial.cutoffs_t else None
    return Channel(m, kind, potential_t, spec, prof, onset,
                   f"{radial.name}:{kind}:m={m}", potential_r)


def synthetic_channel(potential_t: Callable, label: str = "synthetic",
                      onset_t: Optional[float] = None) -> Channel:
    """Channel driven by an arbitrary potential given in the distance variable."""
    return Channel(0, "synthetic", potential_t, onset_t=onset_t, label=label)


def inverse_square_channel(c: float) -> Channel:
    """Channel with q(r) = c / (1 - r)^2, the model problem at the endpoint."""

    def q(t):
        return c / (t * t) if np.ndim(t) == 0 else c / np.asarray(t) ** 2

    return synthetic_channel(q, label=f"inverse-square:c={c}")


def eval_potential(ch: Channel, r):
    """q_m(r) for r (scalar or array) in (0, 1)."""
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0.0)) or np.any(r >= 1.0):
        raise DomainError("radius must lie strictly inside (0, 1)")
    t = 1.0 - r
    out = ch.potential_t(float(t) if t.ndim == 0 else t)
    return float(out) if np.ndim(out) == 0 else np.asarray(out)


# Non-radial perturbation ---------------------------------------------------

@dataclass(frozen=True)
class PerturbationBound:
    """Grid estimate of sup |a1| and sup |d a1/d theta|.

    ``A1 = a1_sup + da1_sup``; ``d_star`` is the largest d with A1 * d <= 1/2
    (``inf`` when A1 = 0). The sups are taken over ``theta_points`` angles and
    ``radius_points`` radii.
    """

    a1_sup: float
    da1_sup: float
    A1: float
    d_star: float
    theta_points: int
    radius_points: int
    radial_integrals_max: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def relative_bound(self) -> float:
        return self.A1 * self.d_star if math.isfinite(self.d_star) else 0.0

    def to_json(self):
        return {
            "a1_sup": self.a1_sup,
            "da1_sup": self.da1_sup,
            "A1": self.A1,
            "d_star": None if math.isinf(self.d_star) else self.d_star,
            "theta_points": self.theta_points,
            "radius_points": self.radius_points,
            "radial_integrals_max": self.radial_integrals_max,
            "notes": list(self.notes),
        }


# sigma = ln 1/(1 - r) ladder for the radial integrability check
_BS1_LADDER = np.array([0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0])


def _radial_integral_ladder(fn, theta, tol):
    """Increments of int |fn(r, theta)| dr over the sigma ladder."""

    def integrand(sigma):
        t = np.exp(-sigma)
        # Blow-ups are reported by the quadrature as non-finite panels.
        with np.errstate(all="ignore"):
            vals = np.broadcast_to(fn(-np.expm1(-sigma), theta), np.shape(sigma))
            return np.abs(vals) * t

    return quadrature.integrate_panels(integrand, _BS1_LADDER, rtol=tol, atol=1e-300)


def _to_tolerance(x, tol):
    """Round to the significant digits the quadrature tolerance supports."""
    if x == 0.0 or not math.isfinite(x):
        return x
    digits = int(math.ceil(-math.log10(tol))) + 2
    return float(f"{x:.{digits}g}")


def perturbation_bounds(p: NonradialPerturbation, theta_grid: int = 256,
                        tol: float = 1e-8) -> PerturbationBound:
    """Check radial integrability of B1, d_theta B1 and bound the gauge part a1.

    Raises HypothesisViolation when either radial integral cannot be shown
    finite: the increment over the last ladder rung (1 - r from 1.3e-14 down
    to 1.6e-28) must be negligible against the total.
    """
    if theta_grid < 4:
        raise CallerError("theta_grid must be at least 4")
    thetas = 2.0 * np.pi * np.arange(theta_grid) / theta_grid
    worst = 0.0
    for fn, name in ((p.b1, "B1"), (p.dtheta_b1, "d_theta B1")):
        for th in thetas:
            try:
                incr = _radial_integral_ladder(fn, th, tol)
            except NumericError as exc:
                raise HypothesisViolation(
                    f"int_0^1 |{name}| dr is not finite at theta={th:.6g}"
                ) from exc
            total = float(incr.sum())
            if not math.isfinite(total) or incr[-1] > 1e-6 * max(total, 1e-300) + 1e-12:
                raise HypothesisViolation(
                    f"int_0^1 |{name}| dr does not converge at theta={th:.6g}"
                )
            worst = max(worst, total)

    # a1(r, theta) = r^-2 int_0^r u B1(u, theta) du on a sigma grid of radii.
    edges = np.concatenate([np.arange(0.0, 5.0, 0.05), np.arange(5.0, 40.0 + 1e-9, 0.25)])
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    sig = 0.5 * (hi + lo)[:, None] + half[:, None] * quadrature.NODES
    u = -np.expm1(-sig)
    jac = np.exp(-sig) * u
    w = half[:, None] * quadrature.KRONROD_WEIGHTS
    r = -np.expm1(-hi)
    sups = []
    for fn in (p.b1, p.dtheta_b1):
        vals = np.broadcast_to(fn(u[..., None], thetas[None, None, :]), u.shape + thetas.shape)
        panel = np.einsum("pk,pkj->pj", w * jac, vals)
        cum = np.cumsum(panel, axis=0)
        a1 = cum / r[:, None] ** 2
        if not np.all(np.isfinite(a1)):
            raise HypothesisViolation("a1 is not finite on the grid")
        sups.append(_to_tolerance(float(np.max(np.abs(a1))), tol))
    a1_sup, da1_sup = sups
    A1 = a1_sup + da1_sup
    d_star = math.inf if A1 == 0.0 else 0.5 / A1
    notes = [f"sup over {theta_grid} angles x {r.size} radii (1 - r >= 4.2e-18)",
             f"sups rounded to the digits supported by tol={tol:g}"]
    return PerturbationBound(a1_sup, da1_sup, A1, d_star, theta_grid, r.size, worst, notes)
