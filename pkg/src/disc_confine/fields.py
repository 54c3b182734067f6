"""Magnetic field families on the unit disc.

Radial families are written in terms of the distance to the boundary,
``t = 1 - r``, so that values close to ``r = 1`` stay accurate; ``eval_field``
is the radius-based entry point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, SpecError

SQRT3 = math.sqrt(3.0)
CRITICAL_CUTOFF_T = math.exp(-4.0)
OPTIMALITY_CUTOFF_T = math.exp(-1.0)
# Distances below this are treated as underflow.
MIN_DISTANCE = 1e-300


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0.0)) or np.any(t >= 1.0):
        raise DomainError("radius must lie strictly inside (0, 1)")
    if np.any(t < MIN_DISTANCE):
        raise DomainError("distance to the boundary underflows (< 1e-300)")
    return t


def _log_inv(t):
    return -np.log(t)


class RadialField:
    """Common interface of the radial families.

    Subclasses implement ``_field_t`` on a validated array of distances.
    """

    name = "abstract"
    # Distances at which B or its derivative jumps.
    cutoffs_t: tuple = ()

    def field_t(self, t):
        """B as a function of the distance ``t = 1 - r`` to the boundary."""
        t = _check_t(t)
        out = self._field_t(t)
        return float(out) if out.ndim == 0 else out

    def _field_t(self, t):
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def max_distance_supported(self) -> float:
        """Smallest ``t`` for which the family is defined (tabulated data ends)."""
        return MIN_DISTANCE


@dataclass(frozen=True)
class Zero(RadialField):
    name = "zero"

    def _field_t(self, t):
        return np.zeros_like(t)


@dataclass(frozen=True)
class Constant(RadialField):
    b0: float = 1.0
    name = "constant"

    def __post_init__(self):
        if not (self.b0 >= 0.0 and math.isfinite(self.b0)):
            raise SpecError("constant field strength must be finite and >= 0")

    def _field_t(self, t):
        return np.full_like(t, self.b0)

    def params(self):
        return {"b0": self.b0}


@dataclass(frozen=True)
class PowerLaw(RadialField):
    """B = alpha / (1 - r)^2 for r > r0, zero below."""

    alpha: float = 1.0
    r0: float = 0.5
    name = "power"

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise SpecError("alpha must be finite and >= 0")
        if not (0.0 <= self.r0 < 1.0):
            raise SpecError("r0 must lie in [0, 1)")

    @property
    def cutoffs_t(self):
        return (1.0 - self.r0,) if self.r0 > 0.0 else ()

    def _field_t(self, t):
        with np.errstate(over="ignore", divide="ignore"):
            return np.where(t < 1.0 - self.r0, self.alpha / t / t, 0.0)

    def params(self):
        return {"alpha": self.alpha, "r0": self.r0}


@dataclass(frozen=True)
class Critical(RadialField):
    """Threshold field for spinless confinement, supported on 1 - r <= e^-4."""

    name = "critical"
    cutoffs_t = (CRITICAL_CUTOFF_T,)

    def _field_t(self, t):
        L = _log_inv(t)
        # Factored so that t^2 underflow gives +inf rather than inf - inf.
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            val = (SQRT3 / 2.0 - (1.0 / SQRT3) / L) / t / t
        return np.where(t <= CRITICAL_CUTOFF_T, val, 0.0)


@dataclass(frozen=True)
class CriticalPauli(RadialField):
    """Spin-1/2 analogue, supported on 1 - r <= exp(-2(alpha + 1))."""

    alpha: float = 1.5
    name = "critical-pauli"

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise SpecError("alpha must be finite and > 0")

    @property
    def cutoff_t(self):
        return math.exp(-2.0 * (self.alpha + 1.0))

    @property
    def cutoffs_t(self):
        return (self.cutoff_t,)

    def _field_t(self, t):
        L = _log_inv(t)
        a = self.alpha
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            val = (a - (1.0 / (2.0 * a)) / L) / t / t
        return np.where(t <= self.cutoff_t, val, 0.0)

    def params(self):
        return {"alpha": self.alpha}


@dataclass(frozen=True)
class SubleadingCritical(RadialField):
    """B = lead/(1-r)^2 - sub/((1-r)^2 ln 1/(1-r)) on 1 - r <= t_cut.

    Generalises the two critical families; used to probe the subleading
    coefficient.
    """

    lead: float = SQRT3 / 2.0
    sub: float = 1.0 / SQRT3
    t_cut: float = CRITICAL_CUTOFF_T
    name = "subleading"

    def __post_init__(self):
        if not (0.0 < self.t_cut <= math.exp(-1.0)):
            raise SpecError("t_cut must lie in (0, 1/e]")
        L = -math.log(self.t_cut)
        if self.lead - self.sub / L < 0.0:
            raise SpecError("field would be negative at its cutoff")

    @property
    def cutoffs_t(self):
        return (self.t_cut,)

    def _field_t(self, t):
        L = _log_inv(t)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            val = (self.lead - self.sub / L) / t / t
        return np.where(t <= self.t_cut, val, 0.0)

    def params(self):
        return {"lead": self.lead, "sub": self.sub, "t_cut": self.t_cut}


@dataclass(frozen=True)
class OptimalityGauge(RadialField):
    """Field generated by the explicit gauge profile used for optimality.

    Only ``1/sqrt(3) < d <= 6`` is accepted; above 6 the profile stops being
    monotone and B can turn negative.
    """

    d: float = 1.0
    name = "optimality"
    cutoffs_t = (OPTIMALITY_CUTOFF_T,)

    def __post_init__(self):
        if not (1.0 / SQRT3 < self.d <= 6.0):
            raise SpecError("d must satisfy 1/sqrt(3) < d <= 6")

    def _field_t(self, t):
        if np.any(np.abs(t - OPTIMALITY_CUTOFF_T) <= 4 * np.spacing(OPTIMALITY_CUTOFF_T)):
            raise DomainError("field is undefined at the gauge cutoff (derivative jump)")
        r = 1.0 - t
        a = optimality_profile_t(self.d, t)
        da = optimality_profile_derivative_t(self.d, t)
        return np.where(t < OPTIMALITY_CUTOFF_T, 2.0 * a + r * da, 0.0)

    def params(self):
        return {"d": self.d}


@dataclass(frozen=True)
class Tabulated(RadialField):
    """Monotone cubic (PCHIP) interpolation of (r, B) samples.

    Below the first sample the first value is held; beyond the last sample
    evaluation is a domain error (no extrapolation).
    """

    samples: tuple = ()
    name = "tabulated"
    _interp: Optional[PchipInterpolator] = field(
        default=None, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        pts = tuple((float(r), float(b)) for r, b in self.samples)
        if len(pts) < 2:
            raise SpecError("tabulated field needs at least 2 samples")
        pts = tuple(sorted(pts))
        rs = np.array([p[0] for p in pts])
        bs = np.array([p[1] for p in pts])
        if np.any(np.diff(rs) <= 0.0):
            raise SpecError("tabulated radii must be distinct")
        if rs[0] < 0.0 or rs[-1] >= 1.0:
            raise SpecError("tabulated radii must lie in [0, 1)")
        if np.any(bs < 0.0) or not np.all(np.isfinite(bs)):
            raise SpecError("tabulated field values must be finite and >= 0")
        object.__setattr__(self, "samples", pts)
        object.__setattr__(self, "_interp", PchipInterpolator(rs, bs, extrapolate=False))

    @property
    def r_last(self):
        return self.samples[-1][0]

    def max_distance_supported(self):
        return 1.0 - self.r_last

    def _field_t(self, t):
        r = 1.0 - t
        if np.any(r > self.r_last):
            raise DomainError(
                f"tabulated field is not defined beyond r = {self.r_last}"
            )
        r0, b0 = self.samples[0]
        inside = np.clip(r, r0, self.r_last)
        return np.where(r < r0, b0, self._interp(inside))

    def params(self):
        return {"samples": [list(p) for p in self.samples]}


def optimality_profile_t(d, t):
    """Gauge profile a as a function of the distance t (zero for t > 1/e)."""
    t = np.asarray(t, dtype=float)
    L = -np.log(t)
    val = (
        (SQRT3 / 2.0) / t
        - 0.5 * (d + 1.0 / SQRT3) / (t * L)
        - math.e * (1.0 / SQRT3 - d / 2.0)
    )
    return np.where(t <= OPTIMALITY_CUTOFF_T, val, 0.0)


def optimality_profile_derivative_t(d, t):
    """Radial derivative da/dr of the optimality profile (inside the support)."""
    t = np.asarray(t, dtype=float)
    L = -np.log(t)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        val = (SQRT3 / 2.0 - 0.5 * (d + 1.0 / SQRT3) * (L - 1.0) / L**2) / t / t
    return np.where(t <= OPTIMALITY_CUTOFF_T, val, 0.0)


@dataclass(frozen=True)
class NonradialPerturbation:
    """Non-radial part B1(r, theta) together with its angular derivative."""

    b1: Callable
    dtheta_b1: Callable
    description: dict = field(default_factory=dict, compare=False, hash=False)


def separable_perturbation(amplitude=1.0, mode=1, radial_power=0.0):
    """B1 = amplitude * (1 - r)^(-radial_power) * cos(mode * theta)."""

    def b1(r, theta):
        return amplitude * (1.0 - r) ** (-radial_power) * np.cos(mode * theta)

    def dtheta_b1(r, theta):
        return -amplitude * mode * (1.0 - r) ** (-radial_power) * np.sin(mode * theta)

    desc = {
        "kind": "separable",
        "amplitude": amplitude,
        "mode": mode,
        "radial_power": radial_power,
    }
    return NonradialPerturbation(b1, dtheta_b1, desc)


@dataclass(frozen=True)
class FieldSpec:
    radial: RadialField
    perturbation: Optional[NonradialPerturbation] = None

    @property
    def family(self) -> str:
        return self.radial.name

    def to_json(self) -> dict:
        return {
            "family": self.radial.name,
            "params": self.radial.params(),
            "perturbation": None
            if self.perturbation is None
            else dict(self.perturbation.description),
        }


_FAMILIES = {
    "zero": lambda p: Zero(),
    "constant": lambda p: Constant(float(p.get("b0", 1.0))),
    "power": lambda p: PowerLaw(float(p.get("alpha", 1.0)), float(p.get("r0", 0.5))),
    "critical": lambda p: Critical(),
    "critical-pauli": lambda p: CriticalPauli(float(p.get("alpha", 1.5))),
    "optimality": lambda p: OptimalityGauge(float(p.get("d", 1.0))),
    "tabulated": lambda p: Tabulated(tuple(tuple(s) for s in p.get("samples", ()))),
    "subleading": lambda p: SubleadingCritical(
        float(p.get("lead", SQRT3 / 2)),
        float(p.get("sub", 1 / SQRT3)),
        float(p.get("t_cut", CRITICAL_CUTOFF_T)),
    ),
}


def field_from_json(doc: dict) -> FieldSpec:
    """Build a FieldSpec from ``{"family", "params", "perturbation"}``."""
    if not isinstance(doc, dict) or "family" not in doc:
        raise SpecError("field document needs a 'family' key")
    fam = doc["family"]
    if fam not in _FAMILIES:
        raise SpecError(f"unknown field family {fam!r}")
    params = doc.get("params") or {}
    if not isinstance(params, dict):
        raise SpecError("'params' must be an object")
    try:
        radial = _FAMILIES[fam](params)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad parameters for {fam}: {exc}") from exc
    pert = doc.get("perturbation")
    if pert is not None:
        if pert.get("kind", "separable") != "separable":
            raise SpecError("only separable perturbations can be read from JSON")
        pert = separable_perturbation(
            float(pert.get("amplitude", 1.0)),
            int(pert.get("mode", 1)),
            float(pert.get("radial_power", 0.0)),
        )
    return FieldSpec(radial, pert)


def eval_field(spec, r):
    """Radial field strength at radius ``r`` (scalar or array) in (0, 1)."""
    radial = spec.radial if isinstance(spec, FieldSpec) else spec
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0.0)) or np.any(r >= 1.0):
        raise DomainError("radius must lie strictly inside (0, 1)")
    return radial.field_t(1.0 - r)


def optimality_gauge_profile(d, r):
    """Gauge profile a(r) of the optimality construction."""
    if not d > 1.0 / SQRT3:
        raise SpecError("d must exceed 1/sqrt(3)")
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0.0)) or np.any(r >= 1.0):
        raise DomainError("radius must lie strictly inside (0, 1)")
    out = optimality_profile_t(d, 1.0 - r)
    return float(out) if out.ndim == 0 else out


def optimality_field(d, r):
    """B(r) = 2a(r) + r a'(r) for the optimality gauge profile."""
    return eval_field(FieldSpec(OptimalityGauge(d)), r)
