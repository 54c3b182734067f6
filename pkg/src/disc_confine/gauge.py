"""Transversal-gauge radial profile a(r) and its checks.

For a radial field the transversal gauge reduces to the scalar profile

    a(r) = int_0^1 t B(t r) dt,   i.e.   r^2 a(r) = int_0^r u B(u) du,

and conversely B = 2a + r a'. The 2-D vector potential A = a(r) (-x2, x1)
is perpendicular to x by construction and is never materialised.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import quadrature
from .errors import CallerError, DomainError, SpecError
from .fields import (
    SQRT3,
    CRITICAL_CUTOFF_T,
    Constant,
    Critical,
    CriticalPauli,
    FieldSpec,
    OptimalityGauge,
    PowerLaw,
    RadialField,
    Zero,
    optimality_profile_t,
)

DEFAULT_TOL = 1e-10
# Cache nodes are uniform in sigma = ln 1/(1 - r): fine near the centre,
# coarser where the profile is exponential in sigma.
_FINE_STEP, _FINE_END, _COARSE_STEP = 0.005, 5.0, 0.02
DEFAULT_SIGMA_MAX = 70.0


def _radial(spec) -> RadialField:
    return spec.radial if isinstance(spec, FieldSpec) else spec


@dataclass(frozen=True)
class _HermiteTable:
    """Piecewise cubic Hermite data for r^2 a on a sigma grid."""

    nodes: np.ndarray
    values: np.ndarray
    dleft: np.ndarray  # derivative at the left end of each panel
    dright: np.ndarray  # derivative at the right end of each panel

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        k = np.clip(np.searchsorted(self.nodes, sigma, side="right") - 1, 0, self.nodes.size - 2)
        x0 = self.nodes[k]
        h = self.nodes[k + 1] - x0
        s = (sigma - x0) / h
        return (
            self.values[k] * (1 + 2 * s) * (1 - s) ** 2
            + h * self.dleft[k] * s * (1 - s) ** 2
            + self.values[k + 1] * s * s * (3 - 2 * s)
            + h * self.dright[k] * s * s * (s - 1)
        )

    def scalar(self, sigma: float) -> float:
        nodes = self._node_list
        k = bisect.bisect_right(nodes, sigma) - 1
        k = min(max(k, 0), len(nodes) - 2)
        x0 = nodes[k]
        h = nodes[k + 1] - x0
        s = (sigma - x0) / h
        v = self._value_list
        return (
            v[k] * (1 + 2 * s) * (1 - s) ** 2
            + h * self._dl_list[k] * s * (1 - s) ** 2
            + v[k + 1] * s * s * (3 - 2 * s)
            + h * self._dr_list[k] * s * s * (s - 1)
        )

    def __post_init__(self):
        # Plain lists make the scalar path several times faster than numpy.
        object.__setattr__(self, "_node_list", self.nodes.tolist())
        object.__setattr__(self, "_value_list", self.values.tolist())
        object.__setattr__(self, "_dl_list", self.dleft.tolist())
        object.__setattr__(self, "_dr_list", self.dright.tolist())


def _sigma_grid(sigma_max, breaks):
    fine = np.arange(0.0, min(_FINE_END, sigma_max), _FINE_STEP)
    coarse = np.arange(_FINE_END, sigma_max, _COARSE_STEP) if sigma_max > _FINE_END else []
    grid = np.unique(np.concatenate([fine, coarse, [sigma_max]]))
    for b in breaks:
        grid = grid[np.abs(grid - b) > 0.1 * _FINE_STEP]
    return np.unique(np.concatenate([grid, list(breaks)]))


def _limit_monotone(values, nodes, dl, dr):
    """Fritsch-Carlson limiter so each Hermite panel stays monotone."""
    h = np.diff(nodes)
    delta = np.diff(values) / h
    dl, dr = dl.copy(), dr.copy()
    flat = delta == 0.0
    dl[flat] = 0.0
    dr[flat] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(flat, 0.0, dl / delta)
        b = np.where(flat, 0.0, dr / delta)
    dl[a < 0] = 0.0
    dr[b < 0] = 0.0
    rad = np.hypot(np.maximum(a, 0), np.maximum(b, 0))
    over = rad > 3.0
    tau = np.where(over, 3.0 / np.where(over, rad, 1.0), 1.0)
    dl[over] *= tau[over]
    dr[over] *= tau[over]
    return dl, dr


def _build_table(radial: RadialField, tol: float, sigma_max: float) -> _HermiteTable:
    t_floor = radial.max_distance_supported()
    if t_floor > 0.0:
        sigma_max = min(sigma_max, -math.log(t_floor))
    breaks = sorted(
        -math.log(tc) for tc in radial.cutoffs_t if 0.0 < -math.log(tc) < sigma_max
    )
    nodes = _sigma_grid(sigma_max, breaks)

    def integrand(sigma):
        t = np.exp(-sigma)
        return -np.expm1(-sigma) * radial.field_t(t) * t

    incr = quadrature.integrate_panels(integrand, nodes, rtol=tol, atol=1e-300)
    values = np.concatenate([[0.0], np.cumsum(incr)])
    nudge = 1e-12 * np.maximum(1.0, nodes)
    left = nodes[:-1] + nudge[:-1]
    right = nodes[1:] - nudge[1:]
    dl = integrand(left)
    dr = integrand(right)
    dl, dr = _limit_monotone(values, nodes, dl, dr)
    return _HermiteTable(nodes, values, dl, dr)


class GaugeProfile:
    """Radial transversal-gauge profile.

    ``r2a_t(t)`` evaluates r^2 a at distance ``t = 1 - r`` from the boundary;
    ``r2a(r)`` and ``a(r)`` are the radius-based views. ``source`` is
    ``"closed-form"`` or ``"quadrature"``; for the latter ``tolerance`` is the
    relative tolerance used to fill the cache.
    """

    def __init__(self, radial, r2a_t: Callable, source: str, tolerance=None,
                 t_min: float = 1e-300):
        self.radial = radial
        self._r2a_t = r2a_t
        self.source = source
        self.tolerance = tolerance
        self.t_min = t_min

    def __repr__(self):
        return f"GaugeProfile({self.radial!r}, source={self.source!r})"

    def r2a_t(self, t):
        if np.ndim(t) == 0:
            t = float(t)
            if not (self.t_min <= t < 1.0):
                raise DomainError(f"distance {t!r} outside the profile's range")
            return self._r2a_t(t)
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_min) or np.any(t >= 1.0):
            raise DomainError("distance outside the profile's range")
        return self._r2a_t(t)

    def r2a(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~(r > 0.0)) or np.any(r >= 1.0):
            raise DomainError("radius must lie strictly inside (0, 1)")
        out = self.r2a_t(1.0 - r)
        return float(out) if np.ndim(out) == 0 else out

    def a(self, r):
        rs = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.asarray(self.r2a(rs), dtype=float) / rs**2
        # r^2 a ~ r^2 near the centre; evaluate a = int_0^1 t B(t r) dt directly.
        for i in np.flatnonzero(rs < 1e-3):
            ri = rs[i]
            out[i] = quadrature.integrate(
                lambda x: x * self.radial.field_t(1.0 - x * ri), 0.0, 1.0, rtol=1e-12
            )
        return float(out[0]) if np.ndim(r) == 0 else out.reshape(np.shape(r))


def _closed_form(radial: RadialField) -> Optional[Callable]:
    if isinstance(radial, Zero):
        return lambda t: 0.0 * t
    if isinstance(radial, Constant):
        b0 = radial.b0
        return lambda t: 0.5 * b0 * (1.0 - t) ** 2
    if isinstance(radial, PowerLaw):
        alpha, t0 = radial.alpha, 1.0 - radial.r0

        def power(t):
            if np.ndim(t) == 0:
                if t >= t0:
                    return 0.0
                return alpha * (1.0 / t - 1.0 / t0 + math.log(t / t0))
            return np.where(
                t < t0, alpha * (1.0 / t - 1.0 / t0 + np.log(t / t0)), 0.0
            )

        return power
    if isinstance(radial, OptimalityGauge):
        d = radial.d

        def optimal(t):
            out = (1.0 - t) ** 2 * optimality_profile_t(d, t)
            return float(out) if np.ndim(out) == 0 else out

        return optimal
    return None


@functools.lru_cache(maxsize=64)
def _cached_profile(radial, tol, method, sigma_max):
    if method in ("auto", "closed-form"):
        cf = _closed_form(radial)
        if cf is not None:
            return GaugeProfile(radial, cf, "closed-form")
        if method == "closed-form":
            raise CallerError(f"no closed form for family {radial.name!r}")
    table = _build_table(radial, tol, sigma_max)
    sig_end = float(table.nodes[-1])

    def r2a_t(t):
        if np.ndim(t) == 0:
            return table.scalar(-math.log(t))
        return table(-np.log(t))

    return GaugeProfile(radial, r2a_t, "quadrature", tol, t_min=math.exp(-sig_end))


def gauge_profile(spec, tol: float = DEFAULT_TOL, method: str = "auto",
                  sigma_max: float = DEFAULT_SIGMA_MAX) -> GaugeProfile:
    """Transversal-gauge profile of the radial part of ``spec``.

    ``method`` is ``"auto"`` (closed form when one exists), ``"quadrature"``
    or ``"closed-form"``. Quadrature profiles cover distances down to
    ``exp(-sigma_max)`` from the boundary.
    """
    if not (1e-14 < tol < 1e-2):
        raise CallerError("tol must lie in (1e-14, 1e-2)")
    if method not in ("auto", "quadrature", "closed-form"):
        raise CallerError(f"unknown method {method!r}")
    return _cached_profile(_radial(spec), float(tol), method, float(sigma_max))


def verify_gauge_inverse(profile: GaugeProfile, spec, r: float, h: float) -> float:
    """Residual |2a(r) + r a'(r) - B(r)| with a' from a central difference.

    The five-point stencil keeps the truncation error at O(h^4 a^(5)), which
    matters near the boundary where the derivatives of a grow like t^-k.
    """
    radial = _radial(spec)
    if not (0.0 < r - 2.0 * h and r + 2.0 * h < 1.0):
        raise DomainError("r +/- 2h must stay inside (0, 1)")
    for tc in radial.cutoffs_t:
        if abs((1.0 - tc) - r) <= 2.0 * h:
            raise DomainError("r is within 2h of a field cutoff")
    da = (8.0 * (profile.a(r + h) - profile.a(r - h))
          - (profile.a(r + 2.0 * h) - profile.a(r - 2.0 * h))) / (12.0 * h)
    return abs(2.0 * profile.a(r) + r * da - radial.field_t(1.0 - r))


# Lower bounds on r^2 a for the two critical families ----------------------

def _check_kind(kind):
    kind = str(kind).lower()
    if kind not in ("schrodinger", "pauli"):
        raise CallerError(f"unknown operator kind {kind!r}")
    return kind


def critical_family(kind, alpha: float = 1.5) -> RadialField:
    """Critical field matching the operator kind."""
    return Critical() if _check_kind(kind) == "schrodinger" else CriticalPauli(alpha)


def critical_cutoff_t(kind, alpha: float = 1.5) -> float:
    if _check_kind(kind) == "schrodinger":
        return CRITICAL_CUTOFF_T
    return math.exp(-2.0 * (alpha + 1.0))


def r2a_lower_bound_t(kind, t, C: float = 0.0, alpha: float = 1.5):
    """Lower bound on r^2 a(r) at distance t, for fields above the critical one."""
    t = np.asarray(t, dtype=float)
    L = -np.log(t)
    if _check_kind(kind) == "schrodinger":
        out = (
            (SQRT3 / 2) / t
            - (1 / SQRT3) / (t * L)
            - 2.0 / (t * L**2)
            - (SQRT3 / 2) * L
            + C
        )
    else:
        out = alpha / t - (1 / (2 * alpha)) / (t * L) - 1.0 / (t * L**2) - alpha * L + C
    return float(out) if out.ndim == 0 else out


def r2a_lower_bound(kind, r, C: float = 0.0, alpha: float = 1.5):
    """Radius-based view of :func:`r2a_lower_bound_t`; requires r > r0."""
    r = np.asarray(r, dtype=float)
    t = 1.0 - r
    if np.any(t >= critical_cutoff_t(kind, alpha)) or np.any(t <= 0.0):
        raise DomainError("bound is stated only beyond the critical cutoff")
    return r2a_lower_bound_t(kind, t, C, alpha)


@functools.lru_cache(maxsize=32)
def calibrate_bound_constant(kind, alpha: float = 1.5, tol: float = DEFAULT_TOL) -> float:
    """Constant C making the r^2 a lower bound valid for the critical field.

    C is the infimum over a coarse grid (from the cutoff to 1 - e^-40) of
    numeric r^2 a minus the bound taken with C = 0.
    """
    kind = _check_kind(kind)
    sigma0 = -math.log(critical_cutoff_t(kind, alpha))
    sigma = np.concatenate([sigma0 + np.linspace(0.0, 1.0, 41), np.arange(sigma0 + 1.25, 40.0, 0.25)])
    t = np.exp(-sigma)
    prof = gauge_profile(critical_family(kind, alpha), tol)
    return float(np.min(prof.r2a_t(t) - r2a_lower_bound_t(kind, t, 0.0, alpha)))
