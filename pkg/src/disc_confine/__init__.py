"""Confinement of magnetic Schrodinger and Pauli operators on the unit disc.

The operator is split into partial-wave channels; each channel's endpoint
at r = 1 is classified as limit point (confining) or limit circle, both by
a numerical oracle and by analytic gauge-function criteria.
"""

__version__ = "0.1.0"

from .channels import Channel, build_channel, eval_potential, perturbation_bounds  # noqa: E402
from .criteria import (  # noqa: E402
    CriterionVerdict,
    GFunction,
    channel_threshold_radius,
    check_pointwise_bound,
    integral_test,
    sum_integral_bracket,
    sum_test,
)
from .errors import (  # noqa: E402
    CallerError,
    ConfinementError,
    DomainError,
    HypothesisViolation,
    NumericError,
    SpecError,
)
from .fields import FieldSpec, eval_field, field_from_json  # noqa: E402
from .gauge import GaugeProfile, gauge_profile, verify_gauge_inverse  # noqa: E402
from .sweep import CAVEAT, SweepResult, sweep_alpha, verify_subleading  # noqa: E402
from .weyl import Classification, OdeSolverConfig, classify_endpoint, classify_operator  # noqa: E402
