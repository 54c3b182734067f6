import math

import pytest

from disc_confine.criteria import SATISFIED, VIOLATED
from disc_confine.errors import CallerError
from disc_confine.sweep import CAVEAT, bisect_threshold, sweep_inverse_square, verify_subleading
from disc_confine.weyl import OdeSolverConfig


def test_bisection_on_known_threshold():
    res = bisect_threshold(lambda x, cfg: x >= 0.3141, 0.0, 1.0, 0.01, OdeSolverConfig(), "x")
    lo, hi = res.bracket
    assert lo < 0.3141 <= hi and hi - lo <= 0.01
    assert abs(res.estimate - 0.3141) <= 0.01
    assert res.iterations == len([e for e in res.log if e["role"] == "mid"])
    assert res.to_json()["param_name"] == "x"


def test_undecided_point_is_retried_then_flagged():
    seen = []

    def decide(x, cfg):
        seen.append(cfg.eps_min)
        if abs(x - 0.5) < 1e-12:
            return None
        return x > 0.5

    res = bisect_threshold(decide, 0.0, 1.0, 0.4, OdeSolverConfig(eps_min=1e-10), "x")
    mid = [e for e in res.log if e["role"] == "mid"][0]
    assert mid["retried"] and mid["flagged"] and mid["confining"]
    assert 1e-12 in seen


def test_retry_can_resolve():
    def decide(x, cfg):
        if abs(x - 0.5) < 1e-12 and cfg.eps_min > 1e-11:
            return None
        return x > 0.4

    res = bisect_threshold(decide, 0.0, 1.0, 0.4, OdeSolverConfig(eps_min=1e-10), "x")
    mid = [e for e in res.log if e["role"] == "mid"][0]
    assert mid["retried"] and not mid["flagged"]


def test_bisection_rejects_bad_inputs():
    cfg = OdeSolverConfig()
    with pytest.raises(CallerError):
        bisect_threshold(lambda x, c: True, 0.0, 1.0, 0.001, cfg, "x")
    with pytest.raises(CallerError):
        bisect_threshold(lambda x, c: True, 1.0, 0.0, 0.05, cfg, "x")
    with pytest.raises(CallerError):
        bisect_threshold(lambda x, c: True, 0.0, 1.0, 0.05, cfg, "x")
    with pytest.raises(CallerError):
        bisect_threshold(lambda x, c: False, 0.0, 1.0, 0.05, cfg, "x")


def test_inverse_square_sweep_finds_three_quarters():
    res = sweep_inverse_square(0.5, 1.0, 0.01)
    assert abs(res.estimate - 0.75) <= 0.01
    assert res.bracket[0] < 0.75 <= res.bracket[1] + 1e-12


def test_subleading_confining_side_schrodinger():
    v = verify_subleading("schrodinger")
    assert v.outcome == SATISFIED
    assert v.diagnostics["caveat"] == CAVEAT
    assert v.diagnostics["d"] == pytest.approx(1 / math.sqrt(3))


def test_subleading_confining_side_pauli():
    v = verify_subleading("pauli", alpha=1.5, beta=1.0)
    assert v.outcome == SATISFIED
    assert v.diagnostics["d"] == pytest.approx(1 / 3)


def test_subleading_above_constant_fails_pointwise():
    v = verify_subleading("schrodinger", d=1 / math.sqrt(3) + 0.2)
    assert v.outcome == VIOLATED and v.witness["t"] < 1e-3


def test_sweep_is_deterministic():
    a = sweep_inverse_square(0.5, 1.0, 0.05).to_json()
    b = sweep_inverse_square(0.5, 1.0, 0.05).to_json()
    assert a == b
    for entry in a["log"]:
        if "bracket" in entry:
            lo, hi = entry["bracket"]
            assert lo < 0.75 <= hi + 1e-12
