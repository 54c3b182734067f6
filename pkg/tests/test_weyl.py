import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disc_confine.channels import build_channel, inverse_square_channel, synthetic_channel
from disc_confine.errors import CallerError
from disc_confine.fields import Critical, CriticalPauli, PowerLaw, Zero
from disc_confine.weyl import (
    ESA,
    LIMIT_CIRCLE,
    LIMIT_POINT,
    NOT_ESA,
    OdeSolverConfig,
    classify_endpoint,
    classify_operator,
    parse_m_range,
    worker_count,
)


@settings(max_examples=15)
@given(st.floats(0.0, 3.0).filter(lambda c: abs(c - 0.75) > 0.05))
def test_indicial_threshold(c):
    # Solutions of -u'' + c u / t^2 behave like t^nu with nu(nu - 1) = c;
    # the small one is always square integrable, the large one iff c < 3/4.
    res = classify_endpoint(inverse_square_channel(c))
    assert res.verdict == (LIMIT_POINT if c >= 0.75 else LIMIT_CIRCLE)


@pytest.mark.parametrize("c", [0.0, 0.3, 1.0, 2.0])
def test_inverse_square_tail_exponent(c):
    # The large solution t^nu with nu = 1/2 - sqrt(1/4 + c) gives p = -(2 nu + 1).
    nu = 0.5 - math.sqrt(0.25 + c)
    res = classify_endpoint(inverse_square_channel(c))
    p_min = min(tail["p"] for tail in res.tail_exponents)
    assert p_min == pytest.approx(2 * nu + 1, abs=0.02)


def test_zero_potential_is_limit_circle():
    res = classify_endpoint(synthetic_channel(lambda t: 0.0 * t))
    assert res.verdict == LIMIT_CIRCLE


def test_wronskian_is_conserved():
    for ch in (inverse_square_channel(0.3), build_channel(Critical(), 0)):
        assert classify_endpoint(ch).wronskian_drift < 1e-8


def test_verdict_stable_along_ladder():
    ch = build_channel(Critical(), 0)
    coarse = classify_endpoint(ch, OdeSolverConfig(eps_min=1e-8))
    fine = classify_endpoint(ch, OdeSolverConfig(eps_min=1e-10))
    assert coarse.verdict == fine.verdict == LIMIT_POINT
    assert fine.eps_ladder[-1] == pytest.approx(1e-10)
    assert len(fine.log_integrals[0]) == len(fine.eps_ladder)


def test_log_integrals_are_nondecreasing():
    res = classify_endpoint(inverse_square_channel(0.9))
    for series in res.log_integrals:
        assert all(b >= a - 1e-12 for a, b in zip(series, series[1:]))


@pytest.mark.parametrize("m", [-5, -1, 0, 1, 5])
def test_critical_field_every_channel_limit_point(m):
    assert classify_endpoint(build_channel(Critical(), m)).verdict == LIMIT_POINT


def test_classify_operator_examples():
    assert classify_operator(Critical(), "schrodinger", (-3, 3)).aggregate == ESA
    assert classify_operator(PowerLaw(0.7), "schrodinger", (-2, 2)).aggregate == NOT_ESA
    assert classify_operator(CriticalPauli(1.5), "pauli", (-3, 3)).aggregate == ESA


def test_classify_operator_keeps_m_order_and_notes_extrapolation():
    rep = classify_operator(PowerLaw(1.2), "schrodinger", [2, -1, 0])
    assert rep.m == [-1, 0, 2]
    assert [e["m"] for e in rep.per_channel] == [-1, 0, 2]
    assert "extrapolation" in rep.note


def test_endpoint_zero_is_limit_point():
    ch = build_channel(Zero(), 0)
    res = classify_endpoint(ch, OdeSolverConfig(start=0.3, eps_min=1e-10), endpoint=0)
    assert res.verdict == LIMIT_POINT
    rep = classify_operator(Critical(), "schrodinger", (0, 1), check_endpoint0=True)
    assert rep.endpoint0 == "numeric"
    assert all(e["endpoint0_verdict"] == LIMIT_POINT for e in rep.per_channel)


def test_config_validation():
    with pytest.raises(CallerError):
        OdeSolverConfig(eps_min=0.5)
    with pytest.raises(CallerError):
        OdeSolverConfig(start=1.2)
    with pytest.raises(CallerError):
        OdeSolverConfig(ladder=1.0)
    with pytest.raises(CallerError):
        classify_endpoint(inverse_square_channel(1.0), endpoint=2)


def test_parse_m_range():
    assert parse_m_range("-2..2") == [-2, -1, 0, 1, 2]
    assert parse_m_range((0, 1)) == [0, 1]
    assert parse_m_range([3, 1, 3]) == [1, 3]
    for bad in ("1..0", "x", (0, 65)):
        with pytest.raises(CallerError):
            parse_m_range(bad)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("DISC_CONFINE_THREADS", "2")
    assert worker_count(10) == 2
    assert worker_count(1) == 1
    monkeypatch.setenv("DISC_CONFINE_THREADS", "0")
    with pytest.raises(CallerError):
        worker_count(3)


@pytest.mark.parametrize("alpha", [0.7, 1.2])
def test_power_law_verdict_independent_of_m(alpha):
    rep = classify_operator(PowerLaw(alpha), "schrodinger", (-5, 5))
    verdicts = {e["verdict"] for e in rep.per_channel}
    assert verdicts == {LIMIT_POINT if alpha > 0.9 else LIMIT_CIRCLE}
