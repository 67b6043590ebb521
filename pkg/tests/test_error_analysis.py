import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flasq.error_analysis import (
    PecOverhead,
    QecParams,
    cultivation_fidelity,
    lattice_surgery_fidelity,
    nisq_gamma,
    nisq_runtime,
    p_cyc,
    pec_overhead,
    pec_overhead_approx,
    round_sig,
    runtime_report,
    success_probability,
    success_probability_approx,
    t_pec,
    time_to_success,
    wall_clock,
)
from flasq.exceptions import AboveThreshold, InsufficientQubits


def test_p_cyc_anchors():
    assert p_cyc(QecParams(1e-3, 13)) == pytest.approx(3e-9)
    assert p_cyc(QecParams(1e-3, 14)) == pytest.approx(9.49e-10, rel=1e-3)


def test_p_cyc_distance_step_divides_by_lambda():
    q = QecParams(2e-3, 9)
    assert p_cyc(q) / p_cyc(QecParams(2e-3, 11)) == pytest.approx(q.suppression)


def test_above_threshold():
    with pytest.raises(AboveThreshold):
        p_cyc(QecParams(0.01, 13))


def test_success_probability_factors():
    qec = QecParams(1e-3, 13)
    assert lattice_surgery_fidelity(1.18e7, qec, p_cyc_value=3e-9) == pytest.approx(0.6309, abs=5e-4)
    assert cultivation_fidelity(7381 * 17, 3e-7) == pytest.approx(0.9630, abs=5e-4)
    assert success_probability(0, 0, qec, 1e-3) == 1


def test_time_to_success():
    qec = QecParams(1e-3, 13, 1e-6)
    W = wall_clock(73810, 13, 1e-6)
    assert W == pytest.approx(0.9595, abs=1e-4)
    assert time_to_success(73810, qec, 1) == pytest.approx(W)
    assert time_to_success(73810, qec, 0.5) == pytest.approx(2 * W)
    with pytest.raises(ValueError):
        time_to_success(1, qec, 0)


def test_pec_overhead_anchors():
    g = pec_overhead(1.18e7, 125477, QecParams(1e-3, 13), 3e-7, p_cyc_value=3e-9)
    assert g.total == pytest.approx(7.34, abs=0.02)
    g = pec_overhead(3.79e7, 30100 * 19, QecParams(1e-3, 14), 2e-7, p_cyc_value=9.5e-10)
    assert g.total == pytest.approx(11.89, abs=0.03)
    assert pec_overhead(5, 5, QecParams(1e-3, 13), 0, p_cyc_value=0).total == 1
    with pytest.raises(ValueError):
        pec_overhead(1, 1, QecParams(1e-3, 13), 0.5)


def test_t_pec():
    assert t_pec(0.96, 7.34, 1.0) == pytest.approx(7.05, abs=0.01)
    assert t_pec(1.52, 11.89, 1.0) == pytest.approx(18.1, abs=0.05)
    assert t_pec(2.0, 1.0, 1.0) == 2.0
    assert t_pec(1.0, 1.0, 0.01) == pytest.approx(1e4)


def test_nisq_model():
    assert nisq_gamma(1e-3) == pytest.approx(1.0005 / 0.999)
    r = nisq_runtime(121, 80, 0.0, 121 * 4, sigma=0.005)
    assert r.gamma2 == 1 and r.runtime == pytest.approx(80 * 50e-9 / 0.005**2 / 4)
    with pytest.raises(InsufficientQubits):
        nisq_runtime(121, 80, 1e-3, 100)


def test_nisq_doubling_depth_ratio():
    a = nisq_runtime(121, 80, 1e-3, 10_000)
    b = nisq_runtime(121, 160, 1e-3, 10_000)
    assert b.gamma2 == pytest.approx(a.gamma2**2, rel=1e-9)
    assert b.gamma2 / a.gamma2 == pytest.approx(nisq_gamma(1e-3) ** (2 * 121 * 80), rel=1e-9)
    assert b.gamma2 / a.gamma2 > 1e5


def test_runtime_report_consistency():
    qec = QecParams(1e-3, 13)
    r = runtime_report(50_000, 8e6, 1.25e5, qec, 3e-7, 4.4)
    assert r.S_cliff == pytest.approx(8e6 - 4.4 * 1.25e5)
    assert r.Gamma2 == pytest.approx(r.Gamma2_cliff * r.Gamma2_mag)
    assert r.P_success == pytest.approx(r.P_lattice_surgery * r.P_cultivation)
    assert r.T_PEC >= r.W and r.T_success >= r.W


def test_round_sig():
    assert round_sig(9.486832980505138e-10, 2) == 9.5e-10
    assert round_sig(2.9999999999999996e-09, 2) == 3e-9


@given(st.floats(0, 1e8), st.floats(0, 1e6), st.floats(1e-6, 9e-3), st.integers(3, 35), st.floats(0, 0.4))
def test_gamma_log_identity(s, m, p, d, p_mag):
    qec = QecParams(p, d)
    g = pec_overhead(s, m, qec, p_mag)
    if math.isfinite(g.cliff):
        assert math.log(g.cliff) == pytest.approx(-4 * d * s * math.log1p(-p_cyc(qec)), rel=1e-9, abs=1e-12)


@given(st.floats(1, 1e7), st.floats(1, 1e6), st.floats(1e-5, 1e-3), st.integers(13, 35), st.floats(0, 1e-6))
def test_success_and_pec_agree_to_first_order(s, m, p, d, p_mag):
    qec = QecParams(p, d)
    if p_cyc(qec) > 1e-6:
        return
    P = success_probability(s, m, qec, p_mag)
    g = pec_overhead(s, m, qec, p_mag).total
    if -math.log(P) < 1e-12:
        return
    assert -math.log(P) == pytest.approx(0.25 * math.log(g), rel=1e-3)
    assert success_probability_approx(s, m, qec, p_mag) == pytest.approx(P, rel=1e-3)
    approx = pec_overhead_approx(s, m, qec, p_mag)
    assert isinstance(approx, PecOverhead)


@given(st.floats(1, 1e6), st.floats(1, 1e6), st.floats(1e-6, 1e-3))
def test_gamma_increasing(s, m, p_mag):
    qec = QecParams(1e-3, 13)
    base = pec_overhead(s, m, qec, p_mag).total
    if math.isinf(base):
        return
    for bigger in (
        pec_overhead(s * 2, m, qec, p_mag),
        pec_overhead(s, m * 2, qec, p_mag),
        pec_overhead(s, m, qec, p_mag * 2),
        pec_overhead(s, m, QecParams(2e-3, 13), p_mag),
    ):
        assert bigger.total > base
