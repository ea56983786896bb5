import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from pvextract.model import (K_BOLTZMANN, Q_ELECTRON, DdmParams, EvaluationOverflowError,
                             OperatingCondition, SdmParams, ddm_current, module_current,
                             sdm_current)

RTC_T = OperatingCondition.from_celsius(33.0)
SDM_TYPICAL = SdmParams(0.760775, 0.323021, 1.481184, 0.036377, 53.71852)
DDM_TYPICAL = DdmParams(0.760781, 0.225974, 0.749344, 1.45101, 1.99999, 0.0367404, 55.4854)

mp.mp.dps = 50
MP_Q = mp.mpf("1.60217646e-19")
MP_K = mp.mpf("1.3806503e-23")


def mp_diode(x, i0, n, t):
    return i0 * mp.mpf("1e-6") * (mp.exp(MP_Q * x / (n * MP_K * t)) - 1)


def mp_sdm(v, i, p, t):
    v, i, t = mp.mpf(v), mp.mpf(i), mp.mpf(t)
    x = v + i * p.rs
    return p.iph - mp_diode(x, mp.mpf(p.i0), p.n, t) - x / p.rp


def mp_ddm(v, i, p, t):
    v, i, t = mp.mpf(v), mp.mpf(i), mp.mpf(t)
    x = v + i * p.rs
    return p.iph - mp_diode(x, mp.mpf(p.i01), p.n1, t) - mp_diode(x, mp.mpf(p.i02), p.n2, t) - x / p.rp


sdm_params = st.builds(
    SdmParams,
    iph=st.floats(0, 1), i0=st.floats(0, 1), n=st.floats(1, 2),
    rs=st.floats(0, 0.5), rp=st.floats(1e-3, 100),
)


def test_constants_are_the_literature_literals():
    assert Q_ELECTRON == 1.60217646e-19
    assert K_BOLTZMANN == 1.3806503e-23


def test_celsius_conversion():
    assert OperatingCondition.from_celsius(33.0).temperature == pytest.approx(306.15, abs=1e-12)
    assert OperatingCondition.from_celsius(45.0).temperature == pytest.approx(318.15, abs=1e-12)


@pytest.mark.parametrize("bad", [dict(n=0.9), dict(i0=-1e-3), dict(rp=math.inf), dict(iph=math.nan)])
def test_sdm_params_validation(bad):
    kw = dict(iph=0.7, i0=0.3, n=1.5, rs=0.03, rp=50.0)
    kw.update(bad)
    with pytest.raises(ValueError):
        SdmParams(**kw)


def test_operating_condition_validation():
    with pytest.raises(ValueError):
        OperatingCondition(0.0)
    with pytest.raises(ValueError):
        OperatingCondition(300.0, ns=0)


def test_photocurrent_passes_through_without_diode_or_loss():
    p = SdmParams(0.76, 0.0, 1.0, 0.0, 1e300)
    assert sdm_current(0.0, 0.76, p, RTC_T) == 0.76


def test_sdm_matches_frozen_high_precision_value():
    # 50-digit evaluation of the circuit equation at (0.5 V, 0.7 A)
    got = sdm_current(0.5, 0.7, SDM_TYPICAL, RTC_T)
    assert got == pytest.approx(0.5275333090096624588, rel=1e-12)


def test_ddm_matches_frozen_high_precision_value():
    got = ddm_current(0.5, 0.7, DDM_TYPICAL, RTC_T)
    assert got == pytest.approx(0.5272504660487877512, rel=1e-12)


def test_module_matches_frozen_high_precision_value():
    p = SdmParams(1.03051, 0.0967, 1.3512, 0.0334, 27.277)
    cond = OperatingCondition.from_celsius(45.0, ns=36, np=1)
    assert module_current(16.0, 0.5, p, cond) == pytest.approx(0.9889619037176688634, rel=1e-12)


@given(p=sdm_params, v=st.floats(-0.3, 0.6), i=st.floats(-0.3, 0.8))
def test_sdm_against_extended_precision(p, v, i):
    want = mp_sdm(v, i, p, RTC_T.temperature)
    got = sdm_current(v, i, p, RTC_T)
    # cancellation between terms limits relative accuracy; scale by the largest term
    scale = max(1.0, abs(float(mp_diode(mp.mpf(v) + mp.mpf(i) * p.rs, mp.mpf(p.i0), p.n, mp.mpf(RTC_T.temperature)))),
                abs((v + i * p.rs) / p.rp))
    assert abs(got - float(want)) <= 1e-12 * scale


def test_typical_sdm_parameters_reproduce_reference_rmse(rtc):
    i = sdm_current(rtc.voltage, rtc.current, SDM_TYPICAL, rtc.condition)
    r = math.sqrt(np.mean((i - rtc.current) ** 2))
    assert f"{r:.4e}" == "9.8602e-04"


def test_ddm_with_zero_second_diode_is_sdm_bitwise(rtc):
    p = DdmParams(SDM_TYPICAL.iph, SDM_TYPICAL.i0, 0.0, SDM_TYPICAL.n, 1.7, SDM_TYPICAL.rs, SDM_TYPICAL.rp)
    a = ddm_current(rtc.voltage, rtc.current, p, rtc.condition)
    b = sdm_current(rtc.voltage, rtc.current, SDM_TYPICAL, rtc.condition)
    assert np.array_equal(a, b)


@given(p=sdm_params, n2=st.floats(1, 2), v=st.floats(-0.3, 0.6), i=st.floats(-0.3, 0.8))
def test_ddm_degenerates_to_sdm(p, n2, v, i):
    q = DdmParams(p.iph, p.i0, 0.0, p.n, n2, p.rs, p.rp)
    assert ddm_current(v, i, q, RTC_T) == sdm_current(v, i, p, RTC_T)


@given(p=sdm_params, i02=st.floats(0, 1), n2=st.floats(1, 2), v=st.floats(-0.3, 0.6), i=st.floats(-0.3, 0.8))
def test_ddm_diode_swap_symmetry(p, i02, n2, v, i):
    a = DdmParams(p.iph, p.i0, i02, p.n, n2, p.rs, p.rp)
    b = DdmParams(p.iph, i02, p.i0, n2, p.n, p.rs, p.rp)
    assert ddm_current(v, i, a, RTC_T) == pytest.approx(ddm_current(v, i, b, RTC_T), rel=1e-15, abs=1e-15)


@given(p=sdm_params, v=st.floats(0.05, 0.6), i=st.floats(0.0, 0.8), bump=st.floats(1e-3, 1.0))
def test_current_decreases_with_saturation_current(p, v, i, bump):
    hi = SdmParams(p.iph, p.i0 + bump, p.n, p.rs, p.rp)
    assert sdm_current(v, i, hi, RTC_T) < sdm_current(v, i, p, RTC_T)


@given(p=sdm_params, v=st.floats(-0.3, 0.6), i=st.floats(-0.3, 0.8))
def test_module_with_unit_counts_is_sdm(p, v, i):
    assert module_current(v, i, p, RTC_T) == sdm_current(v, i, p, RTC_T)


def test_module_series_cells_share_the_cell_voltage():
    p = SdmParams(0.76, 0.32, 1.48, 0.0, 50.0)
    one = OperatingCondition(306.15, 1, 1)
    two = OperatingCondition(306.15, 2, 1)
    assert module_current(1.0, 0.3, p, two) == pytest.approx(sdm_current(0.5, 0.3, p, one), rel=1e-15)


def test_overflow_is_reported():
    p = SdmParams(0.76, 1.0, 1.0, 0.5, 50.0)
    with pytest.raises(EvaluationOverflowError):
        sdm_current(30.0, 0.5, p, RTC_T)


def test_zero_shunt_resistance_rejected():
    with pytest.raises(ValueError):
        sdm_current(0.1, 0.1, SdmParams(0.7, 0.3, 1.5, 0.03, 0.0), RTC_T)
