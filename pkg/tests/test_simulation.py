import numpy as np
import pytest

from crclist.crc import CrcPoly
from crclist.convolutional import ConvCodeSpec
from crclist.listdec import ListConfig, ListDecoderCore, crc_select
from crclist.polar import construct_frozen_set, load_reliability_sequence
from crclist.simulation import (
    ChannelParams,
    PointResult,
    benchmark_throughput,
    ebno_to_sigma,
    run_lmax_sweep,
    run_montecarlo,
    transmit,
    trial_rng,
    wilson_interval,
)
from crclist.system import CodeSystem

TB = CodeSystem("tbcc", 8, CrcPoly(3, 0b1011), conv=ConvCodeSpec.from_octal(3, ["15", "17"]))
POLAR = CodeSystem("polar", 9, CrcPoly(3, 0b1011), polar=construct_frozen_set(load_reliability_sequence(), 32, 12))


def test_sigma_examples():
    assert ebno_to_sigma(0.0, 0.5) == pytest.approx(1.0)
    assert ebno_to_sigma(3.0, 1 / 16) == pytest.approx(2.00237, abs=5e-6)
    assert ChannelParams(3.0, 32 / 512).sigma == ebno_to_sigma(3.0, 1 / 16)


def test_llr_moments():
    ch = ChannelParams(1.0, 0.5)
    llr = transmit(np.zeros(200_000, np.uint8), ch, np.random.default_rng(0))
    s2 = ch.sigma**2
    assert llr.mean() == pytest.approx(2 / s2, rel=0.01)
    assert llr.var() == pytest.approx(4 / s2, rel=0.02)


def test_noiseless_llr_sign_matches_symbols():
    cw = np.array([0, 1, 1, 0, 1], np.uint8)
    llr = transmit(cw, ChannelParams(3.0, 0.5), None, noiseless=True)
    assert ((llr < 0).astype(np.uint8) == cw).all()


def test_trial_streams_reproducible_and_distinct():
    a = trial_rng(7, 1, 42).standard_normal(5)
    assert np.array_equal(a, trial_rng(7, 1, 42).standard_normal(5))
    assert not np.array_equal(a, trial_rng(7, 1, 43).standard_normal(5))
    assert not np.array_equal(a, trial_rng(7, 2, 42).standard_normal(5))
    assert not np.array_equal(a, trial_rng(8, 1, 42).standard_normal(5))


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == pytest.approx(0.0, abs=1e-12) and 0.03 < hi < 0.04
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-3) and hi == pytest.approx(0.5962, abs=1e-3)


def test_point_result_counts():
    with pytest.raises(ValueError):
        PointResult(1.0, trials=3, correct=1)
    p = PointResult(1.0, 10, 7, 2, 1, 20)
    assert (p.tfr, p.uer, p.erasure_rate, p.mean_final_L) == (0.3, 0.2, 0.1, 2.0)
    assert set(p.as_dict(timing=False)) & {"wall_time", "cw_per_sec"} == set()


@pytest.mark.parametrize("system", [TB, POLAR], ids=["tbcc", "polar"])
def test_noiseless_run_has_no_failures(system):
    rep = run_montecarlo(system, ListConfig(1, 8), [1.0], max_trials=1000, noiseless=True)
    p = rep.points[0]
    assert p.trials == 1000 and p.tfr == 0.0 and 1.0 <= p.mean_final_L <= 8.0


def test_counter_conservation_and_stopping():
    rep = run_montecarlo(TB, ListConfig(1, 16), [0.0, 2.0], min_errors=20, max_trials=5000, seed=3, block=50)
    for p in rep.points:
        assert p.correct + p.undetected + p.erasure == p.trials
        assert p.failures >= 20 or p.trials == 5000
    assert rep.points[0].tfr >= rep.points[1].tfr


def test_seed_determinism_and_worker_invariance():
    kw = dict(min_errors=15, max_trials=3000, seed=11, block=100)
    one = run_montecarlo(TB, ListConfig(1, 16), [1.0], workers=1, **kw).to_dict(timing=False)
    again = run_montecarlo(TB, ListConfig(1, 16), [1.0], workers=1, **kw).to_dict(timing=False)
    many = run_montecarlo(TB, ListConfig(1, 16), [1.0], workers=3, **kw).to_dict(timing=False)
    assert one == again == many


def test_adaptive_equals_nonadaptive_scl_on_paired_noise():
    core = ListDecoderCore(POLAR)
    for trial in range(300):
        rng = trial_rng(5, 0, trial)
        msg = rng.integers(0, 2, POLAR.msg_len, dtype=np.uint8)
        llr = transmit(POLAR.encode(msg), ChannelParams(1.0, POLAR.rate), rng)
        a = core.decode(llr, ListConfig(8, 8))
        fixed = core.decode_fixed(llr, 8)
        b = crc_select(fixed, POLAR.crc)
        assert (a.data is None and b.data is None) or np.array_equal(a.data, b.data)


def test_lmax_sweep_matches_individual_runs():
    cfg = ListConfig(1, 8)
    sweep = run_lmax_sweep(TB, cfg, 1.0, min_errors=10**9, max_trials=600, seed=2, block=200)
    for L, p in sweep.items():
        ref = run_montecarlo(TB, ListConfig(1, L), [1.0], min_errors=10**9, max_trials=600, seed=2, block=200)
        q = ref.points[0]
        assert (p.trials, p.correct, p.undetected, p.erasure, p.sum_final_L) == (
            q.trials, q.correct, q.undetected, q.erasure, q.sum_final_L)


def test_budget_guard_flags_point():
    rep = run_montecarlo(TB, ListConfig(1, 16), [4.0], min_errors=10**6, max_trials=10**8, max_seconds=0.5, block=50)
    assert rep.points[0].budget_exhausted and rep.points[0].trials < 10**8


def test_benchmark_positive_and_stable():
    a = benchmark_throughput(TB, ListConfig(1, 16), 2.0, 1.5, batch=200)
    b = benchmark_throughput(TB, ListConfig(1, 16), 2.0, 3.0, batch=200)
    assert a["cw_per_sec"] > 0 and "machine" in a
    assert abs(a["cw_per_sec"] - b["cw_per_sec"]) / b["cw_per_sec"] < 0.2
    with pytest.raises(ValueError):
        benchmark_throughput(TB, ListConfig(1, 16), 2.0, 0.0)
