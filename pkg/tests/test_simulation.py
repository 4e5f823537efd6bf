from dataclasses import replace

import numpy as np
import pytest

from rpa_rm.channels import Bec, BiAwgn, Bsc
from rpa_rm.errors import ParameterError
from rpa_rm.rm_code import RmCode
from rpa_rm.simulation import (
    SimConfig,
    clopper_pearson,
    intervals_overlap,
    run_trials,
    sweep,
    symmetry_check,
    trial_rng,
)


def test_clopper_pearson_reference_values():
    # exact endpoints for 0/10 and 10/10 in closed form
    assert clopper_pearson(0, 10) == (0.0, pytest.approx(1 - 0.025 ** (1 / 10)))
    assert clopper_pearson(10, 10) == (pytest.approx(0.025 ** (1 / 10)), 1.0)
    lo, hi = clopper_pearson(5, 100)
    assert lo < 0.05 < hi


def test_config_validation():
    code = RmCode(5, 2)
    for kw in ({"trials": 0}, {"trials": 10, "workers": 0}, {"trials": 10, "n_max": 0}, {"trials": 10, "tie_break": "x"}):
        with pytest.raises(ParameterError):
            SimConfig(code=code, channel=Bsc(0.05), **kw)
    with pytest.raises(ParameterError):
        SimConfig(code=RmCode(5, 0), channel=Bsc(0.05), trials=10)


def test_trial_streams_independent_of_order():
    a = trial_rng(7, 3).random(4)
    trial_rng(7, 2).random(100)
    assert np.array_equal(a, trial_rng(7, 3).random(4))
    assert not np.array_equal(a, trial_rng(7, 4).random(4))


def test_seeded_reproducibility():
    cfg = SimConfig(code=RmCode(5, 2), channel=Bsc(0.06), trials=300, seed=11, n_max=2)
    r1, r2 = run_trials(cfg), run_trials(cfg)
    assert (r1.frame_errors, r1.bit_errors) == (r2.frame_errors, r2.bit_errors)
    assert r1.trials_run == 300 and not r1.truncated
    assert r1.fer_ci95[0] <= r1.fer <= r1.fer_ci95[1]


@pytest.mark.parametrize("channel", [Bsc(0.06), Bec(0.35), BiAwgn(0.7)])
def test_workers_do_not_change_counts(channel):
    base = SimConfig(code=RmCode(5, 2), channel=channel, trials=400, seed=3, all_zeros_mode=False)
    counts = {(r.frame_errors, r.bit_errors) for r in (run_trials(base), run_trials(replace(base, workers=3)))}
    assert len(counts) == 1


def test_early_stop():
    cfg = SimConfig(code=RmCode(5, 2), channel=Bsc(0.12), trials=5000, seed=1, n_max=1, max_frame_errors=10)
    res = run_trials(cfg)
    assert res.truncated and res.frame_errors >= 10
    assert res.trials_run % 128 == 0 and res.trials_run < 5000
    assert res.fer == res.frame_errors / res.trials_run


def test_noiseless_like_channel_has_no_errors():
    res = run_trials(SimConfig(code=RmCode(6, 2), channel=Bsc(1e-6), trials=256, seed=5, all_zeros_mode=False))
    assert res.frame_errors == 0 and res.ber == 0.0


def test_record_fields():
    res = run_trials(SimConfig(code=RmCode(4, 2), channel=Bsc(0.05), trials=130, seed=2))
    rec = res.as_record()
    for key in ("m", "r", "channel", "trials", "seed", "tie_break", "frame_errors", "fer_ci95_low", "wall_seconds"):
        assert key in rec
    assert rec["channel"] == "bsc:0.05"


def test_symmetry_check_needs_enough_trials():
    with pytest.raises(ParameterError):
        symmetry_check(SimConfig(code=RmCode(4, 2), channel=Bsc(0.05), trials=500))


def test_symmetry_check_small():
    verdict, zeros, rand = symmetry_check(SimConfig(code=RmCode(4, 2), channel=Bsc(0.08), trials=1000, seed=9))
    assert verdict, verdict.detail
    assert zeros.config_echo["all_zeros_mode"] and not rand.config_echo["all_zeros_mode"]


def test_intervals_overlap():
    assert intervals_overlap((0.1, 0.2), (0.2, 0.3))
    assert not intervals_overlap((0.1, 0.2), (0.21, 0.3))


def test_sweep_pairs_results_with_bounds():
    with pytest.raises(ParameterError):
        sweep([])
    recs = sweep([
        SimConfig(code=RmCode(5, 2), channel=Bsc(0.01), trials=128, n_max=1),
        SimConfig(code=RmCode(5, 2), channel=BiAwgn(0.5), trials=128, n_max=1),
    ])
    assert all(r.error is None for r in recs)
    assert recs[0].bound.r == 2 and recs[1].bound.Z == pytest.approx(BiAwgn(0.5).bhattacharyya())
