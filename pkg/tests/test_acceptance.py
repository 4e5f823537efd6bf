"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The lines are printed as they are produced and again in the pytest
terminal summary under "acceptance criteria".
"""

import math
from dataclasses import replace

import numpy as np
from conftest import ACCEPTANCE_RESULTS

from test_bounds import GRID, highprec_log_bound
from rpa_rm.bounds import BoundInputs, bound_report, q_recurrence, theorem_threshold, unrolled_bound
from rpa_rm.channels import Bec, Bsc, combine_minus, random_symmetric_channel
from rpa_rm.decoder import fht_decode, rpa_decode_batch
from rpa_rm.oracle import all_codewords, empirical_projected_channel, ml_decode_exhaustive
from rpa_rm.rm_code import RmCode, encode, random_messages
from rpa_rm.simulation import SimConfig, intervals_overlap, run_trials, symmetry_check


def record(number, ok, detail):
    ACCEPTANCE_RESULTS[number] = (bool(ok), detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_fht_equals_exhaustive_ml():
    rng = np.random.default_rng(1)
    mismatches = 0
    for m in (3, 4):
        code = RmCode(m, 1)
        for _ in range(10_000):
            L = rng.normal(0.0, 2.0, code.n)
            mismatches += not np.array_equal(fht_decode(L).codeword, ml_decode_exhaustive(code, L))
    record(1, mismatches == 0, f"{mismatches} mismatches over 2x10^4 Gaussian LLR vectors, RM(3,1) and RM(4,1)")


def test_criterion_02_combined_bhattacharyya_bound():
    rng = np.random.default_rng(2)
    channels = [Bsc(p).to_discrete() for p in [0.01] + [0.05 * i for i in range(1, 10)]]
    channels += [Bec(e / 10).to_discrete() for e in range(1, 10)]
    channels += [random_symmetric_channel(rng, int(rng.integers(1, 8)), bool(rng.integers(2))) for _ in range(50)]
    worst = min(1 - (1 - w.bhattacharyya()) ** 2 - combine_minus(w).bhattacharyya() for w in channels)
    bsc01 = combine_minus(Bsc(0.1).to_discrete()).bhattacharyya()
    ok = worst >= -1e-12 and abs(bsc01 - 2 * math.sqrt(0.18 * 0.82)) < 1e-12 and bsc01 <= 0.84
    record(2, ok, f"min slack {worst:.3g} over {len(channels)} channels; BSC(0.1) combined Z = {bsc01:.6f} <= 0.84")


def test_criterion_03_empirical_projected_channel():
    st = empirical_projected_channel(Bsc(0.2).to_discrete(), 100_000, np.random.default_rng(3))
    sigma = math.sqrt(0.32 * 0.68 / 100_000)
    ok = st.tv_distance <= 0.02 and abs(st.parity_flip_rate - 0.32) <= 3 * sigma
    record(3, ok, f"TV = {st.tv_distance:.4f} (<= 0.02), parity flip rate = {st.parity_flip_rate:.5f} (0.32 +- {3 * sigma:.5f})")


def test_criterion_04_bound_consistency():
    worst_rel = 0.0
    for m, r, z in GRID:
        inp = BoundInputs(m, r, z)
        a, b = q_recurrence(inp)[-1], unrolled_bound(inp)
        worst_rel = max(worst_rel, abs(a - b) / max(1.0, abs(b)))
    monotone = True
    zs = np.linspace(0.1, 0.9, 17)
    for m in range(6, 21):
        for r in (2, 3, 4):
            rec = [q_recurrence(BoundInputs(m, r, z))[-1] for z in zs]
            unr = [unrolled_bound(BoundInputs(m, r, z)) for z in zs]
            monotone &= all(y >= x for seq in (rec, unr) for x, y in zip(seq, seq[1:]))
    z = Bsc(0.01).bhattacharyya()
    got, ref = unrolled_bound(BoundInputs(20, 2, z)), highprec_log_bound(20, 2, z)
    hp_rel = abs(got - ref) / abs(ref)
    ok = worst_rel <= 1e-9 and monotone and hp_rel <= 1e-9
    record(4, ok, f"recurrence vs unrolled max rel diff {worst_rel:.2g}; monotone in Z: {monotone}; 200-bit check rel {hp_rel:.2g}")


def test_criterion_05_noiseless_recovery():
    failures = 0
    code = RmCode(4, 2)
    words = all_codewords(code)
    failures += int((rpa_decode_batch(code, 40.0 * (1 - 2.0 * words)) != words).any(axis=1).sum())
    code = RmCode(8, 3)
    words = encode(code, random_messages(code, np.random.default_rng(5), 1000))
    failures += int((rpa_decode_batch(code, 40.0 * (1 - 2.0 * words)) != words).any(axis=1).sum())
    record(5, failures == 0, f"{failures} failures over 2048 RM(4,2) and 1000 RM(8,3) codewords")


def test_criterion_06_fht_error_radius():
    code = RmCode(4, 1)
    rng = np.random.default_rng(6)
    words = all_codewords(code)
    patterns = [[i] for i in range(16)] + [[i, j] for i in range(16) for j in range(i + 1, 16)]
    patterns += [list(rng.choice(16, 3, replace=False)) for _ in range(1000)]
    failures = 0
    for k, flips in enumerate(patterns):
        c = words[k % len(words)]
        y = c.copy()
        y[flips] ^= 1
        failures += not np.array_equal(fht_decode(1.0 - 2.0 * y).codeword, c)
    record(6, failures == 0, f"{failures} failures over {len(patterns)} flip patterns of weight 1, 2, 3")


def test_criterion_07_bound_vs_simulation():
    lines, ok = [], True
    for m in (6, 7):
        for p in (0.001, 0.002):
            cfg = SimConfig(code=RmCode(m, 2), channel=Bsc(p), trials=10_000, seed=7, n_max=1)
            res = run_trials(cfg)
            b = bound_report(m, 2, cfg.channel.bhattacharyya()).q_r_clamped
            if b < 1:
                n = res.trials_run
                allowance = n * b + 3 * math.sqrt(n * b * (1 - b))
                ok &= res.frame_errors <= allowance
            lines.append(f"RM({m},2) BSC({p}): {res.frame_errors}/{res.trials_run} vs bound {b:.3g}")
    record(7, ok, "; ".join(lines))


def test_criterion_08_finite_scale_trend():
    results = []
    for m in (6, 7, 8):
        cfg = SimConfig(code=RmCode(m, 2), channel=Bsc(0.01), trials=10_000, seed=8, n_max=1)
        results.append(run_trials(cfg))
    # non-increasing up to statistical noise: each later estimate is below
    # the earlier one or their 95% intervals overlap
    trend = all(b.fer <= a.fer or intervals_overlap(a.fer_ci95, b.fer_ci95) for a, b in zip(results, results[1:]))
    thr = theorem_threshold(128, 0.6)
    direct = math.log2(128) - math.log2(-math.log(0.4))
    ok = trend and abs(thr - 7.126) <= 1e-3 and abs(thr - direct) <= 1e-12
    fers = ", ".join(f"m={m}: {r.frame_errors}/{r.trials_run}" for m, r in zip((6, 7, 8), results))
    record(8, ok, f"FER {fers}; threshold(128, 0.6) = {thr:.6f}")


def test_criterion_09_symmetry_reduction():
    parts, ok = [], True
    for channel in (Bsc(0.05), Bec(0.4)):
        verdict, zeros, rand = symmetry_check(SimConfig(code=RmCode(5, 2), channel=channel, trials=5000, seed=9))
        ok &= bool(verdict)
        parts.append(f"{channel}: all-zeros {zeros.fer:.4f} vs random {rand.fer:.4f}")
    record(9, ok, "; ".join(parts))


def test_criterion_10_worker_determinism():
    cases = [
        SimConfig(code=RmCode(6, 2), channel=Bsc(0.07), trials=2000, seed=10),
        SimConfig(code=RmCode(5, 2), channel=Bec(0.4), trials=1500, seed=11, all_zeros_mode=False),
        SimConfig(code=RmCode(6, 3), channel=Bsc(0.02), trials=1000, seed=12, n_max=2, max_frame_errors=25),
    ]
    ok, parts = True, []
    for cfg in cases:
        counts = set()
        for workers in (1, 2, 8):
            res = run_trials(replace(cfg, workers=workers))
            counts.add((res.trials_run, res.frame_errors, res.bit_errors))
        ok &= len(counts) == 1
        parts.append(f"{cfg.code} {cfg.channel}: {sorted(counts)}")
    record(10, ok, "; ".join(parts))
