"""Reproducible Monte Carlo estimation of RPA frame and bit error rates.

Trial ``t`` of a run draws everything it needs (message, channel noise)
from its own generator seeded by ``(seed, t)``, and trials are processed in
fixed-size chunks whose boundaries depend only on the trial index. Results
are therefore identical for any worker count.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.stats import beta

from .bounds import BoundReport, bound_report
from .channels import LLR_MAX, ChannelModel
from .decoder import DecoderConfig, rpa_decode_batch
from .errors import ParameterError
from .oracle import OracleVerdict
from .rm_code import RmCode, encode

log = logging.getLogger(__name__)

CHUNK = 128


@dataclass(frozen=True)
class SimConfig:
    code: RmCode
    channel: ChannelModel
    trials: int
    seed: int = 0
    n_max: int | None = None
    max_frame_errors: int = 0
    all_zeros_mode: bool = True
    workers: int = 1
    llr_clamp: float = LLR_MAX
    tie_break: str = "random"

    def __post_init__(self):
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ParameterError(f"trials must be a positive integer, got {self.trials!r}")
        if self.code.r < 1:
            raise ParameterError("the RPA decoder needs r >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if self.max_frame_errors < 0:
            raise ParameterError("max_frame_errors must be >= 0")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        self.decoder  # validates n_max, llr_clamp and tie_break

    @property
    def decoder(self) -> DecoderConfig:
        n_max = self.n_max if self.n_max is not None else DecoderConfig.default(self.code.m).n_max
        return DecoderConfig(n_max=n_max, llr_clamp=self.llr_clamp, tie_break=self.tie_break)

    def echo(self) -> dict:
        return {
            "m": self.code.m,
            "r": self.code.r,
            "channel": str(self.channel),
            "trials": self.trials,
            "seed": int(self.seed),
            "n_max": self.decoder.n_max,
            "max_frame_errors": self.max_frame_errors,
            "all_zeros_mode": self.all_zeros_mode,
            "workers": self.workers,
            "llr_clamp": self.llr_clamp,
            "tie_break": self.tie_break,
        }


@dataclass
class SimResult:
    trials_run: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    fer_ci95: tuple[float, float]
    truncated: bool
    wall_seconds: float
    config_echo: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        rec = dict(self.config_echo)
        rec.update(
            trials_run=self.trials_run,
            frame_errors=self.frame_errors,
            bit_errors=self.bit_errors,
            fer=self.fer,
            ber=self.ber,
            fer_ci95_low=self.fer_ci95[0],
            fer_ci95_high=self.fer_ci95[1],
            truncated=self.truncated,
            wall_seconds=self.wall_seconds,
        )
        return rec


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval for ``k`` successes in ``n`` trials."""
    a = 1.0 - level
    lo = 0.0 if k == 0 else float(beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(trial),))))


def _run_chunk(cfg: SimConfig, start: int, stop: int) -> tuple[int, int]:
    code, channel = cfg.code, cfg.channel
    sent = np.zeros((stop - start, code.n), dtype=np.uint8)
    llrs = np.empty((stop - start, code.n))
    tie_seeds = np.empty(stop - start, dtype=np.uint64)
    for row, t in enumerate(range(start, stop)):
        rng = trial_rng(cfg.seed, t)
        tie_seeds[row] = rng.integers(0, 2**64, dtype=np.uint64)
        if not cfg.all_zeros_mode:
            sent[row] = encode(code, rng.integers(0, 2, size=code.k, dtype=np.uint8))
        llrs[row] = channel.llr(channel.sample(sent[row], rng), cfg.llr_clamp)
    decoded = rpa_decode_batch(code, llrs, cfg.decoder, tie_seeds)
    wrong = decoded != sent
    return int(wrong.any(axis=1).sum()), int(wrong.sum())


def run_trials(cfg: SimConfig) -> SimResult:
    """Decode ``cfg.trials`` independent frames and count errors.

    With ``max_frame_errors > 0`` the run stops at the end of the first
    chunk that reaches that many frame errors; the estimates then use the
    trials actually run and ``truncated`` is set.
    """
    t0 = time.perf_counter()
    bounds = [(a, min(cfg.trials, a + CHUNK)) for a in range(0, cfg.trials, CHUNK)]
    frames = bits = run = 0
    stop = False
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for w in range(0, len(bounds), cfg.workers):
            wave = bounds[w : w + cfg.workers]
            if pool is None:
                outcomes = [_run_chunk(cfg, a, b) for a, b in wave]
            else:
                outcomes = list(pool.map(lambda ab: _run_chunk(cfg, *ab), wave))
            for (a, b), (fe, be) in zip(wave, outcomes):
                frames += fe
                bits += be
                run = b
                if cfg.max_frame_errors and frames >= cfg.max_frame_errors:
                    stop = True
                    break
            if stop:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    elapsed = time.perf_counter() - t0
    log.debug("%s over %s: %d/%d frame errors in %.2fs", cfg.code, cfg.channel, frames, run, elapsed)
    return SimResult(
        trials_run=run,
        frame_errors=frames,
        bit_errors=bits,
        fer=frames / run,
        ber=bits / (run * cfg.code.n),
        fer_ci95=clopper_pearson(frames, run),
        truncated=run < cfg.trials,
        wall_seconds=elapsed,
        config_echo=cfg.echo(),
    )


def intervals_overlap(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def symmetry_check(cfg: SimConfig) -> tuple[OracleVerdict, SimResult, SimResult]:
    """Compare all-zeros transmission against uniformly random codewords.

    Both runs use the same seed; the verdict is a match when the two 95%
    frame-error intervals overlap.
    """
    if cfg.trials < 1000:
        raise ParameterError("symmetry_check needs at least 10^3 trials per mode")
    zeros = run_trials(replace(cfg, all_zeros_mode=True))
    rand = run_trials(replace(cfg, all_zeros_mode=False))
    if intervals_overlap(zeros.fer_ci95, rand.fer_ci95):
        return OracleVerdict(True), zeros, rand
    detail = (
        f"all-zeros FER {zeros.fer:.4g} {zeros.fer_ci95} vs random-message FER "
        f"{rand.fer:.4g} {rand.fer_ci95}"
    )
    return OracleVerdict(False, detail), zeros, rand


@dataclass
class SweepRecord:
    config: SimConfig
    result: SimResult | None
    bound: BoundReport | None
    error: str | None = None


def bound_for(cfg: SimConfig) -> BoundReport:
    return bound_report(cfg.code.m, cfg.code.r, cfg.channel.bhattacharyya())


def sweep(cfgs) -> list[SweepRecord]:
    """Run every configuration and pair it with its analytic bound.

    A failing configuration yields a record carrying the error message; the
    remaining configurations still run.
    """
    cfgs = list(cfgs)
    if not cfgs:
        raise ParameterError("sweep needs at least one configuration")
    out = []
    for cfg in cfgs:
        try:
            res = run_trials(cfg)
        except Exception as exc:  # reported per record
            log.warning("sweep entry %s failed: %s", cfg.echo(), exc)
            out.append(SweepRecord(cfg, None, None, f"{type(exc).__name__}: {exc}"))
            continue
        try:
            bnd = bound_for(cfg)
        except Exception as exc:
            out.append(SweepRecord(cfg, res, None, f"bound: {type(exc).__name__}: {exc}"))
            continue
        out.append(SweepRecord(cfg, res, bnd))
    return out
