"""Brute-force reference implementations used to check the fast paths.

Nothing here reuses the encoder, the transforms or the aggregation kernel of
the main modules: codewords are built by evaluating monomials point by
point, and sums are written as plain loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .channels import DiscreteBms, combine_minus
from .errors import MissingSubspaceError, ParameterError
from .rm_code import MAX_ENUM_K, RmCode


@dataclass(frozen=True)
class OracleVerdict:
    matched: bool
    detail: str = ""

    def __post_init__(self):
        if self.matched and self.detail:
            raise ValueError("a matched verdict carries no mismatch detail")

    def __bool__(self):
        return self.matched


def _generator_rows(m: int, r: int) -> np.ndarray:
    points = list(product((0, 1), repeat=m))  # lexicographic, z_1 first
    rows = []
    for d in range(r + 1):
        for subset in combinations(range(m), d):
            rows.append([int(all(z[i] for i in subset)) for z in points])
    return np.array(rows, dtype=np.int64).reshape(-1, 1 << m)


def _messages_in_counter_order(k: int, start: int, stop: int) -> np.ndarray:
    # Counter digits (MSB first) = non-constant coefficients, then the constant.
    out = np.zeros((stop - start, k), dtype=np.int64)
    for row, c in enumerate(range(start, stop)):
        digits = [(c >> (k - 1 - i)) & 1 for i in range(k)]
        out[row, 1:] = digits[:-1]
        out[row, 0] = digits[-1]
    return out


def all_codewords(code: RmCode) -> np.ndarray:
    """Every codeword, in message-counter order (small codes only)."""
    if code.k > 16:
        raise ParameterError("all_codewords materializes 2**k rows; use k <= 16")
    g = _generator_rows(code.m, code.r)
    return (_messages_in_counter_order(code.k, 0, 1 << code.k) @ g % 2).astype(np.uint8)


def ml_decode_exhaustive(code: RmCode, L, chunk: int = 1 << 12) -> np.ndarray:
    """Codeword minimizing ``sum of L(z) over z with c(z) = 1``.

    Ties go to the codeword that comes first in message-counter order.
    """
    if code.k > MAX_ENUM_K:
        raise ParameterError(f"exhaustive ML needs k <= {MAX_ENUM_K}, got {code.k}")
    L = np.asarray(L, dtype=float)
    if L.shape != (code.n,):
        raise ParameterError(f"expected {code.n} LLRs, got shape {L.shape}")
    g = _generator_rows(code.m, code.r)
    best_metric, best_word = np.inf, None
    total = 1 << code.k
    for start in range(0, total, chunk):
        words = _messages_in_counter_order(code.k, start, min(total, start + chunk)) @ g % 2
        metrics = np.array([sum(L[z] for z in range(code.n) if w[z]) for w in words])
        i = int(np.argmin(metrics))
        if metrics[i] < best_metric:
            best_metric, best_word = metrics[i], words[i]
    return best_word.astype(np.uint8)


def naive_aggregate(L, estimates) -> np.ndarray:
    """Literal double loop over z and v of the aggregation average."""
    L = [float(x) for x in np.asarray(L, dtype=float)]
    n = len(L)
    m = n.bit_length() - 1
    out = []
    for z in range(n):
        acc = 0.0
        for v in range(1, n):
            if v not in estimates:
                raise MissingSubspaceError(f"no estimate for v={v}")
            reps = sorted(min(x, x ^ v) for x in range(n) if x < (x ^ v))
            position = reps.index(min(z, z ^ v))
            acc += (1 - 2 * int(estimates[v][position])) * L[z ^ v]
        out.append(acc / (n - 1))
    assert len(out) == 1 << m
    return np.array(out)


@dataclass
class ProjectedChannelStats:
    histogram: dict = field(repr=False)
    samples: int
    tv_distance: float
    parity_flip_rate: float | None
    exact: dict = field(repr=False, default_factory=dict)


def empirical_projected_channel(channel: DiscreteBms, samples: int, rng: np.random.Generator) -> ProjectedChannelStats:
    """Sample ``(y1, y2, u1 ^ u2)`` through two independent channel uses.

    Inputs ``u1, u2`` are independent fair bits. The histogram is compared
    with ``W-(y1, y2 | s) / 2`` (uniform parity prior) in total variation.
    ``parity_flip_rate`` is the fraction of samples whose hard decisions
    disagree with ``s``; it is reported only when every output has a
    definite hard decision (no zero-LLR outputs).
    """
    if samples < 10_000:
        raise ParameterError("use at least 10^4 samples")
    ch = channel.to_discrete()
    k = len(ch)
    u = rng.integers(0, 2, size=(samples, 2))
    y = np.empty((samples, 2), dtype=np.int64)
    for col in range(2):
        for bit, probs in ((0, ch.p0), (1, ch.p1)):
            sel = u[:, col] == bit
            y[sel, col] = rng.choice(k, size=int(sel.sum()), p=probs)
    s = u[:, 0] ^ u[:, 1]
    counts = np.zeros((k, k, 2))
    np.add.at(counts, (y[:, 0], y[:, 1], s), 1.0)
    empirical = counts / samples

    minus = combine_minus(ch)
    exact = np.stack([minus.p0, minus.p1], axis=-1).reshape(k, k, 2) / 2.0
    tv = 0.5 * float(np.abs(empirical - exact).sum())

    flip_rate = None
    with np.errstate(divide="ignore"):
        decision = np.sign(np.log(ch.p0) - np.log(ch.p1))
    if not np.isnan(decision).any() and (decision != 0).all():
        hard = (decision[y] < 0).astype(np.int64)
        flip_rate = float(((hard[:, 0] ^ hard[:, 1]) != s).mean())

    histogram = {
        (ch.outputs[a], ch.outputs[b], int(p)): int(counts[a, b, p])
        for a in range(k)
        for b in range(k)
        for p in range(2)
        if counts[a, b, p]
    }
    exact_map = {
        (ch.outputs[a], ch.outputs[b], p): float(exact[a, b, p])
        for a in range(k)
        for b in range(k)
        for p in range(2)
    }
    return ProjectedChannelStats(histogram, samples, tv, flip_rate, exact_map)
