"""Closed-form error-probability bounds for one-iteration RPA decoding.

Everything is evaluated in the natural-log domain, because quantities such
as ``Z ** 2**(m - r)`` underflow double precision long before ``m`` gets
interesting. Notation (all for a code RM(m, r) and channel parameter Z):

* ``Z_i`` -- Bhattacharyya parameter bound of the channel seen at recursion
  height ``i``, ``Z_i = 1 - (1 - Z)**(2**(r - i))`` with ``Z_r = Z``.
* ``N_i = 2**(m - r + i)``.
* ``P(Q_1) <= (2**(m-r+2) - 1) * Z_1**(2**(m-r))`` for the first-order leaves.
* ``P(Q_i) <= N_i Z_i**(N_i - 1) + (N_i - 1) P(Q_{i-1})`` for ``i >= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .channels import DiscreteBms, combine_and_merge
from .errors import ParameterError

LN2 = math.log(2.0)


def _log1mexp(x: float) -> float:
    """``log(1 - exp(x))`` for ``x < 0``, accurate on the whole range."""
    if x > -LN2:
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def _log_pow2_minus1(e: float) -> float:
    """``log(2**e - 1)`` for ``e >= 1``."""
    return e * LN2 + math.log1p(-(2.0 ** -e))


@dataclass(frozen=True)
class BoundInputs:
    m: int
    r: int
    Z: float

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and isinstance(self.r, (int, np.integer))):
            raise ParameterError("m and r must be integers")
        if not 1 <= self.r <= self.m:
            raise ParameterError(f"need 1 <= r <= m, got m={self.m}, r={self.r}")
        if not 0.0 < self.Z < 1.0:
            raise ParameterError(f"Bhattacharyya parameter must lie in (0, 1), got {self.Z}")


def bhattacharyya_sequence(inp: BoundInputs) -> list[float]:
    """``[Z_1, ..., Z_r]`` from the unrolled Bhattacharyya recursion."""
    base = math.log1p(-inp.Z)
    return [-math.expm1(2.0 ** (inp.r - i) * base) for i in range(1, inp.r + 1)]


def _log_z_sequence(inp: BoundInputs) -> list[float]:
    # log Z_i = log(1 - (1 - Z)**(2**(r-i)))
    base = math.log1p(-inp.Z)
    return [_log1mexp(2.0 ** (inp.r - i) * base) for i in range(1, inp.r + 1)]


def _check_log_z(inp: BoundInputs, log_z: Sequence[float] | None) -> list[float]:
    if log_z is None:
        return _log_z_sequence(inp)
    log_z = [float(v) for v in log_z]
    if len(log_z) != inp.r or any(not v < 0 for v in log_z):
        raise ParameterError(f"need r={inp.r} log-Bhattacharyya values, each < 0")
    return log_z


def q1_bound(inp: BoundInputs, log_z: Sequence[float] | None = None) -> float:
    """``log`` of the first-order (leaf) error bound."""
    lz = _check_log_z(inp, log_z)
    return _log_pow2_minus1(inp.m - inp.r + 2) + 2.0 ** (inp.m - inp.r) * lz[0]


def _log_a(inp: BoundInputs, lz: list[float], t: int) -> float:
    e = inp.m - inp.r + t
    return e * LN2 + (2.0**e - 1.0) * lz[t - 1]


def _log_b(inp: BoundInputs, t: int) -> float:
    return _log_pow2_minus1(inp.m - inp.r + t)


def q_recurrence(inp: BoundInputs, log_z: Sequence[float] | None = None) -> list[float]:
    """``[log P(Q_2), ..., log P(Q_r)]`` by iterating the one-step recurrence."""
    lz = _check_log_z(inp, log_z)
    prev = q1_bound(inp, lz)
    out = []
    for i in range(2, inp.r + 1):
        prev = float(np.logaddexp(_log_a(inp, lz, i), _log_b(inp, i) + prev))
        out.append(prev)
    return out


def unrolled_bound(inp: BoundInputs, log_z: Sequence[float] | None = None) -> float:
    """``log`` of the closed-form bound on ``P(Q_r)``:

    ``sum_{t=2}^r A_t prod_{s=t+1}^r B_s + P(Q_1) prod_{s=2}^r B_s``.
    """
    lz = _check_log_z(inp, log_z)
    log_b = {s: _log_b(inp, s) for s in range(2, inp.r + 1)}
    terms = [
        _log_a(inp, lz, t) + sum(log_b[s] for s in range(t + 1, inp.r + 1))
        for t in range(2, inp.r + 1)
    ]
    terms.append(q1_bound(inp, lz) + sum(log_b.values()))
    return float(logsumexp(terms))


def theorem_threshold(m: int, Z: float) -> float:
    """Order threshold ``log2(m) - log2(lambda)`` with ``lambda = -ln(1 - Z)``."""
    if m < 2:
        raise ParameterError(f"threshold needs m >= 2, got {m}")
    if not 0.0 < Z < 1.0:
        raise ParameterError(f"Z must lie in (0, 1), got {Z}")
    lam = -math.log1p(-Z)
    return math.log2(m) - math.log2(lam)


@dataclass
class BoundReport:
    m: int
    r: int
    Z: float
    z_seq: list[float]
    q1: float
    a_terms: list[float]
    b_terms: list[float]
    q_seq: list[float]
    q_r: float
    q_r_clamped: float
    vacuous: bool
    threshold: float | None
    r_below_threshold: bool | None
    n_seq: list[float] = field(default_factory=list)
    exact_z: bool = False

    def as_record(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "Z": self.Z,
            "z_seq": list(self.z_seq),
            "log_q1": self.q1,
            "log_a_terms": list(self.a_terms),
            "log_b_terms": list(self.b_terms),
            "log_q_seq": list(self.q_seq),
            "log_q_r": self.q_r,
            "q_r_clamped": self.q_r_clamped,
            "vacuous": self.vacuous,
            "threshold": self.threshold,
            "r_below_threshold": self.r_below_threshold,
            "n_seq": list(self.n_seq),
            "exact_z": self.exact_z,
        }


def bound_report(m: int, r: int, Z: float, log_z: Sequence[float] | None = None) -> BoundReport:
    """All bound quantities for RM(m, r) over a channel with parameter ``Z``.

    ``a_terms``, ``b_terms`` and the ``q`` values are natural logs.
    ``log_z`` optionally overrides ``log Z_1 ... log Z_r`` (see
    :func:`exact_log_z_sequence`).
    """
    inp = BoundInputs(m, r, Z)
    lz = _check_log_z(inp, log_z)
    q1 = q1_bound(inp, lz)
    q_seq = q_recurrence(inp, lz)
    q_r = unrolled_bound(inp, lz) if r >= 2 else q1
    thr = theorem_threshold(m, Z) if m >= 2 else None
    return BoundReport(
        m=m,
        r=r,
        Z=Z,
        z_seq=[math.exp(v) for v in lz],
        q1=q1,
        a_terms=[_log_a(inp, lz, t) for t in range(2, r + 1)],
        b_terms=[_log_b(inp, t) for t in range(2, r + 1)],
        q_seq=q_seq,
        q_r=q_r,
        q_r_clamped=min(1.0, math.exp(min(q_r, 0.0))),
        vacuous=q_r >= 0.0,
        threshold=thr,
        r_below_threshold=None if thr is None else r < thr,
        n_seq=[2.0 ** (m - r + i) for i in range(1, r + 1)],
        exact_z=log_z is not None,
    )


def exact_log_z_sequence(channel: DiscreteBms, r: int) -> list[float]:
    """``log Z_i`` computed by repeatedly minus-combining ``channel``.

    ``Z_r`` is the channel itself and each lower height applies one more
    combine step (with LLR-equivalent outputs merged). These exact values
    are never larger than the closed-form ones, so bounds built from them
    remain valid and are tighter.
    """
    ch = channel.to_discrete()
    zs = [ch.bhattacharyya()]
    for _ in range(r - 1):
        ch = combine_and_merge(ch)
        zs.append(ch.bhattacharyya())
    zs.reverse()
    if any(not 0.0 < z < 1.0 for z in zs):
        raise ParameterError("combined channel became degenerate")
    return [math.log(z) for z in zs]
