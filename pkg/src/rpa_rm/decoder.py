"""Recursive projection-aggregation (RPA) decoding of RM(m, r).

Each iteration projects the LLR vector onto all ``2**m - 1`` one-dimensional
subspaces ``<v>``, decodes every projection recursively as RM(m-1, r-1),
and aggregates the decoded coset parities back into a fresh LLR vector.
First-order codes are decoded exactly (maximum likelihood) with a fast
Walsh-Hadamard transform.

Array conventions: LLR vectors are float arrays whose last axis has length
``2**m``; any leading axes are batch axes. The coset ``{z, z ^ v}`` of a
projection is stored at the rank of its smaller element ``min(z, z ^ v)``
among all such representatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import _kernels
from .channels import LLR_MAX
from .errors import LengthMismatchError, MissingSubspaceError, ParameterError
from .rm_code import RmCode

# Rough ceiling on float elements alive at once inside one batched call.
_WORK_ELEMENTS = 1 << 22


TIE_BREAKS = ("first", "random")


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder settings shared by every level of the recursion.

    ``tie_break="first"`` resolves FHT ties to the smallest ``s`` and then
    ``sigma = +1`` and decides zero LLRs as bit 0. ``"random"`` replaces both
    rules by hashed coin flips keyed on a caller-supplied seed, which makes
    the decoder commute with adding a codeword to the input; that is what
    justifies simulating only the all-zeros codeword.
    """

    n_max: int
    llr_clamp: float = LLR_MAX
    tie_break: str = "first"

    def __post_init__(self):
        if self.tie_break not in TIE_BREAKS:
            raise ParameterError(f"tie_break must be one of {TIE_BREAKS}, got {self.tie_break!r}")
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 1:
            raise ParameterError(f"n_max must be a positive integer, got {self.n_max!r}")
        if not self.llr_clamp > 0:
            raise ParameterError(f"llr_clamp must be positive, got {self.llr_clamp!r}")

    @classmethod
    def default(cls, m: int, **kw) -> "DecoderConfig":
        """``ceil(m / 2)`` iterations per recursion level."""
        return cls(n_max=max(1, math.ceil(m / 2)), **kw)


@dataclass(frozen=True)
class FhtResult:
    codeword: np.ndarray
    sigma: int
    s: int
    score: float


# -- index tables ----------------------------------------------------------


@lru_cache(maxsize=None)
def _tables(m: int):
    """(reps, partner, coset_index) for all nonzero v, each row indexed by v - 1.

    reps[v-1, j]        j-th coset representative for <v> (ascending)
    partner[v-1, z]     z ^ v
    coset_index[v-1, z] position of the coset containing z
    """
    n = 1 << m
    v = np.arange(1, n, dtype=np.int64)[:, None]
    top = np.floor(np.log2(v)).astype(np.int64)
    low_mask = (np.int64(1) << top) - 1
    j = np.arange(n // 2, dtype=np.int64)[None, :]
    reps = ((j >> top) << (top + 1)) | (j & low_mask)
    z = np.arange(n, dtype=np.int64)[None, :]
    partner = z ^ v
    rep = np.minimum(z, partner)
    coset_index = ((rep >> (top + 1)) << top) | (rep & low_mask)
    for t in (reps, partner, coset_index):
        t.setflags(write=False)
    return reps, partner, coset_index


def coset_representatives(m: int, v: int) -> np.ndarray:
    return _tables(m)[0][v - 1]


# -- primitives ------------------------------------------------------------


def boxplus(a, b, clamp: float = LLR_MAX):
    """LLR of the XOR of two bits with LLRs ``a`` and ``b``.

    ``log(e^(a+b) + 1) - log(e^a + e^b)``, evaluated as
    ``sign(a) sign(b) min(|a|, |b|) + log1p(e^-|a+b|) - log1p(e^-|a-b|)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b)) + (
        np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    )
    out = np.clip(out, -clamp, clamp)
    return float(out) if out.ndim == 0 else out


def hard_decision(L) -> np.ndarray:
    """Bit 1 exactly where the LLR is negative (a zero LLR decides 0)."""
    return (np.asarray(L) < 0).astype(np.uint8)


def _check_llrs(L, m: int | None = None) -> tuple[np.ndarray, int]:
    L = np.asarray(L, dtype=float)
    n = L.shape[-1] if L.ndim else 0
    if n == 0 or n & (n - 1):
        raise LengthMismatchError(f"LLR vector length must be a power of two, got shape {L.shape}")
    got = n.bit_length() - 1
    if m is not None and got != m:
        raise LengthMismatchError(f"expected LLR length {1 << m}, got {n}")
    if not np.isfinite(L).all():
        raise ParameterError("LLRs must be finite")
    return L, got


def project(L, v: int, clamp: float = LLR_MAX) -> np.ndarray:
    """Coset-parity LLRs of ``L`` along ``<v>``; length halves."""
    L, m = _check_llrs(L)
    if m < 1:
        raise LengthMismatchError("cannot project a length-1 vector")
    if not 0 < v < (1 << m):
        raise ParameterError(f"v must be a nonzero {m}-bit vector, got {v}")
    reps = _tables(m)[0][v - 1]
    return boxplus(L[..., reps], L[..., reps ^ v], clamp)


def project_all(L: np.ndarray, m: int, clamp: float = LLR_MAX) -> np.ndarray:
    """Projections of each row of ``L`` along every nonzero v.

    Returns shape ``(rows, 2**m - 1, 2**(m-1))``; row ``v - 1`` of each
    block is ``project(L, v)``.
    """
    L = np.ascontiguousarray(L, dtype=float).reshape(-1, 1 << m)
    return _kernels.project_all(L, m, float(clamp))


def walsh_hadamard(x: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    ``out[s] = sum_z x[z] * (-1)**popcount(s & z)``.
    """
    x = np.array(x, dtype=float, copy=True)
    n = x.shape[-1]
    lead = x.shape[:-1]
    h = 1
    while h < n:
        y = x.reshape(*lead, n // (2 * h), 2, h)
        a = y[..., 0, :].copy()
        b = y[..., 1, :]
        y[..., 0, :] += b
        y[..., 1, :] = a - b
        h *= 2
    return x


def _fht_batch(L: np.ndarray, seeds: np.ndarray | None = None):
    """ML decoding of each row of a 2-D array. Returns (codewords, sigma, s, score)."""
    L = np.ascontiguousarray(L, dtype=float)
    randomize = seeds is not None
    if seeds is None:
        seeds = np.zeros(L.shape[0], dtype=np.uint64)
    return _kernels.fht_rows(L, seeds, randomize)


def fht_decode(L, tie_break: str = "first", seed: int = 0) -> FhtResult:
    """Maximum-likelihood decoding of a first-order RM code.

    Picks ``(sigma, s)`` maximizing ``sigma * <L, chi_s>``; by default ties
    go to the smallest ``s`` and then to ``sigma = +1``.
    """
    L, _ = _check_llrs(L)
    if L.ndim != 1:
        raise ParameterError("fht_decode takes a single LLR vector")
    if tie_break not in TIE_BREAKS:
        raise ParameterError(f"unknown tie_break {tie_break!r}")
    seeds = np.array([seed], dtype=np.uint64) if tie_break == "random" else None
    bits, sigma, s, score = _fht_batch(L[None, :], seeds)
    return FhtResult(codeword=bits[0], sigma=int(sigma[0]), s=int(s[0]), score=float(score[0]))


def _aggregate(L: np.ndarray, yhat: np.ndarray, m: int, clamp: float) -> np.ndarray:
    n = 1 << m
    L2 = np.ascontiguousarray(L, dtype=float).reshape(-1, n)
    y3 = np.ascontiguousarray(yhat, dtype=np.uint8).reshape(-1, n - 1, n // 2)
    if y3.shape[0] != L2.shape[0]:
        y3 = np.broadcast_to(y3, (L2.shape[0], n - 1, n // 2)).copy()
    out = _kernels.aggregate_rows(L2, y3, m, float(clamp))
    return out.reshape(L.shape)


def aggregate(L, estimates, clamp: float = LLR_MAX) -> np.ndarray:
    """Sign-corrected average of the other coordinates' LLRs.

    ``estimates`` maps every nonzero ``v`` to the decoded coset-parity word of
    the projection along ``<v>`` (or is an array whose row ``v - 1`` holds it).
    """
    L, m = _check_llrs(L)
    n = 1 << m
    if isinstance(estimates, Mapping):
        missing = [v for v in range(1, n) if v not in estimates]
        if missing:
            raise MissingSubspaceError(f"no estimate for v in {missing[:8]}")
        yhat = np.stack([np.asarray(estimates[v], dtype=np.uint8) for v in range(1, n)], axis=-2)
    else:
        yhat = np.asarray(estimates, dtype=np.uint8)
    if yhat.shape[-2:] != (n - 1, n // 2):
        raise MissingSubspaceError(f"estimates must have shape (..., {n - 1}, {n // 2}), got {yhat.shape}")
    return _aggregate(L, yhat, m, clamp)


def _cost(m: int, r: int) -> int:
    n = 1 << m
    if r <= 1:
        return 2 * n
    return (n - 1) * n + (n - 1) * _cost(m - 1, r - 1)


def _rpa(L: np.ndarray, m: int, r: int, n_max: int, clamp: float, seeds) -> np.ndarray:
    """Decode the rows of a 2-D LLR array; returns uint8 codewords of the same shape.

    ``seeds`` is None for the deterministic tie-break, else one uint64 per row.
    """
    if r == 1:
        return _fht_batch(L, seeds)[0]
    rows = L.shape[0]
    chunk = max(1, _WORK_ELEMENTS // _cost(m, r))
    if rows > chunk:
        return np.concatenate(
            [
                _rpa(L[i : i + chunk], m, r, n_max, clamp, None if seeds is None else seeds[i : i + chunk])
                for i in range(0, rows, chunk)
            ]
        )
    n = 1 << m
    L = L.copy()
    pattern = np.sign(L)
    active = np.arange(rows)
    for it in range(n_max):
        cur = L[active]
        proj = project_all(cur, m, clamp)
        kids = None
        if seeds is not None:
            kids = _kernels.child_seeds(seeds[active], it, n).reshape(-1)
        yhat = _rpa(proj.reshape(-1, n // 2), m - 1, r - 1, n_max, clamp, kids)
        new = _aggregate(cur, yhat.reshape(len(active), n - 1, n // 2), m, clamp)
        L[active] = new
        sg = np.sign(new)
        changed = (sg != pattern[active]).any(axis=-1)
        pattern[active] = sg
        active = active[changed]
        if active.size == 0:
            break
    if seeds is None:
        return hard_decision(L)
    return _kernels.random_zero_bits(np.ascontiguousarray(L), seeds)


def rpa_decode_batch(code: RmCode, L, cfg: DecoderConfig | None = None, seeds=None) -> np.ndarray:
    """Decode each row of ``L`` (shape ``(batch, 2**m)``).

    With ``cfg.tie_break == "random"``, ``seeds`` supplies one integer per
    row (default: all zero); the output is a deterministic function of the
    LLRs and the seeds.
    """
    if code.r < 1:
        raise ParameterError("RPA decoding needs r >= 1")
    cfg = cfg or DecoderConfig.default(code.m)
    L, _ = _check_llrs(L, code.m)
    flat = np.clip(L.reshape(-1, code.n), -cfg.llr_clamp, cfg.llr_clamp)
    row_seeds = None
    if cfg.tie_break == "random":
        row_seeds = np.zeros(flat.shape[0], dtype=np.uint64)
        if seeds is not None:
            row_seeds[:] = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    out = _rpa(flat, code.m, code.r, cfg.n_max, cfg.llr_clamp, row_seeds)
    return out.reshape(L.shape)


def rpa_decode(code: RmCode, L, cfg: DecoderConfig | None = None, seed: int = 0) -> np.ndarray:
    """Decode one LLR vector with the RPA decoder.

    Each level runs up to ``cfg.n_max`` project/decode/aggregate rounds and
    stops early once a round leaves the sign pattern of the LLRs unchanged.
    The same configuration is used at every level of the recursion.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 1:
        raise ParameterError("rpa_decode takes a single LLR vector; use rpa_decode_batch")
    return rpa_decode_batch(code, L[None, :], cfg, [seed])[0]
