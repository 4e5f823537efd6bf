"""Binary memoryless symmetric channels.

Parametric families (:class:`Bsc`, :class:`Bec`, :class:`BiAwgn`) and an
explicit finite-alphabet channel (:class:`DiscreteBms`, wrapped by
:class:`Custom`) share one small interface:

``sample(bits, rng)``
    one memoryless channel use per input bit.
``llr(y)``
    clamped log-likelihood ratios ``log W(y|0)/W(y|1)``.
``bhattacharyya()``
    ``sum_y sqrt(W(y|0) W(y|1))`` (an integral for the AWGN channel).
``to_discrete()``
    equivalent :class:`DiscreteBms` (finite-alphabet channels only).

Outputs of discrete channels are integer indices into the channel's
alphabet; BEC erasures are the symbol :data:`ERASURE`. BI-AWGN outputs are
real numbers ``(1 - 2x) + sigma * noise``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from collections.abc import Sequence
from typing import Hashable, Union

import numpy as np
from scipy.special import ndtr

from .errors import AlphabetOverflowError, ParameterError, UnknownSymbolError

LLR_MAX = 40.0
SYMMETRY_TOL = 1e-12
MERGE_TOL = 1e-9
MAX_COMBINE_OUTPUTS = 4096
ERASURE = 2


def _is_symmetric(p0: np.ndarray, p1: np.ndarray, tol: float) -> bool:
    """Whether some involution ``pi`` has ``p0[y] == p1[pi(y)]`` for all ``y``.

    Such an involution exists iff the multiset of pairs ``(p0, p1)`` equals
    the multiset of swapped pairs ``(p1, p0)``: match each class of equal
    pairs ``(a, b)`` with the class ``(b, a)``, and fix classes with a == b.
    """
    direct = np.lexsort((p1, p0))
    swapped = np.lexsort((p0, p1))
    return bool(
        np.allclose(p0[direct], p1[swapped], rtol=0, atol=tol)
        and np.allclose(p1[direct], p0[swapped], rtol=0, atol=tol)
    )


class PairOutputs(Sequence):
    """Ordered pairs ``(y1, y2)`` of a base alphabet, without materializing them."""

    def __init__(self, base):
        self.base = tuple(base)
        self._pos = {y: i for i, y in enumerate(self.base)}

    def __len__(self):
        return len(self.base) ** 2

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        n = len(self.base)
        if i < 0:
            i += n * n
        if not 0 <= i < n * n:
            raise IndexError(i)
        return (self.base[i // n], self.base[i % n])

    def index(self, value, *args):
        try:
            a, b = value
            return self._pos[a] * len(self.base) + self._pos[b]
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"{value!r} is not in alphabet") from None

    def __eq__(self, other):
        return isinstance(other, PairOutputs) and other.base == self.base

    def __hash__(self):
        return hash(("pairs", self.base))


@dataclass(frozen=True, eq=False)
class DiscreteBms:
    """A BMS channel given by its output alphabet and both likelihood columns."""

    outputs: tuple
    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self):
        p0 = np.array(self.p0, dtype=float)
        p1 = np.array(self.p1, dtype=float)
        outputs = self.outputs if isinstance(self.outputs, PairOutputs) else tuple(self.outputs)
        if p0.ndim != 1 or p0.shape != p1.shape or len(outputs) != len(p0):
            raise ParameterError("outputs, p0 and p1 must have equal lengths")
        if len(outputs) == 0:
            raise ParameterError("empty output alphabet")
        if not isinstance(outputs, PairOutputs) and len(set(outputs)) != len(outputs):
            raise ParameterError("duplicate output symbols")
        if (p0 < 0).any() or (p1 < 0).any() or not (np.isfinite(p0).all() and np.isfinite(p1).all()):
            raise ParameterError("probabilities must be finite and nonnegative")
        if abs(p0.sum() - 1) > SYMMETRY_TOL or abs(p1.sum() - 1) > SYMMETRY_TOL:
            raise ParameterError(f"likelihoods must sum to 1 (got {p0.sum()!r}, {p1.sum()!r})")
        if not _is_symmetric(p0, p1, SYMMETRY_TOL):
            raise ParameterError("channel is not symmetric: no involution maps W(.|0) onto W(.|1)")
        p0.setflags(write=False)
        p1.setflags(write=False)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)

    def __len__(self):
        return len(self.outputs)

    def __repr__(self):
        return f"DiscreteBms(|Y|={len(self)}, Z={self.bhattacharyya():.6g})"

    def index_of(self, symbol: Hashable) -> int:
        try:
            return self.outputs.index(symbol)
        except ValueError:
            raise UnknownSymbolError(f"unknown output symbol {symbol!r}") from None

    def symbol_llrs(self, clamp: float = LLR_MAX) -> np.ndarray:
        """Clamped LLR of every output, in alphabet order."""
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = np.log(self.p0) - np.log(self.p1)
        raw = np.where(np.isnan(raw), 0.0, raw)
        return np.clip(raw, -clamp, clamp)

    def llr(self, y, clamp: float = LLR_MAX):
        """LLR of output indices ``y`` (scalar or array)."""
        y = np.asarray(y)
        if not np.issubdtype(y.dtype, np.integer) or ((y < 0) | (y >= len(self))).any():
            raise UnknownSymbolError(f"output index out of range for a {len(self)}-symbol channel")
        out = self.symbol_llrs(clamp)[y]
        return float(out) if out.ndim == 0 else out

    def sample(self, bits, rng: np.random.Generator) -> np.ndarray:
        bits = np.asarray(bits)
        u = rng.random(bits.shape)
        c0 = np.cumsum(self.p0)
        c1 = np.cumsum(self.p1)
        last = len(self) - 1
        y0 = np.minimum(np.searchsorted(c0, u, side="right"), last)
        y1 = np.minimum(np.searchsorted(c1, u, side="right"), last)
        return np.where(bits == 0, y0, y1)

    def bhattacharyya(self) -> float:
        return float(np.sqrt(self.p0 * self.p1).sum())

    def to_discrete(self) -> "DiscreteBms":
        return self


@dataclass(frozen=True)
class Bsc:
    p: float

    def __post_init__(self):
        if not 0 < self.p < 0.5:
            raise ParameterError(f"BSC crossover must lie in (0, 1/2), got {self.p}")

    def __str__(self):
        return f"bsc:{self.p!r}"

    def sample(self, bits, rng):
        bits = np.asarray(bits, dtype=np.uint8)
        return bits ^ (rng.random(bits.shape) < self.p).astype(np.uint8)

    def llr(self, y, clamp: float = LLR_MAX):
        y = np.asarray(y)
        if not np.isin(y, (0, 1)).all():
            raise UnknownSymbolError("BSC outputs are 0 or 1")
        mag = min(math.log((1 - self.p) / self.p), clamp)
        out = np.where(y == 0, mag, -mag)
        return float(out) if out.ndim == 0 else out

    def bhattacharyya(self) -> float:
        return 2.0 * math.sqrt(self.p * (1 - self.p))

    def to_discrete(self) -> DiscreteBms:
        q = 1 - self.p
        return DiscreteBms((0, 1), [q, self.p], [self.p, q])


@dataclass(frozen=True)
class Bec:
    eps: float

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ParameterError(f"BEC erasure probability must lie in (0, 1), got {self.eps}")

    def __str__(self):
        return f"bec:{self.eps!r}"

    def sample(self, bits, rng):
        bits = np.asarray(bits, dtype=np.uint8)
        erased = rng.random(bits.shape) < self.eps
        return np.where(erased, np.uint8(ERASURE), bits)

    def llr(self, y, clamp: float = LLR_MAX):
        y = np.asarray(y)
        if not np.isin(y, (0, 1, ERASURE)).all():
            raise UnknownSymbolError("BEC outputs are 0, 1 or ERASURE")
        out = np.select([y == 0, y == 1], [clamp, -clamp], 0.0)
        return float(out) if out.ndim == 0 else out

    def bhattacharyya(self) -> float:
        return float(self.eps)

    def to_discrete(self) -> DiscreteBms:
        e = self.eps
        return DiscreteBms((0, 1, ERASURE), [1 - e, 0.0, e], [0.0, 1 - e, e])


@dataclass(frozen=True)
class BiAwgn:
    """Antipodal (0 -> +1, 1 -> -1) unit-energy inputs plus N(0, sigma^2) noise."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ParameterError(f"noise standard deviation must be positive, got {self.sigma}")

    def __str__(self):
        return f"awgn:{self.sigma!r}"

    def sample(self, bits, rng):
        bits = np.asarray(bits)
        return (1.0 - 2.0 * bits) + self.sigma * rng.standard_normal(bits.shape)

    def llr(self, y, clamp: float = LLR_MAX):
        y = np.asarray(y, dtype=float)
        if not np.isfinite(y).all():
            raise UnknownSymbolError("AWGN outputs must be finite reals")
        out = np.clip(2.0 * y / self.sigma**2, -clamp, clamp)
        return float(out) if out.ndim == 0 else out

    def bhattacharyya(self) -> float:
        return math.exp(-1.0 / (2.0 * self.sigma**2))

    def to_discrete(self) -> DiscreteBms:
        raise ParameterError("BI-AWGN is continuous; use quantize() for a discrete version")


@dataclass(frozen=True)
class Custom:
    channel: DiscreteBms
    label: str = "custom"

    def __str__(self):
        return self.label

    def sample(self, bits, rng):
        return self.channel.sample(bits, rng)

    def llr(self, y, clamp: float = LLR_MAX):
        return self.channel.llr(y, clamp)

    def bhattacharyya(self) -> float:
        return self.channel.bhattacharyya()

    def to_discrete(self) -> DiscreteBms:
        return self.channel


ChannelModel = Union[Bsc, Bec, BiAwgn, Custom]


def bhattacharyya(channel) -> float:
    return channel.bhattacharyya()


def combine_minus(channel: DiscreteBms) -> DiscreteBms:
    """The channel seen by ``u1 xor u2`` through two independent uses of ``channel``.

    ``W-(y1, y2 | s) = 1/2 * sum over u1 ^ u2 == s of W(y1|u1) W(y2|u2)``;
    the output alphabet is all ordered pairs ``(y1, y2)``.
    """
    channel = channel.to_discrete()
    if len(channel) > MAX_COMBINE_OUTPUTS:
        raise AlphabetOverflowError(
            f"{len(channel)} outputs would give {len(channel) ** 2} pairs "
            f"(limit is {MAX_COMBINE_OUTPUTS} input symbols)"
        )
    a0, a1 = channel.p0, channel.p1
    q0 = 0.5 * (np.outer(a0, a0) + np.outer(a1, a1))
    q1 = 0.5 * (np.outer(a0, a1) + np.outer(a1, a0))
    return DiscreteBms(PairOutputs(channel.outputs), q0.ravel(), q1.ravel())


def merge_equivalent_outputs(channel: DiscreteBms, tol: float = MERGE_TOL) -> DiscreteBms:
    """Merge outputs whose LLRs agree within ``tol``.

    Grouping is done on ``|LLR|`` and then split by sign, so a symmetric
    channel stays symmetric. Outputs with zero probability under both
    inputs are dropped. Each merged output keeps the symbol of its first
    member, and groups keep the order of their first members.
    """
    keep = np.flatnonzero((channel.p0 > 0) | (channel.p1 > 0))
    p0, p1 = channel.p0[keep], channel.p1[keep]
    with np.errstate(divide="ignore"):
        llr = np.log(p0) - np.log(p1)
    mag = np.abs(llr)
    order = np.argsort(mag, kind="stable")
    sorted_mag = mag[order]
    with np.errstate(invalid="ignore"):
        gaps = np.diff(sorted_mag)
    # inf - inf is nan: all infinite LLR magnitudes form one class.
    breaks = np.concatenate([[False], (gaps > tol) & ~np.isnan(gaps)])
    group_of = np.empty(len(keep), dtype=np.int64)
    group_of[order] = np.cumsum(breaks)
    g = int(group_of.max()) if len(keep) else 0
    group_min = np.full(g + 1, np.inf)
    np.minimum.at(group_min, group_of, mag)
    sign = np.sign(llr)
    sign[group_min[group_of] <= tol] = 0
    key = group_of * 3 + (sign.astype(np.int64) + 1)
    _, first, inverse = np.unique(key, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    slot = rank[inverse]
    n_out = len(first)
    m0 = np.zeros(n_out)
    m1 = np.zeros(n_out)
    np.add.at(m0, slot, p0)
    np.add.at(m1, slot, p1)
    reps = [None] * n_out
    for s, f in zip(rank, first):
        reps[s] = channel.outputs[keep[f]]
    return DiscreteBms(tuple(reps), m0, m1)


def combine_and_merge(channel: DiscreteBms, tol: float = MERGE_TOL) -> DiscreteBms:
    return merge_equivalent_outputs(combine_minus(channel), tol)


def quantize(channel, levels: int = 64, clamp: float = LLR_MAX) -> DiscreteBms:
    """Finite-alphabet version of ``channel``.

    Discrete channels are returned as-is. BI-AWGN outputs are binned
    symmetrically in the LLR domain: ``levels // 2`` equal-width bins on
    ``[0, L_hi)`` plus a tail bin, mirrored for negative LLRs. ``L_hi`` is
    the conditional LLR mean plus six standard deviations, capped at
    ``clamp``.
    """
    if not isinstance(levels, (int, np.integer)) or levels < 4 or levels % 2:
        raise ParameterError(f"levels must be an even integer >= 4, got {levels!r}")
    if not isinstance(channel, BiAwgn):
        return channel.to_discrete()
    s2 = channel.sigma**2
    mean, std = 2.0 / s2, 2.0 / channel.sigma
    hi = min(mean + 6.0 * std, clamp)
    half = levels // 2
    # Positive-side edges in the output (y) domain; LLR = 2y / sigma^2.
    edges = np.concatenate([np.linspace(0.0, hi, half) * s2 / 2.0, [np.inf]])
    lo_e, hi_e = edges[:-1], edges[1:]
    sd = channel.sigma
    # P(y in [a, b) | x=0) with y ~ N(+1, sigma^2); upper tail via ndtr(-.) for accuracy.
    pos0 = ndtr(-(lo_e - 1) / sd) - ndtr(-(hi_e - 1) / sd)
    pos1 = ndtr(-(lo_e + 1) / sd) - ndtr(-(hi_e + 1) / sd)
    # Bin i (i < half) is the mirror of bin levels-1-i.
    p0 = np.concatenate([pos1[::-1], pos0])
    p1 = np.concatenate([pos0[::-1], pos1])
    p0 = p0 / p0.sum()
    p1 = p1 / p1.sum()
    return DiscreteBms(tuple(range(levels)), p0, p1)


def read_custom_channel(path) -> DiscreteBms:
    """Load ``symbol-id, p(y|0), p(y|1)`` lines (blank lines and ``#`` comments ignored)."""
    outputs, p0, p1 = [], [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.replace("\t", ",").split(",")]
        parts = [p for p in parts if p]
        if len(parts) != 3:
            raise ParameterError(f"{path}:{lineno}: expected 'symbol, p0, p1'")
        try:
            outputs.append(parts[0])
            p0.append(float(parts[1]))
            p1.append(float(parts[2]))
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: bad probability") from None
    return DiscreteBms(tuple(outputs), p0, p1)


def parse_channel(spec: str) -> ChannelModel:
    """Parse ``bsc:<p>``, ``bec:<eps>``, ``awgn:<sigma>`` or ``custom:<path>``."""
    kind, sep, arg = spec.partition(":")
    kind = kind.strip().lower()
    if not sep or not arg:
        raise ParameterError(f"channel spec must look like 'bsc:0.1', got {spec!r}")
    if kind == "custom":
        return Custom(read_custom_channel(arg), label=spec)
    try:
        value = float(arg)
    except ValueError:
        raise ParameterError(f"bad channel parameter in {spec!r}") from None
    families = {"bsc": Bsc, "bec": Bec, "awgn": BiAwgn}
    if kind not in families:
        raise ParameterError(f"unknown channel family {kind!r}")
    return families[kind](value)


def random_symmetric_channel(rng: np.random.Generator, pairs: int, with_erasure: bool = False) -> DiscreteBms:
    """Random BMS channel built from ``pairs`` mirrored output pairs."""
    a = rng.random(pairs)
    b = rng.random(pairs)
    weights = [*a, *b]
    if with_erasure:
        weights.append(rng.random())
    total = sum(weights)
    p0 = list(a / total) + list(b / total)
    p1 = list(b / total) + list(a / total)
    outs: list = [f"y{i}+" for i in range(pairs)] + [f"y{i}-" for i in range(pairs)]
    if with_erasure:
        p0.append(weights[-1] / total)
        p1.append(weights[-1] / total)
        outs.append("e")
    return DiscreteBms(tuple(outs), p0, p1)
