"""Reed-Muller codes RM(m, r) as evaluation codes of Boolean polynomials.

Conventions used throughout the package:

* Evaluation point ``z = (z_1, ..., z_m)`` lives at integer index
  ``sum(z_i * 2**(m - i))``, so ``z_1`` is the most significant bit and the
  natural index order is the lexicographic order of the points.
* A message is the coefficient vector of ``f`` over the monomial basis
  ordered by degree, ties broken by the lexicographic order of the variable
  index sets: ``1, x1, ..., xm, x1x2, x1x3, ..., x(m-1)xm, x1x2x3, ...``.
* Codewords and messages are ``numpy.uint8`` arrays of 0/1 values.

Encoding is done with the binary Moebius (subset-zeta) transform, which maps
the algebraic normal form of ``f`` to its evaluation vector in
``O(n log n)`` XORs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterator

import numpy as np

from .errors import LengthMismatchError, ParameterError

MAX_M = 24
MAX_ENUM_K = 24


@dataclass(frozen=True)
class RmCode:
    """The r-th order binary Reed-Muller code of length ``2**m``."""

    m: int
    r: int
    n: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        m, r = self.m, self.r
        if not (isinstance(m, (int, np.integer)) and isinstance(r, (int, np.integer))):
            raise ParameterError(f"m and r must be integers, got m={m!r}, r={r!r}")
        if not 0 <= m <= MAX_M:
            raise ParameterError(f"m must satisfy 0 <= m <= {MAX_M}, got m={m}")
        if not 0 <= r <= m:
            raise ParameterError(f"r must satisfy 0 <= r <= m, got r={r}, m={m}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "r", int(r))
        object.__setattr__(self, "n", 1 << int(m))
        object.__setattr__(self, "k", sum(comb(int(m), i) for i in range(int(r) + 1)))

    def __str__(self):
        return f"RM({self.m},{self.r})"


def new_rm_code(m: int, r: int) -> RmCode:
    return RmCode(m, r)


@lru_cache(maxsize=None)
def monomials(m: int, r: int) -> tuple[tuple[int, ...], ...]:
    """Variable index sets (1-based) of the basis monomials, in message order."""
    return tuple(s for d in range(r + 1) for s in combinations(range(1, m + 1), d))


@lru_cache(maxsize=None)
def _monomial_masks(m: int, r: int) -> np.ndarray:
    masks = [sum(1 << (m - i) for i in s) for s in monomials(m, r)]
    out = np.array(masks, dtype=np.int64)
    out.setflags(write=False)
    return out


def point_index(z) -> int:
    """Index of the evaluation point with coordinates ``z = (z_1, ..., z_m)``."""
    idx = 0
    for bit in z:
        idx = (idx << 1) | (int(bit) & 1)
    return idx


def point_bits(index: int, m: int) -> tuple[int, ...]:
    """Coordinates ``(z_1, ..., z_m)`` of the point at ``index``."""
    return tuple((index >> (m - i)) & 1 for i in range(1, m + 1))


def subset_transform(a: np.ndarray) -> np.ndarray:
    """Binary Moebius transform along the last axis (an involution over GF(2)).

    ``out[z] = XOR of a[s] over all s whose set bits are a subset of z``.
    """
    a = np.array(a, dtype=np.uint8, copy=True)
    n = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < n:
        v = a.reshape(*lead, n // (2 * h), 2, h)
        v[..., 1, :] ^= v[..., 0, :]
        h *= 2
    return a


def _as_bits(x, length: int, what: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.shape[-1:] != (length,):
        raise LengthMismatchError(f"{what} must have length {length}, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ParameterError(f"{what} entries must be 0 or 1")
    return arr.astype(np.uint8)


def encode(code: RmCode, msg) -> np.ndarray:
    """Evaluate the polynomial whose basis coefficients are ``msg``.

    ``msg`` may carry leading batch dimensions; the last axis must be ``k``.
    """
    msg = _as_bits(msg, code.k, "message")
    coeffs = np.zeros(msg.shape[:-1] + (code.n,), dtype=np.uint8)
    coeffs[..., _monomial_masks(code.m, code.r)] = msg
    return subset_transform(coeffs)


def algebraic_normal_form(word) -> np.ndarray:
    """Coefficient of every monomial (indexed by variable mask) for a length-2**m word."""
    return subset_transform(word)


def is_codeword(code: RmCode, word) -> bool:
    word = _as_bits(word, code.n, "word")
    anf = algebraic_normal_form(word)
    degrees = np.array([bin(i).count("1") for i in range(code.n)])
    return not anf[degrees > code.r].any()


def counter_message(code: RmCode, counter: int) -> np.ndarray:
    """Message for position ``counter`` of the enumeration order.

    Reading the counter in binary, most significant digit first, gives the
    coefficients of the non-constant monomials in basis order followed by
    the constant coefficient. For first-order codes this makes the counter
    equal ``2*s + (sigma == -1)`` for the codeword ``sigma * chi_s``.
    """
    k = code.k
    msg = np.empty(k, dtype=np.uint8)
    msg[0] = counter & 1
    for j in range(1, k):
        msg[j] = (counter >> (k - j)) & 1
    return msg


def _counter_messages(k: int, start: int, stop: int) -> np.ndarray:
    c = np.arange(start, stop, dtype=np.int64)
    shifts = np.array([0] + [k - j for j in range(1, k)], dtype=np.int64)
    return ((c[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def enumerate_codewords(code: RmCode, chunk: int = 4096) -> Iterator[np.ndarray]:
    """Yield all ``2**k`` codewords once each, in message-counter order."""
    if code.k > MAX_ENUM_K:
        raise ParameterError(f"refusing to enumerate 2**{code.k} codewords (k > {MAX_ENUM_K})")
    total = 1 << code.k
    for start in range(0, total, chunk):
        block = encode(code, _counter_messages(code.k, start, min(total, start + chunk)))
        yield from block


def min_distance(code: RmCode, verify: bool = False) -> int:
    """Minimum distance ``2**(m - r)``.

    With ``verify=True`` the value is confirmed by exhaustive enumeration,
    which is only sensible for small codes.
    """
    d = 1 << (code.m - code.r)
    if verify:
        weights = [int(c.sum()) for c in enumerate_codewords(code)]
        observed = min((w for w in weights if w), default=d)
        if observed != d:
            raise AssertionError(f"{code}: exhaustive minimum weight {observed} != {d}")
    return d


def random_messages(code: RmCode, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    shape = (code.k,) if size is None else (size, code.k)
    return rng.integers(0, 2, size=shape, dtype=np.uint8)


# -- text serialization ----------------------------------------------------


def to_bits_string(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def to_hex(bits) -> str:
    """Hex text, most significant nibble first; the bit vector is left-aligned
    and zero-padded at the end to a whole number of nibbles."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    pad = (-len(bits)) % 4
    padded = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    nibbles = padded.reshape(-1, 4) @ np.array([8, 4, 2, 1])
    return "".join(f"{v:x}" for v in nibbles)


def parse_bits(text: str, length: int) -> np.ndarray:
    """Parse a 0/1 string or a hex string (optionally ``0x``-prefixed).

    A string of exactly ``length`` binary digits is read as bits; anything
    else is read as hex, which must carry exactly ``ceil(length/4)`` nibbles
    with zero padding.
    """
    s = text.strip().replace("_", "")
    if len(s) == length and set(s) <= {"0", "1"}:
        return np.array([int(c) for c in s], dtype=np.uint8)
    body = s[2:] if s.lower().startswith("0x") else s
    try:
        value = [int(c, 16) for c in body]
    except ValueError:
        raise ParameterError(f"not a bit string or hex string: {text!r}") from None
    if len(body) != -(-length // 4) or length == 0:
        raise LengthMismatchError(
            f"expected {length} bits ({-(-length // 4)} hex digits), got {text!r}"
        )
    bits = np.array([(v >> (3 - i)) & 1 for v in value for i in range(4)], dtype=np.uint8)
    if bits[length:].any():
        raise LengthMismatchError(f"hex value {text!r} has nonzero padding beyond {length} bits")
    return bits[:length]
