"""Compiled inner loops for the RPA decoder.

All kernels work on C-contiguous 2-D float64 arrays whose rows are
independent LLR vectors, and accumulate in a fixed order so a row's result
does not depend on the rest of the batch.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _sign(x):
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@njit(cache=True, inline="always")
def mix64(x):
    """splitmix64 finalizer on a uint64."""
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@njit(cache=True, inline="always")
def boxplus1(a, b, clamp):
    # Corrections are grouped so that negating either input negates the
    # result bit for bit.
    out = _sign(a) * _sign(b) * min(abs(a), abs(b)) + (
        math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))
    )
    if out > clamp:
        return clamp
    if out < -clamp:
        return -clamp
    return out


@njit(cache=True, nogil=True)
def project_all(L, m, clamp):
    rows = L.shape[0]
    n = 1 << m
    half = n >> 1
    out = np.empty((rows, n - 1, half))
    for row in range(rows):
        for v in range(1, n):
            top = 0
            while (v >> (top + 1)) != 0:
                top += 1
            low = (1 << top) - 1
            for j in range(half):
                rep = ((j >> top) << (top + 1)) | (j & low)
                out[row, v - 1, j] = boxplus1(L[row, rep], L[row, rep ^ v], clamp)
    return out


@njit(cache=True, nogil=True)
def wht_rows(x):
    """In-place unnormalized Walsh-Hadamard transform of every row."""
    rows, n = x.shape
    for row in range(rows):
        h = 1
        while h < n:
            for start in range(0, n, 2 * h):
                for i in range(start, start + h):
                    a = x[row, i]
                    b = x[row, i + h]
                    x[row, i] = a + b
                    x[row, i + h] = a - b
            h *= 2


@njit(cache=True, nogil=True)
def fht_rows(L, seeds, randomize):
    """ML decode each row as a first-order RM codeword.

    The winner maximizes sigma * W[s]. Ties go to the smallest s and then
    sigma = +1, or, with ``randomize``, to a uniformly chosen maximizer
    selected by hashing the row's seed.
    """
    rows, n = L.shape
    coeffs = L.copy()
    wht_rows(coeffs)
    bits = np.empty((rows, n), dtype=np.uint8)
    sigma = np.empty(rows, dtype=np.int64)
    s_out = np.empty(rows, dtype=np.int64)
    score = np.empty(rows)
    for row in range(rows):
        best = 0
        mag = abs(coeffs[row, 0])
        for s in range(1, n):
            a = abs(coeffs[row, s])
            if a > mag:
                mag = a
                best = s
        sg = -1 if coeffs[row, best] < 0.0 else 1
        if randomize:
            count = 0
            for s in range(n):
                w = coeffs[row, s]
                if w == mag:
                    count += 1
                if -w == mag:
                    count += 1
            if count > 1:
                pick = np.int64(mix64(seeds[row]) % np.uint64(count))
                for s in range(n):
                    w = coeffs[row, s]
                    if w == mag:
                        if pick == 0:
                            best, sg = s, 1
                            break
                        pick -= 1
                    if -w == mag:
                        if pick == 0:
                            best, sg = s, -1
                            break
                        pick -= 1
        flip = 1 if sg < 0 else 0
        for z in range(n):
            x = best & z
            parity = 0
            while x:
                parity ^= 1
                x &= x - 1
            bits[row, z] = parity ^ flip
        sigma[row] = sg
        s_out[row] = best
        score[row] = mag
    return bits, sigma, s_out, score


@njit(cache=True, nogil=True)
def child_seeds(seeds, iteration, n):
    """Seed for the projection along v (column v - 1) of every row."""
    rows = seeds.shape[0]
    out = np.empty((rows, n - 1), dtype=np.uint64)
    for row in range(rows):
        base = mix64(seeds[row] ^ mix64(np.uint64(iteration) + np.uint64(0x9E3779B97F4A7C15)))
        for v in range(1, n):
            out[row, v - 1] = mix64(base + np.uint64(v) * np.uint64(0x9E3779B97F4A7C15))
    return out


@njit(cache=True, nogil=True)
def random_zero_bits(L, seeds):
    """Hard decisions where zero LLRs become hashed coin flips."""
    rows, n = L.shape
    out = np.empty((rows, n), dtype=np.uint8)
    for row in range(rows):
        for z in range(n):
            x = L[row, z]
            if x < 0.0:
                out[row, z] = 1
            elif x > 0.0:
                out[row, z] = 0
            else:
                h = mix64(seeds[row] ^ mix64(np.uint64(z) + np.uint64(0x632BE59BD9B4E019)))
                out[row, z] = np.uint8(h >> np.uint64(63))
    return out


@njit(cache=True, nogil=True)
def aggregate_rows(L, yhat, m, clamp):
    """yhat has shape (rows, n - 1, n // 2) in representative order."""
    rows = L.shape[0]
    n = 1 << m
    out = np.empty((rows, n))
    tops = np.empty(n, dtype=np.int64)
    for v in range(1, n):
        top = 0
        while (v >> (top + 1)) != 0:
            top += 1
        tops[v] = top
    for row in range(rows):
        for z in range(n):
            acc = 0.0
            for v in range(1, n):
                zp = z ^ v
                rep = z if z < zp else zp
                top = tops[v]
                idx = ((rep >> (top + 1)) << top) | (rep & ((1 << top) - 1))
                if yhat[row, v - 1, idx]:
                    acc -= L[row, zp]
                else:
                    acc += L[row, zp]
            val = acc / (n - 1)
            if val > clamp:
                val = clamp
            elif val < -clamp:
                val = -clamp
            out[row, z] = val
    return out
