"""Numba-compiled inner loops.

Everything here operates on plain numpy arrays so the jitted functions stay
cacheable and the surrounding classes keep all the bookkeeping. The
generation kernel only handles the gcd >= 2 rule (divisor enumeration then
reduces to the distinct primes of the previous term); the general-threshold
path lives in pure Python in ``generator``.
"""

import numpy as np
from numba import njit

# kernel exit reasons
OK = 0
NEED_GROWTH = 1
VALUE_REACHED = 2


@njit(cache=True)
def spf_sieve(limit):
    """Smallest prime factor of every m in [2, limit]; small[m] == m iff m prime."""
    small = np.zeros(limit + 1, dtype=np.int32)
    for m in range(2, limit + 1, 2):
        small[m] = 2
    p = 3
    while p * p <= limit:
        if small[p] == 0:
            # even multiples already carry factor 2, step by 2p
            for m in range(p * p, limit + 1, 2 * p):
                if small[m] == 0:
                    small[m] = p
        p += 2
    for m in range(3, limit + 1, 2):
        if small[m] == 0:
            small[m] = m
    return small


@njit(cache=True)
def quot_sieve(small):
    """quot[m] = m with every copy of its smallest prime factor divided out."""
    limit = small.shape[0] - 1
    quot = np.zeros(limit + 1, dtype=np.int32)
    if limit >= 1:
        quot[1] = 1
    for m in range(2, limit + 1):
        p = small[m]
        r = m // p
        # r < m, so quot[r] is already final
        if r >= 2 and small[r] == p:
            quot[m] = quot[r]
        else:
            quot[m] = r
    return quot


@njit(cache=True)
def primes_from_spf(small):
    """Sorted array of all primes in the table."""
    limit = small.shape[0] - 1
    count = 0
    for m in range(2, limit + 1):
        if small[m] == m:
            count += 1
    out = np.empty(count, dtype=np.int64)
    i = 0
    for m in range(2, limit + 1):
        if small[m] == m:
            out[i] = m
            i += 1
    return out


@njit(cache=True)
def generate_gcd2(small, quot, hit, gap, terms, n_have, n_want, last, stop_value):
    """Greedy steps for the gcd >= 2 rule.

    Each new term is the minimum, over the distinct primes p of the previous
    term, of the smallest unused multiple of p. ``gap[p]`` caches that
    multiple and is advanced lazily past used values; entries may be stale
    (pointing at a used value) between calls, never too far ahead.

    Appends into ``terms[n_have:n_want]`` and returns ``(n, last, reason)``
    where reason is OK, NEED_GROWTH (a candidate ran past the table; caller
    grows hit/gap/sieve and re-enters) or VALUE_REACHED (term >= stop_value
    emitted; 0 disables that check).
    """
    limit = hit.shape[0] - 1
    n = n_have
    while n < n_want:
        k = last
        b = np.int64(1) << 62
        while k > 1:
            p = small[k]
            g = gap[p]
            while g <= limit and hit[g] == 1:
                g += p
            gap[p] = g
            if g < b:
                b = g
            k = quot[k]
        if b > limit:
            return n, last, NEED_GROWTH
        terms[n] = b
        hit[b] = 1
        last = b
        n += 1
        if stop_value > 0 and b >= stop_value:
            return n, last, VALUE_REACHED
    return n, last, OK
