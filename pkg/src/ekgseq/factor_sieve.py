"""Smallest-prime-factor table with quotient and prime-count queries.

The table serves three queries the generator and analysis code lean on:

* ``small[m]``: smallest prime factor of m (so ``small[m] == m`` iff m prime)
* ``quot[m]``: m with every copy of ``small[m]`` divided out, which lets
  ``distinct_primes`` walk the factor list in O(#distinct primes)
* ``prime_count(x)``: pi(x) by binary search over the sorted prime array

Value 1 is deliberately outside the query domain for ``distinct_primes``:
it has no prime factor and no caller needs it factored.
"""

from __future__ import annotations

import numpy as np

from . import _kernels


class FactorTable:
    """Immutable multiplicative-structure tables for all m in [2, limit]."""

    __slots__ = ("limit", "small", "quot", "primes")

    def __init__(self, limit: int, small, quot, primes):
        self.limit = limit
        self.small = small
        self.quot = quot
        self.primes = primes

    def distinct_primes(self, m: int) -> list[int]:
        """Strictly increasing list of the primes dividing m."""
        if m < 2 or m > self.limit:
            raise ValueError(f"m={m} outside table domain [2, {self.limit}]")
        small = self.small
        quot = self.quot
        out = []
        k = int(m)
        while k > 1:
            out.append(int(small[k]))
            k = int(quot[k])
        # small(m) extraction already yields increasing order
        return out

    def prime_count(self, x: int) -> int:
        """pi(x), the number of primes <= x."""
        if x > self.limit:
            raise ValueError(f"x={x} exceeds table limit {self.limit}")
        if x < 2:
            return 0
        return int(np.searchsorted(self.primes, x, side="right"))

    def is_prime(self, m: int) -> bool:
        if m < 2 or m > self.limit:
            raise ValueError(f"m={m} outside table domain [2, {self.limit}]")
        return int(self.small[m]) == m

    def extend(self, new_limit: int) -> "FactorTable":
        """Table covering [2, new_limit]; returns self unchanged if not larger.

        Rebuilds from scratch. The sieve is cheap relative to generation and
        a rebuild keeps the arrays contiguous; determinism makes the result
        indistinguishable from an incremental extension.
        """
        if new_limit <= self.limit:
            return self
        return build_spf(new_limit)


def build_spf(limit: int) -> FactorTable:
    """Sieve smallest prime factors and quotients for [2, limit]."""
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    # int32 tables: the design caps value growth long before 2**31
    if limit >= 2**31:
        raise ValueError(f"limit {limit} too large for int32 tables")
    small = _kernels.spf_sieve(limit)
    quot = _kernels.quot_sieve(small)
    primes = _kernels.primes_from_spf(small)
    small.flags.writeable = False
    quot.flags.writeable = False
    primes.flags.writeable = False
    return FactorTable(limit, small, quot, primes)
