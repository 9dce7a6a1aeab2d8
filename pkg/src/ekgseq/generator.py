"""Greedy gcd-threshold sequence generation.

The canonical sequence starts 1, 2 and each later term is the smallest
natural number not yet used that shares a factor with its predecessor. The
generalized rule takes a threshold M and a seed prefix containing 1..M, and
requires gcd(previous, next) >= M past the prefix.

The engine keeps, per divisor d, the smallest unused multiple of d ("the
gap value" B_d). A step takes the minimum of B_d over the divisors d >= M
of the previous term; for M = 2 the distinct primes suffice. Gap values
only ever move forward, so they are advanced lazily past used values.

Two interchangeable paths produce terms:

* a compiled kernel for threshold 2 (no trace), using dense arrays
* a plain-Python path for general thresholds and for per-term trace of
  which divisors attained the minimum

Tables grow by doubling whenever a candidate runs past them. Values are
bounded to 63 bits; generation refuses to proceed beyond that.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from typing import BinaryIO, NamedTuple

import numpy as np

from . import _kernels
from .factor_sieve import FactorTable, build_spf

VALUE_LIMIT = 1 << 63
_SIEVE_LIMIT = 1 << 31  # int32 factor tables
_MIN_CAPACITY = 1 << 10


@dataclass(frozen=True)
class Rule:
    """Generation rule: gcd threshold plus seed prefix.

    prefix=None means 1..threshold in order; the canonical sequence is
    Rule() == Rule(2, (1, 2)).
    """

    threshold: int = 2
    prefix: tuple = None

    def __post_init__(self):
        if self.threshold < 2:
            raise ValueError(f"threshold must be >= 2, got {self.threshold}")
        if self.prefix is None:
            object.__setattr__(self, "prefix", tuple(range(1, self.threshold + 1)))
        else:
            object.__setattr__(self, "prefix", tuple(int(v) for v in self.prefix))
        if len(set(self.prefix)) != len(self.prefix):
            raise ValueError("prefix values must be pairwise distinct")
        if any(v < 1 for v in self.prefix):
            raise ValueError("prefix values must be >= 1")
        missing = set(range(1, self.threshold + 1)) - set(self.prefix)
        if missing:
            raise ValueError(f"prefix must contain 1..{self.threshold}; missing {sorted(missing)}")

    @property
    def canonical(self) -> bool:
        return self.threshold == 2 and self.prefix == (1, 2)


class Term(NamedTuple):
    index: int  # 1-based
    value: int


class EkgGenerator:
    """Incremental generator for one Rule.

    Single-owner, stateful. Returned buffers are read-only views of the
    internal term array; they stay valid (over a snapshot) across growth.
    """

    def __init__(self, rule: Rule = None, capacity_hint: int = 0, trace: bool = False):
        self.rule = rule if rule is not None else Rule()
        self.trace = bool(trace)
        # compiled path handles threshold 2 only and records no trace
        self._fast = self.rule.threshold == 2 and not self.trace

        prefix = np.asarray(self.rule.prefix, dtype=np.int64)
        cap = max(int(capacity_hint), 2 * int(prefix.max()), _MIN_CAPACITY)
        self._cap = cap
        self._factors = build_spf(cap)
        self._hit = np.zeros(cap + 1, dtype=np.uint8)
        self._hit[prefix] = 1
        if self._fast:
            self._gap = np.arange(cap + 1, dtype=np.int64)
        else:
            self._gap_dict: dict[int, int] = {}

        self._terms = np.empty(max(len(prefix), 64), dtype=np.int64)
        self._terms[: len(prefix)] = prefix
        self._n = len(prefix)
        self._last = int(prefix[-1])
        self._ctrl: list[tuple] = [() for _ in prefix]

    # -- introspection ----------------------------------------------------

    @property
    def count(self) -> int:
        return self._n

    @property
    def last(self) -> int:
        return self._last

    @property
    def factors(self) -> FactorTable:
        return self._factors

    def _view(self, n: int):
        v = self._terms[:n].view()
        v.flags.writeable = False
        return v

    # -- capacity management ----------------------------------------------

    def _ensure_terms(self, n: int):
        if n <= self._terms.shape[0]:
            return
        new = np.empty(max(n, 2 * self._terms.shape[0]), dtype=np.int64)
        new[: self._n] = self._terms[: self._n]
        self._terms = new

    def _ensure_value_cap(self, target: int):
        if target <= self._cap:
            return
        if target >= VALUE_LIMIT:
            raise RuntimeError(f"value table capacity {target} exceeds 63-bit value bound")
        if target >= _SIEVE_LIMIT:
            raise RuntimeError(f"value table capacity {target} exceeds factor sieve bound")
        old_cap = self._cap
        self._factors = self._factors.extend(target)
        hit = np.zeros(target + 1, dtype=np.uint8)
        hit[: old_cap + 1] = self._hit
        self._hit = hit
        if self._fast:
            self._gap = np.concatenate(
                [self._gap, np.arange(old_cap + 1, target + 1, dtype=np.int64)]
            )
        self._cap = target

    def _grow(self):
        self._ensure_value_cap(2 * self._cap)

    # -- bounds audit (canonical rule only) -------------------------------

    def _check_bounds(self, lo: int, hi: int):
        # proved linear bounds n/260 <= a(n) <= 14n; a violation can only
        # mean a generation bug, so abort loudly
        if not self.rule.canonical or hi <= lo:
            return
        vals = self._terms[lo:hi]
        idx = np.arange(lo + 1, hi + 1, dtype=np.int64)
        bad = np.nonzero((vals > 14 * idx) | (260 * vals < idx))[0]
        if bad.size:
            k = int(bad[0])
            raise RuntimeError(
                f"generated term a({idx[k]}) = {vals[k]} outside proved bounds "
                f"[ceil(n/260), 14n]"
            )

    # -- fast path --------------------------------------------------------

    def _run_fast(self, n_want: int, stop_value: int) -> int:
        while True:
            if self._last == 1:
                raise RuntimeError("predecessor 1 has no divisor >= 2; rule cannot continue")
            lo = self._n
            n, last, reason = _kernels.generate_gcd2(
                self._factors.small,
                self._factors.quot,
                self._hit,
                self._gap,
                self._terms,
                self._n,
                min(n_want, self._terms.shape[0]),
                self._last,
                stop_value,
            )
            self._n = int(n)
            self._last = int(last)
            self._check_bounds(lo, self._n)
            if reason == _kernels.NEED_GROWTH:
                self._grow()
                continue
            return reason

    # -- general path -----------------------------------------------------

    def _divisors_at_least(self, m: int, lo: int) -> list[int]:
        small = self._factors.small
        pairs = []
        k = m
        while k > 1:
            p = int(small[k])
            e = 0
            while k % p == 0:
                k //= p
                e += 1
            pairs.append((p, e))
        divs = [1]
        for p, e in pairs:
            divs = [d * p**i for d in divs for i in range(e + 1)]
        return sorted(d for d in divs if d >= lo)

    def _gap_advance(self, d: int) -> int:
        g = self._gap_dict.get(d, d)
        hit = self._hit
        cap = self._cap
        while g <= cap and hit[g]:
            g += d
        self._gap_dict[d] = g
        return g

    def _step_python(self):
        last = self._last
        m = self.rule.threshold
        if m == 2:
            divs = self._factors.distinct_primes(last) if last > 1 else []
        else:
            divs = self._divisors_at_least(last, m)
        if not divs:
            raise RuntimeError(
                f"predecessor {last} has no divisor >= {m}; rule cannot continue"
            )
        while True:
            cands = [(self._gap_advance(d), d) for d in divs]
            b = min(c for c, _ in cands)
            if b <= self._cap:
                break
            self._grow()
        n = self._n
        self._ensure_terms(n + 1)
        self._terms[n] = b
        self._hit[b] = 1
        self._n = n + 1
        self._last = b
        if self.trace:
            self._ctrl.append(tuple(sorted(d for c, d in cands if c == b)))
        self._check_bounds(n, n + 1)

    # -- public generation ------------------------------------------------

    def generate_count(self, n: int):
        """First n terms as a read-only value array (1-based index i at [i-1]).

        Asking for fewer terms than already exist just returns the
        existing front of the buffer.
        """
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        if n <= self._n:
            return self._view(n)
        self._ensure_terms(n)
        self._ensure_value_cap(2 * n)
        if self._fast:
            self._run_fast(n, 0)
        else:
            while self._n < n:
                self._step_python()
        return self._view(n)

    def generate_until_value(self, bound: int):
        """Terms up to and including the first one >= bound."""
        if bound < max(self.rule.prefix):
            raise ValueError(f"bound {bound} below largest prefix value")
        reached = np.nonzero(self._terms[: self._n] >= bound)[0]
        if reached.size:
            return self._view(int(reached[0]) + 1)
        self._ensure_value_cap(2 * bound)
        if self._fast:
            while True:
                self._ensure_terms(self._n + 1)
                reason = self._run_fast(self._terms.shape[0], bound)
                if reason == _kernels.VALUE_REACHED:
                    return self._view(self._n)
        while self._last < bound:
            self._step_python()
        return self._view(self._n)

    def next_term(self) -> Term:
        self.generate_count(self._n + 1)
        return Term(self._n, int(self._terms[self._n - 1]))

    # -- queries ----------------------------------------------------------

    def b_value(self, d: int) -> int:
        """Gap value B_d at the current count n: the smallest multiple of d
        not among the first n-1 terms.

        That is the candidate pool of the step that chose the newest term,
        so right after a step b_value(d) for a controlling divisor d equals
        the term itself. Observationally pure (lazy cache advance only) and
        nondecreasing between calls for a fixed d.
        """
        if d < 2:
            raise ValueError(f"d must be >= 2, got {d}")
        if d > self._cap:
            # every used value is <= cap, so d itself is free
            return d
        if self._fast:
            g = int(self._gap[d])
            hit = self._hit
            cap = self._cap
            while g <= cap and hit[g]:
                g += d
            self._gap[d] = g
        else:
            g = self._gap_advance(d)
        # the newest term is hit but was still free when it was chosen
        if self._last % d == 0 and self._last < g:
            return self._last
        return g

    def controlling_divisors(self, n: int) -> list[int]:
        """Divisors of a(n-1) that attained the minimum when a(n) was chosen.

        Requires trace=True at construction. Prefix positions have no
        greedy step and yield [].
        """
        if not self.trace:
            raise RuntimeError("controlling_divisors requires trace=True at construction")
        if n < 1 or n > self._n:
            raise ValueError(f"n={n} outside generated range [1, {self._n}]")
        return list(self._ctrl[n - 1])


def naive_generate(rule: Rule, n: int):
    """Reference generator: literal smallest-unused scan per step.

    Quadratic-ish and intended for n <= 1e5; exists to cross-validate the
    table-driven engine, so it shares no code with it.
    """
    prefix = np.asarray(rule.prefix, dtype=np.int64)
    if n <= len(prefix):
        return prefix[:n].copy()
    out = np.empty(n, dtype=np.int64)
    out[: len(prefix)] = prefix
    pool_hi = max(64, 2 * int(prefix.max()))
    used = set(int(v) for v in prefix)
    unused = np.array(
        [v for v in range(1, pool_hi + 1) if v not in used], dtype=np.int64
    )
    last = int(prefix[-1])
    m = rule.threshold
    for i in range(len(prefix), n):
        while True:
            found = -1
            for j0 in range(0, len(unused), 2048):
                chunk = unused[j0 : j0 + 2048]
                ok = np.gcd(chunk, last) >= m
                if ok.any():
                    found = j0 + int(np.argmax(ok))
                    break
            if found >= 0:
                break
            # pool exhausted: all used values sit below pool_hi, so the
            # extension needs no filtering
            unused = np.concatenate(
                [unused, np.arange(pool_hi + 1, 2 * pool_hi + 1, dtype=np.int64)]
            )
            pool_hi *= 2
        v = int(unused[found])
        unused = np.delete(unused, found)
        out[i] = v
        last = v
    return out


# -- binary dump ("EKG1") -------------------------------------------------

_MAGIC = b"EKG1"
_VERSION = 1


def write_dump(dst, rule: Rule, values) -> None:
    """Serialize rule + terms a(1..C).

    Layout: magic "EKG1"; version byte; threshold byte; uint16 LE prefix
    length; prefix as uint64 LE; uint64 LE term count; terms as uint64 LE.
    dst is a binary file object or a path.
    """
    if isinstance(dst, (str, os.PathLike)):
        with open(dst, "wb") as f:
            write_dump(f, rule, values)
        return
    if rule.threshold > 0xFF:
        raise ValueError(f"threshold {rule.threshold} does not fit the format's 1 byte")
    if len(rule.prefix) > 0xFFFF:
        raise ValueError("prefix too long for format")
    values = np.asarray(values, dtype=np.int64)
    if values.size and int(values.max()) >= VALUE_LIMIT:
        raise ValueError("values exceed 63-bit bound")
    k = min(len(rule.prefix), values.size)
    if not np.array_equal(values[:k], np.asarray(rule.prefix[:k], dtype=np.int64)):
        raise ValueError("values do not start with the rule prefix")
    dst.write(struct.pack("<4sBBH", _MAGIC, _VERSION, rule.threshold, len(rule.prefix)))
    dst.write(np.asarray(rule.prefix, dtype="<u8").tobytes())
    dst.write(struct.pack("<Q", values.size))
    dst.write(values.astype("<u8").tobytes())


def read_dump(src) -> tuple[Rule, np.ndarray]:
    """Parse an EKG1 dump back into (Rule, value array)."""
    if isinstance(src, (str, os.PathLike)):
        with open(src, "rb") as f:
            return read_dump(f)
    head = src.read(8)
    if len(head) < 8:
        raise ValueError("truncated dump header")
    magic, version, threshold, plen = struct.unpack("<4sBBH", head)
    if magic != _MAGIC:
        raise ValueError(f"bad magic {magic!r}; not an EKG1 dump")
    if version != _VERSION:
        raise ValueError(f"unsupported dump version {version}")
    raw = src.read(8 * plen + 8)
    if len(raw) < 8 * plen + 8:
        raise ValueError("truncated dump prefix")
    prefix = np.frombuffer(raw[: 8 * plen], dtype="<u8")
    (count,) = struct.unpack("<Q", raw[8 * plen :])
    body = src.read(8 * count)
    if len(body) < 8 * count:
        raise ValueError("truncated dump body")
    values = np.frombuffer(body, dtype="<u8")
    if values.size and int(values.max()) >= VALUE_LIMIT:
        raise ValueError("dump contains values beyond the 63-bit bound")
    rule = Rule(threshold, tuple(int(v) for v in prefix))
    return rule, values.astype(np.int64)
