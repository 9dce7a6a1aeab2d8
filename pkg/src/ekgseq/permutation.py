"""Cycle structure of the sequence viewed as a permutation of the naturals.

A horizon-H view freezes the first H terms. Following v -> a(v) either
returns to the start (a closed cycle, fully inside the horizon) or runs
past the horizon (an open cycle: only a finite segment is known). "Open"
is always relative to the horizon used and never a claim about the full
permutation; records therefore carry their horizon.

Open segments are extended backwards as well, via the inverse map, until
the predecessor falls outside the horizon, so the known segment is the
maximal two-sided path through the start value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PermutationView:
    """Immutable first-H-terms snapshot with O(1) forward/inverse lookups."""

    __slots__ = ("horizon", "forward", "inverse")

    def __init__(self, horizon: int, forward, inverse):
        self.horizon = horizon
        self.forward = forward  # forward[n] = a(n), 1-based; [0] unused
        self.inverse = inverse  # inverse[v] = n with a(n) = v, 0 if absent

    def forward_of(self, n: int) -> int:
        if n < 1 or n > self.horizon:
            raise ValueError(f"index {n} outside horizon {self.horizon}")
        return int(self.forward[n])

    def inverse_of(self, v: int):
        """Index at which value v appears, or None if not within horizon."""
        if v < 1 or v > self.horizon:
            raise ValueError(f"value {v} outside horizon {self.horizon}")
        n = int(self.inverse[v])
        return n if n else None


def build_view(terms, horizon: int) -> PermutationView:
    terms = np.asarray(terms)
    if terms.shape[0] < horizon:
        raise ValueError(f"need {horizon} terms, have {terms.shape[0]}")
    forward = np.zeros(horizon + 1, dtype=np.int64)
    forward[1:] = terms[:horizon]
    inverse = np.zeros(horizon + 1, dtype=np.int64)
    vals = forward[1:]
    in_range = vals <= horizon
    inverse[vals[in_range]] = np.nonzero(in_range)[0] + 1
    forward.flags.writeable = False
    inverse.flags.writeable = False
    return PermutationView(horizon, forward, inverse)


@dataclass(frozen=True)
class CycleRecord:
    """One cycle (closed) or one maximal known segment of a cycle (open).

    members: closed -> the full cycle starting at the representative in
    application order; open -> the known segment in application order.
    escape_value: open only -- the first value past the horizon reached
    going forward.
    """

    representative: int
    status: str  # "closed" | "open"
    members: tuple
    horizon: int
    escape_value: int | None = None

    @property
    def length(self) -> int:
        return len(self.members)


def cycle_of(view: PermutationView, start: int) -> CycleRecord:
    """Cycle through `start` under v -> a(v), classified within the horizon."""
    h = view.horizon
    if start < 1 or start > h:
        raise ValueError(f"start {start} outside horizon {h}")
    forward = view.forward
    inverse = view.inverse
    seq = [start]
    v = int(forward[start])
    escape = None
    for _ in range(h + 2):
        if v == start:
            break
        if v > h:
            escape = v
            break
        seq.append(v)
        v = int(forward[v])
    else:
        raise RuntimeError("cycle walk did not terminate; terms are not distinct")

    if escape is None:
        members = tuple(seq)
        rep = min(members)
        at = members.index(rep)
        members = members[at:] + members[:at]
        return CycleRecord(rep, "closed", members, h)

    # walk predecessors until the incoming index is unknown within horizon
    back = []
    u = int(inverse[start])
    for _ in range(h + 2):
        if u == 0:
            break
        back.append(u)
        u = int(inverse[u])
    else:
        raise RuntimeError("cycle walk did not terminate; terms are not distinct")
    members = tuple(reversed(back)) + tuple(seq)
    return CycleRecord(min(members), "open", members, h, escape)


def enumerate_cycles(view: PermutationView, max_representative: int) -> list[CycleRecord]:
    """All distinct cycles with minimal element <= max_representative.

    Sorted by representative. Scanning candidates in increasing order with
    a visited mask makes each record's start its own representative, since
    any smaller member would have claimed the cycle first.
    """
    h = view.horizon
    if max_representative > h:
        raise ValueError(f"max_representative {max_representative} outside horizon {h}")
    visited = np.zeros(h + 1, dtype=bool)
    out = []
    for v in range(1, max_representative + 1):
        if visited[v]:
            continue
        rec = cycle_of(view, v)
        assert rec.representative == v
        for m in rec.members:
            visited[m] = True
        out.append(rec)
    return out


def verify_prefix_coverage(view: PermutationView, k: int):
    """(True, None) if every value 1..k appears within the horizon,
    else (False, smallest missing value)."""
    if k < 0 or k > view.horizon:
        raise ValueError(f"k={k} outside [0, {view.horizon}]")
    if k == 0:
        return True, None
    missing = np.nonzero(view.inverse[1 : k + 1] == 0)[0]
    if missing.size:
        return False, int(missing[0]) + 1
    return True, None


def cycle_with_autoextend(gen, start: int, horizon: int = 10**6,
                          ceiling: int = 8 * 10**6) -> CycleRecord:
    """cycle_of with horizon growth: while the cycle stays open, raise the
    horizon to 1.5x the largest value met, up to `ceiling`.

    `gen` is an EkgGenerator for the rule under study; terms already
    generated are reused.
    """
    h = horizon
    while True:
        terms = gen.generate_count(h)
        rec = cycle_of(build_view(terms, h), start)
        if rec.status == "closed":
            return rec
        largest = max(max(rec.members), rec.escape_value or 0)
        new_h = min(int(1.5 * largest), ceiling)
        if new_h <= h:
            return rec
        h = new_h


def cycle_json(rec: CycleRecord) -> dict:
    """JSON-ready dict, field order fixed for byte-stable reports."""
    if rec.status == "closed":
        return {
            "representative": rec.representative,
            "status": "closed",
            "length": rec.length,
            "members": list(rec.members),
            "horizon": rec.horizon,
        }
    return {
        "representative": rec.representative,
        "status": "open",
        "segment": list(rec.members),
        "horizon": rec.horizon,
    }
