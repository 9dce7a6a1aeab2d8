import numpy as np
import pytest

from ekgseq import (
    EkgGenerator,
    build_view,
    cycle_of,
    cycle_with_autoextend,
    enumerate_cycles,
    verify_prefix_coverage,
)
from ekgseq.permutation import cycle_json


@pytest.fixture(scope="module")
def view30(golden30):
    return build_view(np.asarray(golden30), 30)


def test_build_view_needs_enough_terms(golden30):
    with pytest.raises(ValueError):
        build_view(golden30, 31)


def test_inverse_examples(view30):
    assert view30.inverse_of(5) == 10
    assert view30.inverse_of(7) == 14
    assert view30.inverse_of(1) == 1
    assert view30.inverse_of(17) is None  # never appears in the first 30
    with pytest.raises(ValueError):
        view30.inverse_of(31)
    with pytest.raises(ValueError):
        view30.inverse_of(0)


def test_forward_of(view30, golden30):
    for n in (1, 2, 14, 30):
        assert view30.forward_of(n) == int(golden30[n - 1])
    with pytest.raises(ValueError):
        view30.forward_of(0)
    with pytest.raises(ValueError):
        view30.forward_of(31)


def test_inverse_forward_identity(view_1e6):
    fwd = view_1e6.forward
    inv = view_1e6.inverse
    n = np.arange(1, view_1e6.horizon + 1)
    vals = fwd[1:]
    in_h = vals <= view_1e6.horizon
    assert np.array_equal(inv[vals[in_h]], n[in_h])


def test_cycle_of_fixed_points(view30):
    rec = cycle_of(view30, 1)
    assert rec.status == "closed" and rec.members == (1,) and rec.length == 1
    rec8 = cycle_of(view30, 8)
    assert rec8.status == "closed" and rec8.members == (8,)


def test_cycle_of_6cycle(view30):
    rec = cycle_of(view30, 3)
    assert rec.status == "closed"
    assert rec.members == (3, 4, 6, 9, 10, 5)
    assert rec.length == 6


def test_cycle_of_canonicalizes_start(view30):
    # starting anywhere on the cycle yields the same record
    assert cycle_of(view30, 9) == cycle_of(view30, 3)
    assert cycle_of(view30, 5).members == (3, 4, 6, 9, 10, 5)


def test_cycle_of_out_of_range(view30):
    with pytest.raises(ValueError):
        cycle_of(view30, 31)
    with pytest.raises(ValueError):
        cycle_of(view30, 0)


def test_closed_cycles_reapply(view_1e6):
    for rec in enumerate_cycles(view_1e6, 359):
        if rec.status != "closed":
            continue
        m = rec.members
        for i, v in enumerate(m):
            assert view_1e6.forward_of(v) == m[(i + 1) % len(m)]
        assert rec.representative == min(m)


def test_known_closed_cycles(view_1e6):
    recs = enumerate_cycles(view_1e6, 359)
    closed = [(r.representative, r.length) for r in recs if r.status == "closed"]
    assert closed == [
        (1, 1), (2, 1), (3, 6), (8, 1), (40, 1), (64, 1), (121, 2), (149, 12), (359, 11),
    ]
    by_rep = {r.representative: r for r in recs}
    assert by_rep[121].members == (121, 124)


def test_large_closed_cycles(view_1e6):
    for rep, length, biggest in (
        (2879, 25, 10282),
        (5563, 8, 10736),
        (28571, 22, 55402),
        (251677, 11, 490602),
    ):
        rec = cycle_of(view_1e6, rep)
        assert rec.status == "closed"
        assert rec.length == length
        assert max(rec.members) == biggest
        assert rec.representative == rep


def test_open_cycle_at_7(view_700k):
    rec = cycle_of(view_700k, 7)
    assert rec.status == "open"
    assert rec.representative == 7
    assert rec.escape_value is not None and rec.escape_value > 700_000
    seg = list(rec.members)
    i = seg.index(7)
    assert seg[i - 2 : i + 7] == [13, 14, 7, 12, 18, 20, 11, 15, 21]


def test_open_segment_is_maximal(view_700k):
    rec = cycle_of(view_700k, 7)
    first, last = rec.members[0], rec.members[-1]
    # no known predecessor for the head, successor of the tail escapes
    assert view_700k.inverse_of(first) is None
    assert view_700k.forward_of(last) == rec.escape_value


def test_open_records_carry_horizon(view_700k, view_1e6):
    assert cycle_of(view_700k, 7).horizon == 700_000
    assert cycle_of(view_1e6, 7).horizon == 10**6


def test_enumerate_partition(view_1e6):
    recs = enumerate_cycles(view_1e6, 500)
    seen = {}
    for rec in recs:
        for v in rec.members:
            assert v not in seen, f"{v} in two records"
            seen[v] = rec.representative
    for v in range(1, 501):
        assert v in seen
    reps = [r.representative for r in recs]
    assert reps == sorted(reps)


def test_first_open_cycles_disjoint(view_700k):
    recs = [r for r in enumerate_cycles(view_700k, 620) if r.status == "open"]
    assert len(recs) >= 15
    first15 = recs[:15]
    assert [r.representative for r in first15] == [
        7, 73, 101, 103, 223, 241, 251, 269, 331, 383, 467, 499, 503, 509, 617,
    ]
    all_members: set = set()
    for r in first15:
        s = set(r.members)
        assert not (all_members & s)
        all_members |= s


def test_enumerate_rejects_rep_past_horizon(view30):
    with pytest.raises(ValueError):
        enumerate_cycles(view30, 31)


def test_prefix_coverage(view30):
    assert verify_prefix_coverage(view30, 13) == (True, None)
    assert verify_prefix_coverage(view30, 17) == (False, 17)
    assert verify_prefix_coverage(view30, 0) == (True, None)
    with pytest.raises(ValueError):
        verify_prefix_coverage(view30, 31)


def test_prefix_coverage_large(view_1e6):
    k = view_1e6.horizon // 260
    assert verify_prefix_coverage(view_1e6, k) == (True, None)


def test_autoextend_closes_large_cycle():
    gen = EkgGenerator()
    rec = cycle_with_autoextend(gen, 251677, horizon=300_000)
    assert rec.status == "closed"
    assert rec.length == 11
    assert max(rec.members) == 490602


def test_autoextend_respects_ceiling():
    gen = EkgGenerator()
    rec = cycle_with_autoextend(gen, 7, horizon=1000, ceiling=2000)
    assert rec.status == "open"
    assert rec.horizon <= 2000


def test_cycle_json_shapes(view30, view_700k):
    closed = cycle_json(cycle_of(view30, 3))
    assert list(closed) == ["representative", "status", "length", "members", "horizon"]
    assert closed["members"] == [3, 4, 6, 9, 10, 5]
    opened = cycle_json(cycle_of(view_700k, 7))
    assert list(opened) == ["representative", "status", "segment", "horizon"]
    assert "escape_value" not in opened
