"""Statistical and structural diagnostics over generated term buffers.

Everything here is a pure function of its inputs: term buffers plus a
FactorTable. The checkers return violation lists (empty = property holds
on the supplied range) rather than raising, so callers can emit reports
and choose their own exit status.

Classification splits values into three streams: primes, three times a
prime, and everything else. Plotted against n these streams hug the lines
n/2, 3n/2 and n; the smoothing transform maps the first two onto the
third. All logarithms are natural.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .factor_sieve import FactorTable

# closed-form reference constant for the c diagnostic: 4/9 + ln(3)/3 - ln(2)
C_PRIME = 4.0 / 9.0 + math.log(3.0) / 3.0 - math.log(2.0)

_CLASS_NAMES = ("other", "prime", "three_prime")
_LINE_FACTOR = {"other": 1.0, "prime": 0.5, "three_prime": 1.5}


class TermClass(NamedTuple):
    tag: str  # "prime" | "three_prime" | "other"
    p: int | None


class FitSample(NamedTuple):
    n: int
    a: int
    c: float


def classify_term(ft: FactorTable, m: int) -> TermClass:
    """Class of a single value; a prime wins over the 3p form (value 3)."""
    if m < 1 or m > ft.limit:
        raise ValueError(f"m={m} outside table domain [1, {ft.limit}]")
    if m == 1:
        return TermClass("other", None)
    if ft.is_prime(m):
        return TermClass("prime", m)
    if m % 3 == 0:
        q = m // 3
        if q >= 2 and ft.is_prime(q):
            return TermClass("three_prime", q)
    return TermClass("other", None)


def classify_codes(ft: FactorTable, values) -> np.ndarray:
    """Vector version: int8 codes 0=other, 1=prime, 2=three_prime."""
    v = np.asarray(values)
    if v.size == 0:
        return np.zeros(0, dtype=np.int8)
    if int(v.min()) < 1 or int(v.max()) > ft.limit:
        raise ValueError(f"values outside table domain [1, {ft.limit}]")
    small = ft.small
    codes = np.zeros(v.shape, dtype=np.int8)
    ge2 = v >= 2
    is_p = np.zeros(v.shape, dtype=bool)
    is_p[ge2] = small[v[ge2]] == v[ge2]
    codes[is_p] = 1
    # 3p with p prime >= 2 forces v >= 6; v=3 was already caught as prime
    cand = (~is_p) & (v >= 6) & (v % 3 == 0)
    q = v[cand] // 3
    ok = small[q] == q
    codes[np.nonzero(cand)[0][ok]] = 2
    return codes


def class_name(code: int) -> str:
    return _CLASS_NAMES[code]


def smooth(terms, ft: FactorTable) -> np.ndarray:
    """Map p -> 2p and 3p -> 2p for primes p > 2; other values unchanged.

    Output is a diagnostic stream, not a permutation: 2p appears for p,
    3p and 2p itself.
    """
    v = np.asarray(terms, dtype=np.int64)
    codes = classify_codes(ft, v)
    out = v.copy()
    pm = (codes == 1) & (v > 2)
    out[pm] = 2 * v[pm]
    # v == 6 is 3*2 and stays (the rule needs p > 2)
    tm = (codes == 2) & (v > 6)
    out[tm] = 2 * (v[tm] // 3)
    return out


# -- pattern and audit checkers ------------------------------------------


def check_prime_spike_pattern(terms, ft: FactorTable) -> list[dict]:
    """Every prime term p > 2 should sit in a 2p, p, 3p spike.

    The successor check is skipped when the prime is the final term.
    Returns one violation dict per failed side.
    """
    v = np.asarray(terms)
    codes = classify_codes(ft, v)
    pos = np.nonzero((codes == 1) & (v > 2))[0]
    p = v[pos]
    pred_ok = np.zeros(pos.size, dtype=bool)
    has_pred = pos >= 1
    pred_ok[has_pred] = v[pos[has_pred] - 1] == 2 * p[has_pred]
    succ_ok = np.ones(pos.size, dtype=bool)
    has_succ = pos + 1 < v.size
    succ_ok[has_succ] = v[pos[has_succ] + 1] == 3 * p[has_succ]
    out = []
    for j in np.nonzero(~(pred_ok & succ_ok))[0]:
        i = int(pos[j])
        pp = int(p[j])
        if not pred_ok[j]:
            out.append({
                "index": i + 1,
                "prime": pp,
                "side": "predecessor",
                "expected": 2 * pp,
                "actual": int(v[i - 1]) if i >= 1 else None,
            })
        if not succ_ok[j]:
            out.append({
                "index": i + 1,
                "prime": pp,
                "side": "successor",
                "expected": 3 * pp,
                "actual": int(v[i + 1]),
            })
    return out


def _first_division_indices(terms, ft: FactorTable) -> dict[int, int]:
    """prime -> 1-based index of the first term it divides."""
    small = ft.small
    quot = ft.quot
    first: dict[int, int] = {}
    for i, val in enumerate(np.asarray(terms)):
        k = int(val)
        while k > 1:
            pf = int(small[k])
            if pf not in first:
                first[pf] = i + 1
            k = int(quot[k])
    return first


def check_new_prime_entry(terms, ft: FactorTable) -> list[dict]:
    """Audit how each odd prime p first enters the sequence.

    At the entry index n (first term p divides): a(n) = q*p with q the
    smallest prime of a(n-1) and q < p; a(n+1) = p; and 2p is a(n) or
    a(n+2). Also: entry order and prime-term values are both increasing.
    Checks whose witness index falls past the buffer are skipped.
    """
    v = np.asarray(terms)
    small = ft.small
    first = _first_division_indices(v, ft)
    out = []
    for p, n in sorted(first.items()):
        if p == 2 or n <= 1:
            continue
        i = n - 1
        a = int(v[i])
        q = int(small[int(v[i - 1])])
        if a != q * p or not q < p:
            out.append({
                "prime": p,
                "index": n,
                "detail": f"entry term {a} is not q*p for q={q} (smallest prime of predecessor)",
            })
        if i + 1 < v.size and int(v[i + 1]) != p:
            out.append({
                "prime": p,
                "index": n,
                "detail": f"a({n + 1}) = {int(v[i + 1])}, expected the prime itself",
            })
        if a != 2 * p and i + 2 < v.size and int(v[i + 2]) != 2 * p:
            out.append({
                "prime": p,
                "index": n,
                "detail": f"2p = {2 * p} is neither a({n}) nor a({n + 2})",
            })
    by_entry = [p for p, _ in sorted(first.items(), key=lambda kv: kv[1])]
    for before, after in zip(by_entry, by_entry[1:]):
        if before > after:
            out.append({
                "prime": after,
                "index": first[after],
                "detail": f"first division by {after} comes after {before}",
            })
    prime_terms = v[classify_codes(ft, v) == 1]
    bad = np.nonzero(np.diff(prime_terms) <= 0)[0]
    for j in bad:
        out.append({
            "prime": int(prime_terms[j + 1]),
            "index": None,
            "detail": "prime-valued terms are not strictly increasing here",
        })
    return out


def check_quotient_precedence(terms, ft: FactorTable, sample: list[int]) -> list[dict]:
    """For sampled n and every prime p | a(n): the cofactor a(n)/p must
    already be a term by index n+1. Pairs whose witness window extends
    past the buffer are skipped as unverifiable."""
    v = np.asarray(terms)
    occ: dict[int, int] = {}
    for i, val in enumerate(v):
        occ.setdefault(int(val), i + 1)
    out = []
    for n in sample:
        if n < 1 or n > v.size:
            raise ValueError(f"sampled index {n} outside buffer [1, {v.size}]")
        a = int(v[n - 1])
        for p in ft.distinct_primes(a) if a > 1 else []:
            k = a // p
            j = occ.get(k)
            if j is not None and j <= n + 1:
                continue
            if n + 1 > v.size:
                continue
            out.append({
                "index": n,
                "value": a,
                "prime": p,
                "cofactor": k,
                "first_seen": j,
            })
    return out


def check_prime_term_coverage(terms, ft: FactorTable) -> list[dict]:
    """When a prime appears as a term a(n) = p, every value below p must
    already have appeared among a(1..n-1)."""
    v = np.asarray(terms)
    codes = classify_codes(ft, v)
    top = int(v.max()) if v.size else 0
    absent = v.size + 1
    occ = np.full(top + 2, absent, dtype=np.int64)
    # reversed write order keeps the first occurrence if values repeat
    occ[v[::-1]] = np.arange(v.size, 0, -1, dtype=np.int64)
    occ[0] = 0
    # latest[p] = largest first-occurrence index among values 1..p-1
    latest = np.maximum.accumulate(occ[: top + 1])
    out = []
    for i in np.nonzero(codes == 1)[0]:
        p = int(v[i])
        n = i + 1
        if latest[p - 1] >= n:
            below = occ[1:p]
            missing = int(np.nonzero(below >= n)[0][0]) + 1
            out.append({"index": n, "prime": p, "missing": missing})
    return out


def check_prime_factor_bound(terms, ft: FactorTable) -> list[dict]:
    """Every prime p dividing a(n) satisfies p <= n, strictly unless p=2."""
    small = ft.small
    quot = ft.quot
    out = []
    for i, val in enumerate(np.asarray(terms)):
        n = i + 1
        k = int(val)
        while k > 1:
            p = int(small[k])
            if p > n or (p == n and p != 2):
                out.append({"index": n, "value": int(val), "prime": p})
            k = int(quot[k])
    return out


# -- asymptotic diagnostics ----------------------------------------------


def predicted_index(ft: FactorTable, m: int) -> int:
    """Heuristic index at which value m appears:
    m - pi(m) - pi(m/3) + 2*pi(m/2), with floors before the prime counts."""
    if m < 1 or m > ft.limit:
        raise ValueError(f"m={m} outside table domain [1, {ft.limit}]")
    pc = ft.prime_count
    return m - pc(m) - pc(m // 3) + 2 * pc(m // 2)


def nearest_other_index(terms, ft: FactorTable, target: int) -> int:
    """Smallest index >= target whose term is classified other."""
    v = np.asarray(terms)
    if target < 1 or target > v.size:
        raise ValueError(f"target {target} outside buffer [1, {v.size}]")
    codes = classify_codes(ft, v[target - 1 :])
    at = np.nonzero(codes == 0)[0]
    if not at.size:
        raise ValueError(f"no other-class term at or after index {target}")
    return target + int(at[0])


def index_prediction_errors(terms, ft: FactorTable, targets: list[int]) -> list[dict]:
    """Relative error of predicted_index at the other-class term nearest
    at-or-after each target index."""
    v = np.asarray(terms)
    out = []
    for t in targets:
        n = nearest_other_index(v, ft, t)
        a = int(v[n - 1])
        pred = predicted_index(ft, a)
        out.append({
            "target": t,
            "n": n,
            "value": a,
            "predicted": pred,
            "rel_error": abs(pred - n) / n,
        })
    return out


def fit_c(terms, indices) -> list[FitSample]:
    """c(n) = ((a/n - 1) - 1/(3 ln n)) * (ln n)^2 at the given indices."""
    v = np.asarray(terms)
    out = []
    for n in indices:
        if n < 3:
            raise ValueError(f"fit index must be >= 3, got {n}")
        if n > v.size:
            raise ValueError(f"fit index {n} outside buffer [1, {v.size}]")
        a = int(v[n - 1])
        ln = math.log(n)
        out.append(FitSample(n, a, ((a / n - 1.0) - 1.0 / (3.0 * ln)) * ln * ln))
    return out


def histogram_c(cs) -> dict:
    """Fixed-shape histogram: 200 bins of width 0.01 on [-1, 1] plus
    underflow/overflow counts."""
    cs = np.asarray(cs, dtype=np.float64)
    edges = np.linspace(-1.0, 1.0, 201)
    counts, _ = np.histogram(cs, bins=edges)
    return {
        "lo": -1.0,
        "hi": 1.0,
        "bin_width": 0.01,
        "counts": [int(c) for c in counts],
        "underflow": int(np.count_nonzero(cs < -1.0)),
        "overflow": int(np.count_nonzero(cs > 1.0)),
    }


def fit_report(terms, ft: FactorTable, lo: int, hi: int, stride: int = 1000,
               only_class: str = "other") -> dict:
    """Samples, histogram and median of c over [lo, hi] with the given
    stride, restricted to one class ("all" disables the filter)."""
    v = np.asarray(terms)
    lo = max(lo, 3)
    idx = list(range(lo, min(hi, v.size) + 1, max(stride, 1)))
    if only_class != "all":
        codes = classify_codes(ft, v[np.asarray(idx, dtype=np.int64) - 1])
        want = _CLASS_NAMES.index(only_class)
        idx = [n for n, c in zip(idx, codes) if c == want]
    samples = fit_c(v, idx)
    cs = [s.c for s in samples]
    return {
        "log_base": "natural",
        "range": [lo, hi],
        "stride": stride,
        "class": only_class,
        "samples": [{"n": s.n, "a": s.a, "c": s.c} for s in samples],
        "histogram": histogram_c(cs),
        "median": float(np.median(cs)) if cs else None,
        "c_prime_ref": C_PRIME,
    }


def _exact_extreme(v: np.ndarray, n: np.ndarray, kind: str):
    # float pass for a candidate, then exact integer cross-multiplication
    r = v / n
    i = int(np.argmin(r) if kind == "min" else np.argmax(r))
    while True:
        num, den = int(v[i]), i + 1
        if kind == "min":
            better = np.nonzero(v * den < num * n)[0]
        else:
            better = np.nonzero(v * den > num * n)[0]
        if not better.size:
            break
        i = int(better[0])
    num, den = int(v[i]), i + 1
    ties = np.nonzero(v * den == num * n)[0]
    return Fraction(num, den), [int(t) + 1 for t in ties]


def ratio_extremes(terms) -> dict:
    """Exact min and max of a(n)/n with every attaining index."""
    v = np.asarray(terms, dtype=np.int64)
    if v.size == 0:
        raise ValueError("empty buffer")
    n = np.arange(1, v.size + 1, dtype=np.int64)
    min_ratio, argmin = _exact_extreme(v, n, "min")
    max_ratio, argmax = _exact_extreme(v, n, "max")
    return {
        "min_ratio": min_ratio,
        "argmin": argmin,
        "max_ratio": max_ratio,
        "argmax": argmax,
    }


def prime_position_estimate(p: int) -> float:
    """Asymptotic index estimate 2p / (1 + 1/(3 ln 2p)) for where the
    prime p appears as a term; only meaningful for large p."""
    if p < 3:
        raise ValueError(f"p must be a prime >= 3, got {p}")
    for d in range(2, int(math.isqrt(p)) + 1):
        if p % d == 0:
            raise ValueError(f"p={p} is not prime")
    return 2.0 * p / (1.0 + 1.0 / (3.0 * math.log(2.0 * p)))


def line_residuals(terms, ft: FactorTable, indices) -> dict:
    """Residuals r = a / (L * n * (1 + 1/(3 ln n))) - 1 against each
    class's line, L in {1, 1/2, 3/2}; per-class count, mean and max |r|."""
    v = np.asarray(terms)
    idx = np.asarray(sorted(indices), dtype=np.int64)
    if idx.size and (idx[0] < 3 or idx[-1] > v.size):
        raise ValueError("indices must lie in [3, len(terms)]")
    a = v[idx - 1].astype(np.float64)
    nf = idx.astype(np.float64)
    ln = np.log(nf)
    base = nf * (1.0 + 1.0 / (3.0 * ln))
    codes = classify_codes(ft, v[idx - 1])
    out = {}
    for code, name in enumerate(_CLASS_NAMES):
        mask = codes == code
        cnt = int(np.count_nonzero(mask))
        if cnt == 0:
            out[name] = {"count": 0, "mean_r": None, "max_abs_r": None}
            continue
        r = a[mask] / (_LINE_FACTOR[name] * base[mask]) - 1.0
        out[name] = {
            "count": cnt,
            "mean_r": float(np.mean(r)),
            "max_abs_r": float(np.max(np.abs(r))),
        }
    return out


def default_sample(n_total: int, count: int = 1000) -> list[int]:
    """Deterministic evenly spaced 1-based sample indices."""
    if n_total < 1:
        return []
    count = min(count, n_total)
    return sorted(set(int(x) for x in np.linspace(1, n_total, count)))


# -- CSV emission ---------------------------------------------------------


def write_terms_csv(f, terms, ft: FactorTable) -> None:
    """Rows n,value,class for the whole buffer."""
    v = np.asarray(terms)
    codes = classify_codes(ft, v)
    f.write("n,value,class\n")
    names = _CLASS_NAMES
    f.write("\n".join(
        f"{i + 1},{int(val)},{names[c]}" for i, (val, c) in enumerate(zip(v, codes))
    ))
    if v.size:
        f.write("\n")


def write_fit_csv(f, samples: list[FitSample]) -> None:
    """Rows n,c for the fit diagnostic."""
    f.write("n,c\n")
    f.write("\n".join(f"{s.n},{s.c!r}" for s in samples))
    if samples:
        f.write("\n")
