"""Command-line frontend.

Subcommands cover generation (binary/CSV/JSONL), the fast-vs-naive oracle
check, pattern and audit verification, cycle reports, asymptotic
diagnostics, inverse lookup and index prediction.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 a verification
command found violations (the report is still written). Outputs are
written atomically (temp file then rename) and are byte-deterministic for
a fixed command line; nothing but progress may go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import analysis
from .factor_sieve import build_spf
from .generator import EkgGenerator, Rule, naive_generate, write_dump
from .permutation import build_view, cycle_json, enumerate_cycles


class _Usage(Exception):
    pass


def _parse(argv):
    p = argparse.ArgumentParser(
        prog="ekgseq",
        description="Generate and verify the smallest-unused shared-factor "
        "sequence and its gcd-threshold variants.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def rule_flags(sp):
        sp.add_argument("--threshold", type=int, default=2,
                        help="gcd threshold M >= 2 (default 2)")
        sp.add_argument("--prefix", type=str, default=None,
                        help="comma-separated seed prefix (default 1..M)")

    def out_flag(sp):
        sp.add_argument("--out", type=str, default=None,
                        help="output path (default: stdout)")

    sp = sub.add_parser("generate", help="emit terms")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=None, help="number of terms")
    sp.add_argument("--max-value", type=int, default=None,
                    help="generate until a term reaches this value (inclusive)")
    sp.add_argument("--format", choices=("bin", "csv", "jsonl"), default="csv")
    sp.add_argument("--trace", action="store_true",
                    help="record controlling divisors (csv/jsonl only; slower path)")
    out_flag(sp)

    sp = sub.add_parser("oracle-check",
                        help="compare the table engine against the naive reference")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=10**4)
    out_flag(sp)

    sp = sub.add_parser("conjectures",
                        help="verify the 2p, p, 3p spike pattern (canonical rule)")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=10**6)
    out_flag(sp)

    sp = sub.add_parser("lemmas", help="run the proved-property audits (canonical rule)")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=10**5)
    out_flag(sp)

    sp = sub.add_parser("cycles", help="cycle records up to a representative")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=1000,
                    help="largest cycle representative to enumerate")
    sp.add_argument("--horizon", type=int, default=10**6)
    out_flag(sp)

    sp = sub.add_parser("fit", help="c diagnostic over the last tenth of the range")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=10**6)
    sp.add_argument("--stride", type=int, default=1000)
    out_flag(sp)

    sp = sub.add_parser("lines", help="per-class line residuals")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=10**6)
    sp.add_argument("--stride", type=int, default=1000)
    out_flag(sp)

    sp = sub.add_parser("extremes", help="exact min/max of a(n)/n")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=10**6)
    out_flag(sp)

    sp = sub.add_parser("invert", help="index at which a value appears")
    rule_flags(sp)
    sp.add_argument("--count", type=int, default=10**6)
    sp.add_argument("--value", type=int, required=True)
    out_flag(sp)

    sp = sub.add_parser("predict", help="heuristic index for a value")
    sp.add_argument("--value", type=int, required=True)
    out_flag(sp)

    return p, p.parse_args(argv)


def _rule_from(args) -> Rule:
    prefix = None
    if getattr(args, "prefix", None):
        try:
            prefix = tuple(int(x) for x in args.prefix.split(","))
        except ValueError:
            raise _Usage(f"cannot parse --prefix {args.prefix!r}")
    try:
        return Rule(args.threshold, prefix)
    except ValueError as e:
        raise _Usage(str(e))


def _require_canonical(args, what: str) -> Rule:
    rule = _rule_from(args)
    if not rule.canonical:
        raise _Usage(f"{what} is defined for the canonical rule "
                     "(threshold 2, prefix 1,2) only")
    return rule


def _emit(payload, out_path):
    """Atomic file write, or stdout when no path was given."""
    data = payload.encode() if isinstance(payload, str) else payload
    if out_path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    d = os.path.dirname(os.path.abspath(out_path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".ekgseq-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, out_path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _json_doc(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _jsonl(objs) -> str:
    return "".join(json.dumps(o) + "\n" for o in objs)


# -- commands -------------------------------------------------------------


def _cmd_generate(args) -> int:
    rule = _rule_from(args)
    if (args.count is None) == (args.max_value is None):
        raise _Usage("generate needs exactly one of --count / --max-value")
    if args.trace and args.format == "bin":
        raise _Usage("--trace output needs --format csv or jsonl")
    gen = EkgGenerator(rule, trace=args.trace)
    if args.count is not None:
        if args.count < 0:
            raise _Usage("--count must be >= 0")
        terms = gen.generate_count(args.count)
    else:
        terms = gen.generate_until_value(args.max_value)

    if args.format == "bin":
        import io

        buf = io.BytesIO()
        write_dump(buf, rule, terms)
        _emit(buf.getvalue(), args.out)
        return 0

    ft = gen.factors
    codes = analysis.classify_codes(ft, terms)
    names = [analysis.class_name(c) for c in codes]
    if args.format == "csv":
        lines = []
        if args.trace:
            lines.append("n,value,class,controlling")
            for i, (v, name) in enumerate(zip(terms, names)):
                ctrl = ";".join(str(d) for d in gen.controlling_divisors(i + 1))
                lines.append(f"{i + 1},{int(v)},{name},{ctrl}")
        else:
            lines.append("n,value,class")
            for i, (v, name) in enumerate(zip(terms, names)):
                lines.append(f"{i + 1},{int(v)},{name}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0

    objs = []
    for i, (v, name) in enumerate(zip(terms, names)):
        o = {"n": i + 1, "value": int(v), "class": name}
        if args.trace:
            o["controlling"] = gen.controlling_divisors(i + 1)
        objs.append(o)
    _emit(_jsonl(objs), args.out)
    return 0


def _cmd_oracle_check(args) -> int:
    rule = _rule_from(args)
    if args.count < 0:
        raise _Usage("--count must be >= 0")
    fast = EkgGenerator(rule).generate_count(args.count)
    ref = naive_generate(rule, args.count)
    mismatch = np.nonzero(np.asarray(fast) != ref)[0]
    report = {
        "rule": {"threshold": rule.threshold, "prefix": list(rule.prefix)},
        "count": args.count,
        "equal": not mismatch.size,
        "first_mismatch": None,
    }
    if mismatch.size:
        i = int(mismatch[0])
        report["first_mismatch"] = {
            "n": i + 1,
            "engine": int(fast[i]),
            "reference": int(ref[i]),
        }
    _emit(_json_doc(report), args.out)
    return 3 if mismatch.size else 0


def _cmd_conjectures(args) -> int:
    _require_canonical(args, "the spike-pattern check")
    gen = EkgGenerator()
    terms = gen.generate_count(args.count)
    violations = analysis.check_prime_spike_pattern(terms, gen.factors)
    report = {"range": [1, args.count], "violations": violations}
    _emit(_json_doc(report), args.out)
    return 3 if violations else 0


def _cmd_lemmas(args) -> int:
    _require_canonical(args, "the property audits")
    gen = EkgGenerator()
    terms = gen.generate_count(args.count)
    ft = gen.factors
    sample = analysis.default_sample(args.count, 1000)
    audits = [
        ("new-prime-entry", analysis.check_new_prime_entry(terms, ft)),
        ("cofactor-precedence", analysis.check_quotient_precedence(terms, ft, sample)),
        ("prime-term-coverage", analysis.check_prime_term_coverage(terms, ft)),
        ("prime-factor-bound", analysis.check_prime_factor_bound(terms, ft)),
    ]
    docs = [
        {"lemma": name, "range": [1, args.count], "violations": v}
        for name, v in audits
    ]
    _emit(_json_doc(docs), args.out)
    return 3 if any(v for _, v in audits) else 0


def _cmd_cycles(args) -> int:
    rule = _rule_from(args)
    if args.count > args.horizon:
        raise _Usage("--count (max representative) cannot exceed --horizon")
    terms = EkgGenerator(rule).generate_count(args.horizon)
    view = build_view(terms, args.horizon)
    records = enumerate_cycles(view, args.count)
    _emit(_jsonl(cycle_json(r) for r in records), args.out)
    return 0


def _fit_window(count: int) -> tuple[int, int]:
    return max(3, (9 * count) // 10), count


def _cmd_fit(args) -> int:
    rule = _rule_from(args)
    gen = EkgGenerator(rule)
    terms = gen.generate_count(args.count)
    lo, hi = _fit_window(args.count)
    report = analysis.fit_report(terms, gen.factors, lo, hi, args.stride)
    _emit(_json_doc(report), args.out)
    return 0


def _cmd_lines(args) -> int:
    rule = _rule_from(args)
    gen = EkgGenerator(rule)
    terms = gen.generate_count(args.count)
    lo, hi = _fit_window(args.count)
    idx = list(range(lo, hi + 1, max(args.stride, 1)))
    report = {
        "log_base": "natural",
        "range": [lo, hi],
        "stride": args.stride,
        "residuals": analysis.line_residuals(terms, gen.factors, idx),
    }
    _emit(_json_doc(report), args.out)
    return 0


def _cmd_extremes(args) -> int:
    rule = _rule_from(args)
    terms = EkgGenerator(rule).generate_count(args.count)
    ext = analysis.ratio_extremes(terms)
    report = {
        "count": args.count,
        "min_ratio": str(ext["min_ratio"]),
        "argmin": ext["argmin"],
        "max_ratio": str(ext["max_ratio"]),
        "argmax": ext["argmax"],
    }
    _emit(_json_doc(report), args.out)
    return 0


def _cmd_invert(args) -> int:
    rule = _rule_from(args)
    terms = np.asarray(EkgGenerator(rule).generate_count(args.count))
    where = np.nonzero(terms == args.value)[0]
    report = {
        "value": args.value,
        "index": int(where[0]) + 1 if where.size else None,
        "count": args.count,
    }
    _emit(_json_doc(report), args.out)
    return 0


def _cmd_predict(args) -> int:
    if args.value < 1:
        raise _Usage("--value must be >= 1")
    ft = build_spf(max(args.value, 2))
    report = {"value": args.value, "predicted_index": analysis.predicted_index(ft, args.value)}
    _emit(_json_doc(report), args.out)
    return 0


_DISPATCH = {
    "generate": _cmd_generate,
    "oracle-check": _cmd_oracle_check,
    "conjectures": _cmd_conjectures,
    "lemmas": _cmd_lemmas,
    "cycles": _cmd_cycles,
    "fit": _cmd_fit,
    "lines": _cmd_lines,
    "extremes": _cmd_extremes,
    "invert": _cmd_invert,
    "predict": _cmd_predict,
}


def main(argv=None) -> int:
    parser, args = _parse(argv)
    try:
        return _DISPATCH[args.command](args)
    except _Usage as e:
        parser.exit(2, f"{parser.prog}: error: {e}\n")
    except OSError as e:
        print(f"{parser.prog}: I/O error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
