"""Command-line interface: ``cdpp count|sample|matroid|mixed``.

Every command prints one JSON object.  Counts are strings (exact integers,
``p/q`` fractions, or float reprs) so nothing is truncated.  Domain errors
exit with status 1 and ``{"error": code, "message": ...}``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .counting import BudgetConstraint, Interval, LinearFamily, PartitionFamily
from .dpp import ConstrainedDPP
from .errors import ArityMismatch, CDPPError, ParseError
from .genpoly import matroid_oracle
from .interp import check_backend
from .matroid import (count_bases_budgeted, count_pm_via_reduction, graphic_representation,
                      parse_edge_list)
from .mixed import (mixed_char_bruteforce, mixed_char_top_coeffs, mixed_disc_via_ecount,
                    mixed_discriminant_bruteforce)
from .sampling import Sampler


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})") from None


def _exact_matrix(rows, what: str) -> list[list]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{what} must be a list of rows")
    try:
        return [[Fraction(x) if isinstance(x, str) else x for x in r] for r in rows]
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from None


def load_kernel(path: str) -> dict:
    """``{"L": rows}`` (optionally with ``"m"``) or ``{"V": rows}``; numbers kept exact."""
    doc = _read_json(path)
    if not isinstance(doc, dict) or ("L" in doc) == ("V" in doc):
        raise ParseError(f"{path}: expected an object with exactly one of 'L' or 'V'")
    if "L" in doc:
        L = _exact_matrix(doc["L"], "L")
        if any(len(r) != len(L) for r in L):
            raise ParseError(f"{path}: L must be square")
        if "m" in doc and doc["m"] != len(L):
            raise ArityMismatch(f"{path}: m={doc['m']} but L has {len(L)} rows")
        return {"kernel": L}
    V = _exact_matrix(doc["V"], "V")
    if len({len(r) for r in V}) > 1:
        raise ParseError(f"{path}: V rows have differing lengths")
    return {"features": V}


def _allowed(spec) -> object:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ParseError("K must be {'set': [...]} or {'interval': [lo, hi]}")
    if "set" in spec:
        return frozenset(int(v) for v in spec["set"])
    if "interval" in spec:
        lo, hi = spec["interval"]
        return Interval(None if lo is None else int(lo), None if hi is None else int(hi))
    raise ParseError(f"unknown allowed-set kind {next(iter(spec))!r}")


def build_family(args, m: int):
    """Combine every constraint flag into one family (unconstrained if none given)."""
    cons = []
    if (args.budget_cost is None) != (args.budget is None):
        raise ParseError("--budget-cost and --budget go together")
    if args.budget_cost is not None:
        cons.append((_int_list(args.budget_cost), Interval(None, args.budget)))
    if (args.equality_cost is None) != (args.target is None):
        raise ParseError("--equality-cost and --target go together")
    if args.equality_cost is not None:
        cons.append((_int_list(args.equality_cost), frozenset({args.target})))
    if (args.partition is None) != (args.quotas is None):
        raise ParseError("--partition and --quotas go together")
    if args.partition is not None:
        parts = [[e - 1 for e in _int_list(block)] for block in args.partition.split("|")]
        try:
            fam = PartitionFamily(tuple(parts), tuple(_int_list(args.quotas)))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        if fam.m != m:
            raise ArityMismatch(f"partition covers {fam.m} elements, kernel has {m}")
        cons.extend(fam.as_linear().constraints)
    if args.linear is not None:
        doc = _read_json(args.linear)
        if not isinstance(doc, list):
            raise ParseError("--linear file must hold a list of constraints")
        for item in doc:
            cons.append(([int(v) for v in item["c"]], _allowed(item["K"])))
    for c, _ in cons:
        if len(c) != m:
            raise ArityMismatch(f"cost vector of length {len(c)} for {m} elements")
    if not cons:
        return LinearFamily.unconstrained(m)
    return LinearFamily(tuple(cons))


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _seed(seed):
    return int(np.random.SeedSequence().entropy % 2**63) if seed is None else seed


def _dpp(args) -> ConstrainedDPP:
    src = load_kernel(args.kernel)
    m = len(src["kernel"] if "kernel" in src else src["features"])
    return ConstrainedDPP(**src, family=build_family(args, m), backend=args.backend)


def cmd_count(args) -> dict:
    dpp = _dpp(args)
    return {"count": _fmt(dpp.count().value)}


def cmd_sample(args) -> dict:
    dpp = _dpp(args)
    seed = _seed(args.seed)
    draws = dpp.sample(seed, args.n)
    return {"samples": [sorted(e + 1 for e in d.subset) for d in draws], "seed": seed}


def _graph_costs(args, g):
    costs = _int_list(args.cost) if args.cost is not None else list(g.costs or [0] * g.m)
    if len(costs) != g.m:
        raise ArityMismatch(f"{len(costs)} costs for {g.m} edges")
    budget = args.budget if args.budget is not None else sum(c for c in costs if c > 0)
    return costs, budget


def _load_graph(path):
    try:
        return parse_edge_list(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def cmd_matroid(args) -> dict:
    g = _load_graph(args.graph)
    if args.action == "pm":
        return {"count": str(count_pm_via_reduction(g)), "backend": "float"}
    a = graphic_representation(g)
    costs, budget = _graph_costs(args, g)
    if args.action == "count":
        return {"count": str(count_bases_budgeted(a, costs, budget, args.backend))}
    seed = _seed(args.seed)
    sampler = Sampler(matroid_oracle(a), BudgetConstraint(tuple(costs), budget), args.backend)
    draws = sampler.draw_many(args.n, seed)
    return {"samples": [sorted(e + 1 for e in d.subset) for d in draws], "seed": seed}


def _load_matrices(path) -> list:
    doc = _read_json(path)
    mats = doc.get("matrices") if isinstance(doc, dict) else doc
    if not isinstance(mats, list):
        raise ParseError(f"{path}: expected a list of matrices or {{'matrices': [...]}}")
    return [np.array(_exact_matrix(a, "matrix"), dtype=float) for a in mats]


def cmd_mixed(args) -> dict:
    mats = _load_matrices(args.matrices)
    if args.action == "disc":
        fn = mixed_disc_via_ecount if args.method == "ecount" else mixed_discriminant_bruteforce
        return {"value": _fmt(fn(mats)), "backend": "float"}
    if args.method == "bruteforce":
        res = mixed_char_bruteforce(mats)
        coeffs = res.coeffs if args.k_max is None else res.coeffs[: args.k_max + 1]
    else:
        coeffs = mixed_char_top_coeffs(mats, args.k_max).coeffs
    return {"coefficients": [_fmt(c) for c in coeffs], "backend": "float"}


def _add_common(p, *, sampling=False):
    p.add_argument("--backend", default=None, help="float or exact (default: $CDPP_BACKEND or exact)")
    p.add_argument("--output", help="also write the JSON document to this file")
    p.add_argument("--threads", type=int, help="cap on BLAS/OpenMP threads")
    p.add_argument("--no-timing", action="store_true", help="omit wall_time_ms for reproducible output")
    if sampling:
        p.add_argument("--seed", type=int)
        p.add_argument("--n", type=int, default=1, help="number of samples")


def _add_constraints(p):
    p.add_argument("--kernel", required=True, help='JSON {"L": [[...]]} or {"V": [[...]]}')
    p.add_argument("--budget-cost")
    p.add_argument("--budget", type=int)
    p.add_argument("--equality-cost")
    p.add_argument("--target", type=int)
    p.add_argument("--partition", help='1-indexed blocks, e.g. "1,2|3,4"')
    p.add_argument("--quotas")
    p.add_argument("--linear", help="JSON list of {c, K} constraints")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cdpp", description="Constrained DPP counting and sampling")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", help="constrained DPP mass")
    _add_constraints(p)
    _add_common(p)
    p.set_defaults(run=cmd_count)

    p = sub.add_parser("sample", help="exact constrained DPP samples")
    _add_constraints(p)
    _add_common(p, sampling=True)
    p.set_defaults(run=cmd_sample)

    p = sub.add_parser("matroid", help="spanning trees under a budget, perfect matchings")
    p.add_argument("action", choices=("count", "sample", "pm"))
    p.add_argument("--graph", required=True, help="edge list, 1-indexed 'u v [cost]' lines")
    p.add_argument("--cost", help="comma-separated edge costs (default: costs in the graph file)")
    p.add_argument("--budget", type=int)
    _add_common(p, sampling=True)
    p.set_defaults(run=cmd_matroid)

    p = sub.add_parser("mixed", help="mixed discriminants and characteristic polynomials")
    p.add_argument("action", choices=("coeffs", "disc"))
    p.add_argument("--matrices", required=True, help='JSON {"matrices": [A_1, ...]}')
    p.add_argument("--k-max", type=int)
    p.add_argument("--method", choices=("reduction", "ecount", "bruteforce"), default="reduction")
    _add_common(p)
    p.set_defaults(run=cmd_mixed)
    return parser


def run(argv=None) -> tuple[int, dict, str | None]:
    """Parse and execute; returns (exit status, JSON document, output path)."""
    start = time.perf_counter()
    args = None
    try:
        args = build_parser().parse_args(argv)
        args.backend = check_backend(args.backend or os.environ.get("CDPP_BACKEND", "exact"))
        with threadpool_limits(limits=args.threads):
            doc = args.run(args)
        doc = {"backend": args.backend, **doc}
        doc.setdefault("seed", getattr(args, "seed", None))
        if not args.no_timing:
            doc["wall_time_ms"] = round((time.perf_counter() - start) * 1000, 3)
        return 0, doc, args.output
    except CDPPError as exc:
        doc = {"error": exc.code, "message": str(exc)}
    except ValueError as exc:
        doc = {"error": "InvalidInput", "message": str(exc)}
    return 1, doc, getattr(args, "output", None)


def main(argv=None) -> int:
    status, doc, output = run(argv)
    text = json.dumps(doc)
    print(text)
    if output:
        Path(output).write_text(text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
