"""``matchpd`` command line.

Exit codes: 0 solved or verified, 1 input error, 2 infeasible or ratio
undefined, 3 certificate rejected.  Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import generators, io
from .certificates import (CertificateReport, check_max_weight_certificate,
                           check_min_perfect_certificate, check_unbounded_ray)
from .graph import ContractError, InstanceError
from .hungarian import InfeasibleError, Problem, hungarian_solve, reduce_to_min_perfect
from .naive import naive_solve
from .online import (DEFAULT_F, adwords_run, adwords_upper_bound,
                     expected_dual_feasibility_check, monte_carlo_ratio)

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_REJECTED = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind, self.message = code, kind, message


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_INPUT, "io", f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- solve --------------------------------------------------------------------

def _cert_block(criterion, where, report: CertificateReport, **extra):
    return {"criterion": criterion, "instance": where, **report.to_json(), **extra}


def solve_document(problem: Problem, algorithm: str, inst) -> dict:
    """Solve and build the result document (status ``solved`` or ``infeasible``)."""
    doc = {"problem": problem.value, "algorithm": algorithm}
    if algorithm == "naive":
        if problem is not Problem.MAX_WEIGHT_MATCHING:
            raise CliError(EXIT_INPUT, "usage", "the naive algorithm only solves --problem maxw")
        try:
            res = naive_solve(inst)
        except ContractError as exc:
            raise CliError(EXIT_INPUT, "instance", str(exc)) from None
        report = check_max_weight_certificate(inst, res.matching, res.final_potential)
        doc.update(status="solved", matching=io.matching_to_json(res.matching),
                   value=io.fmt_rational(inst.weight_of(res.matching)),
                   potential=io.potential_to_json(res.final_potential),
                   certificate=_cert_block("max-weight", "original", report),
                   stats={"iterations": res.iterations})
        return doc

    if problem is Problem.MIN_WEIGHT_PERFECT:
        try:
            sol = hungarian_solve(inst)
        except InfeasibleError as exc:
            doc.update(status="infeasible", reason=exc.reason)
            if exc.ray is not None:
                ok = check_unbounded_ray(inst, exc.potential, exc.ray)
                doc["potential"] = io.potential_to_json(exc.potential)
                doc["certificate"] = {"criterion": "unbounded-ray", "instance": "original",
                                      "verdict": ok, "ray": io.potential_to_json(exc.ray)}
            else:
                doc["certificate"] = {"criterion": "side-sizes", "instance": "original",
                                      "verdict": inst.n_left != inst.n_right}
            return doc
        report = check_min_perfect_certificate(inst, sol.matching, sol.potential)
        doc.update(status="solved", matching=io.matching_to_json(sol.matching),
                   value=io.fmt_rational(sol.weight),
                   potential=io.potential_to_json(sol.potential),
                   certificate=_cert_block("min-perfect", "original", report),
                   stats={"augmentations": sol.augmentations})
        return doc

    try:
        red = reduce_to_min_perfect(problem, inst)
    except ContractError as exc:
        raise CliError(EXIT_INPUT, "instance", str(exc)) from None
    sol = hungarian_solve(red.instance)
    report = check_min_perfect_certificate(red.instance, sol.matching, sol.potential)
    cert = _cert_block("min-perfect", "reduced", report,
                       matching=io.matching_to_json(sol.matching))
    doc.update(potential=io.potential_to_json(sol.potential), certificate=cert,
               stats={"augmentations": sol.augmentations})
    try:
        m = red.extract(sol.matching)
    except InfeasibleError as exc:
        doc.update(status="infeasible", reason=exc.reason)
        return doc
    value = len(m) if problem is Problem.MAX_CARDINALITY else inst.weight_of(m)
    doc.update(status="solved", matching=io.matching_to_json(m), value=io.fmt_rational(value))
    return doc


def cmd_solve(args) -> int:
    inst, _ = io.parse_instance(_read(args.input))
    doc = solve_document(Problem(args.problem), args.algorithm, inst)
    _write(args.output, io.dumps(doc))
    if doc["status"] == "infeasible":
        return EXIT_INFEASIBLE
    return EXIT_OK if doc["certificate"]["verdict"] else EXIT_REJECTED


# -- verify -------------------------------------------------------------------

def verify_document(inst, doc) -> dict:
    """Recompute the certificate in ``doc`` from scratch; returns the report."""
    try:
        problem = Problem(doc["problem"])
        cert = doc["certificate"]
        criterion, where, status = cert["criterion"], cert["instance"], doc["status"]
    except (KeyError, TypeError, ValueError):
        raise CliError(EXIT_INPUT, "result", "result document lacks problem/status/certificate")

    if criterion == "side-sizes":
        ok = status == "infeasible" and inst.n_left != inst.n_right
        return {"verdict": ok} if ok else {"verdict": False, "failed_condition": "NotPerfect"}
    if criterion == "unbounded-ray":
        pi = io.potential_from_json(doc.get("potential"), inst.n_left, inst.n_right)
        ray = io.potential_from_json(cert.get("ray"), inst.n_left, inst.n_right)
        ok = status == "infeasible" and check_unbounded_ray(inst, pi, ray)
        return {"verdict": ok} if ok else {"verdict": False, "failed_condition": "DualInfeasible"}

    target = inst
    if where == "reduced":
        target = reduce_to_min_perfect(problem, inst).instance
        M = io.matching_from_json(cert.get("matching"))
    else:
        M = io.matching_from_json(doc.get("matching"))
    pi = io.potential_from_json(doc.get("potential"), target.n_left, target.n_right)
    check = {"max-weight": check_max_weight_certificate,
             "min-perfect": check_min_perfect_certificate}.get(criterion)
    if check is None:
        raise CliError(EXIT_INPUT, "result", f"unknown certificate criterion {criterion!r}")
    report = check(target, M, pi).to_json()
    if not report["verdict"]:
        return report

    if where == "reduced":
        try:
            kept = reduce_to_min_perfect(problem, inst).extract(M)
        except InfeasibleError:
            ok = status == "infeasible"
            return {"verdict": ok} if ok else {"verdict": False, "failed_condition": "NotPerfect"}
        if status != "solved" or io.matching_from_json(doc.get("matching")) != kept:
            return {"verdict": False, "failed_condition": "NotMatching"}
        M = kept
    value = len(M) if problem is Problem.MAX_CARDINALITY else inst.weight_of(M)
    if doc.get("value") != io.fmt_rational(value):
        return {"verdict": False, "failed_condition": "ValueMismatch"}
    return report


def cmd_verify(args) -> int:
    inst, _ = io.parse_instance(_read(args.input))
    try:
        doc = json.loads(_read(args.result))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, "result", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise CliError(EXIT_INPUT, "result", "result must be a JSON object")
    report = verify_document(inst, doc)
    sys.stdout.write(io.dumps(report))
    return EXIT_OK if report["verdict"] else EXIT_REJECTED


# -- online -------------------------------------------------------------------

def _load_online(path):
    text = _read(path)
    if text.lstrip().startswith("p") or text.lstrip().startswith("c"):
        inst, ws = io.parse_instance(text)
        return io.online_from_bipartite(inst, ws)
    return io.parse_online(text)


def cmd_online(args) -> int:
    if args.trials < 1:
        raise CliError(EXIT_INPUT, "usage", "--trials must be at least 1")
    doc = {"mode": args.mode, "trials": args.trials, "seed": args.seed}
    if args.mode == "adwords":
        inst = io.parse_adwords(_read(args.input))
        run = adwords_run(inst)
        bound = adwords_upper_bound(inst)
        if bound == 0:
            raise CliError(EXIT_INFEASIBLE, "undefined", "upper bound is 0; ratio undefined")
        doc.update(revenue=io.fmt_rational(run.value), upper_bound=io.fmt_rational(bound),
                   ratio=float(run.value / bound),
                   assignment=[-1 if b is None else b for b in run.mates])
        _write(args.output, io.dumps(doc))
        return EXIT_OK

    inst = _load_online(args.input)
    F = DEFAULT_F if args.F is None else args.F
    try:
        est = monte_carlo_ratio(inst, args.trials, args.seed,
                                weighted=args.mode == "vertex-weighted")
        if args.mode == "dual-check":
            report = expected_dual_feasibility_check(inst, F=F, trials=args.trials,
                                                     seed=args.seed)
            doc["dual_check"] = report.to_json()
    except ZeroDivisionError as exc:
        raise CliError(EXIT_INFEASIBLE, "undefined", str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_INPUT, "usage", str(exc)) from None
    doc["estimate"] = est.to_json()
    _write(args.output, io.dumps(doc))
    return EXIT_OK


# -- gen ----------------------------------------------------------------------

def cmd_gen(args) -> int:
    n, seed = args.size, args.seed
    if n < 1:
        raise CliError(EXIT_INPUT, "usage", "--size must be at least 1")
    if args.family == "random":
        text = io.format_instance(generators.random_bipartite(n, n, seed))
    elif args.family == "complete":
        text = io.format_instance(generators.complete(n, seed, unit=args.weights == "unit"))
    elif args.family == "upper-triangular":
        text = io.format_online(generators.upper_triangular(n))
    else:
        text = io.format_adwords(generators.adwords_small_bids(n, seed))
    _write(args.output, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matchpd", description="Primal-dual bipartite matching tools")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an offline matching problem")
    s.add_argument("--problem", required=True, choices=[x.value for x in Problem])
    s.add_argument("--algorithm", default="hungarian", choices=["naive", "hungarian"])
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="recheck a result document's certificate")
    v.add_argument("--input", required=True)
    v.add_argument("--result", required=True)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("online", help="simulate online algorithms")
    o.add_argument("--mode", required=True,
                   choices=["ranking", "vertex-weighted", "adwords", "dual-check"])
    o.add_argument("--input", required=True)
    o.add_argument("--trials", type=int, default=10_000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--F", type=float, help="dual scaling for dual-check (default 1 - 1/e)")
    o.add_argument("--output")
    o.set_defaults(func=cmd_online)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--family", required=True,
                   choices=["random", "complete", "upper-triangular", "adwords-smallbids"])
    g.add_argument("--size", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--weights", choices=["unit", "random"], default="random",
                   help="edge weights for the complete family")
    g.add_argument("--output")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        err = {"error": exc.kind, "message": exc.message}
        code = exc.code
    except InstanceError as exc:
        err, code = {"error": "instance", "message": str(exc)}, EXIT_INPUT
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
