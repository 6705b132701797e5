"""Command-line front end.

Exit codes: 0 Yes, 1 No, 2 Inconclusive, 3 input or hypothesis error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .algebra import HypothesisError, decide_algebra_membership, decide_algebra_universality
from .gateset_io import PROBLEMS, ProblemFile, ProblemFileError, gate_names, parse_problem
from .group import (
    decide_group_membership,
    decide_group_universality,
    decide_subgroup_universality,
)
from .matrix_core import (
    DEFAULT_TOL,
    LogVerdict,
    commutator_bound_gap,
    haar_unitary,
    log_trace_bound_report,
    mat_exp,
    random_su_algebra_element,
)
from .su_structure import build_su_structure

SCHEMA = 1
EXIT_CODES = {"Yes": 0, "No": 1, "Inconclusive": 2, "error": 3}

SUBCOMMANDS = {
    "alg-universal": "algebra_universality",
    "alg-member": "algebra_membership",
    "grp-universal": "group_universality",
    "sub-universal": "subgroup_universality",
    "grp-member": "group_membership",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liegates", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"liegates {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--output", choices=("json", "text"), default="text")
        p.add_argument("-v", "--verbose", action="store_true", help="log normalization notices")

    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True, help="problem file (JSON)")
        p.add_argument("--max-word-length", type=int)
        p.add_argument("--budget", type=int, help="element budget for the word search")
        p.add_argument("--tol-rank", type=float)
        p.add_argument("--tol-dedup", type=float)
        p.add_argument("--tol-commute", type=float)
        p.add_argument("--no-normalize", action="store_true",
                       help="reject gates outside SU(d) instead of rescaling them")
        common(p)

    p = sub.add_parser("verify-appendix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--r", type=float, default=1.0, help="radius r in (0, 1] for the log bound")
    common(p)

    p = sub.add_parser("info")
    common(p)
    return parser


def _apply_overrides(pf: ProblemFile, args) -> ProblemFile:
    tol = pf.tolerances
    updates = {k: v for k, v in (("rank_tol", args.tol_rank), ("dedup_tol", args.tol_dedup),
                                 ("commute_tol", args.tol_commute)) if v is not None}
    if updates:
        tol = replace(tol, **updates)
    max_len = pf.max_word_length if args.max_word_length is None else args.max_word_length
    budget = pf.element_budget if args.budget is None else args.budget
    if max_len < 0 or budget < 1:
        raise ProblemFileError("--max-word-length must be >= 0 and --budget >= 1")
    return replace(pf, tolerances=tol, max_word_length=max_len, element_budget=budget)


def _coords(structure, mats) -> np.ndarray:
    if not mats:
        return np.zeros((0, structure.n))
    return np.atleast_2d(structure.to_coords(np.array(mats)))


def solve(command: str, pf: ProblemFile) -> tuple[str, dict, dict]:
    """Run one decider; returns (verdict, certificate, budget usage)."""
    tol = pf.tolerances
    structure = build_su_structure(pf.d)
    if command == "alg-universal":
        v = decide_algebra_universality(_coords(structure, pf.hamiltonians), structure, tol)
        return v.answer.value, v.as_dict(), {}
    if command == "alg-member":
        x1, y = _coords(structure, pf.hamiltonians), _coords(structure, pf.Y)
        v1 = decide_algebra_membership(x1, y, structure, "P_X1", tol)
        v2 = decide_algebra_membership(x1, y, structure, "P_X2", tol)
        cert = v1.as_dict()
        cert["variant_P_X2"] = v2.as_dict()
        cert["variants_agree"] = v1.answer == v2.answer
        return v1.answer.value, cert, {}
    if command == "grp-universal":
        v = decide_group_universality(pf.gates, pf.max_word_length, pf.element_budget, tol)
        return v.answer.value, v.as_dict(pf.gate_names()), v.budget_report
    if command == "sub-universal":
        v = decide_subgroup_universality(_coords(structure, pf.hamiltonians), _coords(structure, pf.Y),
                                         pf.d, pf.max_word_length, pf.element_budget, tol)
        return v.answer.value, v.as_dict(), v.budget_report
    if command == "grp-member":
        v = decide_group_membership(_coords(structure, pf.hamiltonians), _coords(structure, pf.Y),
                                    pf.d, pf.max_word_length, pf.element_budget, tol)
        return v.answer.value, v.as_dict(), v.budget_report
    raise UsageError(f"unknown command {command}")


def _worker_cap() -> int:
    raw = os.environ.get("GATESET_ORACLE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return max(1, min(4, os.cpu_count() or 1))


def _bound_block(d: int, samples: int, seed: int) -> dict:
    rng = np.random.default_rng([seed, d])
    gaps = [commutator_bound_gap(haar_unitary(d, rng), haar_unitary(d, rng)) for _ in range(samples)]
    passed = sum(g >= -1e-12 for g in gaps)
    return {"d": d, "samples": samples, "passed": passed,
            "min_slack": min(gaps) if gaps else None}


def verify_appendix(seed: int = 0, samples: int = 1000, r: float = 1.0,
                    log_dim: int = 41) -> dict:
    """Sample the commutator inequality and the traceless-logarithm theorem."""
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    dims = (2, 3, 5)
    with ThreadPoolExecutor(max_workers=_worker_cap()) as pool:
        blocks = list(pool.map(lambda d: _bound_block(d, samples, seed), dims))

    log_samples = min(samples, 100)
    rng = np.random.default_rng([seed, 41_041])
    threshold = 2 * math.sqrt(log_dim) * math.sin(math.pi / log_dim)
    counts = {v.value: 0 for v in LogVerdict}
    max_trace = 0.0
    for _ in range(log_samples):
        scale = rng.uniform(0.01, 0.95) * min(r, threshold)
        u = mat_exp(random_su_algebra_element(log_dim, rng, scale))
        rep = log_trace_bound_report(u, r)
        counts[rep.verdict.value] += 1
        max_trace = max(max_trace, abs(rep.trace_log))
    near_identity = {"d": log_dim, "samples": log_samples, "verdicts": counts,
                     "max_abs_trace_log": max_trace,
                     "passed": counts[LogVerdict.IN_SU_D.value]}

    tight = None
    if samples > 0:
        u = np.exp(2j * np.pi / log_dim) * np.eye(log_dim)
        rep = log_trace_bound_report(u, r)
        tight = rep.as_dict()
        tight["expected_distance"] = threshold
        tight["passed"] = (rep.verdict is LogVerdict.NOT_APPLICABLE
                           and abs(rep.distance_to_identity - threshold) < 1e-10)

    ok = (all(b["passed"] == b["samples"] for b in blocks)
          and near_identity["passed"] == log_samples
          and (tight is None or tight["passed"]))
    return {"verdict": "Yes" if ok else "No",
            "commutator_bound": blocks,
            "log_near_identity": near_identity,
            "log_tightness_example": tight}


def _info() -> dict:
    return {
        "verdict": None,
        "subcommands": list(SUBCOMMANDS) + ["verify-appendix", "info"],
        "problems": list(PROBLEMS),
        "named_gates": {str(d): gate_names(d) for d in (2, 3, 4)},
        "default_tolerances": DEFAULT_TOL.as_dict(),
        "exit_codes": EXIT_CODES,
    }


def _emit(report: dict, fmt: str, stream) -> None:
    if fmt == "json":
        json.dump(report, stream, indent=2, default=_json_default)
        stream.write("\n")
        return
    stream.write(render_text(report))


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def render_text(report: dict) -> str:
    lines = [f"liegates {report['version']}  {report['command']}"]
    if report.get("verdict") is not None:
        lines.append(f"verdict: {report['verdict']}")
    if report.get("error"):
        lines.append(f"error: {report['error']}")
    cert = report.get("certificate") or {}
    for key in ("commutant_check", "condition_commutant", "condition_dimension"):
        if key in cert:
            lines.append(f"{key}: {json.dumps(cert[key], default=_json_default)}")
    if cert.get("diagram"):
        lines.append(f"diagram: {json.dumps(cert['diagram'], default=_json_default)}")
    wit = cert.get("witness")
    if wit:
        word = wit.get("word_names", wit["word"])
        lines.append(f"witness: {wit['reason']} word={word} center_distance={wit['center_distance']:.6g}")
    if cert.get("note"):
        lines.append(f"note: {cert['note']}")
    if report.get("budget"):
        lines.append(f"budget: {json.dumps(report['budget'], default=_json_default)}")
    for key in ("commutator_bound", "log_near_identity", "log_tightness_example",
                "named_gates", "exit_codes"):
        if key in report:
            lines.append(f"{key}: {json.dumps(report[key], default=_json_default)}")
    if "tolerances" in report:
        lines.append(f"tolerances: {json.dumps(report['tolerances'])}")
    if "timing_s" in report:
        lines.append(f"time: {report['timing_s']:.3f}s")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_CODES["error"]
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=stderr)
    report = {"schema": SCHEMA, "tool": "liegates", "version": __version__, "command": args.command}
    start = time.perf_counter()
    if args.command == "info":
        report.update(_info())
        _emit(report, args.output, stdout)
        return 0
    if args.command == "verify-appendix":
        try:
            report.update(verify_appendix(args.seed, args.samples, args.r))
            report["parameters"] = {"seed": args.seed, "samples": args.samples, "r": args.r}
        except ValueError as exc:
            report.update(verdict="error", error=str(exc))
        report["timing_s"] = time.perf_counter() - start
        _emit(report, args.output, stdout)
        return EXIT_CODES[report["verdict"]]

    try:
        pf = _apply_overrides(parse_problem(args.input, normalize=not args.no_normalize), args)
        expected = SUBCOMMANDS[args.command]
        if pf.problem != expected:
            raise ProblemFileError(f"problem: file declares {pf.problem!r} but {args.command} "
                                   f"solves {expected!r}")
        report["problem"] = pf.to_dict()
        report["tolerances"] = pf.tolerances.as_dict()
        verdict, cert, budget = solve(args.command, pf)
        report.update(verdict=verdict, certificate=cert, budget=budget)
    except HypothesisError as exc:
        report.update(verdict="error", error=f"hypothesis not satisfied: {exc}")
    except (ProblemFileError, ValueError) as exc:
        report.update(verdict="error", error=str(exc))
    report["timing_s"] = time.perf_counter() - start
    _emit(report, args.output, stdout)
    return EXIT_CODES[report["verdict"]]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
