"""Command-line front end.

Exit codes: 0 success, 1 wizard aborted on end of input, 2 validation or
schema error, 3 parse error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import betareg, plotting, report
from .errors import FocaError, NumericError, ParseError, ValidationError
from .inspect import parse_file, suggest_grades
from .questionnaire import (
    NL_POLICIES,
    ROLES,
    OntologyType,
    derive_nl,
    dump_session,
    iter_goal_blocks,
    load_session,
    new_session,
    parse_grade_input,
    record_answer,
)
from .scoring import Coefficients, RoleSelector, quality

COEFFICIENT_ENV = "FOCA_COEFFICIENTS"
COMMANDS = ("questions", "evaluate", "score", "inspect", "fit", "report")

EXIT_OK, EXIT_ABORTED, EXIT_VALIDATION, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    output: str | None = None
    nl_policy: str = "strict"
    coefficients: Coefficients = field(default_factory=Coefficients)
    selectors: list = field(default_factory=lambda: [RoleSelector()])
    seed: int | None = None
    fmt: str = "text"


def load_coefficients(path) -> Coefficients:
    """Read 7 coefficients from a JSON list or a {"b1": ..., "b7": ...} object."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        names = ("b1", "b2", "b3", "b4", "b5", "b6", "b7")
        if set(data) != set(names):
            raise ValidationError(f"{path}: coefficient file needs exactly the keys b1..b7")
        data = [data[n] for n in names]
    return Coefficients.from_sequence(data)


def resolve_coefficients(arg: str | None, env=os.environ) -> Coefficients:
    if arg:
        return Coefficients.from_sequence(v for v in arg.split(",") if v.strip())
    path = env.get(COEFFICIENT_ENV)
    if path:
        return load_coefficients(path)
    return Coefficients()


def _out(text, path=None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_questions(args) -> int:
    otype = OntologyType.parse(args.type) if args.type else None
    if args.goal is not None and args.goal not in ROLES:
        raise ValidationError(f"--goal must be 1..5, got {args.goal}")
    _out(report.render_catalog(otype, args.goal, args.format), args.output)
    return EXIT_OK


class _Prompter:
    def __init__(self, stream, out):
        self.stream = stream
        self.out = out

    def ask(self, prompt):
        self.out.write(prompt)
        self.out.flush()
        line = self.stream.readline()
        if not line:
            raise EOFError
        return line.strip()


def run_wizard(stream, out, ontology_id=None, ontology_type=None, lexp=None, goal_order=None):
    """Ask for type and experience, then every applicable question. Returns (session, aborted)."""
    p = _Prompter(stream, out)
    session = None
    try:
        if ontology_id is None:
            ontology_id = p.ask("Ontology identifier: ") or "ontology"
        while ontology_type is None:
            raw = p.ask("Ontology type (type1 = domain/task, type2 = application): ")
            try:
                ontology_type = OntologyType.parse(raw)
            except ValidationError as exc:
                out.write(f"  {exc}\n")
        while lexp is None:
            raw = p.ask("Do you have vast experience with ontologies? (1 = yes, 0 = no): ")
            if raw in ("0", "1"):
                lexp = int(raw)
            else:
                out.write("  please answer 0 or 1\n")
        session = new_session(ontology_id, ontology_type, lexp)
        for goal, specs in iter_goal_blocks(ontology_type, goal_order):
            out.write(f"\nGoal {goal}: {ROLES[goal]}\n")
            for spec in specs:
                if spec.id == "Q2" and session.q2_locked:
                    out.write("Q2 is locked at 0 because Q1 = 0.\n")
                    continue
                out.write(f"{spec.id}. {spec.text}\n  {spec.rubric}\n")
                for i, sub in enumerate(spec.sub_questions, 1):
                    out.write(f"  ({i}) {sub}\n")
                if spec.sub_questions:
                    allowed = (f"0 or {len(spec.sub_questions)} sub-grades from "
                               f"{{{', '.join(map(str, sorted(spec.sub_grades)))}}}")
                else:
                    allowed = "{" + ", ".join(map(str, sorted(spec.allowed_grades))) + "}"
                while True:
                    raw = p.ask(f"{spec.id} grade {allowed} or 'skip': ")
                    try:
                        value = parse_grade_input(raw, spec)
                        if value is not None:
                            session = record_answer(session, spec.id, value)
                        break
                    except ValidationError as exc:
                        out.write(f"  {exc}; allowed: {allowed}\n")
    except EOFError:
        out.write("\nEnd of input: saving a partial answer file flagged incomplete.\n")
        if session is None:
            session = new_session(ontology_id or "ontology", ontology_type or "type1", lexp or 0)
        return replace(session, incomplete=True), True
    return session, False


def cmd_evaluate(args) -> int:
    stream = open(args.script, encoding="utf-8") if args.script else sys.stdin
    goal_order = [int(g) for g in args.goal_order.split(",")] if args.goal_order else None
    try:
        session, aborted = run_wizard(
            stream, sys.stdout, args.ontology_id,
            OntologyType.parse(args.type) if args.type else None,
            args.lexp, goal_order)
    finally:
        if args.script:
            stream.close()
    dump_session(session, args.output)
    sys.stdout.write(f"\nWrote {args.output}\nNl = {derive_nl(session, args.nl_policy)} "
                     f"(policy: {args.nl_policy})\n")
    return EXIT_ABORTED if aborted else EXIT_OK


def _selectors(roles_args) -> list[RoleSelector]:
    return [RoleSelector.parse(r) for r in (roles_args or ["all"])]


def score_text(session, selectors, coefficients, nl_policy, fmt) -> str:
    scores = [quality(session, sel, coefficients, nl_policy) for sel in selectors]
    return report.render_score(session, scores, nl_policy, fmt)


def cmd_score(args) -> int:
    session = load_session(args.answers)
    text = score_text(session, _selectors(args.roles), resolve_coefficients(args.coef),
                      args.nl_policy, args.format)
    _out(text, args.output)
    return EXIT_OK


def cmd_inspect(args) -> int:
    doc = parse_file(args.ontology)
    evidence = suggest_grades(doc, args.own_ns)
    _out(report.render_evidence(evidence, args.format), args.output)
    if args.merge:
        session = load_session(args.merge)
        notes = dict(session.notes)
        for e in evidence.entries:
            note = f"[inspect] suggested {e.suggested_grade}: {e.rationale}"
            notes[e.question] = f"{notes[e.question]}\n{note}" if e.question in notes else note
        target = args.merged_out or str(Path(args.merge).with_suffix(".inspected.json"))
        dump_session(replace(session, notes=notes), target)
        sys.stderr.write(f"wrote suggestions as notes to {target}\n")
    return EXIT_OK


def fit_dataset(data, residuals_path=None, plot_path=None, fmt="text"):
    if data.n < 8:
        raise ValidationError(f"need at least 8 observations, got {data.n}")
    result = betareg.require_converged(betareg.fit(data))
    resid = betareg.residuals(result, data)
    if residuals_path:
        Path(residuals_path).write_text(report.render_residuals_csv(resid), encoding="utf-8")
    if plot_path:
        plotting.residual_plot(resid, plot_path)
    return result, resid, report.render_fit(result, resid if fmt == "json" else None, fmt)


def cmd_fit(args) -> int:
    if args.simulate:
        X = betareg.realistic_design(args.simulate, seed=args.seed)
        truth = resolve_coefficients(args.coef).as_tuple()
        data = betareg.simulate(truth, args.phi, X, seed=args.seed)
        if args.save_data:
            betareg.write_dataset(data, args.save_data)
    elif args.dataset:
        data = betareg.load_dataset(args.dataset)
    else:
        raise ValidationError("give a dataset file or --simulate N")
    residuals_path = args.residuals or (str(Path(args.output).with_suffix(".residuals.csv"))
                                        if args.output else None)
    _, resid, text = fit_dataset(data, residuals_path, args.plot, args.format)
    _out(text, args.output)
    if residuals_path and args.format == "text":
        sys.stdout.write(f"residual pairs written to {residuals_path}\n")
    return EXIT_OK


def cmd_report(args) -> int:
    """Write text, JSON and figures for an answer file and/or a dataset into a directory."""
    if not args.answers and not args.data:
        raise ValidationError("report needs --answers and/or --data")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.answers:
        session = load_session(args.answers)
        selectors = _selectors(args.roles)
        coefficients = resolve_coefficients(args.coef)
        scores = [quality(session, s, coefficients, args.nl_policy) for s in selectors]
        for fmt, name in (("text", "score.txt"), ("json", "score.json")):
            (out_dir / name).write_text(report.render_score(session, scores, args.nl_policy, fmt),
                                        encoding="utf-8")
            written.append(name)
        plotting.goal_means_plot(scores[0], out_dir / "goal_means.png")
        written.append("goal_means.png")
    if args.data:
        data = betareg.load_dataset(args.data)
        result, resid, text = fit_dataset(data, out_dir / "residuals.csv", out_dir / "residuals.png")
        (out_dir / "fit.txt").write_text(text, encoding="utf-8")
        (out_dir / "fit.json").write_text(report.render_fit(result, resid, "json"), encoding="utf-8")
        written += ["fit.txt", "fit.json", "residuals.csv", "residuals.png"]
    sys.stdout.write("".join(f"{out_dir / name}\n" for name in written))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_scoring_flags(p):
    p.add_argument("--roles", action="append", metavar="ROLES",
                   help="'all', 'he' or a comma list of sb,co,re,cp; repeatable")
    p.add_argument("--coef", metavar="B1,...,B7",
                   help=f"all seven coefficients (default: ${COEFFICIENT_ENV} file or built-in)")
    p.add_argument("--nl-policy", choices=NL_POLICIES, default="strict")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foca", description="FOCA ontology quality evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("questions", help="print the question catalog")
    p.add_argument("--type", choices=("type1", "type2"))
    p.add_argument("--goal", type=int)
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_questions)

    p = sub.add_parser("evaluate", help="interactive evaluation wizard")
    p.add_argument("-o", "--output", required=True, help="answer file to write")
    p.add_argument("--script", help="read answers from this file instead of stdin")
    p.add_argument("--ontology-id")
    p.add_argument("--type", choices=("type1", "type2"))
    p.add_argument("--lexp", type=int, choices=(0, 1))
    p.add_argument("--goal-order", help="permutation of 1,2,3,4,5")
    p.add_argument("--nl-policy", choices=NL_POLICIES, default="strict")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("score", help="total or partial quality of an answer file")
    p.add_argument("answers")
    _add_scoring_flags(p)
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("inspect", help="automated evidence from a Turtle file")
    p.add_argument("ontology")
    p.add_argument("--own-ns", action="append", required=True, metavar="IRI",
                   help="namespace of the ontology itself; repeatable")
    p.add_argument("--merge", metavar="ANSWERS", help="copy suggestions into this answer file's notes")
    p.add_argument("--merged-out", metavar="PATH")
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("fit", help="beta-regression fit of the quality model")
    p.add_argument("dataset", nargs="?")
    p.add_argument("--simulate", type=int, metavar="N", help="fit a simulated dataset of N rows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phi", type=float, default=30.0, help="precision for --simulate")
    p.add_argument("--coef", metavar="B1,...,B7", help="true coefficients for --simulate")
    p.add_argument("--save-data")
    p.add_argument("--residuals", help="write (index, residual) pairs here")
    p.add_argument("--plot", help="write a residual plot here")
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="render reports and figures into a directory")
    p.add_argument("--answers")
    p.add_argument("--data")
    p.add_argument("--out-dir", required=True)
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except NumericError as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except (ValidationError, FocaError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
