"""Human-readable and JSON renderings of catalogs, scores, fits and evidence.

Renderers are pure: same input, same bytes.  Scores print with nine
decimals.
"""

from __future__ import annotations

import json
import textwrap

from .betareg import BetaRegFit, ResidualSet
from .inspect.evidence import EvidenceReport
from .questionnaire import ROLES, EvaluationSession, OntologyType, catalog, derive_nl
from .scoring import COEFFICIENT_DESCRIPTIONS, QualityScore

FORMATS = ("text", "json")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _wrap(text, indent):
    return textwrap.fill(text, width=88, initial_indent=indent, subsequent_indent=indent)


def render_catalog(ontology_type: OntologyType | None = None, goal: int | None = None,
                   fmt: str = "text") -> str:
    specs = [q for q in catalog() if goal is None or q.goal == goal]
    if fmt == "json":
        return _dumps([{
            "id": q.id, "goal": q.goal, "role": q.role, "metric": q.metric.value,
            "text": q.text, "how_to_verify": q.rubric, "sub_questions": list(q.sub_questions),
            "allowed_grades": sorted(q.allowed_grades | q.sub_grades),
            "applicable": None if ontology_type is None else q.applies_to(ontology_type),
        } for q in specs])
    lines = []
    for g in ROLES:
        block = [q for q in specs if q.goal == g]
        if not block:
            continue
        lines.append(f"Goal {g}: {ROLES[g]}")
        for q in block:
            tag = ""
            if ontology_type is not None and not q.applies_to(ontology_type):
                tag = "  [not applicable]"
            lines.append(f"  {q.id:<4} {q.text}  ({q.metric.value}){tag}")
            for i, sub in enumerate(q.sub_questions, 1):
                lines.append(_wrap(f"{q.id}.{i} {sub}", "         "))
            lines.append(_wrap("How to verify: " + q.rubric, "       "))
        lines.append("")
    return "\n".join(lines)


def _fmt_mean(value) -> str:
    return f"{float(value):.6f}"


def score_payload(session: EvaluationSession, scores: list[QualityScore], nl_policy: str) -> dict:
    return {
        "ontology_id": session.ontology_id,
        "ontology_type": session.ontology_type.value,
        "lexp": session.lexp,
        "nl": derive_nl(session, nl_policy),
        "nl_policy": nl_policy,
        "incomplete": session.incomplete,
        "unanswered": session.unanswered(),
        "goal_means": {str(g): float(v) for g, v in scores[0].means.by_goal().items()},
        "scores": [s.to_dict() for s in scores],
    }


def render_score(session: EvaluationSession, scores: list[QualityScore], nl_policy: str = "strict",
                 fmt: str = "text") -> str:
    """Score report: goal means table, selected roles, terms and the quality value."""
    if fmt == "json":
        return _dumps(score_payload(session, scores, nl_policy))
    first = scores[0]
    lines = [
        f"Ontology: {session.ontology_id}",
        f"Type:     {session.ontology_type.label}",
        f"LExp:     {session.lexp}",
        f"Nl:       {first.nl_used} (policy: {nl_policy})",
    ]
    if session.unanswered():
        lines.append(f"Unanswered: {', '.join(session.unanswered())}")
    if session.incomplete:
        lines.append("Answer file is flagged incomplete.")
    lines += ["", "Goal  Role                       Mean"]
    for g, v in first.means.by_goal().items():
        lines.append(f"{g:<5} {ROLES[g]:<26} {_fmt_mean(v)}")
    for s in scores:
        kind = "Total quality" if s.selector.is_total else "Partial quality"
        roles = ", ".join(s.selector.roles()) or "Human Expression (no goal means)"
        lines += ["", f"{kind} [{s.selector.as_flags()}]: {roles}"]
        for j, (name, value) in enumerate(s.breakdown.items()):
            lines.append(f"  {name}  {COEFFICIENT_DESCRIPTIONS[j]:<10} {value:+.9f}")
        lines.append(f"  linear predictor  {s.linear_predictor:+.9f}")
        lines.append(f"  quality           {s.value:.9f}")
        for w in s.warnings:
            lines.append(f"  warning: {w}")
    return "\n".join(lines) + "\n"


def fit_payload(fit: BetaRegFit, resid: ResidualSet | None = None) -> dict:
    out = {
        "coefficients": fit.summary_rows(),
        "phi": fit.phi_hat,
        "se_log_phi": fit.se_log_phi,
        "loglik": fit.loglik,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "gradient_norm": fit.grad_norm,
    }
    if resid is not None:
        out["residual_mean"] = resid.mean
        out["residuals"] = [[i, r] for i, r in resid.pairs()]
    return out


def render_fit(fit: BetaRegFit, resid: ResidualSet | None = None, fmt: str = "text") -> str:
    if fmt == "json":
        return _dumps(fit_payload(fit, resid))
    lines = [f"{'Coefficient':<12}{'Description':<12}{'Estimate':>14}{'Std. error':>14}{'p-value':>10}"]
    for row in fit.summary_rows():
        lines.append(f"{row['coefficient']:<12}{row['description']:<12}{row['estimate']:>14.6f}"
                     f"{row['se']:>14.6f}{row['p_value']:>10.4f}")
    lines += [
        "",
        f"precision phi   {fit.phi_hat:.6f}",
        f"log-likelihood  {fit.loglik:.6f}",
        f"iterations      {fit.iterations} ({'converged' if fit.converged else 'NOT converged'})",
    ]
    if resid is not None:
        lines.append(f"residual mean   {resid.mean:+.6f} over {len(resid.values)} observations")
    return "\n".join(lines) + "\n"


def render_residuals_csv(resid: ResidualSet) -> str:
    return "index,residual\n" + "".join(f"{i},{r!r}\n" for i, r in resid.pairs())


def render_evidence(report: EvidenceReport, fmt: str = "text") -> str:
    if fmt == "json":
        return _dumps(report.to_dict())
    lines = [f"Evidence for {report.source} (advisory, the evaluator decides the grade)", ""]
    lines.append(f"{'Question':<10}{'Suggested':>10}  Rationale")
    for e in report.entries:
        lines.append(f"{e.question:<10}{e.suggested_grade:>10}  {e.rationale}")
    lines += ["", f"Ratio to grade mapping: {report.thresholds}", ""]
    headings = {"flagged": "flagged names", "candidates": "redundancy candidates",
                "missing": "terms without a definition-style annotation"}
    for e in report.entries:
        for key, heading in headings.items():
            detail = e.measured.get(key)
            if detail:
                break
        if detail:
            lines.append(f"{e.question} {heading}:")
            for item in detail:
                lines.append("  " + (" | ".join(str(x) for x in item) if isinstance(item, list) else str(item)))
    lines.append("Not checked automatically:")
    for qid, text in report.placeholders.items():
        lines.append(f"  {qid}: {text}")
    return "\n".join(lines) + "\n"
