"""Question catalog, grading rubrics and evaluation sessions.

The catalog follows the Goal-Question-Metric layout of the FOCA methodology:
five goals (one per knowledge-representation role), thirteen questions and
six quality metrics.  A session records one evaluator's grades for one
ontology and enforces the two structural rules of the questionnaire:

* Q4 is only asked for application ontologies, Q5 only for domain/task ones.
* When the competency questions are absent (Q1 = 0), Q2 is locked at 0.

Grades are kept as :class:`fractions.Fraction` so that sub-question means
such as 175/3 stay exact until the final quality formula.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import IllegalGrade, NotApplicable, Q2Locked, SchemaError, ValidationError, WrongArity

LEAF_GRADES = frozenset({0, 25, 50, 75, 100})
SUB_GRADES = frozenset({25, 50, 75, 100})
NL_POLICIES = ("strict", "goal_empty")


class OntologyType(Enum):
    DOMAIN_OR_TASK = "type1"
    APPLICATION = "type2"

    @property
    def label(self) -> str:
        if self is OntologyType.DOMAIN_OR_TASK:
            return "Type 1 (domain or task ontology)"
        return "Type 2 (application ontology)"

    @classmethod
    def parse(cls, value) -> "OntologyType":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace(" ", "")
        aliases = {
            "type1": cls.DOMAIN_OR_TASK, "1": cls.DOMAIN_OR_TASK,
            "domain": cls.DOMAIN_OR_TASK, "task": cls.DOMAIN_OR_TASK,
            "domainortask": cls.DOMAIN_OR_TASK,
            "type2": cls.APPLICATION, "2": cls.APPLICATION,
            "application": cls.APPLICATION,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValidationError(
                f"unknown ontology type {value!r}; expected 'type1' or 'type2' "
                "(top-level ontologies are not covered)") from None


class Metric(Enum):
    COMPLETENESS = "Completeness"
    ADAPTABILITY = "Adaptability"
    CONCISENESS = "Conciseness"
    CONSISTENCY = "Consistency"
    COMPUTATIONAL_EFFICIENCY = "Computational efficiency"
    CLARITY = "Clarity"


ROLES = {
    1: "Substitute",
    2: "Ontological Commitments",
    3: "Intelligent Reasoning",
    4: "Efficient Computation",
    5: "Human Expression",
}


@dataclass(frozen=True)
class QuestionSpec:
    id: str
    goal: int
    metric: Metric
    text: str
    rubric: str
    sub_questions: tuple[str, ...] = ()
    allowed_grades: frozenset = LEAF_GRADES
    excluded_for: OntologyType | None = None

    @property
    def number(self) -> int:
        return int(self.id[1:])

    @property
    def role(self) -> str:
        return ROLES[self.goal]

    @property
    def sub_grades(self) -> frozenset:
        return SUB_GRADES if self.sub_questions else frozenset()

    def applies_to(self, ontology_type: OntologyType) -> bool:
        return self.excluded_for is not OntologyType.parse(ontology_type)


_CATALOG = (
    QuestionSpec(
        "Q1", 1, Metric.COMPLETENESS,
        "Were the competency questions defined?",
        "Check whether the documentation defines the ontology competencies. If they "
        "do not exist, the grade is 0. Otherwise grade each of the three sub-questions "
        "with 25, 50, 75 or 100; the grade is the mean of the three.",
        sub_questions=(
            "Does the document define the ontology objective? "
            "(e.g. \"This ontology models the domain of...\")",
            "Does the document define the ontology stakeholders? "
            "(e.g. \"This ontology should be used by...\")",
            "Does the document define the use scenarios? "
            "(the situations in which the ontology must be used)",
        ),
        allowed_grades=frozenset({0}),
    ),
    QuestionSpec(
        "Q2", 1, Metric.COMPLETENESS,
        "Were the competency questions answered?",
        "If Q1 was graded 0 this question cannot be evaluated and its grade is 0. "
        "Otherwise check whether the ontology answers what the competency document "
        "defines. Grades: 25, 50, 75, 100.",
        allowed_grades=SUB_GRADES,
    ),
    QuestionSpec(
        "Q3", 1, Metric.ADAPTABILITY,
        "Did the ontology reuse other ontologies?",
        "Check whether the ontology reuses other ontologies. No reuse: 0. Reuse: 100.",
        allowed_grades=frozenset({0, 100}),
    ),
    QuestionSpec(
        "Q4", 2, Metric.CONCISENESS,
        "Did the ontology impose a minimal ontological commitment?",
        "Only for Type 2 ontologies. Check that the ontology does not use much "
        "abstraction to define its concepts. Full of abstractions: 0. Otherwise "
        "25 (very specific), 50 (moderate abstraction), 75 (many abstractions), "
        "100 (full of abstractions).",
        excluded_for=OntologyType.DOMAIN_OR_TASK,
    ),
    QuestionSpec(
        "Q5", 2, Metric.CONCISENESS,
        "Did the ontology impose a maximum ontological commitment?",
        "Only for Type 1 ontologies. Check that the ontology uses primitive concepts "
        "to define the domain (thing -> living being -> human being -> person). No "
        "abstractions: 0. Otherwise 25 (very specific), 50 (moderate abstraction), "
        "75 (many abstractions), 100 (full of abstractions).",
        excluded_for=OntologyType.APPLICATION,
    ),
    QuestionSpec(
        "Q6", 2, Metric.CONSISTENCY,
        "Are the ontology properties coherent with the domain?",
        "Check that classes and properties are coherent with the modelled domain. "
        "Full of incoherences: 0. Some incoherences: 25, 50 or 75. None: 100.",
    ),
    QuestionSpec(
        "Q7", 3, Metric.CONSISTENCY,
        "Are there contradictory axioms?",
        "Check whether class and property characteristics (functional, transitive, "
        "reflexive, ...) contradict the domain. Full of contradictions: 0. Some: 25, "
        "50 or 75. None: 100.",
    ),
    QuestionSpec(
        "Q8", 3, Metric.CONCISENESS,
        "Are there redundant axioms?",
        "Check for classes or properties that model the same thing with the same "
        "meaning. Full of redundancies: 0. Some: 25, 50 or 75. None: 100.",
    ),
    QuestionSpec(
        "Q9", 4, Metric.COMPUTATIONAL_EFFICIENCY,
        "Did the reasoner bring modelling errors?",
        "Run the reasoner and record the outcome. Full of errors or the software "
        "stops responding: 0. Some errors: 25, 50 or 75. No errors: 100.",
    ),
    QuestionSpec(
        "Q10", 4, Metric.COMPUTATIONAL_EFFICIENCY,
        "Did the reasoner perform quickly?",
        "Check whether the reasoner runs quickly. Reasoner stops: 0. Some delay: 25, "
        "50 or 75. Runs quickly: 100.",
    ),
    QuestionSpec(
        "Q11", 5, Metric.CLARITY,
        "Is the documentation consistent with the modelling?",
        "Check whether documentation exists. If not, the grade is 0. Otherwise grade "
        "each of the two sub-questions with 25, 50, 75 or 100; the grade is the mean "
        "of the two.",
        sub_questions=(
            "Are the terms written in the documentation the same as in the modelling?",
            "Does the documentation explain each term and justify each modelling detail?",
        ),
        allowed_grades=frozenset({0}),
    ),
    QuestionSpec(
        "Q12", 5, Metric.CLARITY,
        "Were the concepts well written?",
        "Check that classes and properties are written in an understandable and "
        "correct form in one language. Hard to understand or full of poorly written "
        "terms: 0. Some errors or a mix of languages: 25, 50 or 75. Well written in "
        "one language: 100.",
    ),
    QuestionSpec(
        "Q13", 5, Metric.CLARITY,
        "Are there annotations in the ontology that show the definitions of the concepts?",
        "Check whether annotations carry the definitions of the modelled concepts. No "
        "annotations: 0. Some: 25, 50 or 75. All concepts annotated: 100.",
    ),
)

QUESTION_IDS = tuple(q.id for q in _CATALOG)
_BY_ID = {q.id: q for q in _CATALOG}


def catalog() -> list[QuestionSpec]:
    """Return the 13 question specs in order Q1..Q13."""
    return list(_CATALOG)


def question(qid: str) -> QuestionSpec:
    key = str(qid).strip().upper()
    if key.isdigit():
        key = f"Q{key}"
    try:
        return _BY_ID[key]
    except KeyError:
        raise ValidationError(f"unknown question id {qid!r}") from None


def goal_questions(goal: int) -> list[QuestionSpec]:
    return [q for q in _CATALOG if q.goal == goal]


def applicable_questions(ontology_type, goal_order: Sequence[int] | None = None) -> list[str]:
    """Question ids an evaluator must answer for ``ontology_type``.

    Questions are listed goal by goal; ``goal_order`` permutes the goals
    (any order of goals is permitted by the methodology).
    """
    ontology_type = OntologyType.parse(ontology_type)
    order = list(goal_order) if goal_order is not None else list(ROLES)
    if sorted(order) != list(ROLES):
        raise ValidationError(f"goal order must be a permutation of 1..5, got {order}")
    return [q.id for g in order for q in goal_questions(g) if q.applies_to(ontology_type)]


# --------------------------------------------------------------------------
# type hint
# --------------------------------------------------------------------------

_TYPE1_CUES = (
    "abstract", "primitive", "generic", "general", "knowledge area", "subject area",
    "upper", "foundational", "domain of", "task", "vocabulary of",
)
_TYPE2_CUES = (
    "speciali", "specific", "instantiat", "particular", "application", "system",
    "registration", "relations between", "for a given", "company", "university",
)

DECISION_RULE = (
    "an ontology modelling an abstraction, subject or knowledge area is Type 1; "
    "one that specializes or instantiates such a concept for a particular domain "
    "is Type 2"
)


@dataclass(frozen=True)
class TypeHint:
    suggested: OntologyType
    confidence: str
    rationale: str
    type1_cues: tuple[str, ...] = ()
    type2_cues: tuple[str, ...] = ()


def classify_hint(description: str) -> TypeHint:
    """Keyword heuristic suggesting an ontology type.

    Advisory only; the evaluator's declared type always wins.
    """
    if not description or not description.strip():
        raise ValidationError("description must be non-empty")
    text = description.lower()
    t1 = tuple(c for c in _TYPE1_CUES if c in text)
    t2 = tuple(c for c in _TYPE2_CUES if c in text)
    if len(t2) > len(t1):
        suggested, confidence = OntologyType.APPLICATION, "medium"
    elif len(t1) > len(t2):
        suggested, confidence = OntologyType.DOMAIN_OR_TASK, "medium"
    else:
        suggested, confidence = OntologyType.DOMAIN_OR_TASK, "low"
    if confidence != "low" and min(len(t1), len(t2)) == 0 and max(len(t1), len(t2)) >= 2:
        confidence = "high"
    if confidence == "low":
        why = "no decisive cue found; defaulting to Type 1 (low confidence)"
    else:
        cues = t2 if suggested is OntologyType.APPLICATION else t1
        why = f"cues {', '.join(repr(c) for c in cues)} point to {suggested.label}"
    rationale = f"{why}. Rule: {DECISION_RULE}. The evaluator's judgement is authoritative."
    return TypeHint(suggested, confidence, rationale, t1, t2)


# --------------------------------------------------------------------------
# grading
# --------------------------------------------------------------------------

def _as_grade(value, allowed, qid) -> int:
    if isinstance(value, bool):
        raise IllegalGrade(f"{qid}: grade must be a number, got {value!r}")
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, Fraction) and value.denominator == 1:
        value = int(value)
    if not isinstance(value, int) or value not in allowed:
        raise IllegalGrade(f"{qid}: grade {value!r} not in {sorted(allowed)}")
    return value


def grade_question(spec: QuestionSpec, value) -> Fraction:
    """Grade one question from a leaf grade or a list of sub-grades.

    Q1 and Q11 take a list of 3 (resp. 2) sub-grades in {25, 50, 75, 100},
    averaged; a bare 0 means the competencies (documentation) are absent.

    >>> grade_question(question("Q1"), [25, 50, 100])
    Fraction(175, 3)
    """
    if isinstance(value, (list, tuple)):
        if not spec.sub_questions:
            raise WrongArity(f"{spec.id} has no sub-questions; give a single grade")
        if len(value) != len(spec.sub_questions):
            raise WrongArity(
                f"{spec.id} needs {len(spec.sub_questions)} sub-grades, got {len(value)}")
        subs = [_as_grade(v, spec.sub_grades, spec.id) for v in value]
        return Fraction(sum(subs), len(subs))
    return Fraction(_as_grade(value, spec.allowed_grades, spec.id))


# --------------------------------------------------------------------------
# sessions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Answer:
    grade: Fraction
    subs: tuple[int, ...] | None = None
    forced: bool = False

    def to_json(self) -> dict:
        if self.subs is not None:
            return {"subs": list(self.subs)}
        return {"grade": int(self.grade)}


@dataclass(frozen=True)
class EvaluationSession:
    ontology_id: str
    ontology_type: OntologyType
    lexp: int = 0
    answers: Mapping[str, Answer] = field(default_factory=dict)
    notes: Mapping[str, str] = field(default_factory=dict)
    incomplete: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ontology_type", OntologyType.parse(self.ontology_type))
        if self.lexp not in (0, 1) or isinstance(self.lexp, bool):
            raise ValidationError(f"lexp must be 0 or 1, got {self.lexp!r}")

    def grade(self, qid: str) -> Fraction | None:
        a = self.answers.get(qid)
        return None if a is None else a.grade

    @property
    def q2_locked(self) -> bool:
        q1 = self.answers.get("Q1")
        return q1 is not None and q1.grade == 0

    def unanswered(self) -> list[str]:
        return [q for q in applicable_questions(self.ontology_type) if q not in self.answers]


def new_session(ontology_id: str, ontology_type, lexp: int = 0) -> EvaluationSession:
    return EvaluationSession(ontology_id, OntologyType.parse(ontology_type), lexp)


def record_answer(session: EvaluationSession, qid: str, value) -> EvaluationSession:
    """Return a copy of ``session`` with ``qid`` graded.

    Grading Q1 with 0 forces Q2 to 0 and locks it. Re-grading Q1 above 0
    releases a forced Q2.
    """
    spec = question(qid)
    if not spec.applies_to(session.ontology_type):
        raise NotApplicable(
            f"{spec.id} is not applicable to {session.ontology_type.label}")
    answers = dict(session.answers)
    if spec.id == "Q2" and session.q2_locked:
        if value != 0 or isinstance(value, (list, tuple, bool)):
            raise Q2Locked("Q2 is locked at 0 because Q1 = 0 (competencies not defined)")
        return session
    grade = grade_question(spec, value)
    subs = tuple(int(v) for v in value) if isinstance(value, (list, tuple)) else None
    answers[spec.id] = Answer(grade, subs)
    if spec.id == "Q1":
        if grade == 0:
            answers["Q2"] = Answer(Fraction(0), forced=True)
        elif "Q2" in answers and answers["Q2"].forced:
            del answers["Q2"]
    return replace(session, answers=answers)


def clear_answer(session: EvaluationSession, qid: str) -> EvaluationSession:
    spec = question(qid)
    if spec.id == "Q2" and session.q2_locked:
        raise Q2Locked("Q2 is locked at 0 because Q1 = 0")
    answers = {k: v for k, v in session.answers.items() if k != spec.id}
    if spec.id == "Q1" and "Q2" in answers and answers["Q2"].forced:
        del answers["Q2"]
    return replace(session, answers=answers)


def derive_nl(session: EvaluationSession, policy: str = "strict") -> int:
    """Nullity flag: 1 when some goal could not be fully answered.

    ``strict`` sets it for any unanswered applicable question;
    ``goal_empty`` only when a whole goal has no answer.
    """
    if policy not in NL_POLICIES:
        raise ValidationError(f"nl_policy must be one of {NL_POLICIES}, got {policy!r}")
    applicable = set(applicable_questions(session.ontology_type))
    for goal in ROLES:
        qids = [q.id for q in goal_questions(goal) if q.id in applicable]
        answered = [q for q in qids if q in session.answers]
        if policy == "strict" and len(answered) < len(qids):
            return 1
        if policy == "goal_empty" and not answered:
            return 1
    return 0


# --------------------------------------------------------------------------
# answer files
# --------------------------------------------------------------------------

_TOP_KEYS = {"ontology_id", "ontology_type", "lexp", "answers", "notes", "incomplete"}
_REQUIRED = {"ontology_id", "ontology_type", "lexp", "answers"}


def session_to_dict(session: EvaluationSession) -> dict:
    data = {
        "ontology_id": session.ontology_id,
        "ontology_type": session.ontology_type.value,
        "lexp": session.lexp,
        "answers": {q: session.answers[q].to_json() for q in QUESTION_IDS if q in session.answers},
        "notes": {q: session.notes[q] for q in QUESTION_IDS if q in session.notes},
    }
    if session.incomplete:
        data["incomplete"] = True
    return data


def session_from_dict(data: Mapping) -> EvaluationSession:
    if not isinstance(data, Mapping):
        raise SchemaError("answer file must hold a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown keys in answer file: {sorted(unknown)}")
    missing = _REQUIRED - set(data)
    if missing:
        raise SchemaError(f"missing keys in answer file: {sorted(missing)}")
    if data["ontology_type"] not in ("type1", "type2"):
        raise SchemaError(f"ontology_type must be 'type1' or 'type2', got {data['ontology_type']!r}")
    if data["lexp"] not in (0, 1) or isinstance(data["lexp"], bool):
        raise SchemaError(f"lexp must be 0 or 1, got {data['lexp']!r}")
    answers = data["answers"]
    notes = data.get("notes", {})
    if not isinstance(answers, Mapping) or not isinstance(notes, Mapping):
        raise SchemaError("'answers' and 'notes' must be objects")
    session = new_session(str(data["ontology_id"]), data["ontology_type"], data["lexp"])
    entries = {}
    for qid, entry in answers.items():
        if qid not in _BY_ID:
            raise SchemaError(f"unknown question id {qid!r}")
        if not isinstance(entry, Mapping) or len(entry) != 1 or not set(entry) <= {"subs", "grade"}:
            raise SchemaError(f"{qid}: answer must be {{\"grade\": n}} or {{\"subs\": [...]}}")
        entries[qid] = entry["subs"] if "subs" in entry else entry["grade"]
        if "subs" in entry and not isinstance(entry["subs"], list):
            raise SchemaError(f"{qid}: 'subs' must be a list")
    for qid in sorted(entries, key=lambda q: _BY_ID[q].number):
        try:
            session = record_answer(session, qid, entries[qid])
        except ValidationError as exc:
            raise SchemaError(f"{qid}: {exc}") from exc
    for qid, text in notes.items():
        if qid not in _BY_ID or not isinstance(text, str):
            raise SchemaError(f"notes must map question ids to text, bad entry {qid!r}")
    incomplete = data.get("incomplete", False)
    if not isinstance(incomplete, bool):
        raise SchemaError("'incomplete' must be a boolean")
    return replace(session, notes=dict(notes), incomplete=incomplete)


def load_session(path) -> EvaluationSession:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return session_from_dict(data)


def dump_session(session: EvaluationSession, path=None) -> str:
    text = json.dumps(session_to_dict(session), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def parse_grade_input(text: str, spec: QuestionSpec):
    """Turn wizard input into a value accepted by :func:`grade_question`.

    Returns None for ``skip``. Sub-question lists are typed as
    ``50 75 100`` or ``50,75,100``.
    """
    text = text.strip().lower()
    if text in ("skip", "s", "-"):
        return None
    parts = [p for p in re.split(r"[\s,;]+", text) if p]
    if not parts or not all(re.fullmatch(r"\d+", p) for p in parts):
        raise IllegalGrade(f"{spec.id}: could not read {text!r} as a grade")
    values = [int(p) for p in parts]
    if len(values) == 1:
        return values[0]
    return values


def iter_goal_blocks(ontology_type, goal_order=None) -> Iterable[tuple[int, list[QuestionSpec]]]:
    applicable = set(applicable_questions(ontology_type))
    for g in goal_order or list(ROLES):
        yield g, [q for q in goal_questions(g) if q.id in applicable]
