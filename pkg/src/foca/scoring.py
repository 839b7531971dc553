"""Goal means and the logistic quality score.

The score is the mean of a beta-regression model with logit link::

    eta = b1 + b2*cov_s*sb + b3*cov_c*co + b4*cov_r*re + b5*cov_cp*cp + b6*lexp + b7*nl
    quality = exp(eta) / (1 + exp(eta))

``cov_*`` are goal means on the 0-100 grade scale, ``sb/co/re/cp`` select
which roles take part (all ones for total quality) and ``nl`` flags goals the
evaluator could not answer completely.  Human Expression (goal 5) has no
coefficient: its mean is reported but never enters the score.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .errors import ValidationError
from .questionnaire import ROLES, EvaluationSession, applicable_questions, derive_nl, goal_questions

COEFFICIENT_NAMES = ("b1", "b2", "b3", "b4", "b5", "b6", "b7")
COEFFICIENT_DESCRIPTIONS = ("Const", "Cov x Sb", "Cov x Co", "Cov x Re", "Cov x Cp", "LExp", "Nl")
# the printed coefficient listing shows b7 as -25 against "Cov x Nl"; -2.5 is used
PUBLISHED_TABLE_B7 = -25.0
PUBLISHED_P_VALUES = (0.0000, 0.0001, 0.0000, 0.0000, 0.0013, 0.0549, 0.0005)

ROLE_KEYS = ("sb", "co", "re", "cp")
_ROLE_ALIASES = {
    "sb": "sb", "substitute": "sb", "s": "sb", "1": "sb",
    "co": "co", "c": "co", "ontologicalcommitments": "co", "commitments": "co", "2": "co",
    "re": "re", "r": "re", "intelligentreasoning": "re", "reasoning": "re", "3": "re",
    "cp": "cp", "efficientcomputation": "cp", "computation": "cp", "4": "cp",
}


@dataclass(frozen=True)
class Coefficients:
    b1: float = -0.44
    b2: float = 0.03
    b3: float = 0.02
    b4: float = 0.01
    b5: float = 0.02
    b6: float = -0.66
    b7: float = -2.5

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, n) for n in COEFFICIENT_NAMES)

    @classmethod
    def from_sequence(cls, values) -> "Coefficients":
        values = [float(v) for v in values]
        if len(values) != 7:
            raise ValidationError(f"coefficient overrides need all 7 values, got {len(values)}")
        return cls(*values)


DEFAULT_COEFFICIENTS = Coefficients()


@dataclass(frozen=True)
class RoleSelector:
    sb: int = 1
    co: int = 1
    re: int = 1
    cp: int = 1

    def __post_init__(self):
        for k in ROLE_KEYS:
            if getattr(self, k) not in (0, 1):
                raise ValidationError(f"selector {k} must be 0 or 1")

    @property
    def is_total(self) -> bool:
        return all(getattr(self, k) == 1 for k in ROLE_KEYS)

    @property
    def is_human_expression(self) -> bool:
        return all(getattr(self, k) == 0 for k in ROLE_KEYS)

    def roles(self) -> list[str]:
        return [ROLES[i + 1] for i, k in enumerate(ROLE_KEYS) if getattr(self, k)]

    def as_flags(self) -> str:
        on = [k for k in ROLE_KEYS if getattr(self, k)]
        return ",".join(on) if on else "he"

    @classmethod
    def parse(cls, text: str) -> "RoleSelector":
        """Parse ``all``, ``he`` (human expression only) or a list like ``sb,cp``."""
        key = text.strip().lower()
        if key in ("all", "total"):
            return cls()
        if key in ("he", "human", "humanexpression", "none"):
            return cls(0, 0, 0, 0)
        flags = dict.fromkeys(ROLE_KEYS, 0)
        for part in key.split(","):
            part = part.strip().replace(" ", "").replace("_", "")
            if part not in _ROLE_ALIASES:
                raise ValidationError(f"unknown role {part!r}; use sb, co, re, cp, he or all")
            flags[_ROLE_ALIASES[part]] = 1
        return cls(**flags)


TOTAL = RoleSelector()


@dataclass(frozen=True)
class GoalMeans:
    cov_s: Fraction
    cov_c: Fraction
    cov_r: Fraction
    cov_cp: Fraction
    cov_h: Fraction

    def by_goal(self) -> dict[int, Fraction]:
        return dict(zip(ROLES, (self.cov_s, self.cov_c, self.cov_r, self.cov_cp, self.cov_h)))


def goal_means(session: EvaluationSession) -> GoalMeans:
    """Per-goal means over answered applicable questions; empty goals give 0."""
    applicable = set(applicable_questions(session.ontology_type))
    means = []
    for goal in ROLES:
        grades = [session.answers[q.id].grade for q in goal_questions(goal)
                  if q.id in applicable and q.id in session.answers]
        means.append(sum(grades, Fraction(0)) / len(grades) if grades else Fraction(0))
    return GoalMeans(*means)


def _terms(m: GoalMeans, sel: RoleSelector, lexp: int, nl: int, c: Coefficients) -> dict[str, float]:
    # "+ 0.0" folds -0.0 from zeroed terms into 0.0 for printing
    return {k: v + 0.0 for k, v in {
        "b1": c.b1,
        "b2": c.b2 * float(m.cov_s) * sel.sb,
        "b3": c.b3 * float(m.cov_c) * sel.co,
        "b4": c.b4 * float(m.cov_r) * sel.re,
        "b5": c.b5 * float(m.cov_cp) * sel.cp,
        "b6": c.b6 * lexp,
        "b7": c.b7 * nl,
    }.items()}


def linear_predictor(m: GoalMeans, sel: RoleSelector, lexp: int, nl: int,
                     c: Coefficients = DEFAULT_COEFFICIENTS) -> float:
    return math.fsum(_terms(m, sel, lexp, nl, c).values())


def logistic(eta: float) -> float:
    if eta >= 0:
        return 1.0 / (1.0 + math.exp(-eta))
    z = math.exp(eta)
    return z / (1.0 + z)


@dataclass(frozen=True)
class QualityScore:
    value: float
    linear_predictor: float
    breakdown: dict
    nl_used: int
    lexp: int
    selector: RoleSelector
    means: GoalMeans
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "value": round(self.value, 9),
            "linear_predictor": self.linear_predictor,
            "breakdown": dict(self.breakdown),
            "nl": self.nl_used,
            "lexp": self.lexp,
            "selector": asdict(self.selector),
            "roles": self.selector.roles(),
            "goal_means": {str(g): float(v) for g, v in self.means.by_goal().items()},
            "warnings": list(self.warnings),
        }


def score_from_means(m: GoalMeans, sel: RoleSelector, lexp: int, nl: int,
                     c: Coefficients = DEFAULT_COEFFICIENTS) -> QualityScore:
    terms = _terms(m, sel, lexp, nl, c)
    eta = math.fsum(terms.values())
    warnings = []
    if sel.is_human_expression:
        warnings.append("human-expression partial quality uses no goal means; "
                        "the score depends only on LExp and Nl")
    return QualityScore(logistic(eta), eta, terms, nl, lexp, sel, m, tuple(warnings))


def quality(session: EvaluationSession, sel: RoleSelector = TOTAL,
            c: Coefficients = DEFAULT_COEFFICIENTS, nl_policy: str = "strict") -> QualityScore:
    """Total or partial quality of one evaluation session."""
    nl = derive_nl(session, nl_policy)
    return score_from_means(goal_means(session), sel, session.lexp, nl, c)


def total_quality(session: EvaluationSession, c: Coefficients = DEFAULT_COEFFICIENTS,
                  nl_policy: str = "strict") -> QualityScore:
    return quality(session, TOTAL, c, nl_policy)
