"""FOCA ontology evaluation: questionnaire, quality score, beta regression, evidence."""

from .questionnaire import (
    EvaluationSession,
    OntologyType,
    QuestionSpec,
    applicable_questions,
    catalog,
    classify_hint,
    derive_nl,
    grade_question,
    new_session,
    record_answer,
)
from .scoring import Coefficients, GoalMeans, QualityScore, RoleSelector, goal_means, linear_predictor, quality, total_quality

__version__ = "0.1.0"

__all__ = [
    "EvaluationSession", "OntologyType", "QuestionSpec", "applicable_questions", "catalog",
    "classify_hint", "derive_nl", "grade_question", "new_session", "record_answer",
    "Coefficients", "GoalMeans", "QualityScore", "RoleSelector", "goal_means",
    "linear_predictor", "quality", "total_quality",
]
