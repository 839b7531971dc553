from pathlib import Path

import pytest

from foca.questionnaire import new_session, record_answer

FIXTURES = Path(__file__).parent / "fixtures"

# grades of the reference worked example; Q1 and Q11 given as sub-grades
WORKED_EXAMPLE = {
    "Q1": [50, 50, 50], "Q2": 75, "Q3": 100, "Q4": 25, "Q6": 50, "Q7": 25, "Q8": 50,
    "Q9": 100, "Q10": 100, "Q11": [75, 75], "Q12": 75, "Q13": 25,
}
WORKED_TOTAL = 0.986278841
WORKED_PARTIAL_CO_RE = 0.506249674


def build_session(grades, ontology_type="type2", lexp=1, ontology_id="example"):
    s = new_session(ontology_id, ontology_type, lexp)
    for qid, value in grades.items():
        s = record_answer(s, qid, value)
    return s


@pytest.fixture
def worked_session():
    return build_session(WORKED_EXAMPLE)


@pytest.fixture
def fixtures():
    return FIXTURES
