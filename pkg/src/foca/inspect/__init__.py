"""Automated grading evidence from Turtle ontology files."""

from .evidence import (
    EvidenceEntry,
    EvidenceReport,
    NamingReport,
    annotation_coverage,
    grade_from_ratio,
    naming_report,
    redundancy_candidates,
    reuse_evidence,
    suggest_grades,
)
from .parser import IRI, BNode, Literal, Triple, TripleDocument, parse_file, parse_turtle

__all__ = [
    "IRI", "BNode", "Literal", "Triple", "TripleDocument", "parse_file", "parse_turtle",
    "EvidenceEntry", "EvidenceReport", "NamingReport", "annotation_coverage",
    "grade_from_ratio", "naming_report", "redundancy_candidates", "reuse_evidence",
    "suggest_grades",
]
