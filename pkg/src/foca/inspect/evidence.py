"""Objective evidence for the document-checkable questions (Q3, Q8, Q12, Q13).

Every suggestion is advisory: the evaluator reads the measured values and
decides the grade.  Ratios are mapped onto the rubric grades with one
coarse, monotone table (see :func:`grade_from_ratio`).
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

from ..errors import ValidationError
from .parser import IRI, RDF_TYPE, Literal, TripleDocument

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
XML = "http://www.w3.org/XML/1998/namespace"
SKOS = "http://www.w3.org/2004/02/skos/core#"
DC = "http://purl.org/dc/elements/1.1/"
DCTERMS = "http://purl.org/dc/terms/"
OBO = "http://purl.obolibrary.org/obo/"

BUILTIN_NAMESPACES = (RDF, RDFS, OWL, XSD, XML)

CLASS_TYPES = frozenset({OWL + "Class", RDFS + "Class"})
PROPERTY_TYPES = frozenset({
    RDF + "Property", OWL + "ObjectProperty", OWL + "DatatypeProperty",
    OWL + "AnnotationProperty", OWL + "FunctionalProperty",
    OWL + "InverseFunctionalProperty", OWL + "TransitiveProperty",
    OWL + "SymmetricProperty", OWL + "AsymmetricProperty",
    OWL + "ReflexiveProperty", OWL + "IrreflexiveProperty",
})
ANNOTATION_PREDICATES = frozenset({
    RDFS + "comment", SKOS + "definition", DC + "description",
    DCTERMS + "description", OBO + "IAO_0000115",
})
LABEL_PREDICATES = frozenset({RDFS + "label", SKOS + "prefLabel"})
IMPORT_PREDICATE = OWL + "imports"

THRESHOLDS = ((0.95, 100), (0.6, 75), (0.3, 50))
THRESHOLD_TEXT = ("ratio >= 0.95 -> 100, >= 0.6 -> 75, >= 0.3 -> 50, > 0 -> 25, 0 -> 0")


def grade_from_ratio(ratio: float) -> int:
    """Map a coverage/cleanliness ratio in [0, 1] to a rubric grade."""
    for bound, grade in THRESHOLDS:
        if ratio >= bound:
            return grade
    return 25 if ratio > 0 else 0


def namespace(iri: str) -> str:
    cut = max(iri.rfind("#"), iri.rfind("/"))
    return iri[:cut + 1] if cut >= 0 else iri


def local_name(iri: str) -> str:
    cut = max(iri.rfind("#"), iri.rfind("/"))
    return iri[cut + 1:]


def declared_terms(doc: TripleDocument, class_types=CLASS_TYPES,
                   property_types=PROPERTY_TYPES) -> dict[str, str]:
    """Named subjects typed as class or property, in document order."""
    terms: dict[str, str] = {}
    for t in doc.triples:
        if t.predicate.value != RDF_TYPE or not isinstance(t.subject, IRI) or not isinstance(t.object, IRI):
            continue
        if t.object.value in class_types:
            terms.setdefault(t.subject.value, "class")
        elif t.object.value in property_types:
            terms.setdefault(t.subject.value, "property")
    return terms


# --------------------------------------------------------------------------
# Q13 annotations
# --------------------------------------------------------------------------

class Coverage(NamedTuple):
    annotated: int
    total: int
    ratio: float


def _annotated(doc, annotation_predicates):
    return {t.subject.value for t in doc.triples
            if isinstance(t.subject, IRI) and t.predicate.value in annotation_predicates}


def annotation_coverage(doc: TripleDocument, class_types=CLASS_TYPES, property_types=PROPERTY_TYPES,
                        annotation_predicates=ANNOTATION_PREDICATES) -> Coverage:
    terms = declared_terms(doc, class_types, property_types)
    annotated = _annotated(doc, annotation_predicates)
    count = sum(1 for term in terms if term in annotated)
    return Coverage(count, len(terms), count / len(terms) if terms else 0.0)


def unannotated_terms(doc: TripleDocument, annotation_predicates=ANNOTATION_PREDICATES) -> list[str]:
    annotated = _annotated(doc, annotation_predicates)
    return [term for term in declared_terms(doc) if term not in annotated]


# --------------------------------------------------------------------------
# Q3 reuse
# --------------------------------------------------------------------------

class ReuseEvidence(NamedTuple):
    imports: list[str]
    foreign_term_count: int
    foreign_namespaces: list[str]

    @property
    def suggested_grade(self) -> int:
        return 100 if self.imports or self.foreign_term_count else 0


def _is_own(iri: str, own_namespaces) -> bool:
    return any(iri.startswith(ns) or iri == ns.rstrip("#/") for ns in own_namespaces)


def reuse_evidence(doc: TripleDocument, own_namespaces, builtin_namespaces=BUILTIN_NAMESPACES) -> ReuseEvidence:
    """Imports and usages of terms from vocabularies other than the ontology's own.

    Built-in vocabularies (rdf, rdfs, owl, xsd, xml) do not count as reuse.
    """
    own = [ns for ns in (own_namespaces or []) if ns]
    if not own:
        raise ValidationError("reuse evidence needs at least one own namespace")
    imports = []
    usages = Counter()
    for t in doc.triples:
        if t.predicate.value == IMPORT_PREDICATE and isinstance(t.object, IRI):
            if not _is_own(t.object.value, own):
                imports.append(t.object.value)
            continue
        for term in t:
            if not isinstance(term, IRI):
                continue
            iri = term.value
            if _is_own(iri, own) or any(iri.startswith(b) for b in builtin_namespaces):
                continue
            usages[namespace(iri)] += 1
    return ReuseEvidence(imports, sum(usages.values()), sorted(usages))


# --------------------------------------------------------------------------
# Q12 naming
# --------------------------------------------------------------------------

CONVENTIONS = ("UpperCamel", "lowerCamel", "snake_case", "UPPER_SNAKE", "kebab-case", "lowercase", "other")
_LOWER_COMPATIBLE = {"lowerCamel", "snake_case", "kebab-case", "lowercase"}


def case_convention(name: str) -> str:
    if re.fullmatch(r"[a-z][a-z0-9]*", name):
        return "lowercase"
    if re.fullmatch(r"[a-z][a-z0-9]*(?:_[a-z0-9]+)+", name):
        return "snake_case"
    if re.fullmatch(r"[A-Z][A-Z0-9]*(?:_[A-Z0-9]+)+", name):
        return "UPPER_SNAKE"
    if re.fullmatch(r"[a-z][a-z0-9]*(?:-[a-z0-9]+)+", name):
        return "kebab-case"
    if "_" in name or "-" in name:
        return "other"
    if name[:1].isupper():
        return "UpperCamel"
    if name[:1].islower():
        return "lowerCamel"
    return "other"


def _compatible(conv: str, dominant: str) -> bool:
    if conv == dominant:
        return True
    return conv == "lowercase" and dominant in _LOWER_COMPATIBLE or (
        dominant == "lowercase" and conv in _LOWER_COMPATIBLE)


def scripts(name: str) -> set[str]:
    out = set()
    for ch in name:
        if ch.isalpha():
            try:
                out.add(unicodedata.name(ch).split()[0])
            except ValueError:
                out.add("UNKNOWN")
    return out


def _segments(name: str) -> list[str]:
    return re.findall(r"[A-Z]+(?![a-z])|[A-Z]?[a-z]+|\d+|[^\W\d_]+", name)


@dataclass(frozen=True)
class NameFlag:
    term: str
    name: str
    reasons: tuple[str, ...]


@dataclass
class NamingReport:
    flagged: list[NameFlag]
    total: int
    conventions: dict[str, str]
    dominant_convention: str | None
    dominant_script: str | None
    violation_ratio: float
    suggested_grade: int
    caveat: str = ""

    @property
    def flagged_names(self) -> list[str]:
        return [f.name for f in self.flagged]


def naming_report(doc: TripleDocument, terms: dict[str, str] | None = None) -> NamingReport:
    """Flag class/property names that look abbreviated, numbered or inconsistent.

    Checks: length <= 2, a short name that is a prefix of a longer one
    (abbreviation), digits-only segments, case convention against the
    dominant one for its kind (class or property), and letters from more
    than one script. Spelling is not checked.
    """
    terms = declared_terms(doc) if terms is None else terms
    names = {}
    for iri, kind in terms.items():
        name = local_name(iri)
        if name:
            names[iri] = (name, kind)
    folded = [n.casefold() for n, _ in names.values()]
    reasons: dict[str, list[str]] = {iri: [] for iri in names}
    doc_scripts = Counter(s for n, _ in names.values() for s in scripts(n))
    dominant_script = doc_scripts.most_common(1)[0][0] if doc_scripts else None
    for iri, (name, _) in names.items():
        r = reasons[iri]
        f = name.casefold()
        if len(name) <= 2:
            r.append("too short")
        elif len(name) <= 4 and any(o != f and o.startswith(f) for o in folded):
            r.append("abbreviation")
        if any(seg.isdigit() for seg in _segments(name)):
            r.append("digits")
        sc = scripts(name)
        if len(sc) > 1:
            r.append("mixed scripts")
        elif sc and dominant_script and sc != {dominant_script}:
            r.append("other script")
    # names with other defects do not vote for the dominant convention
    conventions = {}
    for kind in ("class", "property"):
        votes = Counter(case_convention(n) for iri, (n, k) in names.items()
                        if k == kind and not reasons[iri])
        if not votes:
            votes = Counter(case_convention(n) for n, k in names.values() if k == kind)
        if votes:
            best = max(votes.values())
            conventions[kind] = next(c for c in CONVENTIONS if votes.get(c) == best)
    for iri, (name, kind) in names.items():
        dom = conventions.get(kind)
        if dom and not _compatible(case_convention(name), dom):
            reasons[iri].append(f"not {dom}")
    flagged = [NameFlag(iri, names[iri][0], tuple(reasons[iri])) for iri in names if reasons[iri]]
    kinds = Counter(k for _, k in names.values())
    dominant = conventions.get(kinds.most_common(1)[0][0]) if kinds else None
    if not names:
        return NamingReport([], 0, {}, None, None, 0.0, 0,
                            "insufficient evidence: no named classes or properties")
    ratio = len(flagged) / len(names)
    return NamingReport(flagged, len(names), conventions, dominant, dominant_script,
                        ratio, grade_from_ratio(1.0 - ratio))


# --------------------------------------------------------------------------
# Q8 redundancy
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    first: str
    second: str
    reason: str
    confidence: int
    evidence: str


def _normalize(name: str) -> str:
    return re.sub(r"[\s_\-]", "", name).casefold()


def redundancy_candidates(doc: TripleDocument, terms: dict[str, str] | None = None,
                          label_predicates=LABEL_PREDICATES) -> list[Candidate]:
    """Pairs of declared terms sharing a label literal or a normalized local name.

    Label matches (confidence 2) sort before name matches (confidence 1).
    """
    terms = declared_terms(doc) if terms is None else terms
    labels: dict[tuple, set[str]] = {}
    for t in doc.triples:
        if (isinstance(t.subject, IRI) and t.subject.value in terms
                and t.predicate.value in label_predicates and isinstance(t.object, Literal)):
            labels.setdefault((t.object.lexical, t.object.lang), set()).add(t.subject.value)
    found: dict[tuple[str, str], Candidate] = {}
    for (lexical, lang), subjects in labels.items():
        for a in sorted(subjects):
            for b in sorted(subjects):
                if a < b:
                    shown = f'"{lexical}"' + (f"@{lang}" if lang else "")
                    found[(a, b)] = Candidate(a, b, "same label", 2, shown)
    by_name: dict[str, list[str]] = {}
    for iri in terms:
        key = _normalize(local_name(iri))
        if key:
            by_name.setdefault(key, []).append(iri)
    for key, iris in by_name.items():
        for a in sorted(iris):
            for b in sorted(iris):
                if a < b and (a, b) not in found:
                    found[(a, b)] = Candidate(a, b, "same normalized name", 1, key)
    return sorted(found.values(), key=lambda c: (-c.confidence, c.first, c.second))


# --------------------------------------------------------------------------
# bundle
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EvidenceEntry:
    question: str
    measured: dict
    suggested_grade: int
    rationale: str
    advisory: bool = True


REASONER_PLACEHOLDER = {
    "Q7": "Contradictory axioms need a description-logic reasoner; run one and grade by the Q7 rubric.",
    "Q9": "Run a reasoner on the ontology and grade the errors it reports by the Q9 rubric.",
    "Q10": "Time the reasoner run yourself and grade by the Q10 rubric.",
}


@dataclass
class EvidenceReport:
    source: str
    entries: list[EvidenceEntry]
    placeholders: dict[str, str] = field(default_factory=lambda: dict(REASONER_PLACEHOLDER))
    thresholds: str = THRESHOLD_TEXT

    def suggestions(self) -> dict[str, int]:
        return {e.question: e.suggested_grade for e in self.entries}

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "advisory": True,
            "thresholds": self.thresholds,
            "entries": [
                {"question": e.question, "suggested_grade": e.suggested_grade,
                 "measured": e.measured, "rationale": e.rationale, "advisory": e.advisory}
                for e in self.entries
            ],
            "placeholders": dict(self.placeholders),
        }


def suggest_grades(doc: TripleDocument, own_namespaces) -> EvidenceReport:
    """Run the four extractors and bundle their rubric-valued suggestions."""
    terms = declared_terms(doc)
    entries = []

    reuse = reuse_evidence(doc, own_namespaces)
    if reuse.suggested_grade:
        why = (f"{len(reuse.imports)} import(s) and {reuse.foreign_term_count} usage(s) of terms "
               f"from {len(reuse.foreign_namespaces)} other vocabularies: reuse found")
    else:
        why = "no imports and no terms from other vocabularies: no reuse found"
    entries.append(EvidenceEntry("Q3", {
        "imports": reuse.imports, "foreign_term_count": reuse.foreign_term_count,
        "foreign_namespaces": reuse.foreign_namespaces}, reuse.suggested_grade,
        why + " (binary rubric: reuse -> 100, none -> 0)"))

    cands = redundancy_candidates(doc, terms)
    involved = {c.first for c in cands} | {c.second for c in cands}
    clean = 1.0 - len(involved) / len(terms) if terms else 1.0
    entries.append(EvidenceEntry("Q8", {
        "candidates": [[c.first, c.second, c.reason] for c in cands],
        "terms_involved": len(involved), "terms": len(terms), "clean_ratio": round(clean, 6)},
        grade_from_ratio(clean),
        (f"{len(cands)} lexical redundancy candidate pair(s)" if terms
         else "no declared terms, so nothing can be redundant")
        + "; lexical check only, synonyms with different names are not detected"))

    naming = naming_report(doc, terms)
    clean = 1.0 - naming.violation_ratio
    why = (naming.caveat if naming.caveat else
           f"{len(naming.flagged)} of {naming.total} names flagged; dominant convention "
           f"{naming.dominant_convention}")
    entries.append(EvidenceEntry("Q12", {
        "flagged": [[f.name, list(f.reasons)] for f in naming.flagged],
        "names": naming.total, "conventions": naming.conventions,
        "violation_ratio": round(naming.violation_ratio, 6)},
        naming.suggested_grade,
        why + "; spelling and language correctness are not checked"))

    cov = annotation_coverage(doc)
    entries.append(EvidenceEntry("Q13", {
        "annotated": cov.annotated, "total": cov.total, "ratio": round(cov.ratio, 6),
        "missing": unannotated_terms(doc)},
        grade_from_ratio(cov.ratio),
        f"{cov.annotated} of {cov.total} classes/properties carry a definition-style annotation"))
    return EvidenceReport(doc.source_name, entries)
