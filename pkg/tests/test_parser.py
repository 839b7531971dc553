import pytest

from foca.errors import ParseError, UnknownPrefix
from foca.inspect import IRI, BNode, Literal, parse_file, parse_turtle

from conftest import FIXTURES

TTL = sorted((FIXTURES / "ttl").glob("*.ttl"))
XSD = "http://www.w3.org/2001/XMLSchema#"


def expected_lines(ttl_path):
    nt = ttl_path.with_suffix(".nt").read_text(encoding="utf-8")
    return sorted(line for line in nt.splitlines() if line.strip())


def test_fixture_count():
    assert len(TTL) >= 15


@pytest.mark.parametrize("path", TTL, ids=lambda p: p.stem)
def test_fixture_matches_expected(path):
    doc = parse_file(path)
    assert doc.to_ntriples().splitlines() == expected_lines(path)


@pytest.mark.parametrize("path", TTL, ids=lambda p: p.stem)
def test_round_trip_fixed_point(path):
    doc = parse_file(path)
    canon = doc.to_ntriples()
    again = parse_turtle(canon)
    assert again.multiset() == doc.multiset()
    assert again.to_ntriples() == canon


def test_duplicates_kept_as_multiset():
    doc = parse_file(FIXTURES / "ttl" / "18_duplicates.ttl")
    assert len(doc) == 2 and len(doc.multiset()) == 1


def test_terms():
    doc = parse_turtle('@prefix ex: <http://e/> .\n'
                       'ex:a ex:p "chat"@FR , 3 , 2.5 , 1e3 , true , _:b1 , "x"^^ex:T .')
    objs = [t.object for t in doc.triples]
    assert objs == [
        Literal("chat", lang="fr"),
        Literal("3", datatype=XSD + "integer"),
        Literal("2.5", datatype=XSD + "decimal"),
        Literal("1e3", datatype=XSD + "double"),
        Literal("true", datatype=XSD + "boolean"),
        BNode("b1"),
        Literal("x", datatype="http://e/T"),
    ]
    assert doc.triples[0].subject == IRI("http://e/a")


def test_a_keyword():
    doc = parse_turtle("<http://e/x> a <http://e/C> .")
    assert doc.triples[0].predicate == IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")


@pytest.mark.parametrize("name,message", [
    ("collection", "unsupported construct: collections"),
    ("anon_bnode", "unsupported construct: anonymous blank nodes"),
])
def test_unsupported_constructs(name, message):
    with pytest.raises(ParseError, match=message) as info:
        parse_file(FIXTURES / "ttl_bad" / f"{name}.ttl")
    assert info.value.line >= 1 and info.value.column >= 1


def test_unknown_prefix():
    with pytest.raises(UnknownPrefix) as info:
        parse_file(FIXTURES / "ttl_bad" / "unknown_prefix.ttl")
    assert isinstance(info.value, ParseError)


@pytest.mark.parametrize("name", ["missing_dot", "unterminated", "truncated", "literal_subject"])
def test_malformed(name):
    with pytest.raises(ParseError) as info:
        parse_file(FIXTURES / "ttl_bad" / f"{name}.ttl")
    assert info.value.line >= 1


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse_turtle("<http://e/a> <http://e/p> <http://e/b> .\n<http://e/a> <http://e/p> ( <http://e/c> ) .")
    assert info.value.line == 2 and info.value.column == 27


@pytest.mark.parametrize("text", ["<http://e/a> A <http://e/b> .", "<http://e/a> <http://e/p> TRUE ."])
def test_wrong_case_keyword(text):
    with pytest.raises(ParseError):
        parse_turtle(text)


def test_empty_document():
    assert len(parse_turtle("# nothing here\n")) == 0
