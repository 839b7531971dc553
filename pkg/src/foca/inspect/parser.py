"""A small Turtle reader.

Supported: ``@prefix``/``PREFIX`` and ``@base``/``BASE`` directives, full
IRIs, prefixed names, the ``a`` keyword, quoted literals (short and long
forms) with language tags or datatypes, numeric and boolean literals,
``;`` and ``,`` lists, blank-node labels and ``#`` comments.

Collections ``( ... )`` and anonymous blank nodes ``[ ... ]`` are rejected
with a :class:`~foca.errors.ParseError`.
"""

from __future__ import annotations

import bisect
import re
from collections import Counter
from dataclasses import dataclass, field
from urllib.parse import urljoin

from ..errors import ParseError, UnknownPrefix

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
XSD = "http://www.w3.org/2001/XMLSchema#"


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def n3(self) -> str:
        return "<" + _escape_iri(self.value) + ">"


@dataclass(frozen=True, order=True)
class BNode:
    id: str

    def n3(self) -> str:
        return "_:" + self.id


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    lang: str | None = None
    datatype: str | None = None

    def n3(self) -> str:
        out = '"' + _escape_string(self.lexical) + '"'
        if self.lang:
            out += "@" + self.lang
        elif self.datatype:
            out += "^^<" + _escape_iri(self.datatype) + ">"
        return out


Term = IRI | BNode | Literal


@dataclass(frozen=True)
class Triple:
    subject: IRI | BNode
    predicate: IRI
    object: Term

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))


@dataclass
class TripleDocument:
    prefixes: dict[str, str] = field(default_factory=dict)
    triples: list[Triple] = field(default_factory=list)
    source_name: str = "<string>"

    def __len__(self):
        return len(self.triples)

    def multiset(self) -> Counter:
        return Counter(self.triples)

    def objects(self, subject, predicate) -> list[Term]:
        return [t.object for t in self.triples if t.subject == subject and t.predicate == predicate]

    def to_ntriples(self) -> str:
        """Canonical N-Triples-style text: one sorted line per triple."""
        lines = sorted(t.n3() for t in self.triples)
        return "".join(line + "\n" for line in lines)


def _escape_string(s: str) -> str:
    return (s.replace("\\", "\\\\").replace('"', '\\"')
             .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t"))


def _escape_iri(s: str) -> str:
    return "".join(ch if ch > " " and ch not in '<>"{}|^`\\' else f"\\u{ord(ch):04X}" for ch in s)


# --------------------------------------------------------------------------
# tokenizer
# --------------------------------------------------------------------------

_PN_CHARS_BASE = r"A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD"
_PN_CHARS_U = _PN_CHARS_BASE + "_"
_PN_CHARS = _PN_CHARS_U + r"\-0-9\u00B7\u0300-\u036F\u203F-\u2040"
_PREFIX = rf"(?:[{_PN_CHARS_BASE}](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?)?"
_LOCAL_ESC = r"\\[_~.\-!$&'()*+,;=/?#@%]"
_PLX = rf"(?:%[0-9A-Fa-f]{{2}}|{_LOCAL_ESC})"
_LOCAL = (rf"(?:(?:[{_PN_CHARS_U}:0-9]|{_PLX})"
          rf"(?:(?:[{_PN_CHARS}.:]|{_PLX})*(?:[{_PN_CHARS}:]|{_PLX}))?)")

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("IRIREF", r"<(?:[^<>\"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>"),
    ("STRING_LONG", r'"""(?:[^"\\]|\\.|"(?!""))*"""|\'\'\'(?:[^\'\\]|\\.|\'(?!\'\'))*\'\'\''),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"|\'(?:[^\'\\\n\r]|\\.)*\''),
    ("DIRECTIVE", r"@(?:prefix|base)\b"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("BNODE", rf"_:[{_PN_CHARS_U}0-9](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?"),
    ("DOUBLE", r"[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+)"),
    ("DECIMAL", r"[+-]?[0-9]*\.[0-9]+"),
    ("INTEGER", r"[+-]?[0-9]+"),
    ("PNAME", rf"{_PREFIX}:{_LOCAL}?"),
    ("KEYWORD", r"(?:PREFIX|BASE|a|true|false)(?![\w:\-])"),
    ("PUNCT", r"[.;,]"),
    ("UNSUPPORTED", r"[()\[\]]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC), re.IGNORECASE)
# PREFIX/BASE are case-insensitive; a, true and false are not
_CASE_SENSITIVE_KEYWORDS = {"a", "true", "false"}

_UNSUPPORTED_MESSAGE = {
    "(": "unsupported construct: collections '( ... )' are not part of the supported Turtle subset",
    ")": "unsupported construct: collections '( ... )' are not part of the supported Turtle subset",
    "[": "unsupported construct: anonymous blank nodes '[ ... ]' are not part of the supported Turtle subset",
    "]": "unsupported construct: anonymous blank nodes '[ ... ]' are not part of the supported Turtle subset",
}

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    line_starts = [0] + [m.end() for m in re.finditer(r"\n", text)]

    def where(pos):
        ln = bisect.bisect_right(line_starts, pos) - 1
        return ln + 1, pos - line_starts[ln] + 1

    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = where(pos)
            raise ParseError("unexpected character", line, col, text[pos:pos + 12].split(None, 1)[0])
        kind = m.lastgroup
        value = m.group()
        if kind == "KEYWORD" and value not in _CASE_SENSITIVE_KEYWORDS and value.upper() not in ("PREFIX", "BASE"):
            line, col = where(pos)
            raise ParseError("unexpected bare word", line, col, value)
        if kind == "DIRECTIVE" and value != value.lower():
            kind = "LANGTAG"
        line, col = where(pos)
        if kind == "UNSUPPORTED":
            raise ParseError(_UNSUPPORTED_MESSAGE[value], line, col, value)
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, value, line, col))
        pos = m.end()
    return tokens


def _unescape_string(body: str, tok: Token) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1:i + 2]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt in ("u", "U"):
            width = 4 if nxt == "u" else 8
            digits = body[i + 2:i + 2 + width]
            if len(digits) != width or not all(c in "0123456789abcdefABCDEF" for c in digits):
                raise ParseError("bad unicode escape in string", tok.line, tok.column, tok.text[:20])
            out.append(chr(int(digits, 16)))
            i += 2 + width
        else:
            raise ParseError(f"bad escape '\\{nxt}' in string", tok.line, tok.column, tok.text[:20])
    return "".join(out)


def _unescape_iri(body: str) -> str:
    return re.sub(r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})",
                  lambda m: chr(int(m.group(1) or m.group(2), 16)), body)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens, source_name):
        self.tokens = tokens
        self.i = 0
        self.doc = TripleDocument(source_name=source_name)
        self.base = None

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self, expected=None):
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise ParseError(f"unexpected end of input{'; expected ' + expected if expected else ''}",
                             last.line if last else 1, last.column if last else 1)
        self.i += 1
        return tok

    def fail(self, tok, message):
        raise ParseError(message, tok.line, tok.column, tok.text)

    def expect_dot(self):
        tok = self.next("'.'")
        if tok.text != ".":
            self.fail(tok, "expected '.'")

    def parse(self):
        while self.peek() is not None:
            tok = self.peek()
            low = tok.text.lower()
            if tok.kind == "DIRECTIVE" or (tok.kind == "KEYWORD" and low in ("prefix", "base")):
                self.directive()
            else:
                self.triples()
                self.expect_dot()
        return self.doc

    def directive(self):
        tok = self.next()
        turtle_style = tok.kind == "DIRECTIVE"
        if tok.text.lower().endswith("prefix"):
            name = self.next("prefix name")
            if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
                self.fail(name, "expected a prefix name such as 'ex:'")
            iri = self.next("IRI")
            if iri.kind != "IRIREF":
                self.fail(iri, "expected <IRI> after prefix name")
            self.doc.prefixes[name.text[:-1]] = self.resolve(_unescape_iri(iri.text[1:-1]))
        else:
            iri = self.next("IRI")
            if iri.kind != "IRIREF":
                self.fail(iri, "expected <IRI> after base")
            self.base = self.resolve(_unescape_iri(iri.text[1:-1]))
        if turtle_style:
            self.expect_dot()

    def resolve(self, iri):
        if self.base and not re.match(r"[A-Za-z][A-Za-z0-9+.\-]*:", iri):
            return urljoin(self.base, iri)
        return iri

    def iri(self, tok):
        if tok.kind == "IRIREF":
            return IRI(self.resolve(_unescape_iri(tok.text[1:-1])))
        if tok.kind == "PNAME":
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.doc.prefixes:
                raise UnknownPrefix(tok.text, tok.line, tok.column)
            local = re.sub(_LOCAL_ESC, lambda m: m.group()[1:], local)
            return IRI(self.doc.prefixes[prefix] + local)
        return None

    def subject(self):
        tok = self.next("subject")
        if tok.kind == "BNODE":
            return BNode(tok.text[2:])
        term = self.iri(tok)
        if term is None:
            self.fail(tok, "expected a subject (IRI, prefixed name or blank node)")
        return term

    def predicate(self):
        tok = self.next("predicate")
        if tok.kind == "KEYWORD" and tok.text == "a":
            return IRI(RDF_TYPE)
        term = self.iri(tok)
        if term is None:
            self.fail(tok, "expected a predicate (IRI, prefixed name or 'a')")
        return term

    def object(self):
        tok = self.next("object")
        if tok.kind == "BNODE":
            return BNode(tok.text[2:])
        if tok.kind in ("STRING", "STRING_LONG"):
            quote = 3 if tok.kind == "STRING_LONG" else 1
            lexical = _unescape_string(tok.text[quote:-quote], tok)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "LANGTAG":
                self.i += 1
                return Literal(lexical, lang=nxt.text[1:].lower())
            if nxt is not None and nxt.kind == "DTYPE":
                self.i += 1
                dt_tok = self.next("datatype IRI")
                dt = self.iri(dt_tok)
                if dt is None:
                    self.fail(dt_tok, "expected a datatype IRI after '^^'")
                return Literal(lexical, datatype=dt.value)
            return Literal(lexical)
        if tok.kind in ("INTEGER", "DECIMAL", "DOUBLE"):
            return Literal(tok.text, datatype=XSD + tok.kind.lower())
        if tok.kind == "KEYWORD" and tok.text in ("true", "false"):
            return Literal(tok.text, datatype=XSD + "boolean")
        term = self.iri(tok)
        if term is None:
            self.fail(tok, "expected an object (IRI, prefixed name, blank node or literal)")
        return term

    def triples(self):
        subj = self.subject()
        while True:
            pred = self.predicate()
            while True:
                self.doc.triples.append(Triple(subj, pred, self.object()))
                tok = self.peek()
                if tok is not None and tok.text == ",":
                    self.i += 1
                    continue
                break
            # one or more ';' may end the list before '.'
            saw_semicolon = False
            while self.peek() is not None and self.peek().text == ";":
                self.i += 1
                saw_semicolon = True
            tok = self.peek()
            if not saw_semicolon or tok is None or tok.text == ".":
                return


def parse_turtle(text: str, source_name: str = "<string>") -> TripleDocument:
    """Parse Turtle-subset ``text`` into a :class:`TripleDocument`."""
    if text.startswith("\ufeff"):
        text = text[1:]
    return _Parser(tokenize(text), source_name).parse()


def parse_file(path) -> TripleDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_turtle(fh.read(), str(path))
