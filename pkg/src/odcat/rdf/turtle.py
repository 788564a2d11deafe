"""Hand-rolled Turtle and N-Triples parsers.

Supported Turtle subset: @prefix/@base (and SPARQL-style PREFIX/BASE), IRIs,
prefixed names, 'a', quoted/language-tagged/typed literals plus numeric and
boolean shorthand, blank node labels and [...] property lists, ';' and ','
lists. Collections '( ... )' are rejected with a clear error.
"""

from __future__ import annotations

from .terms import (
    IRI,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Literal,
    Term,
    Triple,
)

import re
from urllib.parse import urljoin


class ParseError(ValueError):
    """Syntax error with source location."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnresolvedPrefixError(ParseError):
    """A prefixed name uses a prefix that was never declared."""


_PN_LOCAL_EXTRA = set("_-.%:")
_ECHAR = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")
_LANGTAG_RE = re.compile(r"[a-zA-Z]+(-[a-zA-Z0-9]+)*")
_INTEGER_RE = re.compile(r"[+-]?[0-9]+")
_DECIMAL_RE = re.compile(r"[+-]?[0-9]*\.[0-9]+")
_DOUBLE_RE = re.compile(
    r"[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.?[0-9]+[eE][+-]?[0-9]+)"
)


def parse_turtle(text: str, base_iri: str = "") -> list[Triple]:
    """Parse a Turtle document into a list of triples (document order)."""
    return _TurtleParser(text, base_iri).parse()


def parse_ntriples(text: str) -> list[Triple]:
    """Parse an N-Triples document (strict line-based syntax)."""
    triples: list[Triple] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parser = _TurtleParser(line, base_iri="", line_offset=lineno, ntriples=True)
        triples.extend(parser.parse_ntriples_line())
    return triples


class _TurtleParser:
    def __init__(self, text: str, base_iri: str, line_offset: int = 1, ntriples: bool = False):
        self.text = text
        self.pos = 0
        self.line = line_offset
        self.col = 1
        self.base = base_iri
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []
        self.ntriples = ntriples
        self._anon = 0
        self._anon_prefix = self._fresh_anon_prefix(text)

    @staticmethod
    def _fresh_anon_prefix(text: str) -> str:
        prefix = "genid-"
        k = 2
        while "_:" + prefix in text:
            prefix = f"genid{k}-"
            k += 1
        return prefix

    # -- scanning ------------------------------------------------------

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.text[i] if i < len(self.text) else ""

    def advance(self, n: int = 1) -> str:
        chunk = self.text[self.pos : self.pos + n]
        for c in chunk:
            if c == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n
        return chunk

    def skip_ws(self, comments: bool = True) -> None:
        while not self.at_end():
            c = self.peek()
            if c in " \t\r\n":
                self.advance()
            elif comments and c == "#":
                while not self.at_end() and self.peek() != "\n":
                    self.advance()
            else:
                return

    def expect(self, token: str) -> None:
        if self.text.startswith(token, self.pos):
            self.advance(len(token))
        else:
            raise self.error(f"expected {token!r}")

    # -- top level -----------------------------------------------------

    def parse(self) -> list[Triple]:
        while True:
            self.skip_ws()
            if self.at_end():
                return self.triples
            if self._try_directive():
                continue
            self._parse_triples_statement()

    def _try_directive(self) -> bool:
        if self.peek() == "@":
            word = self._peek_word()
            if word == "@prefix":
                self.advance(len("@prefix"))
                self._parse_prefix(sparql_form=False)
                return True
            if word == "@base":
                self.advance(len("@base"))
                self._parse_base(sparql_form=False)
                return True
            raise self.error(f"unknown directive {word!r}")
        lowered = self.text[self.pos : self.pos + 7].lower()
        if lowered.startswith("prefix") and lowered[6:7] in (" ", "\t", "\r", "\n"):
            self.advance(6)
            self._parse_prefix(sparql_form=True)
            return True
        if lowered.startswith("base") and lowered[4:5] in (" ", "\t"):
            self.advance(4)
            self._parse_base(sparql_form=True)
            return True
        return False

    def _peek_word(self) -> str:
        m = re.match(r"@?[A-Za-z]+", self.text[self.pos :])
        return m.group(0) if m else ""

    def _parse_prefix(self, sparql_form: bool) -> None:
        self.skip_ws()
        label = self._scan_pname_ns()
        self.skip_ws()
        iri = self._scan_iriref()
        self.prefixes[label] = iri
        if not sparql_form:
            self.skip_ws()
            self.expect(".")

    def _parse_base(self, sparql_form: bool) -> None:
        self.skip_ws()
        self.base = self._scan_iriref()
        if not sparql_form:
            self.skip_ws()
            self.expect(".")

    def _scan_pname_ns(self) -> str:
        start = self.pos
        while not self.at_end() and self.peek() != ":" and self.peek() not in " \t\r\n<":
            self.advance()
        label = self.text[start : self.pos]
        self.expect(":")
        return label

    def _parse_triples_statement(self) -> None:
        if self.peek() == "[":
            subject = self._parse_blank_node_property_list()
            self.skip_ws()
            if self.peek() != ".":
                self._parse_predicate_object_list(subject)
        else:
            subject = self._parse_subject()
            self.skip_ws()
            self._parse_predicate_object_list(subject)
        self.skip_ws()
        self.expect(".")

    def _parse_predicate_object_list(self, subject: Term) -> None:
        while True:
            self.skip_ws()
            predicate = self._parse_verb()
            while True:
                self.skip_ws()
                obj = self._parse_object()
                self.triples.append((subject, predicate, obj))
                self.skip_ws()
                if self.peek() == ",":
                    self.advance()
                    continue
                break
            if self.peek() == ";":
                self.advance()
                self.skip_ws()
                # trailing ';' before '.' or ']' is legal
                if self.peek() in (".", "]") or self.at_end():
                    return
                continue
            return

    def _parse_verb(self) -> IRI:
        nxt = self.peek(1)
        if self.peek() == "a" and not (nxt.isalnum() or nxt in "_-.:"):
            self.advance()
            return IRI(RDF_TYPE)
        return self._parse_iri()

    def _parse_subject(self) -> Term:
        c = self.peek()
        if c == "(":
            raise self.error("collections '( ... )' are not supported")
        if c == "_":
            return self._parse_blank_label()
        if c == "[":
            return self._parse_blank_node_property_list()
        return self._parse_iri()

    def _parse_object(self) -> Term:
        c = self.peek()
        if c == "(":
            raise self.error("collections '( ... )' are not supported")
        if c == "_":
            return self._parse_blank_label()
        if c == "[":
            return self._parse_blank_node_property_list()
        if c in "\"'":
            return self._parse_rdf_literal()
        if c.isdigit() or c in "+-" or (c == "." and self.peek(1).isdigit()):
            lit = self._try_numeric_literal()
            if lit is not None:
                return lit
        if self.text.startswith("true", self.pos) and not self._is_pn_char(self.peek(4)):
            self.advance(4)
            return Literal("true", XSD_BOOLEAN)
        if self.text.startswith("false", self.pos) and not self._is_pn_char(self.peek(5)):
            self.advance(5)
            return Literal("false", XSD_BOOLEAN)
        return self._parse_iri()

    @staticmethod
    def _is_pn_char(c: str) -> bool:
        return bool(c) and (c.isalnum() or c in "_-")

    def _try_numeric_literal(self) -> Literal | None:
        rest = self.text[self.pos :]
        for regex, datatype in ((_DOUBLE_RE, XSD_DOUBLE), (_DECIMAL_RE, XSD_DECIMAL), (_INTEGER_RE, XSD_INTEGER)):
            m = regex.match(rest)
            if m:
                self.advance(m.end())
                return Literal(m.group(0), datatype)
        return None

    # -- terms ---------------------------------------------------------

    def _parse_iri(self) -> IRI:
        if self.peek() == "<":
            return IRI(self._scan_iriref())
        return self._parse_prefixed_name()

    def _scan_iriref(self) -> str:
        if self.peek() != "<":
            raise self.error("expected IRI")
        self.advance()
        out: list[str] = []
        while True:
            if self.at_end():
                raise self.error("unterminated IRI")
            c = self.peek()
            if c == ">":
                self.advance()
                break
            if c in " \t\n\r":
                raise self.error("whitespace inside IRI")
            if c == "\\":
                out.append(self._scan_uchar())
                continue
            out.append(self.advance())
        ref = "".join(out)
        return self._resolve(ref)

    def _resolve(self, ref: str) -> str:
        if _SCHEME_RE.match(ref):
            return ref
        if not self.base:
            raise self.error(f"relative IRI {ref!r} without a base IRI")
        return urljoin(self.base, ref)

    def _scan_uchar(self) -> str:
        self.expect("\\")
        kind = self.advance()
        if kind == "u":
            digits = self.advance(4)
        elif kind == "U":
            digits = self.advance(8)
        else:
            raise self.error(f"invalid IRI escape \\{kind}")
        try:
            return chr(int(digits, 16))
        except ValueError:
            raise self.error(f"invalid unicode escape \\{kind}{digits}") from None

    def _parse_prefixed_name(self) -> IRI:
        if self.ntriples:
            raise self.error("expected IRI or blank node")
        start_line, start_col = self.line, self.col
        m = re.match(r"[A-Za-z0-9_.\-]*:", self.text[self.pos :])
        if not m:
            raise self.error("expected IRI, prefixed name, literal, or blank node")
        prefix = m.group(0)[:-1]
        self.advance(m.end())
        if prefix not in self.prefixes:
            raise UnresolvedPrefixError(f"undeclared prefix {prefix + ':'!r}", start_line, start_col)
        local: list[str] = []
        while not self.at_end():
            c = self.peek()
            if c == "\\":
                self.advance()
                local.append(self.advance())
            elif c == "%" and re.match(r"%[0-9A-Fa-f]{2}", self.text[self.pos :]):
                local.append(self.advance(3))
            elif c.isalnum() or c in _PN_LOCAL_EXTRA:
                local.append(self.advance())
            else:
                break
        # a trailing '.' terminates the statement, not the name
        while local and local[-1] == ".":
            local.pop()
            self.pos -= 1
            self.col -= 1
        return IRI(self.prefixes[prefix] + "".join(local))

    def _parse_blank_label(self) -> BlankNode:
        self.expect("_:")
        m = re.match(r"[A-Za-z0-9_][A-Za-z0-9_.\-]*", self.text[self.pos :])
        if not m:
            raise self.error("invalid blank node label")
        label = m.group(0)
        self.advance(len(label))
        while label.endswith("."):
            label = label[:-1]
            self.pos -= 1
            self.col -= 1
        return BlankNode(label)

    def _parse_blank_node_property_list(self) -> BlankNode:
        self.expect("[")
        node = BlankNode(f"{self._anon_prefix}{self._anon}")
        self._anon += 1
        self.skip_ws()
        if self.peek() == "]":
            self.advance()
            return node
        self._parse_predicate_object_list(node)
        self.skip_ws()
        self.expect("]")
        return node

    def _parse_rdf_literal(self) -> Literal:
        lexical = self._scan_string()
        if self.peek() == "@":
            self.advance()
            m = _LANGTAG_RE.match(self.text[self.pos :])
            if not m:
                raise self.error("invalid language tag")
            tag = m.group(0)
            self.advance(len(tag))
            return Literal(lexical, lang=tag)
        if self.text.startswith("^^", self.pos):
            self.advance(2)
            dt = self._parse_iri()
            return Literal(lexical, dt.value)
        return Literal(lexical, XSD_STRING)

    def _scan_string(self) -> str:
        quote = self.peek()
        if quote not in "\"'":
            raise self.error("expected string literal")
        long = self.text.startswith(quote * 3, self.pos)
        if long and self.ntriples:
            raise self.error("long strings are not allowed in N-Triples")
        self.advance(3 if long else 1)
        out: list[str] = []
        while True:
            if self.at_end():
                raise self.error("unterminated string literal")
            c = self.peek()
            if long:
                if self.text.startswith(quote * 3, self.pos):
                    self.advance(3)
                    return "".join(out)
            elif c == quote:
                self.advance()
                return "".join(out)
            elif c == "\n":
                raise self.error("newline in single-quoted string")
            if c == "\\":
                self.advance()
                esc = self.peek()
                if esc in _ECHAR:
                    out.append(_ECHAR[esc])
                    self.advance()
                elif esc in ("u", "U"):
                    self.pos -= 1
                    self.col -= 1
                    out.append(self._scan_uchar())
                else:
                    raise self.error(f"invalid string escape \\{esc}")
            else:
                out.append(self.advance())

    # -- N-Triples -----------------------------------------------------

    def parse_ntriples_line(self) -> list[Triple]:
        self.skip_ws(comments=False)
        subject = self._nt_subject()
        self.skip_ws(comments=False)
        if self.peek() != "<":
            raise self.error("expected IRI predicate")
        predicate = IRI(self._scan_iriref())
        self.skip_ws(comments=False)
        obj = self._nt_object()
        self.skip_ws(comments=False)
        self.expect(".")
        self.skip_ws()
        if not self.at_end():
            raise self.error("trailing content after '.'")
        return [(subject, predicate, obj)]

    def _nt_subject(self) -> Term:
        if self.peek() == "<":
            return IRI(self._scan_iriref())
        if self.peek() == "_":
            return self._parse_blank_label()
        raise self.error("expected IRI or blank node subject")

    def _nt_object(self) -> Term:
        c = self.peek()
        if c == "<":
            return IRI(self._scan_iriref())
        if c == "_":
            return self._parse_blank_label()
        if c == '"':
            return self._parse_rdf_literal()
        raise self.error("expected IRI, blank node, or literal object")
