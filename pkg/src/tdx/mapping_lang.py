"""Schema-mapping DSL: relation declarations, dependencies, keys, named queries.

The concrete syntax is line oriented; one ``.``-terminated statement per line,
``#`` starts a comment.

    source Employee1(name, company, @time).
    target Emp(name, position, company, @time).
    rule Employee1(n, c, t) -> Emp(n, ?p, c, t), Sal(n, ?p, ?s, t).
    key Emp(name, @time).
    query q1(n, p, t) :- Emp(n, p, c, t), Sal(n, p, s, t).

``@`` marks the temporal attribute (always last).  In rules, ``?x`` marks an
existentially quantified variable; quantifiers are implicit.  ``key`` lists
the attributes of the temporal key; every remaining attribute is a dependent.
Query lines with the same name are disjuncts of one union; body variables not
listed in the head are existential.  Constants are single-quoted strings.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

from .errors import ParseError
from .model import RelationSchema, Violation


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: str


Term = Union[Var, Lit]


@dataclass(frozen=True)
class Atom:
    """One relational atom: non-temporal terms plus the temporal variable (last)."""

    relation: str
    args: tuple[Term, ...]
    time_var: str


@dataclass(frozen=True)
class SttTgd:
    """Source-to-target dependency: lhs over the source schema, rhs over the target."""

    lhs: tuple[Atom, ...]
    rhs: tuple[Atom, ...]
    existentials: frozenset[str]

    @property
    def time_var(self) -> str:
        return self.lhs[0].time_var

    def existential_order(self) -> tuple[str, ...]:
        """Existential variables in first-occurrence order over the rhs text."""
        seen: list[str] = []
        for atom in self.rhs:
            for term in atom.args:
                if isinstance(term, Var) and term.name in self.existentials and term.name not in seen:
                    seen.append(term.name)
        return tuple(seen)


@dataclass(frozen=True)
class Tkc:
    """Temporal key constraint: key attributes (temporal included) determine the rest."""

    relation: str
    key: frozenset[str]
    dependents: tuple[str, ...]


@dataclass(frozen=True)
class Ucq:
    """Union of conjunctive queries; the temporal head variable is always last."""

    name: str
    head: tuple[str, ...]
    time_var: str
    disjuncts: tuple[tuple[Atom, ...], ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return (*self.head, self.time_var)


@dataclass(frozen=True)
class Mapping:
    source: tuple[RelationSchema, ...]
    target: tuple[RelationSchema, ...]
    sttgds: tuple[SttTgd, ...]
    tkcs: tuple[Tkc, ...]
    queries: tuple[Ucq, ...]

    @cached_property
    def source_by_name(self) -> dict[str, RelationSchema]:
        return {r.name: r for r in self.source}

    @cached_property
    def target_by_name(self) -> dict[str, RelationSchema]:
        return {r.name: r for r in self.target}

    def query(self, name: str) -> Ucq | None:
        for q in self.queries:
            if q.name == name:
                return q
        return None


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_KEYWORDS = ("source", "target", "rule", "key", "query")


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "string" | "punct"
    text: str
    line: int
    col: int


def _tokenize_line(text: str, line_no: int) -> list[_Token]:
    toks: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            break
        if ch.isspace():
            i += 1
            continue
        col = i + 1
        if text.startswith(("->", ":-"), i):
            toks.append(_Token("punct", text[i:i + 2], line_no, col))
            i += 2
        elif ch in "(),.@?":
            toks.append(_Token("punct", ch, line_no, col))
            i += 1
        elif ch == "'":
            j = text.find("'", i + 1)
            if j < 0:
                raise ParseError(line_no, col, "unterminated constant")
            toks.append(_Token("string", text[i + 1:j], line_no, col))
            i = j + 1
        elif ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("name", text[i:j], line_no, col))
            i = j
        else:
            raise ParseError(line_no, col, f"unexpected character {ch!r}")
    return toks


class _Cursor:
    def __init__(self, toks: list[_Token], line: int):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self) -> _Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _eol_col(self) -> int:
        return self.toks[-1].col + len(self.toks[-1].text) if self.toks else 1

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok if tok is not None else self.peek()
        if tok is None:
            return ParseError(self.line, self._eol_col(), message)
        return ParseError(tok.line, tok.col, message)

    def take(self, what: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise self.error(f"expected {what} before end of statement")
        self.i += 1
        return tok

    def expect_punct(self, text: str) -> _Token:
        tok = self.take(f"'{text}'")
        if tok.kind != "punct" or tok.text != text:
            raise self.error(f"expected '{text}', got {tok.text!r}", tok)
        return tok

    def expect_name(self, what: str = "a name") -> _Token:
        tok = self.take(what)
        if tok.kind != "name":
            raise self.error(f"expected {what}, got {tok.text!r}", tok)
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.text == text

    def expect_end(self) -> None:
        self.expect_punct(".")
        tok = self.peek()
        if tok is not None:
            raise self.error("unexpected input after '.'", tok)


# ---------------------------------------------------------------------------
# Statement parsing
# ---------------------------------------------------------------------------


def _parse_declaration(cur: _Cursor) -> RelationSchema:
    name = cur.expect_name("a relation name")
    cur.expect_punct("(")
    attrs: list[str] = []
    temporal: str | None = None
    while True:
        marked = cur.at_punct("@")
        if marked:
            cur.expect_punct("@")
        tok = cur.expect_name("an attribute name")
        if tok.text in attrs or tok.text == temporal:
            raise cur.error(f"duplicate attribute {tok.text!r}", tok)
        if marked:
            if temporal is not None:
                raise cur.error("a relation has exactly one temporal attribute", tok)
            temporal = tok.text
        else:
            if temporal is not None:
                raise cur.error("the temporal attribute must be last", tok)
            attrs.append(tok.text)
        if cur.at_punct(","):
            cur.expect_punct(",")
            continue
        break
    cur.expect_punct(")")
    if temporal is None:
        raise cur.error(f"relation {name.text!r} must declare a temporal attribute ('@name', last)")
    cur.expect_end()
    return RelationSchema(name.text, tuple(attrs), temporal)


@dataclass(frozen=True)
class _RawTerm:
    kind: str  # "var" | "evar" | "lit"
    value: str
    tok: _Token


@dataclass(frozen=True)
class _RawAtom:
    relation: _Token
    terms: tuple[_RawTerm, ...]


def _parse_atom(cur: _Cursor, exist_error: str | None) -> _RawAtom:
    rel = cur.expect_name("a relation name")
    cur.expect_punct("(")
    terms: list[_RawTerm] = []
    while True:
        tok = cur.take("a term")
        if tok.kind == "punct" and tok.text == "?":
            if exist_error is not None:
                raise cur.error(exist_error, tok)
            name = cur.expect_name("a variable name")
            terms.append(_RawTerm("evar", name.text, tok))
        elif tok.kind == "name":
            terms.append(_RawTerm("var", tok.text, tok))
        elif tok.kind == "string":
            terms.append(_RawTerm("lit", tok.text, tok))
        else:
            raise cur.error(f"expected a term, got {tok.text!r}", tok)
        if cur.at_punct(","):
            cur.expect_punct(",")
            continue
        break
    cur.expect_punct(")")
    return _RawAtom(rel, tuple(terms))


def _parse_atom_list(cur: _Cursor, exist_error: str | None) -> list[_RawAtom]:
    atoms = [_parse_atom(cur, exist_error)]
    while cur.at_punct(","):
        cur.expect_punct(",")
        atoms.append(_parse_atom(cur, exist_error))
    return atoms


def _resolve_relation(cur: _Cursor, raw: _RawAtom, here: dict[str, RelationSchema],
                      there: dict[str, RelationSchema], side: str) -> RelationSchema:
    schema = here.get(raw.relation.text)
    if schema is None:
        if raw.relation.text in there:
            other = "target" if side == "source" else "source"
            raise cur.error(f"{other} relation {raw.relation.text!r} cannot be used here "
                            f"(a {side} relation is required)", raw.relation)
        raise cur.error(f"unknown {side} relation {raw.relation.text!r}", raw.relation)
    if len(raw.terms) != schema.arity + 1:
        raise cur.error(f"relation {schema.name!r} expects {schema.arity + 1} arguments, "
                        f"got {len(raw.terms)}", raw.relation)
    return schema


def _temporal_term(cur: _Cursor, raw: _RawAtom, time_var: str | None) -> str:
    last = raw.terms[-1]
    if last.kind != "var":
        raise cur.error("the temporal argument must be a plain variable", last.tok)
    if time_var is not None and last.value != time_var:
        raise cur.error(f"all atoms must share one temporal variable "
                        f"(expected {time_var!r}, got {last.value!r})", last.tok)
    return last.value


def _check_value_terms(cur: _Cursor, raw: _RawAtom, time_var: str) -> None:
    for term in raw.terms[:-1]:
        if term.kind in ("var", "evar") and term.value == time_var:
            raise cur.error(f"temporal variable {time_var!r} cannot be used in a value position", term.tok)


def _build_atom(raw: _RawAtom, schema: RelationSchema) -> Atom:
    args = tuple(Lit(t.value) if t.kind == "lit" else Var(t.value) for t in raw.terms[:-1])
    return Atom(schema.name, args, raw.terms[-1].value)


def _parse_rule(cur: _Cursor, source: dict[str, RelationSchema],
                target: dict[str, RelationSchema]) -> SttTgd:
    raw_lhs = []
    while True:
        raw_lhs.append(_parse_atom(cur, "'?' marks existential variables and is only allowed "
                                        "on the right-hand side of a rule"))
        if cur.at_punct(","):
            cur.expect_punct(",")
            continue
        break
    cur.expect_punct("->")
    raw_rhs = _parse_atom_list(cur, None)
    cur.expect_end()

    time_var: str | None = None
    lhs: list[Atom] = []
    for raw in raw_lhs:
        schema = _resolve_relation(cur, raw, source, target, "source")
        time_var = _temporal_term(cur, raw, time_var)
        lhs.append(_build_atom(raw, schema))
    lhs_vars = {t.name for atom in lhs for t in atom.args if isinstance(t, Var)}

    existentials: set[str] = set()
    for raw in raw_rhs:
        for term in raw.terms[:-1]:
            if term.kind == "evar":
                existentials.add(term.value)

    rhs: list[Atom] = []
    for raw in raw_rhs:
        schema = _resolve_relation(cur, raw, target, source, "target")
        time_var = _temporal_term(cur, raw, time_var)
        _check_value_terms(cur, raw, time_var)
        for term in raw.terms[:-1]:
            if term.kind == "evar" and term.value in lhs_vars:
                raise cur.error(f"existential variable ?{term.value} also occurs on the "
                                f"left-hand side", term.tok)
            if term.kind == "var" and term.value not in lhs_vars:
                hint = f" (write it as ?{term.value} at every occurrence)" \
                    if term.value in existentials else ""
                raise cur.error(f"variable {term.value!r} on the right-hand side is not bound "
                                f"on the left{hint}", term.tok)
        rhs.append(_build_atom(raw, schema))

    assert time_var is not None
    for raw in (*raw_lhs, *raw_rhs):
        _check_value_terms(cur, raw, time_var)
    return SttTgd(tuple(lhs), tuple(rhs), frozenset(existentials))


def _parse_key(cur: _Cursor, source: dict[str, RelationSchema],
               target: dict[str, RelationSchema]) -> Tkc:
    rel = cur.expect_name("a relation name")
    schema = target.get(rel.text)
    if schema is None:
        if rel.text in source:
            raise cur.error(f"keys apply to target relations; {rel.text!r} is a source relation", rel)
        raise cur.error(f"unknown target relation {rel.text!r}", rel)
    cur.expect_punct("(")
    key: list[str] = []
    saw_temporal = False
    while True:
        marked = cur.at_punct("@")
        if marked:
            cur.expect_punct("@")
        tok = cur.expect_name("an attribute name")
        if marked:
            if tok.text != schema.temporal:
                raise cur.error(f"the temporal attribute of {schema.name!r} is "
                                f"{schema.temporal!r}", tok)
            if saw_temporal:
                raise cur.error("duplicate temporal attribute in key", tok)
            saw_temporal = True
        else:
            if tok.text not in schema.attributes:
                if tok.text == schema.temporal:
                    raise cur.error(f"write the temporal attribute as @{tok.text}", tok)
                raise cur.error(f"unknown attribute {tok.text!r} of relation {schema.name!r}", tok)
            if tok.text in key:
                raise cur.error(f"duplicate attribute {tok.text!r} in key", tok)
            key.append(tok.text)
        if cur.at_punct(","):
            cur.expect_punct(",")
            continue
        break
    cur.expect_punct(")")
    if not saw_temporal:
        raise cur.error(f"a temporal key must include @{schema.temporal}")
    dependents = tuple(a for a in schema.attributes if a not in key)
    if not dependents:
        raise cur.error("the key covers every attribute; at least one dependent attribute is required")
    cur.expect_end()
    return Tkc(schema.name, frozenset(key) | {schema.temporal}, dependents)


def _parse_query(cur: _Cursor, source: dict[str, RelationSchema],
                 target: dict[str, RelationSchema]) -> tuple[str, tuple[str, ...], str, tuple[Atom, ...]]:
    name = cur.expect_name("a query name")
    cur.expect_punct("(")
    head: list[str] = []
    head_toks: list[_Token] = []
    while True:
        tok = cur.expect_name("a head variable")
        if tok.text in head:
            raise cur.error(f"duplicate head variable {tok.text!r}", tok)
        head.append(tok.text)
        head_toks.append(tok)
        if cur.at_punct(","):
            cur.expect_punct(",")
            continue
        break
    cur.expect_punct(")")
    cur.expect_punct(":-")
    raw_atoms = _parse_atom_list(cur, "in a query body, variables absent from the head are "
                                      "existential; '?' markers are not allowed")
    cur.expect_end()

    time_var = head[-1]
    atoms: list[Atom] = []
    body_vars: set[str] = set()
    for raw in raw_atoms:
        schema = _resolve_relation(cur, raw, target, source, "target")
        _temporal_term(cur, raw, time_var)
        _check_value_terms(cur, raw, time_var)
        atoms.append(_build_atom(raw, schema))
        body_vars |= {t.value for t in raw.terms[:-1] if t.kind == "var"}
    for var, tok in zip(head[:-1], head_toks[:-1]):
        if var not in body_vars:
            raise cur.error(f"head variable {var!r} does not occur in the body", tok)
    return name.text, tuple(head[:-1]), time_var, tuple(atoms)


def parse_mapping(text: str) -> Mapping:
    """Parse mapping text; raises ParseError with a source location on any defect."""
    statements: list[tuple[str, _Cursor]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize_line(raw, line_no)
        if not toks:
            continue
        head = toks[0]
        if head.kind != "name" or head.text not in _KEYWORDS:
            raise ParseError(head.line, head.col,
                             f"expected one of {', '.join(_KEYWORDS)}, got {head.text!r}")
        cur = _Cursor(toks, line_no)
        cur.i = 1
        statements.append((head.text, cur))

    source: list[RelationSchema] = []
    target: list[RelationSchema] = []
    declared: set[str] = set()
    for keyword, cur in statements:
        if keyword not in ("source", "target"):
            continue
        schema = _parse_declaration(cur)
        if schema.name in declared:
            raise ParseError(cur.line, 1, f"relation {schema.name!r} is already declared")
        declared.add(schema.name)
        (source if keyword == "source" else target).append(schema)

    source_by_name = {r.name: r for r in source}
    target_by_name = {r.name: r for r in target}
    sttgds: list[SttTgd] = []
    tkcs: list[Tkc] = []
    queries: dict[str, Ucq] = {}
    for keyword, cur in statements:
        if keyword == "rule":
            sttgds.append(_parse_rule(cur, source_by_name, target_by_name))
        elif keyword == "key":
            tkcs.append(_parse_key(cur, source_by_name, target_by_name))
        elif keyword == "query":
            name, head, time_var, atoms = _parse_query(cur, source_by_name, target_by_name)
            prev = queries.get(name)
            if prev is None:
                queries[name] = Ucq(name, head, time_var, (atoms,))
            else:
                if prev.head != head or prev.time_var != time_var:
                    raise ParseError(cur.line, 1,
                                     f"query {name!r} is redeclared with a different head")
                queries[name] = Ucq(name, head, time_var, (*prev.disjuncts, atoms))

    mapping = Mapping(tuple(source), tuple(target), tuple(sttgds), tuple(tkcs),
                      tuple(queries.values()))
    bad = validate_mapping(mapping)
    if bad:
        raise ParseError(1, 1, f"invalid mapping: {bad[0].message}")
    return mapping


# ---------------------------------------------------------------------------
# Canonical rendering (parse . render is the identity on valid mappings)
# ---------------------------------------------------------------------------


def _render_signature(schema: RelationSchema) -> str:
    parts = [*schema.attributes, f"@{schema.temporal}"]
    return f"{schema.name}({', '.join(parts)})"


def _render_atom(atom: Atom, existentials: frozenset[str]) -> str:
    parts = []
    for term in atom.args:
        if isinstance(term, Lit):
            parts.append(f"'{term.value}'")
        elif term.name in existentials:
            parts.append(f"?{term.name}")
        else:
            parts.append(term.name)
    parts.append(atom.time_var)
    return f"{atom.relation}({', '.join(parts)})"


def render_mapping(m: Mapping) -> str:
    none = frozenset()
    lines = [f"source {_render_signature(r)}." for r in m.source]
    lines += [f"target {_render_signature(r)}." for r in m.target]
    for dep in m.sttgds:
        lhs = ", ".join(_render_atom(a, none) for a in dep.lhs)
        rhs = ", ".join(_render_atom(a, dep.existentials) for a in dep.rhs)
        lines.append(f"rule {lhs} -> {rhs}.")
    for tkc in m.tkcs:
        schema = m.target_by_name[tkc.relation]
        attrs = [a for a in schema.attributes if a in tkc.key] + [f"@{schema.temporal}"]
        lines.append(f"key {tkc.relation}({', '.join(attrs)}).")
    for q in m.queries:
        head = ", ".join(q.columns)
        for disjunct in q.disjuncts:
            body = ", ".join(_render_atom(a, none) for a in disjunct)
            lines.append(f"query {q.name}({head}) :- {body}.")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Structural validation of already-built mappings
# ---------------------------------------------------------------------------


def _atom_violations(atom: Atom, schemas: dict[str, RelationSchema], side: str,
                     other: dict[str, RelationSchema], where: str) -> list[Violation]:
    out = []
    schema = schemas.get(atom.relation)
    if schema is None:
        code = "wrong-schema-side" if atom.relation in other else "unknown-relation"
        out.append(Violation(code, f"{where}: {atom.relation!r} is not a {side} relation"))
        return out
    if len(atom.args) != schema.arity:
        out.append(Violation("arity-mismatch",
                             f"{where}: {atom.relation!r} expects {schema.arity} value arguments, "
                             f"got {len(atom.args)}"))
    return out


def _shared_time_var(atoms: tuple[Atom, ...], where: str) -> list[Violation]:
    out = []
    time_vars = {a.time_var for a in atoms}
    if len(time_vars) > 1:
        out.append(Violation("temporal-variable", f"{where}: more than one temporal variable"))
    for atom in atoms:
        for term in atom.args:
            if isinstance(term, Var) and term.name in time_vars:
                out.append(Violation("temporal-variable",
                                     f"{where}: temporal variable {term.name!r} in a value position"))
    return out


def validate_mapping(m: Mapping) -> list[Violation]:
    out: list[Violation] = []
    names = [r.name for r in (*m.source, *m.target)]
    for name in sorted({n for n in names if names.count(n) > 1}):
        out.append(Violation("duplicate-relation", f"relation {name!r} declared more than once"))
    src, tgt = m.source_by_name, m.target_by_name

    for i, dep in enumerate(m.sttgds):
        where = f"rule #{i}"
        for atom in dep.lhs:
            out += _atom_violations(atom, src, "source", tgt, where)
        for atom in dep.rhs:
            out += _atom_violations(atom, tgt, "target", src, where)
        out += _shared_time_var((*dep.lhs, *dep.rhs), where)
        lhs_vars = {t.name for a in dep.lhs for t in a.args if isinstance(t, Var)}
        rhs_vars = {t.name for a in dep.rhs for t in a.args if isinstance(t, Var)}
        for v in sorted(dep.existentials & lhs_vars):
            out.append(Violation("existential-variable",
                                 f"{where}: existential {v!r} also occurs on the left-hand side"))
        for v in sorted(dep.existentials - rhs_vars):
            out.append(Violation("existential-variable",
                                 f"{where}: existential {v!r} does not occur on the right-hand side"))
        for v in sorted(rhs_vars - lhs_vars - dep.existentials):
            out.append(Violation("unsafe-variable",
                                 f"{where}: right-hand-side variable {v!r} is not bound on the left"))

    for i, tkc in enumerate(m.tkcs):
        where = f"key #{i} on {tkc.relation!r}"
        schema = tgt.get(tkc.relation)
        if schema is None:
            code = "wrong-schema-side" if tkc.relation in src else "unknown-relation"
            out.append(Violation(code, f"{where}: not a target relation"))
            continue
        if schema.temporal not in tkc.key:
            out.append(Violation("key-violation", f"{where}: the temporal attribute must be in the key"))
        if not tkc.dependents:
            out.append(Violation("key-violation", f"{where}: at least one dependent attribute is required"))
        expected = tuple(a for a in schema.attributes if a not in tkc.key)
        if set(tkc.key) - set(schema.all_attributes):
            out.append(Violation("key-violation", f"{where}: key names an unknown attribute"))
        elif tkc.dependents != expected:
            out.append(Violation("key-violation",
                                 f"{where}: key and dependents must partition the attributes "
                                 f"(expected dependents {expected})"))

    seen_queries: set[str] = set()
    for q in m.queries:
        where = f"query {q.name!r}"
        if q.name in seen_queries:
            out.append(Violation("duplicate-query", f"{where}: name used by more than one query"))
        seen_queries.add(q.name)
        for disjunct in q.disjuncts:
            for atom in disjunct:
                out += _atom_violations(atom, tgt, "target", src, where)
            out += _shared_time_var(disjunct, where)
            if {a.time_var for a in disjunct} != {q.time_var}:
                out.append(Violation("temporal-variable",
                                     f"{where}: disjunct does not use the head's temporal variable"))
            disjunct_vars = {t.name for a in disjunct for t in a.args if isinstance(t, Var)}
            for v in q.head:
                if v not in disjunct_vars:
                    out.append(Violation("head-variable",
                                         f"{where}: head variable {v!r} does not occur in every disjunct"))
    return out
