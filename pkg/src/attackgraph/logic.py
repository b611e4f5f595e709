"""Positive Horn-clause knowledge bases evaluated bottom-up to a fixpoint.

The rule language is the small Datalog-style subset used throughout this
project: a rule is ``head :- b1, b2, ...`` where each argument is either a
variable (name starting with ``_`` or a capital letter) or a constant (bare
lowercase identifier, integer, or quoted string). Facts are ground atoms.
Files may spread one clause over several lines and use ``%`` line comments.

Evaluation is semi-naive forward chaining: each round joins every rule
against the facts discovered in the previous round, so a rule instantiation
fires exactly once per (rule, binding) pair. Every firing is recorded as a
:class:`Derivation`, which is what the attack-graph builder later turns
into AND/OR proof structure. Rules are applied in declaration order and
facts are kept in first-insertion order, so two runs over the same
knowledge base produce identical fact sets and identical derivation lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .errors import (
    ArityConflictError,
    GroundnessError,
    LimitExceededError,
    ParseError,
    RangeRestrictionError,
)

DEFAULT_MAX_DERIVED_FACTS = 100_000

_VARIABLE_RE = re.compile(r"[_A-Z][A-Za-z0-9_]*\Z")
_BARE_CONSTANT_RE = re.compile(r"(?:[a-z][A-Za-z0-9_]*|[0-9]+)\Z")


class TermKind(Enum):
    VARIABLE = "variable"
    CONSTANT = "constant"


@dataclass(frozen=True)
class Term:
    """One argument position: a variable or a constant."""

    kind: TermKind
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("term name must be non-empty")
        if self.kind is TermKind.VARIABLE and not _VARIABLE_RE.match(self.name):
            raise ValueError(f"variable name {self.name!r} must start with '_' or a capital letter")

    @property
    def is_variable(self) -> bool:
        return self.kind is TermKind.VARIABLE

    def __str__(self) -> str:
        if self.kind is TermKind.VARIABLE or _BARE_CONSTANT_RE.match(self.name):
            return self.name
        return f"'{self.name}'"


def var(name: str) -> Term:
    return Term(TermKind.VARIABLE, name)


def const(name: str) -> Term:
    return Term(TermKind.CONSTANT, name)


@dataclass(frozen=True)
class Atom:
    """A predicate applied to an ordered tuple of terms."""

    predicate: str
    args: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return not any(t.is_variable for t in self.args)

    def variables(self) -> set[str]:
        return {t.name for t in self.args if t.is_variable}

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(str(t) for t in self.args)})"


@dataclass(frozen=True)
class HornRule:
    """``head :- body`` with a pure conjunctive body and no negation.

    Range restriction (every head variable occurs in the body) is enforced
    at construction, which keeps every derived fact ground.
    """

    head: Atom
    body: tuple[Atom, ...]
    label: str

    def __post_init__(self) -> None:
        if not self.body:
            raise ValueError("rule body must be non-empty")
        body_vars = set().union(*(a.variables() for a in self.body))
        unbound = self.head.variables() - body_vars
        if unbound:
            raise RangeRestrictionError(
                f"rule {self.label!r}: head variable(s) {', '.join(sorted(unbound))} "
                "do not occur in the body"
            )

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.body)
        return f"{self.label}: {self.head} :- {body}"


# A binding maps variable names to constant terms; stored sorted so that
# derivations are hashable and their order is reproducible.
Binding = tuple[tuple[str, Term], ...]


@dataclass(frozen=True)
class Derivation:
    """One rule firing: rule + binding + the ground atoms it connected."""

    conclusion: Atom
    rule_label: str
    rule_index: int
    premises: tuple[Atom, ...]
    binding: Binding

    def binding_map(self) -> dict[str, Term]:
        return dict(self.binding)


class ArityTable:
    """Predicate arities, declared on first use and fixed afterwards."""

    def __init__(self) -> None:
        self._arities: dict[str, int] = {}

    def register(self, predicate: str, arity: int) -> None:
        known = self._arities.get(predicate)
        if known is None:
            self._arities[predicate] = arity
        elif known != arity:
            raise ArityConflictError(
                f"predicate '{predicate}' used with arity {arity}, previously declared with arity {known}"
            )

    def get(self, predicate: str) -> int | None:
        return self._arities.get(predicate)

    def as_dict(self) -> dict[str, int]:
        return dict(self._arities)


class KnowledgeBase:
    """Rules plus ground facts, with set semantics and stable insertion order."""

    def __init__(self, max_derived_facts: int = DEFAULT_MAX_DERIVED_FACTS):
        self.rules: list[HornRule] = []
        self.arities = ArityTable()
        self.max_derived_facts = max_derived_facts
        self._fact_list: list[Atom] = []
        self._fact_set: set[Atom] = set()

    @property
    def facts(self) -> tuple[Atom, ...]:
        return tuple(self._fact_list)

    def has_fact(self, atom: Atom) -> bool:
        return atom in self._fact_set

    def add_rule(self, rule: HornRule) -> None:
        for atom in (rule.head, *rule.body):
            self.arities.register(atom.predicate, atom.arity)
        self.rules.append(rule)

    def add_fact(self, atom: Atom) -> None:
        if not atom.is_ground:
            raise GroundnessError(f"fact {atom} contains variables")
        self.arities.register(atom.predicate, atom.arity)
        if atom not in self._fact_set:
            self._fact_set.add(atom)
            self._fact_list.append(atom)

    def add_rule_text(self, text: str) -> HornRule:
        rule = parse_rule(text, self.arities)
        self.rules.append(rule)
        return rule

    def add_fact_text(self, text: str) -> Atom:
        atom = parse_fact(text, self.arities)
        self.add_fact(atom)
        return atom

    @classmethod
    def load(
        cls,
        rules_path: str | Path,
        facts_path: str | Path,
        max_derived_facts: int = DEFAULT_MAX_DERIVED_FACTS,
    ) -> "KnowledgeBase":
        kb = cls(max_derived_facts=max_derived_facts)
        load_rules_text(Path(rules_path).read_text(encoding="utf-8"), kb)
        load_facts_text(Path(facts_path).read_text(encoding="utf-8"), kb)
        return kb


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<WS>\s+)
      | (?P<COMMENT>%[^\n]*)
      | (?P<IMPLIES>:-)
      | (?P<LPAREN>\()
      | (?P<RPAREN>\))
      | (?P<COMMA>,)
      | (?P<DOT>\.)
      | (?P<COLON>:)
      | (?P<QUOTED>'[^'\n]*'|"[^"\n]*")
      | (?P<INT>[0-9]+)
      | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    type: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup or ""
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.type != "EOF":
            self.i += 1
        return tok

    def expect(self, type_: str, what: str) -> _Token:
        tok = self.next()
        if tok.type != type_:
            raise ParseError(f"expected {what}, found {tok.value or 'end of input'!r}", self.text, tok.pos)
        return tok

    def term(self) -> Term:
        tok = self.next()
        if tok.type == "IDENT":
            if _VARIABLE_RE.match(tok.value):
                return var(tok.value)
            return const(tok.value)
        if tok.type == "INT":
            return const(tok.value)
        if tok.type == "QUOTED":
            inner = tok.value[1:-1]
            if not inner:
                raise ParseError("quoted constant must be non-empty", self.text, tok.pos)
            return const(inner)
        raise ParseError(f"expected a term, found {tok.value or 'end of input'!r}", self.text, tok.pos)

    def atom(self) -> Atom:
        name = self.expect("IDENT", "a predicate name")
        if _VARIABLE_RE.match(name.value):
            raise ParseError(f"predicate name {name.value!r} must start with a lowercase letter", self.text, name.pos)
        self.expect("LPAREN", "'('")
        args = [self.term()]
        while self.peek().type == "COMMA":
            self.next()
            args.append(self.term())
        self.expect("RPAREN", "')'")
        return Atom(name.value, tuple(args))

    def end_of_statement(self) -> None:
        if self.peek().type == "DOT":
            self.next()
        tok = self.peek()
        if tok.type != "EOF":
            raise ParseError(f"unexpected trailing input {tok.value!r}", self.text, tok.pos)


def _register_atoms(atoms: Iterable[Atom], arities: ArityTable | None) -> None:
    table = arities if arities is not None else ArityTable()
    for atom in atoms:
        table.register(atom.predicate, atom.arity)


def parse_rule(text: str, arities: ArityTable | None = None) -> HornRule:
    """Parse ``[label:] head :- b1, b2, ... [.]`` into a :class:`HornRule`.

    The optional leading label names the rule; without one the head
    predicate is used. Predicate arities are registered in ``arities`` (or
    checked for consistency within the rule when none is given).
    """
    p = _Parser(text)
    label = None
    if p.peek().type == "IDENT" and p.peek(1).type == "COLON":
        label = p.next().value
        p.next()
    head = p.atom()
    p.expect("IMPLIES", "':-'")
    body = [p.atom()]
    while p.peek().type == "COMMA":
        p.next()
        body.append(p.atom())
    p.end_of_statement()
    rule = HornRule(head, tuple(body), label or head.predicate)
    _register_atoms((head, *body), arities)
    return rule


def parse_fact(text: str, arities: ArityTable | None = None) -> Atom:
    """Parse ``pred(c1, ..., cn) [.]`` into a ground atom."""
    p = _Parser(text)
    atom = p.atom()
    p.end_of_statement()
    if not atom.is_ground:
        bad = ", ".join(sorted(atom.variables()))
        raise GroundnessError(f"fact {atom.predicate}/{atom.arity} contains variable(s) {bad}")
    _register_atoms([atom], arities)
    return atom


def format_rule(rule: HornRule) -> str:
    return str(rule)


def format_atom(atom: Atom) -> str:
    return str(atom)


def _strip_comment(line: str) -> str:
    out = []
    quote: str | None = None
    for ch in line:
        if quote:
            out.append(ch)
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
            out.append(ch)
        elif ch == "%":
            break
        else:
            out.append(ch)
    return "".join(out)


def iter_statements(text: str) -> Iterator[tuple[str, int]]:
    """Split file text into clause statements with their starting line.

    A clause may span lines: it continues while parentheses are open or the
    text so far ends in ``,`` or ``:-``. A trailing ``.`` also terminates
    it. ``%`` comments run to end of line.
    """
    buffer: list[str] = []
    start_line = 0
    depth = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if not buffer:
            start_line = lineno
        buffer.append(line)
        depth += line.count("(") - line.count(")")
        joined = " ".join(buffer)
        if depth <= 0 and not joined.endswith((",", ":-")):
            yield joined, start_line
            buffer = []
            depth = 0
    if buffer:
        yield " ".join(buffer), start_line


def load_rules_text(text: str, kb: KnowledgeBase) -> list[HornRule]:
    rules = []
    for statement, lineno in iter_statements(text):
        try:
            rules.append(kb.add_rule_text(statement))
        except ParseError as exc:
            raise ParseError(f"in clause starting at line {lineno}: {exc}", statement, exc.pos) from exc
    return rules


def load_facts_text(text: str, kb: KnowledgeBase) -> list[Atom]:
    atoms = []
    for statement, lineno in iter_statements(text):
        try:
            atoms.append(kb.add_fact_text(statement))
        except ParseError as exc:
            raise ParseError(f"in clause starting at line {lineno}: {exc}", statement, exc.pos) from exc
    return atoms


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def unify(a: Atom, b: Atom, binding: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """Extend ``binding`` so that ``a[binding] == b``, or return None.

    ``b`` must be ground. The input binding is never mutated; failure is a
    value, not an error.
    """
    if a.predicate != b.predicate or a.arity != b.arity:
        return None
    out = dict(binding) if binding else {}
    for pa, pb in zip(a.args, b.args):
        if not pa.is_variable:
            if pa.name != pb.name:
                return None
        else:
            bound = out.get(pa.name)
            if bound is None:
                out[pa.name] = pb
            elif bound != pb:
                return None
    return out


def substitute(atom: Atom, binding: dict[str, Term]) -> Atom:
    args = []
    for t in atom.args:
        if t.is_variable:
            value = binding.get(t.name)
            if value is None:
                raise ValueError(f"unbound variable {t.name} in {atom}")
            args.append(value)
        else:
            args.append(t)
    return Atom(atom.predicate, tuple(args))


class _FactIndex:
    """Facts grouped by predicate, preserving insertion order."""

    def __init__(self) -> None:
        self.by_predicate: dict[str, list[Atom]] = {}

    def add(self, atom: Atom) -> None:
        self.by_predicate.setdefault(atom.predicate, []).append(atom)

    def candidates(self, atom: Atom) -> list[Atom]:
        return self.by_predicate.get(atom.predicate, [])


def _match_body(
    body: tuple[Atom, ...],
    delta_pos: int,
    old: _FactIndex,
    delta: _FactIndex,
    all_facts: _FactIndex,
) -> Iterator[dict[str, Term]]:
    """Enumerate bindings where position ``delta_pos`` matches a new fact.

    Positions before ``delta_pos`` match only pre-round facts so the same
    joint instantiation is not enumerated once per new premise; later
    positions may match anything. Enumeration order is fixed by fact
    insertion order, which keeps derivation order deterministic.
    """

    def extend(i: int, binding: dict[str, Term]) -> Iterator[dict[str, Term]]:
        if i == len(body):
            yield binding
            return
        if i == delta_pos:
            pool = delta
        elif i < delta_pos:
            pool = old
        else:
            pool = all_facts
        for fact in pool.candidates(body[i]):
            extended = unify(body[i], fact, binding)
            if extended is not None:
                yield from extend(i + 1, extended)

    yield from extend(0, {})


def forward_chain(
    kb: KnowledgeBase, max_derived_facts: int | None = None
) -> tuple[set[Atom], list[Derivation]]:
    """Compute the least fixpoint of ``kb`` and the derivations that built it.

    Returns the full fact set (inputs plus derived atoms) and one
    :class:`Derivation` per distinct (rule, binding) firing, in evaluation
    order. Raises :class:`LimitExceededError` once more than
    ``max_derived_facts`` new atoms have been produced.
    """
    limit = max_derived_facts if max_derived_facts is not None else kb.max_derived_facts

    old = _FactIndex()
    all_facts = _FactIndex()
    fact_set: set[Atom] = set()
    derivations: list[Derivation] = []
    seen_firings: set[tuple[int, Binding]] = set()
    derived_count = 0

    delta_list = list(kb.facts)
    for atom in delta_list:
        all_facts.add(atom)
        fact_set.add(atom)

    while delta_list:
        delta = _FactIndex()
        for atom in delta_list:
            delta.add(atom)
        next_delta: list[Atom] = []
        for rule_index, rule in enumerate(kb.rules):
            for delta_pos in range(len(rule.body)):
                for binding in _match_body(rule.body, delta_pos, old, delta, all_facts):
                    key_binding: Binding = tuple(sorted(binding.items()))
                    key = (rule_index, key_binding)
                    if key in seen_firings:
                        continue
                    seen_firings.add(key)
                    conclusion = substitute(rule.head, binding)
                    premises = tuple(substitute(b, binding) for b in rule.body)
                    derivations.append(
                        Derivation(conclusion, rule.label, rule_index, premises, key_binding)
                    )
                    if conclusion not in fact_set:
                        fact_set.add(conclusion)
                        next_delta.append(conclusion)
                        derived_count += 1
                        if derived_count > limit:
                            raise LimitExceededError(
                                f"fixpoint exceeded {limit} derived facts"
                            )
        for atom in delta_list:
            old.add(atom)
        for atom in next_delta:
            all_facts.add(atom)
        delta_list = next_delta

    return fact_set, derivations
