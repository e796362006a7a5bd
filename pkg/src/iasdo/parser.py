"""Surface syntax for model files plus the canonical renderer and the other
text serializations (validation-report JSON, DOT class graph).

The language is a flat list of declarations mapping one-to-one onto the
model tuple:

    class Copy { attrs: copy_code; methods: Move; }
    ed Copy -> Document imperative;
    ds AvailableCopy -> Copy imperative;
    ds BlockedCopy -> AvailableCopy imperative back_inactive;
    back_inactive FinishedBorrowing -> Request;
    access_view AvailableCopy { attrs: Copy.copy_code; }
    loop ReturnedCopy -> AvailableCopy;
    process Notify { inputs: ...; outputs: ...; pre: ...; post: ...; effects: ...; }
    role Librarian;
    grant Librarian create on Reservation;
    responsible Librarian for Notify;

Keywords are lowercase; identifiers are ``[A-Za-z_][A-Za-z0-9_]*``; ``#``
starts a line comment. Condition connectives (and/or/xor/not) are matched
case-insensitively. Parsing is total: any input produces either a model or
a non-empty list of positioned errors, raised as :class:`ParseFailure`.
Duplicate declarations and references to undeclared names are parse errors;
semantic rules live in :mod:`iasdo.validator`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .conditions import (
    And,
    Atom,
    Condition,
    Not,
    Or,
    SameAncestor,
    Xor,
    condition_to_source,
)
from .model import (
    AccessView,
    BackInactiveDecl,
    ClassDef,
    DsLink,
    EdLink,
    Effect,
    EffectKind,
    LinkMode,
    LoopDecl,
    ModelSpec,
    PrivilegeGrant,
    Privilege,
    ProcessDef,
    Responsibility,
    RoleDef,
)
from .validator import ValidationReport

DECL_KEYWORDS = (
    "class",
    "ed",
    "ds",
    "back_inactive",
    "access_view",
    "loop",
    "process",
    "role",
    "grant",
    "responsible",
)

KEYWORDS = frozenset(
    DECL_KEYWORDS
    + (
        "inputs",
        "outputs",
        "pre",
        "post",
        "effects",
        "attrs",
        "methods",
        "imperative",
        "optional",
        "create",
        "modify",
        "delete",
        "query",
        "on",
        "for",
        "from",
        "if",
        "migrate",
        "same_ancestor",
    )
)

CONNECTIVES = frozenset(("and", "or", "xor", "not"))


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    expected: str
    found: str

    @property
    def message(self) -> str:
        return f"expected {self.expected}, found {self.found}"

    def __str__(self) -> str:
        return (
            f"{self.span.file}:{self.span.line}:{self.span.column}: {self.message}"
        )


class ParseFailure(Exception):
    """Raised by :func:`parse_model`; carries the full error list."""

    def __init__(self, errors: list[ParseError]) -> None:
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


# -- lexer ---------------------------------------------------------------------

_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    ":": "COLON",
    ";": "SEMI",
    ",": "COMMA",
    ".": "DOT",
    "(": "LPAREN",
    ")": "RPAREN",
    "=": "EQUALS",
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_ASCII_LETTERS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_ASCII_ALNUM = _ASCII_LETTERS | frozenset("0123456789")


def _is_ident_start(ch: str) -> bool:
    return ch in _ASCII_LETTERS or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch in _ASCII_ALNUM or ch == "_"


def tokenize(text: str, filename: str, errors: list[ParseError]) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if _is_ident_start(ch):
            start = i
            start_col = col
            while i < n and _is_ident_char(text[i]):
                i += 1
                col += 1
            tokens.append(Token("IDENT", text[start:i], line, start_col))
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("ARROW", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        errors.append(
            ParseError(
                SourceSpan(filename, line, col, 1),
                "a declaration keyword, identifier, or punctuation",
                f"illegal character {ch!r}",
            )
        )
        i += 1
        col += 1
    tokens.append(Token("EOF", "", line, col))
    return tokens


# -- parser --------------------------------------------------------------------


class _Recover(Exception):
    """Internal signal: error recorded, sync to the next declaration."""


@dataclass
class _Ref:
    name: str
    span: SourceSpan
    kind: str  # class | role | process


class _Parser:
    def __init__(self, tokens: list[Token], filename: str) -> None:
        self.tokens = tokens
        self.filename = filename
        self.i = 0
        self.errors: list[ParseError] = []
        self.refs: list[_Ref] = []
        self.decl_keys: list[tuple[str, str, SourceSpan]] = []
        self.classes: list[ClassDef] = []
        self.ed_links: list[EdLink] = []
        self.ds_links: list[DsLink] = []
        self.back_decls: list[BackInactiveDecl] = []
        self.access_views: list[AccessView] = []
        self.loops: list[LoopDecl] = []
        self.processes: list[ProcessDef] = []
        self.roles: list[RoleDef] = []
        self.grants: list[PrivilegeGrant] = []
        self.responsibilities: list[Responsibility] = []

    # token plumbing

    def _peek(self) -> Token:
        return self.tokens[self.i]

    def _advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def _span(self, tok: Token) -> SourceSpan:
        return SourceSpan(self.filename, tok.line, tok.column, max(len(tok.text), 1))

    def _describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "EOF" else repr(tok.text)

    def _error(self, expected: str, tok: Token | None = None) -> _Recover:
        tok = tok or self._peek()
        self.errors.append(ParseError(self._span(tok), expected, self._describe(tok)))
        return _Recover()

    def _expect(self, kind: str, expected: str) -> Token:
        tok = self._peek()
        if tok.kind != kind:
            raise self._error(expected, tok)
        return self._advance()

    def _expect_keyword(self, word: str) -> Token:
        tok = self._peek()
        if tok.kind != "IDENT" or tok.text != word:
            raise self._error(f"keyword {word!r}", tok)
        return self._advance()

    def _at_keyword(self, word: str) -> bool:
        tok = self._peek()
        return tok.kind == "IDENT" and tok.text == word

    def _ident(self, what: str = "an identifier") -> tuple[str, SourceSpan]:
        tok = self._peek()
        if tok.kind != "IDENT":
            raise self._error(what, tok)
        if tok.text in KEYWORDS or tok.text.lower() in CONNECTIVES:
            raise self._error(what, tok)
        self._advance()
        return tok.text, self._span(tok)

    def _class_ref(self, what: str = "a class name") -> tuple[str, SourceSpan]:
        name, span = self._ident(what)
        self.refs.append(_Ref(name, span, "class"))
        return name, span

    def _sync(self) -> None:
        # Skip to just past the next ';' or '}', or stop before the next
        # top-level declaration keyword, so one mistake yields one error.
        while True:
            tok = self._peek()
            if tok.kind == "EOF":
                return
            if tok.kind in ("SEMI", "RBRACE"):
                self._advance()
                return
            if tok.kind == "IDENT" and tok.text in DECL_KEYWORDS:
                return
            self._advance()

    # declarations

    def parse(self) -> None:
        while self._peek().kind != "EOF":
            tok = self._peek()
            try:
                if tok.kind != "IDENT":
                    self._advance()
                    raise self._error("a declaration keyword", tok)
                handler = {
                    "class": self._class_decl,
                    "ed": self._ed_decl,
                    "ds": self._ds_decl,
                    "back_inactive": self._back_decl,
                    "access_view": self._access_view_decl,
                    "loop": self._loop_decl,
                    "process": self._process_decl,
                    "role": self._role_decl,
                    "grant": self._grant_decl,
                    "responsible": self._responsible_decl,
                }.get(tok.text)
                if handler is None:
                    self._advance()
                    raise self._error("a declaration keyword", tok)
                handler()
            except _Recover:
                self._sync()

    def _ident_list(self, what: str) -> list[tuple[str, SourceSpan]]:
        items = [self._ident(what)]
        while self._peek().kind == "COMMA":
            self._advance()
            items.append(self._ident(what))
        return items

    def _class_decl(self) -> None:
        self._expect_keyword("class")
        name, span = self._ident("a class name")
        self.decl_keys.append(("class", name, span))
        self._expect("LBRACE", "'{'")
        attrs: list[tuple[str, SourceSpan]] = []
        methods: list[tuple[str, SourceSpan]] = []
        if self._at_keyword("attrs"):
            self._advance()
            self._expect("COLON", "':'")
            attrs = self._ident_list("an attribute name")
            self._expect("SEMI", "';'")
        if self._at_keyword("methods"):
            self._advance()
            self._expect("COLON", "':'")
            methods = self._ident_list("a method name")
            self._expect("SEMI", "';'")
        self._expect("RBRACE", "'}'")
        ok = True
        for items, what in ((attrs, "attribute"), (methods, "method")):
            seen: set[str] = set()
            for item, ispan in items:
                if item in seen:
                    self.errors.append(
                        ParseError(
                            ispan,
                            f"a unique {what} name on class {name}",
                            f"duplicate {item!r}",
                        )
                    )
                    ok = False
                seen.add(item)
        if ok:
            self.classes.append(
                ClassDef(
                    name,
                    tuple(a for a, _ in attrs),
                    tuple(m for m, _ in methods),
                )
            )

    def _link_ends(self) -> tuple[str, SourceSpan, str]:
        src, span = self._class_ref()
        self._expect("ARROW", "'->'")
        dst, dspan = self._class_ref()
        if src == dst:
            self.errors.append(
                ParseError(dspan, "a different class", f"self-link on {src!r}")
            )
            raise _Recover()
        return src, span, dst

    def _mode(self) -> LinkMode:
        tok = self._peek()
        if tok.kind == "IDENT" and tok.text in ("imperative", "optional"):
            self._advance()
            return LinkMode(tok.text)
        raise self._error("'imperative' or 'optional'", tok)

    def _ed_decl(self) -> None:
        self._expect_keyword("ed")
        src, span, dst = self._link_ends()
        mode = self._mode()
        self._expect("SEMI", "';'")
        self.decl_keys.append(("ed", f"{src}->{dst}", span))
        self.ed_links.append(EdLink(src, dst, mode))

    def _ds_decl(self) -> None:
        self._expect_keyword("ds")
        sub, span, sup = self._link_ends()
        mode = self._mode()
        back = False
        if self._at_keyword("back_inactive"):
            self._advance()
            back = True
        self._expect("SEMI", "';'")
        self.decl_keys.append(("ds", f"{sub}->{sup}", span))
        self.ds_links.append(DsLink(sub, sup, mode, back))

    def _back_decl(self) -> None:
        self._expect_keyword("back_inactive")
        sub, span, ancestor = self._link_ends()
        self._expect("SEMI", "';'")
        self.decl_keys.append(("back_inactive", f"{sub}->{ancestor}", span))
        self.back_decls.append(BackInactiveDecl(sub, ancestor))

    def _qualified_list(self) -> list[tuple[str, str, SourceSpan]]:
        items: list[tuple[str, str, SourceSpan]] = []
        while True:
            cls, span = self._class_ref()
            self._expect("DOT", "'.'")
            prop, _ = self._ident("a property name")
            items.append((cls, prop, span))
            if self._peek().kind != "COMMA":
                return items
            self._advance()

    def _access_view_decl(self) -> None:
        self._expect_keyword("access_view")
        owner, span = self._class_ref("the owning class name")
        self.decl_keys.append(("access_view", owner, span))
        self._expect("LBRACE", "'{'")
        attrs: list[tuple[str, str, SourceSpan]] = []
        methods: list[tuple[str, str, SourceSpan]] = []
        if self._at_keyword("attrs"):
            self._advance()
            self._expect("COLON", "':'")
            attrs = self._qualified_list()
            self._expect("SEMI", "';'")
        if self._at_keyword("methods"):
            self._advance()
            self._expect("COLON", "':'")
            methods = self._qualified_list()
            self._expect("SEMI", "';'")
        self._expect("RBRACE", "'}'")
        ok = True
        for items in (attrs, methods):
            seen: set[tuple[str, str]] = set()
            for cls, prop, ispan in items:
                if (cls, prop) in seen:
                    self.errors.append(
                        ParseError(
                            ispan,
                            f"a unique selection on access view {owner}",
                            f"duplicate {cls}.{prop}",
                        )
                    )
                    ok = False
                seen.add((cls, prop))
        if ok:
            self.access_views.append(
                AccessView(
                    owner,
                    tuple((c, p) for c, p, _ in attrs),
                    tuple((c, p) for c, p, _ in methods),
                )
            )

    def _loop_decl(self) -> None:
        self._expect_keyword("loop")
        end, span, start = self._link_ends()
        self._expect("SEMI", "';'")
        self.decl_keys.append(("loop", end, span))
        self.loops.append(LoopDecl(end, start))

    def _role_decl(self) -> None:
        self._expect_keyword("role")
        name, span = self._ident("a role name")
        self._expect("SEMI", "';'")
        self.decl_keys.append(("role", name, span))
        self.roles.append(RoleDef(name))

    def _grant_decl(self) -> None:
        self._expect_keyword("grant")
        role, span = self._ident("a role name")
        self.refs.append(_Ref(role, span, "role"))
        tok = self._peek()
        if tok.kind != "IDENT" or tok.text not in ("create", "modify", "delete", "query"):
            raise self._error("a privilege (create, modify, delete, query)", tok)
        self._advance()
        privilege = Privilege(tok.text)
        self._expect_keyword("on")
        cls, _ = self._class_ref()
        self._expect("SEMI", "';'")
        self.decl_keys.append(("grant", f"{role}:{privilege.value}:{cls}", span))
        self.grants.append(PrivilegeGrant(role, cls, privilege))

    def _responsible_decl(self) -> None:
        self._expect_keyword("responsible")
        role, span = self._ident("a role name")
        self.refs.append(_Ref(role, span, "role"))
        self._expect_keyword("for")
        proc, pspan = self._ident("a process name")
        self.refs.append(_Ref(proc, pspan, "process"))
        self._expect("SEMI", "';'")
        self.decl_keys.append(("responsible", f"{role}:{proc}", span))
        self.responsibilities.append(Responsibility(role, proc))

    # conditions: expr := term (("or"|"xor") term)* ; term := factor ("and" factor)*
    # factor := "not"? (classname | "(" expr ")" | same_ancestor-atom in guards).
    # Runs of one connective fold into a single n-ary node, so
    # "a or b xor c" parses as Xor(Or(a, b), c).

    def _connective(self) -> str | None:
        tok = self._peek()
        if tok.kind == "IDENT" and tok.text.lower() in CONNECTIVES:
            return tok.text.lower()
        return None

    def _condition(self, guard: bool) -> Condition:
        node = self._cond_term(guard)
        pairs: list[tuple[str, Condition]] = []
        while self._connective() in ("or", "xor"):
            op = self._advance().text.lower()
            pairs.append((op, self._cond_term(guard)))
        idx = 0
        while idx < len(pairs):
            op = pairs[idx][0]
            operands = [node, pairs[idx][1]]
            idx += 1
            while idx < len(pairs) and pairs[idx][0] == op:
                operands.append(pairs[idx][1])
                idx += 1
            node = (Or if op == "or" else Xor)(tuple(operands))
        return node

    def _cond_term(self, guard: bool) -> Condition:
        operands = [self._cond_factor(guard)]
        while self._connective() == "and":
            self._advance()
            operands.append(self._cond_factor(guard))
        if len(operands) == 1:
            return operands[0]
        return And(tuple(operands))

    def _cond_factor(self, guard: bool) -> Condition:
        tok = self._peek()
        if tok.kind == "IDENT" and tok.text.lower() == "not":
            self._advance()
            return Not(self._cond_factor(guard))
        if tok.kind == "LPAREN":
            self._advance()
            node = self._condition(guard)
            self._expect("RPAREN", "')'")
            return node
        if tok.kind == "IDENT" and tok.text == "same_ancestor":
            if not guard:
                raise self._error(
                    "a class name ('same_ancestor' is only allowed in effect guards)",
                    tok,
                )
            self._advance()
            self._expect("LPAREN", "'('")
            left, _ = self._class_ref()
            self._expect("COMMA", "','")
            right, _ = self._class_ref()
            self._expect("COMMA", "','")
            ancestor, _ = self._class_ref()
            self._expect("RPAREN", "')'")
            return SameAncestor(left, right, ancestor)
        name, _ = self._class_ref("a class name or '('")
        return Atom(name)

    def _effect(self) -> Effect:
        tok = self._peek()
        if self._at_keyword("migrate"):
            self._advance()
            source, _ = self._class_ref()
            self._expect("ARROW", "'->'")
            target, _ = self._class_ref()
            guard = None
            if self._at_keyword("if"):
                self._advance()
                guard = self._condition(guard=True)
            return Effect(EffectKind.MIGRATE, target, source, guard)
        if self._at_keyword("create"):
            self._advance()
            target, _ = self._class_ref()
            source = None
            if self._at_keyword("from"):
                self._advance()
                source, _ = self._class_ref()
            guard = None
            if self._at_keyword("if"):
                self._advance()
                guard = self._condition(guard=True)
            return Effect(EffectKind.CREATE, target, source, guard)
        raise self._error("'migrate' or 'create'", tok)

    def _process_decl(self) -> None:
        self._expect_keyword("process")
        name, span = self._ident("a process name")
        self.decl_keys.append(("process", name, span))
        self._expect("LBRACE", "'{'")
        self._expect_keyword("inputs")
        self._expect("COLON", "':'")
        inputs = [self._class_ref()]
        while self._peek().kind == "COMMA":
            self._advance()
            inputs.append(self._class_ref())
        self._expect("SEMI", "';'")
        self._expect_keyword("outputs")
        self._expect("COLON", "':'")
        outputs = [self._class_ref()]
        while self._peek().kind == "COMMA":
            self._advance()
            outputs.append(self._class_ref())
        self._expect("SEMI", "';'")
        self._expect_keyword("pre")
        self._expect("COLON", "':'")
        precondition = self._condition(guard=False)
        self._expect("SEMI", "';'")
        self._expect_keyword("post")
        self._expect("COLON", "':'")
        postcondition = self._condition(guard=False)
        self._expect("SEMI", "';'")
        effects: list[Effect] = []
        if self._at_keyword("effects"):
            self._advance()
            self._expect("COLON", "':'")
            effects.append(self._effect())
            while self._peek().kind == "COMMA":
                self._advance()
                effects.append(self._effect())
            self._expect("SEMI", "';'")
        self._expect("RBRACE", "'}'")
        self.processes.append(
            ProcessDef(
                name,
                frozenset(n for n, _ in inputs),
                frozenset(n for n, _ in outputs),
                precondition,
                postcondition,
                tuple(effects),
            )
        )

    # assembly

    def resolve(self) -> None:
        seen: dict[tuple[str, str], SourceSpan] = {}
        for kind, key, span in self.decl_keys:
            if (kind, key) in seen:
                self.errors.append(
                    ParseError(
                        span,
                        f"a unique {kind} declaration",
                        f"duplicate declaration of {key!r}",
                    )
                )
            else:
                seen[(kind, key)] = span
        declared = {
            "class": {c.name for c in self.classes},
            "role": {r.name for r in self.roles},
            "process": {p.name for p in self.processes},
        }
        for ref in self.refs:
            if ref.name not in declared[ref.kind]:
                self.errors.append(
                    ParseError(
                        ref.span,
                        f"a declared {ref.kind} name",
                        f"undeclared {ref.kind} {ref.name!r}",
                    )
                )

    def build(self) -> ModelSpec:
        return ModelSpec(
            classes=tuple(self.classes),
            ed_links=tuple(self.ed_links),
            ds_links=tuple(self.ds_links),
            back_inactive_decls=tuple(self.back_decls),
            access_views=tuple(self.access_views),
            loops=tuple(self.loops),
            processes=tuple(self.processes),
            roles=tuple(self.roles),
            privilege_grants=tuple(self.grants),
            responsibilities=tuple(self.responsibilities),
        )


def parse_model(
    text: str, *, filename: str = "<string>", first_error_only: bool = False
) -> ModelSpec:
    """Parse model source into a :class:`ModelSpec`.

    Raises :class:`ParseFailure` carrying every positioned error found
    (or only the first one when ``first_error_only`` is set).
    """
    errors: list[ParseError] = []
    tokens = tokenize(text, filename, errors)
    parser = _Parser(tokens, filename)
    parser.errors = errors
    parser.parse()
    parser.resolve()
    if errors:
        raise ParseFailure(errors[:1] if first_error_only else errors)
    return parser.build()


# -- canonical rendering ---------------------------------------------------------


def _render_effect(effect: Effect) -> str:
    if effect.kind is EffectKind.MIGRATE:
        head = f"migrate {effect.source_binding} -> {effect.target_class}"
    else:
        head = f"create {effect.target_class}"
        if effect.source_binding is not None:
            head += f" from {effect.source_binding}"
    if effect.guard is not None:
        head += f" if {condition_to_source(effect.guard)}"
    return head


def render_model(model: ModelSpec) -> str:
    """Canonical source text: declarations sorted within each kind, two-space
    indentation. ``parse_model(render_model(m))`` is structurally equal to
    ``m`` up to declaration order, and rendering is a fixpoint."""
    m = model.canonicalized()
    blocks: list[str] = []
    for cls in m.classes:
        lines = [f"class {cls.name} {{"]
        if cls.attributes:
            lines.append(f"  attrs: {', '.join(cls.attributes)};")
        if cls.methods:
            lines.append(f"  methods: {', '.join(cls.methods)};")
        lines.append("}")
        blocks.append("\n".join(lines))
    for link in m.ed_links:
        blocks.append(f"ed {link.source} -> {link.target} {link.mode.value};")
    for link in m.ds_links:
        flag = " back_inactive" if link.back_inactive else ""
        blocks.append(f"ds {link.sub} -> {link.super} {link.mode.value}{flag};")
    for decl in m.back_inactive_decls:
        blocks.append(f"back_inactive {decl.sub} -> {decl.ancestor};")
    for view in m.access_views:
        lines = [f"access_view {view.owner} {{"]
        if view.selected_attributes:
            sel = ", ".join(f"{c}.{p}" for c, p in view.selected_attributes)
            lines.append(f"  attrs: {sel};")
        if view.selected_methods:
            sel = ", ".join(f"{c}.{p}" for c, p in view.selected_methods)
            lines.append(f"  methods: {sel};")
        lines.append("}")
        blocks.append("\n".join(lines))
    for loop in m.loops:
        blocks.append(f"loop {loop.end_class} -> {loop.start_class};")
    for proc in m.processes:
        lines = [f"process {proc.name} {{"]
        lines.append(f"  inputs: {', '.join(sorted(proc.inputs))};")
        lines.append(f"  outputs: {', '.join(sorted(proc.outputs))};")
        lines.append(f"  pre: {condition_to_source(proc.precondition)};")
        lines.append(f"  post: {condition_to_source(proc.postcondition)};")
        if proc.effects:
            rendered = [_render_effect(e) for e in proc.effects]
            lines.append("  effects:")
            for idx, text in enumerate(rendered):
                tail = ";" if idx == len(rendered) - 1 else ","
                lines.append(f"    {text}{tail}")
        lines.append("}")
        blocks.append("\n".join(lines))
    for role in m.roles:
        blocks.append(f"role {role.name};")
    for grant in m.privilege_grants:
        blocks.append(
            f"grant {grant.role} {grant.privilege.value} on {grant.class_name};"
        )
    for resp in m.responsibilities:
        blocks.append(f"responsible {resp.role} for {resp.process};")
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


# -- report and graph serialization ----------------------------------------------


def report_to_json(report: ValidationReport) -> str:
    """Deterministic JSON for a validation report (stable key order,
    compact separators)."""
    payload = {
        "diagnostics": [
            {
                "rule": d.rule,
                "severity": d.severity.value,
                "elements": list(d.elements),
                "message": d.message,
            }
            for d in report.diagnostics
        ],
        "summary": {
            "errors": report.error_count,
            "warnings": report.warning_count,
        },
    }
    return json.dumps(payload, separators=(",", ":"))


def model_to_dot(model: ModelSpec) -> str:
    """Class graph in DOT: ED edges solid, DS edges dashed, loops dotted.
    Output is byte-deterministic for a given model."""
    lines = ["digraph model {", "  rankdir=BT;"]
    for cls in sorted(c.name for c in model.classes):
        lines.append(f'  "{cls}";')
    for link in sorted(model.ed_links, key=lambda l: (l.source, l.target)):
        lines.append(
            f'  "{link.source}" -> "{link.target}"'
            f' [style=solid, label="ed {link.mode.value}"];'
        )
    for link in sorted(model.ds_links, key=lambda l: (l.sub, l.super)):
        label = f"ds {link.mode.value}"
        if link.back_inactive:
            label += " back_inactive"
        lines.append(
            f'  "{link.sub}" -> "{link.super}" [style=dashed, label="{label}"];'
        )
    for loop in sorted(model.loops, key=lambda l: l.end_class):
        lines.append(
            f'  "{loop.end_class}" -> "{loop.start_class}"'
            f' [style=dotted, label="loop"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
