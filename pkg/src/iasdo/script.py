"""Trace scripts: one runtime command per line, replayed against a model.

    create <class> as <role> [ed <class>=<id> ...] [super <id>]
    exec <process> as <role> [<class>=<id> ...]
    migrate <id> -> <class> as <role>
    modify <id>.<class>.<attr> = <value> as <role>
    query <id>.<class> as <role>
    assert <id>.<class> <predicate>     # active | inactive | member
                                        # | not-member | generation=<n>
    fail <command>                      # the wrapped command must fail

Object ids are literal integers: allocation is deterministic (1, 2, 3, ...)
so scripts can reference objects they created. ``#`` starts a comment.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from typing import Any

from .errors import IasdoError, ScriptError
from .model import ModelSpec
from .runtime import (
    OutcomeStatus,
    WorldState,
    create_object,
    execute_process,
    migrate,
    modify_attribute,
    query_object,
)

PREDICATES = ("active", "inactive", "member", "not-member")


@dataclass(frozen=True)
class Command:
    action: str
    args: dict[str, Any]


@dataclass(frozen=True)
class ScriptLine:
    line_no: int
    text: str
    command: Command
    expect_failure: bool


@dataclass(frozen=True)
class LineResult:
    line_no: int
    text: str
    ok: bool
    message: str


@dataclass
class ScriptResult:
    lines: list[LineResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(line.ok for line in self.lines)

    @property
    def failures(self) -> list[LineResult]:
        return [line for line in self.lines if not line.ok]


def _int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ScriptError(line_no, f"{what} must be an integer, got {token!r}")


def _object_ref(token: str, line_no: int) -> tuple[int, str]:
    parts = token.split(".")
    if len(parts) != 2:
        return (-1, "")  # caller reports
    return _int(parts[0], line_no, "object id"), parts[1]


def _parse_create(tokens: list[str], line_no: int) -> Command:
    if len(tokens) < 4 or tokens[2] != "as":
        raise ScriptError(line_no, "usage: create <class> as <role> [ed C=id ...] [super id]")
    class_name, role = tokens[1], tokens[3]
    ed_targets: dict[str, int] = {}
    super_obj: int | None = None
    rest = tokens[4:]
    i = 0
    while i < len(rest):
        if rest[i] == "ed" and i + 1 < len(rest) and "=" in rest[i + 1]:
            cls, _, value = rest[i + 1].partition("=")
            ed_targets[cls] = _int(value, line_no, "ED target id")
            i += 2
        elif rest[i] == "super" and i + 1 < len(rest):
            super_obj = _int(rest[i + 1], line_no, "super object id")
            i += 2
        else:
            raise ScriptError(line_no, f"unexpected token {rest[i]!r} in create")
    return Command(
        "create",
        {"class_name": class_name, "role": role, "ed_targets": ed_targets, "super_obj": super_obj},
    )


def _parse_exec(tokens: list[str], line_no: int) -> Command:
    if len(tokens) < 4 or tokens[2] != "as":
        raise ScriptError(line_no, "usage: exec <process> as <role> [C=id ...]")
    bindings: dict[str, int] = {}
    for token in tokens[4:]:
        if "=" not in token:
            raise ScriptError(line_no, f"expected <class>=<id>, got {token!r}")
        cls, _, value = token.partition("=")
        bindings[cls] = _int(value, line_no, "binding id")
    return Command("exec", {"process": tokens[1], "role": tokens[3], "bindings": bindings})


def _parse_line(line_no: int, tokens: list[str]) -> Command:
    action = tokens[0]
    if action == "create":
        return _parse_create(tokens, line_no)
    if action == "exec":
        return _parse_exec(tokens, line_no)
    if action == "migrate":
        if len(tokens) != 6 or tokens[2] != "->" or tokens[4] != "as":
            raise ScriptError(line_no, "usage: migrate <id> -> <class> as <role>")
        return Command(
            "migrate",
            {
                "object_id": _int(tokens[1], line_no, "object id"),
                "target": tokens[3],
                "role": tokens[5],
            },
        )
    if action == "modify":
        if len(tokens) != 6 or tokens[2] != "=" or tokens[4] != "as":
            raise ScriptError(
                line_no, "usage: modify <id>.<class>.<attr> = <value> as <role>"
            )
        parts = tokens[1].split(".")
        if len(parts) != 3:
            raise ScriptError(line_no, f"expected <id>.<class>.<attr>, got {tokens[1]!r}")
        return Command(
            "modify",
            {
                "object_id": _int(parts[0], line_no, "object id"),
                "class_name": parts[1],
                "attribute": parts[2],
                "value": tokens[3],
                "role": tokens[5],
            },
        )
    if action == "query":
        if len(tokens) != 4 or tokens[2] != "as":
            raise ScriptError(line_no, "usage: query <id>.<class> as <role>")
        object_id, class_name = _object_ref(tokens[1], line_no)
        if not class_name:
            raise ScriptError(line_no, f"expected <id>.<class>, got {tokens[1]!r}")
        return Command(
            "query", {"object_id": object_id, "class_name": class_name, "role": tokens[3]}
        )
    if action == "assert":
        if len(tokens) != 3:
            raise ScriptError(line_no, "usage: assert <id>.<class> <predicate>")
        object_id, class_name = _object_ref(tokens[1], line_no)
        if not class_name:
            raise ScriptError(line_no, f"expected <id>.<class>, got {tokens[1]!r}")
        predicate = tokens[2]
        generation: int | None = None
        if predicate.startswith("generation="):
            generation = _int(predicate.split("=", 1)[1], line_no, "generation")
            predicate = "generation"
        elif predicate not in PREDICATES:
            raise ScriptError(
                line_no,
                f"unknown predicate {predicate!r}; expected one of "
                f"{', '.join(PREDICATES)} or generation=<n>",
            )
        return Command(
            "assert",
            {
                "object_id": object_id,
                "class_name": class_name,
                "predicate": predicate,
                "generation": generation,
            },
        )
    raise ScriptError(line_no, f"unknown command {action!r}")


def parse_script(text: str) -> list[ScriptLine]:
    lines: list[ScriptLine] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        tokens = shlex.split(stripped)
        expect_failure = False
        if tokens[0] == "fail":
            expect_failure = True
            tokens = tokens[1:]
            if not tokens:
                raise ScriptError(line_no, "'fail' must wrap a command")
            if tokens[0] == "assert":
                raise ScriptError(line_no, "'fail' cannot wrap an assertion")
        lines.append(
            ScriptLine(line_no, stripped, _parse_line(line_no, tokens), expect_failure)
        )
    return lines


class ScriptRunner:
    """Replays parsed script lines against a model-owned world."""

    def __init__(self, model: ModelSpec, world: WorldState | None = None) -> None:
        self.model = model
        self.world = world if world is not None else WorldState()

    def run(self, lines: list[ScriptLine]) -> ScriptResult:
        result = ScriptResult()
        for line in lines:
            ok, message = self._run_line(line)
            result.lines.append(LineResult(line.line_no, line.text, ok, message))
        return result

    def _run_line(self, line: ScriptLine) -> tuple[bool, str]:
        if line.command.action == "assert":
            return self._check_assert(line.command.args)
        try:
            message = self._execute(line.command)
            ok = True
        except IasdoError as exc:
            message = str(exc)
            ok = False
        if line.expect_failure:
            if ok:
                return False, f"expected failure but succeeded: {message}"
            return True, f"failed as expected: {message}"
        return ok, message

    def _execute(self, command: Command) -> str:
        args = command.args
        if command.action == "create":
            object_id = create_object(
                self.world,
                self.model,
                args["class_name"],
                args["role"],
                args["ed_targets"],
                args["super_obj"],
            )
            return f"object {object_id} in {args['class_name']}"
        if command.action == "exec":
            outcome = execute_process(
                self.world, self.model, args["process"], args["role"], args["bindings"]
            )
            if outcome.status is not OutcomeStatus.OK:
                raise IasdoError(
                    f"{args['process']}: {outcome.status.value}"
                    + (f" ({outcome.messages[0]})" if outcome.messages else "")
                )
            changed = [f"{obj}:{cls} g{gen}" for obj, cls, gen in outcome.created]
            changed += [f"{obj}:{cls} g{gen}" for obj, cls, gen in outcome.migrated]
            return f"{args['process']} ok ({'; '.join(changed) or 'no effects'})"
        if command.action == "migrate":
            membership = migrate(
                self.world, self.model, args["object_id"], args["target"], args["role"]
            )
            return (
                f"object {args['object_id']} entered {membership.class_name} "
                f"g{membership.generation}"
            )
        if command.action == "modify":
            modify_attribute(
                self.world,
                self.model,
                args["object_id"],
                args["class_name"],
                args["attribute"],
                args["value"],
                args["role"],
            )
            return f"set {args['object_id']}.{args['class_name']}.{args['attribute']}"
        if command.action == "query":
            snapshot = query_object(
                self.world, self.model, args["object_id"], args["class_name"], args["role"]
            )
            values = ", ".join(
                f"{k}={v!r}" for k, v in sorted(snapshot["attributes"].items())
            )
            return f"{snapshot['status']} g{snapshot['generation']}: {values}"
        raise AssertionError(f"unreachable action {command.action}")

    def _check_assert(self, args: dict[str, Any]) -> tuple[bool, str]:
        object_id, class_name = args["object_id"], args["class_name"]
        membership = self.world.current_membership(object_id, class_name)
        predicate = args["predicate"]
        label = f"{object_id}.{class_name}"
        if predicate == "member":
            return (membership is not None, f"{label} member: {membership is not None}")
        if predicate == "not-member":
            return (membership is None, f"{label} not-member: {membership is None}")
        if membership is None:
            return False, f"{label} has no membership"
        if predicate == "active":
            return (membership.status.value == "active", f"{label} is {membership.status.value}")
        if predicate == "inactive":
            return (membership.status.value == "inactive", f"{label} is {membership.status.value}")
        if predicate == "generation":
            return (
                membership.generation == args["generation"],
                f"{label} generation is {membership.generation}",
            )
        raise AssertionError(f"unreachable predicate {predicate}")
