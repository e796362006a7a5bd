"""Static rule checks over a parsed model.

Rule catalog (findings are data, never exceptions):

  V1  acyclicity of the combined ED and DS graph          error
  V2  one root class per DS component                      error
  V3  mono-specialisation links must be imperative         error
  V4  access-view selections exist on a DS ancestor        error
      (selection from an optional-only ancestor)           warning
  V5  back-inactive targets are DS ancestors               error
  V6  loop start classes are DS ancestors of the end       error
  V7  condition atoms stay within input/output scope       error
  V8  effects are well-formed single-step state changes    error
  V9  'not' in a condition (portability)                   warning
  R1  every process output reaches an input via ED/DS      error
  R2  responsible roles hold create-on-output and
      query-on-input privileges                            error

Reports are deterministic: diagnostics are ordered by rule, then by the
offending element names, so validating the same model twice yields
identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from .conditions import Condition, atoms_of, contains_not, same_ancestor_atoms
from .errors import UnknownClassError, UnknownProcessError
from .model import (
    EffectKind,
    LinkMode,
    ModelSpec,
    Privilege,
    PrivilegeGrant,
    ProcessDef,
    ancestors,
    imperative_ancestors,
)

RULE_ORDER = ("V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8", "V9", "R1", "R2")


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    severity: Severity
    elements: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]

    @cached_property
    def error_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity is Severity.ERROR)

    @cached_property
    def warning_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity is Severity.WARNING)

    @property
    def is_clean(self) -> bool:
        return not self.diagnostics

    @property
    def has_errors(self) -> bool:
        return self.error_count > 0

    def by_rule(self, rule: str) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.rule == rule)


def _dependency_successors(model: ModelSpec, class_name: str) -> list[str]:
    """Classes one dependency step away: ED targets and DS supers."""
    out = [l.target for l in model.ed_links_by_source.get(class_name, ())]
    out += [l.super for l in model.ds_links_by_sub.get(class_name, ())]
    return out


def reaches_input(
    model: ModelSpec, process: str, output_class: str, direct_only: bool = False
) -> bool:
    """True iff ``output_class`` reaches some input class of ``process``
    along ED/DS dependency edges. An output that is itself an input counts
    (zero-length path). ``direct_only`` restricts to a single edge."""
    proc = model.process_by_name.get(process)
    if proc is None:
        raise UnknownProcessError(f"unknown process {process!r}")
    if output_class not in model.class_by_name:
        raise UnknownClassError(f"unknown class {output_class!r}")
    if output_class in proc.inputs:
        return True
    if direct_only:
        return any(
            step in proc.inputs
            for step in _dependency_successors(model, output_class)
        )
    seen = {output_class}
    frontier = [output_class]
    while frontier:
        current = frontier.pop()
        for step in _dependency_successors(model, current):
            if step in proc.inputs:
                return True
            if step not in seen:
                seen.add(step)
                frontier.append(step)
    return False


# -- individual rules ------------------------------------------------------------


def _check_v1(model: ModelSpec) -> list[Diagnostic]:
    """Cycle detection over the combined ED/DS graph (iterative DFS)."""
    graph = {c.name: sorted(set(_dependency_successors(model, c.name)))
             for c in model.classes}
    colour: dict[str, int] = {}  # 0 visiting, 1 done
    stack_trace: list[str] = []
    cycles: set[tuple[str, ...]] = set()

    def visit(start: str) -> None:
        stack: list[tuple[str, int]] = [(start, 0)]
        while stack:
            node, idx = stack.pop()
            if idx == 0:
                colour[node] = 0
                stack_trace.append(node)
            succs = graph[node]
            if idx < len(succs):
                stack.append((node, idx + 1))
                nxt = succs[idx]
                if colour.get(nxt) == 0:
                    cycle = tuple(sorted(stack_trace[stack_trace.index(nxt):]))
                    cycles.add(cycle)
                elif nxt not in colour:
                    stack.append((nxt, 0))
            else:
                colour[node] = 1
                stack_trace.pop()

    for name in sorted(graph):
        if name not in colour:
            visit(name)
    return [
        Diagnostic(
            "V1",
            Severity.ERROR,
            cycle,
            "dependency cycle through " + " -> ".join(cycle),
        )
        for cycle in sorted(cycles)
    ]


def _check_v2(model: ModelSpec) -> list[Diagnostic]:
    """Every DS connected component needs exactly one rootless class."""
    neighbours: dict[str, set[str]] = {}
    for link in model.ds_links:
        neighbours.setdefault(link.sub, set()).add(link.super)
        neighbours.setdefault(link.super, set()).add(link.sub)
    out: list[Diagnostic] = []
    seen: set[str] = set()
    for name in sorted(neighbours):
        if name in seen:
            continue
        component = {name}
        frontier = [name]
        while frontier:
            current = frontier.pop()
            for other in neighbours[current]:
                if other not in component:
                    component.add(other)
                    frontier.append(other)
        seen |= component
        roots = sorted(c for c in component if not model.ds_links_by_sub.get(c))
        if len(roots) != 1:
            out.append(
                Diagnostic(
                    "V2",
                    Severity.ERROR,
                    tuple(sorted(component)),
                    f"DS component has {len(roots)} root classes"
                    + (f" ({', '.join(roots)})" if roots else ""),
                )
            )
    return out


def _check_v3(model: ModelSpec) -> list[Diagnostic]:
    """A single direct super (mono-specialisation) must be imperative."""
    out = []
    for cls in model.classes:
        links = model.ds_links_by_sub.get(cls.name, ())
        if len(links) == 1 and links[0].mode is not LinkMode.IMPERATIVE:
            out.append(
                Diagnostic(
                    "V3",
                    Severity.ERROR,
                    (cls.name, links[0].super),
                    f"{cls.name} has a single direct super-class "
                    f"{links[0].super}; the link must be imperative",
                )
            )
    return out


def _check_v4(model: ModelSpec) -> list[Diagnostic]:
    """Access-view selections must exist on the owner or a DS ancestor;
    selecting through optional-only links is flagged as a warning."""
    out = []
    for view in model.access_views:
        ancestry = ancestors(model, view.owner)
        imperative = imperative_ancestors(model, view.owner)
        selections = [("attribute", c, p) for c, p in view.selected_attributes]
        selections += [("method", c, p) for c, p in view.selected_methods]
        for what, cls, prop in selections:
            element = (view.owner, f"{cls}.{prop}")
            if cls != view.owner and cls not in ancestry:
                out.append(
                    Diagnostic(
                        "V4",
                        Severity.ERROR,
                        element,
                        f"access view of {view.owner} selects from {cls}, "
                        "which is not a DS ancestor",
                    )
                )
                continue
            declared = (
                model.class_by_name[cls].attributes
                if what == "attribute"
                else model.class_by_name[cls].methods
            )
            if prop not in declared:
                out.append(
                    Diagnostic(
                        "V4",
                        Severity.ERROR,
                        element,
                        f"access view of {view.owner} selects {what} "
                        f"{cls}.{prop}, which does not exist",
                    )
                )
            elif cls != view.owner and cls not in imperative:
                out.append(
                    Diagnostic(
                        "V4",
                        Severity.WARNING,
                        element,
                        f"access view of {view.owner} selects from {cls}, "
                        "which is reachable only through optional DS links",
                    )
                )
    return out


def _check_v5(model: ModelSpec) -> list[Diagnostic]:
    """Back-inactive targets must be DS ancestors of the entered class."""
    out = []
    for decl in model.back_inactive_decls:
        if decl.ancestor not in ancestors(model, decl.sub):
            out.append(
                Diagnostic(
                    "V5",
                    Severity.ERROR,
                    (decl.sub, decl.ancestor),
                    f"back-inactive declares {decl.ancestor} for {decl.sub}, "
                    "but it is not a DS ancestor",
                )
            )
    return out


def _check_v6(model: ModelSpec) -> list[Diagnostic]:
    """Loop start classes must be DS ancestors of the loop end."""
    out = []
    for loop in model.loops:
        if loop.start_class not in ancestors(model, loop.end_class):
            out.append(
                Diagnostic(
                    "V6",
                    Severity.ERROR,
                    (loop.end_class, loop.start_class),
                    f"loop start {loop.start_class} is not a DS ancestor of "
                    f"{loop.end_class}",
                )
            )
    return out


def _scope_diagnostics(
    proc: ProcessDef, cond: Condition, scope: frozenset[str], which: str
) -> list[Diagnostic]:
    out = []
    scope_name = "inputs" if which == "precondition" else "outputs"
    for atom in sorted(atoms_of(cond) - scope):
        out.append(
            Diagnostic(
                "V7",
                Severity.ERROR,
                (proc.name, atom),
                f"{which} of process {proc.name} references {atom} "
                f"outside the process {scope_name}",
            )
        )
    if same_ancestor_atoms(cond):
        out.append(
            Diagnostic(
                "V7",
                Severity.ERROR,
                (proc.name,),
                f"{which} of process {proc.name} uses same_ancestor, "
                "which is only allowed in effect guards",
            )
        )
    return out


def _check_v7(model: ModelSpec) -> list[Diagnostic]:
    """Precondition atoms stay within inputs, postcondition atoms within
    outputs."""
    out: list[Diagnostic] = []
    for proc in model.processes:
        out += _scope_diagnostics(proc, proc.precondition, proc.inputs, "precondition")
        out += _scope_diagnostics(proc, proc.postcondition, proc.outputs, "postcondition")
    return out


def _check_v8(model: ModelSpec) -> list[Diagnostic]:
    """Effects must bind within scope, target output classes, and migrate
    along a single downward DS edge or a declared loop."""
    out: list[Diagnostic] = []
    for proc in model.processes:
        scope = proc.inputs | proc.outputs
        for index, effect in enumerate(proc.effects):
            problems: list[str] = []
            if effect.target_class not in proc.outputs:
                problems.append(
                    f"target {effect.target_class} is not an output class"
                )
            if effect.source_binding is not None and effect.source_binding not in scope:
                problems.append(
                    f"binding {effect.source_binding} is outside the "
                    "process inputs and outputs"
                )
            if effect.kind is EffectKind.MIGRATE and effect.source_binding in scope:
                source = effect.source_binding
                loop = model.loop_by_end.get(source)
                single_step = (
                    model.ds_link(effect.target_class, source) is not None
                )
                loop_step = loop is not None and loop.start_class == effect.target_class
                if not single_step and not loop_step:
                    problems.append(
                        f"{effect.target_class} is not one DS step below "
                        f"{source} and no loop covers the move"
                    )
            if effect.guard is not None:
                for atom in sorted(atoms_of(effect.guard) - scope):
                    problems.append(f"guard references {atom} outside the scope")
                for atom in same_ancestor_atoms(effect.guard):
                    for bound in (atom.left, atom.right):
                        if bound not in scope:
                            problems.append(
                                f"guard same_ancestor binds {bound} outside the scope"
                            )
            if problems:
                out.append(
                    Diagnostic(
                        "V8",
                        Severity.ERROR,
                        (proc.name, f"effect[{index}]", effect.target_class),
                        f"effect {index} of process {proc.name}: "
                        + "; ".join(problems),
                    )
                )
    return out


def _check_v9(model: ModelSpec) -> list[Diagnostic]:
    """'not' is accepted but flagged: plain connector vocabularies are
    and/or/xor only."""
    out = []
    for proc in model.processes:
        conditions = [proc.precondition, proc.postcondition]
        conditions += [e.guard for e in proc.effects if e.guard is not None]
        if any(contains_not(c) for c in conditions):
            out.append(
                Diagnostic(
                    "V9",
                    Severity.WARNING,
                    (proc.name,),
                    f"process {proc.name} uses 'not' in a condition; "
                    "this may not port to connector-only notations",
                )
            )
    return out


def _check_r1(model: ModelSpec, direct_only: bool) -> list[Diagnostic]:
    """Every output class must link back to an input of its process."""
    out = []
    for proc in model.processes:
        for output in sorted(proc.outputs):
            if not reaches_input(model, proc.name, output, direct_only):
                out.append(
                    Diagnostic(
                        "R1",
                        Severity.ERROR,
                        (proc.name, output),
                        f"output {output} of process {proc.name} has no ED/DS "
                        "path to any input class",
                    )
                )
    return out


def _required_r2_grants(model: ModelSpec) -> dict[tuple[str, str, Privilege], list[str]]:
    """Map each grant R2 requires to the processes demanding it."""
    required: dict[tuple[str, str, Privilege], list[str]] = {}
    for resp in model.responsibilities:
        proc = model.process_by_name[resp.process]
        for output in sorted(proc.outputs):
            required.setdefault((resp.role, output, Privilege.CREATE), []).append(
                proc.name
            )
        for input_class in sorted(proc.inputs):
            required.setdefault((resp.role, input_class, Privilege.QUERY), []).append(
                proc.name
            )
    return required


def _check_r2(model: ModelSpec) -> list[Diagnostic]:
    """Responsible roles need create on outputs and query on inputs. One
    diagnostic per missing grant, however many processes require it."""
    out = []
    for (role, cls, privilege), procs in sorted(
        _required_r2_grants(model).items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].value)
    ):
        if not model.has_grant(role, cls, privilege):
            out.append(
                Diagnostic(
                    "R2",
                    Severity.ERROR,
                    (role, cls),
                    f"role {role} needs {privilege.value} privilege on {cls} "
                    f"for process(es) {', '.join(sorted(set(procs)))}",
                )
            )
    return out


def missing_r2_grants(model: ModelSpec) -> tuple[PrivilegeGrant, ...]:
    """The minimal grants that would silence every R2 diagnostic."""
    missing = [
        PrivilegeGrant(role, cls, privilege)
        for (role, cls, privilege) in sorted(
            _required_r2_grants(model), key=lambda k: (k[0], k[1], k[2].value)
        )
        if not model.has_grant(role, cls, privilege)
    ]
    return tuple(missing)


def validate(model: ModelSpec, *, strict_r1_direct: bool = False) -> ValidationReport:
    """Run the full rule catalog and return an ordered report.

    Pure and idempotent: equal models produce identical reports.
    """
    diagnostics: list[Diagnostic] = []
    diagnostics += _check_v1(model)
    diagnostics += _check_v2(model)
    diagnostics += _check_v3(model)
    diagnostics += _check_v4(model)
    diagnostics += _check_v5(model)
    diagnostics += _check_v6(model)
    diagnostics += _check_v7(model)
    diagnostics += _check_v8(model)
    diagnostics += _check_v9(model)
    diagnostics += _check_r1(model, strict_r1_direct)
    diagnostics += _check_r2(model)
    diagnostics.sort(key=lambda d: (RULE_ORDER.index(d.rule), d.elements))
    return ValidationReport(tuple(diagnostics))
