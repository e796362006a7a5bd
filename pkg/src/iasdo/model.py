"""In-memory representation of a complete information manufacturing model.

A :class:`ModelSpec` bundles the full specification tuple: classes, the
existential-dependency (ED) and dynamic-specialisation (DS) link tables,
back-inactive declarations, access views, loop declarations, processes,
roles, privilege grants, and responsibilities. Construction enforces name
uniqueness and referential closure; everything else (acyclicity, root
counts, rule compliance) is the validator's job, so a ModelSpec may hold a
semantically broken model on purpose.

All query operations here are pure functions of an immutable model and are
safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple

from .conditions import Condition, atoms_of, same_ancestor_atoms
from .errors import MultipleRootsError, UnknownClassError


class LinkMode(str, Enum):
    IMPERATIVE = "imperative"
    OPTIONAL = "optional"


class Privilege(str, Enum):
    CREATE = "create"
    MODIFY = "modify"
    DELETE = "delete"
    QUERY = "query"


class EffectKind(str, Enum):
    CREATE = "create"
    MIGRATE = "migrate"


def _check_unique(items: Iterable[str], what: str) -> None:
    seen: set[str] = set()
    for item in items:
        if item in seen:
            raise ValueError(f"duplicate {what}: {item!r}")
        seen.add(item)


@dataclass(frozen=True)
class ClassDef:
    """A named class with ordered attribute and method name lists."""

    name: str
    attributes: tuple[str, ...] = ()
    methods: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("class name must be non-empty")
        _check_unique(self.attributes, f"attribute on class {self.name}")
        _check_unique(self.methods, f"method on class {self.name}")


@dataclass(frozen=True)
class EdLink:
    """Existential dependency: objects of ``source`` depend on an object of
    ``target`` (imperative: exactly one; optional: zero or one)."""

    source: str
    target: str
    mode: LinkMode

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"ED link from {self.source!r} to itself")


@dataclass(frozen=True)
class DsLink:
    """Dynamic specialisation: ``sub`` is a direct sub-class of ``super``.

    ``back_inactive`` marks that entering ``sub`` deactivates the object's
    membership in ``super``; non-adjacent deactivation targets are declared
    separately with :class:`BackInactiveDecl`.
    """

    sub: str
    super: str
    mode: LinkMode
    back_inactive: bool = False

    def __post_init__(self) -> None:
        if self.sub == self.super:
            raise ValueError(f"DS link from {self.sub!r} to itself")


@dataclass(frozen=True)
class BackInactiveDecl:
    """Entering ``sub`` deactivates the membership in ``ancestor`` (which may
    be any DS ancestor, not only the direct super)."""

    sub: str
    ancestor: str


@dataclass(frozen=True)
class AccessView:
    """Selected ancestor properties visible on ``owner`` in addition to its
    own attributes and methods."""

    owner: str
    selected_attributes: tuple[tuple[str, str], ...] = ()
    selected_methods: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        for pairs, what in (
            (self.selected_attributes, "attribute selection"),
            (self.selected_methods, "method selection"),
        ):
            _check_unique((f"{c}.{p}" for c, p in pairs), f"{what} on {self.owner}")


@dataclass(frozen=True)
class LoopDecl:
    """Entering ``end_class`` re-creates the object's membership in
    ``start_class`` with an incremented generation."""

    end_class: str
    start_class: str

    def __post_init__(self) -> None:
        if self.end_class == self.start_class:
            raise ValueError(f"loop from {self.end_class!r} to itself")


@dataclass(frozen=True)
class Effect:
    """One declared state change of a process.

    ``migrate`` moves the object bound to ``source_binding`` into
    ``target_class``; ``create`` makes a new object in ``target_class``,
    attached to the object bound to ``source_binding`` when given. A guard
    condition, when present, decides at execution time whether the effect
    applies (a false guard skips the effect, it does not fail the process).
    """

    kind: EffectKind
    target_class: str
    source_binding: str | None = None
    guard: Condition | None = None

    def __post_init__(self) -> None:
        if self.kind is EffectKind.MIGRATE and self.source_binding is None:
            raise ValueError("migrate effect requires a source binding")


@dataclass(frozen=True)
class ProcessDef:
    """A process with input/output class sets, pre/post conditions and an
    ordered effect list."""

    name: str
    inputs: frozenset[str]
    outputs: frozenset[str]
    precondition: Condition
    postcondition: Condition
    effects: tuple[Effect, ...] = ()


@dataclass(frozen=True)
class RoleDef:
    name: str


@dataclass(frozen=True)
class PrivilegeGrant:
    role: str
    class_name: str
    privilege: Privilege


@dataclass(frozen=True)
class Responsibility:
    role: str
    process: str


class AccessViewResult(NamedTuple):
    attributes: frozenset[str]
    methods: frozenset[str]


@dataclass(frozen=True)
class ModelSpec:
    """The complete model tuple. Immutable and thread-safe after construction."""

    classes: tuple[ClassDef, ...] = ()
    ed_links: tuple[EdLink, ...] = ()
    ds_links: tuple[DsLink, ...] = ()
    back_inactive_decls: tuple[BackInactiveDecl, ...] = ()
    access_views: tuple[AccessView, ...] = ()
    loops: tuple[LoopDecl, ...] = ()
    processes: tuple[ProcessDef, ...] = ()
    roles: tuple[RoleDef, ...] = ()
    privilege_grants: tuple[PrivilegeGrant, ...] = ()
    responsibilities: tuple[Responsibility, ...] = ()

    def __post_init__(self) -> None:
        _check_unique((c.name for c in self.classes), "class")
        _check_unique((r.name for r in self.roles), "role")
        _check_unique((p.name for p in self.processes), "process")
        _check_unique((f"{l.source}->{l.target}" for l in self.ed_links), "ED link")
        _check_unique((f"{l.sub}->{l.super}" for l in self.ds_links), "DS link")
        _check_unique(
            (f"{d.sub}->{d.ancestor}" for d in self.back_inactive_decls),
            "back-inactive declaration",
        )
        _check_unique((v.owner for v in self.access_views), "access view owner")
        _check_unique((l.end_class for l in self.loops), "loop end class")
        _check_unique(
            (f"{g.role}:{g.privilege.value}:{g.class_name}" for g in self.privilege_grants),
            "privilege grant",
        )
        _check_unique(
            (f"{r.role}:{r.process}" for r in self.responsibilities), "responsibility"
        )
        self._check_closure()

    # -- referential closure -------------------------------------------------

    def _check_closure(self) -> None:
        classes = {c.name for c in self.classes}
        roles = {r.name for r in self.roles}
        processes = {p.name for p in self.processes}

        def need_class(name: str, where: str) -> None:
            if name not in classes:
                raise ValueError(f"{where} references undeclared class {name!r}")

        for link in self.ed_links:
            need_class(link.source, "ED link")
            need_class(link.target, "ED link")
        for link in self.ds_links:
            need_class(link.sub, "DS link")
            need_class(link.super, "DS link")
        for decl in self.back_inactive_decls:
            need_class(decl.sub, "back-inactive declaration")
            need_class(decl.ancestor, "back-inactive declaration")
        for view in self.access_views:
            need_class(view.owner, "access view")
            for cls, _prop in view.selected_attributes + view.selected_methods:
                need_class(cls, f"access view of {view.owner}")
        for loop in self.loops:
            need_class(loop.end_class, "loop declaration")
            need_class(loop.start_class, "loop declaration")
        for proc in self.processes:
            where = f"process {proc.name}"
            for name in proc.inputs | proc.outputs:
                need_class(name, where)
            for cond in (proc.precondition, proc.postcondition):
                for name in atoms_of(cond):
                    need_class(name, where)
            for effect in proc.effects:
                need_class(effect.target_class, where)
                if effect.source_binding is not None:
                    need_class(effect.source_binding, where)
                if effect.guard is not None:
                    for name in atoms_of(effect.guard):
                        need_class(name, where)
                    for atom in same_ancestor_atoms(effect.guard):
                        need_class(atom.left, where)
                        need_class(atom.right, where)
                        need_class(atom.ancestor, where)
        for grant in self.privilege_grants:
            if grant.role not in roles:
                raise ValueError(f"grant references undeclared role {grant.role!r}")
            need_class(grant.class_name, "grant")
        for resp in self.responsibilities:
            if resp.role not in roles:
                raise ValueError(
                    f"responsibility references undeclared role {resp.role!r}"
                )
            if resp.process not in processes:
                raise ValueError(
                    f"responsibility references undeclared process {resp.process!r}"
                )

    # -- derived indexes (cached; the dataclass is frozen but not slotted) ----

    @cached_property
    def class_by_name(self) -> dict[str, ClassDef]:
        return {c.name: c for c in self.classes}

    @cached_property
    def process_by_name(self) -> dict[str, ProcessDef]:
        return {p.name: p for p in self.processes}

    @cached_property
    def role_names(self) -> frozenset[str]:
        return frozenset(r.name for r in self.roles)

    @cached_property
    def ds_links_by_sub(self) -> dict[str, tuple[DsLink, ...]]:
        out: dict[str, list[DsLink]] = {}
        for link in self.ds_links:
            out.setdefault(link.sub, []).append(link)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def ds_links_by_super(self) -> dict[str, tuple[DsLink, ...]]:
        out: dict[str, list[DsLink]] = {}
        for link in self.ds_links:
            out.setdefault(link.super, []).append(link)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def ed_links_by_source(self) -> dict[str, tuple[EdLink, ...]]:
        out: dict[str, list[EdLink]] = {}
        for link in self.ed_links:
            out.setdefault(link.source, []).append(link)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def access_view_by_owner(self) -> dict[str, AccessView]:
        return {v.owner: v for v in self.access_views}

    @cached_property
    def loop_by_end(self) -> dict[str, LoopDecl]:
        return {l.end_class: l for l in self.loops}

    @cached_property
    def grant_set(self) -> frozenset[tuple[str, str, Privilege]]:
        return frozenset(
            (g.role, g.class_name, g.privilege) for g in self.privilege_grants
        )

    @cached_property
    def responsibility_set(self) -> frozenset[tuple[str, str]]:
        return frozenset((r.role, r.process) for r in self.responsibilities)

    def has_grant(self, role: str, class_name: str, privilege: Privilege) -> bool:
        return (role, class_name, privilege) in self.grant_set

    def ds_link(self, sub: str, super_name: str) -> DsLink | None:
        for link in self.ds_links_by_sub.get(sub, ()):
            if link.super == super_name:
                return link
        return None

    def ed_link(self, source: str, target: str) -> EdLink | None:
        for link in self.ed_links_by_source.get(source, ()):
            if link.target == target:
                return link
        return None

    def canonicalized(self) -> "ModelSpec":
        """Copy with all declaration tables in canonical order; use this for
        structural comparison that ignores declaration order."""
        return ModelSpec(
            classes=tuple(sorted(self.classes, key=lambda c: c.name)),
            ed_links=tuple(sorted(self.ed_links, key=lambda l: (l.source, l.target))),
            ds_links=tuple(sorted(self.ds_links, key=lambda l: (l.sub, l.super))),
            back_inactive_decls=tuple(
                sorted(self.back_inactive_decls, key=lambda d: (d.sub, d.ancestor))
            ),
            access_views=tuple(
                sorted(
                    (
                        AccessView(
                            owner=v.owner,
                            selected_attributes=tuple(sorted(v.selected_attributes)),
                            selected_methods=tuple(sorted(v.selected_methods)),
                        )
                        for v in self.access_views
                    ),
                    key=lambda v: v.owner,
                )
            ),
            loops=tuple(sorted(self.loops, key=lambda l: l.end_class)),
            processes=tuple(sorted(self.processes, key=lambda p: p.name)),
            roles=tuple(sorted(self.roles, key=lambda r: r.name)),
            privilege_grants=tuple(
                sorted(
                    self.privilege_grants,
                    key=lambda g: (g.role, g.class_name, g.privilege.value),
                )
            ),
            responsibilities=tuple(
                sorted(self.responsibilities, key=lambda r: (r.role, r.process))
            ),
        )


# -- graph queries ------------------------------------------------------------


def _require_class(model: ModelSpec, class_name: str) -> None:
    if class_name not in model.class_by_name:
        raise UnknownClassError(f"unknown class {class_name!r}")


def direct_supers(model: ModelSpec, class_name: str) -> set[tuple[str, LinkMode]]:
    """Direct DS super-classes of ``class_name`` with their link modes."""
    _require_class(model, class_name)
    return {
        (link.super, link.mode) for link in model.ds_links_by_sub.get(class_name, ())
    }


def ancestors(model: ModelSpec, class_name: str) -> set[str]:
    """Transitive closure over DS super edges. Never contains the class
    itself on acyclic models; cycle-safe on broken ones."""
    _require_class(model, class_name)
    seen: set[str] = set()
    frontier = [class_name]
    while frontier:
        current = frontier.pop()
        for link in model.ds_links_by_sub.get(current, ()):
            if link.super not in seen:
                seen.add(link.super)
                frontier.append(link.super)
    return seen


def descendants(model: ModelSpec, class_name: str) -> set[str]:
    """Transitive closure over DS sub edges."""
    _require_class(model, class_name)
    seen: set[str] = set()
    frontier = [class_name]
    while frontier:
        current = frontier.pop()
        for link in model.ds_links_by_super.get(current, ()):
            if link.sub not in seen:
                seen.add(link.sub)
                frontier.append(link.sub)
    return seen


def imperative_ancestors(model: ModelSpec, class_name: str) -> set[str]:
    """Ancestors reachable through imperative DS links only."""
    _require_class(model, class_name)
    seen: set[str] = set()
    frontier = [class_name]
    while frontier:
        current = frontier.pop()
        for link in model.ds_links_by_sub.get(current, ()):
            if link.mode is LinkMode.IMPERATIVE and link.super not in seen:
                seen.add(link.super)
                frontier.append(link.super)
    return seen


def ds_component(model: ModelSpec, class_name: str) -> set[str]:
    """Classes connected to ``class_name`` through DS links, ignoring
    direction. A class with no DS links forms a singleton component."""
    _require_class(model, class_name)
    seen = {class_name}
    frontier = [class_name]
    while frontier:
        current = frontier.pop()
        neighbours = [l.super for l in model.ds_links_by_sub.get(current, ())]
        neighbours += [l.sub for l in model.ds_links_by_super.get(current, ())]
        for other in neighbours:
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    return seen


def ds_root(model: ModelSpec, class_name: str) -> str:
    """The unique class of this DS component with no DS super.

    Raises :class:`MultipleRootsError` on components with zero or several
    roots; run the validator first to rule those out.
    """
    component = ds_component(model, class_name)
    roots = sorted(c for c in component if not model.ds_links_by_sub.get(c))
    if len(roots) != 1:
        raise MultipleRootsError(
            f"DS component of {class_name!r} has {len(roots)} root classes: {roots}"
        )
    return roots[0]


def classes_between(model: ModelSpec, end_class: str, start_class: str) -> set[str]:
    """Classes lying strictly between ``end_class`` and ``start_class`` in
    the DS graph: proper ancestors of the end that are proper descendants of
    the start. Used for loop re-entry deactivation."""
    return ancestors(model, end_class) & descendants(model, start_class)


def effective_access_view(model: ModelSpec, class_name: str) -> AccessViewResult:
    """The class's own attributes and methods plus its declared selections.

    With no access-view declaration the class exposes its own properties
    only. Selected properties are taken by name; the owning class of each
    selection is resolved at value-storage time by the runtime.
    """
    _require_class(model, class_name)
    cls = model.class_by_name[class_name]
    attributes = set(cls.attributes)
    methods = set(cls.methods)
    view = model.access_view_by_owner.get(class_name)
    if view is not None:
        attributes.update(prop for _cls, prop in view.selected_attributes)
        methods.update(prop for _cls, prop in view.selected_methods)
    return AccessViewResult(frozenset(attributes), frozenset(methods))
