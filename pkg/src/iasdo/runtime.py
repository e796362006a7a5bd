"""Runtime engine: executes a validated model.

A :class:`WorldState` stores objects as sets of class-membership episodes
with active/inactive status, existential-dependency instances between
objects, opaque attribute values, and an append-only event log. Every state
change is expressed as a list of primitive deltas attached to one event, so
replaying the log re-derives the world exactly (event-sourcing determinism).

Ownership contract: a world belongs to a single execution context and all
mutations are serialized through it; the model is shared read-only.
Failed process executions restore the world bit-for-bit.
"""

from __future__ import annotations

import copy
import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Iterator

from .conditions import Binding, eval_condition
from .errors import (
    AttributeAccessError,
    DependencyError,
    IasdoError,
    InactiveMembershipError,
    LoopError,
    MigrationRejected,
    PrivilegeError,
    UnknownClassError,
    UnknownObjectError,
    UnknownProcessError,
    UnknownRoleError,
)
from .model import (
    EffectKind,
    LinkMode,
    ModelSpec,
    Privilege,
    classes_between,
    effective_access_view,
)


class Status(str, Enum):
    ACTIVE = "active"
    INACTIVE = "inactive"


class OutcomeStatus(str, Enum):
    OK = "ok"
    PRECONDITION_FAILED = "precondition_failed"
    POSTCONDITION_FAILED = "postcondition_failed"
    PRIVILEGE_DENIED = "privilege_denied"
    NOT_RESPONSIBLE = "not_responsible"
    EFFECT_REJECTED = "effect_rejected"


# -- deltas: the primitive, replayable state changes ---------------------------


@dataclass(frozen=True)
class AllocObject:
    object_id: int


@dataclass(frozen=True)
class AddMembership:
    object_id: int
    class_name: str
    generation: int
    status: str
    super_link: tuple[str, int] | None
    created_at: int
    via: str  # create | migrate | loop


@dataclass(frozen=True)
class SetStatus:
    object_id: int
    class_name: str
    generation: int
    status: str


@dataclass(frozen=True)
class AddEdInstance:
    dependent: int
    target: int
    source_class: str
    target_class: str


@dataclass(frozen=True)
class SetAttribute:
    object_id: int
    class_name: str
    attribute: str
    value: str


@dataclass(frozen=True)
class RemoveObject:
    object_id: int


Delta = (
    AllocObject | AddMembership | SetStatus | AddEdInstance | SetAttribute | RemoveObject
)


def _delta_dict(delta: Delta) -> dict[str, Any]:
    out: dict[str, Any] = {"op": type(delta).__name__}
    for name, value in vars(delta).items():
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str  # create | migrate | loop | process | modify | query | delete
    role: str | None
    details: dict[str, Any]
    deltas: tuple[Delta, ...]


@dataclass
class Membership:
    object_id: int
    class_name: str
    generation: int
    status: Status
    super_link: tuple[str, int] | None
    created_at: int
    ordinal: int = 0  # global creation order, assigned on apply


@dataclass(frozen=True)
class EdInstance:
    dependent: int
    target: int
    source_class: str
    target_class: str


@dataclass(frozen=True)
class ExecutionOutcome:
    status: OutcomeStatus
    created: tuple[tuple[int, str, int], ...] = ()
    migrated: tuple[tuple[int, str, int], ...] = ()
    messages: tuple[str, ...] = ()


@dataclass(frozen=True)
class TraceEntry:
    class_name: str
    generation: int
    event_seq: int
    via: str
    role: str | None
    process: str | None
    deactivated_at: int | None


class WorldState:
    """Mutable object store; see the module docstring for the contract."""

    def __init__(self) -> None:
        self.next_object_id = 1
        self.memberships: dict[int, list[Membership]] = {}
        self.ed_instances: list[EdInstance] = []
        self.attributes: dict[tuple[int, str, str], str] = {}
        self.events: list[Event] = []
        self._ordinal = 0

    # lookups

    def object_exists(self, object_id: int) -> bool:
        return object_id in self.memberships

    def memberships_of(self, object_id: int) -> list[Membership]:
        if object_id not in self.memberships:
            raise UnknownObjectError(f"unknown object {object_id}")
        return self.memberships[object_id]

    def current_membership(self, object_id: int, class_name: str) -> Membership | None:
        best: Membership | None = None
        for m in self.memberships.get(object_id, ()):
            if m.class_name == class_name:
                if best is None or m.generation > best.generation:
                    best = m
        return best

    def is_active(self, object_id: int, class_name: str) -> bool:
        m = self.current_membership(object_id, class_name)
        return m is not None and m.status is Status.ACTIVE

    def ed_instance(self, dependent: int, source_class: str, target_class: str) -> EdInstance | None:
        for inst in self.ed_instances:
            if (
                inst.dependent == dependent
                and inst.source_class == source_class
                and inst.target_class == target_class
            ):
                return inst
        return None

    # mutation

    def apply(self, delta: Delta) -> None:
        if isinstance(delta, AllocObject):
            self.memberships.setdefault(delta.object_id, [])
            self.next_object_id = max(self.next_object_id, delta.object_id + 1)
        elif isinstance(delta, AddMembership):
            if any(
                m.class_name == delta.class_name and m.generation == delta.generation
                for m in self.memberships.get(delta.object_id, ())
            ):
                raise IasdoError(
                    f"duplicate membership ({delta.object_id}, "
                    f"{delta.class_name}, {delta.generation})"
                )
            self._ordinal += 1
            self.memberships.setdefault(delta.object_id, []).append(
                Membership(
                    delta.object_id,
                    delta.class_name,
                    delta.generation,
                    Status(delta.status),
                    delta.super_link,
                    delta.created_at,
                    self._ordinal,
                )
            )
        elif isinstance(delta, SetStatus):
            for m in self.memberships.get(delta.object_id, ()):
                if m.class_name == delta.class_name and m.generation == delta.generation:
                    m.status = Status(delta.status)
                    return
            raise IasdoError(
                f"no membership ({delta.object_id}, {delta.class_name}, "
                f"{delta.generation}) to update"
            )
        elif isinstance(delta, AddEdInstance):
            self.ed_instances.append(
                EdInstance(delta.dependent, delta.target, delta.source_class, delta.target_class)
            )
        elif isinstance(delta, SetAttribute):
            self.attributes[(delta.object_id, delta.class_name, delta.attribute)] = delta.value
        elif isinstance(delta, RemoveObject):
            self.memberships.pop(delta.object_id, None)
            self.ed_instances = [
                inst
                for inst in self.ed_instances
                if inst.dependent != delta.object_id and inst.target != delta.object_id
            ]
            self.attributes = {
                key: value
                for key, value in self.attributes.items()
                if key[0] != delta.object_id
            }
        else:
            raise TypeError(f"not a delta: {delta!r}")

    def commit(
        self, kind: str, role: str | None, details: dict[str, Any], deltas: list[Delta]
    ) -> Event:
        event = Event(len(self.events) + 1, kind, role, details, tuple(deltas))
        self.events.append(event)
        return event

    def next_seq(self) -> int:
        return len(self.events) + 1

    # snapshots

    def snapshot_dict(self) -> dict[str, Any]:
        memberships = sorted(
            (
                {
                    "object": m.object_id,
                    "class": m.class_name,
                    "generation": m.generation,
                    "status": m.status.value,
                    "super_link": list(m.super_link) if m.super_link else None,
                    "created_at": m.created_at,
                }
                for members in self.memberships.values()
                for m in members
            ),
            key=lambda d: (d["object"], d["created_at"], d["class"], d["generation"]),
        )
        instances = sorted(
            (
                {
                    "dependent": i.dependent,
                    "target": i.target,
                    "source_class": i.source_class,
                    "target_class": i.target_class,
                }
                for i in self.ed_instances
            ),
            key=lambda d: (d["dependent"], d["source_class"], d["target_class"]),
        )
        attributes = sorted(
            [obj, cls, attr, value]
            for (obj, cls, attr), value in self.attributes.items()
        )
        events = [
            {
                "seq": e.seq,
                "kind": e.kind,
                "role": e.role,
                "details": e.details,
                "deltas": [_delta_dict(d) for d in e.deltas],
            }
            for e in self.events
        ]
        return {
            "next_object_id": self.next_object_id,
            "memberships": memberships,
            "ed_instances": instances,
            "attributes": attributes,
            "events": events,
        }

    def clone(self) -> "WorldState":
        return copy.deepcopy(self)

    def restore(self, snapshot: "WorldState") -> None:
        self.__dict__.clear()
        self.__dict__.update(snapshot.__dict__)


def world_hash(world: WorldState) -> str:
    payload = json.dumps(world.snapshot_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def world_to_json(world: WorldState) -> str:
    return json.dumps(world.snapshot_dict(), indent=2, sort_keys=True)


def replay_events(events: Iterable[Event]) -> WorldState:
    """Rebuild a world from an event log by re-applying every delta."""
    world = WorldState()
    for event in events:
        for delta in event.deltas:
            world.apply(delta)
        world.events.append(event)
    return world


# -- shared checks --------------------------------------------------------------


def _require_class(model: ModelSpec, class_name: str) -> None:
    if class_name not in model.class_by_name:
        raise UnknownClassError(f"unknown class {class_name!r}")


def _require_role(model: ModelSpec, role: str) -> None:
    if role not in model.role_names:
        raise UnknownRoleError(f"unknown role {role!r}")


def _require_privilege(
    model: ModelSpec, role: str, class_name: str, privilege: Privilege
) -> None:
    if not model.has_grant(role, class_name, privilege):
        raise PrivilegeError(
            f"role {role} lacks {privilege.value} privilege on {class_name}"
        )


def _require_object(world: WorldState, object_id: int) -> None:
    if not world.object_exists(object_id):
        raise UnknownObjectError(f"unknown object {object_id}")


def same_ancestor(
    world: WorldState, model: ModelSpec, left: int, right: int, ancestor_class: str
) -> bool:
    """True when both objects' dependency chains share an object that is a
    member of ``ancestor_class``. Chains follow ED instances transitively;
    specialisation never leaves the object, so it adds nothing to the chain."""
    _require_class(model, ancestor_class)

    def chain(start: int) -> set[int]:
        seen = {start}
        frontier = [start]
        while frontier:
            current = frontier.pop()
            for inst in world.ed_instances:
                if inst.dependent == current and inst.target not in seen:
                    seen.add(inst.target)
                    frontier.append(inst.target)
        return seen

    shared = chain(left) & chain(right)
    return any(
        world.current_membership(obj, ancestor_class) is not None for obj in shared
    )


# -- membership machinery --------------------------------------------------------


def _record(world: WorldState, sink: list[Delta], delta: Delta) -> None:
    world.apply(delta)
    sink.append(delta)


def _attach_ed_instances(
    world: WorldState,
    model: ModelSpec,
    sink: list[Delta],
    object_id: int,
    class_name: str,
    ed_targets: dict[str, int],
) -> None:
    """Create ED instances for every dependency declared on ``class_name``.

    Imperative dependencies must be satisfiable; optional ones are attached
    opportunistically. Existing instances are permanent and never rebound.
    """
    links = model.ed_links_by_source.get(class_name, ())
    link_targets = {l.target for l in links}
    for key in ed_targets:
        if key not in link_targets:
            raise DependencyError(
                f"class {class_name} has no ED toward {key}"
            )
    for link in sorted(links, key=lambda l: l.target):
        if world.ed_instance(object_id, link.source, link.target) is not None:
            continue
        target_obj = ed_targets.get(link.target)
        if target_obj is None:
            if link.mode is LinkMode.IMPERATIVE:
                raise DependencyError(
                    f"entering {class_name} requires an ED target of class {link.target}"
                )
            continue
        _require_object(world, target_obj)
        if world.current_membership(target_obj, link.target) is None:
            raise DependencyError(
                f"object {target_obj} is not a member of {link.target}"
            )
        _record(
            world,
            sink,
            AddEdInstance(object_id, target_obj, link.source, link.target),
        )


def _next_generation(world: WorldState, object_id: int, class_name: str) -> int:
    prior = [
        m.generation
        for m in world.memberships.get(object_id, ())
        if m.class_name == class_name
    ]
    return max(prior, default=0) + 1


def _supersede_prior(
    world: WorldState, sink: list[Delta], object_id: int, class_name: str
) -> None:
    current = world.current_membership(object_id, class_name)
    if current is not None and current.status is Status.ACTIVE:
        _record(
            world,
            sink,
            SetStatus(object_id, class_name, current.generation, Status.INACTIVE.value),
        )


def _enter_class(
    world: WorldState,
    model: ModelSpec,
    sink: list[Delta],
    object_id: int,
    target_class: str,
    seq: int,
    via: str,
    ed_targets: dict[str, int],
) -> Membership:
    """Move an existing object one DS step down into ``target_class``."""
    links = model.ds_links_by_sub.get(target_class, ())
    if not links:
        raise MigrationRejected(
            f"{target_class} is a root class; objects enter it by creation"
        )
    active = sorted(
        (link.super for link in links if world.is_active(object_id, link.super))
    )
    if not active:
        raise MigrationRejected(
            f"object {object_id} has no active membership in a direct "
            f"super-class of {target_class}"
        )
    super_membership = world.current_membership(object_id, active[0])
    assert super_membership is not None
    generation = _next_generation(world, object_id, target_class)
    _supersede_prior(world, sink, object_id, target_class)
    _record(
        world,
        sink,
        AddMembership(
            object_id,
            target_class,
            generation,
            Status.ACTIVE.value,
            (super_membership.class_name, super_membership.generation),
            seq,
            via,
        ),
    )
    deactivate = [l.super for l in links if l.back_inactive]
    deactivate += [
        d.ancestor for d in model.back_inactive_decls if d.sub == target_class
    ]
    for cls in sorted(set(deactivate)):
        membership = world.current_membership(object_id, cls)
        if membership is not None and membership.status is Status.ACTIVE:
            _record(
                world,
                sink,
                SetStatus(object_id, cls, membership.generation, Status.INACTIVE.value),
            )
    _attach_ed_instances(world, model, sink, object_id, target_class, ed_targets)
    membership = world.current_membership(object_id, target_class)
    assert membership is not None
    return membership


def _loop_pending(world: WorldState, object_id: int, end_class: str, start_class: str) -> bool:
    end = world.current_membership(object_id, end_class)
    if end is None:
        return False
    start = world.current_membership(object_id, start_class)
    return start is None or start.ordinal < end.ordinal


def _loop_entry(
    world: WorldState,
    model: ModelSpec,
    sink: list[Delta],
    object_id: int,
    end_class: str,
    start_class: str,
    seq: int,
) -> Membership:
    """Re-create the object's membership in the loop start class and archive
    everything strictly between start and end as inactive. History is kept:
    prior generations stay in place for tracing."""
    generation = _next_generation(world, object_id, start_class)
    _supersede_prior(world, sink, object_id, start_class)
    super_link = None
    for link in sorted(
        model.ds_links_by_sub.get(start_class, ()), key=lambda l: l.super
    ):
        if world.is_active(object_id, link.super):
            membership = world.current_membership(object_id, link.super)
            assert membership is not None
            super_link = (membership.class_name, membership.generation)
            break
    _record(
        world,
        sink,
        AddMembership(
            object_id,
            start_class,
            generation,
            Status.ACTIVE.value,
            super_link,
            seq,
            "loop",
        ),
    )
    for cls in sorted(classes_between(model, end_class, start_class)):
        membership = world.current_membership(object_id, cls)
        if membership is not None and membership.status is Status.ACTIVE:
            _record(
                world,
                sink,
                SetStatus(object_id, cls, membership.generation, Status.INACTIVE.value),
            )
    membership = world.current_membership(object_id, start_class)
    assert membership is not None
    return membership


def _fire_declared_loop(
    world: WorldState,
    model: ModelSpec,
    sink: list[Delta],
    object_id: int,
    entered_class: str,
    seq: int,
) -> Membership | None:
    loop = model.loop_by_end.get(entered_class)
    if loop is None:
        return None
    return _loop_entry(
        world, model, sink, object_id, loop.end_class, loop.start_class, seq
    )


@contextmanager
def _atomic(world: WorldState) -> Iterator[None]:
    """Restore the world bit-for-bit if the wrapped operation raises, so a
    failed action never leaves deltas outside a committed event."""
    snapshot = world.clone()
    try:
        yield
    except BaseException:
        world.restore(snapshot)
        raise


# -- public operations ------------------------------------------------------------


def create_object(
    world: WorldState,
    model: ModelSpec,
    class_name: str,
    role: str,
    ed_targets: dict[str, int] | None = None,
    super_obj: int | None = None,
) -> int:
    """Create an object in ``class_name``.

    Root classes start a fresh object; classes with DS super-classes attach
    a new membership to the existing ``super_obj`` (one object migrating,
    never a parallel copy) and return that object's id. Every imperative ED
    declared on the class must be satisfied through ``ed_targets``.
    """
    _require_class(model, class_name)
    _require_role(model, role)
    _require_privilege(model, role, class_name, Privilege.CREATE)
    ed_targets = dict(ed_targets or {})
    sink: list[Delta] = []
    seq = world.next_seq()
    if model.ds_links_by_sub.get(class_name):
        if super_obj is None:
            raise MigrationRejected(
                f"{class_name} has DS super-classes; creation must attach to "
                "an existing super object"
            )
        _require_object(world, super_obj)
        with _atomic(world):
            _enter_class(
                world, model, sink, super_obj, class_name, seq, "create", ed_targets
            )
            world.commit(
                "create",
                role,
                {"class": class_name, "object": super_obj, "attached": True},
                sink,
            )
            _fire_loop_event(world, model, super_obj, class_name, role)
        return super_obj
    if super_obj is not None:
        raise DependencyError(f"{class_name} has no DS super-classes to attach to")
    with _atomic(world):
        object_id = world.next_object_id
        _record(world, sink, AllocObject(object_id))
        _record(
            world,
            sink,
            AddMembership(
                object_id, class_name, 1, Status.ACTIVE.value, None, seq, "create"
            ),
        )
        _attach_ed_instances(world, model, sink, object_id, class_name, ed_targets)
        world.commit(
            "create",
            role,
            {"class": class_name, "object": object_id, "attached": False},
            sink,
        )
    return object_id


def _fire_loop_event(
    world: WorldState, model: ModelSpec, object_id: int, entered_class: str, role: str
) -> Membership | None:
    """Declared loops fire automatically on entry to their end class, as a
    model-mandated consequence; no privilege is required."""
    loop = model.loop_by_end.get(entered_class)
    if loop is None:
        return None
    sink: list[Delta] = []
    seq = world.next_seq()
    membership = _loop_entry(
        world, model, sink, object_id, loop.end_class, loop.start_class, seq
    )
    world.commit(
        "loop",
        role,
        {
            "object": object_id,
            "end_class": loop.end_class,
            "start_class": loop.start_class,
            "generation": membership.generation,
        },
        sink,
    )
    return membership


def migrate(
    world: WorldState,
    model: ModelSpec,
    object_id: int,
    target_class: str,
    role: str,
    ed_targets: dict[str, int] | None = None,
) -> Membership:
    """Move an object one DS step down into ``target_class``.

    Requires an active membership in a direct super-class (state changes
    follow the declared order; skipping levels is rejected). If a loop
    declares ``target_class`` as its end, the loop fires immediately after.
    As an alternative entry, migrating to the start class of a loop whose
    end the object just entered performs the loop re-entry itself.
    """
    _require_class(model, target_class)
    _require_role(model, role)
    _require_object(world, object_id)
    _require_privilege(model, role, target_class, Privilege.CREATE)
    sink: list[Delta] = []
    seq = world.next_seq()
    links = model.ds_links_by_sub.get(target_class, ())
    has_active_super = any(world.is_active(object_id, l.super) for l in links)
    if not has_active_super:
        for loop in model.loops:
            if loop.start_class == target_class and _loop_pending(
                world, object_id, loop.end_class, loop.start_class
            ):
                with _atomic(world):
                    membership = _loop_entry(
                        world, model, sink, object_id, loop.end_class, target_class, seq
                    )
                    world.commit(
                        "loop",
                        role,
                        {
                            "object": object_id,
                            "end_class": loop.end_class,
                            "start_class": loop.start_class,
                            "generation": membership.generation,
                        },
                        sink,
                    )
                return membership
    with _atomic(world):
        membership = _enter_class(
            world, model, sink, object_id, target_class, seq, "migrate",
            dict(ed_targets or {}),
        )
        world.commit(
            "migrate",
            role,
            {
                "object": object_id,
                "class": target_class,
                "generation": membership.generation,
            },
            sink,
        )
        _fire_loop_event(world, model, object_id, target_class, role)
    return membership


def close_loop(
    world: WorldState, model: ModelSpec, object_id: int, end_class: str, role: str
) -> Membership:
    """Explicit loop re-entry for an object that just entered ``end_class``.

    Loops also fire automatically on entry, so this is needed only for
    worlds built by hand; firing twice for one entry is rejected.
    """
    _require_class(model, end_class)
    _require_role(model, role)
    _require_object(world, object_id)
    loop = model.loop_by_end.get(end_class)
    if loop is None:
        raise LoopError(f"no loop is declared on {end_class}")
    if not _loop_pending(world, object_id, loop.end_class, loop.start_class):
        raise LoopError(
            f"object {object_id} has no pending loop entry in {end_class}"
        )
    sink: list[Delta] = []
    seq = world.next_seq()
    with _atomic(world):
        membership = _loop_entry(
            world, model, sink, object_id, loop.end_class, loop.start_class, seq
        )
        world.commit(
            "loop",
            role,
            {
                "object": object_id,
                "end_class": loop.end_class,
                "start_class": loop.start_class,
                "generation": membership.generation,
            },
            sink,
        )
    return membership


def _owning_class(model: ModelSpec, class_name: str, attribute: str) -> str:
    """Resolve which class's attribute an access-view name refers to: the
    class itself first, then the declared selection."""
    if attribute in model.class_by_name[class_name].attributes:
        return class_name
    view = model.access_view_by_owner.get(class_name)
    if view is not None:
        owners = sorted(cls for cls, prop in view.selected_attributes if prop == attribute)
        if owners:
            return owners[0]
    raise AttributeAccessError(
        f"attribute {attribute} is not in the access view of {class_name}"
    )


def modify_attribute(
    world: WorldState,
    model: ModelSpec,
    object_id: int,
    class_name: str,
    attribute: str,
    value: str,
    role: str,
) -> None:
    """Store an attribute value through a class's access view. Inactive
    memberships cannot be updated."""
    _require_class(model, class_name)
    _require_role(model, role)
    _require_object(world, object_id)
    membership = world.current_membership(object_id, class_name)
    if membership is None:
        raise UnknownObjectError(
            f"object {object_id} has no membership in {class_name}"
        )
    if membership.status is not Status.ACTIVE:
        raise InactiveMembershipError(
            f"object {object_id} is inactive in {class_name} and cannot be updated"
        )
    _require_privilege(model, role, class_name, Privilege.MODIFY)
    if attribute not in effective_access_view(model, class_name).attributes:
        raise AttributeAccessError(
            f"attribute {attribute} is not in the access view of {class_name}"
        )
    owner = _owning_class(model, class_name, attribute)
    sink: list[Delta] = []
    _record(world, sink, SetAttribute(object_id, owner, attribute, value))
    world.commit(
        "modify",
        role,
        {"object": object_id, "class": class_name, "attribute": attribute},
        sink,
    )


def query_object(
    world: WorldState, model: ModelSpec, object_id: int, class_name: str, role: str
) -> dict[str, Any]:
    """Attribute snapshot through the class's access view. Works on inactive
    memberships too: consultation is always allowed with the privilege."""
    _require_class(model, class_name)
    _require_role(model, role)
    _require_object(world, object_id)
    membership = world.current_membership(object_id, class_name)
    if membership is None:
        raise UnknownObjectError(
            f"object {object_id} has no membership in {class_name}"
        )
    _require_privilege(model, role, class_name, Privilege.QUERY)
    values: dict[str, str | None] = {}
    for attribute in sorted(effective_access_view(model, class_name).attributes):
        owner = _owning_class(model, class_name, attribute)
        values[attribute] = world.attributes.get((object_id, owner, attribute))
    world.commit(
        "query", role, {"object": object_id, "class": class_name}, []
    )
    return {
        "object": object_id,
        "class": class_name,
        "generation": membership.generation,
        "status": membership.status.value,
        "attributes": values,
    }


def delete_object(world: WorldState, model: ModelSpec, object_id: int, role: str) -> None:
    """Suppress an object entirely. Requires delete privilege on every class
    the object is a member of; blocked while any other object holds an
    imperative dependency on it."""
    _require_role(model, role)
    _require_object(world, object_id)
    classes = sorted({m.class_name for m in world.memberships_of(object_id)})
    for cls in classes:
        _require_privilege(model, role, cls, Privilege.DELETE)
    for inst in world.ed_instances:
        if inst.target == object_id:
            link = model.ed_link(inst.source_class, inst.target_class)
            if link is not None and link.mode is LinkMode.IMPERATIVE:
                raise DependencyError(
                    f"object {inst.dependent} depends imperatively on "
                    f"object {object_id}; deletion is blocked"
                )
    sink: list[Delta] = []
    _record(world, sink, RemoveObject(object_id))
    world.commit("delete", role, {"object": object_id, "classes": classes}, sink)


def execute_process(
    world: WorldState,
    model: ModelSpec,
    process_name: str,
    role: str,
    bindings: dict[str, int],
) -> ExecutionOutcome:
    """Run a process atomically.

    The precondition is evaluated over the input bindings; effects apply in
    order (a false guard skips its effect); the postcondition is evaluated
    over the output bindings. Any failure restores the world bit-for-bit
    and nothing is logged; success logs one composite event.
    """
    proc = model.process_by_name.get(process_name)
    if proc is None:
        raise UnknownProcessError(f"unknown process {process_name!r}")
    _require_role(model, role)
    for key in bindings:
        if key not in proc.inputs:
            raise IasdoError(
                f"binding {key!r} is not an input class of process {process_name}"
            )
    for object_id in bindings.values():
        _require_object(world, object_id)
    if (role, process_name) not in model.responsibility_set:
        return ExecutionOutcome(
            OutcomeStatus.NOT_RESPONSIBLE,
            messages=(f"role {role} is not responsible for {process_name}",),
        )

    slots: dict[str, int | None] = {cls: None for cls in proc.inputs | proc.outputs}
    slots.update(bindings)

    def live_bindings() -> dict[str, Binding]:
        return {
            cls: Binding(obj, obj is not None and world.is_active(obj, cls))
            for cls, obj in slots.items()
        }

    def ancestry(left: int, right: int, ancestor: str) -> bool:
        return same_ancestor(world, model, left, right, ancestor)

    try:
        for cls in sorted(bindings):
            _require_privilege(model, role, cls, Privilege.QUERY)
    except PrivilegeError as exc:
        return ExecutionOutcome(OutcomeStatus.PRIVILEGE_DENIED, messages=(str(exc),))

    if not eval_condition(proc.precondition, live_bindings(), ancestry):
        return ExecutionOutcome(
            OutcomeStatus.PRECONDITION_FAILED,
            messages=(f"precondition of {process_name} not satisfied",),
        )

    snapshot = world.clone()
    sink: list[Delta] = []
    seq = world.next_seq()
    created: list[tuple[int, str, int]] = []
    migrated: list[tuple[int, str, int]] = []
    messages: list[str] = []

    def fail(status: OutcomeStatus, message: str) -> ExecutionOutcome:
        world.restore(snapshot)
        return ExecutionOutcome(status, messages=(message,))

    try:
        for index, effect in enumerate(proc.effects):
            if effect.guard is not None and not eval_condition(
                effect.guard, live_bindings(), ancestry
            ):
                messages.append(f"effect {index} skipped (guard false)")
                continue
            bound = {cls: obj for cls, obj in slots.items() if obj is not None}
            if effect.kind is EffectKind.MIGRATE:
                source = effect.source_binding
                object_id = slots.get(source) if source else None
                if object_id is None:
                    raise MigrationRejected(
                        f"effect {index}: no object bound to {source}"
                    )
                _require_privilege(model, role, effect.target_class, Privilege.CREATE)
                ed_targets = {
                    cls: obj
                    for cls, obj in bound.items()
                    if model.ed_link(effect.target_class, cls) is not None
                }
                membership = _enter_class(
                    world, model, sink, object_id, effect.target_class, seq,
                    "migrate", ed_targets,
                )
                migrated.append((object_id, effect.target_class, membership.generation))
                slots[effect.target_class] = object_id
                looped = _fire_declared_loop(
                    world, model, sink, object_id, effect.target_class, seq
                )
                if looped is not None:
                    migrated.append(
                        (object_id, looped.class_name, looped.generation)
                    )
            else:
                _require_privilege(model, role, effect.target_class, Privilege.CREATE)
                new_id = _create_effect(
                    world, model, sink, effect, slots, bound, seq, index
                )
                membership = world.current_membership(new_id, effect.target_class)
                assert membership is not None
                created.append((new_id, effect.target_class, membership.generation))
                slots[effect.target_class] = new_id
    except PrivilegeError as exc:
        return fail(OutcomeStatus.PRIVILEGE_DENIED, str(exc))
    except (MigrationRejected, DependencyError, UnknownObjectError) as exc:
        return fail(OutcomeStatus.EFFECT_REJECTED, str(exc))

    if not eval_condition(proc.postcondition, live_bindings(), ancestry):
        return fail(
            OutcomeStatus.POSTCONDITION_FAILED,
            f"postcondition of {process_name} not satisfied",
        )

    world.commit(
        "process",
        role,
        {
            "process": process_name,
            "bindings": {cls: obj for cls, obj in sorted(bindings.items())},
            "outputs": {
                cls: slots[cls] for cls in sorted(proc.outputs) if slots[cls] is not None
            },
        },
        sink,
    )
    return ExecutionOutcome(
        OutcomeStatus.OK, tuple(created), tuple(migrated), tuple(messages)
    )


def _create_effect(
    world: WorldState,
    model: ModelSpec,
    sink: list[Delta],
    effect,
    slots: dict[str, int | None],
    bound: dict[str, int],
    seq: int,
    index: int,
) -> int:
    """Apply a create effect: a new dependent object when the attachment is
    an ED, a downward membership on the bound object when it is a DS link."""
    target = effect.target_class
    if effect.source_binding is not None:
        source_class = effect.source_binding
        anchor = slots.get(source_class)
        if anchor is None:
            raise DependencyError(
                f"effect {index}: no object bound to {source_class}"
            )
        if model.ed_link(target, source_class) is not None:
            object_id = world.next_object_id
            _record(world, sink, AllocObject(object_id))
            _record(
                world,
                sink,
                AddMembership(
                    object_id, target, 1, Status.ACTIVE.value, None, seq, "create"
                ),
            )
            ed_targets = {
                cls: obj
                for cls, obj in bound.items()
                if model.ed_link(target, cls) is not None
            }
            ed_targets[source_class] = anchor
            _attach_ed_instances(world, model, sink, object_id, target, ed_targets)
            return object_id
        if model.ds_link(target, source_class) is not None:
            ed_targets = {
                cls: obj
                for cls, obj in bound.items()
                if model.ed_link(target, cls) is not None
            }
            _enter_class(world, model, sink, anchor, target, seq, "create", ed_targets)
            _fire_declared_loop(world, model, sink, anchor, target, seq)
            return anchor
        raise DependencyError(
            f"effect {index}: no ED or DS link from {target} to {source_class}"
        )
    if model.ds_links_by_sub.get(target):
        raise DependencyError(
            f"effect {index}: {target} has DS super-classes and needs a "
            "'from' binding"
        )
    object_id = world.next_object_id
    _record(world, sink, AllocObject(object_id))
    _record(
        world,
        sink,
        AddMembership(object_id, target, 1, Status.ACTIVE.value, None, seq, "create"),
    )
    ed_targets = {
        cls: obj for cls, obj in bound.items() if model.ed_link(target, cls) is not None
    }
    _attach_ed_instances(world, model, sink, object_id, target, ed_targets)
    return object_id


def trace(world: WorldState, object_id: int) -> tuple[TraceEntry, ...]:
    """Chronological membership history of one object, attributed to the
    events (and processes) that caused each episode."""
    _require_object(world, object_id)
    entries: list[TraceEntry] = []
    index: dict[tuple[str, int], int] = {}
    for event in world.events:
        process = event.details.get("process") if event.kind == "process" else None
        for delta in event.deltas:
            if isinstance(delta, AddMembership) and delta.object_id == object_id:
                index[(delta.class_name, delta.generation)] = len(entries)
                entries.append(
                    TraceEntry(
                        delta.class_name,
                        delta.generation,
                        event.seq,
                        delta.via,
                        event.role,
                        process,
                        None,
                    )
                )
            elif (
                isinstance(delta, SetStatus)
                and delta.object_id == object_id
                and delta.status == Status.INACTIVE.value
            ):
                slot = index.get((delta.class_name, delta.generation))
                if slot is not None:
                    entry = entries[slot]
                    entries[slot] = TraceEntry(
                        entry.class_name,
                        entry.generation,
                        entry.event_seq,
                        entry.via,
                        entry.role,
                        entry.process,
                        event.seq,
                    )
    return tuple(entries)


def audit_privileges(world: WorldState, model: ModelSpec) -> tuple[str, ...]:
    """Check every logged action against the model's grants; loop re-entries
    are model-mandated and exempt. Empty result means the log is sound."""
    problems: list[str] = []

    def check(role: str | None, cls: str, privilege: Privilege, seq: int) -> None:
        if role is None or not model.has_grant(role, cls, privilege):
            problems.append(
                f"event {seq}: role {role} lacks {privilege.value} on {cls}"
            )

    for event in world.events:
        if event.kind in ("create", "migrate", "process"):
            for delta in event.deltas:
                if isinstance(delta, AddMembership) and delta.via != "loop":
                    check(event.role, delta.class_name, Privilege.CREATE, event.seq)
        if event.kind == "modify":
            check(event.role, event.details["class"], Privilege.MODIFY, event.seq)
        if event.kind == "query":
            check(event.role, event.details["class"], Privilege.QUERY, event.seq)
        if event.kind == "delete":
            for cls in event.details["classes"]:
                check(event.role, cls, Privilege.DELETE, event.seq)
    return tuple(problems)
