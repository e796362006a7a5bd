"""AST and evaluator for process pre/post conditions and effect guards.

Conditions are class-membership formulas: an atom names a class and holds
when the evaluation context binds an object that is *active* in that class.
Connectors are n-ary ``and``/``or``/``xor`` plus unary ``not``; ``xor`` is
true when exactly one child is true. Effect guards may additionally use the
``same_ancestor`` atom, which compares two bound objects' dependency chains
(evaluated by the runtime, not by the pure evaluator here).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .errors import UnknownAtomError


@dataclass(frozen=True)
class Atom:
    class_name: str


@dataclass(frozen=True)
class Not:
    child: "Condition"


@dataclass(frozen=True)
class And:
    children: tuple["Condition", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValueError("'and' requires at least two operands")


@dataclass(frozen=True)
class Or:
    children: tuple["Condition", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValueError("'or' requires at least two operands")


@dataclass(frozen=True)
class Xor:
    children: tuple["Condition", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValueError("'xor' requires at least two operands")


@dataclass(frozen=True)
class SameAncestor:
    """Guard atom: both bound objects' dependency chains reach one shared
    object that is a member of ``ancestor``."""

    left: str
    right: str
    ancestor: str


Condition = Union[Atom, Not, And, Or, Xor, SameAncestor]


@dataclass(frozen=True)
class Binding:
    """One slot of a binding set: the object bound to a class, if any, and
    whether that object's membership in the class is currently active."""

    object_id: int | None = None
    active: bool = False


BindingSet = Mapping[str, Binding]

# Signature: (left_object, right_object, ancestor_class) -> bool
AncestryCheck = Callable[[int, int, str], bool]


def eval_condition(
    ast: Condition,
    bindings: BindingSet,
    same_ancestor: AncestryCheck | None = None,
) -> bool:
    """Evaluate ``ast`` against ``bindings``.

    An atom is true iff its class is bound to an object whose membership in
    that class is active. Unbound or inactive bindings evaluate false; a
    class missing from the binding map entirely raises
    :class:`UnknownAtomError`. ``same_ancestor`` must be supplied when the
    AST contains guard atoms (the runtime provides it).
    """
    if isinstance(ast, Atom):
        if ast.class_name not in bindings:
            raise UnknownAtomError(
                f"atom class {ast.class_name!r} is absent from the binding map"
            )
        slot = bindings[ast.class_name]
        return slot.object_id is not None and slot.active
    if isinstance(ast, Not):
        return not eval_condition(ast.child, bindings, same_ancestor)
    if isinstance(ast, And):
        return all(eval_condition(c, bindings, same_ancestor) for c in ast.children)
    if isinstance(ast, Or):
        return any(eval_condition(c, bindings, same_ancestor) for c in ast.children)
    if isinstance(ast, Xor):
        hits = sum(eval_condition(c, bindings, same_ancestor) for c in ast.children)
        return hits == 1
    if isinstance(ast, SameAncestor):
        if same_ancestor is None:
            raise UnknownAtomError(
                "same_ancestor guard cannot be evaluated without a world context"
            )
        for name in (ast.left, ast.right):
            if name not in bindings:
                raise UnknownAtomError(
                    f"guard binding {name!r} is absent from the binding map"
                )
        left = bindings[ast.left].object_id
        right = bindings[ast.right].object_id
        if left is None or right is None:
            return False
        return same_ancestor(left, right, ast.ancestor)
    raise TypeError(f"not a condition node: {ast!r}")


def atoms_of(ast: Condition) -> frozenset[str]:
    """Class names of all membership atoms in the tree."""
    if isinstance(ast, Atom):
        return frozenset((ast.class_name,))
    if isinstance(ast, Not):
        return atoms_of(ast.child)
    if isinstance(ast, (And, Or, Xor)):
        out: frozenset[str] = frozenset()
        for child in ast.children:
            out |= atoms_of(child)
        return out
    if isinstance(ast, SameAncestor):
        return frozenset()
    raise TypeError(f"not a condition node: {ast!r}")


def same_ancestor_atoms(ast: Condition) -> tuple[SameAncestor, ...]:
    """All guard atoms in the tree, in depth-first order."""
    if isinstance(ast, SameAncestor):
        return (ast,)
    if isinstance(ast, Not):
        return same_ancestor_atoms(ast.child)
    if isinstance(ast, (And, Or, Xor)):
        out: tuple[SameAncestor, ...] = ()
        for child in ast.children:
            out += same_ancestor_atoms(child)
        return out
    return ()


def contains_not(ast: Condition) -> bool:
    if isinstance(ast, Not):
        return True
    if isinstance(ast, (And, Or, Xor)):
        return any(contains_not(c) for c in ast.children)
    return False


def condition_to_source(ast: Condition) -> str:
    """Canonical surface syntax. Non-atomic children are parenthesised so the
    rendered text reparses to the identical tree."""

    def wrap(node: Condition) -> str:
        text = condition_to_source(node)
        if isinstance(node, (Atom, SameAncestor)):
            return text
        return f"({text})"

    if isinstance(ast, Atom):
        return ast.class_name
    if isinstance(ast, SameAncestor):
        return f"same_ancestor({ast.left}, {ast.right}, {ast.ancestor})"
    if isinstance(ast, Not):
        return f"not {wrap(ast.child)}"
    if isinstance(ast, And):
        return " and ".join(wrap(c) for c in ast.children)
    if isinstance(ast, Or):
        return " or ".join(wrap(c) for c in ast.children)
    if isinstance(ast, Xor):
        return " xor ".join(wrap(c) for c in ast.children)
    raise TypeError(f"not a condition node: {ast!r}")
