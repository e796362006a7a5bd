"""Shared test machinery: compact model builders, brute-force oracles kept
independent of the code paths they check, and seeded random generators."""

from __future__ import annotations

import random
from collections import defaultdict

from iasdo.conditions import And, Atom, Condition, Not, Or, Xor
from iasdo.model import (
    BackInactiveDecl,
    ClassDef,
    DsLink,
    EdLink,
    LinkMode,
    LoopDecl,
    ModelSpec,
    Privilege,
    PrivilegeGrant,
    ProcessDef,
    Responsibility,
    RoleDef,
)

# -- builders ---------------------------------------------------------------------


def build_model(
    classes,
    ed=(),
    ds=(),
    back=(),
    views=(),
    loops=(),
    processes=(),
    roles=(),
    grants=(),
    responsibilities=(),
) -> ModelSpec:
    """Terse model construction for tests.

    ``classes``: list of names or (name, attrs, methods) triples.
    ``ed``: (source, target, mode); ``ds``: (sub, super, mode[, back_flag]).
    ``grants``: (role, class, privilege-string).
    """
    class_defs = []
    for entry in classes:
        if isinstance(entry, str):
            class_defs.append(ClassDef(entry))
        else:
            name, attrs, methods = entry
            class_defs.append(ClassDef(name, tuple(attrs), tuple(methods)))
    return ModelSpec(
        classes=tuple(class_defs),
        ed_links=tuple(EdLink(s, t, LinkMode(m)) for s, t, m in ed),
        ds_links=tuple(
            DsLink(entry[0], entry[1], LinkMode(entry[2]), bool(entry[3:] and entry[3]))
            for entry in ds
        ),
        back_inactive_decls=tuple(BackInactiveDecl(s, a) for s, a in back),
        access_views=tuple(views),
        loops=tuple(LoopDecl(e, s) for e, s in loops),
        processes=tuple(processes),
        roles=tuple(RoleDef(r) for r in roles),
        privilege_grants=tuple(
            PrivilegeGrant(r, c, Privilege(p)) for r, c, p in grants
        ),
        responsibilities=tuple(Responsibility(r, p) for r, p in responsibilities),
    )


def chain_model() -> ModelSpec:
    """The minimal copy-lifecycle chain with a loop back to availability."""
    return build_model(
        classes=["Copy", "AvailableCopy", "BorrowedCopy", "ReturnedCopy"],
        ds=[
            ("AvailableCopy", "Copy", "imperative"),
            ("BorrowedCopy", "AvailableCopy", "imperative", True),
            ("ReturnedCopy", "BorrowedCopy", "imperative", True),
        ],
        loops=[("ReturnedCopy", "AvailableCopy")],
    )


# -- brute-force oracles ------------------------------------------------------------


def dependency_edges(model: ModelSpec) -> list[tuple[str, str]]:
    """Directed ED/DS edges, rebuilt from the raw link tables."""
    edges = [(l.source, l.target) for l in model.ed_links]
    edges += [(l.sub, l.super) for l in model.ds_links]
    return edges


def brute_force_cyclic(nodes, edges) -> bool:
    """Cycle check by exhaustive simple-path enumeration."""
    adjacency = defaultdict(list)
    for a, b in edges:
        adjacency[a].append(b)

    def can_return(start: str, node: str, visited: frozenset) -> bool:
        for nxt in adjacency[node]:
            if nxt == start:
                return True
            if nxt not in visited and can_return(start, nxt, visited | {nxt}):
                return True
        return False

    return any(can_return(n, n, frozenset((n,))) for n in nodes)


def brute_force_reaches(edges, start: str, targets) -> bool:
    """Reachability by exhaustive simple-path enumeration; a start that is
    already a target counts (zero-length path)."""
    targets = set(targets)
    if start in targets:
        return True
    adjacency = defaultdict(list)
    for a, b in edges:
        adjacency[a].append(b)

    def walk(node: str, visited: frozenset) -> bool:
        for nxt in adjacency[node]:
            if nxt in targets:
                return True
            if nxt not in visited and walk(nxt, visited | {nxt}):
                return True
        return False

    return walk(start, frozenset((start,)))


def all_super_path_nodes(model: ModelSpec, class_name: str) -> set[str]:
    """Every class on any simple path of direct-super hops (ancestors
    oracle, recursive enumeration rather than closure). The start class is
    its own ancestor exactly when a simple cycle passes through it."""
    found: set[str] = set()

    def walk(node: str, path: frozenset) -> None:
        for link in model.ds_links:
            if link.sub != node:
                continue
            if link.super == class_name:
                found.add(class_name)
                continue
            if link.super in path:
                continue
            found.add(link.super)
            walk(link.super, path | {link.super})

    walk(class_name, frozenset((class_name,)))
    return found


def oracle_eval(ast: Condition, assignment: dict[str, bool]) -> bool:
    """Reference evaluator over plain boolean assignments."""
    if isinstance(ast, Atom):
        return assignment[ast.class_name]
    if isinstance(ast, Not):
        return not oracle_eval(ast.child, assignment)
    if isinstance(ast, And):
        return all(oracle_eval(c, assignment) for c in ast.children)
    if isinstance(ast, Or):
        return any(oracle_eval(c, assignment) for c in ast.children)
    if isinstance(ast, Xor):
        return sum(oracle_eval(c, assignment) for c in ast.children) == 1
    raise TypeError(ast)


# -- seeded random generators ---------------------------------------------------------


def random_condition(
    rng: random.Random, atoms, max_depth: int = 3, allow_not: bool = True
) -> Condition:
    atoms = list(atoms)

    def gen(depth: int) -> Condition:
        if depth <= 0 or rng.random() < 0.35:
            return Atom(rng.choice(atoms))
        kinds = ["and", "or", "xor"] + (["not"] if allow_not else [])
        kind = rng.choice(kinds)
        if kind == "not":
            return Not(gen(depth - 1))
        node = {"and": And, "or": Or, "xor": Xor}[kind]
        return node(tuple(gen(depth - 1) for _ in range(rng.randint(2, 3))))

    return gen(max_depth)


def random_model(rng: random.Random, max_classes: int = 8) -> ModelSpec:
    """Referentially closed but semantically unconstrained models: cycles,
    multiple roots, bad loops and missing grants all occur on purpose."""
    n = rng.randint(2, max_classes)
    names = [f"C{i}" for i in range(n)]
    classes = [(name, (f"a_{name.lower()}",), ()) for name in names]

    ed, seen = [], set()
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(names, 2)
        if (a, b) not in seen:
            seen.add((a, b))
            ed.append((a, b, rng.choice(["imperative", "optional"])))
    ds, seen = [], set()
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(names, 2)
        if (a, b) not in seen:
            seen.add((a, b))
            ds.append((a, b, rng.choice(["imperative", "optional"]), rng.random() < 0.3))

    loops = []
    if n >= 2 and rng.random() < 0.4:
        end, start = rng.sample(names, 2)
        loops.append((end, start))
    back = []
    if n >= 2 and rng.random() < 0.4:
        back.append(tuple(rng.sample(names, 2)))

    processes = []
    for index in range(rng.randint(0, 2)):
        inputs = frozenset(rng.sample(names, rng.randint(1, max(1, n // 2))))
        outputs = frozenset(rng.sample(names, rng.randint(1, max(1, n // 2))))
        processes.append(
            ProcessDef(
                f"P{index}",
                inputs,
                outputs,
                random_condition(rng, sorted(inputs)),
                random_condition(rng, sorted(outputs)),
            )
        )

    roles = ["R0"] if processes or rng.random() < 0.5 else []
    grants = []
    if roles:
        for name in names:
            for privilege in ("create", "query"):
                if rng.random() < 0.5:
                    grants.append(("R0", name, privilege))
    responsibilities = [
        ("R0", proc.name) for proc in processes if rng.random() < 0.7
    ]

    return build_model(
        classes,
        ed=ed,
        ds=ds,
        back=back,
        loops=loops,
        processes=processes,
        roles=roles,
        grants=grants,
        responsibilities=responsibilities,
    )
