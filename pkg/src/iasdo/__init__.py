"""Executable information manufacturing models: a textual specification
language, a static validator, and a lifecycle simulation engine."""

from .conditions import (
    And,
    Atom,
    Binding,
    BindingSet,
    Condition,
    Not,
    Or,
    SameAncestor,
    Xor,
    atoms_of,
    condition_to_source,
    eval_condition,
)
from .errors import IasdoError
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
    Privilege,
    PrivilegeGrant,
    ProcessDef,
    Responsibility,
    RoleDef,
    ancestors,
    descendants,
    direct_supers,
    ds_root,
    effective_access_view,
)
from .parser import (
    ParseError,
    ParseFailure,
    SourceSpan,
    model_to_dot,
    parse_model,
    render_model,
    report_to_json,
)
from .runtime import (
    ExecutionOutcome,
    OutcomeStatus,
    Status,
    WorldState,
    close_loop,
    create_object,
    delete_object,
    execute_process,
    migrate,
    modify_attribute,
    query_object,
    replay_events,
    trace,
    world_hash,
    world_to_json,
)
from .script import ScriptRunner, parse_script
from .validator import (
    Diagnostic,
    Severity,
    ValidationReport,
    missing_r2_grants,
    reaches_input,
    validate,
)

__version__ = "0.1.0"
