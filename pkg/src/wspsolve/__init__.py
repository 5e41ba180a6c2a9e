"""Workflow satisfiability: exact solvers over plan patterns.

Typical use::

    from wspsolve import parse_instance, solve_pattern
    inst = parse_instance(open("instance.json").read())
    report = solve_pattern(inst.schema)
"""

from .constraints import (
    AtLeastDistinct,
    AtMostDistinct,
    BinaryRel,
    Constraint,
    Counting,
    Family,
    ForbiddenCoassign,
    Rel,
    SetRel,
    UserPartition,
    is_user_independent,
    satisfies,
)
from .errors import (
    BudgetExceeded,
    DisjointnessViolation,
    IncomparableKinds,
    OverlapError,
    ParseError,
    RelationMismatch,
    ResourceLimit,
    SchemaError,
    ScopeMismatch,
    ValidationError,
    WSPError,
)
from .formats import Instance, emit_instance, emit_plan, parse_instance, parse_plan
from .generate import (
    GeneratorConfig,
    GridGraph,
    SplitMix64,
    generate_instance,
    independent_row_selection,
    random_grid_graph,
    reduce_kxk_independent_set,
)
from .model import (
    EMPTY_PLAN,
    Plan,
    WorkflowSchema,
    first_violated,
    is_authorized,
    is_eligible,
    is_valid,
    is_valid_complete,
    plan_union,
    singleton_block,
)
from .oracle import enumerate_plans
from .relations import (
    EquivRelation,
    IdentityRelation,
    Pattern,
    ProductRelation,
    Relation,
    UiRelation,
    auto_relation,
    compare_patterns,
    encode_equiv,
    encode_ui,
    equivalent_equiv,
    equivalent_ui,
    union_relation,
    vect,
)
from .solver import (
    SolveReport,
    UserOrdering,
    bell_number,
    make_ordering,
    observed_width,
    solve_naive,
    solve_pattern,
)

__version__ = "0.1.0"
