"""Naive and pattern-based WSP solvers.

Both grow plans one user at a time along an ordering ``u_1..u_n``: plans
over ``U_i = {u_1..u_i}`` are extended by giving ``u_{i+1}`` any authorized
subset of the still-unassigned tasks. The naive solver keeps every valid
plan. The pattern solver keeps one valid plan per pattern in each cell
``(i, T)``, which is enough because related plans extend identically.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from . import kernel
from .bits import bits_of, submasks
from .errors import RelationMismatch, ResourceLimit, SchemaError
from .model import Plan, WorkflowSchema
from .relations import Relation, auto_relation, check_relation

log = logging.getLogger(__name__)

NAIVE_PLAN_BUDGET = 10**7


@dataclass(frozen=True)
class UserOrdering:
    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        if sorted(self.order) != list(range(len(self.order))):
            raise SchemaError("user ordering must be a permutation of 0..n-1")

    @classmethod
    def identity(cls, n: int) -> "UserOrdering":
        return cls(tuple(range(n)))

    def prefix(self, i: int) -> frozenset[int]:
        return frozenset(self.order[:i])

    def __len__(self):
        return len(self.order)


@dataclass
class SolveReport:
    result: Optional[Plan]
    patterns_peak: int
    cells_visited: int
    plans_generated: int
    wall_time: float
    relation: Relation
    early_exit: bool
    backend: str
    users_used: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def satisfiable(self) -> bool:
        return self.result is not None


def bell_number(k: int) -> int:
    """Number of set partitions of a k-element set (Bell triangle)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def _partition_of(schema: WorkflowSchema, relation: Relation):
    part = schema.partition
    rel_part = getattr(relation, "partition", None)
    if rel_part is not None and part is not None and rel_part != part:
        raise RelationMismatch("relation uses a different user partition than the schema")
    return part or rel_part


def make_ordering(schema: WorkflowSchema, relation: Relation) -> UserOrdering:
    """Users grouped class by class for relations involving ``~``, else identity."""
    part = _partition_of(schema, relation)
    if relation.needs_block_ordering and part is not None:
        return UserOrdering(tuple(sorted(range(schema.n), key=lambda u: (part.class_of[u], u))))
    return UserOrdering.identity(schema.n)


def resolve_relation(schema: WorkflowSchema, relation: Union[Relation, str, None]) -> Relation:
    from .relations import EquivRelation, IdentityRelation, UiRelation, union_relation

    if isinstance(relation, Relation):
        return relation
    name = (relation or "auto").lower()
    if name == "auto":
        return auto_relation(schema.constraints, schema.partition)
    if name == "ui":
        return UiRelation()
    if name == "identity":
        return IdentityRelation()
    if name in ("equiv", "product"):
        if schema.partition is None:
            raise RelationMismatch(f"relation {name!r} needs an equivalence relation on users")
        eq = EquivRelation(schema.partition)
        return eq if name == "equiv" else union_relation(UiRelation(), eq)
    raise ValueError(f"unknown relation {relation!r}")


def solve_naive(
    schema: WorkflowSchema,
    ordering: Optional[UserOrdering] = None,
    budget: int = NAIVE_PLAN_BUDGET,
    on_iteration: Optional[Callable[[int, list[Plan]], None]] = None,
) -> Optional[Plan]:
    """Keep every valid plan over each prefix ``U_i``; exponential in n.

    Raises :class:`ResourceLimit` once more than ``budget`` plans are stored.
    """
    ordering = ordering or UserOrdering.identity(schema.n)
    k, full = schema.k, schema.all_tasks
    cons = [(c, c.scope_mask) for c in schema.constraints]
    part = schema.partition

    plans: list[tuple[dict, int]] = [({}, 0)]
    if on_iteration is not None:
        on_iteration(0, [Plan({}, ())])
    for i, u in enumerate(ordering.order):
        avail_u = schema.tasks_of_user[u]
        nxt: list[tuple[dict, int]] = []
        for asg, tm in plans:
            for block in submasks(full & ~tm & avail_u):
                new_tm = tm | block
                new = dict(asg)
                for t in bits_of(block):
                    new[t] = u
                if all(
                    c.satisfies({t: new[t] for t in c.scope}, part)
                    for c, sm in cons
                    if sm & block and sm & new_tm == sm
                ):
                    nxt.append((new, new_tm))
            if len(nxt) > budget:
                raise ResourceLimit(f"naive solver exceeded {budget} stored plans")
        plans = nxt
        if on_iteration is not None:
            pool = ordering.prefix(i + 1)
            on_iteration(i + 1, [Plan(a, pool) for a, _ in plans])

    pool = ordering.prefix(len(ordering))
    for asg, tm in plans:
        if tm == full:
            return Plan(asg, pool)
    return None


def solve_pattern(
    schema: WorkflowSchema,
    relation: Union[Relation, str, None] = "auto",
    ordering: Optional[UserOrdering] = None,
    early_exit: bool = True,
    backend: Optional[str] = None,
    on_iteration: Optional[Callable[[int, dict[int, list[Plan]]], None]] = None,
    pattern_budget: int = 0,
    progress: Optional[Callable[[int, int, int, int], None]] = None,
) -> SolveReport:
    """Solve with representative sets under ``relation``.

    ``on_iteration(i, cells)`` receives, after each prefix ``U_i``, the
    representatives of every nonempty cell keyed by task mask, in pattern
    order. ``progress(i, cells, stored, peak)`` is a cheap per-prefix hook.
    """
    rel = resolve_relation(schema, relation)
    check_relation(rel, schema.constraints)
    part = _partition_of(schema, rel)
    ordering = ordering or make_ordering(schema, rel)
    if len(ordering) != schema.n:
        raise SchemaError("ordering length differs from the number of users")

    if part is None:
        class_of, class_size = [0] * schema.n, [schema.n]
    else:
        class_of = list(part.class_of)
        class_size = [len(c) for c in part.classes]

    order = list(ordering.order)
    auth = [schema.tasks_of_user[u] for u in order]
    mod = kernel.get_backend(backend)
    name = backend or kernel.DEFAULT_BACKEND

    observer = None
    if on_iteration is not None:

        def observer(i, cells):
            pool = ordering.prefix(i)
            on_iteration(
                i,
                {t: [_to_plan(a, pool) for a in plans] for t, plans in cells.items()},
            )

    start = time.perf_counter()
    asg, used, peak, visited, generated = mod.run(
        schema.k,
        order,
        auth,
        kernel.constraint_rows(schema.constraints),
        class_of,
        class_size,
        kernel.relation_components(rel),
        early_exit,
        observer,
        pattern_budget,
        progress,
    )
    elapsed = time.perf_counter() - start
    result = None if asg is None else _to_plan(asg, ordering.prefix(used))
    log.debug("solve_pattern %r: peak=%d generated=%d in %.3fs", rel, peak, generated, elapsed)
    return SolveReport(result, peak, visited, generated, elapsed, rel, early_exit, name, used)


def _to_plan(asg: Sequence[int], pool: frozenset[int]) -> Plan:
    return Plan({t: u for t, u in enumerate(asg) if u >= 0}, pool)


def observed_width(report: SolveReport) -> int:
    """Largest number of representatives seen in one ``(i, T)`` cell."""
    return report.patterns_peak
