"""Workflow schemas, plans and the authorized / eligible / valid predicates.

Tasks are ``0..k-1`` and users ``0..n-1``. A :class:`Plan` carries its user
pool explicitly because a user may be available to a plan without doing any
task in it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional

from .bits import bits_of, mask_of
from .constraints import Constraint, UserPartition
from .errors import DisjointnessViolation, SchemaError


class Plan:
    """A partial map from tasks to users together with a user pool.

    ``users`` defaults to the image of ``assignments``.
    """

    __slots__ = ("_assign", "users", "task_mask", "_hash")

    def __init__(self, assignments: Mapping[int, int] = (), users: Optional[Iterable[int]] = None):
        self._assign = dict(assignments)
        image = frozenset(self._assign.values())
        self.users = image if users is None else frozenset(users)
        if not image <= self.users:
            missing = sorted(image - self.users)
            raise SchemaError(f"assigned users {missing} are not in the plan's user set")
        self.task_mask = mask_of(self._assign)
        self._hash = None

    @property
    def assignments(self) -> Mapping[int, int]:
        return self._assign

    @property
    def tasks(self) -> frozenset[int]:
        return frozenset(self._assign)

    @property
    def user_mask(self) -> int:
        return mask_of(self.users)

    def __getitem__(self, task: int) -> int:
        return self._assign[task]

    def get(self, task: int, default=None):
        return self._assign.get(task, default)

    def __contains__(self, task: int) -> bool:
        return task in self._assign

    def __len__(self) -> int:
        return len(self._assign)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._assign))

    def items(self):
        return sorted(self._assign.items())

    def __eq__(self, other):
        if not isinstance(other, Plan):
            return NotImplemented
        return self._assign == other._assign and self.users == other.users

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._assign.items()), self.users))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{t}->{u}" for t, u in self.items())
        return f"Plan({{{body}}}, users={sorted(self.users)})"

    def restrict(self, tasks: Iterable[int], users: Optional[Iterable[int]] = None) -> "Plan":
        """Restriction to ``tasks``; keeps the user pool unless one is supplied."""
        keep = set(tasks)
        sub = {t: u for t, u in self._assign.items() if t in keep}
        return Plan(sub, self.users if users is None else users)


EMPTY_PLAN = Plan()


def plan_union(p1: Plan, p2: Plan) -> Plan:
    if p1.task_mask & p2.task_mask:
        shared = sorted(bits_of(p1.task_mask & p2.task_mask))
        raise DisjointnessViolation(f"plans share tasks {shared}")
    if p1.users & p2.users:
        raise DisjointnessViolation(f"plans share users {sorted(p1.users & p2.users)}")
    merged = dict(p1.assignments)
    merged.update(p2.assignments)
    return Plan(merged, p1.users | p2.users)


def singleton_block(tasks: Iterable[int], u: int) -> Plan:
    """The plan sending every task in ``tasks`` to ``u``; its user set is ``{u}``."""
    return Plan({t: u for t in tasks}, (u,))


@dataclass(frozen=True)
class WorkflowSchema:
    """Tasks, users, per-task authorization lists and constraints."""

    k: int
    n: int
    authorizations: tuple[frozenset[int], ...]
    constraints: tuple[Constraint, ...] = ()
    partition: Optional[UserPartition] = None
    metadata: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "authorizations", tuple(frozenset(a) for a in self.authorizations))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.k < 0 or self.n < 0:
            raise SchemaError("task and user counts must be non-negative")
        if len(self.authorizations) != self.k:
            raise SchemaError(f"expected {self.k} authorization lists, got {len(self.authorizations)}")
        for s, users in enumerate(self.authorizations):
            bad = [u for u in users if not 0 <= u < self.n]
            if bad:
                raise SchemaError(f"task {s} authorizes unknown users {sorted(bad)}")
        for c in self.constraints:
            out = [t for t in c.scope if not 0 <= t < self.k]
            if out or not c.scope:
                raise SchemaError(f"constraint {c} has scope outside the task set")
            if c.uses_partition and self.partition is None:
                raise SchemaError(f"constraint {c} needs an equivalence relation on users")
        if self.partition is not None and self.partition.n != self.n:
            raise SchemaError("user partition does not cover exactly the schema's users")

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def all_tasks(self) -> int:
        return (1 << self.k) - 1

    @cached_property
    def tasks_of_user(self) -> tuple[int, ...]:
        """Bitmask of authorized tasks, per user."""
        out = [0] * self.n
        for s, users in enumerate(self.authorizations):
            for u in users:
                out[u] |= 1 << s
        return tuple(out)


def is_authorized(schema: WorkflowSchema, p: Plan) -> bool:
    auth = schema.authorizations
    return all(u in auth[s] for s, u in p.assignments.items())


def _scoped(p: Plan, c: Constraint) -> dict[int, int]:
    return {t: p[t] for t in c.scope}


def first_violated(schema: WorkflowSchema, p: Plan) -> Optional[Constraint]:
    """First constraint (in schema order) whose scope is assigned and which fails."""
    for c in schema.constraints:
        sm = c.scope_mask
        if sm & p.task_mask == sm and not c.satisfies(_scoped(p, c), schema.partition):
            return c
    return None


def is_eligible(schema: WorkflowSchema, p: Plan) -> bool:
    return first_violated(schema, p) is None


def is_valid(schema: WorkflowSchema, p: Plan) -> bool:
    return is_authorized(schema, p) and is_eligible(schema, p)


def is_valid_complete(schema: WorkflowSchema, p: Plan) -> bool:
    return p.task_mask == schema.all_tasks and is_valid(schema, p)
