"""Workflow constraint families.

Every constraint exposes a task scope and an intensional satisfaction
predicate over assignments whose domain is exactly that scope. The set of
satisfying assignments is never materialized.

Families and their semantics:

``BinaryRel(s, t, rel)``
    ``a[s] rel a[t]`` where ``rel`` is ``=``, ``!=``, ``~`` (same class of the
    schema's user partition) or ``!~``.
``SetRel(left, right, rel)``
    some ``s' in left`` and ``s'' in right`` with ``a[s'] rel a[s'']``.
``Counting(t_lo, t_hi, tasks)``
    every user doing at least one task of ``tasks`` does between ``t_lo`` and
    ``t_hi`` of them.
``AtMostDistinct(tasks, bound)`` / ``AtLeastDistinct(tasks, bound)``
    the number of distinct users on ``tasks`` is ``<= bound`` / ``>= bound``.
``ForbiddenCoassign(s_i, s_h, t_j, t_l)``
    violated exactly when ``a[s_i] == a[t_j]`` and ``a[s_h] == a[t_l]``.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import ClassVar, Mapping, Optional, Sequence

from .bits import mask_of
from .errors import SchemaError, ScopeMismatch


class Family(enum.Enum):
    BINARY = "BinaryRel"
    SET = "SetRel"
    COUNTING = "Counting"
    AT_MOST = "AtMostDistinct"
    AT_LEAST = "AtLeastDistinct"
    FORBIDDEN = "ForbiddenCoassign"


class Rel(enum.Enum):
    EQ = "eq"
    NEQ = "neq"
    SIM = "sim"
    NSIM = "nsim"

    @property
    def uses_partition(self) -> bool:
        return self in (Rel.SIM, Rel.NSIM)


@dataclass(frozen=True)
class UserPartition:
    """An equivalence relation on users given by a class index per user."""

    class_of: tuple[int, ...]

    def __post_init__(self):
        labels = set(self.class_of)
        if labels != set(range(len(labels))):
            raise SchemaError("class indices must be dense, starting at 0")

    @classmethod
    def from_classes(cls, classes: Sequence[Sequence[int]], n: int) -> "UserPartition":
        class_of = [-1] * n
        for j, members in enumerate(classes):
            if not members:
                raise SchemaError(f"equivalence class {j} is empty")
            for u in members:
                if not 0 <= u < n:
                    raise SchemaError(f"user {u} out of range in class {j}")
                if class_of[u] != -1:
                    raise SchemaError(f"user {u} appears in two classes")
                class_of[u] = j
        if -1 in class_of:
            raise SchemaError(f"user {class_of.index(-1)} belongs to no class")
        return cls(tuple(class_of))

    @property
    def n(self) -> int:
        return len(self.class_of)

    @property
    def class_count(self) -> int:
        return max(self.class_of, default=-1) + 1

    @property
    def classes(self) -> tuple[frozenset[int], ...]:
        buckets: list[set[int]] = [set() for _ in range(self.class_count)]
        for u, j in enumerate(self.class_of):
            buckets[j].add(u)
        return tuple(frozenset(b) for b in buckets)

    def same(self, u: int, v: int) -> bool:
        return self.class_of[u] == self.class_of[v]


@dataclass(frozen=True)
class Constraint:
    """Base class. Subclasses define ``scope`` and ``_check``."""

    family: ClassVar[Family]

    @property
    def scope(self) -> frozenset[int]:
        raise NotImplementedError

    @property
    def scope_mask(self) -> int:
        return mask_of(self.scope)

    @property
    def user_independent(self) -> bool:
        return True

    @property
    def uses_partition(self) -> bool:
        return False

    def _check(self, a: Mapping[int, int], eq: Optional[UserPartition]) -> bool:
        raise NotImplementedError

    def satisfies(self, assignment: Mapping[int, int], eq: Optional[UserPartition] = None) -> bool:
        if set(assignment) != self.scope:
            raise ScopeMismatch(
                f"{self} expects scope {sorted(self.scope)}, got {sorted(assignment)}"
            )
        if self.uses_partition and eq is None:
            raise SchemaError(f"{self} needs a user partition")
        return self._check(assignment, eq)


@dataclass(frozen=True)
class BinaryRel(Constraint):
    family = Family.BINARY

    s: int
    t: int
    relation: Rel

    def __post_init__(self):
        if self.s == self.t:
            raise SchemaError("binary constraint needs two distinct tasks")

    @property
    def scope(self):
        return frozenset((self.s, self.t))

    @property
    def user_independent(self):
        return not self.relation.uses_partition

    @property
    def uses_partition(self):
        return self.relation.uses_partition

    def _check(self, a, eq):
        return _related(self.relation, a[self.s], a[self.t], eq)


@dataclass(frozen=True)
class SetRel(Constraint):
    family = Family.SET

    left: frozenset[int]
    right: frozenset[int]
    relation: Rel

    def __post_init__(self):
        if not self.left or not self.right:
            raise SchemaError("set constraint sides must be nonempty")
        if self.relation not in (Rel.EQ, Rel.NEQ):
            raise SchemaError("set constraints support only = and !=")
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))

    @property
    def scope(self):
        return self.left | self.right

    def _check(self, a, eq):
        return any(
            _related(self.relation, a[x], a[y], eq) for x in self.left for y in self.right
        )


@dataclass(frozen=True)
class Counting(Constraint):
    family = Family.COUNTING

    t_lo: int
    t_hi: int
    tasks: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "tasks", frozenset(self.tasks))
        if not self.tasks:
            raise SchemaError("counting constraint needs tasks")
        if not 1 <= self.t_lo <= self.t_hi:
            raise SchemaError("counting constraint needs 1 <= t_lo <= t_hi")

    @property
    def scope(self):
        return self.tasks

    def _check(self, a, eq):
        counts = Counter(a[t] for t in self.tasks)
        return all(self.t_lo <= c <= self.t_hi for c in counts.values())


@dataclass(frozen=True)
class _DistinctCount(Constraint):
    tasks: frozenset[int]
    bound: int

    def __post_init__(self):
        object.__setattr__(self, "tasks", frozenset(self.tasks))
        if not 1 <= self.bound <= len(self.tasks):
            raise SchemaError("distinct-count bound must lie in [1, |tasks|]")

    @property
    def scope(self):
        return self.tasks


class AtMostDistinct(_DistinctCount):
    family = Family.AT_MOST

    def _check(self, a, eq):
        return len({a[t] for t in self.tasks}) <= self.bound


class AtLeastDistinct(_DistinctCount):
    family = Family.AT_LEAST

    def _check(self, a, eq):
        return len({a[t] for t in self.tasks}) >= self.bound


@dataclass(frozen=True)
class ForbiddenCoassign(Constraint):
    family = Family.FORBIDDEN

    s_i: int
    s_h: int
    t_j: int
    t_l: int

    @property
    def scope(self):
        return frozenset((self.s_i, self.s_h, self.t_j, self.t_l))

    def _check(self, a, eq):
        return not (a[self.s_i] == a[self.t_j] and a[self.s_h] == a[self.t_l])


def _related(rel: Rel, u: int, v: int, eq: Optional[UserPartition]) -> bool:
    if rel is Rel.EQ:
        return u == v
    if rel is Rel.NEQ:
        return u != v
    same = eq.same(u, v)
    return same if rel is Rel.SIM else not same


def satisfies(
    c: Constraint, assignment: Mapping[int, int], eq: Optional[UserPartition] = None
) -> bool:
    return c.satisfies(assignment, eq)


def is_user_independent(c: Constraint) -> bool:
    """Classification by family tag; ``~``/``!~`` binaries are the only exceptions."""
    return c.user_independent
