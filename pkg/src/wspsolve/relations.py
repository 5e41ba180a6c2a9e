"""Plan-indistinguishability relations and their pattern encodings.

A relation groups eligible plans that extend to eligible plans in exactly
the same way. Each relation here comes with an encoding: a canonical,
totally ordered pattern such that two plans over the same (user set, task
set) cell get equal patterns exactly when they are related.

* :class:`UiRelation`: same co-assignment structure. Sound when every
  constraint is user-independent. Pattern body: the partition vector.
* :class:`EquivRelation`: same preimage of every user class that is only
  partly inside the plan's user set. Sound when every constraint is a ``~`` /
  ``!~`` binary over the schema's user partition.
* :class:`IdentityRelation`: plans equal as functions. Always sound, width
  up to ``n**k``.
* :class:`ProductRelation`: conjunction of two relations, one per part of
  the constraint set; its pattern is the ordered pair of the operands'.

Every relation also exposes ``key(...)``, the flat integer vector the solver
kernels use as a table key. Comparing keys lexicographically is the pattern
order on a cell.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .constraints import Constraint, UserPartition
from .errors import IncomparableKinds, OverlapError, RelationMismatch
from .model import Plan


def vect(family: Iterable[Iterable[int]], k: int) -> tuple[int, ...]:
    """First-occurrence labelling of a family of disjoint task subsets.

    Tasks in no subset get 0; the subset holding the smallest task gets 1, the
    next new subset 2, and so on.

    >>> vect([{1, 3}, {2}, {4, 6}], 8)
    (0, 1, 2, 1, 3, 0, 3, 0)
    """
    owner = [-1] * k
    for idx, subset in enumerate(family):
        for t in subset:
            if owner[t] != -1:
                raise OverlapError(f"task {t} lies in two subsets")
            owner[t] = idx
    return _first_occurrence(owner)


def _first_occurrence(owner: Sequence[int]) -> tuple[int, ...]:
    # owner[t] < 0 marks "absent"; any other hashable value is a block id.
    labels: dict = {}
    out = []
    for o in owner:
        if o is None or (isinstance(o, int) and o < 0):
            out.append(0)
            continue
        lab = labels.get(o)
        if lab is None:
            lab = labels[o] = len(labels) + 1
        out.append(lab)
    return tuple(out)


class Kind(enum.Enum):
    UI = "ui"
    EQUIV = "equiv"
    IDENTITY = "identity"
    PRODUCT = "product"


@dataclass(frozen=True)
class Pattern:
    """Pattern of a plan: its cell ``(users, tasks)`` plus a relation-specific body.

    Bodies: partition vector (UI); tuple of ``(class index, tasks)`` for each
    straddling class with a nonempty preimage (EQUIV); ``user + 1`` per task
    with 0 for unassigned (IDENTITY); pair of bodies (PRODUCT).
    """

    users: frozenset[int]
    tasks: frozenset[int]
    kind: Kind
    body: tuple
    order_key: tuple[int, ...]

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return (self.users, self.tasks, self.kind, self.order_key) == (
            other.users,
            other.tasks,
            other.kind,
            other.order_key,
        )

    def __hash__(self):
        return hash((self.users, self.tasks, self.kind, self.order_key))


def compare_patterns(p: Pattern, q: Pattern) -> int:
    """-1, 0 or 1. Both patterns must come from the same cell and relation."""
    if p.kind is not q.kind:
        raise IncomparableKinds(f"cannot compare {p.kind.value} with {q.kind.value} patterns")
    if p.users != q.users or p.tasks != q.tasks:
        raise IncomparableKinds("patterns belong to different (users, tasks) cells")
    a, b = p.order_key, q.order_key
    return (a > b) - (a < b)


class Relation:
    kind: Kind

    def covers(self, constraints: Sequence[Constraint]) -> bool:
        raise NotImplementedError

    def key(self, assign: Sequence[int], in_pool) -> tuple[int, ...]:
        """Flat key of the plan ``t -> assign[t]`` (``-1`` = unassigned).

        ``in_pool(u)`` tells whether user ``u`` belongs to the plan's user set.
        """
        raise NotImplementedError

    def _body(self, assign: Sequence[int], users: frozenset[int]) -> tuple:
        raise NotImplementedError

    def equivalent(self, p1: Plan, p2: Plan) -> bool:
        """Direct relation test, independent of the encoding."""
        raise NotImplementedError

    def encode(self, p: Plan, k: int) -> Pattern:
        assign = [p.get(t, -1) for t in range(k)]
        users = p.users
        return Pattern(
            users, p.tasks, self.kind, self._body(assign, users), self.key(assign, users.__contains__)
        )

    @property
    def needs_block_ordering(self) -> bool:
        return False

    @property
    def components(self) -> tuple["Relation", ...]:
        return (self,)


class UiRelation(Relation):
    name = "ui"
    kind = Kind.UI

    def covers(self, constraints):
        return all(c.user_independent for c in constraints)

    def key(self, assign, in_pool):
        return _first_occurrence(assign)

    def _body(self, assign, users):
        return _first_occurrence(assign)

    def equivalent(self, p1, p2):
        if p1.users != p2.users or p1.tasks != p2.tasks:
            return False
        ts = list(p1)
        return all((p1[s] == p1[t]) == (p2[s] == p2[t]) for s in ts for t in ts)

    def __eq__(self, other):
        return isinstance(other, UiRelation)

    def __hash__(self):
        return hash(Kind.UI)

    def __repr__(self):
        return "UiRelation()"


class EquivRelation(Relation):
    name = "equiv"
    kind = Kind.EQUIV

    def __init__(self, partition: UserPartition):
        self.partition = partition
        self._classes = partition.classes

    def covers(self, constraints):
        return all(c.uses_partition for c in constraints)

    def straddling(self, in_pool) -> set[int]:
        out = set()
        for j, members in enumerate(self._classes):
            inside = sum(1 for u in members if in_pool(u))
            if 0 < inside < len(members):
                out.add(j)
        return out

    def key(self, assign, in_pool):
        cls = self.partition.class_of
        open_classes = self.straddling(in_pool)
        return tuple(
            cls[u] + 1 if u >= 0 and cls[u] in open_classes else 0 for u in assign
        )

    def _body(self, assign, users):
        cls = self.partition.class_of
        open_classes = self.straddling(users.__contains__)
        pre: dict[int, set[int]] = {}
        for t, u in enumerate(assign):
            if u >= 0 and cls[u] in open_classes:
                pre.setdefault(cls[u], set()).add(t)
        return tuple((j, frozenset(pre[j])) for j in sorted(pre))

    def equivalent(self, p1, p2):
        if p1.users != p2.users or p1.tasks != p2.tasks:
            return False
        cls = self.partition.class_of
        for j in self.straddling(p1.users.__contains__):
            for s in p1:
                if (cls[p1[s]] == j) != (cls[p2[s]] == j):
                    return False
        return True

    @property
    def needs_block_ordering(self):
        return True

    def __eq__(self, other):
        return isinstance(other, EquivRelation) and other.partition == self.partition

    def __hash__(self):
        return hash((Kind.EQUIV, self.partition))

    def __repr__(self):
        return f"EquivRelation(classes={self.partition.class_count})"


class IdentityRelation(Relation):
    name = "identity"
    kind = Kind.IDENTITY

    def covers(self, constraints):
        return True

    def key(self, assign, in_pool):
        return tuple(u + 1 for u in assign)

    def _body(self, assign, users):
        return tuple(u + 1 for u in assign)

    def equivalent(self, p1, p2):
        return p1 == p2

    def __eq__(self, other):
        return isinstance(other, IdentityRelation)

    def __hash__(self):
        return hash(Kind.IDENTITY)

    def __repr__(self):
        return "IdentityRelation()"


class ProductRelation(Relation):
    """Plans related iff related under both operands."""

    name = "product"
    kind = Kind.PRODUCT

    def __init__(self, first: Relation, second: Relation):
        self.first = first
        self.second = second

    def covers(self, constraints):
        # Each constraint must be handled by at least one operand.
        return all(self.first.covers([c]) or self.second.covers([c]) for c in constraints)

    def key(self, assign, in_pool):
        return self.first.key(assign, in_pool) + self.second.key(assign, in_pool)

    def _body(self, assign, users):
        return (self.first._body(assign, users), self.second._body(assign, users))

    def equivalent(self, p1, p2):
        return self.first.equivalent(p1, p2) and self.second.equivalent(p1, p2)

    @property
    def needs_block_ordering(self):
        return self.first.needs_block_ordering or self.second.needs_block_ordering

    @property
    def components(self):
        return self.first.components + self.second.components

    @property
    def partition(self) -> Optional[UserPartition]:
        for r in self.components:
            if isinstance(r, EquivRelation):
                return r.partition
        return None

    def __eq__(self, other):
        return (
            isinstance(other, ProductRelation)
            and other.first == self.first
            and other.second == self.second
        )

    def __hash__(self):
        return hash((Kind.PRODUCT, self.first, self.second))

    def __repr__(self):
        return f"ProductRelation({self.first!r}, {self.second!r})"


def union_relation(r1: Relation, r2: Relation) -> Relation:
    """Relation for the union of two constraint languages.

    A relation joined with itself is returned unchanged: conjunction is
    idempotent.
    """
    if r1 == r2:
        return r1
    return ProductRelation(r1, r2)


def encode_ui(p: Plan, k: int) -> Pattern:
    return UiRelation().encode(p, k)


def encode_equiv(p: Plan, partition: UserPartition, k: int) -> Pattern:
    return EquivRelation(partition).encode(p, k)


def equivalent_ui(p1: Plan, p2: Plan) -> bool:
    return UiRelation().equivalent(p1, p2)


def equivalent_equiv(p1: Plan, p2: Plan, partition: UserPartition) -> bool:
    return EquivRelation(partition).equivalent(p1, p2)


def auto_relation(constraints: Sequence[Constraint], partition: Optional[UserPartition]) -> Relation:
    """UI if all constraints are user-independent, EQUIV if all use ``~``,
    their product if the set mixes just those two, identity otherwise."""
    if all(c.user_independent for c in constraints):
        return UiRelation()
    if all(c.uses_partition for c in constraints):
        return EquivRelation(partition)
    if all(c.user_independent or c.uses_partition for c in constraints):
        return ProductRelation(UiRelation(), EquivRelation(partition))
    return IdentityRelation()


def check_relation(relation: Relation, constraints: Sequence[Constraint]) -> None:
    if not relation.covers(constraints):
        bad = next(c for c in constraints if not relation.covers([c]))
        raise RelationMismatch(f"{relation!r} does not cover constraint {bad}")
