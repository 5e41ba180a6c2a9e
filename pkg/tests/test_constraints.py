import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FAMILIES, random_constraint
from wspsolve import (
    AtLeastDistinct,
    AtMostDistinct,
    BinaryRel,
    Counting,
    ForbiddenCoassign,
    Rel,
    SchemaError,
    ScopeMismatch,
    SetRel,
    UserPartition,
    is_user_independent,
    satisfies,
)


def test_binary_relations():
    part = UserPartition((0, 0, 1))
    assert satisfies(BinaryRel(0, 1, Rel.EQ), {0: 2, 1: 2})
    assert not satisfies(BinaryRel(0, 1, Rel.NEQ), {0: 2, 1: 2})
    assert satisfies(BinaryRel(0, 1, Rel.SIM), {0: 0, 1: 1}, part)
    assert satisfies(BinaryRel(0, 1, Rel.NSIM), {0: 0, 1: 2}, part)
    assert not satisfies(BinaryRel(0, 1, Rel.NSIM), {0: 0, 1: 1}, part)


def test_set_relation_is_existential():
    c = SetRel(frozenset({0}), frozenset({1, 2}), Rel.EQ)
    assert satisfies(c, {0: 1, 1: 2, 2: 1})
    assert not satisfies(c, {0: 1, 1: 2, 2: 3})
    d = SetRel(frozenset({0, 1}), frozenset({2}), Rel.NEQ)
    assert not satisfies(d, {0: 4, 1: 4, 2: 4})
    assert satisfies(d, {0: 4, 1: 5, 2: 4})


def test_counting():
    c = Counting(1, 2, frozenset({0, 1, 2}))
    assert satisfies(c, {0: 1, 1: 1, 2: 2})
    assert not satisfies(c, {0: 1, 1: 1, 2: 1})
    assert not satisfies(Counting(2, 3, frozenset({0, 1, 2})), {0: 1, 1: 1, 2: 2})


def test_distinct_counts():
    scope = frozenset({0, 1, 2})
    a = {0: 1, 1: 1, 2: 2}
    assert satisfies(AtMostDistinct(scope, 2), a)
    assert not satisfies(AtMostDistinct(scope, 1), a)
    assert satisfies(AtLeastDistinct(scope, 2), a)
    assert not satisfies(AtLeastDistinct(scope, 3), a)
    with pytest.raises(SchemaError):
        AtMostDistinct(scope, 4)


def test_forbidden_coassign():
    c = ForbiddenCoassign(0, 1, 2, 3)
    assert not satisfies(c, {0: 5, 2: 5, 1: 6, 3: 6})
    assert satisfies(c, {0: 5, 2: 5, 1: 6, 3: 7})


def test_scope_must_match():
    with pytest.raises(ScopeMismatch):
        satisfies(BinaryRel(0, 1, Rel.EQ), {0: 1})
    with pytest.raises(ScopeMismatch):
        satisfies(BinaryRel(0, 1, Rel.EQ), {0: 1, 1: 1, 2: 1})


def test_partition_required_for_sim():
    with pytest.raises(SchemaError):
        satisfies(BinaryRel(0, 1, Rel.SIM), {0: 1, 1: 1})


def test_classification():
    assert is_user_independent(BinaryRel(0, 1, Rel.NEQ))
    assert not is_user_independent(BinaryRel(0, 1, Rel.SIM))
    for c in (
        SetRel(frozenset({0}), frozenset({1}), Rel.NEQ),
        Counting(1, 1, frozenset({0, 1})),
        AtMostDistinct(frozenset({0, 1}), 1),
        AtLeastDistinct(frozenset({0, 1}), 1),
        ForbiddenCoassign(0, 1, 2, 3),
    ):
        assert is_user_independent(c)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**6), perm_seed=st.integers(0, 10**6))
def test_user_independent_constraints_ignore_user_names(seed, perm_seed):
    rng = random.Random(seed)
    family = rng.choice([f for f in FAMILIES if f not in ("sim", "nsim")])
    c = random_constraint(rng, 5, family)
    users = list(range(6))
    a = {t: rng.choice(users) for t in c.scope}
    perm = users[:]
    random.Random(perm_seed).shuffle(perm)
    assert satisfies(c, a) == satisfies(c, {t: perm[u] for t, u in a.items()})
