import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wspsolve import (
    AtMostDistinct,
    BinaryRel,
    EquivRelation,
    IdentityRelation,
    IncomparableKinds,
    OverlapError,
    Plan,
    ProductRelation,
    Rel,
    RelationMismatch,
    UiRelation,
    UserPartition,
    auto_relation,
    compare_patterns,
    encode_equiv,
    encode_ui,
    equivalent_equiv,
    equivalent_ui,
    union_relation,
    vect,
)
from wspsolve.relations import check_relation


def test_vect_labels_first_occurrence():
    # tasks 1..8 written 0-based
    a = vect([{1, 3}, {2}, {4, 6}], 8)
    b = vect([{1, 2, 3}, {4, 6}], 8)
    assert a == (0, 1, 2, 1, 3, 0, 3, 0)
    assert b == (0, 1, 1, 1, 2, 0, 2, 0)
    assert a > b


def test_vect_rejects_overlap():
    with pytest.raises(OverlapError):
        vect([{0, 1}, {1}], 3)


def test_vect_of_empty_family():
    assert vect([], 3) == (0, 0, 0)


def test_ui_pattern_ignores_user_names():
    p1 = Plan({0: 0, 1: 1, 2: 0}, range(4))
    p2 = Plan({0: 2, 1: 3, 2: 2}, range(4))
    e1, e2 = encode_ui(p1, 6), encode_ui(p2, 6)
    assert e1 == e2
    assert e1.body == (1, 2, 1, 0, 0, 0)
    assert e1.users == frozenset(range(4)) and e1.tasks == frozenset({0, 1, 2})
    assert equivalent_ui(p1, p2)


def test_equiv_pattern_tracks_straddling_class():
    part = UserPartition.from_classes([[0], [1], [2, 3, 4], [5, 6, 7]], 8)
    p1 = Plan({0: 0, 1: 2, 2: 2}, range(4))
    p2 = Plan({0: 1, 1: 2, 2: 3}, range(4))
    e1, e2 = encode_equiv(p1, part, 6), encode_equiv(p2, part, 6)
    assert e1 == e2
    assert {ts for _, ts in e1.body} == {frozenset({1, 2})}
    assert equivalent_equiv(p1, p2, part)
    p3 = Plan({0: 2, 1: 2, 2: 3}, range(4))
    assert encode_equiv(p3, part, 6) != e1
    assert not equivalent_equiv(p1, p3, part)


def test_compare_patterns():
    full = range(3)
    a = encode_ui(Plan({0: 0, 1: 0}, full), 2)
    b = encode_ui(Plan({0: 0, 1: 1}, full), 2)
    assert compare_patterns(a, b) == -1
    assert compare_patterns(b, a) == 1
    assert compare_patterns(a, a) == 0
    with pytest.raises(IncomparableKinds):
        compare_patterns(a, IdentityRelation().encode(Plan({0: 0, 1: 0}, full), 2))
    with pytest.raises(IncomparableKinds):
        compare_patterns(a, encode_ui(Plan({0: 0, 1: 0}, range(2)), 2))


def test_union_relation():
    ui = UiRelation()
    assert union_relation(ui, UiRelation()) is ui
    part = UserPartition((0, 1))
    prod = union_relation(ui, EquivRelation(part))
    assert isinstance(prod, ProductRelation)
    assert prod.needs_block_ordering


def test_auto_relation_and_checks():
    part = UserPartition((0, 1))
    neq = BinaryRel(0, 1, Rel.NEQ)
    sim = BinaryRel(0, 1, Rel.SIM)
    assert isinstance(auto_relation([neq], None), UiRelation)
    assert isinstance(auto_relation([], None), UiRelation)
    assert isinstance(auto_relation([sim], part), EquivRelation)
    assert isinstance(auto_relation([neq, sim], part), ProductRelation)
    with pytest.raises(RelationMismatch):
        check_relation(UiRelation(), [sim])
    with pytest.raises(RelationMismatch):
        check_relation(EquivRelation(part), [AtMostDistinct(frozenset({0, 1}), 1)])
    check_relation(IdentityRelation(), [neq, sim])


plans = st.tuples(st.integers(1, 5), st.integers(1, 6), st.randoms(use_true_random=False))


def _random_pair(k, n, rng):
    tasks = [t for t in range(k) if rng.random() < 0.7]
    pool = range(n)
    a = {t: rng.randrange(n) for t in tasks}
    b = {t: rng.randrange(n) for t in tasks}
    return Plan(a, pool), Plan(b, pool)


@settings(max_examples=300, deadline=None)
@given(plans)
def test_pattern_equality_matches_direct_test(args):
    k, n, rng = args
    p1, p2 = _random_pair(k, n, rng)
    classes = [rng.randrange(n) for _ in range(n)]
    labels = {c: i for i, c in enumerate(sorted(set(classes)))}
    part = UserPartition(tuple(labels[c] for c in classes))
    for rel in (UiRelation(), EquivRelation(part), IdentityRelation(),
                ProductRelation(UiRelation(), EquivRelation(part))):
        same = rel.encode(p1, k) == rel.encode(p2, k)
        assert same == rel.equivalent(p1, p2), rel
        assert (compare_patterns(rel.encode(p1, k), rel.encode(p2, k)) == 0) == same


@settings(max_examples=200, deadline=None)
@given(plans)
def test_ui_equivalence_is_preserved_by_disjoint_extension(args):
    k, n, rng = args
    if n < 2:
        return
    p1, p2 = _random_pair(k, n - 1, rng)
    p1, p2 = Plan(p1.assignments, range(n - 1)), Plan(p2.assignments, range(n - 1))
    free = [t for t in range(k) if t not in p1]
    ext = {t: n - 1 for t in free if rng.random() < 0.5}
    q1 = Plan({**p1.assignments, **ext}, range(n))
    q2 = Plan({**p2.assignments, **ext}, range(n))
    if equivalent_ui(p1, p2):
        assert equivalent_ui(q1, q2)
