import itertools
import random

import pytest

from conftest import random_schema, small_schema
from wspsolve import (
    BinaryRel,
    IdentityRelation,
    Plan,
    Rel,
    RelationMismatch,
    ResourceLimit,
    UiRelation,
    UserOrdering,
    UserPartition,
    WorkflowSchema,
    bell_number,
    enumerate_plans,
    is_valid_complete,
    make_ordering,
    observed_width,
    solve_naive,
    solve_pattern,
)
from wspsolve.relations import EquivRelation

UI_FAMILIES = ("eq", "neq", "set", "counting", "atmost", "atleast", "forbidden")


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p


@pytest.mark.parametrize("k", range(9))
def test_bell_number_matches_enumeration(k):
    assert bell_number(k) == sum(1 for _ in _partitions(list(range(k))))


def test_bell_number_known_values():
    assert [bell_number(k) for k in (0, 3, 5, 10)] == [1, 5, 52, 115975]


def test_small_instance_is_solved():
    s = small_schema()
    for plan in (solve_naive(s), solve_pattern(s, "ui").result, solve_pattern(s, "identity").result):
        assert plan is not None and is_valid_complete(s, plan)


def test_small_instance_without_authorized_user_for_s3():
    s = small_schema()
    auth = list(s.authorizations)
    auth[2] = frozenset()
    s2 = WorkflowSchema(4, 6, tuple(auth), s.constraints)
    assert solve_naive(s2) is None
    assert solve_pattern(s2).result is None
    assert enumerate_plans(s2) is None


@pytest.mark.parametrize("early", [True, False])
def test_empty_task_set_gives_empty_plan(early):
    s = WorkflowSchema(0, 3, ())
    rep = solve_pattern(s, early_exit=early)
    assert rep.result is not None and len(rep.result) == 0
    assert solve_naive(s) is not None


def test_make_ordering_groups_classes():
    # classes {u1}, {u3, u4}, {u2} carry indices 0, 1, 2
    part = UserPartition((0, 2, 1, 1))
    s = WorkflowSchema(2, 4, ({0}, {1}), (BinaryRel(0, 1, Rel.SIM),), part)
    assert make_ordering(s, EquivRelation(part)).order == (0, 2, 3, 1)
    assert make_ordering(s, UiRelation()).order == (0, 1, 2, 3)
    one = WorkflowSchema(1, 3, ({0},), partition=UserPartition((0, 0, 0)))
    assert make_ordering(one, EquivRelation(one.partition)).order == (0, 1, 2)


def test_ordering_must_be_permutation():
    with pytest.raises(Exception):
        UserOrdering((0, 0, 1))


def test_ui_instances_match_oracle():
    for seed in range(200):
        s = random_schema(seed, families=UI_FAMILIES)
        rep = solve_pattern(s, "ui")
        oracle = enumerate_plans(s)
        assert rep.satisfiable == (oracle is not None), seed
        if rep.result is not None:
            assert is_valid_complete(s, rep.result)


def test_naive_matches_oracle_on_tiny_instances():
    for seed in range(20):
        s = random_schema(seed, k_max=3, n_max=4, families=UI_FAMILIES)
        assert (solve_naive(s) is None) == (enumerate_plans(s) is None), seed


def test_early_exit_does_not_change_verdict():
    for seed in range(100):
        s = random_schema(500 + seed)
        assert solve_pattern(s, early_exit=True).satisfiable == solve_pattern(s, early_exit=False).satisfiable


def test_identity_relation_matches_naive():
    for seed in range(60):
        s = random_schema(900 + seed, k_max=4, n_max=5)
        assert solve_pattern(s, IdentityRelation()).satisfiable == (solve_naive(s) is not None)


def test_verdict_invariant_under_user_relabelling():
    for seed in range(60):
        s = random_schema(1300 + seed, families=UI_FAMILIES)
        perm = list(range(s.n))
        random.Random(seed).shuffle(perm)
        auth = tuple(frozenset(perm[u] for u in a) for a in s.authorizations)
        t = WorkflowSchema(s.k, s.n, auth, s.constraints)
        assert solve_pattern(s).satisfiable == solve_pattern(t).satisfiable


def test_representatives_are_valid():
    from wspsolve import is_authorized, is_eligible

    for seed in range(40):
        s = random_schema(1700 + seed, k_max=4, n_max=5)

        def check(i, cells):
            for mask, plans in cells.items():
                for p in plans:
                    assert p.task_mask == mask
                    assert is_authorized(s, p) and is_eligible(s, p)
                assert len(set(plans)) == len(plans)

        solve_pattern(s, early_exit=False, on_iteration=check)


def test_width_example_two_tasks():
    s = WorkflowSchema(2, 3, (range(3), range(3)))
    final = {}
    rep = solve_pattern(s, "ui", early_exit=False, on_iteration=lambda i, c: final.update(c))
    assert len(final[0b11]) == 2
    assert observed_width(rep) >= 2


def test_relation_mismatch():
    part = UserPartition((0, 1))
    s = WorkflowSchema(2, 2, ({0, 1}, {0, 1}), (BinaryRel(0, 1, Rel.SIM),), part)
    with pytest.raises(RelationMismatch):
        solve_pattern(s, "ui")
    with pytest.raises(RelationMismatch):
        solve_pattern(WorkflowSchema(1, 1, ({0},)), "equiv")


def test_budgets():
    s = WorkflowSchema(4, 6, tuple([range(6)] * 4))
    with pytest.raises(ResourceLimit):
        solve_naive(s, budget=10)
    with pytest.raises(ResourceLimit):
        solve_pattern(s, early_exit=False, pattern_budget=5)


def test_report_fields():
    rep = solve_pattern(small_schema())
    assert rep.satisfiable and rep.early_exit and rep.relation == UiRelation()
    assert rep.cells_visited >= 1 and rep.plans_generated >= 1 and rep.wall_time >= 0
    assert 1 <= rep.users_used <= 6
    assert rep.result.users == frozenset(range(rep.users_used))


def test_full_authorization_bell_counts():
    for k in range(1, 5):
        s = WorkflowSchema(k, k, tuple([range(k)] * k))
        last = {}
        solve_pattern(s, "ui", early_exit=False, on_iteration=lambda i, c: last.update({i: c}))
        assert len(last[k][(1 << k) - 1]) == bell_number(k)
        assert all(len(p) <= bell_number(k) for c in last.values() for p in c.values())


def test_all_user_subsets_of_identity_are_plans():
    # identity relation stores every valid plan, so it matches naive tables
    s = random_schema(77, k_max=3, n_max=3)
    naive, pat = {}, {}
    solve_naive(s, on_iteration=lambda i, ps: naive.update({i: set(ps)}))
    solve_pattern(s, "identity", UserOrdering.identity(s.n), early_exit=False,
                  on_iteration=lambda i, c: pat.update({i: set(itertools.chain(*c.values()))}))
    assert naive == pat
