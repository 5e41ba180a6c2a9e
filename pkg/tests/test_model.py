import pytest

from conftest import small_plan
from wspsolve import (
    DisjointnessViolation,
    Plan,
    SchemaError,
    WorkflowSchema,
    first_violated,
    is_authorized,
    is_eligible,
    is_valid,
    is_valid_complete,
    plan_union,
    singleton_block,
)
from wspsolve.bits import bits_of, mask_of, popcount, submasks


def test_small_example_table(schema1):
    expected = {
        "pi1": (True, False, True),
        "pi2": (False, True, True),
        "pi3": (True, True, False),
        "pi4": (True, True, True),
    }
    for name, (auth, elig, complete) in expected.items():
        p = small_plan(name)
        assert is_authorized(schema1, p) is auth, name
        assert is_eligible(schema1, p) is elig, name
        assert (p.task_mask == schema1.all_tasks) is complete, name
    assert is_valid(schema1, small_plan("pi3"))
    assert not is_valid_complete(schema1, small_plan("pi3"))
    assert is_valid_complete(schema1, small_plan("pi4"))


def test_first_violated_reports_equality(schema1):
    c = first_violated(schema1, small_plan("pi1"))
    assert c is not None and c.scope == frozenset({0, 1})


def test_partial_plan_ignores_unassigned_scopes(schema1):
    # neq(s2,s3) has s2 unassigned, so it cannot be violated yet
    assert first_violated(schema1, Plan({0: 0, 2: 0})) is None


def test_plan_users_default_to_image():
    p = Plan({0: 3, 1: 3})
    assert p.users == frozenset({3})
    assert Plan({0: 3}, [3, 4]).users == frozenset({3, 4})


def test_plan_rejects_user_outside_pool():
    with pytest.raises(SchemaError):
        Plan({0: 1}, [0])


def test_union_and_disjointness():
    a = Plan({0: 0}, [0, 1])
    b = Plan({1: 2}, [2])
    u = plan_union(a, b)
    assert u.assignments == {0: 0, 1: 2}
    assert u.users == frozenset({0, 1, 2})
    with pytest.raises(DisjointnessViolation):
        plan_union(a, Plan({0: 2}, [2]))
    with pytest.raises(DisjointnessViolation):
        plan_union(a, Plan({1: 1}, [1]))


def test_singleton_block():
    p = singleton_block([1, 3], 5)
    assert p.assignments == {1: 5, 3: 5}
    assert p.users == frozenset({5})


def test_restrict_keeps_pool():
    p = Plan({0: 1, 1: 2, 2: 1}, [0, 1, 2])
    r = p.restrict([0, 2])
    assert r.assignments == {0: 1, 2: 1}
    assert r.users == p.users


def test_schema_validation():
    with pytest.raises(SchemaError):
        WorkflowSchema(2, 1, ({0},))
    with pytest.raises(SchemaError):
        WorkflowSchema(1, 1, ({3},))


def test_tasks_of_user(schema1):
    assert schema1.tasks_of_user[1] == 0b1111
    assert schema1.tasks_of_user[0] == 0b0001


def test_bits_helpers():
    assert mask_of([0, 3]) == 9
    assert list(bits_of(9)) == [0, 3]
    assert popcount(0b1011) == 3
    assert list(submasks(0b101)) == [0, 1, 4, 5]
