import random
import sys
from pathlib import Path

import pytest

from wspsolve import (
    AtLeastDistinct,
    AtMostDistinct,
    BinaryRel,
    Counting,
    ForbiddenCoassign,
    Instance,
    Plan,
    Rel,
    SetRel,
    UserPartition,
    WorkflowSchema,
)

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT))

# Four tasks, six users; rows are tasks, entries the authorized users.
SMALL_AUTH = ({0, 1}, {1, 2}, {1, 3, 4, 5}, {1, 3, 4, 5})
SMALL_CONSTRAINTS = (
    BinaryRel(0, 1, Rel.EQ),
    BinaryRel(1, 2, Rel.NEQ),
    BinaryRel(2, 3, Rel.NEQ),
    BinaryRel(0, 3, Rel.NEQ),
)
# pi1 authorized only, pi2 eligible only, pi3 valid but incomplete, pi4 valid complete
SMALL_PLANS = {
    "pi1": {0: 0, 1: 1, 2: 3, 3: 4},
    "pi2": {0: 0, 1: 0, 2: 3, 3: 4},
    "pi3": {0: 0, 2: 3, 3: 4},
    "pi4": {0: 1, 1: 1, 2: 3, 3: 4},
}


def small_schema() -> WorkflowSchema:
    return WorkflowSchema(4, 6, SMALL_AUTH, SMALL_CONSTRAINTS)


def small_instance() -> Instance:
    return Instance(small_schema(), ("s1", "s2", "s3", "s4"), tuple(f"u{i}" for i in range(1, 7)))


def small_plan(name: str) -> Plan:
    return Plan(SMALL_PLANS[name], range(6))


@pytest.fixture
def schema1():
    return small_schema()


@pytest.fixture
def instance1():
    return small_instance()


FAMILIES = ("eq", "neq", "sim", "nsim", "set", "counting", "atmost", "atleast", "forbidden")


def random_constraint(rng: random.Random, k: int, family: str):
    tasks = list(range(k))
    if family in ("eq", "neq", "sim", "nsim"):
        s, t = rng.sample(tasks, 2)
        return BinaryRel(s, t, {"eq": Rel.EQ, "neq": Rel.NEQ, "sim": Rel.SIM, "nsim": Rel.NSIM}[family])
    if family == "set":
        size = rng.randint(2, k)
        picked = rng.sample(tasks, size)
        cut = rng.randint(1, size - 1)
        return SetRel(frozenset(picked[:cut]), frozenset(picked[cut:]), rng.choice((Rel.EQ, Rel.NEQ)))
    if family == "counting":
        scope = frozenset(rng.sample(tasks, rng.randint(2, k)))
        lo = rng.randint(1, len(scope))
        return Counting(lo, rng.randint(lo, len(scope)), scope)
    if family in ("atmost", "atleast"):
        scope = frozenset(rng.sample(tasks, rng.randint(2, k)))
        cls = AtMostDistinct if family == "atmost" else AtLeastDistinct
        return cls(scope, rng.randint(1, len(scope)))
    if family == "forbidden":
        return ForbiddenCoassign(*(rng.randrange(k) for _ in range(4)))
    raise ValueError(family)


def random_schema(seed: int, k_max: int = 5, n_max: int = 10, families=FAMILIES, m_max: int = 4,
                  density: float = 0.6) -> WorkflowSchema:
    """Small random instance; a user partition is drawn when ~-constraints are."""
    rng = random.Random(seed)
    k = rng.randint(2, k_max)
    n = rng.randint(1, n_max)
    auth = [frozenset(u for u in range(n) if rng.random() < density) for _ in range(k)]
    cons = []
    for _ in range(rng.randint(0, m_max)):
        fam = rng.choice(families)
        cons.append(random_constraint(rng, k, fam))
    partition = None
    if any(c.uses_partition for c in cons):
        classes = rng.randint(1, n)
        labels = list(range(classes)) + [rng.randrange(classes) for _ in range(n - classes)]
        rng.shuffle(labels)
        partition = UserPartition(tuple(labels))
    return WorkflowSchema(k, n, tuple(auth), tuple(cons), partition)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
