"""Brute-force reference solver.

Tries complete assignments in lexicographic order (task 0 most significant)
and checks each with the model's own predicates. Shares no code with the
solvers' incremental checks.
"""

from __future__ import annotations

import itertools
from typing import Optional

from .errors import BudgetExceeded
from .model import Plan, WorkflowSchema, is_valid_complete

ORACLE_BUDGET = 10**7


def enumerate_plans(schema: WorkflowSchema, budget: int = ORACLE_BUDGET) -> Optional[Plan]:
    """First valid complete plan in lexicographic order, or ``None``.

    Raises :class:`BudgetExceeded` when ``n**k`` exceeds ``budget``.
    Assignments using an unauthorized user are skipped without being built;
    they cannot be valid, so the first valid plan is unchanged.
    """
    space = schema.n**schema.k
    if space > budget:
        raise BudgetExceeded(f"n^k = {schema.n}^{schema.k} exceeds oracle budget {budget}")
    choices = [sorted(a) for a in schema.authorizations]
    pool = range(schema.n)
    for combo in itertools.product(*choices):
        p = Plan(dict(zip(range(schema.k), combo)), pool)
        if is_valid_complete(schema, p):
            return p
    return None


# The spec-level name of the oracle entry point.
enumerate = enumerate_plans  # noqa: A001
