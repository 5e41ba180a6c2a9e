"""Kernel selection and flattening of schemas into kernel input rows.

The compiled kernel is used when it imports; ``WSPSOLVE_KERNEL=python``
forces the pure-Python one, ``WSPSOLVE_KERNEL=compiled`` makes a missing
extension an import error.
"""

from __future__ import annotations

import logging
import os
from types import ModuleType
from typing import Optional, Sequence

from . import _pykernel
from .constraints import (
    AtLeastDistinct,
    AtMostDistinct,
    BinaryRel,
    Constraint,
    Counting,
    ForbiddenCoassign,
    Rel,
    SetRel,
)
from .relations import EquivRelation, IdentityRelation, Relation, UiRelation

log = logging.getLogger(__name__)

try:
    from . import _ckernel
except ImportError:  # pragma: no cover - depends on the build
    _ckernel = None

_BACKENDS: dict[str, Optional[ModuleType]] = {"python": _pykernel, "compiled": _ckernel}


def _select() -> str:
    wanted = os.environ.get("WSPSOLVE_KERNEL", "auto").lower()
    if wanted == "python":
        return "python"
    if wanted == "compiled" and _ckernel is None:
        raise ImportError("WSPSOLVE_KERNEL=compiled but wspsolve._ckernel is not built")
    if _ckernel is None:
        log.info("compiled kernel unavailable, using pure Python")
        return "python"
    return "compiled"


DEFAULT_BACKEND = _select()


def available_backends() -> list[str]:
    return [name for name, mod in _BACKENDS.items() if mod is not None]


def get_backend(name: Optional[str] = None) -> ModuleType:
    mod = _BACKENDS.get(name or DEFAULT_BACKEND)
    if mod is None:
        raise ValueError(f"kernel backend {name!r} is not available")
    return mod


_BINARY_CODES = {
    Rel.EQ: _pykernel.EQ,
    Rel.NEQ: _pykernel.NEQ,
    Rel.SIM: _pykernel.SIM,
    Rel.NSIM: _pykernel.NSIM,
}


def constraint_row(c: Constraint) -> tuple[int, int, int, int, int, int]:
    scope = c.scope_mask
    if isinstance(c, BinaryRel):
        return (_BINARY_CODES[c.relation], scope, c.s, c.t, 0, 0)
    if isinstance(c, SetRel):
        code = _pykernel.SET_EQ if c.relation is Rel.EQ else _pykernel.SET_NEQ
        left = sum(1 << t for t in c.left)
        right = sum(1 << t for t in c.right)
        return (code, scope, left, right, 0, 0)
    if isinstance(c, Counting):
        return (_pykernel.COUNTING, scope, c.t_lo, c.t_hi, 0, 0)
    if isinstance(c, AtMostDistinct):
        return (_pykernel.AT_MOST, scope, c.bound, 0, 0, 0)
    if isinstance(c, AtLeastDistinct):
        return (_pykernel.AT_LEAST, scope, c.bound, 0, 0, 0)
    if isinstance(c, ForbiddenCoassign):
        return (_pykernel.FORBIDDEN, scope, c.s_i, c.s_h, c.t_j, c.t_l)
    raise TypeError(f"no kernel row for {type(c).__name__}")


def constraint_rows(constraints: Sequence[Constraint]) -> list[tuple[int, int, int, int, int, int]]:
    return [constraint_row(c) for c in constraints]


def relation_components(relation: Relation) -> list[int]:
    out = []
    for r in relation.components:
        if isinstance(r, UiRelation):
            out.append(_pykernel.UI)
        elif isinstance(r, EquivRelation):
            out.append(_pykernel.EQUIV)
        elif isinstance(r, IdentityRelation):
            out.append(_pykernel.IDENTITY)
        else:
            raise TypeError(f"unsupported relation component {r!r}")
    return out
