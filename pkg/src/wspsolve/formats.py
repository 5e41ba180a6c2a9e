"""JSON instance and plan files (format version ``wsp-1``).

Files use task and user names; everything else in the package uses dense
integer indices. Names map to indices in declaration order, and the maps
live only here, on :class:`Instance`.

Instance document::

    {"version": "wsp-1",
     "tasks": ["s1", ...], "users": ["u1", ...],
     "authorizations": {"s1": ["u1", "u2"], ...},
     "equivalence_classes": [["u1"], ["u2", "u3"]],      # optional
     "constraints": [{"type": "neq", "params": {"s": "s1", "t": "s2"}}, ...],
     "metadata": {...}}                                  # optional

Plan document::

    {"version": "wsp-1", "assignments": {"s1": "u2", ...}, "user_pool": [...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from .constraints import (
    AtLeastDistinct,
    AtMostDistinct,
    BinaryRel,
    Constraint,
    Counting,
    ForbiddenCoassign,
    Rel,
    SetRel,
    UserPartition,
)
from .errors import ParseError, SchemaError, ValidationError
from .model import Plan, WorkflowSchema

VERSION = "wsp-1"

_BINARY_TAGS = {"eq": Rel.EQ, "neq": Rel.NEQ, "sim": Rel.SIM, "nsim": Rel.NSIM}
_SET_TAGS = {"set-eq": Rel.EQ, "set-neq": Rel.NEQ}


@dataclass(frozen=True)
class Instance:
    """A schema plus the names its tasks and users carry in files."""

    schema: WorkflowSchema
    task_names: tuple[str, ...]
    user_names: tuple[str, ...]
    task_index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    user_index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "task_names", tuple(self.task_names))
        object.__setattr__(self, "user_names", tuple(self.user_names))
        if len(self.task_names) != self.schema.k or len(self.user_names) != self.schema.n:
            raise SchemaError("name lists do not match the schema's task and user counts")
        for kind, names in (("task", self.task_names), ("user", self.user_names)):
            if len(set(names)) != len(names):
                raise SchemaError(f"duplicate {kind} names")
        object.__setattr__(self, "task_index", {s: i for i, s in enumerate(self.task_names)})
        object.__setattr__(self, "user_index", {u: i for i, u in enumerate(self.user_names)})

    @classmethod
    def with_default_names(cls, schema: WorkflowSchema) -> "Instance":
        """Names from ``metadata['task_names'/'user_names']`` if given, else s1.. and u1..."""
        md = schema.metadata or {}
        tasks = md.get("task_names") or [f"s{i + 1}" for i in range(schema.k)]
        users = md.get("user_names") or [f"u{i + 1}" for i in range(schema.n)]
        return cls(schema, tuple(tasks), tuple(users))

    def describe(self, c: Constraint) -> str:
        """Human-readable constraint, e.g. ``eq(s1,s2)``."""
        rec = _constraint_record(c, self.task_names)
        p = rec["params"]
        if rec["type"] in _BINARY_TAGS:
            return f"{rec['type']}({p['s']},{p['t']})"
        args = ",".join(f"{k}={_short(v)}" for k, v in p.items())
        return f"{rec['type']}({args})"


def _short(v) -> str:
    return "{" + ",".join(v) + "}" if isinstance(v, list) else str(v)


# -- parsing -----------------------------------------------------------------


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


class _Reader:
    """Typed field access that reports JSON paths on failure."""

    def __init__(self, doc: Any, path: str = "$"):
        self.doc, self.path = doc, path

    def obj(self, allowed: Sequence[str], required: Sequence[str]) -> dict:
        if not isinstance(self.doc, dict):
            raise ValidationError("expected an object", self.path)
        for key in self.doc:
            if key not in allowed:
                raise ValidationError(f"unexpected field {key!r}", self.path)
        for key in required:
            if key not in self.doc:
                raise ValidationError(f"missing field {key!r}", self.path)
        return self.doc

    def keyed(self, index: Mapping[str, int], kind: str) -> dict:
        if not isinstance(self.doc, dict):
            raise ValidationError("expected an object", self.path)
        for key in self.doc:
            if key not in index:
                raise ValidationError(f"unknown {kind} {key!r}", self.path)
        return self.doc

    def at(self, key) -> "_Reader":
        sub = f"{self.path}[{key}]" if isinstance(key, int) else f"{self.path}.{key}"
        return _Reader(self.doc[key], sub)

    def string(self) -> str:
        if not isinstance(self.doc, str):
            raise ValidationError("expected a string", self.path)
        return self.doc

    def integer(self) -> int:
        if isinstance(self.doc, bool) or not isinstance(self.doc, int):
            raise ValidationError("expected an integer", self.path)
        return self.doc

    def items(self) -> list["_Reader"]:
        if not isinstance(self.doc, list):
            raise ValidationError("expected a list", self.path)
        return [self.at(i) for i in range(len(self.doc))]

    def names(self, index: Optional[Mapping[str, int]] = None, kind: str = "name") -> list:
        out = []
        for item in self.items():
            name = item.string()
            if index is None:
                out.append(name)
            elif name not in index:
                raise ValidationError(f"unknown {kind} {name!r}", item.path)
            else:
                out.append(index[name])
        return out

    def name(self, index: Mapping[str, int], kind: str) -> int:
        name = self.string()
        if name not in index:
            raise ValidationError(f"unknown {kind} {name!r}", self.path)
        return index[name]


def _check_version(r: _Reader):
    v = r.at("version").string()
    if v != VERSION:
        raise ValidationError(f"unsupported version {v!r}, expected {VERSION!r}", r.path + ".version")


def _declared(r: _Reader, kind: str) -> list[str]:
    names = r.names()
    seen: set[str] = set()
    for i, s in enumerate(names):
        if s in seen:
            raise ValidationError(f"duplicate {kind} name {s!r}", f"{r.path}[{i}]")
        seen.add(s)
    return names


def _parse_constraint(r: _Reader, tasks: Mapping[str, int]) -> Constraint:
    r.obj(("type", "params"), ("type", "params"))
    tag = r.at("type").string()
    p = r.at("params")

    def task(key):
        return p.at(key).name(tasks, "task")

    def task_set(key):
        got = p.at(key).names(tasks, "task")
        if len(set(got)) != len(got):
            raise ValidationError("repeated task", f"{p.path}.{key}")
        return frozenset(got)

    try:
        if tag in _BINARY_TAGS:
            p.obj(("s", "t"), ("s", "t"))
            return BinaryRel(task("s"), task("t"), _BINARY_TAGS[tag])
        if tag in _SET_TAGS:
            p.obj(("left", "right"), ("left", "right"))
            return SetRel(task_set("left"), task_set("right"), _SET_TAGS[tag])
        if tag == "counting":
            p.obj(("t_lo", "t_hi", "tasks"), ("t_lo", "t_hi", "tasks"))
            return Counting(p.at("t_lo").integer(), p.at("t_hi").integer(), task_set("tasks"))
        if tag in ("atmost-distinct", "atleast-distinct"):
            p.obj(("tasks", "bound"), ("tasks", "bound"))
            cls = AtMostDistinct if tag == "atmost-distinct" else AtLeastDistinct
            return cls(task_set("tasks"), p.at("bound").integer())
        if tag == "forbidden-coassign":
            keys = ("s_i", "s_h", "t_j", "t_l")
            p.obj(keys, keys)
            return ForbiddenCoassign(*(task(k) for k in keys))
    except SchemaError as exc:
        raise ValidationError(str(exc), p.path) from exc
    raise ValidationError(f"unknown constraint type {tag!r}", r.path + ".type")


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document."""
    r = _Reader(_load(text))
    r.obj(
        ("version", "tasks", "users", "authorizations", "equivalence_classes", "constraints", "metadata"),
        ("version", "tasks", "users", "authorizations"),
    )
    _check_version(r)
    task_names = _declared(r.at("tasks"), "task")
    user_names = _declared(r.at("users"), "user")
    tasks = {s: i for i, s in enumerate(task_names)}
    users = {u: i for i, u in enumerate(user_names)}

    ar = r.at("authorizations")
    ar.keyed(tasks, "task")
    auth = [frozenset()] * len(task_names)
    for s in ar.doc:
        auth[tasks[s]] = frozenset(ar.at(s).names(users, "user"))

    partition = None
    if "equivalence_classes" in r.doc:
        er = r.at("equivalence_classes")
        class_of = [-1] * len(user_names)
        for j, cls in enumerate(er.items()):
            members = cls.names(users, "user")
            if not members:
                raise ValidationError("empty equivalence class", cls.path)
            for u, item in zip(members, cls.items()):
                if class_of[u] != -1:
                    raise ValidationError(f"user {user_names[u]!r} is in two classes", item.path)
                class_of[u] = j
        missing = [user_names[u] for u, c in enumerate(class_of) if c == -1]
        if missing:
            raise ValidationError(f"users not in any class: {missing}", er.path)
        partition = UserPartition(tuple(class_of))

    constraints = []
    if "constraints" in r.doc:
        constraints = [_parse_constraint(c, tasks) for c in r.at("constraints").items()]
    metadata = r.doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ValidationError("expected an object", "$.metadata")
    try:
        schema = WorkflowSchema(
            len(task_names), len(user_names), tuple(auth), tuple(constraints), partition, metadata
        )
    except SchemaError as exc:
        raise ValidationError(str(exc)) from exc
    return Instance(schema, tuple(task_names), tuple(user_names))


# -- emission ----------------------------------------------------------------


def _constraint_record(c: Constraint, names: Sequence[str]) -> dict:
    def many(ts):
        return [names[t] for t in sorted(ts)]

    if isinstance(c, BinaryRel):
        tag = next(t for t, rel in _BINARY_TAGS.items() if rel is c.relation)
        return {"type": tag, "params": {"s": names[c.s], "t": names[c.t]}}
    if isinstance(c, SetRel):
        tag = next(t for t, rel in _SET_TAGS.items() if rel is c.relation)
        return {"type": tag, "params": {"left": many(c.left), "right": many(c.right)}}
    if isinstance(c, Counting):
        return {"type": "counting", "params": {"t_lo": c.t_lo, "t_hi": c.t_hi, "tasks": many(c.tasks)}}
    if isinstance(c, AtMostDistinct):
        return {"type": "atmost-distinct", "params": {"tasks": many(c.tasks), "bound": c.bound}}
    if isinstance(c, AtLeastDistinct):
        return {"type": "atleast-distinct", "params": {"tasks": many(c.tasks), "bound": c.bound}}
    if isinstance(c, ForbiddenCoassign):
        keys = ("s_i", "s_h", "t_j", "t_l")
        return {"type": "forbidden-coassign", "params": {k: names[getattr(c, k)] for k in keys}}
    raise TypeError(f"cannot serialize {type(c).__name__}")


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def instance_document(inst: Instance) -> dict:
    s = inst.schema
    tn, un = inst.task_names, inst.user_names
    doc: dict = {
        "version": VERSION,
        "tasks": list(tn),
        "users": list(un),
        "authorizations": {tn[i]: [un[u] for u in sorted(a)] for i, a in enumerate(s.authorizations)},
    }
    if s.partition is not None:
        doc["equivalence_classes"] = [[un[u] for u in sorted(c)] for c in s.partition.classes]
    doc["constraints"] = [_constraint_record(c, tn) for c in s.constraints]
    if s.metadata:
        doc["metadata"] = dict(s.metadata)
    return doc


def emit_instance(inst: Instance | WorkflowSchema) -> str:
    """Canonical JSON text; ``emit_instance(parse_instance(t)) == t`` for canonical ``t``."""
    if isinstance(inst, WorkflowSchema):
        inst = Instance.with_default_names(inst)
    return _dump(instance_document(inst))


def emit_plan(plan: Plan, inst: Instance, with_pool: bool = True) -> str:
    doc: dict = {
        "version": VERSION,
        "assignments": {inst.task_names[t]: inst.user_names[u] for t, u in plan.items()},
    }
    if with_pool:
        doc["user_pool"] = [inst.user_names[u] for u in sorted(plan.users)]
    return _dump(doc)


def parse_plan(text: str, inst: Instance) -> Plan:
    """Parse a plan document and resolve its names against ``inst``."""
    r = _Reader(_load(text))
    r.obj(("version", "assignments", "user_pool"), ("version", "assignments"))
    _check_version(r)
    ar = r.at("assignments")
    ar.keyed(inst.task_index, "task")
    asg = {inst.task_index[s]: ar.at(s).name(inst.user_index, "user") for s in ar.doc}
    pool = None
    if "user_pool" in r.doc:
        pool = r.at("user_pool").names(inst.user_index, "user")
    try:
        return Plan(asg, pool)
    except SchemaError as exc:
        raise ValidationError(str(exc), "$.user_pool") from exc
