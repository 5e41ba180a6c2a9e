"""Random WSP instances and the k x k Independent Set reduction.

Randomness comes from SplitMix64 so an instance is a pure function of its
seed in any language: every draw below is documented in the order it is
made.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import comb
from typing import Optional, Sequence

from .constraints import AtLeastDistinct, AtMostDistinct, BinaryRel, ForbiddenCoassign, Rel
from .model import WorkflowSchema

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014), the usual xorshift-seeding PRNG."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound

    def between(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def sample(self, population: Sequence[int], m: int) -> list[int]:
        """``m`` distinct items by a partial Fisher-Yates shuffle."""
        pool = list(population)
        for i in range(m):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:m]


@dataclass(frozen=True)
class GeneratorConfig:
    k: int
    n: Optional[int] = None
    auth_min: int = 1
    auth_max: Optional[int] = None
    neq: int = 20
    at_most: int = 2
    at_least: int = 2
    seed: int = 0

    def resolved(self) -> "GeneratorConfig":
        """Fill defaults: ``n = 10k`` and ``auth_max = max(1, k // 2)``."""
        n = 10 * self.k if self.n is None else self.n
        hi = max(1, self.k // 2) if self.auth_max is None else self.auth_max
        return GeneratorConfig(self.k, n, self.auth_min, hi, self.neq, self.at_most, self.at_least, self.seed)

    def validate(self) -> "GeneratorConfig":
        c = self.resolved()
        if c.k < 1:
            raise ValueError("k must be at least 1")
        if c.n < 1:
            raise ValueError("n must be at least 1")
        if not 1 <= c.auth_min <= c.auth_max <= c.k:
            raise ValueError(f"need 1 <= auth_min <= auth_max <= k, got {c.auth_min}..{c.auth_max}")
        if min(c.neq, c.at_most, c.at_least) < 0:
            raise ValueError("constraint counts must be non-negative")
        if c.neq > comb(c.k, 2):
            raise ValueError(f"at most {comb(c.k, 2)} distinct != constraints exist for k={c.k}")
        if (c.at_most or c.at_least) and c.k < 3:
            raise ValueError("distinct-count constraints need k >= 3")
        if not 0 <= c.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return c

    def as_dict(self) -> dict:
        return asdict(self.resolved())


def generate_instance(cfg: GeneratorConfig) -> WorkflowSchema:
    """Draw an instance.

    Order of draws: for each user, an authorized-set size in
    ``[auth_min, auth_max]`` then that many tasks; then ``neq`` distinct task
    pairs; then ``at_most`` and ``at_least`` constraints, each a scope size in
    ``[3, min(k, 5)]``, the scope, and a bound in ``[1, size]``. Duplicates
    are redrawn.
    """
    cfg = cfg.validate()
    rng = SplitMix64(cfg.seed)
    k, n = cfg.k, cfg.n
    auth: list[set[int]] = [set() for _ in range(k)]
    for u in range(n):
        size = rng.between(cfg.auth_min, cfg.auth_max)
        for s in rng.sample(range(k), size):
            auth[s].add(u)

    constraints = []
    seen: set = set()

    def draw(count: int, make, limit_tries: int):
        made = tries = 0
        while made < count:
            tries += 1
            if tries > limit_tries:
                raise ValueError("could not draw enough distinct constraints")
            c = make()
            if c not in seen:
                seen.add(c)
                constraints.append(c)
                made += 1

    def neq():
        s, t = sorted(rng.sample(range(k), 2))
        return BinaryRel(s, t, Rel.NEQ)

    def distinct(cls):
        def make():
            size = rng.between(3, min(k, 5))
            scope = frozenset(rng.sample(range(k), size))
            return cls(scope, rng.between(1, size))

        return make

    budget = 1000 * (cfg.neq + cfg.at_most + cfg.at_least + 1)
    draw(cfg.neq, neq, budget)
    draw(cfg.at_most, distinct(AtMostDistinct), budget)
    draw(cfg.at_least, distinct(AtLeastDistinct), budget)
    return WorkflowSchema(k, n, tuple(auth), tuple(constraints), metadata={"generator": cfg.as_dict()})


@dataclass(frozen=True)
class GridGraph:
    """Graph on the ``k x k`` grid; vertices are 0-based ``(row, column)``."""

    k: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for e in self.edges:
            a, b = tuple(e) if len(e) == 2 else (None, None)
            if a is None or a == b:
                raise ValueError(f"bad edge {e!r}")
            for v in (a, b):
                if not (0 <= v[0] < self.k and 0 <= v[1] < self.k):
                    raise ValueError(f"vertex {v} outside the {self.k}x{self.k} grid")
            norm.add(frozenset((tuple(a), tuple(b))))
        object.__setattr__(self, "edges", frozenset(norm))

    def sorted_edges(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


def random_grid_graph(k: int, density: float, seed: int) -> GridGraph:
    """Each unordered vertex pair becomes an edge with probability ``density``."""
    rng = SplitMix64(seed)
    verts = [(i, j) for i in range(k) for j in range(k)]
    threshold = int(density * (1 << 64))
    edges = set()
    for x in range(len(verts)):
        for y in range(x + 1, len(verts)):
            if rng.next_u64() < threshold:
                edges.add(frozenset((verts[x], verts[y])))
    return GridGraph(k, frozenset(edges))


def reduce_kxk_independent_set(g: GridGraph) -> WorkflowSchema:
    """WSP instance satisfiable iff ``g`` has an independent set with one vertex per row.

    Tasks ``0..k-1`` pick a column per row; task ``k + j`` is pinned to user
    ``j`` and stands for column ``j``. Each edge ``{(i, j), (h, l)}`` forbids
    row ``i`` sharing a user with column ``j`` while row ``h`` shares one
    with column ``l``.
    """
    k = g.k
    auth = [frozenset(range(k))] * k + [frozenset((j,)) for j in range(k)]
    cons = [ForbiddenCoassign(i, h, k + j, k + l) for (i, j), (h, l) in g.sorted_edges()]
    names = [f"s{i + 1}" for i in range(k)] + [f"t{j + 1}" for j in range(k)]
    return WorkflowSchema(
        2 * k,
        k,
        tuple(auth),
        tuple(cons),
        metadata={"task_names": names, "reduction": "kxk-independent-set"},
    )


def independent_row_selection(g: GridGraph) -> Optional[tuple[int, ...]]:
    """Brute force over all ``k**k`` column choices; first independent one or ``None``."""
    from itertools import product

    adj = {v: set() for v in ((i, j) for i in range(g.k) for j in range(g.k))}
    for a, b in g.sorted_edges():
        adj[a].add(b)
        adj[b].add(a)
    for cols in product(range(g.k), repeat=g.k):
        chosen = [(i, c) for i, c in enumerate(cols)]
        if all(b not in adj[a] for x, a in enumerate(chosen) for b in chosen[x + 1 :]):
            return cols
    return None
