"""Pure-Python pattern-table kernel.

Same contract and loop order as the compiled ``_ckernel``; used when the
extension is not built, or when forced with ``WSPSOLVE_KERNEL=python``.

Inputs are flat: tasks and users are integers, task sets are bitmasks, and
constraints arrive as ``(code, scope_mask, a, b, c, d)`` rows (codes in
``kernel.py``). Relation components are ``UI``, ``EQUIV``, ``IDENTITY``.
"""

from __future__ import annotations

from .errors import ResourceLimit

EQ, NEQ, SIM, NSIM, SET_EQ, SET_NEQ, COUNTING, AT_MOST, AT_LEAST, FORBIDDEN = range(10)
UI, EQUIV, IDENTITY = range(3)


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _prepare(cons):
    # Pre-expand masks into index lists once.
    rows = []
    for code, scope, a, b, c, d in cons:
        if code in (SET_EQ, SET_NEQ):
            rows.append((code, scope, _bits(a), _bits(b), c, d))
        elif code in (COUNTING, AT_MOST, AT_LEAST):
            rows.append((code, scope, _bits(scope), a, b, d))
        else:
            rows.append((code, scope, a, b, c, d))
    return rows


def holds(row, asg, class_of) -> bool:
    code, _, a, b, c, d = row
    if code == EQ:
        return asg[a] == asg[b]
    if code == NEQ:
        return asg[a] != asg[b]
    if code == SIM:
        return class_of[asg[a]] == class_of[asg[b]]
    if code == NSIM:
        return class_of[asg[a]] != class_of[asg[b]]
    if code == SET_EQ:
        return any(asg[x] == asg[y] for x in a for y in b)
    if code == SET_NEQ:
        return any(asg[x] != asg[y] for x in a for y in b)
    if code == COUNTING:
        counts: dict[int, int] = {}
        for t in a:
            counts[asg[t]] = counts.get(asg[t], 0) + 1
        return all(b <= v <= c for v in counts.values())
    if code == AT_MOST:
        return len({asg[t] for t in a}) <= b
    if code == AT_LEAST:
        return len({asg[t] for t in a}) >= b
    if code == FORBIDDEN:
        return not (asg[a] == asg[c] and asg[b] == asg[d])
    raise ValueError(f"unknown constraint code {code}")


def _key(asg, comps, class_of, open_class):
    out = []
    for comp in comps:
        if comp == UI:
            seen: dict[int, int] = {}
            for u in asg:
                if u < 0:
                    out.append(0)
                else:
                    lab = seen.get(u)
                    if lab is None:
                        lab = seen[u] = len(seen) + 1
                    out.append(lab)
        elif comp == EQUIV:
            for u in asg:
                out.append(class_of[u] + 1 if u >= 0 and open_class[class_of[u]] else 0)
        else:
            for u in asg:
                out.append(u + 1)
    return tuple(out)


def run(
    k, order_users, order_auth, cons, class_of, class_size, comps, early_exit,
    observer=None, pattern_budget=0, progress=None,
):
    """Build representative sets prefix by prefix.

    Each cell maps a pattern to its representative, in insertion order.
    Adding user ``u`` keeps every plan (re-keyed, first one wins, if ``u``
    completes a user class) and then appends ``plan + (block -> u)`` for each
    prefix-``i`` plan in table order and each nonempty authorized free block
    in ascending mask order.

    Returns ``(assignment or None, prefix, peak, cells_visited, plans_generated)``
    where ``assignment`` is a length-``k`` tuple of user ids (-1 unassigned)
    and ``prefix`` the number of users in the returned plan's pool.
    """
    full = (1 << k) - 1
    rows = _prepare(cons)
    n = len(order_users)
    in_prefix = [0] * len(class_size)
    open_class = [False] * len(class_size)
    rekey = EQUIV in comps

    empty = tuple([-1] * k)
    cells = {0: {_key(empty, comps, class_of, open_class): empty}}
    peak = 1
    visited = 1
    generated = 0

    def export():
        return {t: [c[key] for key in sorted(c)] for t, c in sorted(cells.items())}

    if observer is not None:
        observer(0, export())
    if early_exit and full in cells:
        return next(iter(cells[full].values())), 0, peak, visited, generated

    for i in range(n):
        u = order_users[i]
        auth = order_auth[i]
        cu = class_of[u]
        was_open = open_class[cu]
        in_prefix[cu] += 1
        open_class[cu] = in_prefix[cu] < class_size[cu]
        # Extensions start from the prefix-i representatives, taken before any
        # merge: plans equal under U_{i+1} may still extend differently by u.
        sources = [(tp, list(cells[tp].values())) for tp in sorted(cells)]
        if rekey and was_open and not open_class[cu]:
            for t, cell in cells.items():
                merged = {}
                for asg in cell.values():
                    merged.setdefault(_key(asg, comps, class_of, open_class), asg)
                cells[t] = merged
        for tp, olds in sources:
            avail = full & ~tp & auth
            if not avail:
                continue
            subs = []
            sub = 0
            while sub != avail:
                sub = (sub - avail) & avail
                subs.append((sub, _bits(sub), tp | sub,
                             [r for r in rows if r[1] & sub and not r[1] & ~(tp | sub)]))
            for base in olds:
                for _, tasks, t_new, checks in subs:
                    generated += 1
                    asg = list(base)
                    for t in tasks:
                        asg[t] = u
                    if not all(holds(r, asg, class_of) for r in checks):
                        continue
                    cell = cells.get(t_new)
                    if cell is None:
                        cell = cells[t_new] = {}
                    cell.setdefault(_key(asg, comps, class_of, open_class), tuple(asg))

        stored = sum(len(c) for c in cells.values())
        visited += len(cells)
        peak = max(peak, max(len(c) for c in cells.values()))
        if observer is not None:
            observer(i + 1, export())
        if progress is not None:
            progress(i + 1, len(cells), stored, peak)
        if pattern_budget and stored > pattern_budget:
            raise ResourceLimit(f"pattern budget {pattern_budget} exceeded at user {i + 1}")
        if early_exit and full in cells:
            return next(iter(cells[full].values())), i + 1, peak, visited, generated

    if full in cells:
        return next(iter(cells[full].values())), n, peak, visited, generated
    return None, n, peak, visited, generated
