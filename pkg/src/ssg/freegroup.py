"""Free groups, Stallings folding and coset tables.

A free word is a tuple of nonzero ints: ``i`` is the i-th generator
(1-based) and ``-i`` its inverse.
"""

from __future__ import annotations

import os
from collections import deque

from .errors import BudgetError, InfiniteIndex, ValidationError

DEFAULT_STATE_BUDGET = 10 ** 6


def default_budget():
    return int(os.environ.get("SSG_BUDGET", DEFAULT_STATE_BUDGET))


def free_reduce(w) -> tuple:
    out = []
    for s in w:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def free_inv(w) -> tuple:
    return tuple(-s for s in reversed(w))


def free_mul(*words) -> tuple:
    out = []
    for w in words:
        for s in w:
            if out and out[-1] == -s:
                out.pop()
            else:
                out.append(s)
    return tuple(out)


def free_pow(w, n: int) -> tuple:
    if n < 0:
        w, n = free_inv(w), -n
    return free_reduce(tuple(w) * n)


def letters(rank: int):
    """Shortlex letter order x1 < x1^-1 < x2 < x2^-1 < ..."""
    out = []
    for i in range(1, rank + 1):
        out += [i, -i]
    return out


def reduced_words(rank: int, max_len: int, min_len: int = 1):
    """All nonempty freely reduced words up to ``max_len``, in shortlex order."""
    alph = letters(rank)
    layer = [()]
    for n in range(1, max_len + 1):
        nxt = []
        for w in layer:
            for s in alph:
                if w and w[-1] == -s:
                    continue
                nxt.append(w + (s,))
        layer = nxt
        if n >= min_len:
            yield from layer


class CosetTable:
    """Schreier graph of right cosets H\\F.

    ``table[i][s]`` is the state reached from state ``i`` by reading letter
    ``s``.  State 0 is the base (the coset H).  States are numbered in
    shortlex order of their minimal representatives, so ``reps[i]`` is the
    shortlex-least word w with H w = state i.
    """

    def __init__(self, rank: int, table, complete=None):
        self.rank = rank
        self.table, self.reps = _renumber(rank, table)
        if complete is None:
            complete = all(s in row for row in self.table for s in letters(rank))
        self.complete = complete
        self._schreier = None

    @property
    def index(self) -> int:
        if not self.complete:
            raise InfiniteIndex("coset table is incomplete", partial=self)
        return len(self.table)

    @property
    def n_states(self) -> int:
        return len(self.table)

    def trace(self, w, start: int = 0):
        st = start
        for s in w:
            st = self.table[st].get(s)
            if st is None:
                return None
        return st

    def contains(self, w) -> bool:
        return self.trace(w) == 0

    def schreier_generators(self):
        """Nontrivial Schreier generators r_i s r_j^-1, with the edge they label."""
        if self._schreier is None:
            gens, edge_index = [], {}
            for i, row in enumerate(self.table):
                for s in range(1, self.rank + 1):
                    j = row.get(s)
                    if j is None:
                        continue
                    w = free_mul(self.reps[i], (s,), free_inv(self.reps[j]))
                    if w:
                        edge_index[(i, s)] = len(gens)
                        gens.append(w)
            self._schreier = (gens, edge_index)
        return self._schreier[0]

    def rewrite(self, w):
        """Express w in H as a word over the Schreier basis (1-based letters)."""
        self.schreier_generators()
        edge_index = self._schreier[1]
        out = []
        st = 0
        for s in w:
            nxt = self.table[st].get(s)
            if nxt is None:
                raise ValidationError("word leaves the coset graph")
            if s > 0:
                k = edge_index.get((st, s))
                if k is not None:
                    out.append(k + 1)
            else:
                k = edge_index.get((nxt, -s))
                if k is not None:
                    out.append(-(k + 1))
            st = nxt
        if st != 0:
            raise ValidationError("word is not in the subgroup")
        return free_reduce(out)

    def to_json(self):
        return {"rank": self.rank,
                "table": [{str(s): t for s, t in row.items()} for row in self.table]}

    @classmethod
    def from_json(cls, obj) -> CosetTable:
        return cls(obj["rank"], [{int(s): t for s, t in row.items()} for row in obj["table"]])

    def __eq__(self, other):
        return isinstance(other, CosetTable) and self.rank == other.rank and \
            self.table == other.table

    def __hash__(self):
        return hash((self.rank, len(self.table)))

    def __repr__(self):
        return f"CosetTable(rank={self.rank}, states={len(self.table)}, complete={self.complete})"

    @classmethod
    def trivial(cls, rank: int) -> CosetTable:
        return cls(rank, [{s: 0 for s in letters(rank)}])

    @classmethod
    def from_action(cls, rank: int, act, start, budget=None) -> CosetTable:
        """Stabilizer of ``start`` under a right action ``act(state, letter)``."""
        budget = budget or default_budget()
        ids = {start: 0}
        order = [start]
        table = [{}]
        q = deque([start])
        while q:
            st = q.popleft()
            i = ids[st]
            for s in letters(rank):
                nxt = act(st, s)
                if nxt not in ids:
                    if len(ids) >= budget:
                        raise BudgetError(f"orbit exceeds budget {budget}")
                    ids[nxt] = len(order)
                    order.append(nxt)
                    table.append({})
                    q.append(nxt)
                table[i][s] = ids[nxt]
        tab = cls(rank, table)
        tab.orbit = order
        return tab


def _renumber(rank, table):
    """BFS renumbering from state 0 so states follow shortlex reps."""
    new_id = {0: 0}
    reps = [()]
    q = deque([0])
    while q:
        st = q.popleft()
        for s in letters(rank):
            t = table[st].get(s)
            if t is not None and t not in new_id:
                new_id[t] = len(reps)
                reps.append(reps[new_id[st]] + (s,))
                q.append(t)
    out = [dict() for _ in reps]
    for old, new in new_id.items():
        for s, t in table[old].items():
            if t in new_id:
                out[new][s] = new_id[t]
    return out, reps


def subgroup_build(gens, rank: int, budget=None) -> CosetTable:
    """Stallings folding of the subgroup generated by ``gens``.

    Raises InfiniteIndex (carrying the folded graph) unless the result is a
    complete coset table.
    """
    budget = budget or default_budget()
    parent = [0]
    edges = []

    def new():
        parent.append(len(parent))
        if len(parent) > budget:
            raise BudgetError(f"folding exceeds budget {budget}")
        return len(parent) - 1

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for w in gens:
        w = free_reduce(w)
        if any(abs(s) > rank or s == 0 for s in w):
            raise ValidationError(f"letter out of range in {w}")
        cur = 0
        for i, s in enumerate(w):
            nxt = 0 if i == len(w) - 1 else new()
            if s > 0:
                edges.append((cur, s, nxt))
            else:
                edges.append((nxt, -s, cur))
            cur = nxt

    while True:
        changed = False
        out = {}
        for (u, s, v) in edges:
            u, v = find(u), find(v)
            for key, val in (((u, s), v), ((v, -s), u)):
                old = out.get(key)
                if old is None:
                    out[key] = val
                else:
                    a, b = find(old), find(val)
                    if a != b:
                        if b == 0 or (a != 0 and b < a):
                            a, b = b, a
                        parent[b] = a
                        changed = True
        edges = list({(find(u), s, find(v)) for (u, s, v) in edges})
        if not changed:
            break

    verts = sorted({find(0)} | {find(u) for (u, _, _) in edges} | {find(v) for (_, _, v) in edges})
    ids = {v: i for i, v in enumerate([find(0)] + [v for v in verts if v != find(0)])}
    table = [dict() for _ in ids]
    for (u, s, v) in edges:
        table[ids[u]][s] = ids[v]
        table[ids[v]][-s] = ids[u]
    tab = CosetTable(rank, table)
    if not tab.complete:
        raise InfiniteIndex("subgroup has infinite index", partial=tab)
    return tab


def transversal_and_schreier(table: CosetTable):
    """Shortlex right transversal and the Schreier free basis."""
    table.index  # raises on infinite index
    return list(table.reps), table.schreier_generators()
