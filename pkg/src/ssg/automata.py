"""Finite wreath recursions g = (g_0, ..., g_{m-1}) sigma on the m-ary tree.

Convention (left action): g(i v) = sigma(i) g_i(v), so for a product
(gh)(v) = g(h(v)) the root permutation is sigma_g o sigma_h and
(gh)_i = g_{sigma_h(i)} h_i.

A state word is a tuple of signed 1-based state indices, read as a product
from left to right.
"""

from __future__ import annotations

import os
import warnings
from collections import deque
from dataclasses import dataclass

from .errors import BadArity, BadLetter, ClosureBudgetExceeded, ValidationError
from .freegroup import free_inv, free_mul, free_reduce

EXACT_BUDGET = 10 ** 5


def default_budget() -> int:
    """Closure budget; the SSG_BUDGET environment variable overrides it."""
    env = os.environ.get("SSG_BUDGET")
    return int(env) if env else EXACT_BUDGET


SWAP = (1, 0)
ID2 = (0, 1)


def _perm_inv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass(frozen=True)
class Trivial:
    def to_json(self):
        return {"verdict": "Trivial"}


@dataclass(frozen=True)
class NontrivialAtDepth:
    depth: int

    def to_json(self):
        return {"verdict": "NontrivialAtDepth", "depth": self.depth}


@dataclass(frozen=True)
class UndeterminedAtDepth:
    depth: int

    def to_json(self):
        return {"verdict": "UndeterminedAtDepth", "depth": self.depth}


@dataclass(frozen=True)
class BoundedDepth:
    depth: int


EXACT = "Exact"


class WreathAutomaton:
    """Finite automaton given by named states, permutations and section words."""

    def __init__(self, degree: int, states, sections_as_names=True):
        if degree < 2:
            raise ValidationError("tree degree must be at least 2")
        self.degree = degree
        states = list(states)
        self.names = [s[0] for s in states]
        if len(set(self.names)) != len(self.names):
            raise ValidationError("duplicate state names")
        self._index = {n: i + 1 for i, n in enumerate(self.names)}
        self.perms = {}
        self.secs = {}
        for i, (name, perm, sections) in enumerate(states, start=1):
            perm = tuple(perm)
            if sorted(perm) != list(range(degree)):
                raise ValidationError(f"state {name}: {perm} is not a permutation")
            if len(sections) != degree:
                raise ValidationError(f"state {name}: needs {degree} sections")
            self.perms[i] = perm
            self.secs[i] = tuple(self.encode(s) for s in sections)
        for i in list(self.perms):
            p, s = self.perms[i], self.secs[i]
            pinv = _perm_inv(p)
            self.perms[-i] = pinv
            # (g^-1)_j = (g_{sigma^-1(j)})^-1
            self.secs[-i] = tuple(free_inv(s[pinv[j]]) for j in range(degree))

    # -- words ---------------------------------------------------------------
    def encode(self, src) -> tuple:
        """Word from a tuple of ints, a list of (name, sign), or an expression."""
        from .expr import parse_word

        if isinstance(src, StateWord):
            return src.letters
        if isinstance(src, str):
            return parse_word(src, self.names) if src not in ("", "e") else ()
        src = list(src)
        if all(isinstance(s, int) for s in src):
            out = tuple(src)
        else:
            out = tuple(self._index[n] * (1 if sg > 0 else -1) for n, sg in src)
        for s in out:
            if s == 0 or abs(s) > len(self.names):
                raise ValidationError(f"bad state letter {s}")
        return free_reduce(out)

    def word(self, src) -> StateWord:
        return StateWord(self, self.encode(src))

    def state(self, name) -> StateWord:
        return StateWord(self, (self._index[name],))

    def states(self):
        return [self.state(n) for n in self.names]

    def word_name(self, w) -> str:
        from .families import _join, _word_expr

        return _join(_word_expr(self.names, w))

    # -- action --------------------------------------------------------------
    def step(self, w, i):
        """(image of letter i, section of w at i)."""
        sec = []
        for s in reversed(w):
            sec.append(self.secs[s][i])
            i = self.perms[s][i]
        return i, free_mul(*reversed(sec))

    def root_perm(self, w):
        out = tuple(range(self.degree))
        for s in reversed(w):
            p = self.perms[s]
            out = tuple(p[j] for j in out)
        return out

    def act(self, w, v):
        w = self.encode(w)
        out = []
        for i in v:
            if not isinstance(i, int) or not 0 <= i < self.degree:
                raise BadLetter(f"letter {i!r} is not in 0..{self.degree - 1}")
            j, w = self.step(w, i)
            out.append(j)
        return tuple(out)

    def section(self, w, v):
        w = self.encode(w)
        for i in v:
            if not 0 <= i < self.degree:
                raise BadLetter(f"letter {i!r} is not in 0..{self.degree - 1}")
            _, w = self.step(w, i)
        return w

    def is_trivial(self, w, mode=EXACT, budget=None):
        w = self.encode(w)
        if isinstance(mode, BoundedDepth):
            return self._bounded(w, mode.depth)
        budget = budget or default_budget()
        seen = {w}
        layer = [w]
        depth = 1
        while layer:
            nxt = []
            for u in layer:
                if self.root_perm(u) != tuple(range(self.degree)):
                    return NontrivialAtDepth(depth)
                for i in range(self.degree):
                    s = self.step(u, i)[1]
                    if s not in seen:
                        seen.add(s)
                        if len(seen) > budget:
                            raise ClosureBudgetExceeded(f"section closure exceeds {budget} words")
                        nxt.append(s)
            layer = nxt
            depth += 1
        return Trivial()

    def _bounded(self, w, depth):
        layer = {w}
        for d in range(1, depth + 1):
            nxt = set()
            for u in layer:
                if self.root_perm(u) != tuple(range(self.degree)):
                    return NontrivialAtDepth(d)
                for i in range(self.degree):
                    nxt.add(self.step(u, i)[1])
            layer = nxt
        if layer == {()}:
            return Trivial()
        return UndeterminedAtDepth(depth)

    def portrait(self, w, depth: int):
        return portrait_of(lambda u, i: self.step(u, i), lambda u: self.root_perm(u),
                           self.encode(w), depth, self.degree)

    def closure(self, budget=None):
        """States (as words) reachable from the named states, for export."""
        budget = budget or default_budget()
        seen = {(i,) for i in range(1, len(self.names) + 1)}
        q = deque(seen)
        while q:
            u = q.popleft()
            for i in range(self.degree):
                s = self.step(u, i)[1]
                if s not in seen:
                    seen.add(s)
                    if len(seen) > budget:
                        raise ClosureBudgetExceeded("closure exceeds budget")
                    q.append(s)
        return seen

    def to_json(self):
        return {"degree": self.degree,
                "states": [{"name": n, "perm": list(self.perms[i + 1]),
                            "sections": [self.word_name(s) if s else "e" for s in self.secs[i + 1]]}
                           for i, n in enumerate(self.names)]}

    @classmethod
    def from_json(cls, obj) -> WreathAutomaton:
        return cls(obj["degree"], [(s["name"], s["perm"], s["sections"]) for s in obj["states"]])

    def __eq__(self, other):
        return isinstance(other, WreathAutomaton) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(tuple(self.names))

    def __repr__(self):
        return f"WreathAutomaton(degree={self.degree}, states={self.names})"


@dataclass(frozen=True)
class Portrait:
    perm: tuple
    children: tuple = ()

    def node_count(self):
        return 1 + sum(c.node_count() for c in self.children)

    def is_trivial(self):
        return self.perm == tuple(range(len(self.perm))) and all(c.is_trivial() for c in self.children)

    def to_json(self):
        return {"perm": list(self.perm), "children": [c.to_json() for c in self.children]}


def portrait_of(step, perm, w, depth, degree):
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    p = perm(w)
    if depth == 0:
        return Portrait(p)
    return Portrait(p, tuple(portrait_of(step, perm, step(w, i)[1], depth - 1, degree)
                             for i in range(degree)))


class StateWord:
    """A product of states of a fixed automaton."""

    __slots__ = ("aut", "letters")

    def __init__(self, aut: WreathAutomaton, letters):
        self.aut = aut
        self.letters = free_reduce(letters)

    def __mul__(self, other):
        if other.aut is not self.aut:
            raise ValidationError("state words over different automata")
        return StateWord(self.aut, free_mul(self.letters, other.letters))

    def inv(self):
        return StateWord(self.aut, free_inv(self.letters))

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        return StateWord(self.aut, self.letters * n)

    def __eq__(self, other):
        return isinstance(other, StateWord) and self.aut is other.aut and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def is_identity(self):
        return isinstance(self.aut.is_trivial(self.letters), Trivial)

    def __str__(self):
        return self.aut.word_name(self.letters)

    def __repr__(self):
        return f"StateWord({self})"


def make_bn(n: int, perms=None) -> WreathAutomaton:
    """B_3, B_4, or the general B_n recursion on the binary tree.

    For n > 4 the states are a, b, c, q1..q{n-4}, d; ``perms`` gives the
    permutations of q1..q{n-4} (a list of n-4 entries, or n-5 entries with
    the last one defaulting to the swap).  Each entry is a permutation tuple
    or a bool (True = swap).
    """
    if n < 3:
        raise BadArity("B_n needs n >= 3")
    if n == 3:
        if perms:
            raise BadArity("B_3 takes no permutations")
        return WreathAutomaton(2, [("a", ID2, ["c", "b"]), ("b", ID2, ["b", "c"]),
                                   ("c", SWAP, ["a", "a"])])
    if n == 4:
        if perms:
            raise BadArity("B_4 takes no permutations")
        return WreathAutomaton(2, [("a", ID2, ["c", "b"]), ("b", ID2, ["b", "c"]),
                                   ("c", SWAP, ["d", "d"]), ("d", SWAP, ["a", "a"])])
    nq = n - 4
    if perms is None:
        perms = [SWAP] * nq
    perms = [(SWAP if p else ID2) if isinstance(p, bool) else tuple(p) for p in perms]
    if len(perms) == nq - 1:
        perms = perms + [SWAP]
    if len(perms) != nq:
        raise BadArity(f"B_{n} needs {nq} permutations (or {nq - 1})")
    qs = [f"q{i}" for i in range(1, nq + 1)]
    states = [("a", ID2, ["c", "b"]), ("b", ID2, ["b", "c"]), ("c", SWAP, [qs[0], qs[0]])]
    for i, q in enumerate(qs):
        nxt = qs[i + 1] if i + 1 < nq else "d"
        states.append((q, perms[i], [nxt, nxt]))
    states.append(("d", SWAP, ["a", "a"]))
    return WreathAutomaton(2, states)


def chain_states(aut: WreathAutomaton):
    """a, b, c, q1, ..., d in chain order."""
    return list(aut.names)


def derived_free_generators(n: int, aut: WreathAutomaton = None):
    """x_i = s_{i-1} s_i along the chain a, b, c, q1, ..., d (n - 1 words)."""
    if n < 3:
        raise BadArity("derived generators need n >= 3")
    if n == 3:
        warnings.warn("n = 3: freeness relies on the odd-n, all-swap case only", stacklevel=2)
    aut = aut or make_bn(n)
    if len(aut.names) != n:
        raise BadArity("automaton does not have n states")
    chain = chain_states(aut)
    return [aut.word([(chain[i - 1], 1), (chain[i], 1)]) for i in range(1, n)]


def level_orbits(aut: WreathAutomaton, gens, level: int = 1):
    """Orbits of the group generated by ``gens`` on the vertices of a level."""
    from itertools import product

    verts = list(product(range(aut.degree), repeat=level))
    words = [aut.encode(g) for g in gens]
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for v in verts:
        for w in words:
            a, b = find(v), find(aut.act(w, v))
            if a != b:
                parent[max(a, b)] = min(a, b)
    orbits = {}
    for v in verts:
        orbits.setdefault(find(v), []).append(v)
    return sorted(orbits.values())


def odometer() -> WreathAutomaton:
    """a = (e, a) sigma."""
    return WreathAutomaton(2, [("a", SWAP, ["e", "a"])])


def parse_vertex(s: str, degree: int):
    out = []
    for k, ch in enumerate(s.strip()):
        if not ch.isdigit() or int(ch) >= degree:
            raise BadLetter(f"letter {ch!r} at position {k + 1} is not in 0..{degree - 1}")
        out.append(int(ch))
    return tuple(out)


def vertex_str(v) -> str:
    return "".join(str(i) for i in v)
