"""Virtual endomorphisms f: H -> G and their compilation to tree actions.

Compilation uses left cosets.  For endo i with left transversal
t_0 = 1, t_1, ... of H_i, the letter (i, j) is the coset t_j H_i and

    g . (i, j) = (i, j'),   t_{j'} H_i = g t_j H_i,
    section    = f_i(t_{j'}^-1 g t_j).

With this rule (gh) has root permutation sigma_g o sigma_h and sections
(gh)_x = g_{sigma_h(x)} h_x, matching the automata module.
"""

from __future__ import annotations

import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .automata import (EXACT, BoundedDepth, NontrivialAtDepth, Portrait, Trivial,
                       UndeterminedAtDepth, WreathAutomaton)
from .errors import (ClosureBudgetExceeded, FamilyMismatch, NotInDomain, NotTransitive,
                     RewritingBudgetExceeded, ValidationError)
from .families import FreeGroup, _Semidirect
from .freegroup import CosetTable, free_inv, free_mul, free_reduce, reduced_words, subgroup_build
from .heisenberg import lattice_canonicalize, X, Y
from .linalg import IntLattice
from .subgroups import FreeSubgroup, SemidirectSubgroup, Subgroup


class VirtualEndo:
    """f: H -> G given by images of the generators of the domain descriptor.

    ``apply`` may supply a closed form; by default f(h) is evaluated by
    expressing h in the domain generators.
    """

    def __init__(self, codomain, domain: Subgroup, images, apply=None, name="f",
                 extra_relations=(), meta=None):
        if domain.family is not codomain:
            raise FamilyMismatch("domain must be a subgroup of the codomain")
        self.codomain = codomain
        self.domain = domain
        names = [n for n, _ in domain.generators()]
        if isinstance(images, dict):
            missing = [n for n in names if n not in images]
            if missing:
                raise ValidationError(f"missing images for {missing}")
            images = [images[n] for n in names]
        images = list(images)
        if len(images) != len(names):
            raise ValidationError("one image per domain generator is required")
        for g in images:
            if g.family is not codomain:
                raise FamilyMismatch("image outside the codomain")
        self.images = images
        self._apply = apply
        self.name = name
        self.extra_relations = list(extra_relations)
        self.meta = dict(meta or {})
        ix = domain.index
        if ix <= 1:
            raise ValidationError("virtual endomorphism needs 1 < [G:H]")

    @property
    def index(self):
        return self.domain.index

    def gen_names(self):
        return [n for n, _ in self.domain.generators()]

    def image_of_word(self, word):
        return self.codomain.word_value(word, self.images)

    def __call__(self, g):
        if not self.domain.contains(g):
            raise NotInDomain(f"{g} is not in the domain of {self.name}")
        return self.raw(g)

    def raw(self, g):
        """f(g) without the membership check."""
        if self._apply is not None:
            return self._apply(g)
        return self.image_of_word(self.domain.express(g))

    def relations(self):
        return list(self.domain.relations()) + self.extra_relations

    def with_images(self, images) -> VirtualEndo:
        """Same domain with replaced images and no closed-form evaluator."""
        return VirtualEndo(self.codomain, self.domain, images, None, self.name)

    def to_json(self):
        return {"name": self.name, "domain": self.domain.to_json(), "index": self.index,
                "images": {n: str(g) for n, g in zip(self.gen_names(), self.images)},
                "meta": _jsonable(self.meta)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)


@dataclass
class RelationCheck:
    label: str
    passed: bool
    detail: str = ""

    def to_json(self):
        return {"check": self.label, "passed": self.passed, "detail": self.detail}


@dataclass
class WellDefinedReport:
    endo: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {"endo": self.endo, "passed": self.passed,
                "checks": [c.to_json() for c in self.checks]}


def _word_label(names, w):
    from .families import _join, _word_expr

    return _join(_word_expr(names, w))


def verify_well_defined(f: VirtualEndo, relations=None) -> WellDefinedReport:
    """Check that the generator images satisfy every relation of the domain.

    Relations are words over the domain generators (1-based signed letters).
    Also checks that the generators lie in the domain, that every relation
    holds in G itself, and that a closed-form evaluator (if any) agrees with
    the images.
    """
    names = f.gen_names()
    gens = [g for _, g in f.domain.generators()]
    rep = WellDefinedReport(f.name)
    for n, g in zip(names, gens):
        if not f.domain.contains(g):
            raise NotInDomain(f"generator {n} = {g} is not in the domain")
    rels = f.relations() if relations is None else list(relations)
    for r in rels:
        label = _word_label(names, r)
        val = f.codomain.word_value(r, gens)
        if not val.is_identity():
            raise NotInDomain(f"{label} is not a relation of the domain (value {val})")
        img = f.image_of_word(r)
        rep.checks.append(RelationCheck(f"relation {label}", img.is_identity(),
                                        "" if img.is_identity() else f"image is {img}"))
    if f._apply is not None:
        for n, g, im in zip(names, gens, f.images):
            got = f._apply(g)
            rep.checks.append(RelationCheck(f"evaluator on {n}", got == im,
                                            "" if got == im else f"{got} != {im}"))
    return rep


class EndoSystem:
    """Several virtual endomorphisms of one group; one level-1 orbit each."""

    def __init__(self, endos, meta=None):
        endos = list(endos)
        if not endos:
            raise ValidationError("empty endomorphism system")
        G = endos[0].codomain
        for f in endos:
            if f.codomain is not G:
                raise FamilyMismatch("endomorphisms must share the codomain")
        self.endos = endos
        self.group = G
        self.meta = dict(meta or {})
        self.reports = None

    @property
    def orbit_sizes(self):
        return [f.index for f in self.endos]

    @property
    def degree(self):
        return sum(self.orbit_sizes)

    @property
    def k(self):
        return len(self.endos)

    def verify(self):
        self.reports = [verify_well_defined(f) for f in self.endos]
        return self.reports

    @property
    def verified(self):
        return self.reports is not None and all(r.passed for r in self.reports)

    def to_json(self):
        out = {"schema": "ssg/1", "kind": "endo-system", "group": self.group.to_json(),
               "degree": self.degree, "orbit_sizes": self.orbit_sizes,
               "endos": [f.to_json() for f in self.endos], "meta": _jsonable(self.meta)}
        if self.reports is not None:
            out["reports"] = [r.to_json() for r in self.reports]
        return out


def compose_projection(f0: VirtualEndo, ambient: _Semidirect, name="beta") -> VirtualEndo:
    """beta(n w) = f0(w): kills the kernel, domain N x| dom(f0)."""
    if not isinstance(ambient, _Semidirect):
        raise FamilyMismatch("ambient must be a semidirect family")
    if not isinstance(f0.codomain, FreeGroup) or f0.codomain.rank != ambient.free.rank:
        raise FamilyMismatch("f0 must be a virtual endomorphism of the free quotient")
    if not isinstance(f0.domain, FreeSubgroup):
        raise FamilyMismatch("f0 must have a free-subgroup domain")
    if isinstance(ambient.k_id(), tuple):
        kernel = IntLattice.full(ambient.n)
    else:
        kernel = lattice_canonicalize([X, Y])
    dom = SemidirectSubgroup(ambient, kernel, f0.domain.table)
    nk = len(dom.generators()) - len(f0.images)

    def lift(fe):
        return ambient.elem(ambient.k_id(), fe.nf)

    images = [ambient.identity()] * nk + [lift(g) for g in f0.images]
    fdom = f0.domain

    def apply(g):
        return lift(f0.raw(fdom.family.elem(g.nf[1])))

    return VirtualEndo(ambient, dom, images, apply, name, meta={"f0": f0.name})


# -- free virtual endomorphisms from automata ------------------------------

def _is_involution(aut, s):
    return isinstance(aut.is_trivial((s, s)), Trivial)


def _pairing_rewriter(aut, gen_words):
    """Rewriter for generators of the form s t with s, t involutive states."""
    edges = {}
    for k, w in enumerate(gen_words):
        if len(w) != 2 or w[0] <= 0 or w[1] <= 0 or w[0] == w[1]:
            return None
        edges.setdefault(w[0], []).append((w[1], k + 1))
        edges.setdefault(w[1], []).append((w[0], -(k + 1)))
    states = set(edges)
    if not all(_is_involution(aut, s) for s in states):
        return None

    def path(u, v):
        prev = {u: None}
        q = [u]
        while q:
            x = q.pop(0)
            if x == v:
                break
            for y, lab in edges.get(x, []):
                if y not in prev:
                    prev[y] = (x, lab)
                    q.append(y)
        if v not in prev:
            return None
        out = []
        while prev[v] is not None:
            v, lab = prev[v]
            out.append(lab)
        return tuple(reversed(out))

    def rewrite(w):
        red = []
        for s in w:
            s = abs(s)
            if s not in states:
                return None
            if red and red[-1] == s:
                red.pop()
            else:
                red.append(s)
        if len(red) % 2:
            return None
        out = []
        for i in range(0, len(red), 2):
            p = path(red[i], red[i + 1])
            if p is None:
                return None
            out.extend(p)
        return free_reduce(out)

    return rewrite


def rewrite_state_word(aut, gen_words, target, budget=10 ** 4):
    """A free word over ``gen_words`` with the same action as ``target``."""
    pr = _pairing_rewriter(aut, gen_words)

    def value(w):
        return free_mul(*[gen_words[s - 1] if s > 0 else free_inv(gen_words[-s - 1]) for s in w])

    def same(w):
        return isinstance(aut.is_trivial(free_mul(free_inv(target), value(w))), Trivial)

    if pr is not None:
        w = pr(target)
        if w is not None and same(w):
            return w
    if same(()):
        return ()
    count = 0
    L = 1
    while True:
        for w in reduced_words(len(gen_words), L, L):
            count += 1
            if count > budget:
                raise RewritingBudgetExceeded(f"no rewriting of {aut.word_name(target)} "
                                              f"within {budget} candidates")
            if same(w):
                return w
        L += 1


def free_ve_from_automaton(aut: WreathAutomaton, gens, names=None, name="f0") -> VirtualEndo:
    """Section-at-0 virtual endomorphism on the stabilizer of vertex 0."""
    gen_words = [aut.encode(g) for g in gens]
    F = FreeGroup(len(gen_words), names)
    inv_perms = {}
    for k, w in enumerate(gen_words, start=1):
        p = aut.root_perm(w)
        inv_perms[k] = tuple(sorted(range(aut.degree), key=lambda i: p[i]))
        inv_perms[-k] = p
    table = CosetTable.from_action(F.rank, lambda v, s: inv_perms[s][v], 0)
    if len(table.orbit) != aut.degree:
        raise NotTransitive(f"level-1 orbit of vertex 0 has size {len(table.orbit)} < {aut.degree}")
    dom = FreeSubgroup(F, table)
    images = []
    checks = {}
    for (_, s), sw in zip(dom.generators(), table.schreier_generators()):
        val = free_mul(*[gen_words[x - 1] if x > 0 else free_inv(gen_words[-x - 1]) for x in sw])
        sec = aut.section(val, (0,))
        w = rewrite_state_word(aut, gen_words, sec)
        images.append(F.elem(w))
        checks[str(s)] = True
    return VirtualEndo(F, dom, images, name=name,
                       meta={"automaton_states": aut.names, "sections_certified": checks})


def odometer_endo() -> VirtualEndo:
    """f: 2Z -> Z, f(a^2) = a, with left transversal {1, a}."""
    F = FreeGroup(1, ["a"])
    dom = FreeSubgroup(F, subgroup_build([(1, 1)], 1), left_reps=[(), (1,)])
    return VirtualEndo(F, dom, [F.elem((1,))], name="odometer")


def default_free_endo(rank: int) -> VirtualEndo:
    """Odometer for rank 1; derived generators of B_{rank+1} for rank >= 2."""
    from .automata import derived_free_generators, make_bn
    import warnings

    if rank == 1:
        return odometer_endo()
    if rank < 1:
        raise ValidationError("rank must be positive")
    aut = make_bn(rank + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        gens = derived_free_generators(rank + 1, aut)
    names = [f"t{i}" for i in range(1, rank + 1)]
    f = free_ve_from_automaton(aut, gens, names, name=f"f0[B{rank + 1}]")
    return f


# -- compilation -----------------------------------------------------------

class CompiledAutomaton:
    """Lazily compiled tree action of an EndoSystem (sections are group elements)."""

    def __init__(self, system: EndoSystem):
        self.system = system
        self.group = system.group
        self.offsets = []
        off = 0
        for f in system.endos:
            self.offsets.append(off)
            off += f.index
        self.degree = off
        self._letter = [(i, j) for i, f in enumerate(system.endos) for j in range(f.index)]
        self._reps = {}
        self._step = {}
        self._triv = {}
        self._lock = threading.Lock()

    def rep(self, i, j):
        key = (i, j)
        r = self._reps.get(key)
        if r is None:
            r = self.system.endos[i].domain.rep(j)
            self._reps[key] = r
        return r

    def step(self, g, x: int):
        """(g(x), section of g at x) for a level-1 letter x."""
        key = (g.nf, x)
        hit = self._step.get(key)
        if hit is not None:
            return hit
        i, j = self._letter[x]
        f = self.system.endos[i]
        gt = g * self.rep(i, j)
        j2 = f.domain.locate(gt)
        sec = f.raw(self.rep(i, j2).inv() * gt)
        out = (self.offsets[i] + j2, sec)
        self._step[key] = out
        return out

    def root_perm(self, g):
        return tuple(self.step(g, x)[0] for x in range(self.degree))

    def act(self, g, v):
        out = []
        for x in v:
            if not 0 <= x < self.degree:
                from .errors import BadLetter
                raise BadLetter(f"letter {x} is not in 0..{self.degree - 1}")
            y, g = self.step(g, x)
            out.append(y)
        return tuple(out)

    def section(self, g, v):
        for x in v:
            g = self.step(g, x)[1]
        return g

    def trivial_to_depth(self, g, depth: int) -> bool:
        """Does g fix every vertex of level <= depth?"""
        if depth <= 0 or g.is_identity():
            return True
        key = (g.nf, depth)
        hit = self._triv.get(key)
        if hit is not None:
            return hit
        out = True
        for x in range(self.degree):
            y, s = self.step(g, x)
            if y != x or (depth > 1 and not self.trivial_to_depth(s, depth - 1)):
                out = False
                break
        self._triv[key] = out
        return out

    def first_moved_depth(self, g, depth):
        for d in range(1, depth + 1):
            if not self.trivial_to_depth(g, d):
                return d
        return None

    def is_trivial(self, g, mode=BoundedDepth(4)):
        if mode == EXACT or not isinstance(mode, BoundedDepth):
            raise ValidationError("compiled automata support BoundedDepth mode only")
        d = self.first_moved_depth(g, mode.depth)
        if d is not None:
            return NontrivialAtDepth(d)
        if g.is_identity():
            return Trivial()
        return UndeterminedAtDepth(mode.depth)

    def portrait(self, g, depth):
        if depth < 0:
            raise ValidationError("depth must be >= 0")
        p = self.root_perm(g)
        if depth == 0:
            return Portrait(p)
        return Portrait(p, tuple(self.portrait(self.step(g, x)[1], depth - 1)
                                 for x in range(self.degree)))

    def level_orbits(self, gens, level=1):
        """Orbit sizes of <gens> on level-1 letters (level 1 only)."""
        if level != 1:
            raise ValidationError("only level 1 is supported")
        parent = list(range(self.degree))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for g in gens:
            for x in range(self.degree):
                a, b = find(x), find(self.step(g, x)[0])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        orbits = {}
        for x in range(self.degree):
            orbits.setdefault(find(x), []).append(x)
        return sorted(orbits.values())

    def orbit_size(self, g, level):
        """Size of the <g>-orbit of the vertex 0...0 at a level."""
        v0 = (0,) * level
        v = self.act(g, v0)
        n = 1
        while v != v0:
            v = self.act(g, v)
            n += 1
        return n

    def export(self, gens, max_states=200, depth=None):
        """Finite-state export: BFS over sections from ``gens``."""
        names = {}
        order = []
        layer = [(g, 0) for g in gens]
        for g in gens:
            names.setdefault(g.nf, f"s{len(names)}")
            order.append(g) if len(order) < len(names) else None
        q = list(layer)
        while q:
            g, d = q.pop(0)
            if depth is not None and d >= depth:
                continue
            for x in range(self.degree):
                s = self.step(g, x)[1]
                if s.nf not in names:
                    if len(names) >= max_states:
                        raise ClosureBudgetExceeded(
                            f"compiled automaton has more than {max_states} states; pass a depth bound")
                    names[s.nf] = f"s{len(names)}"
                    order.append(s)
                    q.append((s, d + 1))
        states = []
        for g in order:
            perm = self.root_perm(g)
            secs = [str(self.step(g, x)[1]) for x in range(self.degree)]
            states.append({"name": names[g.nf], "element": str(g), "perm": list(perm),
                           "sections": secs})
        return {"schema": "ssg/1", "kind": "compiled-automaton", "degree": self.degree,
                "states": states, "truncated_at_depth": depth}


def compile_system(system: EndoSystem) -> CompiledAutomaton:
    return CompiledAutomaton(system)


# -- faithfulness probe ----------------------------------------------------

@dataclass(frozen=True)
class NoKernelWitness:
    word_len: int
    depth: int
    words_checked: int = 0

    def to_json(self):
        return {"verdict": "NoKernelWitness", "word_len": self.word_len, "depth": self.depth,
                "words_checked": self.words_checked}


@dataclass(frozen=True)
class KernelWitness:
    element: object
    word: tuple = ()

    def to_json(self):
        return {"verdict": "KernelWitness", "element": str(self.element)}


def faithfulness_probe(system_or_compiled, word_len: int, depth: int, gens=None,
                       threads: int = 1, progress=False):
    """Search reduced words up to ``word_len`` acting trivially to ``depth``.

    Words whose value is the identity of the group are skipped, as are
    repeated elements.
    """
    comp = system_or_compiled if isinstance(system_or_compiled, CompiledAutomaton) \
        else CompiledAutomaton(system_or_compiled)
    G = comp.group
    if gens is None:
        gens = list(G.generators().values())
    gens = list(gens)
    seen = set()
    cands = []
    for w in reduced_words(len(gens), word_len):
        g = G.word_value(w, gens)
        if g.is_identity() or g.nf in seen:
            continue
        seen.add(g.nf)
        cands.append((w, g))

    def check(item):
        return comp.trivial_to_depth(item[1], depth)

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(check, cands))
    else:
        results = []
        for k, item in enumerate(cands):
            r = check(item)
            results.append(r)
            if r:
                break
            if progress and k % 50 == 0:
                print(f"probe: {k}/{len(cands)} words", file=sys.stderr)
    for (w, g), r in zip(cands, results):
        if r:
            return KernelWitness(g, w)
    return NoKernelWitness(word_len, depth, len(cands))
