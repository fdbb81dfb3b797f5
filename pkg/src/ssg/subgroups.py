"""Finite-index subgroup descriptors.

Every descriptor offers exact membership, a left transversal ``rep(i)``
(``rep(0)`` is the identity), ``locate(g)`` returning the index of the left
coset g H, a list of named generators and a list of relation words over
those generators.  Relation words use 1-based signed letters.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FamilyMismatch, PrecondViolated, ValidationError
from .families import AbelianHnn, FreeGroup, HnnHeis, SemidirectHeis, _Semidirect
from .freegroup import CosetTable, free_inv, free_reduce, subgroup_build
from .heisenberg import HeisElem, lattice_canonicalize
from . import linalg
from .linalg import IntLattice


def _comm_word(i, j):
    """[g_i, g_j] = g_i^-1 g_j^-1 g_i g_j."""
    return (-i, -j, i, j)


def _pow_word(i, e):
    return (i,) * e if e >= 0 else (-i,) * (-e)


class Subgroup:
    family = None

    def _check(self, g):
        if g.family is not self.family:
            raise FamilyMismatch("element and subgroup belong to different families")

    def contains(self, g) -> bool:
        raise NotImplementedError

    def __contains__(self, g):
        return self.contains(g)

    @property
    def index(self) -> int:
        raise NotImplementedError

    def rep(self, i):
        raise NotImplementedError

    def locate(self, g) -> int:
        raise NotImplementedError

    def transversal(self):
        return [self.rep(i) for i in range(self.index)]

    def generators(self):
        """List of (name, element)."""
        raise NotImplementedError

    def relations(self):
        return []

    def gen_value(self, word):
        gens = [g for _, g in self.generators()]
        return self.family.word_value(word, gens)


class FreeSubgroup(Subgroup):
    """Finite-index subgroup of a free group.

    The default left transversal is the inverses of the shortlex right reps;
    ``left_reps`` (free words) may override it.
    """

    def __init__(self, family: FreeGroup, table: CosetTable, left_reps=None):
        table.index
        self.family = family
        self.table = table
        if left_reps is None:
            self._left = [free_inv(r) for r in table.reps]
        else:
            self._left = [free_reduce(r) for r in left_reps]
        # state reached by a left rep's inverse -> position in the transversal
        self._pos = {table.trace(free_inv(r)): i for i, r in enumerate(self._left)}
        if len(self._pos) != table.index or not self._left or self._left[0]:
            raise ValidationError("left_reps is not a left transversal starting with the identity")

    @classmethod
    def from_words(cls, family, words):
        return cls(family, subgroup_build(words, family.rank))

    @property
    def index(self):
        return self.table.index

    def contains(self, g):
        self._check(g)
        return self.table.contains(g.nf)

    def rep(self, i):
        return self.family.elem(self._left[i])

    def locate(self, g):
        self._check(g)
        return self._pos[self.table.trace(free_inv(g.nf))]

    def express(self, g):
        return self.table.rewrite(g.nf)

    def right_transversal(self):
        return [self.family.elem(w) for w in self.table.reps]

    def generators(self):
        return [(f"s{i + 1}", self.family.elem(w))
                for i, w in enumerate(self.table.schreier_generators())]

    def rewrite(self, g):
        return self.table.rewrite(g.nf)

    def to_json(self):
        return {"kind": "free", "table": self.table.to_json()}


def _kernel_express(kernel, n):
    """Word over the kernel generators (1-based) with value n."""
    if isinstance(kernel, IntLattice):
        return tuple(s for i, c in enumerate(kernel.coordinates(n)) for s in _pow_word(i + 1, c))
    h = n
    L = kernel
    u = Fraction(h.a, L.e1)
    h = HeisElem(L.e1, L.f12, L.f13) ** (-int(u)) * h
    v = Fraction(h.b, L.e2)
    h = HeisElem(0, L.e2, L.f23) ** (-int(v)) * h
    w = Fraction(h.c, L.e3)
    if not (u.denominator == v.denominator == w.denominator == 1):
        raise ValidationError("element is not in the lattice")
    return _pow_word(1, int(u)) + _pow_word(2, int(v)) + _pow_word(3, int(w))


class SemidirectSubgroup(Subgroup):
    """N' x| F' with N' a theta(F')-invariant finite-index kernel lattice."""

    def __init__(self, family: _Semidirect, kernel, table: CosetTable = None):
        self.family = family
        self.kernel = kernel
        self.table = table if table is not None else CosetTable.trivial(family.free.rank)
        self.table.index
        self._reps = None
        for w in self.table.schreier_generators():
            if self._kernel_image(w) != kernel:
                raise ValidationError("kernel lattice is not invariant under the free part")

    def _kernel_image(self, word):
        return self.kernel.image(self.family.theta(word))

    @property
    def heis(self):
        return isinstance(self.family, SemidirectHeis)

    @property
    def kernel_index(self):
        return self.kernel.index

    @property
    def free_index(self):
        return self.table.index

    @property
    def index(self):
        return self.kernel.index * self.table.index

    def contains(self, g):
        self._check(g)
        n, w = g.nf
        return self.table.contains(w) and self.kernel.contains(n)

    def rep(self, i):
        # left reps w_j n_a with w_j a left F-rep and n_a a kernel coset rep
        j, a = divmod(i, self.kernel.index)
        wj = self.family.elem(self.family.k_id(), free_inv(self.table.reps[j]))
        return wj * self.family.elem(self.kernel.rep(a))

    def locate(self, g):
        # g = n w = w_j theta_{w_j^-1}(n) f with f in F'
        self._check(g)
        n, w = g.nf
        j = self.table.trace(free_inv(w))
        n1 = self.family.act(self.table.reps[j], n)
        return j * self.kernel.index + self.kernel.coset_index(n1)

    def express(self, g):
        n, w = g.nf
        shift = 3 if self.heis else self.kernel.rank
        tail = tuple(s + shift if s > 0 else s - shift for s in self.table.rewrite(w))
        return _kernel_express(self.kernel, n) + tail

    def generators(self):
        out = []
        names = ("n1", "n2", "n3") if self.heis else tuple(f"n{i + 1}" for i in range(self.kernel.rank))
        for name, k in zip(names, self.kernel.generators if self.heis else self.kernel.basis):
            out.append((name, self.family.elem(k)))
        for i, w in enumerate(self.table.schreier_generators()):
            out.append((f"s{i + 1}", self.family.elem(self.family.k_id(), w)))
        return out

    def relations(self):
        nk = 3 if self.heis else self.kernel.rank
        rels = []
        if self.heis:
            L = self.kernel
            q = L.e1 * L.e2 // L.e3
            rels.append(_comm_word(1, 2) + _pow_word(3, -q))
            rels.append(_comm_word(1, 3))
            rels.append(_comm_word(2, 3))
            kg = L.generators
        else:
            for i in range(nk):
                for j in range(i + 1, nk):
                    rels.append(_comm_word(i + 1, j + 1))
            kg = self.kernel.basis
        for si, w in enumerate(self.table.schreier_generators()):
            s = nk + si + 1
            for b, n in enumerate(kg):
                img = self.family.act(w, n)
                rels.append((s, b + 1, -s) + free_inv(_kernel_express(self.kernel, img)))
        return rels

    def to_json(self):
        return {"kind": "semidirect", "kernel": self.kernel.to_json(),
                "heis": self.heis, "table": self.table.to_json()}


def _mod_p2(v, p):
    """Image of a p-integral rational in Z/p^2."""
    v = Fraction(v)
    q = p * p
    if v.denominator % p == 0:
        raise PrecondViolated("coordinate is not p-integral")
    return v.numerator * pow(v.denominator, -1, q) % q


def in_n1_completion(h: HeisElem, p: int) -> bool:
    """Closed-form test for h in M1 (requires p not dividing det and phi(N1) in N1)."""
    a, b, c = (_mod_p2(v, p) for v in h.coords())
    return a % p == 0 and b % p == 0 and c == 0


def hnn_m1_membership(fam: HnnHeis, g, p: int) -> bool:
    """Is phi^i(g) in N1 = <x^p, y^p> for some i >= 0?

    The trajectory is followed on N / N2 (coordinates mod p^2), which phi
    preserves; the state space is finite, so a repeat ends the search.
    """
    if not isinstance(fam, HnnHeis) or g.family is not fam:
        raise FamilyMismatch("expected an element of the HNN family")
    h, k = g.nf
    if k != 0:
        raise PrecondViolated("element does not lie in the base completion (k != 0)")
    if fam.phi.det % p == 0:
        raise PrecondViolated("p divides det(A)")
    h = fam.phi_pow(h, fam.clear_steps(h))
    q = p * p
    state = tuple(v % q for v in h.coords())
    seen = set()
    while state not in seen:
        a, b, c = state
        if a % p == 0 and b % p == 0 and c == 0:
            return True
        seen.add(state)
        img = fam.phi.apply(HeisElem(*state))
        state = tuple(v % q for v in img.coords())
    return False


class HnnSubgroup(Subgroup):
    """M1 x| <t>: the subgroup generated by x^p, y^p and t, of index p^4.

    Valid when phi maps N1 = <x^p, y^p> into itself and p does not divide
    det(A).
    """

    def __init__(self, family: HnnHeis, p: int):
        self.family = family
        self.p = p
        if family.phi.det % p == 0:
            raise PrecondViolated("p divides det(A)")
        self.lattice = lattice_canonicalize([HeisElem(p, 0, 0), HeisElem(0, p, 0)])
        for g in self.lattice.generators:
            if family.phi.apply(g) not in self.lattice:
                raise PrecondViolated("phi does not map N1 into itself")

    @property
    def index(self):
        return self.p ** 4

    def contains(self, g):
        self._check(g)
        return hnn_m1_membership(self.family, self.family.elem(g.h, 0), self.p)

    def fast_contains(self, g):
        return in_n1_completion(g.h, self.p)

    def rep(self, i):
        return self.family.elem(self.lattice.rep(i), 0)

    def locate(self, g):
        # h t^k G1 = h G1, and h ~ its p^2-reduction modulo M1
        self._check(g)
        red = HeisElem(*(_mod_p2(v, self.p) for v in g.h.coords()))
        return self.lattice.coset_index(red)

    def express(self, g):
        h, k = g.nf
        j = 0
        while not (h.is_integral() and h in self.lattice):
            h = self.family.phi.apply(h)
            j += 1
            if j > 10000:
                raise ValidationError("element is not in the subgroup")
        return _pow_word(3, -j) + _express_n1(h, self.p) + _pow_word(3, j + k)

    def generators(self):
        p = self.p
        fam = self.family
        return [("X", fam.elem(HeisElem(p, 0, 0))), ("Y", fam.elem(HeisElem(0, p, 0))),
                ("T", fam.elem(HeisElem(), 1))]

    def relations(self):
        zw = _comm_word(1, 2)
        rels = [free_inv(zw) + (-1,) + zw + (1,), free_inv(zw) + (-2,) + zw + (2,)]
        p = self.p
        for b, gen in ((1, HeisElem(p, 0, 0)), (2, HeisElem(0, p, 0))):
            img = self.family.phi.apply(gen)
            e = _express_n1(img, p)
            rels.append((3, b, -3) + free_inv(e))
        return rels

    def to_json(self):
        return {"kind": "hnn-heis", "p": self.p}


def _express_n1(h: HeisElem, p: int):
    """Word in X = x^p, Y = y^p with value h in N1."""
    u, v = h.a // p, h.b // p
    if h.a != u * p or h.b != v * p:
        raise ValidationError("element is not in N1")
    rest = (HeisElem(p * u, 0, 0) * HeisElem(0, p * v, 0)).inv() * h
    w, r = divmod(rest.c, p * p)
    if r or rest.a or rest.b:
        raise ValidationError("element is not in N1")
    zw = _comm_word(1, 2)
    return _pow_word(1, u) + _pow_word(2, v) + (zw * w if w >= 0 else free_inv(zw) * (-w))


class AbelianHnnSubgroup(Subgroup):
    """(q B) x| <t> inside the ascending HNN extension of Z^n, index q^n."""

    def __init__(self, family: AbelianHnn, q: int):
        if family.det % q == 0:
            raise PrecondViolated("q divides det(M)")
        self.family = family
        self.q = q
        self.lattice = IntLattice.scaled(family.n, q)

    @property
    def index(self):
        return self.q ** self.family.n

    def _red(self, v):
        return tuple(_mod_q(x, self.q) for x in v)

    def contains(self, g):
        self._check(g)
        return not any(self._red(g.v))

    def rep(self, i):
        return self.family.elem(self.lattice.rep(i), 0)

    def locate(self, g):
        self._check(g)
        return self.lattice.coset_index(self._red(g.v))

    def express(self, g):
        v, k = g.v, g.k
        fam = self.family
        j = fam.clear_steps(v)
        w = linalg.mat_vec(fam.mpow(j), v)
        if any(x % self.q for x in w):
            raise ValidationError("element is not in the subgroup")
        body = tuple(s for i, x in enumerate(w) for s in _pow_word(i + 1, x // self.q))
        T = fam.n + 1
        return _pow_word(T, -j) + body + _pow_word(T, j + k)

    def generators(self):
        fam = self.family
        out = []
        for i in range(fam.n):
            v = [0] * fam.n
            v[i] = self.q
            out.append((f"B{i + 1}", fam.elem(v)))
        out.append(("T", fam.elem((0,) * fam.n, 1)))
        return out

    def relations(self):
        n = self.family.n
        rels = [_comm_word(i + 1, j + 1) for i in range(n) for j in range(i + 1, n)]
        T = n + 1
        for i in range(n):
            col = [self.family.M[r][i] for r in range(n)]
            w = tuple(s for r, c in enumerate(col) for s in _pow_word(r + 1, c))
            rels.append((T, i + 1, -T) + free_inv(w))
        return rels

    def to_json(self):
        return {"kind": "hnn-zn", "q": self.q}


def _mod_q(v, q):
    v = Fraction(v)
    if v.denominator % q == 0:
        raise PrecondViolated("coordinate is not q-integral")
    return v.numerator * pow(v.denominator, -1, q) % q


def subgroup_contains(S: Subgroup, g) -> bool:
    return S.contains(g)


def transversal_and_schreier(S: Subgroup):
    """Transversal and generators.  Free subgroups use shortlex right reps."""
    if isinstance(S, FreeSubgroup):
        return S.right_transversal(), [g for _, g in S.generators()]
    return S.transversal(), [g for _, g in S.generators()]


__all__ = [
    "Subgroup", "FreeSubgroup", "SemidirectSubgroup", "HnnSubgroup", "AbelianHnnSubgroup",
    "hnn_m1_membership", "in_n1_completion", "subgroup_contains", "transversal_and_schreier",
]
