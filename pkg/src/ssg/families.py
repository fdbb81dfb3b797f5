"""Normal forms for the concrete group families.

* ``FreeGroup`` -- reduced words.
* ``SemidirectZn`` / ``SemidirectHeis`` -- pairs (n, w) meaning n*w with
  w acting on n by a homomorphism F -> Aut(N), so that
  (n1, w1)(n2, w2) = (n1 * w1.n2, w1 w2).
* ``HnnHeis`` / ``AbelianHnn`` -- ascending HNN extensions
  <N, t | t g t^-1 = phi(g)> in completion coordinates (h, k) meaning h t^k,
  h rational.  Then (h1, k1)(h2, k2) = (h1 phi^k1(h2), k1 + k2).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from . import linalg
from .errors import FamilyMismatch, NotApplicable, ValidationError
from .freegroup import free_inv, free_mul, free_pow, free_reduce
from .heisenberg import HeisElem, HeisEndo


class GroupElement:
    __slots__ = ("family", "nf")

    def __init__(self, family, nf):
        self.family = family
        self.nf = nf

    def __eq__(self, other):
        return isinstance(other, GroupElement) and other.family is self.family \
            and other.nf == self.nf

    def __hash__(self):
        return hash(self.nf)

    def __mul__(self, other):
        return element_mul(self, other)

    def inv(self):
        return self.family.inv(self)

    def __invert__(self):
        return self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = self.family.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_identity(self) -> bool:
        return self.family.is_identity(self)

    def __str__(self):
        return self.family.to_expr(self)

    def __repr__(self):
        return f"<{type(self).__name__} {self.family.to_expr(self)}>"


class FreeElem(GroupElement):
    __slots__ = ()

    @property
    def word(self):
        return self.nf


class SemidirectElem(GroupElement):
    __slots__ = ()

    @property
    def n(self):
        return self.nf[0]

    @property
    def w(self):
        return self.nf[1]


class HnnElem(GroupElement):
    __slots__ = ()

    @property
    def h(self) -> HeisElem:
        return self.nf[0]

    @property
    def k(self) -> int:
        return self.nf[1]


class AbelianHnnElem(GroupElement):
    __slots__ = ()

    @property
    def v(self):
        return self.nf[0]

    @property
    def k(self) -> int:
        return self.nf[1]


def element_mul(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.family is not h.family:
        raise FamilyMismatch(f"cannot multiply elements of {g.family} and {h.family}")
    return g.family.mul(g, h)


def element_is_identity(g: GroupElement) -> bool:
    return g.family.is_identity(g)


def _power_expr(name, e):
    return name if e == 1 else f"{name}^{e}"


def _word_expr(names, word):
    parts = []
    i = 0
    while i < len(word):
        s = word[i]
        j = i
        while j < len(word) and word[j] == s:
            j += 1
        e = (j - i) * (1 if s > 0 else -1)
        parts.append(_power_expr(names[abs(s) - 1], e))
        i = j
    return parts


def _join(parts):
    return "*".join(parts) if parts else "1"


class Family:
    kind = "abstract"
    elem_cls = GroupElement

    def gen_names(self):
        raise NotImplementedError

    def generators(self):
        raise NotImplementedError

    def word_value(self, word, gens=None):
        """Evaluate a word over ``gens`` (defaults to the family generators)."""
        gens = gens if gens is not None else list(self.generators().values())
        out = self.identity()
        for s in word:
            g = gens[abs(s) - 1]
            out = out * (g if s > 0 else g.inv())
        return out

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"

    def describe(self):
        return ""


class FreeGroup(Family):
    kind = "free"
    elem_cls = FreeElem

    def __init__(self, rank: int, names=None):
        self.rank = rank
        self.names = list(names) if names else [f"x{i}" for i in range(1, rank + 1)]
        if len(self.names) != rank:
            raise ValidationError("wrong number of generator names")

    def describe(self):
        return f"rank={self.rank}"

    def elem(self, word) -> FreeElem:
        return FreeElem(self, free_reduce(word))

    def identity(self):
        return FreeElem(self, ())

    def mul(self, g, h):
        return FreeElem(self, free_mul(g.nf, h.nf))

    def inv(self, g):
        return FreeElem(self, free_inv(g.nf))

    def is_identity(self, g):
        return not g.nf

    def gen_names(self):
        return list(self.names)

    def generators(self):
        return {n: FreeElem(self, (i + 1,)) for i, n in enumerate(self.names)}

    def to_expr(self, g):
        return _join(_word_expr(self.names, g.nf))

    def to_json(self):
        return {"family": "free", "rank": self.rank, "names": self.names}


class _Semidirect(Family):
    kind = "semidirect"
    elem_cls = SemidirectElem

    def __init__(self, free: FreeGroup):
        self.free = free

    # kernel operations supplied by subclasses
    def k_mul(self, a, b):
        raise NotImplementedError

    def k_inv(self, a):
        raise NotImplementedError

    def k_id(self):
        raise NotImplementedError

    def act_letter(self, s, n):
        raise NotImplementedError

    def act(self, word, n):
        """Apply theta_w to n, where theta_{uv} = theta_u o theta_v."""
        for s in reversed(word):
            n = self.act_letter(s, n)
        return n

    def elem(self, n, word=()):
        return SemidirectElem(self, (self._kernel_norm(n), free_reduce(word)))

    def _kernel_norm(self, n):
        return n

    def identity(self):
        return SemidirectElem(self, (self.k_id(), ()))

    def mul(self, g, h):
        (n1, w1), (n2, w2) = g.nf, h.nf
        return SemidirectElem(self, (self.k_mul(n1, self.act(w1, n2)), free_mul(w1, w2)))

    def inv(self, g):
        n, w = g.nf
        wi = free_inv(w)
        return SemidirectElem(self, (self.act(wi, self.k_inv(n)), wi))

    def is_identity(self, g):
        return g.nf[0] == self.k_id() and not g.nf[1]

    def project(self, g) -> FreeElem:
        return self.free.elem(g.nf[1])

    def lift(self, f: FreeElem):
        return SemidirectElem(self, (self.k_id(), f.nf))


class SemidirectZn(_Semidirect):
    """Z^n x| F with the i-th free generator acting by ``action[i]`` in GL_n(Z)."""

    def __init__(self, n: int, action, kernel_names=None, free_names=None):
        action = [linalg.mat(M) for M in action]
        free = FreeGroup(len(action), free_names or [f"t{i}" for i in range(1, len(action) + 1)])
        super().__init__(free)
        self.n = n
        self.action = action
        self.inverse = []
        for M in action:
            if len(M) != n or abs(linalg.det(M)) != 1:
                raise ValidationError("action matrices must lie in GL_n(Z)")
            self.inverse.append(linalg.mat_inv(M))
        self.kernel_names = list(kernel_names or [f"e{i}" for i in range(1, n + 1)])

    def describe(self):
        return f"n={self.n}, rank={self.free.rank}"

    def _kernel_norm(self, n):
        return tuple(int(v) for v in n)

    def k_mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def k_inv(self, a):
        return tuple(-x for x in a)

    def k_id(self):
        return (0,) * self.n

    def act_letter(self, s, v):
        M = self.action[s - 1] if s > 0 else self.inverse[-s - 1]
        return linalg.mat_vec(M, v)

    def theta(self, word):
        M = linalg.identity(self.n)
        for s in word:
            M = linalg.mat_mul(M, self.action[s - 1] if s > 0 else self.inverse[-s - 1])
        return M

    def gen_names(self):
        return self.kernel_names + self.free.names

    def generators(self):
        out = {}
        for i, name in enumerate(self.kernel_names):
            v = [0] * self.n
            v[i] = 1
            out[name] = self.elem(tuple(v))
        for i, name in enumerate(self.free.names):
            out[name] = SemidirectElem(self, (self.k_id(), (i + 1,)))
        return out

    def to_expr(self, g):
        v, w = g.nf
        parts = [_power_expr(self.kernel_names[i], e) for i, e in enumerate(v) if e]
        return _join(parts + _word_expr(self.free.names, w))

    def to_json(self):
        return {"family": "semidirect-zn", "n": self.n,
                "action": [[list(r) for r in M] for M in self.action],
                "kernel_names": self.kernel_names, "free_names": self.free.names}


class SemidirectHeis(_Semidirect):
    """Heisenberg x| F with free generators acting by Heisenberg automorphisms."""

    def __init__(self, action, free_names=None):
        action = list(action)
        free = FreeGroup(len(action), free_names or [f"t{i}" for i in range(1, len(action) + 1)])
        super().__init__(free)
        for phi in action:
            if abs(phi.det) != 1 or not phi.is_integral():
                raise ValidationError("action must be by automorphisms (det = +-1)")
        self.action = action
        self.inverse = [phi.inverse() for phi in action]
        self.kernel_names = ["x", "y", "z"]

    def describe(self):
        return f"rank={self.free.rank}"

    def k_mul(self, a, b):
        return a * b

    def k_inv(self, a):
        return a.inv()

    def k_id(self):
        return HeisElem()

    def act_letter(self, s, h):
        return (self.action[s - 1] if s > 0 else self.inverse[-s - 1]).apply(h)

    def theta(self, word) -> HeisEndo:
        out = HeisEndo.identity()
        for s in word:
            out = out.compose(self.action[s - 1] if s > 0 else self.inverse[-s - 1])
        return out

    def gen_names(self):
        return self.kernel_names + self.free.names

    def generators(self):
        out = {"x": self.elem(HeisElem(1, 0, 0)), "y": self.elem(HeisElem(0, 1, 0)),
               "z": self.elem(HeisElem(0, 0, 1))}
        for i, name in enumerate(self.free.names):
            out[name] = SemidirectElem(self, (self.k_id(), (i + 1,)))
        return out

    def to_expr(self, g):
        h, w = g.nf
        return _join(_heis_parts(h) + _word_expr(self.free.names, w))

    def to_json(self):
        return {"family": "semidirect-heis", "action": [phi.to_json() for phi in self.action],
                "free_names": self.free.names}


def _heis_parts(h: HeisElem):
    return [_power_expr(n, e) for n, e in zip("xyz", h.coords()) if e]


MAX_CLEAR_STEPS = 10000


class HnnHeis(Family):
    """Ascending HNN extension of the Heisenberg group by a non-surjective phi."""

    kind = "hnn-heis"
    elem_cls = HnnElem

    def __init__(self, phi: HeisEndo):
        if phi.det in (-1, 0, 1):
            raise NotApplicable("HNN family needs det(A) not in {-1, 0, 1}")
        if not phi.is_integral():
            raise ValidationError("phi must be integral")
        self.phi = phi
        self.pow_x = {}
        self._pow_cache = {}

    def describe(self):
        return f"A={self.phi.A}, c={self.phi.c}"

    def phi_pow(self, h: HeisElem, k: int) -> HeisElem:
        if k >= 0:
            for _ in range(k):
                h = self.phi.apply(h)
        else:
            for _ in range(-k):
                h = self.phi.apply_inverse(h)
        return h

    def elem(self, h, k=0):
        return HnnElem(self, (h, k))

    def identity(self):
        return HnnElem(self, (HeisElem(), 0))

    def mul(self, g, h):
        (h1, k1), (h2, k2) = g.nf, h.nf
        return HnnElem(self, (h1 * self.phi_pow(h2, k1), k1 + k2))

    def inv(self, g):
        h, k = g.nf
        return HnnElem(self, (self.phi_pow(h.inv(), -k), -k))

    def is_identity(self, g):
        return g.nf[0].is_identity() and g.nf[1] == 0

    def clear_steps(self, h: HeisElem) -> int:
        """Least j >= 0 with phi^j(h) integral."""
        for j in range(MAX_CLEAR_STEPS):
            if h.is_integral():
                return j
            h = self.phi.apply(h)
        raise ValidationError("element does not lie in the HNN extension")

    def in_base_closure(self, h: HeisElem) -> bool:
        try:
            self.clear_steps(h)
            return True
        except ValidationError:
            return False

    def gen_names(self):
        return ["x", "y", "z", "t"]

    def generators(self):
        return {"x": self.elem(HeisElem(1, 0, 0)), "y": self.elem(HeisElem(0, 1, 0)),
                "z": self.elem(HeisElem(0, 0, 1)), "t": self.elem(HeisElem(), 1)}

    def to_expr(self, g):
        h, k = g.nf
        j = self.clear_steps(h)
        core = _heis_parts(self.phi_pow(h, j))
        if j == 0:
            return _join(core + ([_power_expr("t", k)] if k else []))
        return _join([_power_expr("t", -j)] + core + ([_power_expr("t", j + k)] if j + k else []))

    def to_json(self):
        return {"family": "hnn-heis", "endo": self.phi.to_json()}


class AbelianHnn(Family):
    """Ascending HNN extension of Z^n: (Q^n x| Z) coordinates."""

    kind = "hnn-zn"
    elem_cls = AbelianHnnElem

    def __init__(self, M, names=None):
        M = linalg.mat(M)
        d = linalg.det(M)
        if d == 0:
            raise ValidationError("det(M) must be nonzero")
        if not linalg.is_integral(M):
            raise ValidationError("M must be integral")
        self.M = M
        self.n = len(M)
        self.det = d
        self.Minv = linalg.mat_inv(M)
        if names is None:
            names = ["a"] if self.n == 1 else [f"e{i}" for i in range(1, self.n + 1)]
        self.kernel_names = list(names)
        self._pows = {}

    def describe(self):
        return f"M={self.M}"

    def mpow(self, k):
        if k not in self._pows:
            self._pows[k] = linalg.mat_pow(self.M, k)
        return self._pows[k]

    def elem(self, v, k=0):
        return AbelianHnnElem(self, (tuple(linalg._n(Fraction(x)) for x in v), k))

    def identity(self):
        return AbelianHnnElem(self, ((0,) * self.n, 0))

    def mul(self, g, h):
        (v, k), (w, l) = g.nf, h.nf
        mw = linalg.mat_vec(self.mpow(k), w)
        return AbelianHnnElem(self, (tuple(linalg._n(a + b) for a, b in zip(v, mw)), k + l))

    def inv(self, g):
        v, k = g.nf
        return AbelianHnnElem(self, (tuple(-x for x in linalg.mat_vec(self.mpow(-k), v)), -k))

    def is_identity(self, g):
        return not any(g.nf[0]) and g.nf[1] == 0

    def clear_steps(self, v) -> int:
        for j in range(MAX_CLEAR_STEPS):
            if all(isinstance(x, int) for x in v):
                return j
            v = linalg.mat_vec(self.M, v)
        raise ValidationError("element does not lie in the HNN extension")

    def gen_names(self):
        return self.kernel_names + ["t"]

    def generators(self):
        out = {}
        for i, n in enumerate(self.kernel_names):
            v = [0] * self.n
            v[i] = 1
            out[n] = self.elem(v)
        out["t"] = self.elem((0,) * self.n, 1)
        return out

    def to_expr(self, g):
        v, k = g.nf
        j = self.clear_steps(v)
        w = linalg.mat_vec(self.mpow(j), v)
        core = [_power_expr(self.kernel_names[i], e) for i, e in enumerate(w) if e]
        if j == 0:
            return _join(core + ([_power_expr("t", k)] if k else []))
        return _join([_power_expr("t", -j)] + core + ([_power_expr("t", j + k)] if j + k else []))

    def to_json(self):
        return {"family": "hnn-zn", "M": [list(r) for r in self.M], "names": self.kernel_names}


def family_from_json(obj) -> Family:
    kind = obj["family"]
    if kind == "free":
        return FreeGroup(obj["rank"], obj.get("names"))
    if kind == "semidirect-zn":
        return SemidirectZn(obj["n"], obj["action"], obj.get("kernel_names"), obj.get("free_names"))
    if kind == "semidirect-heis":
        return SemidirectHeis([HeisEndo.from_json(a) for a in obj["action"]], obj.get("free_names"))
    if kind == "hnn-heis":
        return HnnHeis(HeisEndo.from_json(obj["endo"]))
    if kind == "hnn-zn":
        return AbelianHnn(obj["M"], obj.get("names"))
    raise ValidationError(f"unknown family {kind!r}")


__all__ = [
    "GroupElement", "FreeElem", "SemidirectElem", "HnnElem", "AbelianHnnElem",
    "FreeGroup", "SemidirectZn", "SemidirectHeis", "HnnHeis", "AbelianHnn",
    "element_mul", "element_is_identity", "family_from_json", "free_pow",
]
