"""Heisenberg group arithmetic in Mal'cev coordinates.

An element ``HeisElem(a, b, c)`` is the normal form ``x^a y^b z^c`` with
``z = [x, y] = x^-1 y^-1 x y``.  From ``y x = x y z^-1`` one gets

    (a1, b1, c1) * (a2, b2, c2) = (a1 + a2, b1 + b2, c1 + c2 - b1 * a2).

Coordinates may be :class:`fractions.Fraction`; the same polynomial law is
then the rational Mal'cev completion, which is what ascending HNN
extensions embed into.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import InfiniteIndex, ValidationError


def _norm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def _tri(n):
    """n(n-1)/2, exact for integer or rational n."""
    if isinstance(n, int):
        return n * (n - 1) // 2
    return _norm(Fraction(n) * (n - 1) / 2)


@dataclass(frozen=True)
class HeisElem:
    a: int = 0
    b: int = 0
    c: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", _norm(self.a))
        object.__setattr__(self, "b", _norm(self.b))
        object.__setattr__(self, "c", _norm(self.c))

    def __mul__(self, other: HeisElem) -> HeisElem:
        return HeisElem(self.a + other.a, self.b + other.b,
                        self.c + other.c - self.b * other.a)

    def __pow__(self, n) -> HeisElem:
        return HeisElem(n * self.a, n * self.b,
                        n * self.c - self.a * self.b * _tri(n))

    def inv(self) -> HeisElem:
        return HeisElem(-self.a, -self.b, -self.c - self.a * self.b)

    def __invert__(self):
        return self.inv()

    def is_identity(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in (self.a, self.b, self.c))

    def coords(self):
        return (self.a, self.b, self.c)

    def __repr__(self):
        return f"HeisElem({self.a}, {self.b}, {self.c})"


IDENTITY = HeisElem(0, 0, 0)
X = HeisElem(1, 0, 0)
Y = HeisElem(0, 1, 0)
Z = HeisElem(0, 0, 1)


def heis_mul(lhs: HeisElem, rhs: HeisElem) -> HeisElem:
    return lhs * rhs


def heis_pow(g: HeisElem, n) -> HeisElem:
    return g ** n


def comm(g: HeisElem, h: HeisElem) -> HeisElem:
    """[g, h] = g^-1 h^-1 g h, always central: z^(a_g b_h - b_g a_h)."""
    return HeisElem(0, 0, g.a * h.b - g.b * h.a)


def conj(g: HeisElem, h: HeisElem) -> HeisElem:
    """Left conjugate g h g^-1."""
    return g * h * g.inv()


@dataclass(frozen=True)
class HeisEndo:
    """Endomorphism fixed by the images of x and y.

    ``A = [[a1, a2], [b1, b2]]`` has the x,y-parts of phi(x), phi(y) as
    columns and ``c = (c1, c2)`` their z-exponents.  Entries may be
    rational when the map is a change of basis in the completion.
    """

    A: tuple
    c: tuple = (0, 0)

    def __post_init__(self):
        A = tuple(tuple(_norm(v) for v in row) for row in self.A)
        if len(A) != 2 or any(len(r) != 2 for r in A):
            raise ValidationError("HeisEndo matrix must be 2x2")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", tuple(_norm(v) for v in self.c))

    @classmethod
    def from_images(cls, gx: HeisElem, gy: HeisElem) -> HeisEndo:
        return cls(((gx.a, gy.a), (gx.b, gy.b)), (gx.c, gy.c))

    @classmethod
    def identity(cls) -> HeisEndo:
        return cls(((1, 0), (0, 1)), (0, 0))

    @property
    def x_image(self) -> HeisElem:
        return HeisElem(self.A[0][0], self.A[1][0], self.c[0])

    @property
    def y_image(self) -> HeisElem:
        return HeisElem(self.A[0][1], self.A[1][1], self.c[1])

    @property
    def det(self):
        (a1, a2), (b1, b2) = self.A
        return _norm(a1 * b2 - a2 * b1)

    @property
    def trace(self):
        return _norm(self.A[0][0] + self.A[1][1])

    def apply(self, g: HeisElem) -> HeisElem:
        return (self.x_image ** g.a) * (self.y_image ** g.b) * HeisElem(0, 0, self.det * g.c)

    __call__ = apply

    def apply_inverse(self, g: HeisElem) -> HeisElem:
        """Preimage in the rational completion (requires det != 0)."""
        d = self.det
        if d == 0:
            raise ValidationError("endomorphism is not injective")
        (a1, a2), (b1, b2) = self.A
        a = Fraction(b2 * g.a - a2 * g.b, 1) / d
        b = Fraction(-b1 * g.a + a1 * g.b, 1) / d
        h0 = self.apply(HeisElem(a, b, 0))
        return HeisElem(a, b, Fraction(g.c - h0.c) / d)

    def compose(self, other: HeisEndo) -> HeisEndo:
        """self o other."""
        return HeisEndo.from_images(self.apply(other.x_image), self.apply(other.y_image))

    def power(self, k: int) -> HeisEndo:
        if k < 0:
            return self.inverse().power(-k)
        out = HeisEndo.identity()
        for _ in range(k):
            out = self.compose(out)
        return out

    def inverse(self) -> HeisEndo:
        return HeisEndo.from_images(self.apply_inverse(X), self.apply_inverse(Y))

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for row in self.A for v in row) and \
            all(isinstance(v, int) for v in self.c)

    def to_json(self):
        return {"A": [list(r) for r in self.A], "c": list(self.c)}

    @classmethod
    def from_json(cls, obj) -> HeisEndo:
        A = obj["A"]
        return cls((tuple(A[0]), tuple(A[1])), tuple(obj.get("c", (0, 0))))


def endo_apply(phi: HeisEndo, g: HeisElem) -> HeisElem:
    return phi.apply(g)


def endo_compose(phi: HeisEndo, psi: HeisEndo) -> HeisEndo:
    return phi.compose(psi)


# -- finite-index subgroups ---------------------------------------------------

@dataclass(frozen=True)
class HeisLattice:
    """Subgroup generated by x^e1 y^f12 z^f13, y^e2 z^f23, z^e3.

    Every element is uniquely g1^u g2^v g3^w.  Canonical: 0 <= f12 < e2 and
    0 <= f13, f23 < e3, with e3 | e1*e2.
    """

    e1: int
    f12: int
    f13: int
    e2: int
    f23: int
    e3: int

    @property
    def generators(self):
        return (HeisElem(self.e1, self.f12, self.f13),
                HeisElem(0, self.e2, self.f23),
                HeisElem(0, 0, self.e3))

    @property
    def index(self) -> int:
        return self.e1 * self.e2 * self.e3

    def contains(self, g: HeisElem) -> bool:
        if not g.is_integral():
            return False
        g1, g2, _ = self.generators
        if g.a % self.e1:
            return False
        h = (g1 ** (-(g.a // self.e1))) * g
        if h.b % self.e2:
            return False
        h = (g2 ** (-(h.b // self.e2))) * h
        return h.c % self.e3 == 0

    __contains__ = contains

    def coset_rep(self, g: HeisElem) -> HeisElem:
        """Canonical representative of the left coset g L."""
        g1, g2, g3 = self.generators
        h = g * g1 ** (-(g.a // self.e1))
        h = h * g2 ** (-(h.b // self.e2))
        return h * g3 ** (-(h.c // self.e3))

    def coset_index(self, g: HeisElem) -> int:
        r = self.coset_rep(g)
        return (r.a * self.e2 + r.b) * self.e3 + r.c

    def rep(self, i: int) -> HeisElem:
        i, c = divmod(i, self.e3)
        a, b = divmod(i, self.e2)
        return HeisElem(a, b, c)

    def rows(self):
        return [[self.e1, self.f12, self.f13], [self.e2, self.f23], [self.e3]]

    def to_json(self):
        return self.rows()

    @classmethod
    def from_json(cls, rows) -> HeisLattice:
        (e1, f12, f13), (e2, f23), (e3,) = rows
        return cls(e1, f12, f13, e2, f23, e3)

    def image(self, phi: HeisEndo) -> HeisLattice:
        return lattice_canonicalize([phi.apply(g) for g in self.generators])


def _euclid_on(elems, coord):
    """Nielsen-reduce so at most one element has nonzero ``coord``."""
    elems = list(elems)
    while True:
        nz = [g for g in elems if getattr(g, coord) != 0]
        if len(nz) <= 1:
            break
        k = min((i for i, g in enumerate(elems) if getattr(g, coord) != 0),
                key=lambda i: abs(getattr(elems[i], coord)))
        piv = elems[k]
        rest = elems[:k] + elems[k + 1:]
        new = []
        pv = getattr(piv, coord)
        for g in rest:
            v = getattr(g, coord)
            if v:
                g = g * piv ** (-(v // pv))
            new.append(g)
        elems = [piv] + new
    piv = [g for g in elems if getattr(g, coord) != 0]
    others = [g for g in elems if getattr(g, coord) == 0]
    if piv and getattr(piv[0], coord) < 0:
        piv = [piv[0].inv()]
    return (piv[0] if piv else None), others


def lattice_canonicalize(gens) -> HeisLattice:
    gens = [g for g in gens]
    if not all(g.is_integral() for g in gens):
        raise ValidationError("lattice generators must be integral")
    g1, rest = _euclid_on(gens, "a")
    g2, rest = _euclid_on(rest, "b")
    if g1 is None or g2 is None:
        raise InfiniteIndex("x,y-projection has rank < 2")
    e3 = g1.a * g2.b
    for g in rest:
        e3 = gcd(e3, g.c)
    e1, e2 = g1.a, g2.b
    f23 = g2.c % e3
    g2 = HeisElem(0, e2, f23)
    q = g1.b // e2
    g1 = g1 * g2 ** (-q)
    f13 = g1.c % e3
    return HeisLattice(e1, g1.b, f13, e2, f23, e3)


def lattice_contains(L: HeisLattice, g: HeisElem) -> bool:
    return L.contains(g)


def standard_lattice(p: int) -> HeisLattice:
    """<x^p, y^p>, which contains z^(p^2) and has index p^4."""
    return lattice_canonicalize([HeisElem(p, 0, 0), HeisElem(0, p, 0)])
