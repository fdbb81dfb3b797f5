"""Exact matrices (tuples of int/Fraction rows) and integer lattices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InfiniteIndex, ValidationError


def _n(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def mat(rows):
    return tuple(tuple(_n(v) for v in r) for r in rows)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r, c):
    return tuple(tuple(0 for _ in range(c)) for _ in range(r))


def mat_mul(A, B):
    if not A:
        return A
    cols = list(zip(*B))
    return tuple(tuple(_n(sum(a * b for a, b in zip(row, col))) for col in cols) for row in A)


def mat_vec(A, v):
    return tuple(_n(sum(a * x for a, x in zip(row, v))) for row in A)


def mat_pow(A, k):
    if k < 0:
        A, k = mat_inv(A), -k
    out = identity(len(A))
    base = A
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def det(A):
    n = len(A)
    M = [[Fraction(v) for v in row] for row in A]
    d = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if M[r][i] != 0), None)
        if piv is None:
            return 0
        if piv != i:
            M[i], M[piv] = M[piv], M[i]
            d = -d
        d *= M[i][i]
        for r in range(i + 1, n):
            f = M[r][i] / M[i][i]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[i])]
    return _n(d)


def mat_inv(A):
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for i in range(n):
        piv = next((r for r in range(i, n) if M[r][i] != 0), None)
        if piv is None:
            raise ValidationError("matrix is not invertible")
        M[i], M[piv] = M[piv], M[i]
        p = M[i][i]
        M[i] = [v / p for v in M[i]]
        for r in range(n):
            if r != i and M[r][i] != 0:
                f = M[r][i]
                M[r] = [a - f * b for a, b in zip(M[r], M[i])]
    return mat([row[n:] for row in M])


def is_integral(A) -> bool:
    return all(isinstance(_n(v), int) for row in A for v in row)


def block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return mat(out)


def transpose(A):
    return tuple(zip(*A))


def hnf_rows(rows):
    """Row-style Hermite normal form of an integer matrix (nonzero rows only).

    Pivots are positive and entries above each pivot are reduced into
    [0, pivot).
    """
    M = [list(r) for r in rows if any(r)]
    if not M:
        return []
    ncols = len(M[0])
    out = []
    col = 0
    while M and col < ncols:
        nz = [r for r in M if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in M if r[col] != 0]) > 1:
            nz = [r for r in M if r[col] != 0]
            piv = min(nz, key=lambda r: abs(r[col]))
            for r in M:
                if r is not piv and r[col] != 0:
                    q = r[col] // piv[col]
                    for k in range(ncols):
                        r[k] -= q * piv[k]
        piv = next(r for r in M if r[col] != 0)
        M = [r for r in M if r is not piv and any(r)]
        if piv[col] < 0:
            piv = [-v for v in piv]
        out.append(piv)
        col += 1
    for i, r in enumerate(out):
        pc = next(k for k, v in enumerate(r) if v)
        for j in range(i):
            q = out[j][pc] // r[pc]
            if q:
                out[j] = [a - q * b for a, b in zip(out[j], r)]
    return [tuple(r) for r in out]


@dataclass(frozen=True)
class IntLattice:
    """Full-rank sublattice of Z^n in row Hermite normal form."""

    basis: tuple

    @classmethod
    def from_generators(cls, gens, n=None) -> IntLattice:
        gens = [tuple(int(v) for v in g) for g in gens]
        if n is None:
            n = len(gens[0])
        H = hnf_rows(gens)
        if len(H) != n or any(H[i][i] == 0 for i in range(n)):
            raise InfiniteIndex("lattice is not of full rank")
        return cls(tuple(H))

    @classmethod
    def full(cls, n) -> IntLattice:
        return cls(identity(n))

    @classmethod
    def scaled(cls, n, s) -> IntLattice:
        return cls(tuple(tuple(s if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def index(self) -> int:
        out = 1
        for i, r in enumerate(self.basis):
            out *= r[i]
        return out

    def _reduce(self, v):
        v = list(v)
        coeffs = []
        for i, r in enumerate(self.basis):
            q = v[i] // r[i]
            coeffs.append(q)
            v = [a - q * b for a, b in zip(v, r)]
        return tuple(v), tuple(coeffs)

    def contains(self, v) -> bool:
        v = tuple(_n(x) for x in v)
        if not all(isinstance(x, int) for x in v):
            return False
        return not any(self._reduce(v)[0])

    __contains__ = contains

    def coordinates(self, v):
        r, c = self._reduce(v)
        if any(r):
            raise ValidationError(f"{v} is not in the lattice")
        return c

    def coset_rep(self, v):
        return self._reduce(v)[0]

    def coset_index(self, v) -> int:
        r = self.coset_rep(v)
        i = 0
        for k, row in enumerate(self.basis):
            i = i * row[k] + r[k]
        return i

    def rep(self, i):
        out = []
        for k in reversed(range(self.rank)):
            i, r = divmod(i, self.basis[k][k])
            out.append(r)
        return tuple(reversed(out))

    def image(self, M) -> IntLattice:
        return IntLattice.from_generators([mat_vec(M, b) for b in self.basis], self.rank)

    def intersect(self, other: IntLattice) -> IntLattice:
        n = self.rank
        rows = [tuple(b) + tuple(b) for b in self.basis] + \
               [tuple(b) + (0,) * n for b in other.basis]
        H = hnf_rows(rows)
        low = [r[n:] for r in H if not any(r[:n])]
        return IntLattice.from_generators(low, n)

    def contains_lattice(self, other: IntLattice) -> bool:
        return all(self.contains(b) for b in other.basis)

    def to_json(self):
        return [list(r) for r in self.basis]

    @classmethod
    def from_json(cls, rows) -> IntLattice:
        return cls.from_generators(rows)
