"""Exact matrix representations of Z^n-by-free groups and abelian HNN extensions.

The representation of H x| F is the direct sum of a free-part representation
(dimension m) and the affine block

    t -> [[theta_t, 0], [0, 1]],   h -> [[I, h], [0, 1]]

of dimension n + 1.  For a finite-index subgroup it is induced up through the
kernel transversal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import RelationFailed, ValidationError
from .freegroup import free_inv
from .linalg import IntLattice

SANOV = (((1, 2), (0, 1)), ((1, 0), (2, 1)))


def default_free_images(rank: int):
    """Images of a free basis in SL_2(Z) generating a free group.

    Rank <= 2 uses the Sanov pair; larger ranks use a^i b a^-i inside it.
    """
    a, b = SANOV
    if rank <= 2:
        return list(SANOV[:rank])
    ainv = linalg.mat_inv(a)
    out = []
    for i in range(rank):
        out.append(linalg.mat_mul(linalg.mat_mul(linalg.mat_pow(a, i), b), linalg.mat_pow(ainv, i)))
    return out


def affine_block(theta):
    n = len(theta)
    rows = [list(r) + [0] for r in theta] + [[0] * n + [1]]
    return linalg.mat(rows)


def translation(v):
    n = len(v)
    rows = [[int(i == j) for j in range(n)] + [v[i]] for i in range(n)] + [[0] * n + [1]]
    return linalg.mat(rows)


@dataclass
class LinearRep:
    """Generator name -> matrix plus relation words (signed 1-based letters)."""

    dim: int
    ring: str
    names: list
    images: list
    relations: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._inv = [linalg.mat_inv(M) if self.dim else M for M in self.images]

    @property
    def generators(self):
        return dict(zip(self.names, self.images))

    def evaluate(self, word):
        M = linalg.identity(self.dim)
        for s in word:
            M = linalg.mat_mul(M, self.images[s - 1] if s > 0 else self._inv[-s - 1])
        return M

    def verify(self):
        one = linalg.identity(self.dim)
        for label, w in self.relations:
            if self.evaluate(w) != one:
                raise RelationFailed(f"relation {label} does not map to the identity")
        return True

    def to_json(self):
        def enc(v):
            return str(v) if isinstance(v, Fraction) else v

        return {"schema": "ssg/1", "kind": "linear-rep", "dim": self.dim, "ring": self.ring,
                "generators": {n: [[enc(v) for v in r] for r in M]
                               for n, M in zip(self.names, self.images)},
                "relations": [{"label": lab, "word": list(w)} for lab, w in self.relations],
                "meta": self.meta}


def _comm(i, j):
    return (i, j, -i, -j)


def _vector_word(v, offset=0):
    out = ()
    for i, e in enumerate(v):
        s = i + 1 + offset
        out += (s,) * e if e > 0 else (-s,) * (-e)
    return out


def semidirect_relations(n, action):
    """Defining relations of Z^n x| F_r over names e1..en, t1..tr."""
    rels = []
    for i in range(n):
        for j in range(i + 1, n):
            rels.append((f"[e{i + 1},e{j + 1}]", _comm(i + 1, j + 1)))
    for k, M in enumerate(action):
        t = n + k + 1
        for j in range(n):
            col = tuple(M[r][j] for r in range(n))
            rels.append((f"t{k + 1} e{j + 1} t{k + 1}^-1 = theta(e{j + 1})",
                         (t, j + 1, -t) + free_inv(_vector_word(col))))
    return rels


def linearize_semidirect(n: int, action, free_images=None, check=True) -> LinearRep:
    """The (m+n+1)-dimensional representation of Z^n x| F_r."""
    action = [linalg.mat(M) for M in action]
    r = len(action)
    if free_images is None:
        free_images = default_free_images(r)
    free_images = [linalg.mat(M) for M in free_images]
    if len(free_images) != r:
        raise ValidationError("need one free-part matrix per free generator")
    m = len(free_images[0]) if free_images else 0
    names, images = [], []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        names.append(f"e{i + 1}")
        images.append(linalg.block_diag(linalg.identity(m), translation(e)))
    for k in range(r):
        names.append(f"t{k + 1}")
        images.append(linalg.block_diag(free_images[k], affine_block(action[k])))
    rep = LinearRep(m + n + 1, "Z", names, images, semidirect_relations(n, action),
                    {"m": m, "n": n, "index": 1})
    if check:
        rep.verify()
    return rep


def linearize_induced(n: int, action, H: IntLattice, free_images=None, check=True) -> LinearRep:
    """Induce the representation of H x| F up to K x| F with K = Z^n."""
    from .families import SemidirectZn
    from .subgroups import SemidirectSubgroup

    fam = SemidirectZn(n, action)
    sub = SemidirectSubgroup(fam, H)
    # theta in H-coordinates: column j gives coordinates of theta(b_j)
    Hact = []
    for M in fam.action:
        cols = [H.coordinates(linalg.mat_vec(M, b)) for b in H.basis]
        Hact.append(linalg.transpose(cols))
    base = linearize_semidirect(n, Hact, free_images, check=check)
    m = base.meta["m"]
    d = sub.index
    reps = [sub.rep(i) for i in range(d)]

    def base_eval(h):
        v, w = h.nf
        word = _vector_word(H.coordinates(v)) + tuple(s + n if s > 0 else s - n for s in w)
        return base.evaluate(word)

    b = base.dim
    names, images = [], []
    for name, g in fam.generators().items():
        big = [[0] * (d * b) for _ in range(d * b)]
        for i, ri in enumerate(reps):
            gr = g * ri
            j = sub.locate(gr)
            blk = base_eval(reps[j].inv() * gr)
            for x in range(b):
                for y in range(b):
                    big[j * b + x][i * b + y] = blk[x][y]
        names.append(name)
        images.append(linalg.mat(big))
    rep = LinearRep(d * b, "Z", names, images, semidirect_relations(n, fam.action),
                    {"m": m, "n": n, "index": d, "base_dim": b,
                     "subgroup_kernel": H.to_json()})
    if check:
        rep.verify()
    return rep


def linearize_abelian_hnn(M) -> LinearRep:
    """Ascending HNN of Z^n by M, embedded in Q^n x| <t> with t -> [[M,0],[0,1]]."""
    M = linalg.mat(M)
    n = len(M)
    if linalg.det(M) == 0:
        raise ValidationError("matrix must be nonsingular")
    names, images = [], []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        names.append("a" if n == 1 else f"e{i + 1}")
        images.append(translation(e))
    names.append("t")
    images.append(affine_block(M))
    rels = []
    for i in range(n):
        for j in range(i + 1, n):
            rels.append((f"[{names[i]},{names[j]}]", _comm(i + 1, j + 1)))
    for j in range(n):
        col = tuple(M[r][j] for r in range(n))
        rels.append((f"t {names[j]} t^-1 = M({names[j]})",
                     (n + 1, j + 1, -(n + 1)) + free_inv(_vector_word(col))))
    rep = LinearRep(n + 1, "Q", names, images, rels, {"m": 0, "n": n, "index": 1})
    rep.verify()
    return rep


def linearize(data, free_images=None) -> LinearRep:
    """Dispatch on SemidirectData, a Z^n family, an abelian HNN, or a JSON dict."""
    from .certificate import SemidirectData
    from .families import AbelianHnn, SemidirectZn

    if isinstance(data, SemidirectData):
        if data.degenerate:
            return linearize_induced(data.n, [], data.H, free_images) if data.s > 1 else \
                linearize_semidirect(data.n, [], free_images)
        if data.s == 1:
            return linearize_semidirect(data.n, data.action, free_images)
        return linearize_induced(data.n, data.action, data.H, free_images)
    if isinstance(data, SemidirectZn):
        return linearize_semidirect(data.n, data.action, free_images)
    if isinstance(data, AbelianHnn):
        return linearize_abelian_hnn(data.M)
    if isinstance(data, dict):
        kind = data.get("kind", "semidirect")
        if kind == "abelian-hnn":
            return linearize_abelian_hnn(data["M"])
        n = int(data["n"])
        action = data.get("action", [])
        if "H" in data:
            return linearize_induced(n, action, IntLattice.from_generators(data["H"], n), free_images)
        return linearize_semidirect(n, action, free_images)
    raise ValidationError(f"cannot linearize {type(data).__name__}")
