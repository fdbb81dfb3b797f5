import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ssg.errors import (ExprSyntaxError, FamilyMismatch, InfiniteIndex, NotApplicable,
                        PrecondViolated, UnknownGenerator)
from ssg.expr import Ident, Power, Product, parse_element, parse_in, parse_word
from ssg.families import (AbelianHnn, FreeGroup, HnnHeis, SemidirectHeis, SemidirectZn,
                          element_is_identity, element_mul, family_from_json)
from ssg.freegroup import (CosetTable, free_inv, free_mul, free_reduce, reduced_words,
                           subgroup_build, transversal_and_schreier)
from ssg.heisenberg import HeisElem, HeisEndo, standard_lattice
from ssg.linalg import IntLattice
from ssg.subgroups import (AbelianHnnSubgroup, FreeSubgroup, HnnSubgroup, SemidirectSubgroup,
                           hnn_m1_membership, subgroup_contains)


def raw_words(rank, max_len=10):
    letter = st.sampled_from([s for i in range(1, rank + 1) for s in (i, -i)])
    return st.lists(letter, max_size=max_len).map(tuple)


# -- free groups -----------------------------------------------------------

SANOV = {1: ((1, 2), (0, 1)), -1: ((1, -2), (0, 1)), 2: ((1, 0), (2, 1)), -2: ((1, 0), (-2, 1))}


def sanov(w):
    M = ((1, 0), (0, 1))
    for s in w:
        B = SANOV[s]
        M = tuple(tuple(sum(M[i][k] * B[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    return M


def test_free_reduce_examples():
    assert free_reduce((1, -1)) == ()
    assert free_reduce((1, 2, -2, 1)) == (1, 1)


@given(raw_words(2, 14))
def test_free_reduce_against_faithful_matrices(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert all(a != -b for a, b in zip(r, r[1:]))
    assert sanov(r) == sanov(w)
    assert (sanov(w) == ((1, 0), (0, 1))) == (r == ())


def test_subgroup_build_examples():
    T = subgroup_build([(1, 1), (2,), (1, 2, -1)], 2)
    assert T.index == 2
    assert subgroup_build([(1,), (2,)], 2).index == 1
    with pytest.raises(InfiniteIndex):
        subgroup_build([(1,)], 2).index


def test_even_exponent_subgroup_membership_and_transversal():
    T = subgroup_build([(1, 1), (2,), (1, 2, -1)], 2)
    for w in reduced_words(2, 5):
        assert T.contains(w) == (sum(1 if s == 1 else -1 if s == -1 else 0 for s in w) % 2 == 0)
    reps, schreier = transversal_and_schreier(T)
    assert reps == [(), (1,)]
    assert all(T.contains(s) for s in schreier)
    assert transversal_and_schreier(CosetTable.trivial(2))[0] == [()]


PERMS = [((1, 2, 0, 3), (0, 1, 3, 2)), ((1, 0, 2), (0, 2, 1)), ((1, 2, 3, 4, 0), (0, 2, 1, 4, 3))]


@pytest.mark.parametrize("perms", PERMS)
def test_stabilizer_table_matches_permutation_oracle(perms):
    n = len(perms[0])
    inv = [tuple(p.index(i) for i in range(n)) for p in perms]

    # right action v.s = perm_s(v)
    def act(v, s):
        return perms[s - 1][v] if s > 0 else inv[-s - 1][v]

    T = CosetTable.from_action(2, act, 0)
    assert T.index == n
    for w in reduced_words(2, 6):
        v = 0
        for s in w:
            v = act(v, s)
        assert T.contains(w) == (v == 0)
    reps, sch = transversal_and_schreier(T)
    assert len(reps) == T.index
    for s in sch:
        assert T.contains(s)
    # closure: every Schreier word rewrites back to itself
    for w in sch + [free_mul(sch[0], free_inv(sch[-1]))]:
        out = ()
        for s in T.rewrite(w):
            out = free_mul(out, sch[s - 1] if s > 0 else free_inv(sch[-s - 1]))
        assert out == free_reduce(w)


@given(raw_words(2, 8), raw_words(2, 8))
def test_free_subgroup_closure(a, b):
    F = FreeGroup(2)
    S = FreeSubgroup.from_words(F, [(1, 1), (2,), (1, 2, -1)])
    gens = [g for _, g in S.generators()]
    h = F.elem(free_mul(*[gens[i % len(gens)].nf for i in a if i > 0]))
    for s in gens:
        assert subgroup_contains(S, h * s)
    g = F.elem(b)
    j = S.locate(g)
    assert S.contains(S.rep(j).inv() * g)


# -- semidirect products -----------------------------------------------------

ACTIONS = [((0, 1), (1, 0)), ((1, 1), (0, 1))]


def affine(fam, g):
    """Oracle: (v, w) -> [[theta_w, v], [0, 1]]."""
    v, w = g.nf
    M = fam.theta(w)
    return tuple(tuple(M[i]) + (v[i],) for i in range(2)) + ((0, 0, 1),)


def _mul3(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)) for i in range(3))


vecs = st.tuples(st.integers(-5, 5), st.integers(-5, 5))


@given(vecs, raw_words(2, 5), vecs, raw_words(2, 5))
def test_semidirect_zn_matches_affine_oracle(v1, w1, v2, w2):
    fam = SemidirectZn(2, ACTIONS)
    g, h = fam.elem(v1, w1), fam.elem(v2, w2)
    assert affine(fam, g * h) == _mul3(affine(fam, g), affine(fam, h))
    assert (g * g.inv()).is_identity()


@given(vecs, raw_words(2, 4), raw_words(2, 4))
def test_action_homomorphism(v, w1, w2):
    fam = SemidirectZn(2, ACTIONS)
    assert fam.act(free_mul(w1, w2), v) == fam.act(w1, fam.act(w2, v))


def test_semidirect_membership_examples():
    fam = SemidirectZn(2, ACTIONS)
    S = SemidirectSubgroup(fam, IntLattice.scaled(2, 2))
    assert not S.contains(fam.elem((1, 0)))
    assert S.contains(fam.elem((2, 4), (1, -2)))
    assert S.index == 4 and len(S.transversal()) == 4
    H = SemidirectHeis([HeisEndo(((1, 0), (1, 1)), (1, 0))])
    N1 = SemidirectSubgroup(H, standard_lattice(3))
    assert N1.contains(H.elem(HeisElem(3, 0, 0)))
    assert not N1.contains(H.elem(HeisElem(1, 0, 0)))


@pytest.mark.parametrize("kind", ["zn", "heis"])
def test_semidirect_transversal_covers(kind):
    if kind == "zn":
        fam = SemidirectZn(2, ACTIONS)
        S = SemidirectSubgroup(fam, IntLattice.scaled(2, 2))
    else:
        fam = SemidirectHeis([HeisEndo(((0, 1), (1, 0)), (0, 0))])
        S = SemidirectSubgroup(fam, standard_lattice(3))
    reps = S.transversal()
    assert len(reps) == S.index
    # distinct cosets, and every generator times every rep lands in some coset
    assert len({S.locate(r) for r in reps}) == S.index
    for g in fam.generators().values():
        for r in reps:
            j = S.locate(g * r)
            assert S.contains(reps[j].inv() * g * r)
    for _, s in S.generators():
        assert S.contains(s)


def test_semidirect_rejects_noninvariant_kernel():
    fam = SemidirectZn(2, [((0, 1), (1, 0))])
    from ssg.errors import ValidationError

    with pytest.raises(ValidationError):
        SemidirectSubgroup(fam, IntLattice.from_generators([(1, 0), (0, 2)]))


# -- HNN extensions ----------------------------------------------------------

def test_hnn_examples():
    G = HnnHeis(HeisEndo(((2, 0), (0, 3))))
    x, y, z, t = (G.generators()[n] for n in "xyzt")
    assert (x * x).nf == (HeisElem(2, 0, 0), 0)
    assert (t * x * t.inv()).nf == (HeisElem(2, 0, 0), 0)
    assert (t.inv() * x * x * t).nf == (HeisElem(1, 0, 0), 0)
    phix = G.elem(G.phi.apply(HeisElem(1, 0, 0)))
    assert element_is_identity(t * x * t.inv() * x.inv() * (phix * x.inv()).inv())
    assert not element_is_identity(x)
    assert element_is_identity(G.identity())
    with pytest.raises(FamilyMismatch):
        element_mul(x, FreeGroup(1).elem((1,)))
    with pytest.raises(NotApplicable):
        HnnHeis(HeisEndo.identity())


hnn_words = st.lists(st.sampled_from("xyztXYZT"), max_size=6)


@given(hnn_words, hnn_words, hnn_words)
def test_hnn_associative(a, b, c):
    G = HnnHeis(HeisEndo(((2, 1), (1, 3)), (1, -1)))
    gens = G.generators()

    def ev(w):
        out = G.identity()
        for ch in w:
            g = gens[ch.lower()]
            out = out * (g if ch.islower() else g.inv())
        return out

    g, h, k = ev(a), ev(b), ev(c)
    assert (g * h) * k == g * (h * k)
    assert (g * g.inv()).is_identity()


def _m1_brute(phi, h, p, steps):
    N1 = standard_lattice(p)
    for _ in range(steps):
        if h.is_integral() and N1.contains(h):
            return True
        h = phi.apply(h)
    return False


def test_m1_membership_examples():
    G = HnnHeis(HeisEndo(((2, 0), (0, 3))))
    p = 5
    assert hnn_m1_membership(G, G.elem(HeisElem(p, 0, 0)), p)
    assert not hnn_m1_membership(G, G.elem(HeisElem(1, 0, 0)), p)
    assert hnn_m1_membership(G, G.elem(HeisElem(0, 0, p * p)), p)
    with pytest.raises(PrecondViolated):
        hnn_m1_membership(G, G.generators()["t"], p)
    with pytest.raises(PrecondViolated):
        hnn_m1_membership(G, G.elem(HeisElem(1, 0, 0)), 3)


def test_m1_membership_matches_brute_force():
    phi = HeisEndo(((2, 1), (1, 3)), (1, 0))
    G = HnnHeis(phi)
    p = 3
    # the state space mod p^2 has p^6 points; iterate past it
    bound = 2 * p ** 6
    for v in itertools.product(range(-4, 5, 2), repeat=3):
        h = HeisElem(*v)
        assert hnn_m1_membership(G, G.elem(h), p) == _m1_brute(phi, h, p, bound)


def test_hnn_subgroup_cosets():
    G = HnnHeis(HeisEndo(((2, 0), (0, 3))))
    S = HnnSubgroup(G, 5)
    assert S.index == 5 ** 4
    gens = G.generators()
    w = gens["x"] * gens["y"] * gens["t"] * gens["x"]
    j = S.locate(w)
    assert S.contains(S.rep(j).inv() * w)


def test_abelian_hnn():
    G = AbelianHnn([[2]])
    a, t = G.generators()["a"], G.generators()["t"]
    assert (t * a * t.inv()) == a * a
    assert (t.inv() * a * t).nf == ((Fraction(1, 2),), 0)
    S = AbelianHnnSubgroup(G, 3)
    assert S.index == 3
    assert S.contains(a ** 3) and not S.contains(a)


def test_family_json_roundtrip():
    for fam in (FreeGroup(2), SemidirectZn(2, ACTIONS), HnnHeis(HeisEndo(((2, 0), (0, 3)))),
                AbelianHnn([[2, 1], [0, 3]]), SemidirectHeis([HeisEndo(((0, 1), (1, 0)))])):
        assert family_from_json(fam.to_json()).to_json() == fam.to_json()


# -- expressions ---------------------------------------------------------------

def test_parse_examples():
    ast = parse_element("t*x^2*t^-1")
    assert isinstance(ast, Product) and len(ast.terms) == 3
    assert ast.terms[1] == Power(Ident("x", 3), 2)
    G = HnnHeis(HeisEndo(((2, 0), (0, 3))))
    assert parse_in(G, "x^0").is_identity()
    assert parse_in(G, "t*x*t^-1") == G.elem(HeisElem(2, 0, 0))
    assert parse_in(G, "(x*y)^(-2)") == (G.generators()["x"] * G.generators()["y"]) ** -2
    with pytest.raises(ExprSyntaxError) as e:
        parse_element("x**y")
    assert e.value.column == 3
    with pytest.raises(UnknownGenerator):
        parse_in(G, "w")
    assert parse_word("a*b^-1", ["a", "b"]) == (1, -2)


@given(raw_words(2, 8))
def test_parse_print_roundtrip_free(w):
    F = FreeGroup(2, ["a", "b"])
    g = F.elem(w)
    assert parse_in(F, str(g)) == g


@given(vecs, raw_words(2, 4))
def test_parse_print_roundtrip_semidirect(v, w):
    fam = SemidirectZn(2, ACTIONS)
    g = fam.elem(v, w)
    assert parse_in(fam, str(g)) == g


@given(hnn_words)
def test_parse_print_roundtrip_hnn(w):
    G = HnnHeis(HeisEndo(((2, 0), (0, 3))))
    g = G.identity()
    for ch in w:
        x = G.generators()[ch.lower()]
        g = g * (x if ch.islower() else x.inv())
    assert parse_in(G, str(g)) == g
