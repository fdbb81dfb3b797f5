import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ssg.claim1 import EIGENVALUE_ONE, NON_DEGENERATE, eigen_data, solve_claim1
from ssg.errors import InfiniteIndex, NotApplicable
from ssg.heisenberg import (HeisElem, HeisEndo, comm, endo_apply, endo_compose, heis_mul,
                            heis_pow, lattice_canonicalize, lattice_contains, standard_lattice)
from ssg.numtheory import dirichlet_prime, is_prime, prime_factors


# Oracle: the integer unitriangular 3x3 matrices. x, y are the elementary
# matrices and z is computed as x^-1 y^-1 x y in that group.

def _mm(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def _minv(A):
    a, c, b = A[0][1], A[0][2], A[1][2]
    return ((1, -a, a * b - c), (0, 1, -b), (0, 0, 1))


def _mpow(A, n):
    out = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    B = A if n >= 0 else _minv(A)
    for _ in range(abs(n)):
        out = _mm(out, B)
    return out


MX = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
MY = ((1, 0, 0), (0, 1, 1), (0, 0, 1))
MZ = _mm(_mm(_minv(MX), _minv(MY)), _mm(MX, MY))


def oracle(g):
    return _mm(_mm(_mpow(MX, g.a), _mpow(MY, g.b)), _mpow(MZ, g.c))


coord = st.integers(-20, 20)
elems = st.builds(HeisElem, coord, coord, coord)


def test_z_is_central_and_nontrivial():
    assert MZ != _mpow(MX, 0)
    assert _mm(MZ, MX) == _mm(MX, MZ) and _mm(MZ, MY) == _mm(MY, MZ)


def test_product_examples():
    assert heis_mul(HeisElem(1, 0, 0), HeisElem(0, 1, 0)) == HeisElem(1, 1, 0)
    assert heis_mul(HeisElem(0, 1, 0), HeisElem(1, 0, 0)) == HeisElem(1, 1, -1)
    x, y = HeisElem(1, 0, 0), HeisElem(0, 1, 0)
    assert x.inv() * y.inv() * x * y == HeisElem(0, 0, 1)
    assert comm(x, y) == HeisElem(0, 0, 1)


def test_power_examples():
    assert heis_pow(HeisElem(1, 1, 0), 2) == HeisElem(2, 2, -1)
    assert heis_pow(HeisElem(4, -7, 3), 0) == HeisElem()
    g11, g12, c = 3, 5, 2
    for p in (3, 5, 13):
        assert heis_pow(HeisElem(g11, g12, c), p).c == p * c - g11 * g12 * p * (p - 1) // 2


@given(elems, elems)
def test_product_matches_matrix_oracle(g, h):
    assert oracle(g * h) == _mm(oracle(g), oracle(h))


@given(st.builds(HeisElem, *[st.integers(-6, 6)] * 3), st.integers(-12, 12))
def test_power_matches_matrix_oracle(g, n):
    assert oracle(g ** n) == _mpow(oracle(g), n)


def test_associativity_small_box_exhaustive():
    box = [HeisElem(*v) for v in itertools.product(range(-1, 2), repeat=3)]
    for g, h, k in itertools.product(box, repeat=3):
        assert (g * h) * k == g * (h * k)


@given(elems)
def test_inverse(g):
    assert (g * g.inv()).is_identity() and (g.inv() * g).is_identity()


def test_endo_examples():
    phi = HeisEndo(((2, 0), (0, 3)))
    assert endo_apply(phi, HeisElem(0, 0, 1)) == HeisElem(0, 0, 6)
    x, y = HeisElem(1, 0, 0), HeisElem(0, 1, 0)
    assert phi(x.inv() * y.inv() * x * y) == HeisElem(0, 0, 6)
    assert phi(HeisElem(5, 0, 0)) == HeisElem(10, 0, 0)
    assert endo_compose(HeisEndo.identity(), phi) == phi
    assert endo_compose(phi, phi).A == ((4, 0), (0, 9))


endos = st.builds(lambda a, b, c, d, c1, c2: HeisEndo(((a, b), (c, d)), (c1, c2)),
                  *[st.integers(-4, 4)] * 6)


@given(endos, elems, elems)
def test_endo_is_homomorphism(phi, g, h):
    assert phi(g * h) == phi(g) * phi(h)


@given(endos, endos, elems)
def test_compose_property(phi, psi, g):
    assert endo_apply(endo_compose(phi, psi), g) == phi(psi(g))


@given(endos)
def test_commutator_maps_to_z_det(phi):
    x, y = HeisElem(1, 0, 0), HeisElem(0, 1, 0)
    assert phi(comm(x, y)) == HeisElem(0, 0, phi.det)


@given(endos.filter(lambda f: f.det != 0), elems)
def test_apply_inverse_in_completion(phi, g):
    assert phi(phi.apply_inverse(g)) == g


def test_lattice_examples():
    for p in (3, 5, 7):
        L = lattice_canonicalize([HeisElem(p, 0, 0), HeisElem(0, p, 0)])
        assert L.rows() == standard_lattice(p).rows()
        assert (L.e1, L.f12, L.f13, L.e2, L.f23, L.e3) == (p, 0, 0, p, 0, p * p)
        assert L.index == p ** 4
    assert lattice_canonicalize([HeisElem(1, 0, 0), HeisElem(0, 1, 0)]).index == 1
    L = lattice_canonicalize([HeisElem(2, 1, 0), HeisElem(0, 2, 0), HeisElem(0, 0, 1)])
    assert L.index == 4
    N1 = standard_lattice(5)
    assert lattice_contains(N1, HeisElem(5, 10, 25))
    assert not lattice_contains(N1, HeisElem(1, 0, 0))
    assert lattice_contains(N1, HeisElem())
    with pytest.raises(InfiniteIndex):
        lattice_canonicalize([HeisElem(1, 0, 0)])


def _brute_members(gens, box):
    """Elements of the generated subgroup inside a coordinate box, by closure."""
    seen = {HeisElem()}
    frontier = [HeisElem()]
    gs = list(gens) + [g.inv() for g in gens]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gs:
                k = h * g
                if all(abs(v) <= box for v in k.coords()) and k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return seen


def test_lattice_membership_matches_closure_oracle():
    gens = [HeisElem(2, 1, 0), HeisElem(0, 2, 1)]
    L = lattice_canonicalize(gens)
    members = _brute_members(gens, 6)
    for v in itertools.product(range(-4, 5), repeat=3):
        g = HeisElem(*v)
        if g in members:
            assert L.contains(g)
    for g in L.generators:
        assert L.contains(g)


@given(st.lists(elems, min_size=2, max_size=4), st.randoms())
def test_canonical_form_order_independent(gens, rnd):
    gens = gens + [HeisElem(3, 0, 0), HeisElem(0, 3, 0)]
    L = lattice_canonicalize(gens)
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    assert lattice_canonicalize(shuffled) == L
    assert lattice_canonicalize(L.generators) == L
    assert all(L.contains(g) for g in gens)


def test_dirichlet_prime():
    assert dirichlet_prime(6) == 13
    assert dirichlet_prime(4) == 17
    assert dirichlet_prime(1) == 3
    assert dirichlet_prime(6, {13}) == 37


def test_number_theory_helpers():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert prime_factors(360) == {2, 3, 5}


def test_congruence_basis_nondegenerate():
    phi = HeisEndo(((2, 0), (0, 3)))
    sol = solve_claim1(phi)
    assert (sol.case, sol.p, sol.k, sol.alpha_beta) == (NON_DEGENERATE, 13, 1, (0, 0))
    assert sol.x1 == HeisElem(1, 0, 0) and sol.y1 == HeisElem(0, 1, 0)


def test_congruence_basis_eigenvalue_one():
    phi = HeisEndo(((1, 1), (0, 2)))
    sol = solve_claim1(phi)
    assert sol.case == EIGENVALUE_ONE
    assert sol.x1 == HeisElem(1, 0, 0) and sol.y1 == HeisElem(1, 1, 0)
    assert sol.m == 1 and sol.k == sol.p
    d1, d2, lam = eigen_data(sol, phi)
    assert lam == 2
    assert phi(sol.x1) == sol.x1 * HeisElem(0, 0, d1)
    assert phi(sol.y1) == sol.y1 ** lam * HeisElem(0, 0, d2)


def test_congruence_basis_rejects_automorphism():
    with pytest.raises(NotApplicable):
        solve_claim1(HeisEndo.identity())


def _check_basis(phi):
    sol = solve_claim1(phi)
    N1 = standard_lattice(sol.p)
    eff = sol.effective
    assert eff.is_integral()
    assert N1.contains(eff(HeisElem(sol.p, 0, 0))) and N1.contains(eff(HeisElem(0, sol.p, 0)))
    assert (sol.p - 1) % (2 * abs(phi.det)) == 0
    return sol


@settings(max_examples=25)
@given(endos.filter(lambda f: 2 <= abs(f.det) <= 6 and f.det - f.trace + 1 != 0))
def test_congruence_basis_invariants_nondegenerate(phi):
    assert _check_basis(phi).case == NON_DEGENERATE


@pytest.mark.parametrize("A", [((1, 1), (0, 2)), ((1, 0), (0, 3)), ((1, 0), (0, -2)), ((2, 0), (1, 1))])
def test_congruence_basis_invariants_eigenvalue_one(A):
    assert _check_basis(HeisEndo(A)).case == EIGENVALUE_ONE
