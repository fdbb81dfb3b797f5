"""The ten acceptance criteria, each with its runtime limit.

Every test records one PASS/FAIL line; the lines are printed at the end of
the session (see conftest) and also to stdout for ``-s`` runs.
"""

import contextlib
import itertools
import random
import time

import pytest

from conftest import ACCEPTANCE
from ssg.automata import NontrivialAtDepth, Trivial, derived_free_generators, make_bn
from ssg.certificate import bs_candidates_fail, bs_loop, certificate_verify, reduce_to_semidirect
from ssg.constructions import build_heis_hnn, build_split1
from ssg.freegroup import free_inv, free_mul, reduced_words
from ssg.heisenberg import HeisElem, HeisEndo
from ssg.linear import linearize, linearize_abelian_hnn, linearize_semidirect
from ssg.certificate import Certificate, Edge
from ssg.virtual import CompiledAutomaton, EndoSystem, NoKernelWitness, faithfulness_probe, odometer_endo


@contextlib.contextmanager
def criterion(key, title, limit=None):
    info = {}
    t0 = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        dt = time.perf_counter() - t0
        if ok and limit is not None and dt >= limit:
            ok = False
            info["detail"] = f"took {dt:.2f}s, limit {limit}s"
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {title} ({dt:.2f}s) {info.get('detail', '')}"
        ACCEPTANCE[key] = line.rstrip()
        print(line)
    assert ok


def test_c1_bn_order_relations():
    with criterion(1, "B_n generators have order exactly 2", 5) as info:
        count = 0
        for n in (3, 4, 5, 6):
            A = make_bn(n)
            for g in A.states():
                r = A.is_trivial(g)
                assert isinstance(r, NontrivialAtDepth) and r.depth <= n
                assert A.is_trivial(g * g) == Trivial()
                count += 1
        info["detail"] = f"{count} generators"


def test_c2_desk_scale_freeness():
    with criterion(2, "no relation of length <= 6 among x1..x4 of B_5", 60) as info:
        A = make_bn(5)
        xs = [x.letters for x in derived_free_generators(5, A)]
        bad, total = [], 0
        for w in reduced_words(4, 6):
            word = free_mul(*[xs[s - 1] if s > 0 else free_inv(xs[-s - 1]) for s in w])
            total += 1
            if not isinstance(A.is_trivial(word), NontrivialAtDepth):
                bad.append(w)
        assert total == 156864 and not bad
        info["detail"] = f"{total} words, 0 exceptions"


def _mm(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def _matrix(g):
    # x^a y^b z^c as unitriangular matrices; x^-1 y^-1 x y is the elementary E13
    a, b, c = g.a, g.b, g.c
    return ((1, a, a * b + c), (0, 1, b), (0, 0, 1))


def test_matrix_oracle_commutator():
    X, Y = _matrix(HeisElem(1, 0, 0)), _matrix(HeisElem(0, 1, 0))
    Xi, Yi = _matrix(HeisElem(-1, 0, 0)), _matrix(HeisElem(0, -1, 0))
    assert _mm(_mm(Xi, Yi), _mm(X, Y)) == _matrix(HeisElem(0, 0, 1))


def test_c3_heisenberg_oracle():
    with criterion(3, "Heisenberg arithmetic agrees with the matrix oracle", 10) as info:
        box = [HeisElem(*v) for v in itertools.product(range(-3, 4), repeat=3)]
        mats = {g: _matrix(g) for g in box}
        for g, h in itertools.product(box, repeat=2):
            assert _matrix(g * h) == _mm(mats[g], mats[h])
        rnd = random.Random(0)
        for _ in range(10 ** 4):
            g, h, k = rnd.choice(box), rnd.choice(box), rnd.choice(box)
            assert (g * h) * k == g * (h * k)
        pw = 0
        for g in box[::7]:
            acc = HeisElem()
            for n in range(51):
                assert g ** n == acc
                acc = acc * g
                pw += 1
        info["detail"] = f"{len(box) ** 2} pairs, 10000 triples, {pw} powers"


@pytest.mark.parametrize("A", [((2, 0), (0, 3)), ((1, 1), (0, 2)), ((3, 1), (1, 2))])
def test_c4_heis_hnn_pipeline(A):
    key = 4
    t0 = time.perf_counter()
    S = build_heis_hnn(HeisEndo(A, (0, 0)))
    dt = time.perf_counter() - t0
    c3 = S.claim3
    ok = (all(r.passed for r in S.reports) and isinstance(c3.alpha0, int)
          and isinstance(c3.beta0, int) and not c3.checks.get("rational_u") and dt < 30)
    prev = ACCEPTANCE.get(key)
    tag = f"A={[list(r) for r in A]} p={S.claim1.p} a0={c3.alpha0} b0={c3.beta0}"
    failed = not ok or (prev is not None and prev.startswith("[FAIL"))
    details = (prev.split(") ", 1)[1] + "; " if prev and ") " in prev else "") + tag
    ACCEPTANCE[key] = (f"[{'FAIL' if failed else 'PASS'}] criterion 4: HNN pipeline verified "
                       f"with integral alpha0, beta0 (max {dt:.2f}s) {details}")
    print(ACCEPTANCE[key])
    assert ok


def test_c5_hnn_probe():
    with criterion(5, "compiled HNN action has no short kernel word", 120) as info:
        S = build_heis_hnn(HeisEndo(((2, 0), (0, 3))))
        G = S.group
        g = G.generators()
        res = faithfulness_probe(S, 3, 3, gens=[g["x"], g["y"], g["t"]])
        assert isinstance(res, NoKernelWitness)
        info["detail"] = f"{res.words_checked} elements to depth 3"


def test_c6_odometer():
    with criterion(6, "odometer is transitive on every level up to 10", 5) as info:
        system = EndoSystem([odometer_endo()])
        system.verify()
        assert system.verified
        C = CompiledAutomaton(system)
        a = system.group.generators()["a"]
        for d in range(1, 11):
            v0 = (0,) * d
            orbit, v = {v0}, C.act(a, v0)
            while v != v0:
                orbit.add(v)
                v = C.act(a, v)
            assert len(orbit) == 2 ** d
        info["detail"] = "1024 vertices at depth 10"


def test_c7_split1_two_orbits():
    with criterion(7, "split1 on Z^2 x| F_2 has two level-1 orbits") as info:
        S = build_split1(2, [((0, 1), (1, 0)), ((1, 1), (0, 1))])
        C = CompiledAutomaton(S)
        orbits = C.level_orbits(list(S.group.generators().values()))
        sizes = sorted(len(o) for o in orbits)
        assert len(orbits) == 2 and sizes == sorted(f.index for f in S.endos)
        res = faithfulness_probe(C, 3, 3)
        assert isinstance(res, NoKernelWitness)
        info["detail"] = f"orbit sizes {sizes}, probe clean on {res.words_checked} elements"


def _c8_pairs():
    return [(n, m) for n, m in itertools.product(range(-6, 7), repeat=2)
            if abs(n) >= 2 and abs(m) >= 2 and n != m]


def test_c8_certificate_checker():
    with criterion(8, "BS(n,n) certificates pass; BS(n,m), m != +-n, all fail", 5) as info:
        for n in range(2, 7):
            assert certificate_verify(bs_loop(n, n)).passed
        pairs = [(n, m) for n, m in _c8_pairs() if m != -n]
        assert all(bs_candidates_fail(n, m) for n, m in pairs)
        info["detail"] = f"{len(pairs)} pairs fail; m = -n handled separately"


@pytest.mark.xfail(strict=True, reason="BS(n,-n) has the valid certificate theta = -1")
def test_c8_literal_including_m_equals_minus_n():
    passing = [(n, m) for n, m in _c8_pairs() if not bs_candidates_fail(n, m)]
    assert all(m == -n for n, m in passing) and len(passing) == 10
    sub = "PASS" if ACCEPTANCE.get(8, "").startswith("[PASS") else "FAIL"
    ACCEPTANCE[8] = ("[FAIL] criterion 8: literal statement does not hold; "
                     f"{len(passing)} pairs with m = -n certify via theta = -1 (expected, xfail); "
                     f"BS(n,n) passing and m != +-n failing: {sub}")
    print(ACCEPTANCE[8])
    assert not passing


def test_c9_reduction_pipeline():
    with criterion(9, "BS(n,n) reduces to H = nZ and feeds split1") as info:
        for n in range(2, 7):
            data = reduce_to_semidirect(bs_loop(n, n))
            assert data.s == n and data.H.basis == ((n,),)
            assert all(data.checks.values())
            S = build_split1(data.n, data.action)
            assert S.verified
        info["detail"] = "n = 2..6"


def test_c10_linearization():
    with criterion(10, "three linear fixtures verify with the expected dimensions", 10) as info:
        uni = linearize_semidirect(2, [((1, 1), (0, 1))])
        assert uni.verify() and uni.dim == 2 + 2 + 1
        E = ((2, 0), (0, 2))
        two = Certificate(2, ["v"], [Edge("e1", "v", "v", E, ((0, 2), (2, 0))),
                                     Edge("e2", "v", "v", E, E)],
                          [], {"v": ((1, 0), (0, 1))}, {"e1": ((0, 1), (1, 0)), "e2": ((1, 0), (0, 1))})
        rep = linearize(reduce_to_semidirect(two))
        assert rep.verify() and rep.dim == rep.meta["index"] * (2 + 2 + 1) == 20
        bs = linearize_abelian_hnn([[2]])
        assert bs.verify() and bs.ring == "Q" and bs.dim == 2
        info["detail"] = f"dims {uni.dim}, {rep.dim}, {bs.dim}"
