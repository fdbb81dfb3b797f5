"""Builders for the self-similar structures on the concrete families."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .claim1 import Claim1Solution, solve_claim1
from .errors import (BadPrime, NonIntegralAlphaBeta, NonIntegralGamma, NotApplicable,
                     ValidationError, VerificationFailed)
from .families import AbelianHnn, HnnHeis, SemidirectHeis, SemidirectZn
from .freegroup import CosetTable, free_pow, subgroup_build
from .heisenberg import HeisElem, HeisEndo, standard_lattice
from .linalg import IntLattice
from .numtheory import DEFAULT_PRIME_LIMIT, is_prime
from .subgroups import AbelianHnnSubgroup, HnnSubgroup, SemidirectSubgroup
from .virtual import (EndoSystem, KernelWitness, VirtualEndo, compose_projection,
                      default_free_endo, faithfulness_probe, verify_well_defined)


def _gate(system: EndoSystem) -> EndoSystem:
    reports = system.verify()
    bad = [(r.endo, c.label, c.detail) for r in reports for c in r.failures()]
    if bad:
        raise VerificationFailed(f"emitted endomorphism is not well defined: {bad[:3]}")
    return system


def _odd_prime(p):
    if not is_prime(p) or p == 2:
        raise BadPrime(f"{p} is not an odd prime")


# -- Z^n x| F ---------------------------------------------------------------

def build_split1(rank: int, action, f0: VirtualEndo = None) -> EndoSystem:
    """{beta, mu} on Z^rank x| F: beta kills Z^rank and applies f0, mu halves on 2Z^rank."""
    action = [linalg.mat(M) for M in action]
    fam = SemidirectZn(rank, action)
    if f0 is None:
        f0 = default_free_endo(fam.free.rank)
    beta = compose_projection(f0, fam, name="beta")
    dom = SemidirectSubgroup(fam, IntLattice.scaled(rank, 2))
    gens = fam.generators()
    images = [gens[n] for n in fam.kernel_names] + [gens[n] for n in fam.free.names]

    def halve(g):
        v, w = g.nf
        return fam.elem(tuple(x // 2 for x in v), w)

    mu = VirtualEndo(fam, dom, images, halve, name="mu")
    return _gate(EndoSystem([beta, mu], meta={"construction": "split1", "f0": f0.name}))


# -- Heisenberg x| F -------------------------------------------------------

def heis_gammas(theta: HeisEndo, p: int):
    """gamma_j with f(theta(x_j^p)) = theta(x_j) [theta(x_j), theta(u^-1)] etc.

    gamma_j = det(theta) * ((c_j - a_j b_j (p-1)/2) / p - c_j)
    where theta(x_j) = x^{a_j} y^{b_j} z^{c_j}.
    """
    out = []
    for img in (theta.x_image, theta.y_image):
        a, b, c = img.coords()
        num = c - a * b * (p - 1) // 2
        if num % p:
            raise NonIntegralGamma(f"theta(x_j^p) is not in N1 for {theta}")
        out.append(theta.det * (num // p - c))
    return tuple(out)


def build_heis_semidirect(action, p: int, f0: VirtualEndo = None, with_beta=True,
                          free_names=None) -> EndoSystem:
    """{f, beta} on Heis x| F, with f defined on N1 x| F1, F1 = Stab_F(N1)."""
    _odd_prime(p)
    fam = SemidirectHeis(action, free_names)
    f = _heis_semidirect_f(fam, p)
    endos = [f]
    if with_beta:
        if f0 is None:
            f0 = default_free_endo(fam.free.rank)
        endos.append(compose_projection(f0, fam, name="beta"))
    return _gate(EndoSystem(endos, meta={"construction": "heis-semidirect", "p": p,
                                          **f.meta}))


def _heis_semidirect_f(fam: SemidirectHeis, p: int, name="f") -> VirtualEndo:
    N1 = standard_lattice(p)
    r = fam.free.rank

    def act(L, s):
        # right action L . s = theta_s^-1(L), so the stabilizer is {w : theta_w N1 = N1}
        return L.image(fam.action[-s - 1] if s < 0 else fam.inverse[s - 1])

    table = CosetTable.from_action(r, act, N1)
    dom = SemidirectSubgroup(fam, N1, table)
    images = [fam.elem(HeisElem(1, 0, 0)), fam.elem(HeisElem(0, 1, 0)), fam.elem(HeisElem(0, 0, 1))]
    gammas, us = [], []
    for w in table.schreier_generators():
        th = fam.theta(w)
        g1, g2 = heis_gammas(th, p)
        # u^-1 = x^{-gamma_2} y^{gamma_1}
        uinv = HeisElem(-g2, g1, 0)
        u = uinv.inv()
        # cross-check against f(t) = u' t with [theta(x_j), u'^-1] = z^{e_j}
        uprime = th.apply(u)
        for j, img in enumerate((th.x_image, th.y_image)):
            e = (g1, g2)[j] * th.det
            got = (img.inv() * uprime * img * uprime.inv()).c
            if got != e:
                raise VerificationFailed("u convention mismatch")  # pragma: no cover
        gammas.append((g1, g2))
        us.append(u)
        images.append(fam.elem(fam.k_id(), w) * fam.elem(u))
    meta = {"F1_index": table.index, "F1_basis": [fam.free.to_expr(fam.free.elem(w))
                                                 for w in table.schreier_generators()],
            "gammas": gammas, "u": [list(u.coords()) for u in us]}
    return VirtualEndo(fam, dom, images, name=name, meta=meta)


@dataclass
class FallbackResult:
    endo: VirtualEndo
    used: str
    probe: object
    annotation: str = ""
    primary_probe: object = None

    def to_json(self):
        return {"schema": "ssg/1", "kind": "heis-cyclic", "used": self.used,
                "probe": self.probe.to_json(), "annotation": self.annotation,
                "endo": self.endo.to_json()}


def build_heis_cyclic_fallback(aut: HeisEndo, p: int, probe_len: int = 3,
                               probe_depth: int = 3) -> FallbackResult:
    """Heis x| <t>: the primary f, or f0 on <t1^p, N1> if t1 centralizes N."""
    _odd_prime(p)
    fam = SemidirectHeis([aut])
    f = _heis_semidirect_f(fam, p)
    rep = verify_well_defined(f)
    if not rep.passed:
        raise VerificationFailed("primary endomorphism failed verification")
    res = faithfulness_probe(EndoSystem([f]), probe_len, probe_depth)
    if not isinstance(res, KernelWitness):
        return FallbackResult(f, "primary", res,
                              f"no kernel witness up to length {probe_len}, depth {probe_depth}")
    w1 = f.domain.table.schreier_generators()[0]
    g = res.element
    central = fam.theta(w1) == HeisEndo.identity()
    in_k = g.nf[0].is_identity() and _is_power_of(g.nf[1], w1)
    if not (central and in_k):
        return FallbackResult(f, "primary", res,
                              "kernel witness is not a central power of t1; no fallback applies",
                              res)
    table = subgroup_build([free_pow(w1, p)], 1)
    dom = SemidirectSubgroup(fam, standard_lattice(p), table)
    images = [fam.elem(HeisElem(1, 0, 0)), fam.elem(HeisElem(0, 1, 0)),
              fam.elem(HeisElem(0, 0, 1)), fam.elem(fam.k_id(), w1)]
    f0 = VirtualEndo(fam, dom, images, name="f0", meta={"t1": list(w1)})
    rep0 = verify_well_defined(f0)
    if not rep0.passed:
        raise VerificationFailed("fallback endomorphism failed verification")
    res0 = faithfulness_probe(EndoSystem([f0]), probe_len, probe_depth)
    return FallbackResult(f0, "fallback", res0, f"witness {g} centralizes N", res)


def _is_power_of(w, base):
    if not w:
        return True
    for e in range(-len(w), len(w) + 1):
        if e and free_pow(base, e) == tuple(w):
            return True
    return False


# -- ascending HNN of the Heisenberg group ---------------------------------

@dataclass
class Claim3Data:
    p: int
    gammas: tuple
    z1z2: tuple
    alpha0: object
    beta0: object
    u: HeisElem
    checks: dict = field(default_factory=dict)

    def to_json(self):
        return {"p": self.p, "gammas": [list(r) for r in self.gammas],
                "z1z2": list(self.z1z2), "alpha0": str(self.alpha0), "beta0": str(self.beta0),
                "u": [str(v) for v in self.u.coords()], "checks": self.checks}


def claim3_data(psi: HeisEndo, p: int) -> Claim3Data:
    """gamma_ij, z1, z2, alpha0, beta0 for f(t) = t u on <x^p, y^p, t>."""
    rows = []
    zs = []
    checks = {}
    for img in (psi.x_image, psi.y_image):
        g1, g2, c = img.coords()
        pw = img ** p
        # t(x_1^p) = x_1^{p g1} y_1^{p g2} z^{p^2 g3}
        if pw.c % (p * p):
            raise NonIntegralGamma("t(x_1^p) is not in N1")
        g3 = pw.c // (p * p)
        rows.append((g1, g2, g3))
        zs.append(c)
    d = psi.det
    (g11, g12, g13), (g21, g22, g23) = rows
    h = (p - 1) // 2
    checks["z1_closed_form"] = zs[0] == p * g13 + g11 * g12 * h
    checks["z2_closed_form"] = zs[1] == p * g23 + g21 * g22 * h
    checks["det_eff_divides_(p-1)/2"] = h % abs(d) == 0
    alpha0 = Fraction((1 - p) * g23 - g21 * g22 * h, d)
    beta0 = Fraction(-(1 - p) * g13 + g11 * g12 * h, d)
    checks["alpha0_integral"] = alpha0.denominator == 1
    checks["beta0_integral"] = beta0.denominator == 1
    u = HeisElem(alpha0, beta0, 0)
    # [x_1, u^-1] = z^{-beta0} and [y_1, u^-1] = z^{alpha0}
    ui = u.inv()
    checks["x1_commutator"] = (HeisElem(-1, 0, 0) * u * HeisElem(1, 0, 0) * ui).c == -beta0
    checks["y1_commutator"] = (HeisElem(0, -1, 0) * u * HeisElem(0, 1, 0) * ui).c == alpha0
    return Claim3Data(p, tuple(rows), tuple(zs), _n(alpha0), _n(beta0), u, checks)


def _n(v):
    return int(v) if isinstance(v, Fraction) and v.denominator == 1 else v


def _heis_hnn_endo(G: HnnHeis, p: int, data: Claim3Data, name="f") -> VirtualEndo:
    dom = HnnSubgroup(G, p)
    ft = G.elem(HeisElem(), 1) * G.elem(data.u)
    images = [G.elem(HeisElem(1, 0, 0)), G.elem(HeisElem(0, 1, 0)), ft]
    pp = p * p

    def apply(g):
        h, k = g.nf
        return G.elem(HeisElem(Fraction(h.a, p), Fraction(h.b, p), Fraction(h.c, pp)), 0) * ft ** k

    return VirtualEndo(G, dom, images, apply, name=name)


def build_heis_hnn(phi: HeisEndo, max_retries: int = 8, limit: int = DEFAULT_PRIME_LIMIT,
                   allow_rational_u: bool = True) -> EndoSystem:
    """Transitive self-similar structure on the ascending HNN extension by phi.

    The endomorphism lives on G_K = <x_1, y_1, t^k>, itself the ascending
    HNN extension of N0 by psi = phi^k in the basis (x_1, y_1).  Its
    codomain family is HnnHeis(psi); ``meta['embed']`` maps G_K into G.
    """
    if abs(phi.det) <= 1:
        raise NotApplicable("phi must satisfy |det A| >= 2 (otherwise use the semidirect path)")
    if not phi.is_integral():
        raise ValidationError("phi must be integral")
    tried = []
    last = None
    for attempt in range(max_retries):
        sol = solve_claim1(phi, exclude=tried, limit=limit)
        data = claim3_data(sol.effective, sol.p)
        if data.checks["alpha0_integral"] and data.checks["beta0_integral"]:
            break
        tried.append(sol.p)
        last = (sol, data)
    else:
        if not allow_rational_u:
            raise NonIntegralAlphaBeta(f"alpha0/beta0 non-integral for primes {tried}")
        sol, data = last
        data.checks["rational_u"] = True
    psi = sol.effective
    G = HnnHeis(psi)
    if not G.in_base_closure(data.u):
        raise NonIntegralAlphaBeta("u does not lie in M")
    f = _heis_hnn_endo(G, sol.p, data)
    orig = HnnHeis(phi)

    def embed(g):
        h, j = g.nf
        return orig.elem(sol.embedding.apply(h), j * sol.k)

    meta = {"construction": "heis-hnn", "phi": phi.to_json(), "claim1": sol.to_json(),
            "claim3": data.to_json(), "primes_rejected": tried, "domain_index": f.index}
    system = EndoSystem([f], meta=meta)
    system.claim1 = sol
    system.claim3 = data
    system.embed = embed
    system.ambient = orig
    return _gate(system)


# -- ascending HNN of Z^n ---------------------------------------------------

def build_abelian_hnn(M, q: int) -> EndoSystem:
    """f divides the base part by q on (qB) x| <t>, B the base completion."""
    if not is_prime(q):
        raise BadPrime(f"{q} is not prime")
    fam = AbelianHnn(M)
    if fam.det % q == 0:
        raise BadPrime(f"{q} divides det(M) = {fam.det}")
    dom = AbelianHnnSubgroup(fam, q)
    gens = fam.generators()
    images = [gens[n] for n in fam.kernel_names] + [gens["t"]]

    def divide(g):
        v, k = g.nf
        return fam.elem(tuple(Fraction(x) / q for x in v), k)

    f = VirtualEndo(fam, dom, images, divide, name="f")
    return _gate(EndoSystem([f], meta={"construction": "abelian-hnn", "q": q,
                                       "M": [list(r) for r in fam.M]}))


__all__ = [
    "build_split1", "build_heis_semidirect", "build_heis_cyclic_fallback", "build_heis_hnn",
    "build_abelian_hnn", "claim3_data", "heis_gammas", "Claim3Data", "FallbackResult",
    "Claim1Solution",
]
