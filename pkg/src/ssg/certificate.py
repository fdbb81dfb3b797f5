"""Residual-finiteness certificates for graphs of groups with vertex groups Z^n.

Vectors are columns.  For an edge e the rows of ``E`` generate G_e inside
G_{o(e)} and the rows of ``Phi`` are their images phi_e(.) in G_{tau(e)}.
The certificate supplies n x n integer matrices rho_v (G_v -> K = Z^n) and
theta_e (automorphisms of K) and must satisfy

    theta_e rho_{o(e)} g = rho_{tau(e)} phi_e(g)   for g a row of E.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from . import linalg
from .errors import ValidationError, VerificationFailed
from .linalg import IntLattice


@dataclass
class Edge:
    name: str
    o: str
    t: str
    E: tuple
    Phi: tuple


@dataclass
class Certificate:
    n: int
    vertices: list
    edges: list
    tree: list
    rho: dict
    theta: dict

    @classmethod
    def from_json(cls, obj) -> Certificate:
        try:
            n = int(obj["n"])
            edges = [Edge(e["name"], e["o"], e["t"], linalg.mat(e["E"]), linalg.mat(e["Phi"]))
                     for e in obj["edges"]]
            return cls(n, list(obj["vertices"]), edges, list(obj.get("tree", [])),
                       {v: linalg.mat(m) for v, m in obj["rho"].items()},
                       {e: linalg.mat(m) for e, m in obj["theta"].items()})
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed certificate: {exc}") from exc

    def to_json(self):
        return {"schema": "ssg/1", "kind": "certificate", "n": self.n, "vertices": self.vertices,
                "edges": [{"name": e.name, "o": e.o, "t": e.t, "E": [list(r) for r in e.E],
                           "Phi": [list(r) for r in e.Phi]} for e in self.edges],
                "tree": self.tree,
                "rho": {v: [list(r) for r in m] for v, m in self.rho.items()},
                "theta": {e: [list(r) for r in m] for e, m in self.theta.items()}}

    def edge(self, name) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise ValidationError(f"unknown edge {name}")


@dataclass
class CertificateReport:
    checks: list = field(default_factory=list)

    def add(self, label, ok, detail=""):
        self.checks.append({"check": label, "passed": bool(ok), "detail": detail})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def failed(self):
        return [c["check"] for c in self.checks if not c["passed"]]

    def to_json(self):
        return {"schema": "ssg/1", "kind": "certificate-report", "passed": self.passed,
                "checks": self.checks}


def _connected(vertices, edges):
    if not vertices:
        return False
    adj = {v: set() for v in vertices}
    for e in edges:
        if e.o not in adj or e.t not in adj:
            return False
        adj[e.o].add(e.t)
        adj[e.t].add(e.o)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


def _is_spanning_tree(cert):
    tr = [cert.edge(n) for n in cert.tree]
    return len(tr) == len(cert.vertices) - 1 and _connected(cert.vertices, tr)


def certificate_verify(cert: Certificate) -> CertificateReport:
    rep = CertificateReport()
    n = cert.n
    rep.add("connected", _connected(cert.vertices, cert.edges))
    try:
        rep.add("spanning_tree", _is_spanning_tree(cert))
    except ValidationError as exc:
        rep.add("spanning_tree", False, str(exc))
    names = {e.name for e in cert.edges}
    for e in cert.edges:
        ok_shape = len(e.E) == n and len(e.Phi) == n and all(len(r) == n for r in e.E + e.Phi)
        if not ok_shape:
            rep.add(f"{e.name}: shape", False, "E and Phi must be n x n")
            continue
        dE, dP = linalg.det(e.E), linalg.det(e.Phi)
        rep.add(f"{e.name}: finite index in G_o", dE != 0, f"det E = {dE}")
        rep.add(f"{e.name}: finite index in G_tau", dP != 0, f"det Phi = {dP}")
        rep.add(f"{e.name}: proper in G_o", abs(dE) > 1, f"index {abs(dE)}")
        rep.add(f"{e.name}: proper in G_tau", abs(dP) > 1, f"index {abs(dP)}")
    for v in cert.vertices:
        R = cert.rho.get(v)
        if R is None:
            rep.add(f"rho_{v}: present", False)
            continue
        d = linalg.det(R)
        rep.add(f"rho_{v}: injective with finite-index image", d != 0 and linalg.is_integral(R),
                f"det = {d}")
    for e in cert.edges:
        T = cert.theta.get(e.name)
        if T is None:
            rep.add(f"theta_{e.name}: present", False)
            continue
        d = linalg.det(T)
        rep.add(f"theta_{e.name}: automorphism", abs(d) == 1 and linalg.is_integral(T),
                f"det = {d}")
        Ro, Rt = cert.rho.get(e.o), cert.rho.get(e.t)
        if Ro is None or Rt is None:
            continue
        ok = True
        bad = ""
        for g, h in zip(e.E, e.Phi):
            lhs = linalg.mat_vec(T, linalg.mat_vec(Ro, g))
            rhs = linalg.mat_vec(Rt, h)
            if lhs != rhs:
                ok = False
                bad = f"{lhs} != {rhs} on generator {list(g)}"
                break
        rep.add(f"{e.name}: intertwining", ok, bad)
    extra = set(cert.theta) - names
    if extra:
        rep.add("theta keys", False, f"unknown edges {sorted(extra)}")
    return rep


@dataclass
class SemidirectData:
    """H x| F with H = sK, F free on the non-tree edges, acting by theta_e."""

    n: int
    s: int
    D: IntLattice
    H: IntLattice
    free_edges: list
    action: list
    degenerate: bool
    checks: dict = field(default_factory=dict)

    @property
    def rank(self):
        return len(self.free_edges)

    @property
    def index_in_K(self):
        return self.H.index

    def to_json(self):
        return {"schema": "ssg/1", "kind": "semidirect-data", "n": self.n, "s": self.s,
                "D": self.D.to_json(), "H": self.H.to_json(), "free_edges": self.free_edges,
                "action": [[list(r) for r in M] for M in self.action],
                "degenerate": self.degenerate, "checks": self.checks}

    def to_split1(self, f0=None):
        from .constructions import build_split1

        if self.degenerate:
            raise ValidationError("free part is trivial; split1 needs rank >= 1")
        return build_split1(self.n, self.action, f0)


def reduce_to_semidirect(cert: Certificate) -> SemidirectData:
    rep = certificate_verify(cert)
    if not rep.passed:
        raise VerificationFailed(f"certificate fails: {rep.failed()}")
    n = cert.n
    D = None
    for e in cert.edges:
        img = IntLattice.from_generators([linalg.mat_vec(cert.rho[e.o], g) for g in e.E], n)
        D = img if D is None else D.intersect(img)
    # minimal s with s Z^n inside D: the exponent of Z^n / D
    s = 1
    for k in range(1, D.index + 1):
        if D.index % k == 0 and all(D.contains(tuple(k if i == j else 0 for j in range(n)))
                                    for i in range(n)):
            s = k
            break
    H = IntLattice.scaled(n, s)
    tree = set(cert.tree)
    free_edges = [e.name for e in cert.edges if e.name not in tree]
    action = [cert.theta[name] for name in free_edges]
    checks = {"H_in_D": D.contains_lattice(H)}
    for name in cert.theta:
        checks[f"theta_{name}(H) = H"] = H.image(cert.theta[name]) == H
    if not all(checks.values()):
        raise VerificationFailed(f"reduction checks failed: {checks}")  # pragma: no cover
    return SemidirectData(n, s, D, H, free_edges, action, not free_edges, checks)


def bs_loop(n: int, m: int, theta: int = 1, rho: int = 1) -> Certificate:
    """One vertex Z, one loop edge with G_e = nZ and phi_e(n) = m."""
    return Certificate(1, ["v"], [Edge("e", "v", "v", ((n,),), ((m,),))], [],
                       {"v": ((rho,),)}, {"e": ((theta,),)})


def bs_candidates_fail(n: int, m: int, rho_range=range(-6, 7)) -> bool:
    """True iff no loop certificate over K = Z (theta = +-1, rho nonzero) passes."""
    for theta in (1, -1):
        for rho in rho_range:
            if rho == 0:
                continue
            if certificate_verify(bs_loop(n, m, theta, rho)).passed:
                return False
    return True
