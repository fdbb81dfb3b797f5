"""JSON and DOT serialization.

Every document carries ``"schema": "ssg/1"`` and a ``kind``.  Endomorphism
systems are stored with the recipe that built them; loading re-runs the
(deterministic) builder and checks that the result serializes identically.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import ClosureBudgetExceeded, ValidationError

SCHEMA = "ssg/1"


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _canon(doc):
    return json.loads(dumps(doc))


# -- automata ----------------------------------------------------------------

def automaton_to_json(aut):
    return {"schema": SCHEMA, "kind": "automaton", **aut.to_json()}


def automaton_from_json(obj):
    from .automata import WreathAutomaton

    return WreathAutomaton.from_json(obj)


# -- builders from recipes ---------------------------------------------------

def _heis_endo(obj):
    from .heisenberg import HeisEndo

    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, dict):
        return HeisEndo.from_json(obj)
    return HeisEndo.from_json({"A": obj})


def build(recipe: dict):
    """Run a builder from a recipe ``{"builder": name, ...args}``."""
    from . import constructions as C
    from .virtual import EndoSystem, default_free_endo, odometer_endo

    name = recipe.get("builder")
    if name == "split1":
        sys_ = C.build_split1(int(recipe["rank"]), recipe["action"])
    elif name == "heis-semidirect":
        sys_ = C.build_heis_semidirect([_heis_endo(a) for a in recipe["action"]], int(recipe["p"]),
                                       with_beta=recipe.get("with_beta", True))
    elif name == "heis-hnn":
        sys_ = C.build_heis_hnn(_heis_endo(recipe["endo"]), int(recipe.get("max_retries", 8)))
    elif name == "abelian-hnn":
        sys_ = C.build_abelian_hnn(recipe["M"], int(recipe["q"]))
    elif name == "odometer":
        sys_ = EndoSystem([odometer_endo()], meta={"construction": "odometer"})
        sys_.verify()
    elif name == "free":
        sys_ = EndoSystem([default_free_endo(int(recipe["rank"]))], meta={"construction": "free"})
        sys_.verify()
    else:
        raise ValidationError(f"unknown builder {name!r}")
    sys_.meta["recipe"] = dict(recipe)
    return sys_


def system_to_json(system):
    doc = system.to_json()
    if "recipe" not in system.meta:
        raise ValidationError("system has no recipe; build it with serialize.build to save it")
    return _canon(doc)


def system_from_json(obj):
    recipe = obj.get("meta", {}).get("recipe")
    if recipe is None:
        raise ValidationError("endo-system document has no recipe")
    system = build(recipe)
    if _canon(system.to_json()) != _canon(obj):
        raise ValidationError("re-built system does not match the stored document")
    return system


# -- generic ------------------------------------------------------------------

def to_json(obj):
    from .automata import WreathAutomaton
    from .virtual import EndoSystem

    if isinstance(obj, WreathAutomaton):
        return automaton_to_json(obj)
    if isinstance(obj, EndoSystem):
        return system_to_json(obj)
    return _canon(obj.to_json())


def load(obj):
    """Inverse of ``to_json`` for every artifact kind with a loader."""
    from .certificate import Certificate

    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise ValidationError(f"unsupported schema {obj.get('schema')!r}")
    kind = obj.get("kind")
    if kind == "automaton" or (kind is None and "states" in obj and "degree" in obj):
        return automaton_from_json(obj)
    if kind == "certificate" or (kind is None and "edges" in obj):
        return Certificate.from_json(obj)
    if kind == "endo-system":
        return system_from_json(obj)
    if kind == "linear-rep":
        return linear_from_json(obj)
    if kind is None and "builder" in obj:
        return build(obj)
    raise ValidationError(f"cannot load document of kind {kind!r}")


def linear_from_json(obj):
    from . import linalg
    from .linear import LinearRep

    names = list(obj["generators"])
    images = [linalg.mat([[Fraction(v) for v in r] for r in obj["generators"][n]]) for n in names]
    rels = [(r["label"], tuple(r["word"])) for r in obj["relations"]]
    return LinearRep(obj["dim"], obj["ring"], names, images, rels, obj.get("meta", {}))


def load_file(path):
    with open(path) as fh:
        return load(json.load(fh))


def save_file(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(to_json(obj)) + "\n")


# -- DOT --------------------------------------------------------------------

def _perm_label(perm):
    if all(p == i for i, p in enumerate(perm)):
        return "()"
    seen, cycles = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j))
            j = perm[j]
        cycles.append("(" + " ".join(cyc) + ")")
    return "".join(cycles)


def _q(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _moore(states, degree, name):
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    idx = {s["name"]: i for i, s in enumerate(states)}
    for s in states:
        lines.append(f"  n{idx[s['name']]} [label={_q(s['name'] + ' | ' + _perm_label(s['perm']))}];")
    for s in states:
        for x, sec in enumerate(s["sections"]):
            if sec in idx:
                lines.append(f"  n{idx[s['name']]} -> n{idx[sec]} [label={_q(x)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj, depth=None, gens=None, max_states=None) -> str:
    """DOT text for a WreathAutomaton (Moore diagram), Portrait, or compiled automaton."""
    from .automata import Portrait, WreathAutomaton
    from .virtual import CompiledAutomaton, EndoSystem

    if isinstance(obj, WreathAutomaton):
        # the trivial state is left implicit, as usual for Moore diagrams
        closure = sorted((w for w in obj.closure(max_states) if w), key=lambda w: (len(w), w))
        states = []
        for w in closure:
            secs = [obj.step(w, x)[1] for x in range(obj.degree)]
            states.append({"name": obj.word_name(w), "perm": list(obj.root_perm(w)),
                           "sections": [obj.word_name(s) if s else "e" for s in secs]})
        return _moore(states, obj.degree, "automaton")
    if isinstance(obj, Portrait):
        return portrait_dot(obj)
    if isinstance(obj, EndoSystem):
        obj = CompiledAutomaton(obj)
    if isinstance(obj, CompiledAutomaton):
        if depth is None and max_states is None:
            raise ClosureBudgetExceeded("compiled automata are lazy; pass a depth bound")
        gens = gens if gens is not None else list(obj.system.group.generators().values())
        doc = obj.export(gens, max_states or 200, depth)
        states = [{"name": s["element"], "perm": s["perm"], "sections": s["sections"]}
                  for s in doc["states"]]
        return _moore(states, obj.degree, "compiled")
    raise ValidationError(f"cannot export {type(obj).__name__} as DOT")


def portrait_dot(p) -> str:
    lines = ["digraph portrait {"]
    counter = [0]

    def walk(node):
        i = counter[0]
        counter[0] += 1
        lines.append(f"  v{i} [label={_q(_perm_label(node.perm))}];")
        for x, c in enumerate(node.children):
            j = walk(c)
            lines.append(f"  v{i} -> v{j} [label={_q(x)}];")
        return i

    walk(p)
    lines.append("}")
    return "\n".join(lines) + "\n"
