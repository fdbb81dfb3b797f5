"""Command line front end: ``ssg <verb> [flags]``.

Exit codes: 0 success, 2 validation failure, 3 verification failure,
4 budget exceeded.  ``--json`` prints one JSON document on stdout; progress
goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import warnings

from . import serialize
from .errors import SSGError, ValidationError

VERBS = ("build-bn", "derive-free", "heis-hnn", "heis-semidirect", "split1", "abelian-hnn",
         "certificate", "compile", "act", "portrait", "probe", "verify", "linearize", "export")


def _json_arg(s):
    """Inline JSON or a path to a JSON file."""
    if s is None:
        return None
    if os.path.exists(s):
        with open(s) as fh:
            return json.load(fh)
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not a JSON document or file: {s!r}") from exc


def _emit(args, doc):
    if getattr(args, "emit", None):
        with open(args.emit, "w") as fh:
            fh.write(serialize.dumps(doc) + "\n")


def _load_automaton(args):
    from .automata import WreathAutomaton

    obj = serialize.load(_json_arg(args.automaton))
    if not isinstance(obj, WreathAutomaton):
        raise ValidationError("--automaton must name an automaton document")
    return obj


def _load_system(args):
    from .virtual import EndoSystem

    obj = serialize.load(_json_arg(args.system))
    if not isinstance(obj, EndoSystem):
        raise ValidationError("--system must name an endo-system document or recipe")
    return obj


def _probe(args, system, gens=None):
    from .virtual import CompiledAutomaton, faithfulness_probe

    comp = CompiledAutomaton(system)
    if getattr(args, "sample", None):
        return _sampled_probe(comp, args.probe_len, args.probe_depth, args.sample, args.seed, gens)
    return faithfulness_probe(comp, args.probe_len, args.probe_depth, gens=gens,
                              threads=args.threads, progress=not args.quiet)


def _sampled_probe(comp, word_len, depth, count, seed, gens=None):
    from .virtual import KernelWitness, NoKernelWitness

    rng = random.Random(seed)
    G = comp.group
    gens = list(gens if gens is not None else G.generators().values())
    r = len(gens)
    checked = 0
    for _ in range(count):
        w = []
        for _ in range(rng.randint(1, word_len)):
            s = rng.choice([k for k in range(-r, r + 1) if k and (not w or k != -w[-1])])
            w.append(s)
        g = G.word_value(tuple(w), gens)
        if g.is_identity():
            continue
        checked += 1
        if comp.trivial_to_depth(g, depth):
            return KernelWitness(g, tuple(w))
    return NoKernelWitness(word_len, depth, checked)


def _system_output(args, recipe):
    system = serialize.build(recipe)
    doc = serialize.to_json(system)
    _emit(args, doc)
    out = {"system": doc}
    if getattr(args, "probe_len", None) is not None:
        out["probe"] = _probe(args, system).to_json()
    return system, out


def _human_system(system, out):
    lines = [f"construction: {system.meta.get('construction')}",
             f"degree: {system.degree}  orbits: {system.orbit_sizes}"]
    for f in system.endos:
        lines.append(f"  {f.name}: index {f.index}")
        for n, g in zip(f.gen_names(), f.images):
            lines.append(f"    {n} -> {g}")
    for r in system.reports or []:
        lines.append(f"  verify {r.endo}: {'pass' if r.passed else 'FAIL'} ({len(r.checks)} checks)")
    if "probe" in out:
        lines.append(f"probe: {out['probe']}")
    return "\n".join(lines)


# -- verbs -------------------------------------------------------------------

def cmd_build_bn(args):
    from .automata import make_bn

    aut = make_bn(args.n, _json_arg(args.perms))
    doc = serialize.to_json(aut)
    _emit(args, doc)
    text = "\n".join(f"{s['name']} = ({', '.join(s['sections'])}) perm={s['perm']}"
                     for s in doc["states"])
    return doc, text


def cmd_derive_free(args):
    from .automata import Trivial, derived_free_generators, make_bn
    from .freegroup import reduced_words

    aut = make_bn(args.n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore" if args.quiet else "default")
        gens = derived_free_generators(args.n, aut)
    words = [aut.word_name(aut.encode(g)) for g in gens]
    system, out = _system_output(args, {"builder": "free", "rank": args.n - 1})
    out["generators"] = {f"x{i + 1}": w for i, w in enumerate(words)}
    if args.check_len:
        enc = [aut.encode(g) for g in gens]
        bad, total = [], 0
        for w in reduced_words(len(enc), args.check_len):
            total += 1
            word = ()
            for s in w:
                word = word + (enc[s - 1] if s > 0 else tuple(-x for x in reversed(enc[-s - 1])))
            if isinstance(aut.is_trivial(word), Trivial):
                bad.append(list(w))
        out["freeness"] = {"max_len": args.check_len, "words": total, "trivial": bad}
    text = "\n".join(f"{k} = {v}" for k, v in out["generators"].items())
    if "freeness" in out:
        text += f"\nfreeness to length {args.check_len}: {out['freeness']['words']} words, " \
                f"{len(out['freeness']['trivial'])} trivial"
    return out, text + "\n" + _human_system(system, out)


def cmd_heis_hnn(args):
    recipe = {"builder": "heis-hnn", "endo": _json_arg(args.endo), "max_retries": args.max_retries}
    system, out = _system_output(args, recipe)
    c1 = system.meta.get("claim1", {})
    c3 = system.meta.get("claim3", {})
    text = _human_system(system, out) + f"\np = {c1.get('p')}  alpha0 = {c3.get('alpha0')}" \
                                        f"  beta0 = {c3.get('beta0')}"
    return out, text


def cmd_heis_semidirect(args):
    recipe = {"builder": "heis-semidirect", "action": _json_arg(args.action), "p": args.p,
              "with_beta": not args.no_beta}
    system, out = _system_output(args, recipe)
    return out, _human_system(system, out)


def cmd_split1(args):
    recipe = {"builder": "split1", "rank": args.rank, "action": _json_arg(args.action)}
    system, out = _system_output(args, recipe)
    return out, _human_system(system, out)


def cmd_abelian_hnn(args):
    recipe = {"builder": "abelian-hnn", "M": _json_arg(args.M), "q": args.q}
    system, out = _system_output(args, recipe)
    return out, _human_system(system, out)


def cmd_certificate(args):
    from .certificate import Certificate, certificate_verify, reduce_to_semidirect
    from .errors import VerificationFailed

    cert = Certificate.from_json(_json_arg(args.cert))
    rep = certificate_verify(cert)
    out = {"report": rep.to_json()}
    lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['check']}  {c['detail']}".rstrip()
             for c in rep.checks]
    if args.reduce:
        if not rep.passed:
            raise VerificationFailed(f"certificate fails: {rep.failed()}")
        data = reduce_to_semidirect(cert)
        out["semidirect"] = data.to_json()
        lines.append(f"s = {data.s}, H = {list(map(list, data.H.basis))}, "
                     f"free rank {data.rank}{' (degenerate)' if data.degenerate else ''}")
        if args.build and not data.degenerate:
            recipe = {"builder": "split1", "rank": data.n,
                      "action": [[list(r) for r in M] for M in data.action]}
            out["system"] = serialize.to_json(serialize.build(recipe))
            lines.append(f"split1 orbits: {out['system']['orbit_sizes']}")
    _emit(args, out)
    if not rep.passed:
        # report first, then the verification exit code
        return out, "\n".join(lines), 3
    return out, "\n".join(lines)


def cmd_compile(args):
    from .virtual import CompiledAutomaton

    system = _load_system(args)
    comp = CompiledAutomaton(system)
    gens = list(system.group.generators().values())
    doc = comp.export(gens, args.max_states, args.depth)
    _emit(args, doc)
    text = "\n".join(f"{s['name']}: {s['element']} perm={s['perm']} sections={s['sections']}"
                     for s in doc["states"])
    return doc, text


def _element_and_action(args):
    from .expr import parse_in
    from .virtual import CompiledAutomaton

    if args.automaton:
        aut = _load_automaton(args)
        return aut, aut.encode(args.element), aut.degree
    if args.system:
        system = _load_system(args)
        comp = CompiledAutomaton(system)
        return comp, parse_in(system.group, args.element), comp.degree
    raise ValidationError("pass --automaton or --system")


def _parse_vertex(s, degree):
    from .automata import parse_vertex

    if degree <= 10:
        return parse_vertex(s, degree)
    # large degrees: comma separated letters
    from .errors import BadLetter

    out = []
    for k, part in enumerate(s.split(",") if s else []):
        if not part.strip().isdigit() or int(part) >= degree:
            raise BadLetter(f"letter {part!r} at position {k + 1} is not in 0..{degree - 1}")
        out.append(int(part))
    return tuple(out)


def _vertex_str(v, degree):
    from .automata import vertex_str

    return vertex_str(v) if degree <= 10 else ",".join(map(str, v))


def cmd_act(args):
    obj, g, degree = _element_and_action(args)
    v = _parse_vertex(args.vertex, degree)
    img = obj.act(g, v)
    s = _vertex_str(img, degree)
    return {"element": args.element, "vertex": args.vertex, "image": s}, s


def cmd_portrait(args):
    obj, g, degree = _element_and_action(args)
    p = obj.portrait(g, args.depth)
    if args.dot:
        text = serialize.portrait_dot(p)
        return {"dot": text}, text.rstrip()
    return p.to_json(), json.dumps(p.to_json())


def cmd_probe(args):
    from .expr import parse_in

    system = _load_system(args)
    gens = None
    if args.gens:
        gens = [parse_in(system.group, s.strip()) for s in args.gens.split(",")]
    res = _probe(args, system, gens)
    return res.to_json(), str(res.to_json())


def cmd_verify(args):
    system = _load_system(args)
    reports = system.verify()
    ok = all(r.passed for r in reports)
    out = {"passed": ok, "reports": [r.to_json() for r in reports]}
    lines = []
    for r in reports:
        for c in r.checks:
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {r.endo}: {c.label}")
    if not ok:
        return out, "\n".join(lines), 3
    return out, "\n".join(lines)


def cmd_linearize(args):
    from .certificate import Certificate, reduce_to_semidirect
    from .linear import linearize

    free = _json_arg(args.free_images)
    if args.cert:
        data = reduce_to_semidirect(Certificate.from_json(_json_arg(args.cert)))
    elif args.data:
        data = _json_arg(args.data)
    else:
        raise ValidationError("pass --cert or --data")
    rep = linearize(data, free)
    doc = rep.to_json()
    _emit(args, doc)
    lines = [f"dimension {rep.dim} over {rep.ring}; {len(rep.relations)} relations verified"]
    for n, M in rep.generators.items():
        lines.append(f"{n} = {[list(map(str, r)) for r in M]}")
    return doc, "\n".join(lines)


def cmd_export(args):
    if args.automaton:
        obj = _load_automaton(args)
    elif args.system:
        obj = _load_system(args)
    else:
        raise ValidationError("pass --automaton or --system")
    if args.format == "json":
        if args.system and args.depth is not None:
            from .virtual import CompiledAutomaton

            gens = list(obj.group.generators().values())
            doc = CompiledAutomaton(obj).export(gens, args.max_states, args.depth)
        else:
            doc = serialize.to_json(obj)
        text = serialize.dumps(doc)
    else:
        text = serialize.export_dot(obj, depth=args.depth)
        doc = {"dot": text}
    if args.emit:
        with open(args.emit, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    return doc, text.rstrip()


# -- parser --------------------------------------------------------------------

def _probe_flags(p, default_len=None):
    p.add_argument("--compile", action="store_true", help="compile the tree action")
    p.add_argument("--probe-len", type=int, default=default_len)
    p.add_argument("--probe-depth", type=int, default=3)
    p.add_argument("--sample", type=int, help="random sample of words instead of all")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON on stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--quiet", action="store_true", help="no progress on stderr")
    common.add_argument("--emit", help="write the artifact to this path")

    ap = argparse.ArgumentParser(prog="ssg", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("build-bn", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--perms", help="JSON list of permutations for q1..")
    p.set_defaults(func=cmd_build_bn)

    p = sub.add_parser("derive-free", parents=[common])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--check-len", type=int, default=0)
    _probe_flags(p)
    p.set_defaults(func=cmd_derive_free)

    p = sub.add_parser("heis-hnn", parents=[common])
    p.add_argument("--endo", required=True, help='e.g. {"A":[[2,0],[0,3]],"c":[0,0]}')
    p.add_argument("--max-retries", type=int, default=8)
    _probe_flags(p)
    p.set_defaults(func=cmd_heis_hnn)

    p = sub.add_parser("heis-semidirect", parents=[common])
    p.add_argument("--action", required=True, help="JSON list of {A, c} automorphisms")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--no-beta", action="store_true")
    _probe_flags(p)
    p.set_defaults(func=cmd_heis_semidirect)

    p = sub.add_parser("split1", parents=[common])
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--action", required=True, help="JSON list of GL_n(Z) matrices")
    _probe_flags(p)
    p.set_defaults(func=cmd_split1)

    p = sub.add_parser("abelian-hnn", parents=[common])
    p.add_argument("--M", required=True)
    p.add_argument("--q", type=int, required=True)
    _probe_flags(p)
    p.set_defaults(func=cmd_abelian_hnn)

    p = sub.add_parser("certificate", parents=[common])
    p.add_argument("--cert", required=True)
    p.add_argument("--reduce", action="store_true")
    p.add_argument("--build", action="store_true", help="feed the reduction to split1")
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("compile", parents=[common])
    p.add_argument("--system", required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--max-states", type=int, default=200)
    p.set_defaults(func=cmd_compile)

    for verb, func in (("act", cmd_act), ("portrait", cmd_portrait)):
        p = sub.add_parser(verb, parents=[common])
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--automaton")
        g.add_argument("--system")
        p.add_argument("--element", required=True)
        if verb == "act":
            p.add_argument("--vertex", required=True)
        else:
            p.add_argument("--depth", type=int, default=2)
            p.add_argument("--dot", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("probe", parents=[common])
    p.add_argument("--system", required=True)
    p.add_argument("--gens", help="comma separated generator expressions")
    p.add_argument("--probe-len", type=int, default=3)
    p.add_argument("--probe-depth", type=int, default=3)
    p.add_argument("--sample", type=int)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--system", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("linearize", parents=[common])
    p.add_argument("--cert")
    p.add_argument("--data", help='e.g. {"n":2,"action":[[[1,1],[0,1]]]} or {"kind":"abelian-hnn","M":[[2]]}')
    p.add_argument("--free-images")
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("export", parents=[common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--automaton")
    g.add_argument("--system")
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("--depth", type=int)
    p.add_argument("--max-states", type=int, default=200)
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        res = args.func(args)
    except SSGError as exc:
        err = {"schema": "ssg/1", "error": type(exc).__name__, "message": str(exc),
               "exit_code": exc.exit_code}
        if args.json:
            print(json.dumps(err))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    code = 0
    if len(res) == 3:
        doc, text, code = res
    else:
        doc, text = res
    if args.json:
        print(serialize.dumps(doc))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
