import json
import random
import re

import pytest

from ssg import serialize
from ssg.automata import make_bn, odometer
from ssg.certificate import bs_loop
from ssg.cli import main
from ssg.errors import ClosureBudgetExceeded, ValidationError
from ssg.linear import linearize_abelian_hnn, linearize_semidirect
from ssg.virtual import EndoSystem, odometer_endo

RECIPES = [
    {"builder": "split1", "rank": 2, "action": [[[0, 1], [1, 0]], [[1, 1], [0, 1]]]},
    {"builder": "heis-hnn", "endo": {"A": [[2, 0], [0, 3]], "c": [0, 0]}},
    {"builder": "abelian-hnn", "M": [[2]], "q": 3},
    {"builder": "odometer"},
    {"builder": "heis-semidirect", "action": [{"A": [[0, 1], [1, 0]], "c": [0, 0]}], "p": 3},
]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- round trips ----------------------------------------------------------------

@pytest.mark.parametrize("recipe", RECIPES, ids=[r["builder"] for r in RECIPES])
def test_system_roundtrip(recipe):
    system = serialize.build(recipe)
    doc = serialize.to_json(system)
    again = serialize.load(json.loads(serialize.dumps(doc)))
    assert serialize.to_json(again) == doc
    assert again.orbit_sizes == system.orbit_sizes


def test_system_without_recipe_is_rejected():
    with pytest.raises(ValidationError):
        serialize.to_json(EndoSystem([odometer_endo()]))
    doc = serialize.to_json(serialize.build({"builder": "odometer"}))
    doc["degree"] = 5
    with pytest.raises(ValidationError):
        serialize.load(doc)


def test_other_roundtrips(tmp_path):
    for aut in (make_bn(3), make_bn(6, [True, False])):
        assert serialize.load(serialize.dumps(serialize.to_json(aut))) == aut
    cert = bs_loop(4, 4)
    assert serialize.load(serialize.to_json(cert)).to_json() == cert.to_json()
    for rep in (linearize_abelian_hnn([[2, 1], [0, 3]]), linearize_semidirect(2, [((1, 1), (0, 1))])):
        back = serialize.load(serialize.dumps(serialize.to_json(rep)))
        assert back.to_json() == rep.to_json() and back.verify()
    path = tmp_path / "b4.json"
    serialize.save_file(path, make_bn(4))
    assert serialize.load_file(path) == make_bn(4)
    with pytest.raises(ValidationError):
        serialize.load({"schema": "other/9", "kind": "automaton"})


# -- DOT ------------------------------------------------------------------------

def test_dot_b3():
    text = serialize.export_dot(make_bn(3))
    assert text.startswith("digraph automaton {")
    assert len(re.findall(r"^\s+n\d+ \[label=", text, re.M)) == 3
    assert '"c | (0 1)"' in text and '"a | ()"' in text
    assert serialize.export_dot(make_bn(3)) == text


def test_dot_portraits():
    A = make_bn(3)
    text = serialize.export_dot(A.portrait(A.state("c"), 2))
    assert len(re.findall(r"^\s+v\d+ \[", text, re.M)) == 7
    assert len(re.findall(r"->", text)) == 6
    one = serialize.export_dot(A.portrait((), 0))
    assert len(re.findall(r"^\s+v\d+ \[", one, re.M)) == 1 and "->" not in one


def test_dot_lazy_needs_bound():
    system = serialize.build({"builder": "odometer"})
    with pytest.raises(ClosureBudgetExceeded):
        serialize.export_dot(system)
    assert serialize.export_dot(system, depth=2).startswith("digraph compiled")


# -- CLI ------------------------------------------------------------------------

def test_cli_build_bn_emit(capsys, tmp_path):
    path = tmp_path / "b5.json"
    code, out, _ = run(capsys, "build-bn", "--n", "5", "--emit", str(path))
    assert code == 0 and "q1 = (d, d)" in out
    assert serialize.load_file(path) == make_bn(5)
    code, out, _ = run(capsys, "act", "--automaton", str(path), "--element", "a*b",
                       "--vertex", "01101")
    assert code == 0
    assert out.strip() == "".join(map(str, make_bn(5).act("a*b", (0, 1, 1, 0, 1))))


def test_cli_heis_hnn_probe(capsys):
    code, out, _ = run(capsys, "heis-hnn", "--endo", '{"A":[[2,0],[0,3]],"c":[0,0]}',
                       "--compile", "--probe-len", "3", "--probe-depth", "3", "--json", "--quiet")
    assert code == 0
    doc = json.loads(out)
    assert doc["probe"]["verdict"] == "NoKernelWitness"
    assert doc["system"]["kind"] == "endo-system"


def test_cli_exit_codes(capsys):
    code, out, _ = run(capsys, "heis-hnn", "--endo", '{"A":[[1,0],[0,1]]}', "--json")
    assert code == 2 and json.loads(out)["error"] == "NotApplicable"
    b3 = serialize.dumps(serialize.to_json(make_bn(3)))
    code, _, err = run(capsys, "act", "--automaton", b3, "--element", "a**b", "--vertex", "0")
    assert code == 2 and "column 3" in err
    code, _, _ = run(capsys, "act", "--automaton", b3, "--element", "a", "--vertex", "012")
    assert code == 2
    cert = serialize.dumps(bs_loop(2, 3).to_json())
    code, out, _ = run(capsys, "certificate", "--cert", cert)
    assert code == 3 and "FAIL  e: intertwining" in out
    code, _, _ = run(capsys, "export", "--system", '{"builder": "odometer"}')
    assert code == 4
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_cli_certificate_reduce_build(capsys):
    cert = serialize.dumps(bs_loop(3, 3).to_json())
    code, out, _ = run(capsys, "certificate", "--cert", cert, "--reduce", "--build", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["semidirect"]["s"] == 3
    assert doc["system"]["orbit_sizes"] == [2, 2]


def test_cli_linearize_and_verify(capsys):
    code, out, _ = run(capsys, "linearize", "--data", '{"kind":"abelian-hnn","M":[[2]]}', "--json")
    assert code == 0 and json.loads(out)["generators"]["t"] == [[2, 0], [0, 1]]
    code, out, _ = run(capsys, "verify", "--system", json.dumps(RECIPES[2]))
    assert code == 0 and "FAIL" not in out


def test_cli_probe_sampled_is_seeded(capsys):
    args = ["probe", "--system", '{"builder": "odometer"}', "--probe-len", "6", "--probe-depth", "8",
            "--sample", "20", "--json"]
    _, a, _ = run(capsys, *args, "--seed", "4")
    _, b, _ = run(capsys, *args, "--seed", "4")
    assert a == b and json.loads(a)["verdict"] == "NoKernelWitness"


def test_cli_act_on_compiled_system(capsys):
    code, out, _ = run(capsys, "act", "--system", '{"builder": "odometer"}', "--element", "a",
                       "--vertex", "1101")
    assert code == 0 and out.strip() == "0011"


def _random_fixture(rnd):
    n = rnd.randint(3, 7)
    perms = [rnd.random() < 0.5 for _ in range(n - 4)] if n > 4 else None
    aut = make_bn(n, perms) if rnd.random() < 0.9 else odometer()
    letters = []
    for _ in range(rnd.randint(1, 6)):
        name = rnd.choice(aut.names)
        e = rnd.choice([1, -1, 2, -3])
        letters.append(f"{name}^{e}" if e != 1 else name)
    v = "".join(rnd.choice("01") for _ in range(rnd.randint(0, 10)))
    return aut, "*".join(letters), v


def test_cli_act_agrees_with_library(capsys):
    rnd = random.Random(2024)
    for _ in range(100):
        aut, expr, v = _random_fixture(rnd)
        doc = serialize.dumps(serialize.to_json(aut))
        code, out, _ = run(capsys, "act", "--automaton", doc, "--element", expr, "--vertex", v,
                           "--json")
        assert code == 0
        expect = "".join(map(str, aut.act(expr, tuple(int(c) for c in v))))
        assert json.loads(out)["image"] == expect
