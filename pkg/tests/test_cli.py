import os

import pytest

from conftest import FIXTURES
from kgraph import fixtures as fx
from kgraph.cli import main
from kgraph.fileio import load_kgraph
from kgraph.iso import isomorphism_search


def fx_path(name):
    return os.path.join(FIXTURES, name)


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_analyze_o2(capsys):
    code, out, _ = run(capsys, "analyze", fx_path("o2.kg"))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("aperiodicity: HOLDS")
    assert lines[1].startswith("cofinality: HOLDS")
    assert lines[2].startswith("simplicity: HOLDS")
    assert lines[3].startswith("pure infiniteness hypothesis: HOLDS")


def test_analyze_unknown_still_exits_zero(capsys):
    code, out, _ = run(capsys, "analyze", fx_path("t2.kg"))
    assert code == 0 and "UNKNOWN" in out


def test_algebra_eval(capsys):
    code, out, _ = run(capsys, "algebra", fx_path("t2.kg"), "--eval", "s(a)* s(a)")
    assert code == 0 and out.strip() == "1 * s() s()^*"
    code, out, _ = run(capsys, "algebra", fx_path("o2.kg"), "--eval", "s(e)* s(f)")
    assert out.strip() == "0"
    code, _, err = run(capsys, "algebra", fx_path("o2.kg"), "--eval", "s(q)")
    assert code == 2 and "unknown edge" in err


def test_iso(capsys):
    code, out, _ = run(capsys, "iso", fx_path("flip.kg"), fx_path("prod.kg"), "--max-degree", "2,2")
    assert code == 0 and out.startswith("ISOMORPHISM")
    code, out, _ = run(capsys, "iso", fx_path("flip.kg"), fx_path("iota.kg"))
    assert code == 0 and out.startswith("NONE")


def test_check(capsys):
    code, out, _ = run(capsys, "check", fx_path("flip.kg"), "--max-degree", "2,2")
    assert code == 0 and "valid 2-graph" in out and "unique factorization: HOLDS" in out
    code, out, _ = run(capsys, "check", fx_path("o2.kg"), "--cocycle", fx_path("o2_z2.cocycle"))
    assert code == 0 and "squares:" not in out and "cocycle: functorial into Z2" in out
    code, out, _ = run(capsys, "check", fx_path("o2_z2_skew.kg"), "--action", fx_path("o2_z2_skew.action"))
    assert code == 0 and "action: free action" in out


def test_check_invalid_graph(tmp_path, capsys):
    bad = tmp_path / "bad.kg"
    bad.write_text("kgraph 1\nrank 2\nvertex v\nedge 1 a v v\nedge 2 b v v\n")
    code, out, _ = run(capsys, "check", str(bad))
    assert code == 1 and out.startswith("INVALID")
    syn = tmp_path / "syn.kg"
    syn.write_text("kgraph 1\nrank x\n")
    code, _, err = run(capsys, "check", str(syn))
    assert code == 2 and "line 2" in err
    code, _, err = run(capsys, "check", str(tmp_path / "missing.kg"))
    assert code == 2


def test_count_and_matrix(capsys):
    code, out, _ = run(capsys, "count", fx_path("flip.kg"), "--vertex", "v", "--degree", "2,1")
    assert code == 0 and out.strip() == "#Lambda^(2, 1)(v) = 8"
    code, out, _ = run(capsys, "matrix", fx_path("two_cycle.kg"), "--degree", "1")
    assert code == 0
    rows = out.splitlines()
    assert rows[2].split() == ["u", "0", "1"] and rows[3].split() == ["v", "1", "0"]
    code, out, _ = run(capsys, "count", fx_path("flip.kg"), "--degree", "2")
    assert code == 0 and "(2, 2)" in out
    code, _, _ = run(capsys, "count", fx_path("flip.kg"), "--degree", "2,2,2")
    assert code == 2
    code, _, _ = run(capsys, "count", fx_path("flip.kg"), "--degree", "1,1", "--vertex", "w")
    assert code == 2


def test_bratteli_dot(tmp_path, capsys):
    dot = tmp_path / "o2.dot"
    code, out, _ = run(capsys, "bratteli", fx_path("o2.kg"), "--levels", "4", "--dot", str(dot))
    assert code == 0 and "level 4: v:16" in out and "HOLDS" in out
    text = dot.read_text()
    assert '"3:v" -> "4:v" [label="2"];' in text


def test_construct_product_and_pullback(tmp_path, capsys):
    out_file = tmp_path / "p.kg"
    code, out, _ = run(capsys, "construct", "product", fx_path("o2.kg"), fx_path("o2.kg"), "-o", str(out_file))
    assert code == 0 and "wrote" in out
    assert out_file.read_text() == open(fx_path("prod.kg")).read().split("\n", 1)[1]
    code, out, _ = run(capsys, "construct", "pullback", fx_path("o2.kg"), "--map", "1 x 2: 1,1")
    assert code == 0 and out.startswith("kgraph 1\nrank 2")
    code, _, err = run(capsys, "construct", "pullback", fx_path("o2.kg"), "--map", "1x2")
    assert code == 2


def test_construct_assemble(tmp_path, capsys):
    for theta, target in [("flip", "flip.kg"), ("identity", "iota.kg"), (fx_path("flip.theta"), "flip.kg")]:
        f = tmp_path / "a.kg"
        code, _, _ = run(capsys, "construct", "assemble", fx_path("o2.kg"), fx_path("o2.kg"), "--theta", theta, "-o", str(f))
        assert code == 0
        assert isomorphism_search(load_kgraph(str(f)), load_kgraph(fx_path(target))).found


def test_construct_skew_quotient(tmp_path, capsys):
    f = tmp_path / "s.kg"
    code, _, _ = run(capsys, "construct", "skew", fx_path("o2.kg"), "--cocycle", fx_path("o2_z2.cocycle"), "-o", str(f))
    assert code == 0 and f.read_text() == open(fx_path("o2_z2_skew.kg")).read().split("\n", 1)[1]
    code, out, _ = run(capsys, "construct", "quotient", fx_path("o2_z2_skew.kg"), "--action", fx_path("o2_z2_skew.action"))
    assert code == 0 and "# recovered cocycle on the quotient" in out and "# group Z2" in out
    code, _, _ = run(capsys, "construct", "skew", fx_path("o2.kg"))
    assert code == 2


def test_construct_coordinate(capsys):
    code, out, _ = run(capsys, "construct", "coordinate", fx_path("two_vertex.kg"), "--color", "2")
    assert code == 0 and "rank 1" in out


def test_rep_check(capsys):
    code, out, _ = run(capsys, "rep-check", fx_path("o2.kg"), "--depth", "3", "--products", "10")
    assert code == 0 and "all checks pass" in out


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as err:
        main(["nope"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2
