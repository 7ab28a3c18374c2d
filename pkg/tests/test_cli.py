import json

import pytest

from convnec.cli import main
from convnec.formats import parse_generator
from convnec.galois import make_field


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_transfer(capsys):
    code, out, _ = run(capsys, "transfer", "builtin:butterfly")
    assert code == 0
    assert "M_T = [[1, 1], [0, 1]]" in out


def test_transfer_json_4c2(capsys):
    code, out, _ = run(capsys, "transfer", "builtin:4c2", "--format", "json")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and [r["sink"] for r in recs] == ["T1", "T2", "T3", "T4", "T5", "T6"]
    assert recs[5]["M_T"] == [[1, 1], [1, 2]]


def test_transfer_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.net"
    bad.write_text("field 2\ninputs 1\nsource s\nsinks T\nedge 2 s T\n")
    code, _, err = run(capsys, "transfer", str(bad))
    assert code == 2 and "line 5" in err


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "transfer", str(tmp_path / "none.net"))
    assert code == 2


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "1+z^2, 1+z+z^2", "--format", "json")
    rec = json.loads(out)
    assert code == 0
    assert (rec["dfree"], rec["tdfree"], rec["degree"], rec["singleton_bound"]) == (5, 6, 2, 6)
    code, out, _ = run(capsys, "analyze", "1+z^2, 2z", "--field", "3", "--format", "json")
    assert (json.loads(out)["dfree"], json.loads(out)["tdfree"]) == (3, 4)
    code, out, _ = run(capsys, "analyze", "1+z, 1+z^2")
    assert code == 0 and "catastrophic    yes" in out and "dfree" not in out


def test_analyze_bad_input(capsys):
    assert run(capsys, "analyze", "1+3z, 1", "--field", "3")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "1, z", "--field", "6"])
    assert exc.value.code == 2


TABLE_CS = """\
Sink  Output code          dfree,T_dfree  Decoding
----  -------------------  -------------  --------------
T1    [1+z^2, 2+z+2z^2]    5,6            Output trellis
T2    [2+z+2z^2, 1+z+z^2]  6,6            Output trellis
"""


def test_construct_tables(capsys):
    code, out, _ = run(capsys, "construct", "builtin:butterfly-f3", "--code", "1+z^2, 1+z+z^2")
    assert code == 0 and out.endswith(TABLE_CS)
    _, again, _ = run(capsys, "construct", "builtin:butterfly-f3", "--code", "1+z^2, 1+z+z^2")
    assert again == out
    _, out, _ = run(capsys, "construct", "builtin:butterfly-f3", "--code", "1+z^2, 1+z+2z^2")
    assert "T1    [1+z^2, 2+z]     4,3            Input trellis" in out
    assert "T2    [2+z, 1+z+2z^2]  5,5            Output trellis" in out


def test_construct_4c2_json(capsys):
    code, out, _ = run(capsys, "construct", "builtin:4c2", "--phi", "upto-2-edges",
                       "--code", "1+z^2, 1+z+z^2", "--format", "json")
    rec = json.loads(out)
    assert code == 0
    rows = [(s["sink"], s["output_code"], s["dfree"], s["tdfree"], s["decoding"]) for s in rec["sinks"]]
    assert rows == [
        ("T1", "[1+z^2, 1+z+z^2]", 5, 6, "Output trellis"),
        ("T2", "[1+z^2, 2+z+2z^2]", 5, 6, "Output trellis"),
        ("T3", "[1+z^2, 2z]", 3, 4, "Input trellis"),
        ("T4", "[1+z+z^2, 2+z+2z^2]", 6, 6, "Output trellis"),
        ("T5", "[1+z+z^2, 2z]", 4, 5, "Input trellis"),
        ("T6", "[2+z+2z^2, 2z]", 4, 5, "Input trellis"),
    ]


def test_construct_search_and_write(capsys, tmp_path):
    path = tmp_path / "code.txt"
    code, out, _ = run(capsys, "construct", "builtin:butterfly", "--write-code", str(path))
    assert code == 0 and "Input trellis" in out
    g = parse_generator(path.read_text(), make_field(2))
    assert str(g) == "[1+z^2, 1+z+z^2]"
    code, out2, _ = run(capsys, "construct", "builtin:butterfly", "--code", str(path))
    assert out2 == out


def test_construct_domain_error(capsys):
    code, _, err = run(capsys, "construct", "builtin:butterfly-f3", "--code", "1+z^2, 2z")
    assert code == 1 and "dfree" in err


def test_field_override(capsys):
    code, out, _ = run(capsys, "transfer", "builtin:butterfly", "--field", "3")
    assert code == 0 and "M_T^-1 = [[1, 2], [0, 1]]" in out


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "builtin:butterfly", "--trials", "10", "--length", "12",
                       "--format", "json")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and all(r["failures"] == 0 and r["trials"] == 10 for r in recs)
    code, out, _ = run(capsys, "simulate", "builtin:butterfly", "--exhaustive", "single",
                       "--messages", "2", "--length", "6")
    assert code == 0 and "single simulation" in out


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "2", "--k", "1", "--delta", "2", "--sinks", "2",
                       "--dfree", "5", "--J", "2", "--edges", "9", "--t", "1", "--format", "json")
    rec = json.loads(out)
    assert code == 0
    assert (rec["singleton"], rec["field_size"], rec["tdfree_cap"], rec["tdfree_mds_cap"]) == (6, 11, 9, 11)
    assert rec["bnecc_field_bound"] == 306
    assert run(capsys, "bounds", "--n", "2", "--k", "2", "--delta", "2", "--sinks", "2")[0] == 2
    assert run(capsys, "bounds", "--n", "2", "--k", "1", "--delta", "2", "--sinks", "2", "--J", "2")[0] == 2


def test_no_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
