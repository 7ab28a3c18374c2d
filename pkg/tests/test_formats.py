import dataclasses

import pytest

from convnec.errors import BadOrdering, ParseError
from convnec.formats import (
    builtin_network,
    format_phi,
    parse_generator,
    parse_network,
    parse_phi,
    resolve_generator,
    resolve_network,
    write_generator,
    write_network,
)
from convnec.galois import make_field
from convnec.network import build_transfer

GOOD = """\
# two-hop line
field 3 1
inputs 1
source s
sinks T
edge 1 s a
edge 2 a T
alpha 1 1 1
beta 1 2 2
eps T 2 1 1
"""


@pytest.mark.parametrize("name", ["butterfly", "butterfly-f3", "4c2"])
def test_network_roundtrip(name):
    spec = builtin_network(name)
    again = parse_network(write_network(spec))
    assert again == spec
    assert write_network(again) == write_network(spec)


def test_parse_small():
    spec = parse_network(GOOD)
    ts = build_transfer(spec)
    assert ts.M_T["T"].tolist() == [[2]]


@pytest.mark.parametrize(
    "text,line",
    [
        (GOOD.replace("edge 2 a T", "edge 3 a T"), 7),
        (GOOD.replace("beta 1 2 2", "beta 1 2 5"), 9),
        (GOOD.replace("alpha 1 1 1", "alpha 1 9 1"), 8),
        (GOOD.replace("inputs 1", "inputs x"), 3),
        (GOOD.replace("field 3 1", "field 4 1"), 2),
        (GOOD + "bogus 1\n", 11),
        (GOOD.replace("eps T 2 1 1", "eps T 2 3 1"), 10),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_network(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_missing_header():
    with pytest.raises(ParseError):
        parse_network(GOOD.replace("source s\n", ""))


def test_ordering_error():
    bad = GOOD.replace("edge 1 s a\nedge 2 a T", "edge 1 a T\nedge 2 s a").replace("alpha 1 1 1", "alpha 1 2 1")
    bad = bad.replace("beta 1 2 2\n", "").replace("eps T 2 1 1", "eps T 1 1 1")
    with pytest.raises(ParseError, match="not earlier in the order"):
        parse_network(bad)
    with pytest.raises(BadOrdering):
        build_transfer(dataclasses.replace(parse_network(GOOD), edges=(("a", "T"), ("s", "a"))))


def test_phi_specs():
    assert len(parse_phi("single-edges", 9)) == 9
    assert len(parse_phi("upto-2-edges", 16)) == 16 + 120
    phi = parse_phi("1,2; 3", 4)
    assert format_phi(phi) == "3;1,2"
    assert parse_phi(format_phi(phi), 4) == phi
    with pytest.raises(ParseError):
        parse_phi("1,x", 4)
    with pytest.raises(ParseError):
        parse_phi("5", 4)


def test_generator_roundtrip(tmp_path):
    f = make_field(3)
    g = parse_generator("# input code\n1+z^2, 1+z+2z^2\n", f)
    text = write_generator(g)
    assert parse_generator(text, f) == g
    path = tmp_path / "g.txt"
    path.write_text(text)
    assert resolve_generator(str(path), f) == g
    assert resolve_generator("1+z^2, 1+z+2z^2", f) == g
    with pytest.raises(ParseError):
        parse_generator("# nothing\n", f)


def test_resolve_network(tmp_path):
    path = tmp_path / "n.net"
    path.write_text(GOOD)
    assert resolve_network(str(path)) == parse_network(GOOD)
    with pytest.raises(KeyError):
        resolve_network("builtin:nope")
