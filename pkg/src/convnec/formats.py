"""Text formats: network description files, error-pattern specs, generator matrices.

Network file (line oriented, ``#`` starts a comment, indices are 1-based)::

    field 2 1
    inputs 2
    source s
    sinks T1 T2
    edge 1 s A
    ...
    alpha <input> <edge> <val>
    beta <edge_i> <edge_j> <val>
    eps <sink> <edge> <col> <val>

Edges must be listed in ancestral order with indices 1, 2, 3, ...  Adjacent
edge pairs without a ``beta`` line get coefficient 1; absent ``alpha`` and
``eps`` coefficients are 0.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from .errors import ParseError
from .galois import FieldSpec, make_field
from .nec import ErrorPatternSet
from .network import NetworkSpec
from .polymat import PolyMatrix, format_poly

_HEADER_KEYS = ("field", "inputs", "source", "sinks")


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None


def parse_network(text: str) -> NetworkSpec:
    header: dict[str, object] = {}
    edges: list[tuple[str, str]] = []
    alpha, beta, eps = {}, {}, {}
    kernel_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0].lower()
        if key == "field":
            if len(tok) not in (2, 3):
                raise ParseError("expected 'field p [m]'", lineno)
            p = _int(tok[1], lineno, "p")
            m = _int(tok[2], lineno, "m") if len(tok) == 3 else 1
            try:
                header["field"] = make_field(p, m)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif key == "inputs":
            if len(tok) != 2:
                raise ParseError("expected 'inputs n'", lineno)
            header["inputs"] = _int(tok[1], lineno, "inputs")
        elif key == "source":
            if len(tok) != 2:
                raise ParseError("expected 'source v'", lineno)
            header["source"] = tok[1]
        elif key == "sinks":
            if len(tok) < 2:
                raise ParseError("expected 'sinks v1 v2 ...'", lineno)
            header["sinks"] = tuple(tok[1:])
        elif key == "edge":
            if len(tok) != 4:
                raise ParseError("expected 'edge <idx> <tail> <head>'", lineno)
            idx = _int(tok[1], lineno, "edge index")
            if idx != len(edges) + 1:
                raise ParseError(f"edge index {idx} out of sequence, expected {len(edges) + 1}", lineno)
            edges.append((tok[2], tok[3]))
        elif key in ("alpha", "beta", "eps"):
            kernel_lines.append((lineno, key, tok))
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", lineno)

    for k in _HEADER_KEYS:
        if k not in header:
            raise ParseError(f"missing '{k}' line")
    field: FieldSpec = header["field"]  # type: ignore[assignment]
    ne = len(edges)

    def edge_ref(tok, lineno):
        e = _int(tok, lineno, "edge index")
        if not 1 <= e <= ne:
            raise ParseError(f"edge index {e} outside 1..{ne}", lineno)
        return e - 1

    def value(tok, lineno):
        v = _int(tok, lineno, "coefficient")
        if not 0 <= v < field.q:
            raise ParseError(f"coefficient {v} is not an element of {field}", lineno)
        return v

    n = header["inputs"]
    for lineno, key, tok in kernel_lines:
        if key == "alpha":
            if len(tok) != 4:
                raise ParseError("expected 'alpha <input> <edge> <val>'", lineno)
            i = _int(tok[1], lineno, "input index")
            if not 1 <= i <= n:
                raise ParseError(f"input index {i} outside 1..{n}", lineno)
            alpha[(i - 1, edge_ref(tok[2], lineno))] = value(tok[3], lineno)
        elif key == "beta":
            if len(tok) != 4:
                raise ParseError("expected 'beta <edge_i> <edge_j> <val>'", lineno)
            beta[(edge_ref(tok[1], lineno), edge_ref(tok[2], lineno))] = value(tok[3], lineno)
        else:
            if len(tok) != 5:
                raise ParseError("expected 'eps <sink> <edge> <col> <val>'", lineno)
            col = _int(tok[3], lineno, "column")
            if not 1 <= col <= n:
                raise ParseError(f"column {col} outside 1..{n}", lineno)
            eps.setdefault(tok[1], {})[(edge_ref(tok[2], lineno), col - 1)] = value(tok[4], lineno)

    spec = NetworkSpec(field, n, tuple(edges), header["source"], header["sinks"], alpha, beta, eps)
    try:
        spec.validate()
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return spec


def write_network(spec: NetworkSpec) -> str:
    f = spec.field
    lines = [
        f"field {f.p} {f.m}",
        f"inputs {spec.num_inputs}",
        f"source {spec.source}",
        "sinks " + " ".join(str(t) for t in spec.sinks),
    ]
    lines += [f"edge {i + 1} {t} {h}" for i, (t, h) in enumerate(spec.edges)]
    lines += [f"alpha {i + 1} {e + 1} {v}" for (i, e), v in sorted(spec.alpha.items())]
    lines += [f"beta {a + 1} {b + 1} {v}" for (a, b), v in sorted(spec.beta.items())]
    for t in spec.sinks:
        for (e, c), v in sorted(spec.eps.get(t, {}).items()):
            lines.append(f"eps {t} {e + 1} {c + 1} {v}")
    return "\n".join(lines) + "\n"


def load_network(path: str | Path) -> NetworkSpec:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def builtin_network(name: str) -> NetworkSpec:
    """Shipped reference networks: ``butterfly``, ``butterfly-f3``, ``4c2``."""
    fname = {"butterfly": "butterfly.net", "butterfly-f3": "butterfly_f3.net", "4c2": "4c2.net"}.get(name)
    if fname is None:
        raise KeyError(f"unknown builtin network {name!r}")
    return parse_network(resources.files("convnec.data").joinpath(fname).read_text(encoding="utf-8"))


def resolve_network(arg: str) -> NetworkSpec:
    """A file path, or ``builtin:<name>``."""
    if arg.startswith("builtin:"):
        return builtin_network(arg.split(":", 1)[1])
    return load_network(arg)


_UPTO = re.compile(r"^upto-(\d+)-edges?$")


def parse_phi(text: str, num_edges: int) -> ErrorPatternSet:
    """``single-edges``, ``upto-K-edges``, or explicit patterns such as
    ``1,2;3;4,5`` (1-based edges, patterns separated by ``;``)."""
    s = text.strip()
    if s == "single-edges":
        return ErrorPatternSet.single_edges(num_edges)
    mt = _UPTO.match(s)
    if mt:
        return ErrorPatternSet.upto_edges(num_edges, int(mt.group(1)))
    pats = []
    for chunk in s.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            pats.append([int(e) - 1 for e in chunk.split(",")])
        except ValueError:
            raise ParseError(f"bad error pattern {chunk!r}") from None
    try:
        return ErrorPatternSet(pats, num_edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_phi(phi: ErrorPatternSet) -> str:
    return ";".join(",".join(str(e + 1) for e in p) for p in phi.sorted_patterns())


def parse_generator(text: str, field: FieldSpec) -> PolyMatrix:
    """Generator text: rows of comma-separated polynomials, one row per line or
    separated by ``;``, optionally bracketed; ``#`` comments allowed."""
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if not body:
        raise ParseError("empty generator matrix")
    return PolyMatrix.parse(body, field)


def write_generator(g: PolyMatrix) -> str:
    return "\n".join(", ".join(format_poly(e) for e in row) for row in g.entries) + "\n"


def resolve_generator(arg: str, field: FieldSpec) -> PolyMatrix:
    """Inline generator text, or a path to a file containing it."""
    path = Path(arg)
    if path.is_file():
        return parse_generator(path.read_text(encoding="utf-8"), field)
    return parse_generator(arg, field)
