"""Acyclic single-source multicast networks carrying a linear network code.

Edges are indexed 0..|E|-1 in ancestral order throughout the Python API; the
text file format and CLI output number them from 1.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Mapping

import numpy as np

from .errors import BadOrdering, CyclicGraph, DimensionMismatch, RankDeficientSink, Singular
from .galois import FieldSpec
from .polymat import ScalarMatrix

Vertex = Hashable


@dataclass(frozen=True)
class NetworkSpec:
    """Topology plus local kernels.

    ``alpha[(i, e)]`` couples source input i to out-edge e of the source,
    ``beta[(e_i, e_j)]`` couples adjacent edges at head(e_i) = tail(e_j) and
    ``eps[T][(e, col)]`` maps in-edge e of sink T to output column col.
    Missing beta entries on adjacent edge pairs default to 1; missing alpha
    and eps entries are 0.
    """

    field: FieldSpec
    num_inputs: int
    edges: tuple[tuple[Vertex, Vertex], ...]
    source: Vertex
    sinks: tuple[Vertex, ...]
    alpha: Mapping[tuple[int, int], int] = field(default_factory=dict)
    beta: Mapping[tuple[int, int], int] = field(default_factory=dict)
    eps: Mapping[Vertex, Mapping[tuple[int, int], int]] = field(default_factory=dict)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def out_edges(self, v: Vertex) -> list[int]:
        return [i for i, (t, _) in enumerate(self.edges) if t == v]

    def in_edges(self, v: Vertex) -> list[int]:
        return [i for i, (_, h) in enumerate(self.edges) if h == v]

    def vertices(self) -> list[Vertex]:
        seen = {self.source: None}
        for t, h in self.edges:
            seen.setdefault(t, None)
            seen.setdefault(h, None)
        for s in self.sinks:
            seen.setdefault(s, None)
        return list(seen)

    def validate(self):
        """Check acyclicity, ancestral order and kernel placement."""
        if self.num_inputs < 1:
            raise ValueError("num_inputs must be >= 1")
        if not self.sinks:
            raise ValueError("network has no sinks")
        if len(set(self.sinks)) != len(self.sinks):
            raise ValueError("duplicate sink")
        if self.source in self.sinks:
            raise ValueError("source cannot be a sink")
        _check_acyclic(self.edges)
        heads = defaultdict(list)
        for i, (_, h) in enumerate(self.edges):
            heads[h].append(i)
        for j, (t, _) in enumerate(self.edges):
            for i in heads.get(t, ()):
                if i >= j:
                    raise BadOrdering(
                        f"edge {i + 1} enters the tail of edge {j + 1} but is not earlier in the order"
                    )
        n, ne = self.num_inputs, self.num_edges
        src_out = set(self.out_edges(self.source))
        for (i, e), v in self.alpha.items():
            if not 0 <= i < n:
                raise ValueError(f"alpha input index {i + 1} out of range")
            if e not in src_out:
                raise ValueError(f"alpha references edge {e + 1}, which does not leave the source")
            self.field.check(v)
        for (a, b), v in self.beta.items():
            if not (0 <= a < ne and 0 <= b < ne) or self.edges[a][1] != self.edges[b][0]:
                raise ValueError(f"beta ({a + 1}, {b + 1}) is not an adjacent edge pair")
            self.field.check(v)
        for t, kern in self.eps.items():
            if t not in self.sinks:
                raise ValueError(f"eps given for unknown sink {t!r}")
            incoming = set(self.in_edges(t))
            for (e, col), v in kern.items():
                if e not in incoming:
                    raise ValueError(f"eps for sink {t!r} references edge {e + 1}, not an in-edge")
                if not 0 <= col < n:
                    raise ValueError(f"eps column {col + 1} out of range")
                self.field.check(v)


def _check_acyclic(edges):
    succ = defaultdict(set)
    indeg = defaultdict(int)
    nodes = set()
    for t, h in edges:
        nodes.update((t, h))
        if h not in succ[t]:
            succ[t].add(h)
            indeg[h] += 1
    if any(t == h for t, h in edges):
        raise CyclicGraph("self-loop in network graph")
    ready = [v for v in nodes if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if seen != len(nodes):
        raise CyclicGraph("network graph contains a directed cycle")


@dataclass(frozen=True)
class TransferSet:
    """A, K, F and the per-sink F_T, M_T, M_T^{-1} of a network code."""

    field: FieldSpec
    sinks: tuple[Vertex, ...]
    A: ScalarMatrix
    K: ScalarMatrix
    F: ScalarMatrix
    B: dict[Vertex, ScalarMatrix]
    F_T: dict[Vertex, ScalarMatrix]
    M_T: dict[Vertex, ScalarMatrix]
    M_T_inv: dict[Vertex, ScalarMatrix]

    @property
    def num_inputs(self) -> int:
        return self.A.rows

    @property
    def num_edges(self) -> int:
        return self.A.cols


def build_transfer(spec: NetworkSpec) -> TransferSet:
    spec.validate()
    f = spec.field
    n, ne = spec.num_inputs, spec.num_edges

    A = np.zeros((n, ne), dtype=np.int64)
    for (i, e), v in spec.alpha.items():
        A[i, e] = v

    K = np.zeros((ne, ne), dtype=np.int64)
    for i, (_, h) in enumerate(spec.edges):
        for j, (t, _) in enumerate(spec.edges):
            if h == t:
                K[i, j] = spec.beta.get((i, j), 1)
    if np.any(np.tril(K)):
        raise BadOrdering("K is not strictly upper triangular under the given edge order")

    # (I - K) F = I with I - K unit upper triangular: F[i] = e_i + sum_{j>i} K[i,j] F[j]
    F = np.zeros((ne, ne), dtype=np.int64)
    for i in range(ne - 1, -1, -1):
        row = np.zeros(ne, dtype=np.int64)
        row[i] = 1
        for j in np.nonzero(K[i])[0]:
            row = f.add(row, f.mul(int(K[i, j]), F[j]))
        F[i] = row

    A_m, K_m, F_m = ScalarMatrix(f, A), ScalarMatrix(f, K), ScalarMatrix(f, F)
    B, F_T, M_T, M_inv = {}, {}, {}, {}
    for t in spec.sinks:
        b = np.zeros((ne, n), dtype=np.int64)
        for (e, col), v in spec.eps.get(t, {}).items():
            b[e, col] = v
        B[t] = ScalarMatrix(f, b)
        F_T[t] = F_m @ B[t]
        M_T[t] = A_m @ F_T[t]
        try:
            M_inv[t] = M_T[t].inverse()
        except Singular:
            raise RankDeficientSink(t) from None
    return TransferSet(f, tuple(spec.sinks), A_m, K_m, F_m, B, F_T, M_T, M_inv)


def propagate(ts: TransferSet, x, w=None) -> dict[Vertex, np.ndarray]:
    """Sink outputs y_T = x M_T + w F_T for one network use.

    ``x`` and ``w`` may carry leading batch dimensions (shape (..., n) and
    (..., |E|)).
    """
    f = ts.field
    x = np.asarray(x, dtype=np.int64)
    if x.shape[-1:] != (ts.num_inputs,):
        raise DimensionMismatch(f"input must have {ts.num_inputs} symbols, got shape {x.shape}")
    if w is not None:
        w = np.asarray(w, dtype=np.int64)
        if w.shape[-1:] != (ts.num_edges,):
            raise DimensionMismatch(f"error vector must have {ts.num_edges} symbols, got shape {w.shape}")
    out = {}
    for t in ts.sinks:
        y = f.matmul(x[..., None, :], ts.M_T[t].entries)[..., 0, :]
        if w is not None:
            y = f.add(y, f.matmul(w[..., None, :], ts.F_T[t].entries)[..., 0, :])
        out[t] = y
    return out


def single_edge_network(field: FieldSpec) -> NetworkSpec:
    """s -> T over one unit edge, n = 1."""
    return NetworkSpec(field, 1, (("s", "T"),), "s", ("T",), {(0, 0): 1}, {}, {"T": {(0, 0): 1}})

