"""Convolutional encoders in controller canonical form and their distance metrics.

State layout: the shift registers of the b inputs are concatenated, input 1
first, each holding its newest symbol in the lowest digit.  A state index is
the base-q number whose digit at position ``offset_i + k`` is u_{i, t-1-k}.
Input blocks are indexed the same way, u_1 in the lowest digit.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    BlockSizeMismatch,
    Catastrophic,
    DepthCapExceeded,
    TooManyStates,
    ZeroGenerator,
)
from .galois import FieldSpec
from .polymat import PolyMatrix, ScalarMatrix, poly_gcd, polymat_times_scalar

DEFAULT_MAX_STATES = 2**20


class MinimalityWarning(UserWarning):
    """T_dfree was computed on an encoder not certified minimal."""


def _digits(values: np.ndarray, q: int, width: int) -> np.ndarray:
    out = np.zeros(values.shape + (width,), dtype=np.int64)
    v = values.copy()
    for k in range(width):
        out[..., k] = v % q
        v //= q
    return out


def _undigits(digits: np.ndarray, q: int) -> np.ndarray:
    weights = q ** np.arange(digits.shape[-1], dtype=np.int64)
    return (digits * weights).sum(axis=-1)


@dataclass(frozen=True, eq=False)
class EncoderFSM:
    generator: PolyMatrix
    field: FieldSpec
    nu: tuple[int, ...]
    next_state: np.ndarray  # (S, U)
    output: np.ndarray  # (S, U, c)
    weight: np.ndarray  # (S, U)
    input_blocks: np.ndarray  # (U, b)

    @property
    def b(self) -> int:
        return self.generator.rows

    @property
    def c(self) -> int:
        return self.generator.cols

    @property
    def delta(self) -> int:
        return sum(self.nu)

    @property
    def nu_max(self) -> int:
        return max(self.nu)

    @property
    def num_states(self) -> int:
        return self.next_state.shape[0]

    @property
    def num_input_blocks(self) -> int:
        return self.next_state.shape[1]

    def block_index(self, blocks) -> np.ndarray:
        """Index of each input block; ``blocks`` has shape (..., b)."""
        blocks = np.asarray(blocks, dtype=np.int64)
        if blocks.shape[-1:] != (self.b,):
            raise BlockSizeMismatch(f"input blocks must have {self.b} symbols, got shape {blocks.shape}")
        self.field.check(blocks)
        return _undigits(blocks, self.field.q)


def build_encoder(g: PolyMatrix, max_states: int = DEFAULT_MAX_STATES) -> EncoderFSM:
    """Controller-canonical-form state machine of G(z)."""
    if g.is_zero():
        raise ZeroGenerator("generator matrix is zero")
    if g.rows >= g.cols:
        raise ValueError(f"need b < c, got a {g.rows}x{g.cols} generator")
    f = g.field
    q = f.q
    b, c = g.shape
    nu = g.row_degrees
    delta = sum(nu)
    if q**delta > max_states:
        raise TooManyStates(f"{q}^{delta} states exceeds the cap of {max_states}")
    S, U = q**delta, q**b
    coeffs = g.coefficient_array()  # (b, c, D)
    depth = coeffs.shape[2]

    states = _digits(np.arange(S, dtype=np.int64), q, delta)  # (S, delta)
    inputs = _digits(np.arange(U, dtype=np.int64), q, b)  # (U, b)
    offsets = np.concatenate([[0], np.cumsum(nu)]).astype(int)

    # mem[s, u, i, d] = u_{i, t-d}
    mem = np.zeros((S, U, b, depth), dtype=np.int64)
    nxt = np.zeros((S, U, delta), dtype=np.int64)
    for i in range(b):
        mem[:, :, i, 0] = inputs[None, :, i]
        reg = states[:, offsets[i]:offsets[i + 1]]
        if nu[i]:
            mem[:, :, i, 1:nu[i] + 1] = reg[:, None, :]
            nxt[:, :, offsets[i]] = inputs[None, :, i]
            nxt[:, :, offsets[i] + 1:offsets[i + 1]] = reg[:, None, :-1]
    prod = f.mul(mem[:, :, :, None, :], coeffs[None, None, :, :, :])  # (S, U, b, c, D)
    out = f.sum(prod.transpose(0, 1, 3, 2, 4).reshape(S, U, c, b * depth), axis=-1)
    out = np.asarray(out, dtype=np.int64)
    next_state = _undigits(nxt, q) if delta else np.zeros((S, U), dtype=np.int64)
    weight = np.count_nonzero(out, axis=-1)
    for arr in (next_state, out, weight, inputs):
        arr.setflags(write=False)
    return EncoderFSM(g, f, nu, next_state, out, weight, inputs)


def encode(fsm: EncoderFSM, u, flush: bool = True) -> np.ndarray:
    """Encode input blocks (shape (L, b), or (B, L, b) for a batch).

    With ``flush`` the input is extended by nu_max zero blocks so the encoder
    ends in the zero state.  Returns output blocks of shape (..., L', c).
    """
    u = np.asarray(u, dtype=np.int64)
    if u.ndim == 1 and fsm.b == 1:
        u = u[:, None]
    idx = fsm.block_index(u)  # (..., L)
    if flush and fsm.nu_max:
        pad = np.zeros(idx.shape[:-1] + (fsm.nu_max,), dtype=np.int64)
        idx = np.concatenate([idx, pad], axis=-1)
    state = np.zeros(idx.shape[:-1], dtype=np.int64)
    out = np.zeros(idx.shape + (fsm.c,), dtype=np.int64)
    for t in range(idx.shape[-1]):
        out[..., t, :] = fsm.output[state, idx[..., t]]
        state = fsm.next_state[state, idx[..., t]]
    return out


def catastrophic_check(fsm: EncoderFSM) -> bool:
    """True iff zero-weight transitions admit a cycle through nonzero states,
    or a nonzero input loops on the zero state with zero output."""
    zero_w = fsm.weight == 0
    if np.any(zero_w[0, 1:] & (fsm.next_state[0, 1:] == 0)):
        return True
    s_idx, u_idx = np.nonzero(zero_w)
    ns = fsm.next_state[s_idx, u_idx]
    keep = (s_idx != 0) & (ns != 0)
    src, dst = s_idx[keep], ns[keep]
    if src.size == 0:
        return False
    # Kahn: a cycle exists iff some arcs survive repeated removal of sources
    S = fsm.num_states
    indeg = np.bincount(dst, minlength=S)
    order = np.argsort(src, kind="stable")
    src, dst = src[order], dst[order]
    starts = np.searchsorted(src, np.arange(S + 1))
    stack = [v for v in np.unique(src) if indeg[v] == 0]
    removed = 0
    while stack:
        v = stack.pop()
        for w in dst[starts[v]:starts[v + 1]]:
            removed += 1
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(int(w))
    return removed < src.size


def free_distance(fsm: EncoderFSM) -> int:
    """Minimum Hamming weight of a nonzero code sequence (Dijkstra on the state graph)."""
    if catastrophic_check(fsm):
        raise Catastrophic("free distance is undefined for a catastrophic generator matrix")
    S, U = fsm.num_states, fsm.num_input_blocks
    best = np.iinfo(np.int64).max
    dist = np.full(S, np.iinfo(np.int64).max, dtype=np.int64)
    heap = []
    for u in range(1, U):
        ns, w = int(fsm.next_state[0, u]), int(fsm.weight[0, u])
        if ns == 0:
            best = min(best, w)
        elif w < dist[ns]:
            dist[ns] = w
            heapq.heappush(heap, (w, ns))
    while heap:
        d, s = heapq.heappop(heap)
        if d >= best:
            break
        if d > dist[s]:
            continue
        for u in range(U):
            ns, nd = int(fsm.next_state[s, u]), d + int(fsm.weight[s, u])
            if ns == 0:
                best = min(best, nd)
            elif nd < dist[ns]:
                dist[ns] = nd
                heapq.heappush(heap, (nd, ns))
    if best == 0:
        raise ValueError("generator matrix does not have full rank")
    return int(best)


def is_minimal_certified(g: PolyMatrix) -> bool:
    """Certify basic + minimal; only possible here for single-row generators,
    where it holds iff the gcd of the entries is a nonzero constant."""
    if g.rows != 1 or g.is_zero():
        return False
    return poly_gcd(g.entries[0]).degree == 0


def t_dfree(fsm: EncoderFSM, dfree: int, depth_cap: int | None = None) -> int:
    """T_dfree = 1 + the longest truncated path of weight < dfree that leaves
    the zero state and never returns to it.

    Longest-path dynamic programming over (state, accumulated weight); zero
    weight arcs stay inside a weight layer and form a DAG because the encoder
    is non-catastrophic.
    """
    if catastrophic_check(fsm):
        raise Catastrophic("T_dfree is undefined for a catastrophic generator matrix")
    if dfree < 1:
        raise ValueError("dfree must be positive")
    minimal = is_minimal_certified(fsm.generator)
    if depth_cap is None:
        if minimal:
            depth_cap = (dfree - 1) * fsm.delta + 1
        else:
            depth_cap = 10 * dfree * (fsm.delta + 1)
    if not minimal:
        warnings.warn(
            f"T_dfree of {fsm.generator} computed on an encoder not certified minimal",
            MinimalityWarning,
            stacklevel=2,
        )

    S = fsm.num_states
    ns_all = fsm.next_state
    w_all = fsm.weight
    best = np.full((dfree, S), -1, dtype=np.int64)
    for u in range(fsm.num_input_blocks):
        ns, w = int(ns_all[0, u]), int(w_all[0, u])
        if ns != 0 and w < dfree:
            best[w, ns] = max(best[w, ns], 1)

    s_idx, u_idx = np.nonzero(np.ones_like(ns_all, dtype=bool))
    arc_ns = ns_all[s_idx, u_idx]
    arc_w = w_all[s_idx, u_idx]
    keep = (s_idx != 0) & (arc_ns != 0)
    s_idx, arc_ns, arc_w = s_idx[keep], arc_ns[keep], arc_w[keep]
    zero_arcs = arc_w == 0
    zs, zd = s_idx[zero_arcs], arc_ns[zero_arcs]

    for w in range(dfree):
        cur = best[w]
        for _ in range(S + 1):
            reach = cur[zs] >= 0
            cand = cur.copy()
            np.maximum.at(cand, zd[reach], cur[zs[reach]] + 1)
            if np.array_equal(cand, cur):
                break
            cur = cand
        else:  # pragma: no cover - excluded by the catastrophic check
            raise Catastrophic("zero-weight cycle among nonzero states")
        best[w] = cur
        for step in np.unique(arc_w[arc_w > 0]):
            if w + step >= dfree:
                break
            sel = (arc_w == step) & (cur[s_idx] >= 0)
            np.maximum.at(best[w + step], arc_ns[sel], cur[s_idx[sel]] + 1)

    longest = int(best.max()) if best.size else -1
    result = max(longest, 0) + 1
    if result > depth_cap:
        raise DepthCapExceeded(f"T_dfree {result} exceeds the depth cap {depth_cap}")
    return result


def enumerate_sdfree(fsm: EncoderFSM, dfree: int, limit: int = 1_000_000) -> Iterator[np.ndarray]:
    """Yield every truncated code sequence v_[0,j), j >= 1, of weight < dfree
    that starts in the zero state and visits only nonzero states afterwards."""
    count = 0
    stack = []
    for u in range(fsm.num_input_blocks):
        ns, w = int(fsm.next_state[0, u]), int(fsm.weight[0, u])
        if ns != 0 and w < dfree:
            stack.append((ns, w, (fsm.output[0, u],)))
    while stack:
        s, w, path = stack.pop()
        count += 1
        if count > limit:
            raise DepthCapExceeded(f"more than {limit} members in S_dfree")
        yield np.array(path)
        for u in range(fsm.num_input_blocks):
            ns, nw = int(fsm.next_state[s, u]), w + int(fsm.weight[s, u])
            if ns != 0 and nw < dfree:
                stack.append((ns, nw, path + (fsm.output[s, u],)))


@dataclass(frozen=True)
class CodeMetrics:
    dfree: int | None
    tdfree: int | None
    degree: int
    row_degrees: tuple[int, ...]
    catastrophic: bool
    minimal_certified: bool

    def as_dict(self) -> dict:
        return {
            "dfree": self.dfree,
            "tdfree": self.tdfree,
            "degree": self.degree,
            "row_degrees": list(self.row_degrees),
            "catastrophic": self.catastrophic,
            "minimal_certified": self.minimal_certified,
        }


def analyze(g: PolyMatrix | EncoderFSM, max_states: int = DEFAULT_MAX_STATES) -> CodeMetrics:
    """All metrics of a generator; distances are None when it is catastrophic."""
    fsm = g if isinstance(g, EncoderFSM) else build_encoder(g, max_states)
    gen = fsm.generator
    cat = catastrophic_check(fsm)
    minimal = is_minimal_certified(gen)
    if cat:
        return CodeMetrics(None, None, gen.degree, gen.row_degrees, True, minimal)
    d = free_distance(fsm)
    t = t_dfree(fsm, d)
    return CodeMetrics(d, t, gen.degree, gen.row_degrees, False, minimal)


def output_code(g_in: PolyMatrix, m_t: ScalarMatrix) -> PolyMatrix:
    """Generator G_I(z) M_T of the code seen at a sink."""
    return polymat_times_scalar(g_in, m_t)
