"""Network-error-correcting convolutional codes: construction, decoding, bounds."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .convcode import (
    CodeMetrics,
    EncoderFSM,
    analyze,
    build_encoder,
    is_minimal_certified,
    output_code,
)
from .errors import (
    BadRate,
    Catastrophic,
    DimensionMismatch,
    EmptySet,
    EnumerationTooLarge,
    InsufficientFreeDistance,
    NoCodeFound,
    UnsupportedRank,
)
from .galois import FieldSpec, prime_power
from .network import NetworkSpec, TransferSet, Vertex, build_transfer
from .polymat import PolyMatrix, ScalarMatrix

DEFAULT_ENUMERATION_CAP = 10**7
CASE_A = "A"
CASE_B = "B"


# -- error pattern sets -----------------------------------------------------


class ErrorPatternSet:
    """A collection Phi of error patterns, each a nonempty set of edge indices."""

    __slots__ = ("patterns", "num_edges")

    def __init__(self, patterns: Iterable[Iterable[int]], num_edges: int):
        pats = set()
        for rho in patterns:
            rho = frozenset(int(e) for e in rho)
            if not rho:
                raise ValueError("error patterns must be nonempty")
            bad = [e for e in rho if not 0 <= e < num_edges]
            if bad:
                raise ValueError(f"edge indices {sorted(e + 1 for e in bad)} outside 1..{num_edges}")
            pats.add(rho)
        self.patterns = frozenset(pats)
        self.num_edges = num_edges

    @classmethod
    def single_edges(cls, num_edges: int) -> "ErrorPatternSet":
        return cls(([e] for e in range(num_edges)), num_edges)

    @classmethod
    def upto_edges(cls, num_edges: int, size: int) -> "ErrorPatternSet":
        """Every set of 1..size edges."""
        pats = []
        for r in range(1, size + 1):
            pats.extend(itertools.combinations(range(num_edges), r))
        return cls(pats, num_edges)

    def sorted_patterns(self) -> list[tuple[int, ...]]:
        return sorted((tuple(sorted(p)) for p in self.patterns), key=lambda p: (len(p), p))

    def matches(self, w) -> bool:
        """True if the support of w lies inside some pattern (zero always matches)."""
        support = frozenset(np.nonzero(np.asarray(w))[0].tolist())
        return not support or any(support <= rho for rho in self.patterns)

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.sorted_patterns())

    def __eq__(self, other):
        if not isinstance(other, ErrorPatternSet):
            return NotImplemented
        return self.patterns == other.patterns and self.num_edges == other.num_edges

    def __hash__(self):
        return hash((self.patterns, self.num_edges))

    def __repr__(self):
        return f"ErrorPatternSet({len(self.patterns)} patterns over {self.num_edges} edges)"


def _unique_rows(a: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0:
        return a
    return np.unique(a, axis=0)


def enumerate_error_vectors(
    phi: ErrorPatternSet, field: FieldSpec, num_edges: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> np.ndarray:
    """W_Phi: every |E|-vector whose support lies in some pattern, zero included.

    Returned as sorted unique rows; an empty Phi gives an empty array.
    """
    q = field.q
    total = sum(q ** len(rho) for rho in phi.patterns)
    if total > cap:
        raise EnumerationTooLarge(f"{total} error vectors exceed the cap of {cap}")
    blocks = []
    for rho in phi.sorted_patterns():
        r = len(rho)
        codes = np.arange(q**r, dtype=np.int64)
        vals = np.stack([(codes // q**i) % q for i in range(r)], axis=1)
        w = np.zeros((q**r, num_edges), dtype=np.int64)
        w[:, list(rho)] = vals
        blocks.append(w)
    if not blocks:
        return np.zeros((0, num_edges), dtype=np.int64)
    return _unique_rows(np.concatenate(blocks))


def sink_error_images(w_phi: np.ndarray, f_t: ScalarMatrix) -> np.ndarray:
    """W_T = { w F_T }, deduplicated."""
    w_phi = np.asarray(w_phi, dtype=np.int64)
    if w_phi.shape[1] != f_t.rows:
        raise DimensionMismatch(f"error vectors of length {w_phi.shape[1]} vs F_T with {f_t.rows} rows")
    if w_phi.shape[0] == 0:
        return np.zeros((0, f_t.cols), dtype=np.int64)
    return _unique_rows(f_t.field.matmul(w_phi, f_t.entries))


def source_error_set(w_t: Mapping[Vertex, np.ndarray], m_inv: Mapping[Vertex, ScalarMatrix]) -> np.ndarray:
    """W_s = union over sinks of { w_T M_T^{-1} }."""
    parts = []
    for t, wt in w_t.items():
        mi = m_inv[t]
        if len(wt):
            parts.append(mi.field.matmul(np.asarray(wt, dtype=np.int64), mi.entries))
    if not parts:
        n = next(iter(m_inv.values())).rows if m_inv else 0
        return np.zeros((0, n), dtype=np.int64)
    return _unique_rows(np.concatenate(parts))


def hamming_weight(v) -> int:
    return int(np.count_nonzero(v))


def compute_ts(w_s) -> int:
    """t_s = maximum Hamming weight over W_s."""
    w_s = np.asarray(w_s)
    if w_s.size == 0 or w_s.shape[0] == 0:
        raise EmptySet("W_s is empty")
    return int(np.count_nonzero(w_s, axis=1).max())


def max_weight(vectors) -> int:
    vectors = np.asarray(vectors)
    if vectors.shape[0] == 0:
        return 0
    return int(np.count_nonzero(vectors, axis=1).max())


# -- code selection ---------------------------------------------------------


@dataclass(frozen=True)
class SearchParams:
    delta_max: int = 2
    max_candidates: int = 2_000_000


def select_code(
    field: FieldSpec, n: int, k: int, t_s: int, params: SearchParams = SearchParams()
) -> tuple[PolyMatrix, CodeMetrics]:
    """Exhaustive search for a 1 x n generator with dfree >= 2 t_s + 1.

    Degrees are tried in increasing order; within the first degree that has a
    qualifying code the one with the smallest T_dfree wins, ties going to the
    earliest in lexicographic coefficient order.  Only generators whose
    entries have a constant gcd (basic and minimal) are considered.
    """
    if k >= n:
        raise BadRate(f"need k < n, got k={k}, n={n}")
    if k != 1:
        raise UnsupportedRank("code search is limited to k = 1; supply the generator instead")
    need = 2 * t_s + 1
    q = field.q
    seen = 0
    for delta in range(params.delta_max + 1):
        if bound_singleton(n, k, delta) < need:
            continue
        best = None
        for flat in itertools.product(range(q), repeat=n * (delta + 1)):
            rows = [flat[j * (delta + 1):(j + 1) * (delta + 1)] for j in range(n)]
            if not any(r[delta] for r in rows):
                continue
            seen += 1
            if seen > params.max_candidates:
                raise NoCodeFound(f"search exceeded {params.max_candidates} candidates")
            g = PolyMatrix.from_coeffs(field, [rows])
            if not is_minimal_certified(g):
                continue
            m = analyze(g)
            if m.dfree >= need and (best is None or m.tdfree < best[1].tdfree):
                best = (g, m)
        if best is not None:
            return best
    raise NoCodeFound(f"no 1x{n} code over {field} with degree <= {params.delta_max} reaches dfree {need}")


# -- decoding plans ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SinkPlan:
    sink: Vertex
    mode: str
    generator: PolyMatrix
    trellis: EncoderFSM = field(repr=False)
    processing: ScalarMatrix | None
    spacing: int
    tail: int
    output_dfree: int | None
    output_tdfree: int | None
    max_error_weight: int

    @property
    def trellis_name(self) -> str:
        return "Output trellis" if self.mode == CASE_A else "Input trellis"


def plan_decoding(
    input_fsm: EncoderFSM,
    input_metrics: CodeMetrics,
    out_codes: Mapping[Vertex, PolyMatrix],
    out_metrics: Mapping[Vertex, CodeMetrics],
    w_t: Mapping[Vertex, np.ndarray],
    m_inv: Mapping[Vertex, ScalarMatrix],
    out_fsms: Mapping[Vertex, EncoderFSM] | None = None,
) -> list[SinkPlan]:
    """Case A iff dfree(C_T) >= 2 max w_H(W_T) + 1 and T_dfree(C_s) >= T_dfree(C_T)."""
    plans = []
    for t, g_out in out_codes.items():
        m = out_metrics[t]
        wmax = max_weight(w_t[t])
        case_a = (
            not m.catastrophic
            and m.dfree >= 2 * wmax + 1
            and input_metrics.tdfree >= m.tdfree
        )
        if case_a:
            fsm = out_fsms[t] if out_fsms and t in out_fsms else build_encoder(g_out)
            plans.append(
                SinkPlan(t, CASE_A, g_out, fsm, None, m.tdfree, input_fsm.nu_max, m.dfree, m.tdfree, wmax)
            )
        else:
            plans.append(
                SinkPlan(
                    t, CASE_B, input_fsm.generator, input_fsm, m_inv[t], input_metrics.tdfree,
                    input_fsm.nu_max, m.dfree, m.tdfree, wmax,
                )
            )
    return plans


_INF = np.int64(1) << 40


class _Trellis:
    """Arcs of an encoder sorted by (next state, state, input), for batched
    add-compare-select with fixed tie-breaking."""

    def __init__(self, fsm: EncoderFSM):
        S, U = fsm.num_states, fsm.num_input_blocks
        ns = fsm.next_state.ravel()
        order = np.argsort(ns, kind="stable")  # arc id s*U+u is already (s, u)-ordered
        self.fsm = fsm
        self.s = order // U
        self.u = order % U
        self.present, self.starts = np.unique(ns[order], return_index=True)
        self.counts = np.diff(np.append(self.starts, ns.size))
        self.out = fsm.output.reshape(S * U, fsm.c)[order]
        self.ids = np.arange(order.size)
        self.nonzero_input = self.u != 0

    def step(self, pm: np.ndarray, r_t: np.ndarray, zero_input_only: bool):
        """One ACS step; returns new path metrics and the winning arc per state.

        Among equal metrics the winner is the arc with the lowest predecessor
        state, then the lowest input block.
        """
        bm = np.count_nonzero(self.out[None, :, :] != r_t[:, None, :], axis=-1)
        cand = np.minimum(pm[:, self.s] + bm, _INF)
        if zero_input_only:
            cand[:, self.nonzero_input] = _INF
        mins = np.minimum.reduceat(cand, self.starts, axis=1)
        key = np.where(cand == np.repeat(mins, self.counts, axis=1), self.ids, self.ids.size)
        first = np.minimum.reduceat(key, self.starts, axis=1)
        new_pm = np.full_like(pm, _INF)
        new_pm[:, self.present] = mins
        arc = np.zeros_like(pm)
        arc[:, self.present] = first
        return new_pm, arc


def _check_received(fsm: EncoderFSM, received, tail):
    r = np.asarray(received, dtype=np.int64)
    if r.ndim != 3 or r.shape[2] != fsm.c:
        raise DimensionMismatch(f"received must have shape (B, L, {fsm.c}), got {r.shape}")
    tail = fsm.nu_max if tail is None else tail
    if r.shape[1] < 1 or r.shape[1] < tail:
        raise ValueError(f"received length {r.shape[1]} is shorter than the {tail}-block tail")
    return r, tail


def viterbi_decode_batch(fsm: EncoderFSM, received, tail: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Minimum Hamming distance (maximum likelihood) decoding of
    zero-terminated transmissions.

    ``received`` has shape (B, L, c).  The last ``tail`` input blocks (default
    nu_max) are forced to zero and dropped from the result.  Ties are broken
    at every merge towards the lowest predecessor state, then the lowest input
    block.  Returns (inputs of shape (B, L - tail, b), path weights (B,)).
    """
    r, tail = _check_received(fsm, received, tail)
    B, L, _ = r.shape
    tr = _Trellis(fsm)
    pm = np.full((B, fsm.num_states), _INF, dtype=np.int64)
    pm[:, 0] = 0
    back = np.zeros((L, B, fsm.num_states), dtype=np.int64)
    for t in range(L):
        pm, back[t] = tr.step(pm, r[:, t], t >= L - tail)

    weights = pm[:, 0]
    if np.any(weights >= _INF):
        raise ValueError("zero state unreachable at the end of the received sequence")
    state = np.zeros(B, dtype=np.int64)
    rows = np.arange(B)
    inputs = np.zeros((B, L), dtype=np.int64)
    for t in range(L - 1, -1, -1):
        arc = back[t][rows, state]
        inputs[:, t] = tr.u[arc]
        state = tr.s[arc]
    return fsm.input_blocks[inputs[:, : L - tail]], weights


def viterbi_decode(fsm: EncoderFSM, received, tail: int | None = None) -> tuple[np.ndarray, int]:
    """Single-sequence form of :func:`viterbi_decode_batch`; ``received`` is (L, c)."""
    r = np.asarray(received, dtype=np.int64)
    blocks, weights = viterbi_decode_batch(fsm, r[None], tail)
    return blocks[0], int(weights[0])


def window_decode_batch(fsm: EncoderFSM, received, depth: int, tail: int | None = None) -> np.ndarray:
    """Sliding-window minimum-distance decoding with decision depth ``depth``.

    Starting from the committed state, the closest path over the next
    ``depth`` segments (zero-terminated where the window reaches the end) is
    found and only its first input block is committed.  With depth =
    T_dfree this corrects every error sequence of weight at most
    floor((dfree - 1) / 2) in each window of T_dfree consecutive segments,
    which full-sequence ML decoding does not guarantee.
    """
    if depth < 1:
        raise ValueError("decision depth must be >= 1")
    r, tail = _check_received(fsm, received, tail)
    B, L, _ = r.shape
    S = fsm.num_states
    tr = _Trellis(fsm)
    rows = np.arange(B)
    state = np.zeros(B, dtype=np.int64)
    inputs = np.zeros((B, L - tail), dtype=np.int64)
    for t in range(L - tail):
        pm = np.full((B, S), _INF, dtype=np.int64)
        pm[rows, state] = 0
        first = np.zeros((B, S), dtype=np.int64)
        end = min(t + depth, L)
        for k in range(t, end):
            pm, arc = tr.step(pm, r[:, k], k >= L - tail)
            first = tr.u[arc] if k == t else first[rows[:, None], tr.s[arc]]
        if end == L:
            best = np.zeros(B, dtype=np.int64)
            if np.any(pm[:, 0] >= _INF):
                raise ValueError("zero state unreachable at the end of the received sequence")
        else:
            best = np.argmin(pm, axis=1)
        u = first[rows, best]
        inputs[:, t] = u
        state = fsm.next_state[state, u]
    return fsm.input_blocks[inputs]


def decode_sink(plan: SinkPlan, y, method: str = "window") -> np.ndarray:
    """Decode received n-blocks (shape (L, n) or (B, L, n)) at one sink.

    Case B first multiplies every block by M_T^{-1}.  ``method`` selects the
    sliding-window decoder with depth ``plan.spacing`` (default) or
    full-sequence ML Viterbi (``"ml"``).
    """
    y = np.asarray(y, dtype=np.int64)
    single = y.ndim == 2
    if single:
        y = y[None]
    if plan.mode == CASE_B:
        y = plan.processing.field.matmul(y, plan.processing.entries)
    if method == "window":
        blocks = window_decode_batch(plan.trellis, y, plan.spacing, plan.tail)
    elif method == "ml":
        blocks, _ = viterbi_decode_batch(plan.trellis, y, plan.tail)
    else:
        raise ValueError(f"unknown decoding method {method!r}")
    return blocks[0] if single else blocks


# -- bounds -----------------------------------------------------------------


def bound_singleton(n: int, k: int, delta: int) -> int:
    """Generalized Singleton bound (n - k)(floor(delta/k) + 1) + delta + 1."""
    if not 0 < k < n or delta < 0:
        raise BadRate(f"need 0 < k < n and delta >= 0, got n={n}, k={k}, delta={delta}")
    return (n - k) * (delta // k + 1) + delta + 1


def bound_field_size(n: int, k: int, num_sinks: int) -> int:
    """Smallest prime power q with n | q - 1 and q > max(|T|, 2n^2/(n-k) + 2)."""
    if not 0 < k < n:
        raise BadRate(f"need 0 < k < n, got n={n}, k={k}")
    floor_ = max(Fraction(num_sinks), Fraction(2 * n * n, n - k) + 2)
    q = math.floor(floor_) + 1
    while not ((q - 1) % n == 0 and prime_power(q)):
        q += 1
    return q


class TdfreeBounds(NamedTuple):
    general: int
    mds: int | None


def bound_tdfree(dfree: int, delta: int, n: int | None = None, k: int | None = None, is_mds: bool = False) -> TdfreeBounds:
    """(dfree - 1) delta + 1, plus 6nk - 2k^2 + 1 for an MDS code with delta = 2k."""
    if dfree < 1 or delta < 0:
        raise ValueError("need dfree >= 1 and delta >= 0")
    mds = None
    if is_mds:
        if n is None or k is None:
            raise ValueError("n and k are required for the MDS bound")
        mds = 6 * n * k - 2 * k * k + 1
    return TdfreeBounds((dfree - 1) * delta + 1, mds)


def bnecc_field_bound(j: int, num_edges: int, t: int, num_sinks: int) -> int:
    """Sufficient field size of the block-code approach on the J-times expanded
    network: sum over sinks of C(J |E|, 2t)."""
    if min(j, num_edges, t, num_sinks) < 1:
        raise ValueError("all arguments must be positive")
    return num_sinks * math.comb(j * num_edges, 2 * t)


# -- construction -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConstructionReport:
    transfer: TransferSet
    phi: ErrorPatternSet
    w_phi: np.ndarray
    w_t: dict
    w_s: np.ndarray
    t_s: int
    required_dfree: int
    code: PolyMatrix
    metrics: CodeMetrics
    input_fsm: EncoderFSM = field(repr=False)
    output_codes: dict
    output_metrics: dict
    plans: list[SinkPlan]

    @property
    def field(self) -> FieldSpec:
        return self.code.field

    def plan_for(self, sink: Vertex) -> SinkPlan:
        for p in self.plans:
            if p.sink == sink:
                return p
        raise KeyError(sink)

    def as_dict(self) -> dict:
        f = self.field
        return {
            "field": {"p": f.p, "m": f.m},
            "num_inputs": self.transfer.num_inputs,
            "num_edges": self.transfer.num_edges,
            "phi_size": len(self.phi),
            "w_phi_size": int(self.w_phi.shape[0]),
            "w_t": {str(t): [list(map(int, v)) for v in w] for t, w in self.w_t.items()},
            "w_s": [list(map(int, v)) for v in self.w_s],
            "t_s": self.t_s,
            "required_dfree": self.required_dfree,
            "code": str(self.code),
            "metrics": self.metrics.as_dict(),
            "sinks": [
                {
                    "sink": str(p.sink),
                    "M_T": self.transfer.M_T[p.sink].tolist(),
                    "output_code": str(self.output_codes[p.sink]),
                    "dfree": p.output_dfree,
                    "tdfree": p.output_tdfree,
                    "max_error_weight": p.max_error_weight,
                    "mode": p.mode,
                    "decoding": p.trellis_name,
                    "spacing": p.spacing,
                }
                for p in self.plans
            ],
        }


def construct(
    spec: NetworkSpec | TransferSet,
    phi: ErrorPatternSet,
    code: PolyMatrix | None = None,
    params: SearchParams = SearchParams(),
    k: int = 1,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> ConstructionReport:
    """Run the whole construction: transfer matrices, W_Phi, W_T, W_s, t_s,
    code selection (or validation of ``code``), output codes and decoding plans."""
    ts = spec if isinstance(spec, TransferSet) else build_transfer(spec)
    f = ts.field
    n = ts.num_inputs
    if phi.num_edges != ts.num_edges:
        raise DimensionMismatch(f"Phi is over {phi.num_edges} edges, network has {ts.num_edges}")
    w_phi = enumerate_error_vectors(phi, f, ts.num_edges, enumeration_cap)
    w_t = {t: sink_error_images(w_phi, ts.F_T[t]) for t in ts.sinks}
    w_s = source_error_set(w_t, ts.M_T_inv)
    t_s = compute_ts(w_s)
    need = 2 * t_s + 1

    if code is None:
        code, metrics = select_code(f, n, k, t_s, params)
        fsm = build_encoder(code)
    else:
        if code.field != f:
            raise DimensionMismatch(f"code is over {code.field}, network over {f}")
        if code.cols != n or code.rows >= n:
            raise BadRate(f"code must be k x {n} with k < {n}, got {code.rows}x{code.cols}")
        fsm = build_encoder(code)
        metrics = analyze(fsm)
        if metrics.catastrophic:
            raise Catastrophic(f"supplied code {code} is catastrophic")
        if metrics.dfree < need:
            raise InsufficientFreeDistance(
                f"supplied code has dfree {metrics.dfree} < 2*t_s+1 = {need}"
            )

    out_codes, out_metrics, out_fsms = {}, {}, {}
    for t in ts.sinks:
        g_out = output_code(code, ts.M_T[t])
        out_codes[t] = g_out
        out_fsms[t] = build_encoder(g_out)
        out_metrics[t] = analyze(out_fsms[t])
    plans = plan_decoding(fsm, metrics, out_codes, out_metrics, w_t, ts.M_T_inv, out_fsms)
    return ConstructionReport(
        ts, phi, w_phi, w_t, w_s, t_s, need, code, metrics, fsm, out_codes, out_metrics, plans
    )
