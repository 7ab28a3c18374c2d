"""End-to-end simulation: encode at the source, inject edge errors, decode at every sink."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .convcode import encode
from .errors import EnumerationTooLarge
from .galois import FieldSpec
from .nec import ConstructionReport, ErrorPatternSet, decode_sink, enumerate_error_vectors
from .network import Vertex, propagate

DEFAULT_DECODE_CAP = 5_000_000
_CHUNK = 4096


@dataclass(frozen=True)
class ErrorSchedule:
    """Errors (network use t, error vector w) in increasing t, at least ``spacing`` apart."""

    entries: tuple[tuple[int, tuple[int, ...]], ...]
    spacing: int

    def __post_init__(self):
        ts = [t for t, _ in self.entries]
        if any(t < 0 for t in ts):
            raise ValueError("network-use indices must be >= 0")
        if any(b - a < self.spacing for a, b in zip(ts, ts[1:])):
            raise ValueError(f"schedule entries closer than the declared spacing {self.spacing}")

    def error_matrix(self, num_uses: int, num_edges: int) -> np.ndarray:
        w = np.zeros((num_uses, num_edges), dtype=np.int64)
        for t, vec in self.entries:
            if t >= num_uses:
                raise ValueError(f"error scheduled at use {t}, transmission has {num_uses} uses")
            w[t] = vec
        return w

    def as_dict(self) -> dict:
        return {"spacing": self.spacing, "entries": [[t, list(v)] for t, v in self.entries]}


def make_schedule(
    phi: ErrorPatternSet, field: FieldSpec, num_uses: int, spacing: int, rng_seed
) -> ErrorSchedule:
    """Random schedule: each entry draws a pattern uniformly from Phi and
    uniform nonzero values on it; gaps are spacing + a uniform extra in
    [0, spacing)."""
    if spacing < 1:
        raise ValueError("spacing must be >= 1")
    rng = np.random.default_rng(rng_seed)
    patterns = phi.sorted_patterns()
    entries = []
    if patterns and num_uses >= 1:
        t = int(rng.integers(0, spacing))
        while t < num_uses:
            rho = patterns[int(rng.integers(len(patterns)))]
            w = [0] * phi.num_edges
            for e in rho:
                w[e] = int(rng.integers(1, field.q))
            entries.append((t, tuple(w)))
            t += spacing + int(rng.integers(0, spacing))
    return ErrorSchedule(tuple(entries), spacing)


@dataclass(frozen=True, eq=False)
class TrialReport:
    message: np.ndarray
    decoded: dict
    success: dict
    schedule: ErrorSchedule
    seed: object = None

    @property
    def all_ok(self) -> bool:
        return all(self.success.values())

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "message": self.message.tolist(),
            "schedule": self.schedule.as_dict(),
            "sinks": {
                str(t): {"decoded": self.decoded[t].tolist(), "success": self.success[t]}
                for t in self.decoded
            },
        }


def transmit(report: ConstructionReport, message, errors=None) -> dict[Vertex, np.ndarray]:
    """Encode (flushed) and push every code block through the network.

    ``errors`` is an (L, |E|) matrix of per-use edge errors, optionally with
    leading batch dimensions matching a batched ``message``.
    """
    x = encode(report.input_fsm, message, flush=True)
    return propagate(report.transfer, x, errors)


def run_experiment(
    report: ConstructionReport, message, schedule: ErrorSchedule, seed=None, method: str = "window"
) -> TrialReport:
    msg = np.asarray(message, dtype=np.int64)
    if msg.ndim == 1:
        msg = msg[:, None]
    num_uses = msg.shape[0] + report.input_fsm.nu_max
    w = schedule.error_matrix(num_uses, report.transfer.num_edges)
    received = transmit(report, msg, w)
    decoded, success = {}, {}
    for plan in report.plans:
        d = decode_sink(plan, received[plan.sink], method)
        decoded[plan.sink] = d
        success[plan.sink] = bool(np.array_equal(d, msg))
    return TrialReport(msg, decoded, success, schedule, seed)


def run_trials(
    report: ConstructionReport,
    num_trials: int,
    message_len: int,
    spacing: int,
    seed: int,
    method: str = "window",
) -> "SimulationSummary":
    """Random messages and random schedules; each trial gets its own child seed."""
    k = report.code.rows
    q = report.field.q
    num_uses = message_len + report.input_fsm.nu_max
    trials = {t: 0 for t in report.transfer.sinks}
    failures = {t: 0 for t in report.transfer.sinks}
    children = np.random.SeedSequence(seed).spawn(num_trials)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        msg = rng.integers(0, q, size=(message_len, k))
        sched = make_schedule(report.phi, report.field, num_uses, spacing, rng)
        tr = run_experiment(report, msg, sched, [seed, i], method)
        for t, ok in tr.success.items():
            trials[t] += 1
            failures[t] += not ok
    return SimulationSummary("random", trials, failures, seed, message_len, num_trials, spacing)


@dataclass(frozen=True)
class SimulationSummary:
    mode: str
    trials: dict
    failures: dict
    seed: object
    message_len: int
    num_messages: int
    spacing: int | None

    @property
    def total_failures(self) -> int:
        return sum(self.failures.values())

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "message_len": self.message_len,
            "num_messages": self.num_messages,
            "spacing": self.spacing,
            "sinks": {str(t): {"trials": self.trials[t], "failures": self.failures[t]} for t in self.trials},
        }


def _error_positions(mode: str, num_uses: int, spacing: int | None) -> list[tuple[int, ...]]:
    if mode in ("single", "same-use"):
        return [(t,) for t in range(num_uses)]
    if mode == "paired":
        return [(a, b) for a, b in itertools.combinations(range(num_uses), 2) if b - a >= spacing]
    raise ValueError(f"unknown exhaustive mode {mode!r}")


def run_exhaustive(
    report: ConstructionReport,
    message_len: int,
    spacing: int | None = None,
    num_messages: int = 20,
    seed: int = 0,
    mode: str = "single",
    cap: int = DEFAULT_DECODE_CAP,
    method: str = "window",
) -> SimulationSummary:
    """Enumerate error placements for a fixed set of random messages.

    ``single``: every nonzero vector of W_Phi at every network use.
    ``paired``: every ordered pair of such vectors at every pair of uses at
    least ``spacing`` apart.
    ``same-use``: two distinct single-pattern errors summed in one use; this
    leaves the correction premise and serves as a negative control.
    """
    if spacing is None:
        spacing = report.metrics.tdfree
    f = report.field
    ts = report.transfer
    k = report.code.rows
    num_uses = message_len + report.input_fsm.nu_max
    w_all = enumerate_error_vectors(report.phi, f, ts.num_edges)
    w_nz = w_all[np.count_nonzero(w_all, axis=1) > 0]

    positions = _error_positions(mode, num_uses, spacing)
    if mode == "paired":
        combos = [(i, j) for i in range(len(w_nz)) for j in range(len(w_nz))]
    elif mode == "same-use":
        combos = [(i, j) for i, j in itertools.combinations(range(len(w_nz)), 2)
                  if not report.phi.matches(f.add(w_nz[i], w_nz[j]))]
    else:
        combos = [(i,) for i in range(len(w_nz))]
    per_message = len(positions) * len(combos)
    total = per_message * num_messages * len(ts.sinks)
    if total > cap:
        raise EnumerationTooLarge(f"{total} decodes exceed the cap of {cap}")

    rng = np.random.default_rng(seed)
    messages = rng.integers(0, f.q, size=(num_messages, message_len, k))
    images = {t: f.matmul(w_nz, ts.F_T[t].entries) for t in ts.sinks}
    trials = {t: 0 for t in ts.sinks}
    failures = {t: 0 for t in ts.sinks}
    jobs = [(pos, combo) for pos in positions for combo in combos]

    for msg in messages:
        clean = transmit(report, msg)
        for plan in report.plans:
            t = plan.sink
            img = images[t]
            for start in range(0, len(jobs), _CHUNK):
                chunk = jobs[start:start + _CHUNK]
                y = np.repeat(clean[t][None], len(chunk), axis=0)
                for b, (pos, combo) in enumerate(chunk):
                    if mode == "same-use":
                        y[b, pos[0]] = f.add(y[b, pos[0]], f.add(img[combo[0]], img[combo[1]]))
                    else:
                        for p, wi in zip(pos, combo):
                            y[b, p] = f.add(y[b, p], img[wi])
                decoded = decode_sink(plan, y, method)
                ok = np.all(decoded == msg[None], axis=(1, 2))
                trials[t] += len(chunk)
                failures[t] += int(np.count_nonzero(~ok))
    return SimulationSummary(mode, trials, failures, seed, message_len, num_messages, spacing)
