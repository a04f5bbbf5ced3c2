"""Monte Carlo evaluation: trial orchestration, FER/BER aggregation,
residual-weight statistics, and the hashing-bound reference threshold.

A trial fails when the residual (estimate + truth) is not a stabilizer,
i.e. when x_hat + x lies outside the row space of H_X or z_hat + z
outside the row space of H_Z.  Frame errors drive the FER; the
bit-error count (positions where either component of the residual is
set) is a diagnostic recorded on failures only and drives the BER.

Trials are independent work items: per-trial randomness is keyed by
(seed, point index, trial index), chunks of trials run on a process
pool, and results are folded back in trial order.  The stopping rule
(first of: F frame errors, T trials) is applied to that ordered stream,
so a point's result is bit-identical for any worker count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channel import PauliError, extract_syndrome, sample_error, trial_rng
from .codes import QuantumQcCode
from .decoder import DecodeOutcome, DecoderConfig, JointBpDecoder

__all__ = [
    "TrialRecord",
    "PointResult",
    "StopRule",
    "classify",
    "run_point",
    "run_sweep",
    "floor_statistics",
    "hashing_bound_threshold",
    "wilson_interval",
    "write_failure_log",
    "read_failure_log",
]

_CHUNK = 250  # trials per work item; fixed so results never depend on workers
_LOG2_3 = math.log2(3.0)


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of a single decoded frame."""

    trial_index: int
    converged: bool
    success: bool
    bit_errors: int
    residual_weight_x: int
    residual_weight_z: int
    iterations: int
    residual_x_support: tuple[int, ...] = ()
    residual_z_support: tuple[int, ...] = ()


@dataclass(frozen=True)
class StopRule:
    """Stop a point after min_frame_errors failures or max_trials trials."""

    min_frame_errors: int = 100
    max_trials: int = 1_000_000

    def __post_init__(self):
        if self.min_frame_errors < 1 or self.max_trials < 1:
            raise ValueError("stopping rule bounds must be >= 1")


@dataclass(frozen=True)
class PointResult:
    """Aggregate of one (code, p_d) Monte Carlo point."""

    p_d: float
    n: int
    trials: int
    frame_errors: int
    total_bit_errors: int
    total_iterations: int
    fer: float
    ber: float
    ci_low: float
    ci_high: float
    weight_histogram: dict[int, int] = field(default_factory=dict)
    failures: tuple[TrialRecord, ...] = ()

    @property
    def mean_iterations(self) -> float:
        return self.total_iterations / self.trials if self.trials else 0.0


def classify(
    code: QuantumQcCode,
    truth: PauliError,
    outcome: DecodeOutcome,
    trial_index: int = 0,
) -> TrialRecord:
    """Judge a decode against the degeneracy-aware success criterion.

    Success iff x_hat + x is in the row space of H_X and z_hat + z in
    the row space of H_Z (the residual acts trivially on the code
    space).  On failure, bit_errors counts qubits where either residual
    component is set, and the residual supports are retained for
    error-floor analysis.
    """
    if truth.n != code.n or outcome.x_hat.shape != (code.n,):
        raise ValueError("truth/outcome dimensions do not match the code")
    res_x = truth.x ^ outcome.x_hat
    res_z = truth.z ^ outcome.z_hat
    success = code.x_stabilizers.contains(res_x) and code.z_stabilizers.contains(res_z)
    wx = int(res_x.sum())
    wz = int(res_z.sum())
    if success:
        return TrialRecord(
            trial_index=trial_index,
            converged=outcome.converged,
            success=True,
            bit_errors=0,
            residual_weight_x=wx,
            residual_weight_z=wz,
            iterations=outcome.iterations,
        )
    bit_errors = int((res_x | res_z).sum())
    return TrialRecord(
        trial_index=trial_index,
        converged=outcome.converged,
        success=False,
        bit_errors=bit_errors,
        residual_weight_x=wx,
        residual_weight_z=wz,
        iterations=outcome.iterations,
        residual_x_support=tuple(int(i) for i in np.flatnonzero(res_x)),
        residual_z_support=tuple(int(i) for i in np.flatnonzero(res_z)),
    )


def _run_trial(
    code: QuantumQcCode,
    decoder: JointBpDecoder,
    p_d: float,
    seed: int,
    point_index: int,
    trial_index: int,
) -> TrialRecord:
    rng = trial_rng(seed, point_index, trial_index)
    truth = sample_error(code.n, p_d, rng)
    syn = extract_syndrome(code, truth)
    outcome = decoder.decode(syn, p_d)
    return classify(code, truth, outcome, trial_index=trial_index)


# Per-process cache so one worker builds the decoder and stabilizer
# bases once per run instead of once per chunk.
_worker_state: dict = {}


def _run_chunk(args) -> list[TrialRecord]:
    token, code, p_d, cfg, seed, point_index, start, count = args
    state = _worker_state.get(token)
    if state is None:
        decoder = JointBpDecoder.for_code(code, cfg)
        _ = code.x_stabilizers  # build the stabilizer bases once per worker
        _ = code.z_stabilizers
        _worker_state.clear()
        _worker_state[token] = state = (code, decoder)
    code, decoder = state
    return [
        _run_trial(code, decoder, p_d, seed, point_index, t)
        for t in range(start, start + count)
    ]


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (default 95%)."""
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    lo = 0.0 if k == 0 else max(0.0, center - half)  # exact at the endpoints
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def _aggregate(
    p_d: float,
    n: int,
    records: Sequence[TrialRecord],
    max_logged_failures: int,
) -> PointResult:
    frame_errors = 0
    total_bit_errors = 0
    total_iterations = 0
    histogram: dict[int, int] = {}
    failures: list[TrialRecord] = []
    for rec in records:
        total_iterations += rec.iterations
        if not rec.success:
            frame_errors += 1
            total_bit_errors += rec.bit_errors
            histogram[rec.bit_errors] = histogram.get(rec.bit_errors, 0) + 1
            if len(failures) < max_logged_failures:
                failures.append(rec)
    trials = len(records)
    ci_low, ci_high = wilson_interval(frame_errors, trials)
    return PointResult(
        p_d=p_d,
        n=n,
        trials=trials,
        frame_errors=frame_errors,
        total_bit_errors=total_bit_errors,
        total_iterations=total_iterations,
        fer=frame_errors / trials if trials else 0.0,
        ber=total_bit_errors / (trials * n) if trials else 0.0,
        ci_low=ci_low,
        ci_high=ci_high,
        weight_histogram=histogram,
        failures=tuple(failures),
    )


def run_point(
    code: QuantumQcCode,
    p_d: float,
    stop: StopRule,
    seed: int,
    cfg: DecoderConfig | None = None,
    workers: int | None = None,
    point_index: int = 0,
    max_logged_failures: int = 1000,
) -> PointResult:
    """Monte Carlo estimate of FER/BER at one physical error rate.

    Trials run in fixed chunks on a process pool (workers=1 stays in
    process) and are folded in trial order, so the stopping rule cuts
    the stream at the same trial for any worker count: results are
    bit-identical for a fixed (code, p_d, stop, seed, cfg).
    """
    if not 0.0 <= p_d < 1.0:
        raise ValueError(f"p_d must be in [0, 1), got {p_d}")
    cfg = cfg or DecoderConfig()
    token = (seed, point_index, id(code))

    def chunk_args(chunk_idx: int):
        start = chunk_idx * _CHUNK
        count = min(_CHUNK, stop.max_trials - start)
        return (token, code, p_d, cfg, seed, point_index, start, count)

    n_chunks = (stop.max_trials + _CHUNK - 1) // _CHUNK
    records: list[TrialRecord] = []
    frame_errors = 0

    def consume(chunk: list[TrialRecord]) -> bool:
        """Fold one chunk; True when the stopping rule fires."""
        nonlocal frame_errors
        for rec in chunk:
            records.append(rec)
            if not rec.success:
                frame_errors += 1
                if frame_errors >= stop.min_frame_errors:
                    return True
        return False

    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1:
        try:
            for idx in range(n_chunks):
                if consume(_run_chunk(chunk_args(idx))):
                    break
        finally:
            _worker_state.clear()
    else:
        window = 2 * workers
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pending = {
                idx: pool.submit(_run_chunk, chunk_args(idx))
                for idx in range(min(window, n_chunks))
            }
            next_submit = len(pending)
            done = False
            for idx in range(n_chunks):
                if done or idx not in pending:
                    break
                chunk = pending.pop(idx).result()
                done = consume(chunk)
                if not done and next_submit < n_chunks:
                    pending[next_submit] = pool.submit(
                        _run_chunk, chunk_args(next_submit)
                    )
                    next_submit += 1
            for fut in pending.values():
                fut.cancel()
    return _aggregate(p_d, code.n, records, max_logged_failures)


def run_sweep(
    code: QuantumQcCode,
    p_grid: Sequence[float],
    stop: StopRule,
    seed: int,
    cfg: DecoderConfig | None = None,
    workers: int | None = None,
    max_logged_failures: int = 1000,
) -> list[PointResult]:
    """One :func:`run_point` per grid value, monotone grid required.

    Each point gets an independent random stream via its grid index.
    """
    if len(p_grid) == 0:
        raise ValueError("p_grid must be non-empty")
    diffs = np.diff(np.asarray(p_grid, dtype=float))
    if len(p_grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValueError("p_grid must be strictly increasing or decreasing")
    return [
        run_point(
            code,
            float(p),
            stop,
            seed,
            cfg,
            workers=workers,
            point_index=i,
            max_logged_failures=max_logged_failures,
        )
        for i, p in enumerate(p_grid)
    ]


def floor_statistics(
    bit_error_counts: Iterable[int], L: int, k_values: Sequence[int]
) -> dict[int, float | None]:
    """Fraction of failures confined to k*L bits or fewer, per k.

    Args:
        bit_error_counts: bit_errors of the failed trials under study.
        L: Row weight used as the size unit.
        k_values: Multipliers to evaluate.

    Returns:
        Map k -> fraction over failures, or k -> None when there are no
        failures at all (explicitly "no data", not 1.0).
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    counts = list(bit_error_counts)
    if not counts:
        return {int(k): None for k in k_values}
    total = len(counts)
    return {
        int(k): sum(1 for w in counts if w <= k * L) / total for k in k_values
    }


def _entropy_plus_pauli(p: float) -> float:
    """H2(p) + p * log2(3); strictly increasing on [0, 3/4]."""
    if p <= 0.0:
        return 0.0
    h2 = -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)
    return h2 + p * _LOG2_3


def hashing_bound_threshold(rate) -> float:
    """Depolarizing rate at which the hashing bound equals the code rate.

    Solves 1 - rate = H2(p) + p*log2(3) for the unique p in [0, 3/4] by
    bisection; the interval is shrunk far below the 1e-10 tolerance so
    the equation residual at the returned point is also below 1e-10.
    """
    r = float(rate)
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    target = 1.0 - r
    if target == 0.0:
        return 0.0
    lo, hi = 0.0, 0.75
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if _entropy_plus_pauli(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def write_failure_log(path, p_d: float, failures: Iterable[TrialRecord]) -> None:
    """Append failure records as JSON lines (see README for the schema)."""
    with open(path, "a", encoding="utf-8") as fh:
        for rec in failures:
            fh.write(
                json.dumps(
                    {
                        "trial": rec.trial_index,
                        "p_d": p_d,
                        "bit_errors": rec.bit_errors,
                        "residual_weight_x": rec.residual_weight_x,
                        "residual_weight_z": rec.residual_weight_z,
                        "iterations": rec.iterations,
                        "residual_x_support": list(rec.residual_x_support),
                        "residual_z_support": list(rec.residual_z_support),
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_failure_log(path) -> list[dict]:
    """Read one failure-log file written by :func:`write_failure_log`."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out
