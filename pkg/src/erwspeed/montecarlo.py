"""Monte Carlo sampling of excited random walk.

Random streams
--------------
Replica ``r`` of a run with seed ``s`` draws its uniforms from numpy's
counter-based ``Philox`` generator with key ``(s, r)``; an uncoupled beta scan
additionally puts the grid index in the high word of the counter.  Each step
consumes two uniforms ``(u1, u2)``: ``u1`` picks the coordinate
``k = floor(d * u1)`` (probability 1/d each, for every beta) and ``u2`` picks
the sign, ``+`` iff ``u2 < (1 + beta)/2`` on an excited step in coordinate 1
and iff ``u2 < 1/2`` otherwise.  Runs with equal streams therefore agree step
by step wherever their kernels agree, which is the common-random-numbers
coupling used by :func:`scan_beta`.

Results are assembled per replica into preallocated arrays and reduced in
replica order, so outputs do not depend on the thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numba
import numpy as np

from .core import ModelParams
from .errors import DomainError

ENDPOINT = "endpoint"
FRESH_SITE = "fresh-site"
ESTIMATORS = (ENDPOINT, FRESH_SITE)

_BLOCK = 500
_HASH_MULT = np.array([0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F, 0x165667B19E3779F9,
                       0xD6E8FEB86659FD93, 0xFF51AFD7ED558CCD, 0xC4CEB9FE1A85EC53,
                       0x27D4EB2F165667C5, 0x94D049BB133111EB, 0xBF58476D1CE4E5B9,
                       0x2545F4914F6CDD1D, 0x9FB21C651E98DF25, 0x5851F42D4C957F2D],
                      dtype=np.uint64).view(np.int64)


@dataclass(frozen=True)
class SimConfig:
    steps: int = 2000
    replicas: int = 10_000
    seed: int = 0
    window: Optional[int] = None
    threads: int = 1

    def __post_init__(self):
        if self.steps < 1 or self.replicas < 1:
            raise DomainError("steps and replicas must be >= 1")
        if self.window is not None and not 1 <= self.window <= self.steps:
            raise DomainError("window must lie in [1, steps]")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise DomainError("threads >= 1")

    @property
    def effective_window(self) -> int:
        return self.window if self.window is not None else max(1, self.steps // 2)


@dataclass(frozen=True)
class DriftEstimate:
    params: ModelParams
    estimator: str
    mean: tuple
    stderr: tuple
    config: SimConfig


@dataclass(frozen=True)
class BetaScanReport:
    d: int
    betas: tuple
    estimates: tuple
    paired_diffs: tuple  # ((mean, stderr), ...) for adjacent grid points, coordinate 1
    coupled: bool
    estimator: str = ENDPOINT


@numba.njit(nogil=True, cache=True)
def _walk_block(u, d, beta, n, window, mult, endpoints, fresh_counts, flags):
    """Run one ERW per row of ``u`` (shape ``(R, 2n)``).

    Writes the endpoint, the number of fresh steps among the last ``window``
    and, if ``flags`` has R rows, the per-step freshness flags.
    """
    R = u.shape[0]
    size = 16
    while size < 4 * (n + 1):
        size *= 2
    mask = size - 1
    keys = np.zeros((size, d), dtype=np.int32)
    stamp = np.zeros(size, dtype=np.int64)
    pos = np.zeros(d, dtype=np.int64)
    record = flags.shape[0] == R
    plus_excited = 0.5 * (1.0 + beta)
    for r in range(R):
        tag = r + 1
        for i in range(d):
            pos[i] = 0
        h = np.int64(0)
        count = 0
        for t in range(n):
            slot = ((h * np.int64(-7046029254386353131)) >> 40) & mask
            found = False
            while stamp[slot] == tag:
                same = True
                for i in range(d):
                    if keys[slot, i] != pos[i]:
                        same = False
                        break
                if same:
                    found = True
                    break
                slot = (slot + 1) & mask
            fresh = not found
            if fresh:
                stamp[slot] = tag
                for i in range(d):
                    keys[slot, i] = pos[i]
                if t >= n - window:
                    count += 1
            if record:
                flags[r, t] = fresh
            k = int(u[r, 2 * t] * d)
            if k >= d:
                k = d - 1
            thr = plus_excited if (k == 0 and fresh) else 0.5
            if u[r, 2 * t + 1] < thr:
                pos[k] += 1
                h += mult[k]
            else:
                pos[k] -= 1
                h -= mult[k]
        for i in range(d):
            endpoints[r, i] = pos[i]
        fresh_counts[r] = count
    return 0


def _multipliers(d: int) -> np.ndarray:
    reps = -(-d // len(_HASH_MULT))
    return np.tile(_HASH_MULT, reps)[:d].copy()


def replica_stream(seed: int, replica: int, lane: int = 0) -> np.random.Generator:
    """The Philox stream of one replica (``lane`` separates uncoupled scan points)."""
    key = np.array([seed, replica], dtype=np.uint64)
    counter = np.array([0, 0, lane, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _uniforms(seed: int, lo: int, hi: int, n: int, lane: int = 0) -> np.ndarray:
    u = np.empty((hi - lo, 2 * n))
    for j, r in enumerate(range(lo, hi)):
        replica_stream(seed, r, lane).random(out=u[j])
    return u


_NO_FLAGS = np.zeros((0, 0), dtype=np.bool_)


def simulate_path(params: ModelParams, n: int, stream: np.random.Generator):
    """One ERW trajectory of ``n`` steps.

    Returns ``(endpoint, fresh)`` where ``fresh[t]`` says whether the walk was
    at a new site at time t (and so took an excited step).
    """
    if n < 1:
        raise DomainError("n >= 1")
    d = params.d
    u = stream.random((1, 2 * n))
    end = np.zeros((1, d), dtype=np.int64)
    cnt = np.zeros(1, dtype=np.int64)
    flags = np.zeros((1, n), dtype=np.bool_)
    _walk_block(u, d, float(params.beta), n, n, _multipliers(d), end, cnt, flags)
    return tuple(int(v) for v in end[0]), flags[0].copy()


def _run(d: int, betas: Sequence[float], cfg: SimConfig, lanes: Sequence[int]):
    """Endpoints ``(B, R, d)`` and window fresh counts ``(B, R)`` for each beta.

    Betas sharing a lane share their uniforms.
    """
    n, R = cfg.steps, cfg.replicas
    window = cfg.effective_window
    mult = _multipliers(d)
    B = len(betas)
    ends = np.zeros((B, R, d), dtype=np.int64)
    counts = np.zeros((B, R), dtype=np.int64)
    blocks = [(lo, min(lo + _BLOCK, R)) for lo in range(0, R, _BLOCK)]

    def work(block):
        lo, hi = block
        cache = {}
        for j, beta in enumerate(betas):
            lane = lanes[j]
            if lane not in cache:
                cache = {lane: _uniforms(cfg.seed, lo, hi, n, lane)}
            _walk_block(cache[lane], d, float(beta), n, window, mult,
                        ends[j, lo:hi], counts[j, lo:hi], _NO_FLAGS)

    if cfg.threads == 1:
        for blk in blocks:
            work(blk)
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            list(pool.map(work, blocks))
    return ends, counts


def _per_replica(d: int, beta: float, cfg: SimConfig, ends, counts, estimator):
    """Per-replica estimates, shape ``(R, d)``."""
    if estimator == ENDPOINT:
        return ends / cfg.steps
    if estimator == FRESH_SITE:
        out = np.zeros((ends.shape[0], d))
        out[:, 0] = (beta / d) * (counts / cfg.effective_window)
        return out
    raise DomainError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")


def _mean_stderr(samples: np.ndarray):
    R = samples.shape[0]
    mean = samples.mean(axis=0)
    if R > 1:
        err = samples.std(axis=0, ddof=1) / math.sqrt(R)
    else:
        err = np.zeros_like(mean)
    return tuple(float(v) for v in mean), tuple(float(v) for v in err)


def estimate_drift(params: ModelParams, cfg: SimConfig, estimator: str = ENDPOINT) -> DriftEstimate:
    """Drift estimate from ``cfg.replicas`` independent walks.

    ``endpoint`` averages ``omega_n / n``; ``fresh-site`` averages
    ``(beta/d) * (fraction of fresh times in the trailing window)`` on
    coordinate 1 and is exactly zero elsewhere.
    """
    if estimator not in ESTIMATORS:
        raise DomainError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")
    return estimate_drift_both(params, cfg)[estimator]


def estimate_drift_both(params: ModelParams, cfg: SimConfig) -> dict:
    """Both estimators from the same set of trajectories."""
    beta = float(params.beta)
    ends, counts = _run(params.d, [beta], cfg, [0])
    out = {}
    for est in ESTIMATORS:
        samples = _per_replica(params.d, beta, cfg, ends[0], counts[0], est)
        mean, err = _mean_stderr(samples)
        out[est] = DriftEstimate(params, est, mean, err, cfg)
    return out


def scan_beta(d: int, betas: Sequence[float], cfg: SimConfig, coupled: bool = True,
              estimator: str = ENDPOINT) -> BetaScanReport:
    """Drift over a beta grid, with paired differences between adjacent points.

    With ``coupled=True`` every grid point reuses the same uniforms per
    replica and step; otherwise each grid point gets its own stream lane.
    The grid must be nondecreasing in [0, 1] (repeated values are allowed).
    """
    betas = tuple(float(b) for b in betas)
    if not betas:
        raise DomainError("empty beta grid")
    if any(not 0 <= b <= 1 for b in betas) or any(x > y for x, y in zip(betas, betas[1:])):
        raise DomainError("beta grid must be nondecreasing within [0, 1]")
    lanes = [0] * len(betas) if coupled else list(range(1, len(betas) + 1))
    ends, counts = _run(d, betas, cfg, lanes)
    samples = [_per_replica(d, b, cfg, ends[j], counts[j], estimator) for j, b in enumerate(betas)]
    estimates = []
    for j, b in enumerate(betas):
        mean, err = _mean_stderr(samples[j])
        estimates.append(DriftEstimate(ModelParams(d, b), estimator, mean, err, cfg))
    diffs = []
    for j in range(len(betas) - 1):
        delta = samples[j + 1][:, 0] - samples[j][:, 0]
        mean, err = _mean_stderr(delta[:, None])
        diffs.append((mean[0], err[0]))
    return BetaScanReport(d, betas, tuple(estimates), tuple(diffs), coupled, estimator)
