"""Monte Carlo policy evaluation under common random numbers.

Every replication's demands come from a counter-based stream keyed by the
base seed and the replication index alone, so any two policies simulated
with the same config consume identical demand realizations. Sample size
grows until a normal-approximation confidence interval meets a relative
error target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import stats

from .heuristic import ModifiedSSPolicy
from .sdp import Instance, ValueTables

_CHUNK = 10_000   # replications per stream block, and the CI check cadence

PolicyFn = Callable[[np.ndarray, int], np.ndarray]


class SimulationError(RuntimeError):
    """Simulated optimal cost is inconsistent with the solved value table."""


@dataclass(frozen=True)
class SimulationConfig:
    base_seed: int
    confidence: float = 0.95
    target_rel_error: float = 1e-4
    min_reps: int = 1000
    max_reps: int = 50_000_000

    def __post_init__(self):
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must be in (0, 1)")
        if self.target_rel_error <= 0:
            raise ValueError("target_rel_error must be positive")
        if self.min_reps < 1000:
            raise ValueError("min_reps must be at least 1000")
        if self.min_reps > self.max_reps:
            raise ValueError("min_reps cannot exceed max_reps")


class SimulationEstimate(NamedTuple):
    mean_cost: float
    half_width: float
    reps: int
    converged: bool


def table_policy(tables: ValueTables) -> PolicyFn:
    """Vectorized lookup of the optimal action table; off-grid states clip."""
    x_min, x_max = tables.grid.x_min, tables.grid.x_max

    def policy(xs: np.ndarray, period: int) -> np.ndarray:
        idx = np.clip(xs, x_min, x_max) - x_min
        return tables.Qstar[period - 1, idx]

    return policy


def modified_ss_policy(policy: ModifiedSSPolicy, B: int | float) -> PolicyFn:
    """Vectorized order-up-to-S-below-s dispatch of a modified (s, S) policy."""
    cap = B

    def fn(xs: np.ndarray, period: int) -> np.ndarray:
        s = policy.s[period - 1]
        if s is None:
            return np.zeros(xs.size, dtype=np.int64)
        big = policy.S[period - 1]
        q = np.minimum(big - xs, cap) if cap != math.inf else big - xs
        return np.where(xs <= s, q, 0).astype(np.int64)

    return fn


def _chunk_uniforms(base_seed: int, chunk_index: int, rows: int, cols: int) -> np.ndarray:
    seq = np.random.SeedSequence(entropy=base_seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(seq)).random((rows, cols))


def _chunk_costs(instance: Instance, policy: PolicyFn, x0: int,
                 base_seed: int, chunk_index: int, rows: int) -> np.ndarray:
    """Total discounted cost of `rows` replications from one stream block."""
    n = instance.horizon
    u = _chunk_uniforms(base_seed, chunk_index, rows, n)
    x = np.full(rows, x0, dtype=np.int64)
    total = np.zeros(rows)
    factor = 1.0
    for period in range(1, n + 1):
        pmf = instance.demands[period - 1]
        q = policy(x, period)
        cum = pmf.cum_probs
        d_idx = np.minimum(np.searchsorted(cum, u[:, period - 1], side="right"),
                           cum.size - 1)
        d = pmf.support_arr[d_idx]
        level = x + q - d
        cost = (np.where(q > 0, instance.K + instance.v * q, 0.0)
                + instance.h * np.maximum(level, 0)
                + instance.p * np.maximum(-level, 0))
        total += factor * cost
        factor *= instance.discount
        x = level
    return total


def simulate_policy(instance: Instance, policy: PolicyFn, x0: int,
                    config: SimulationConfig) -> SimulationEstimate:
    """Estimate a policy's expected total cost from x0 by replication.

    policy must be vectorized: policy(states_array, period) -> quantities.
    Returns once the half-width is within target_rel_error of the mean, or
    with converged=False when max_reps is exhausted first.
    """
    z = stats.norm.ppf(0.5 + config.confidence / 2.0)
    total = 0.0
    total_sq = 0.0
    reps = 0
    chunk_index = 0
    while True:
        rows = min(_CHUNK, config.max_reps - reps)
        costs = _chunk_costs(instance, policy, x0, config.base_seed, chunk_index, rows)
        total += costs.sum()
        total_sq += (costs * costs).sum()
        reps += rows
        chunk_index += 1
        if reps >= config.min_reps:
            mean = total / reps
            var = max(total_sq - total * total / reps, 0.0) / (reps - 1)
            half = z * math.sqrt(var / reps)
            target = config.target_rel_error * abs(mean)
            if half <= target and (mean != 0.0 or half == 0.0):
                return SimulationEstimate(mean, half, reps, True)
        if reps >= config.max_reps:
            return SimulationEstimate(mean, half, reps, False)


def gap_with_estimates(instance: Instance, tables: ValueTables,
                       heuristic: ModifiedSSPolicy, x0: int,
                       config: SimulationConfig,
                       ) -> tuple[float, SimulationEstimate, SimulationEstimate]:
    """Heuristic-vs-optimal percent gap plus the two underlying estimates.

    Both policies are simulated on the same demand streams. The optimal
    policy's simulated mean is cross-checked against the solved value at
    (first period, x0) within three half-widths.
    """
    opt = simulate_policy(instance, table_policy(tables), x0, config)
    heur = simulate_policy(instance, modified_ss_policy(heuristic, instance.B),
                           x0, config)
    dp_value = tables.cost_at(1, x0)
    slack = max(3.0 * opt.half_width, 1e-9)
    if abs(opt.mean_cost - dp_value) > slack:
        raise SimulationError(
            f"simulated optimal cost {opt.mean_cost:.6f} is more than three "
            f"half-widths ({opt.half_width:.6f}) from the solved value {dp_value:.6f}")
    gap = 100.0 * (heur.mean_cost - opt.mean_cost) / opt.mean_cost
    return gap, opt, heur


def optimality_gap(instance: Instance, tables: ValueTables,
                   heuristic: ModifiedSSPolicy, x0: int,
                   config: SimulationConfig) -> float:
    """Percent cost excess of the heuristic over the optimal table policy."""
    return gap_with_estimates(instance, tables, heuristic, x0, config)[0]
