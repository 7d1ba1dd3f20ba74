"""Outer loop: alternate cluster characterization with the exact assignment.

Starting from a constrained random assignment, each iteration refits the
cluster weights, rebuilds the cost table and lets the path finder produce
the optimal assignment under the constraints, until the total cost settles
within epsilon. The mean-based adapter descends monotonically; the
regression-based adapter may step uphill, so the best iterate seen is what
gets returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Assignment, ClusterWeights, Constraints, SeriesMatrix, build_cost_table, objective
from .dp_path import backtrack, best_terminal, fill
from .errors import AllClustersRemoved, Infeasible


@dataclass(frozen=True)
class RunResult:
    """One converged (or capped) run from a single random initialization."""

    assignment: Assignment
    weights: ClusterWeights
    cost: float
    iterations: int
    loss_trace: tuple[float, ...]
    seed: int
    converged: bool


def _uniform_composition(total: int, parts: int, rng) -> np.ndarray:
    """Uniform weak composition of ``total`` into ``parts`` nonnegative terms."""
    if parts == 1:
        return np.array([total], dtype=np.int64)
    slots = total + parts - 1
    bars = np.sort(rng.choice(slots, size=parts - 1, replace=False))
    edges = np.concatenate(([-1], bars, [slots]))
    return np.diff(edges) - 1


def random_assignment(c_max: int, t_total: int, n_max: int, min_block: int, rng) -> Assignment:
    """Draw an assignment satisfying the constraints uniformly-ish.

    The transition count is uniform over what fits, block lengths are a
    uniform composition of the slack above the per-block floor, and labels
    are uniform subject to adjacent blocks differing.
    """
    if t_total < min_block:
        raise Infeasible(f"series of length {t_total} cannot hold one block of {min_block}")
    n_feasible = min(n_max, t_total // min_block - 1)
    # a single cluster cannot satisfy "adjacent blocks differ"
    n = int(rng.integers(0, n_feasible + 1)) if c_max > 1 else 0
    lengths = min_block + _uniform_composition(t_total - (n + 1) * min_block, n + 1, rng)
    labels = np.empty(t_total, dtype=np.int64)
    position = 0
    previous = -1
    for length in lengths:
        if previous < 0:
            label = int(rng.integers(0, c_max))
        else:
            label = int(rng.integers(0, c_max - 1))
            if label >= previous:
                label += 1
        labels[position : position + length] = label
        position += length
        previous = label
    return Assignment(labels)


def run_once(
    series: SeriesMatrix,
    adapter,
    constraints: Constraints,
    seed: int,
    max_outer_iters: int = 100,
) -> RunResult:
    """One full alternation run from one seeded random initialization.

    The loss used for the convergence test is the objective of the fresh
    assignment under the weights that produced it. Returns the best-seen
    iterate by cost, which for the regression adapter need not be the last.
    """
    rng = np.random.default_rng(seed)
    assignment = random_assignment(
        constraints.c_max, series.n_points, constraints.n_max, constraints.min_block, rng
    )
    old_loss = math.inf
    current_loss = 0.0
    loss_trace: list[float] = []
    best: tuple[float, Assignment, ClusterWeights] | None = None
    converged = False
    while True:
        if abs(current_loss - old_loss) < constraints.epsilon:
            converged = True
            break
        if len(loss_trace) >= max_outer_iters:
            break
        weights = adapter.characterize(
            series, assignment, constraints.c_max, constraints.min_block
        )
        if not weights.active:
            raise AllClustersRemoved("characterization left no active cluster")
        table = build_cost_table(series, weights, adapter.affiliate, adapter.batch_affiliate)
        tensor = fill(table, constraints)
        _, n_star, c_star = best_terminal(tensor)
        assignment = backtrack(tensor, (n_star, c_star))
        old_loss = current_loss
        current_loss = objective(
            series, assignment, weights, adapter.affiliate, adapter.batch_affiliate
        )
        loss_trace.append(current_loss)
        if best is None or current_loss < best[0]:
            best = (current_loss, assignment, weights)
    if best is None:
        raise Infeasible("the run converged before producing any assignment")
    return RunResult(
        assignment=best[1],
        weights=best[2],
        cost=best[0],
        iterations=len(loss_trace),
        loss_trace=tuple(loss_trace),
        seed=int(seed),
        converged=converged,
    )
