"""Exact constrained assignment search over block partitions.

Fills a (T, n_max+1, C) tensor bottom-up: cell (t, n, c) holds the optimal
cumulative cost of assignments of points 0..t that end in cluster c, use
exactly n transitions and keep every block at least ``min_block`` long.
Each cell is the better of two moves: extend the current block by one
point, or close a fresh block of exactly ``min_block`` points opened right
after a transition from a different cluster. Backpointers make path
reconstruction linear in T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Assignment, Constraints, CostTable
from .errors import AllInfeasible, CorruptBackpointer, Infeasible

# backpointer kinds
_INVALID = 0
_INIT = 1
_STAY = 2
_TRANS = 3


@dataclass(frozen=True)
class DpTensor:
    """Filled cost tensor with backpointers.

    ``omega[t, n, c]`` is +inf when no feasible assignment of 0..t ends in
    cluster c with exactly n transitions. ``back_from`` holds the source
    cluster of a transition edge and -1 elsewhere.
    """

    omega: np.ndarray
    back_kind: np.ndarray
    back_from: np.ndarray
    min_block: int
    n_max: int
    n_clusters: int
    active: frozenset[int]


def fill(cost_table: CostTable, constraints: Constraints) -> DpTensor:
    """Bottom-up fill of the recurrence over (t, n, c).

    The transition move closes a window of exactly ``min_block`` points,
    so its cost is a prefix-sum lookup plus the best predecessor cell over
    all other clusters; the best and second-best predecessor per (t, n)
    row are precomputed so each cell costs O(1).
    """
    t_total, n_clusters = cost_table.costs.shape
    mb = constraints.min_block
    n_max = constraints.n_max
    if t_total < mb:
        raise Infeasible(f"series of length {t_total} cannot hold one block of {mb}")

    costs = cost_table.costs
    omega = np.full((t_total, n_max + 1, n_clusters), np.inf)
    back_kind = np.zeros((t_total, n_max + 1, n_clusters), dtype=np.int8)
    back_from = np.full((t_total, n_max + 1, n_clusters), -1, dtype=np.int32)

    # before the first block completes nothing is feasible; the first
    # finite row is the length-mb head block at n = 0
    omega[mb - 1, 0, :] = cost_table.range_sum(0, mb - 1)
    back_kind[mb - 1, 0, :] = _INIT

    # window_sums[t] = cost of a fresh length-mb block ending at t
    window_sums = cost_table.window_sums(mb)

    col_ids = np.arange(n_clusters)
    row_ids = np.arange(n_max) if n_max else None
    for t in range(mb, t_total):
        omega[t, 0, :] = costs[t] + omega[t - 1, 0, :]
        back_kind[t, 0, :] = _STAY
        if n_max == 0:
            continue
        stay = costs[t][None, :] + omega[t - 1, 1:, :]
        # predecessors for the transition move: rows n-1 = 0..n_max-1 at t-mb
        source = omega[t - mb, :n_max, :]
        best = source.min(axis=1)
        best_at = source.argmin(axis=1)
        masked = source.copy()
        masked[row_ids, best_at] = np.inf
        second = masked.min(axis=1)
        second_at = masked.argmin(axis=1)
        is_best = col_ids[None, :] == best_at[:, None]
        min_other = np.where(is_best, second[:, None], best[:, None])
        from_other = np.where(is_best, second_at[:, None], best_at[:, None])
        trans = window_sums[t][None, :] + min_other
        take_trans = trans < stay  # exact ties keep the sparser stay move
        omega[t, 1:, :] = np.where(take_trans, trans, stay)
        back_kind[t, 1:, :] = np.where(take_trans, _TRANS, _STAY).astype(np.int8)
        back_from[t, 1:, :] = np.where(take_trans, from_other, -1)

    omega.setflags(write=False)
    back_kind.setflags(write=False)
    back_from.setflags(write=False)
    return DpTensor(
        omega=omega,
        back_kind=back_kind,
        back_from=back_from,
        min_block=mb,
        n_max=n_max,
        n_clusters=n_clusters,
        active=cost_table.active,
    )


def best_terminal(tensor: DpTensor) -> tuple[float, int, int]:
    """Minimum over the last step of (cost, n, c); ties prefer small n, then small c."""
    terminal = tensor.omega[-1]
    best = np.inf
    arg = None
    for n in range(tensor.n_max + 1):
        for c in range(tensor.n_clusters):
            value = terminal[n, c]
            if value < best:
                best = value
                arg = (n, c)
    if arg is None:
        raise AllInfeasible("every terminal cell is infinite")
    return float(best), arg[0], arg[1]


def backtrack(tensor: DpTensor, terminal: tuple[int, int]) -> Assignment:
    """Reconstruct the label vector reaching ``omega[T-1, n, c]``.

    A stay edge emits one label; a transition edge emits the whole
    ``min_block`` window at once and jumps to the predecessor cell.
    """
    n, c = terminal
    t = tensor.omega.shape[0] - 1
    mb = tensor.min_block
    labels = np.empty(tensor.omega.shape[0], dtype=np.int64)
    while True:
        if not np.isfinite(tensor.omega[t, n, c]):
            raise CorruptBackpointer(f"reached infinite cell (t={t}, n={n}, c={c})")
        kind = tensor.back_kind[t, n, c]
        if kind == _INIT:
            labels[: t + 1] = c
            break
        if kind == _STAY:
            labels[t] = c
            t -= 1
        elif kind == _TRANS:
            labels[t - mb + 1 : t + 1] = c
            source = int(tensor.back_from[t, n, c])
            t -= mb
            n -= 1
            c = source
        else:
            raise CorruptBackpointer(f"unset backpointer at (t={t}, n={n}, c={c})")
    return Assignment(labels)
