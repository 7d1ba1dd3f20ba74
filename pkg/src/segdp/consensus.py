"""Agreement metrics, restart consensus, grid search and region selection.

Independent restarts are reduced to one answer by picking the result with
the highest mean pairwise adjusted Rand index against the others. A sweep
over (n_grid, c_grid) then yields one consensus result per grid point, and
the final answer is read off the cost axis: the densest cost window whose
grid points are diverse in both n and c wins, falling back to the lowest
cost when no window qualifies.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .alternation import RunResult, run_once
from .core import Assignment, Constraints, SeriesMatrix
from .errors import LengthMismatch, SegdpError
from .parallel import parallel_map, resolve_workers


def _label_vector(a) -> np.ndarray:
    if isinstance(a, Assignment):
        return a.labels
    return np.asarray(a, dtype=np.int64)


def ari(a, b) -> float:
    """Adjusted Rand index between two labelings, exact from the contingency table."""
    la, lb = _label_vector(a), _label_vector(b)
    if la.shape[0] != lb.shape[0]:
        raise LengthMismatch(f"labelings of length {la.shape[0]} vs {lb.shape[0]}")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    contingency = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(contingency, (ia, ib), 1)

    def pairs(counts) -> int:
        counts = counts.astype(object)  # exact integer arithmetic
        return int(np.sum(counts * (counts - 1) // 2))

    index = pairs(contingency)
    sum_a = pairs(contingency.sum(axis=1))
    sum_b = pairs(contingency.sum(axis=0))
    total = la.shape[0] * (la.shape[0] - 1) // 2
    expected = sum_a * sum_b / total if total else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    denominator = max_index - expected
    if denominator == 0.0:
        return 1.0
    return (index - expected) / denominator


def mean_pairwise_ari(results: list[RunResult]) -> np.ndarray:
    """Mean ARI of each result against all the others (1.0 for a lone result)."""
    count = len(results)
    if count == 1:
        return np.ones(1)
    matrix = np.ones((count, count))
    for i in range(count):
        for j in range(i + 1, count):
            value = ari(results[i].assignment, results[j].assignment)
            matrix[i, j] = matrix[j, i] = value
    return (matrix.sum(axis=1) - 1.0) / (count - 1)


def consensus_index(results: list[RunResult]) -> int:
    """Index of the most-agreeing result; ties by lower cost, then lower seed."""
    if not results:
        raise ValueError("consensus requires at least one result")
    means = mean_pairwise_ari(results)
    ranked = sorted(
        range(len(results)),
        key=lambda i: (-means[i], results[i].cost, results[i].seed),
    )
    return ranked[0]


def consensus(results: list[RunResult]) -> RunResult:
    return results[consensus_index(results)]


def confusion_matrix(pred, truth) -> np.ndarray:
    """Count matrix: entry (i, j) is the number of points labeled i by the
    prediction and j by the reference."""
    lp, lt = _label_vector(pred), _label_vector(truth)
    if lp.shape[0] != lt.shape[0]:
        raise LengthMismatch(f"labelings of length {lp.shape[0]} vs {lt.shape[0]}")
    matrix = np.zeros((lp.max() + 1, lt.max() + 1), dtype=np.int64)
    np.add.at(matrix, (lp, lt), 1)
    return matrix


# ---------------------------------------------------------------------------
# restarts and grid search

def restart_seeds(master_seed: int, n_init: int, salt: int = 0) -> list[int]:
    """Deterministic per-restart integer seeds derived from a master seed."""
    seq = np.random.SeedSequence([int(master_seed), int(salt)])
    return [int(s) for s in seq.generate_state(n_init, np.uint64)]


def _run_task(task):
    series, adapter, constraints, seed, max_outer_iters = task
    try:
        return ("ok", run_once(series, adapter, constraints, seed, max_outer_iters))
    except SegdpError as exc:
        return ("error", f"{type(exc).__name__}: {exc}")


def fit_restarts(
    series: SeriesMatrix,
    adapter,
    constraints: Constraints,
    n_init: int,
    master_seed: int,
    max_outer_iters: int = 100,
    workers: int | None = None,
    salt: int = 0,
) -> list[RunResult]:
    """Run ``n_init`` independent seeded restarts; raises if every one fails."""
    seeds = restart_seeds(master_seed, n_init, salt)
    tasks = [(series, adapter, constraints, seed, max_outer_iters) for seed in seeds]
    outcomes = parallel_map(_run_task, tasks, resolve_workers(workers))
    results = [payload for status, payload in outcomes if status == "ok"]
    if not results:
        first_error = outcomes[0][1]
        raise SegdpError(f"every restart failed; first failure: {first_error}")
    return results


@dataclass(frozen=True)
class GridPoint:
    """Consensus answer for one (n_grid, c_grid) cell of the sweep."""

    n_grid: int
    c_grid: int
    result: RunResult | None
    cost: float
    error: str | None = None

    @property
    def n_effective(self) -> int:
        return self.result.assignment.n_transitions if self.result else -1

    @property
    def c_effective(self) -> int:
        return len(self.result.assignment.used_labels()) if self.result else -1


def suggested_grid(n_true: int, c_true: int, headroom: float = 1.5) -> tuple[int, int]:
    """Grid bounds sized from prior knowledge of the true (N, C)."""
    return int(headroom * n_true), max(1, int(headroom * c_true))


def grid_search(
    series: SeriesMatrix,
    adapter,
    min_block: int,
    epsilon: float,
    n_max_grid: int,
    c_max_grid: int,
    n_init: int,
    master_seed: int,
    max_outer_iters: int = 100,
    workers: int | None = None,
) -> list[GridPoint]:
    """Consensus result for each (n, c) in [0..n_max_grid] x [1..c_max_grid].

    Per-point failures are recorded on the grid point instead of aborting
    the sweep. Fully deterministic given the master seed regardless of the
    worker count.
    """
    if n_max_grid < 0 or c_max_grid < 1:
        raise ValueError("grid bounds must cover n >= 0 and c >= 1")
    cells = [
        (n, c) for n in range(n_max_grid + 1) for c in range(1, c_max_grid + 1)
    ]
    tasks = []
    for cell_index, (n, c) in enumerate(cells):
        constraints = Constraints(c_max=c, n_max=n, min_block=min_block, epsilon=epsilon)
        for seed in restart_seeds(master_seed, n_init, salt=cell_index):
            tasks.append((series, adapter, constraints, seed, max_outer_iters))
    outcomes = parallel_map(_run_task, tasks, resolve_workers(workers))

    points: list[GridPoint] = []
    for cell_index, (n, c) in enumerate(cells):
        cell_outcomes = outcomes[cell_index * n_init : (cell_index + 1) * n_init]
        results = [payload for status, payload in cell_outcomes if status == "ok"]
        if results:
            chosen = consensus(results)
            points.append(GridPoint(n_grid=n, c_grid=c, result=chosen, cost=chosen.cost))
        else:
            points.append(
                GridPoint(
                    n_grid=n,
                    c_grid=c,
                    result=None,
                    cost=float("inf"),
                    error=str(cell_outcomes[0][1]),
                )
            )
    return points


# ---------------------------------------------------------------------------
# final-answer selection on the cost axis

MOST_COMMON = "most_common"
LOWEST_COST = "lowest_cost"


@dataclass(frozen=True)
class SelectionPolicy:
    """Declared, overridable policy for the density/diversity criterion."""

    bins: int = 20
    window_bins: int = 1
    min_distinct_n: int = 3
    min_distinct_c: int = 3
    cost_tol: float = 1e-12


@dataclass(frozen=True)
class SelectionReport:
    mode: str
    chosen: GridPoint
    region: tuple[float, float]
    region_members: tuple[GridPoint, ...]
    rug: tuple[float, ...]


def lowest_cost_point(points: list[GridPoint]) -> GridPoint:
    usable = [p for p in points if p.result is not None]
    if not usable:
        raise SegdpError("no grid point produced a result")
    return min(usable, key=lambda p: (p.cost, p.n_grid, p.c_grid))


def select_region(points: list[GridPoint], policy: SelectionPolicy = SelectionPolicy()) -> SelectionReport:
    """Pick the final answer from the cost distribution of the grid.

    Costs are snapped to the comparison tolerance and histogrammed; the
    densest window of bins containing enough distinct n and c values wins,
    and the consensus over that window is the answer. Without a qualifying
    window the lowest-cost point is the answer.
    """
    usable = [p for p in points if p.result is not None]
    if not usable:
        raise SegdpError("no grid point produced a result")
    costs = np.array([p.cost for p in usable])
    if policy.cost_tol > 0:
        costs = np.round(costs / policy.cost_tol) * policy.cost_tol
    rug = tuple(sorted(float(c) for c in costs))
    low, high = float(costs.min()), float(costs.max())

    if high == low:
        windows = [(low, high, list(range(len(usable))))]
    else:
        width = (high - low) / policy.bins
        bin_of = np.clip(((costs - low) / width).astype(int), 0, policy.bins - 1)
        windows = []
        for start in range(policy.bins - policy.window_bins + 1):
            inside = np.flatnonzero(
                (bin_of >= start) & (bin_of < start + policy.window_bins)
            )
            windows.append(
                (low + start * width, low + (start + policy.window_bins) * width, list(inside))
            )

    qualifying = []
    for w_low, w_high, indices in windows:
        if not indices:
            continue
        distinct_n = len({usable[i].n_grid for i in indices})
        distinct_c = len({usable[i].c_grid for i in indices})
        if distinct_n >= policy.min_distinct_n and distinct_c >= policy.min_distinct_c:
            qualifying.append((w_low, w_high, indices))

    if not qualifying:
        chosen = lowest_cost_point(points)
        return SelectionReport(
            mode=LOWEST_COST,
            chosen=chosen,
            region=(chosen.cost, chosen.cost),
            region_members=(chosen,),
            rug=rug,
        )

    # most populated window; ties resolve to the lower-cost window
    w_low, w_high, indices = max(qualifying, key=lambda w: (len(w[2]), -w[0]))
    members = [usable[i] for i in indices]
    winner = consensus_index([p.result for p in members])
    return SelectionReport(
        mode=MOST_COMMON,
        chosen=members[winner],
        region=(float(w_low), float(w_high)),
        region_members=tuple(members),
        rug=rug,
    )
