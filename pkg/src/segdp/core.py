"""Domain types, the clustering objective, and cost-table construction.

The central objects are a ``SeriesMatrix`` (the T x d observations), an
``Assignment`` (per-point cluster labels with derived block structure),
``ClusterWeights`` (per-cluster model parameters) and a ``CostTable``
holding every per-point affiliation cost f(x_t, w_c) together with prefix
sums so that the sum of a cost window is an O(1) lookup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InactiveLabel, NonFiniteCost

WS_COLUMN_ROLES = ("f_clay", "phi", "sw", "rho_o")
_FRACTION_ROLES = frozenset({"f_clay", "phi", "sw"})


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SeriesMatrix:
    """A T x d matrix of observations with named column roles.

    When the roles are exactly ``f_clay, phi, sw, rho_o`` the fraction
    columns must lie in [0, 1] and rho_o must be strictly positive; this is
    validated on construction so a bad CSV fails at load time.
    """

    values: np.ndarray
    column_roles: tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("series must be a T x d matrix with T >= 1 and d >= 1")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains non-finite entries")
        roles = tuple(self.column_roles)
        if len(roles) != values.shape[1]:
            raise ValueError(
                f"got {len(roles)} column roles for a series of dimension {values.shape[1]}"
            )
        if roles == WS_COLUMN_ROLES:
            for j, role in enumerate(roles):
                col = values[:, j]
                if role in _FRACTION_ROLES and (col.min() < 0.0 or col.max() > 1.0):
                    raise ValueError(f"column {role!r} must lie in [0, 1]")
                if role == "rho_o" and col.min() <= 0.0:
                    raise ValueError("column 'rho_o' must be strictly positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_roles", roles)

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def column(self, role: str) -> np.ndarray:
        return self.values[:, self.column_roles.index(role)]


@dataclass(frozen=True)
class Assignment:
    """A length-T label vector plus its derived block structure.

    ``blocks`` is a tuple of ``(start, end, label)`` half-open maximal runs
    partitioning ``range(T)``; adjacent blocks carry different labels by
    construction, so ``n_transitions == len(blocks) - 1``.
    """

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] < 1:
            raise ValueError("labels must be a non-empty 1-d vector")
        if labels.dtype.kind == "f":
            if not np.all(labels == np.round(labels)):
                raise ValueError("labels must be integers")
        labels = labels.astype(np.int64)
        if labels.min() < 0:
            raise ValueError("labels must be nonnegative cluster ids")
        cuts = np.flatnonzero(np.diff(labels)) + 1
        starts = np.concatenate(([0], cuts))
        ends = np.concatenate((cuts, [labels.shape[0]]))
        blocks = tuple(
            (int(s), int(e), int(labels[s])) for s, e in zip(starts, ends)
        )
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_blocks", blocks)

    @property
    def n_points(self) -> int:
        return self.labels.shape[0]

    @property
    def blocks(self) -> tuple[tuple[int, int, int], ...]:
        return self._blocks

    @property
    def n_transitions(self) -> int:
        return len(self._blocks) - 1

    def used_labels(self) -> tuple[int, ...]:
        return tuple(sorted(set(int(b[2]) for b in self._blocks)))

    def min_block_length(self) -> int:
        return min(e - s for s, e, _ in self._blocks)

    def satisfies(self, constraints: "Constraints") -> bool:
        """Check transitions, distinct-label count, ids and block lengths."""
        return (
            self.n_transitions <= constraints.n_max
            and len(self.used_labels()) <= constraints.c_max
            and max(self.used_labels()) < constraints.c_max
            and self.min_block_length() >= constraints.min_block
        )


@dataclass(frozen=True)
class Constraints:
    """Hard constraints on an assignment plus the convergence threshold."""

    c_max: int
    n_max: int
    min_block: int
    epsilon: float

    def __post_init__(self):
        if self.c_max < 1:
            raise ValueError("c_max must be >= 1")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.min_block < 1:
            raise ValueError("min_block must be >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")


@dataclass(frozen=True)
class ClusterWeights:
    """Per-cluster parameter vectors; rows of inactive clusters hold NaN.

    Cluster ids stay stable across iterations: a cluster dropped by
    characterization keeps its row index but leaves the ``active`` set.
    """

    rows: np.ndarray
    active: frozenset[int]

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2:
            raise ValueError("weight rows must form a C x d_w matrix")
        active = frozenset(int(c) for c in self.active)
        for c in active:
            if not 0 <= c < rows.shape[0]:
                raise ValueError(f"active cluster {c} outside 0..{rows.shape[0] - 1}")
            if not np.all(np.isfinite(rows[c])):
                raise ValueError(f"active cluster {c} has non-finite weights")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "active", active)

    @property
    def n_clusters(self) -> int:
        return self.rows.shape[0]


class CostTable:
    """T x C per-point affiliation costs with O(1) window sums.

    Inactive clusters hold +inf in their column. ``prefix`` carries the
    running per-cluster sums; window sums are served from an internal
    finite-part/infinity-count decomposition so that a +inf entry anywhere
    in a window yields +inf instead of NaN.
    """

    def __init__(self, costs, active):
        costs = np.array(costs, dtype=float)
        if costs.ndim != 2:
            raise ValueError("costs must be a T x C matrix")
        if np.isnan(costs).any():
            raise NonFiniteCost("cost table contains NaN")
        finite = np.isfinite(costs)
        if (costs[finite] < 0).any():
            raise NonFiniteCost("cost table contains negative entries")
        costs.setflags(write=False)
        self.costs = costs
        self.active = frozenset(int(c) for c in active)
        self.prefix = np.cumsum(costs, axis=0)
        self.prefix.setflags(write=False)
        zeros = np.zeros((1, costs.shape[1]))
        self._finite_prefix = np.vstack([zeros, np.cumsum(np.where(finite, costs, 0.0), axis=0)])
        self._inf_prefix = np.vstack([zeros, np.cumsum(~finite, axis=0)])

    @property
    def n_points(self) -> int:
        return self.costs.shape[0]

    @property
    def n_clusters(self) -> int:
        return self.costs.shape[1]

    def range_sum(self, first: int, last: int) -> np.ndarray:
        """Per-cluster sum of costs over the inclusive window [first, last]."""
        total = self._finite_prefix[last + 1] - self._finite_prefix[first]
        blocked = (self._inf_prefix[last + 1] - self._inf_prefix[first]) > 0
        return np.where(blocked, np.inf, total)

    def window_sums(self, width: int) -> np.ndarray:
        """range_sum(t - width + 1, t) for every t at once; +inf where the
        window would start before 0."""
        out = np.full_like(self.costs, np.inf)
        ends = np.arange(width - 1, self.n_points)
        totals = self._finite_prefix[ends + 1] - self._finite_prefix[ends - width + 1]
        blocked = (self._inf_prefix[ends + 1] - self._inf_prefix[ends - width + 1]) > 0
        out[width - 1 :] = np.where(blocked, np.inf, totals)
        return out


def build_cost_table(series, weights, affiliate, batch_affiliate=None) -> CostTable:
    """Materialize f(x_t, w_c) for every point and active cluster.

    ``affiliate`` is the per-point cost function of the model adapter;
    ``batch_affiliate``, when given, evaluates a whole column at once and
    must agree with ``affiliate`` (this is asserted by tests, not here).
    """
    if not weights.active:
        raise ValueError("cannot build a cost table with no active clusters")
    t_total = series.n_points
    costs = np.full((t_total, weights.n_clusters), np.inf)
    for c in sorted(weights.active):
        w = weights.rows[c]
        if batch_affiliate is not None:
            column = np.asarray(batch_affiliate(series.values, w), dtype=float)
        else:
            column = np.array([affiliate(x, w) for x in series.values], dtype=float)
        if np.isnan(column).any():
            raise NonFiniteCost(f"affiliation for cluster {c} produced NaN")
        finite = np.isfinite(column)
        if (column[finite] < 0).any():
            raise NonFiniteCost(f"affiliation for cluster {c} produced a negative cost")
        costs[:, c] = column
    return CostTable(costs, weights.active)


def objective(series, assignment, weights, affiliate, batch_affiliate=None) -> float:
    """Total cost of an assignment: sum over clusters of member costs."""
    labels = assignment.labels
    if labels.shape[0] != series.n_points:
        raise ValueError("assignment length does not match the series")
    total = 0.0
    for c in assignment.used_labels():
        if c not in weights.active:
            raise InactiveLabel(f"label {c} has no weights")
        members = series.values[labels == c]
        w = weights.rows[c]
        if batch_affiliate is not None:
            total += float(np.sum(batch_affiliate(members, w)))
        else:
            total += float(sum(affiliate(x, w) for x in members))
    return total
