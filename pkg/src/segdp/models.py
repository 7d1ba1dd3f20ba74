"""Model adapters: cluster characterization and per-point affiliation.

An adapter supplies two callables: ``characterize`` fits one weight vector
per cluster from the points currently assigned to it (dropping clusters
below their minimum support), and ``affiliate`` scores how badly a single
point fits a weight vector. Two adapters are provided: squared distance to
the cluster mean, and the Waxman-Smits resistivity model of shaly
formations fitted by a downhill-simplex regression of [m, n, rho_w, CEC].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import ClusterWeights
from .errors import DomainError, NonFiniteStart

log = logging.getLogger(__name__)

RHO_W_FLOOR = 1e-6


# ---------------------------------------------------------------------------
# squared-distance-to-mean adapter

def kmeans_characterize(series, assignment, c_max: int) -> ClusterWeights:
    """Weights are member means; clusters with no members become inactive."""
    rows = np.full((c_max, series.dimension), np.nan)
    active = set()
    for c in range(c_max):
        members = series.values[assignment.labels == c]
        if members.shape[0] >= 1:
            rows[c] = members.mean(axis=0)
            active.add(c)
    return ClusterWeights(rows, frozenset(active))


def kmeans_affiliate(x, w) -> float:
    """Squared Euclidean distance between a point and a cluster mean."""
    diff = np.asarray(x, dtype=float) - np.asarray(w, dtype=float)
    return float(np.dot(diff, diff))


class KMeansAdapter:
    """Classical mean/squared-distance model; minimum support one point."""

    name = "kmeans"

    def characterize(self, series, assignment, c_max, min_block) -> ClusterWeights:
        return kmeans_characterize(series, assignment, c_max)

    def affiliate(self, x, w) -> float:
        return kmeans_affiliate(x, w)

    def batch_affiliate(self, values, w) -> np.ndarray:
        diff = np.asarray(values, dtype=float) - np.asarray(w, dtype=float)[None, :]
        return np.einsum("ij,ij->i", diff, diff)


# ---------------------------------------------------------------------------
# Waxman-Smits model

@dataclass(frozen=True)
class WsParams:
    """Formation parameters: cementation and saturation exponents, water
    resistivity [ohm.m] and cation exchange capacity."""

    m: float
    n: float
    rho_w: float
    cec: float

    def as_array(self) -> np.ndarray:
        return np.array([self.m, self.n, self.rho_w, self.cec], dtype=float)

    @staticmethod
    def from_array(w) -> "WsParams":
        m, n, rho_w, cec = (float(v) for v in w)
        return WsParams(m, n, rho_w, cec)


@dataclass(frozen=True)
class WsEnvironment:
    """Run-constant environment; temperature in the units of the B formula."""

    temperature: float = 25.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0")


def qv(cec: float, f_clay: float, phi: float) -> float:
    """Volume concentration of clay exchange cations."""
    if phi <= 0:
        raise DomainError("qv requires phi > 0")
    return cec * f_clay * (1.0 - phi) / phi


def b_coefficient(sigma_w: float, env: WsEnvironment) -> float:
    """Equivalent conductance of the exchange cations at temperature T."""
    t = env.temperature
    inner = -2.47 + 0.229 * math.log(t) ** 2 + 1311.0 / t**2
    if inner == 0.0:
        raise DomainError("b_coefficient: temperature factor is zero")
    return (1.0 - 0.83 * math.exp(-sigma_w / inner)) * (-9.2431 + 2.6146 * math.sqrt(t))


def _unpack_params(w):
    if isinstance(w, WsParams):
        return w.m, w.n, w.rho_w, w.cec
    m, n, rho_w, cec = (float(v) for v in w)
    return m, n, rho_w, cec


def ws_forward(x, w, env: WsEnvironment) -> float:
    """Predicted rho_o for one row of [f_clay, phi, sw, ...] logs.

    The regression search is unconstrained, so the forward model guards
    itself: rho_w is clamped to a positive floor, a negative CEC counts as
    zero, and a nonpositive conductivity raises ``DomainError``.
    """
    f_clay, phi, sw = float(x[0]), float(x[1]), float(x[2])
    if phi <= 0 or sw <= 0:
        raise DomainError("ws_forward requires phi > 0 and sw > 0")
    m, n, rho_w, cec = _unpack_params(w)
    rho_w = max(rho_w, RHO_W_FLOOR)
    sigma_w = 1.0 / rho_w
    b = b_coefficient(sigma_w, env)
    q = qv(max(cec, 0.0), f_clay, phi)
    try:
        sigma_o = phi**m * sw**n * (sigma_w + b * q / sw)
    except OverflowError:
        raise DomainError("conductivity overflowed") from None
    if not math.isfinite(sigma_o) or sigma_o <= 0:
        raise DomainError(f"nonpositive or non-finite conductivity {sigma_o}")
    return 1.0 / sigma_o


def ws_forward_batch(f_clay, phi, sw, m, n, rho_w, cec, env: WsEnvironment) -> np.ndarray:
    """Vectorized forward model; invalid rows come back as NaN."""
    f_clay = np.asarray(f_clay, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sw = np.asarray(sw, dtype=float)
    rho_w = np.maximum(np.asarray(rho_w, dtype=float), RHO_W_FLOOR)
    sigma_w = 1.0 / rho_w
    t = env.temperature
    inner = -2.47 + 0.229 * math.log(t) ** 2 + 1311.0 / t**2
    b = (1.0 - 0.83 * np.exp(-sigma_w / inner)) * (-9.2431 + 2.6146 * math.sqrt(t))
    ok = (phi > 0) & (sw > 0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        q = np.maximum(np.asarray(cec, dtype=float), 0.0) * f_clay * (1.0 - phi) / phi
        sigma_o = phi**m * sw**n * (sigma_w + b * q / sw)
        ok = ok & np.isfinite(sigma_o) & (sigma_o > 0)
        rho_o = np.where(ok, 1.0 / np.where(ok, sigma_o, 1.0), np.nan)
    return rho_o


def ws_affiliate(x, w, env: WsEnvironment) -> float:
    """Squared residual on rho_o; +inf when the forward model has no value."""
    try:
        predicted = ws_forward(x, w, env)
    except DomainError:
        return math.inf
    residual = float(x[3]) - predicted
    return residual * residual


def ws_affiliate_batch(values, w, env: WsEnvironment) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    m, n, rho_w, cec = _unpack_params(w)
    predicted = ws_forward_batch(
        values[:, 0], values[:, 1], values[:, 2], m, n, rho_w, cec, env
    )
    residual = values[:, 3] - predicted
    return np.where(np.isnan(predicted), np.inf, residual * residual)


# ---------------------------------------------------------------------------
# downhill simplex

@dataclass(frozen=True)
class NelderMeadConfig:
    f_tol: float = 1e-8
    x_tol: float = 1e-8
    max_iters: int | None = None  # defaults to 2000 * dimension


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool
    f_spread: float
    x_spread: float


def nelder_mead(objective, x0, config: NelderMeadConfig = NelderMeadConfig()) -> NelderMeadResult:
    """Downhill simplex minimization of a scalar function of a vector.

    Coefficients: reflection 1.0, expansion 2.0, contraction 0.5, shrink
    0.5. Terminates when both the function spread and the coordinate
    spread of the simplex fall below their tolerances, or at the iteration
    cap; either way the best vertex is returned.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.shape[0]
    max_iters = config.max_iters if config.max_iters is not None else 2000 * dim

    def evaluate(x):
        value = float(objective(x))
        return math.inf if math.isnan(value) else value

    f0 = evaluate(x0)
    if not math.isfinite(f0):
        raise NonFiniteStart("objective is not finite at the starting point")

    # initial simplex: 5% displacement per coordinate, small absolute step
    # on exact zeros
    simplex = np.tile(x0, (dim + 1, 1))
    fvals = np.full(dim + 1, f0)
    for k in range(dim):
        vertex = x0.copy()
        vertex[k] = vertex[k] * 1.05 if vertex[k] != 0.0 else 0.00025
        simplex[k + 1] = vertex
        fvals[k + 1] = evaluate(vertex)

    def spreads():
        f_spread = float(np.max(np.abs(fvals[1:] - fvals[0])))
        x_spread = float(np.max(np.abs(simplex[1:] - simplex[0])))
        return f_spread, x_spread

    iterations = 0
    converged = False
    order = np.argsort(fvals, kind="stable")
    simplex, fvals = simplex[order], fvals[order]
    while iterations < max_iters:
        f_spread, x_spread = spreads()
        if f_spread < config.f_tol and x_spread < config.x_tol:
            converged = True
            break
        iterations += 1
        centroid = simplex[:-1].mean(axis=0)
        reflected = centroid + (centroid - simplex[-1])
        f_reflected = evaluate(reflected)
        if f_reflected < fvals[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_expanded = evaluate(expanded)
            if f_expanded < f_reflected:
                simplex[-1], fvals[-1] = expanded, f_expanded
            else:
                simplex[-1], fvals[-1] = reflected, f_reflected
        elif f_reflected < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_reflected
        else:
            if f_reflected < fvals[-1]:
                contracted = centroid + 0.5 * (centroid - simplex[-1])
                f_contracted = evaluate(contracted)
                accept = f_contracted <= f_reflected
            else:
                contracted = centroid - 0.5 * (centroid - simplex[-1])
                f_contracted = evaluate(contracted)
                accept = f_contracted < fvals[-1]
            if accept:
                simplex[-1], fvals[-1] = contracted, f_contracted
            else:
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                fvals[1:] = [evaluate(v) for v in simplex[1:]]
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]

    f_spread, x_spread = spreads()
    return NelderMeadResult(
        x=simplex[0].copy(),
        fun=float(fvals[0]),
        iterations=iterations,
        converged=converged,
        f_spread=f_spread,
        x_spread=x_spread,
    )


# ---------------------------------------------------------------------------
# Waxman-Smits adapter

def _regression_loss(members, env: WsEnvironment):
    """Loss closure for one cluster's parameter fit.

    Algebraically identical to summing ``ws_affiliate_batch`` over the
    members, but hoists everything that does not depend on the parameter
    vector out of the optimizer loop (phi**m * sw**n is evaluated as a
    single exp of precomputed logs).
    """
    members = np.asarray(members, dtype=float)
    f_clay = members[:, 0]
    phi = members[:, 1]
    sw = members[:, 2]
    rho_o = members[:, 3]
    log_phi = np.log(phi)
    log_sw = np.log(sw)
    q_base = f_clay * (1.0 - phi) / phi / sw  # Qv/(cec*sw), fixed per point
    t = env.temperature
    inner = -2.47 + 0.229 * math.log(t) ** 2 + 1311.0 / t**2
    b_scale = -9.2431 + 2.6146 * math.sqrt(t)

    def loss(w) -> float:
        m, n, rho_w, cec = float(w[0]), float(w[1]), float(w[2]), float(w[3])
        sigma_w = 1.0 / max(rho_w, RHO_W_FLOOR)
        b = (1.0 - 0.83 * math.exp(-sigma_w / inner)) * b_scale
        with np.errstate(over="ignore", invalid="ignore"):
            sigma_o = np.exp(m * log_phi + n * log_sw) * (sigma_w + b * max(cec, 0.0) * q_base)
            # min() > 0 rejects NaN and nonpositive values in one pass
            if not (sigma_o.min() > 0 and math.isfinite(sigma_o.max())):
                return math.inf
            residual = rho_o - 1.0 / sigma_o
            return float(residual @ residual)

    return loss


@dataclass(frozen=True)
class WsFitConfig:
    """Regression settings for the per-cluster parameter fit."""

    initial: tuple[float, float, float, float] = (2.0, 2.0, 0.05, 10.0)
    f_tol: float = 1e-8
    x_tol: float = 1e-8
    max_iters: int | None = None
    restarts: int = 2  # chained simplex restarts from the current best vertex


def ws_characterize(series, assignment, c_max, min_block, env, fit_config=WsFitConfig()) -> ClusterWeights:
    """Fit [m, n, rho_w, CEC] per cluster by downhill simplex.

    Clusters with fewer than ``min_block`` members are dropped: below that
    support the four-parameter regression is not considered meaningful.
    A simplex that collapses without reaching tolerance falls back to the
    initial guess and is logged.
    """
    rows = np.full((c_max, 4), np.nan)
    active = set()
    nm_config = NelderMeadConfig(
        f_tol=fit_config.f_tol, x_tol=fit_config.x_tol, max_iters=fit_config.max_iters
    )
    for c in range(c_max):
        members = series.values[assignment.labels == c]
        if members.shape[0] < min_block:
            continue
        loss = _regression_loss(members, env)
        start = np.asarray(fit_config.initial, dtype=float)
        best = None
        point = start
        for _ in range(max(1, fit_config.restarts)):
            result = nelder_mead(loss, point, nm_config)
            if best is None or result.fun < best.fun:
                best = result
            point = result.x
        if not best.converged and best.x_spread < fit_config.x_tol:
            log.warning(
                "cluster %d: simplex collapsed without meeting tolerance "
                "(f_spread=%.3g); falling back to the initial guess",
                c,
                best.f_spread,
            )
            rows[c] = start
        else:
            rows[c] = best.x
        # the forward model treats rho_w below the floor and negative cec
        # as their clamped values, so store the canonical representative
        rows[c, 2] = max(rows[c, 2], RHO_W_FLOOR)
        rows[c, 3] = max(rows[c, 3], 0.0)
        active.add(c)
    return ClusterWeights(rows, frozenset(active))


class WsAdapter:
    """Waxman-Smits resistivity model; minimum support is the block floor."""

    name = "ws"

    def __init__(self, env: WsEnvironment = WsEnvironment(), fit_config: WsFitConfig = WsFitConfig()):
        self.env = env
        self.fit_config = fit_config

    def characterize(self, series, assignment, c_max, min_block) -> ClusterWeights:
        return ws_characterize(series, assignment, c_max, min_block, self.env, self.fit_config)

    def affiliate(self, x, w) -> float:
        return ws_affiliate(x, w, self.env)

    def batch_affiliate(self, values, w) -> np.ndarray:
        return ws_affiliate_batch(values, w, self.env)
