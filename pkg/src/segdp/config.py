"""Run and dataset configuration files.

Configs are JSON with nested sections. Every key is checked against the
schema and unknown keys are rejected so typos fail loudly instead of
silently falling back to defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .consensus import SelectionPolicy
from .core import Constraints
from .errors import ConfigError
from .io import read_json
from .models import KMeansAdapter, WsAdapter, WsEnvironment, WsFitConfig
from .simulator import (
    SHARP,
    DatasetSpec,
    FormationSpec,
    NoiseSpec,
    preset,
)


def _section(raw: dict, name: str, allowed: dict, where: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: section '{name}' must be an object")
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys in '{name}': {', '.join(sorted(unknown))}")
    merged = dict(allowed)
    merged.update(raw)
    return merged


@dataclass(frozen=True)
class RunConfig:
    """Everything a fit or grid run needs besides the series itself."""

    model: str
    constraints: Constraints
    n_init: int
    seed: int
    temperature: float
    ws_init: tuple[float, float, float, float]
    f_tol: float
    x_tol: float
    max_iters: int | None
    restarts: int
    selection: SelectionPolicy
    n_max_grid: int | None
    c_max_grid: int | None
    max_outer_iters: int
    threads: int | None
    out_dir: str | None
    raw: dict

    def adapter(self):
        if self.model == "kmeans":
            return KMeansAdapter()
        return WsAdapter(
            env=WsEnvironment(self.temperature),
            fit_config=WsFitConfig(
                initial=self.ws_init,
                f_tol=self.f_tol,
                x_tol=self.x_tol,
                max_iters=self.max_iters,
                restarts=self.restarts,
            ),
        )

    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


_TOP_KEYS = {
    "model": None,
    "constraints": None,
    "n_init": 50,
    "seed": 0,
    "temperature": 25.0,
    "optimizer": {},
    "selection": {},
    "grid": {},
    "max_outer_iters": 100,
    "threads": None,
    "paths": {},
}
_CONSTRAINT_KEYS = {"c_max": None, "n_max": None, "min_block": None, "epsilon": None}
_OPTIMIZER_KEYS = {
    "ws_init": [2.0, 2.0, 0.05, 10.0],
    "f_tol": 1e-8,
    "x_tol": 1e-8,
    "max_iters": None,
    "restarts": 2,
}
_SELECTION_KEYS = {
    "bins": 20,
    "window_bins": 1,
    "min_distinct_n": 3,
    "min_distinct_c": 3,
    "cost_tol": 1e-12,
}
_GRID_KEYS = {"n_max_grid": None, "c_max_grid": None}
_PATH_KEYS = {"out": None}


def load_run_config(path) -> RunConfig:
    raw = read_json(path)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    top = _section(raw, "top level", _TOP_KEYS, str(path))

    model = top["model"]
    if model not in ("kmeans", "ws"):
        raise ConfigError(f"{path}: model must be 'kmeans' or 'ws', got {model!r}")
    if not isinstance(top["constraints"], dict):
        raise ConfigError(f"{path}: a 'constraints' section is required")
    cons = _section(top["constraints"], "constraints", _CONSTRAINT_KEYS, str(path))
    for key, value in cons.items():
        if value is None:
            raise ConfigError(f"{path}: constraints.{key} is required")
    try:
        constraints = Constraints(
            c_max=int(cons["c_max"]),
            n_max=int(cons["n_max"]),
            min_block=int(cons["min_block"]),
            epsilon=float(cons["epsilon"]),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    optimizer = _section(top["optimizer"], "optimizer", _OPTIMIZER_KEYS, str(path))
    ws_init = optimizer["ws_init"]
    if not (isinstance(ws_init, (list, tuple)) and len(ws_init) == 4):
        raise ConfigError(f"{path}: optimizer.ws_init must hold 4 numbers [m, n, rho_w, cec]")

    selection_raw = _section(top["selection"], "selection", _SELECTION_KEYS, str(path))
    selection = SelectionPolicy(
        bins=int(selection_raw["bins"]),
        window_bins=int(selection_raw["window_bins"]),
        min_distinct_n=int(selection_raw["min_distinct_n"]),
        min_distinct_c=int(selection_raw["min_distinct_c"]),
        cost_tol=float(selection_raw["cost_tol"]),
    )

    grid = _section(top["grid"], "grid", _GRID_KEYS, str(path))
    paths = _section(top["paths"], "paths", _PATH_KEYS, str(path))

    if top["n_init"] < 1:
        raise ConfigError(f"{path}: n_init must be >= 1")
    if top["temperature"] <= 0:
        raise ConfigError(f"{path}: temperature must be > 0")

    return RunConfig(
        model=model,
        constraints=constraints,
        n_init=int(top["n_init"]),
        seed=int(top["seed"]),
        temperature=float(top["temperature"]),
        ws_init=tuple(float(v) for v in ws_init),
        f_tol=float(optimizer["f_tol"]),
        x_tol=float(optimizer["x_tol"]),
        max_iters=None if optimizer["max_iters"] is None else int(optimizer["max_iters"]),
        restarts=int(optimizer["restarts"]),
        selection=selection,
        n_max_grid=None if grid["n_max_grid"] is None else int(grid["n_max_grid"]),
        c_max_grid=None if grid["c_max_grid"] is None else int(grid["c_max_grid"]),
        max_outer_iters=int(top["max_outer_iters"]),
        threads=None if top["threads"] is None else int(top["threads"]),
        out_dir=paths["out"],
        raw=raw,
    )


_DATASET_KEYS = {
    "preset": None,
    "name": None,
    "seed": 0,
    "t_total": 1000,
    "temperature": 25.0,
    "formations": None,
    "blocks": None,
    "transition_mode": SHARP,
    "smooth_width": 6,
    "noise": {},
}
_FORMATION_KEYS = {
    "label": None,
    "m": None,
    "n": None,
    "rho_w": None,
    "cec": None,
    "phi_range": list(FormationSpec.__dataclass_fields__["phi_range"].default),
    "sw_range": list(FormationSpec.__dataclass_fields__["sw_range"].default),
    "fclay_range": list(FormationSpec.__dataclass_fields__["fclay_range"].default),
}
_NOISE_KEYS = {
    "rel_error_low": 0.05,
    "rel_error_high": 0.10,
    "sigma_m": 0.05,
    "sigma_n": 0.03,
}


def load_dataset_spec(path) -> DatasetSpec:
    raw = read_json(path)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: dataset spec must be a JSON object")
    top = _section(raw, "top level", _DATASET_KEYS, str(path))
    noise_raw = _section(top["noise"], "noise", _NOISE_KEYS, str(path))
    noise = NoiseSpec(
        rel_error_low=float(noise_raw["rel_error_low"]),
        rel_error_high=float(noise_raw["rel_error_high"]),
        sigma_m=float(noise_raw["sigma_m"]),
        sigma_n=float(noise_raw["sigma_n"]),
    )

    if top["preset"] is not None:
        if top["formations"] is not None or top["blocks"] is not None:
            raise ConfigError(f"{path}: give either a preset or explicit formations/blocks")
        spec = preset(
            top["preset"],
            seed=int(top["seed"]),
            t_total=int(top["t_total"]),
            noise=noise if top["noise"] else None,
            temperature=float(top["temperature"]),
        )
        if top["name"] is not None:
            spec = DatasetSpec(
                formations=spec.formations,
                blocks=spec.blocks,
                transition_mode=spec.transition_mode,
                smooth_width=spec.smooth_width,
                noise=spec.noise,
                temperature=spec.temperature,
                seed=spec.seed,
                name=str(top["name"]),
            )
        return spec

    if top["formations"] is None or top["blocks"] is None:
        raise ConfigError(f"{path}: either 'preset' or both 'formations' and 'blocks' are required")
    formations = []
    for entry in top["formations"]:
        f = _section(entry, "formation", _FORMATION_KEYS, str(path))
        for key in ("label", "m", "n", "rho_w", "cec"):
            if f[key] is None:
                raise ConfigError(f"{path}: formation field '{key}' is required")
        try:
            formations.append(
                FormationSpec(
                    label=int(f["label"]),
                    m=float(f["m"]),
                    n=float(f["n"]),
                    rho_w=float(f["rho_w"]),
                    cec=float(f["cec"]),
                    phi_range=tuple(f["phi_range"]),
                    sw_range=tuple(f["sw_range"]),
                    fclay_range=tuple(f["fclay_range"]),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    blocks = tuple((int(label), int(length)) for label, length in top["blocks"])
    return DatasetSpec(
        formations=tuple(formations),
        blocks=blocks,
        transition_mode=str(top["transition_mode"]),
        smooth_width=int(top["smooth_width"]),
        noise=noise,
        temperature=float(top["temperature"]),
        seed=int(top["seed"]),
        name=str(top["name"]) if top["name"] is not None else "dataset",
    )
