"""Synthetic well-log generation with ground-truth labels.

Each formation is described by expected model parameters and by intervals
for the porosity, saturation and clay-fraction logs. Within a block the
porosity follows a bounded random walk, the saturation is nondecreasing
with depth (water sits at the bottom of a layer) and the clay fraction is
sampled per point. Measurement noise is multiplicative with a magnitude
drawn per sample from a declared band, plus Gaussian jitter on the m and n
exponents. The resistivity log is then synthesized with the Waxman-Smits
forward model from the noisy inputs, after optionally smoothing the input
logs across block boundaries.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import Assignment, SeriesMatrix, WS_COLUMN_ROLES
from .errors import SpecError
from .models import WsEnvironment, ws_forward_batch

SHARP = "sharp"
SMOOTH = "smooth"

DEFAULT_PHI_RANGE = (0.15, 0.35)
DEFAULT_SW_RANGE = (0.3, 1.0)
DEFAULT_FCLAY_RANGE = (0.0, 0.4)


def _check_fraction_range(name, interval, positive_low=False):
    low, high = interval
    if not (0.0 <= low <= high <= 1.0):
        raise ValueError(f"{name} must be an interval inside [0, 1]")
    if positive_low and low <= 0.0:
        raise ValueError(f"{name} must have a strictly positive lower bound")


@dataclass(frozen=True)
class FormationSpec:
    """Expected parameters and log intervals of one formation type."""

    label: int
    m: float
    n: float
    rho_w: float
    cec: float
    phi_range: tuple[float, float] = DEFAULT_PHI_RANGE
    sw_range: tuple[float, float] = DEFAULT_SW_RANGE
    fclay_range: tuple[float, float] = DEFAULT_FCLAY_RANGE

    def __post_init__(self):
        if self.rho_w <= 0:
            raise ValueError("rho_w must be > 0")
        _check_fraction_range("phi_range", self.phi_range, positive_low=True)
        _check_fraction_range("sw_range", self.sw_range, positive_low=True)
        _check_fraction_range("fclay_range", self.fclay_range)


@dataclass(frozen=True)
class NoiseSpec:
    """Measurement-noise levels.

    The fraction logs and CEC get multiplicative errors whose magnitude is
    drawn per sample uniformly in [rel_error_low, rel_error_high] with a
    random sign; m and n get Gaussian jitter.
    """

    rel_error_low: float = 0.05
    rel_error_high: float = 0.10
    sigma_m: float = 0.05
    sigma_n: float = 0.03

    def __post_init__(self):
        if self.rel_error_low < 0 or self.rel_error_high < self.rel_error_low:
            raise ValueError("relative-error band must satisfy 0 <= low <= high")
        if self.sigma_m < 0 or self.sigma_n < 0:
            raise ValueError("sigma_m and sigma_n must be nonnegative")


NOISELESS = NoiseSpec(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class DatasetSpec:
    """Full recipe for one synthetic well log."""

    formations: tuple[FormationSpec, ...]
    blocks: tuple[tuple[int, int], ...]
    transition_mode: str = SHARP
    smooth_width: int = 6
    noise: NoiseSpec = NoiseSpec()
    temperature: float = 25.0
    seed: int = 0
    name: str = "dataset"

    def __post_init__(self):
        known = {f.label for f in self.formations}
        if len(known) != len(self.formations):
            raise SpecError("duplicate formation labels")
        for label, length in self.blocks:
            if label not in known:
                raise SpecError(f"block references unknown formation label {label}")
            if length < 1:
                raise SpecError("block lengths must be >= 1")
        if self.transition_mode not in (SHARP, SMOOTH):
            raise SpecError(f"unknown transition mode {self.transition_mode!r}")
        if self.smooth_width < 1:
            raise SpecError("smooth_width must be >= 1")

    def formation(self, label: int) -> FormationSpec:
        for f in self.formations:
            if f.label == label:
                return f
        raise SpecError(f"unknown formation label {label}")

    @property
    def n_true(self) -> int:
        return len(self.blocks) - 1

    @property
    def c_true(self) -> int:
        return len({label for label, _ in self.blocks})


def _relative_noise(values, noise: NoiseSpec, rng) -> np.ndarray:
    if noise.rel_error_high == 0.0:
        return np.asarray(values, dtype=float).copy()
    magnitude = rng.uniform(noise.rel_error_low, noise.rel_error_high, size=len(values))
    sign = rng.integers(0, 2, size=len(values)) * 2 - 1
    return np.asarray(values, dtype=float) * (1.0 + sign * magnitude)


def _bounded_walk(interval, length, rng) -> np.ndarray:
    """Smooth reference signal: random walk clipped to the interval."""
    low, high = interval
    width = high - low
    start = rng.uniform(low, high)
    steps = rng.normal(0.0, width / 20.0, size=length) if width > 0 else np.zeros(length)
    steps[0] = 0.0
    return np.clip(start + np.cumsum(steps), low, high)


def _rising_walk(interval, length, rng) -> np.ndarray:
    """Nondecreasing reference signal spanning the interval from its low end."""
    low, high = interval
    width = high - low
    if width == 0:
        return np.full(length, low)
    increments = np.abs(rng.normal(0.0, width / max(length - 1, 1), size=length))
    increments[0] = 0.0
    return np.clip(low + np.cumsum(increments), low, high)


@dataclass(frozen=True)
class BlockData:
    """Noisy input logs of one block plus the per-row parameters that will
    drive the forward model."""

    f_clay: np.ndarray
    phi: np.ndarray
    sw: np.ndarray
    m: np.ndarray
    n: np.ndarray
    rho_w: np.ndarray
    cec: np.ndarray


def generate_block(spec: FormationSpec, length: int, noise: NoiseSpec, rng, env: WsEnvironment):
    """Generate one block of rows and the per-row parameters used.

    Returns ``(rows, params)`` where rows is a length x 4 array in the
    f_clay, phi, sw, rho_o column order. The emitted saturation column is
    sorted ascending so the water stays at the bottom even after noise.
    """
    if length < 1:
        raise ValueError("block length must be >= 1")
    data = _generate_block_data(spec, length, noise, rng)
    rho_o = ws_forward_batch(
        data.f_clay, data.phi, data.sw, data.m, data.n, data.rho_w, data.cec, env
    )
    rows = np.column_stack([data.f_clay, data.phi, data.sw, rho_o])
    return rows, data


def _generate_block_data(spec: FormationSpec, length: int, noise: NoiseSpec, rng) -> BlockData:
    phi_ref = _bounded_walk(spec.phi_range, length, rng)
    sw_ref = _rising_walk(spec.sw_range, length, rng)
    fclay_ref = rng.uniform(spec.fclay_range[0], spec.fclay_range[1], size=length)

    phi = np.clip(_relative_noise(phi_ref, noise, rng), 1e-6, 1.0)
    sw = np.sort(np.clip(_relative_noise(sw_ref, noise, rng), 1e-6, 1.0))
    f_clay = np.clip(_relative_noise(fclay_ref, noise, rng), 0.0, 1.0)
    cec = np.maximum(_relative_noise(np.full(length, spec.cec), noise, rng), 0.0)
    m = spec.m + rng.normal(0.0, noise.sigma_m, size=length) if noise.sigma_m else np.full(length, spec.m)
    n = spec.n + rng.normal(0.0, noise.sigma_n, size=length) if noise.sigma_n else np.full(length, spec.n)
    rho_w = np.full(length, spec.rho_w)
    return BlockData(f_clay=f_clay, phi=phi, sw=sw, m=m, n=n, rho_w=rho_w, cec=cec)


def _smooth_boundaries(columns: list[np.ndarray], boundaries: list[int], width: int, t_total: int):
    """Replace ``width`` points straddling each boundary by a linear ramp
    between the values just outside the window."""
    for b in boundaries:
        w_start = max(b - width // 2, 0)
        w_stop = min(b + (width - width // 2), t_total)
        left = max(w_start - 1, 0)
        right = min(w_stop, t_total - 1)
        span = w_stop - w_start
        if span < 1:
            continue
        ramp = (np.arange(1, span + 1)) / (span + 1)
        for col in columns:
            col[w_start:w_stop] = col[left] + ramp * (col[right] - col[left])


def generate_dataset(spec: DatasetSpec):
    """Build the full series, ground-truth labels and a manifest record.

    In smooth mode the f_clay/phi/sw logs are linearly interpolated across
    each boundary before the resistivity is computed; each row keeps the
    per-row parameters of the block it came from, which is also the nearer
    block, so the truth labels simply follow block ownership.
    """
    rng = np.random.default_rng(spec.seed)
    env = WsEnvironment(spec.temperature)
    pieces = []
    labels = []
    for label, length in spec.blocks:
        formation = spec.formation(label)
        pieces.append(_generate_block_data(formation, length, spec.noise, rng))
        labels.extend([label] * length)
    labels = np.asarray(labels, dtype=np.int64)

    f_clay = np.concatenate([p.f_clay for p in pieces])
    phi = np.concatenate([p.phi for p in pieces])
    sw = np.concatenate([p.sw for p in pieces])
    m = np.concatenate([p.m for p in pieces])
    n = np.concatenate([p.n for p in pieces])
    rho_w = np.concatenate([p.rho_w for p in pieces])
    cec = np.concatenate([p.cec for p in pieces])
    t_total = labels.shape[0]

    if spec.transition_mode == SMOOTH and len(spec.blocks) > 1:
        boundaries = np.cumsum([length for _, length in spec.blocks])[:-1]
        _smooth_boundaries([f_clay, phi, sw], list(boundaries), spec.smooth_width, t_total)

    rho_o = ws_forward_batch(f_clay, phi, sw, m, n, rho_w, cec, env)
    if np.isnan(rho_o).any():
        raise SpecError("forward model had no value for some generated rows")
    series = SeriesMatrix(
        np.column_stack([f_clay, phi, sw, rho_o]), WS_COLUMN_ROLES
    )
    truth = Assignment(labels)
    manifest = {
        "name": spec.name,
        "seed": spec.seed,
        "temperature": spec.temperature,
        "transition_mode": spec.transition_mode,
        "smooth_width": spec.smooth_width,
        "n_points": int(t_total),
        "n_true": spec.n_true,
        "c_true": spec.c_true,
        "noise": asdict(spec.noise),
        "blocks": [list(b) for b in spec.blocks],
        "formations": [asdict(f) for f in spec.formations],
    }
    return series, truth, manifest


# ---------------------------------------------------------------------------
# shipped presets

# (m, n, rho_w, cec) per formation label
_WS1_PARAMS = (
    (2.1, 2.3, 0.052, 0.0),
    (1.9, 1.8, 0.05, 0.0),
    (1.8, 1.75, 0.052, 0.0),
    (2.05, 1.9, 0.05, 0.0),
    (2.2, 2.0, 0.048, 20.0),
    (2.4, 2.1, 0.048, 60.0),
)
_WS2_PARAMS = (
    (1.85, 1.8, 0.052, 0.0),
    (2.1, 2.0, 0.052, 0.0),
    (2.4, 2.3, 0.049, 80.0),
    (1.9, 2.0, 0.051, 0.0),
    (2.0, 1.95, 0.051, 30.0),
    (2.0, 2.5, 0.05, 0.0),
)
_WS3_PARAMS = (
    (1.85, 1.7, 0.03, 0.0),
    (2.0, 2.0, 0.03, 0.0),
    (2.05, 2.0, 0.029, 30.0),
    (2.3, 2.1, 0.031, 0.0),
    (2.5, 2.2, 0.049, 80.0),
    (2.0, 2.5, 0.05, 0.0),
    (2.0, 1.9, 0.05, 0.0),
    (2.1, 2.1, 0.051, 45.0),
)

# block label sequences; several formations appear in more than one block
_WS1_BLOCK_LABELS = (0, 1, 2, 3, 4, 5, 1, 3)
_WS2_BLOCK_LABELS = (0, 1, 2, 3, 4, 5, 2, 0)
_WS3_BLOCK_LABELS = (0, 1, 2, 3, 4, 5, 6, 7, 2, 5)

_PRESETS = {
    "WS-1": (_WS1_PARAMS, _WS1_BLOCK_LABELS, SHARP),
    "WS-2": (_WS2_PARAMS, _WS2_BLOCK_LABELS, SHARP),
    "WS-2-smooth": (_WS2_PARAMS, _WS2_BLOCK_LABELS, SMOOTH),
    "WS-3": (_WS3_PARAMS, _WS3_BLOCK_LABELS, SHARP),
    "WS-3-smooth": (_WS3_PARAMS, _WS3_BLOCK_LABELS, SMOOTH),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, seed: int = 0, t_total: int = 1000, noise: NoiseSpec | None = None,
           temperature: float = 25.0) -> DatasetSpec:
    """One of the shipped dataset recipes, scaled to roughly t_total points."""
    if name not in _PRESETS:
        raise SpecError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")
    params, block_labels, mode = _PRESETS[name]
    formations = tuple(
        FormationSpec(label=i, m=m, n=n, rho_w=rho_w, cec=cec)
        for i, (m, n, rho_w, cec) in enumerate(params)
    )
    base = t_total // len(block_labels)
    extra = t_total - base * len(block_labels)
    blocks = tuple(
        (label, base + (1 if i < extra else 0)) for i, label in enumerate(block_labels)
    )
    return DatasetSpec(
        formations=formations,
        blocks=blocks,
        transition_mode=mode,
        noise=noise if noise is not None else NoiseSpec(),
        temperature=temperature,
        seed=seed,
        name=name,
    )
