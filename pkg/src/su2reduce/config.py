"""Run configuration: a validated scenario bundle for the CLI commands.

Everything a command consumes is collected here so that a (config, seed)
pair pins the whole run; the reproducibility guarantee of the report
machinery depends on nothing else feeding the numerics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields

from . import lattice


class ConfigError(ValueError):
    """Rejected configuration input."""


# wave recipe entries are (cycles[4], amplitude, phase)
DEFAULT_PHASE_WAVES = (
    ((0, 1, 0, 0), 0.8, 0.0),
    ((0, 0, 1, 0), 0.6, 0.4),
    ((1, 0, 0, 0), 0.5, 1.1),
)
# the three free component slots matching the waves above; component 3 is
# left empty so the field is not fully symmetric
DEFAULT_PHASE_COMPONENTS = (1, 2, 4)

# scalar gradient-wave recipe for the small-amplitude scans: each entry's
# nonzero cycles share one magnitude, which keeps the leading-order
# cancellation of the current exact on the lattice
DEFAULT_GRADIENT_WAVES = (
    ((1, 1, 0, 0), 0.7, 0.2),
    ((0, 1, 1, 0), 0.5, 1.0),
    ((0, 0, 1, 1), 0.4, 0.7),
)


@dataclass(frozen=True)
class ScenarioConfig:
    """All knobs for the verification scenarios.

    grid_n            points per axis of the working grid
    box_length        physical extent of every axis
    metric            lattice.EUCLIDEAN or lattice.LORENTZIAN
    coupling          gauge coupling g > 0
    pauli_index       internal direction for matrix readings (1..3)
    phase_waves       waves for the main phase field, one per entry of
                      phase_components
    phase_components  which lambda component each wave feeds
    gradient_waves    scalar waves whose gradients build the vacuum-scan
                      base field
    scaling_amplitudes  decreasing eps values for the vacuum scan
    anomaly_amplitude   overall amplitude factor for the divergence study
    raw_order_grids     h-halving ladder for raw-stencil convergence
    divergence_grids    ladder for the current-divergence convergence
    covariance_grids    ladder for the gauge-covariance study
    pure_gauge_grids    ladder for the pure-gauge field-strength decay
    smooth_amp          amplitude of the random smooth fields in the
                      covariance and pure-gauge studies
    contraction_center  target point of the radial map
    contraction_n       map scale (integer >= 1)
    banach_offset       starting displacement for the fixed-point run
    banach_tol          displacement convergence tolerance
    lipschitz_pairs     sampled pairs for the ratio estimate
    collapse_schedule   strictly increasing chart scales
    collapse_tol        image-size tolerance declaring collapse
    second_center       extra target for the two-chart consistency probe
    reduce_centers      1 for the happy-path reduction, 2 to include the
                        second center and exercise the inconsistency path
    seed                base RNG seed for every sampled quantity
    """

    grid_n: int = 16
    box_length: float = 2.0 * math.pi
    metric: str = lattice.EUCLIDEAN
    coupling: float = 1.0
    pauli_index: int = 3
    phase_waves: tuple = DEFAULT_PHASE_WAVES
    phase_components: tuple = DEFAULT_PHASE_COMPONENTS
    gradient_waves: tuple = DEFAULT_GRADIENT_WAVES
    scaling_amplitudes: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    anomaly_amplitude: float = 0.5
    raw_order_grids: tuple = (8, 16, 32)
    divergence_grids: tuple = (12, 24, 36)
    covariance_grids: tuple = (12, 16, 24)
    pure_gauge_grids: tuple = (16, 20, 28)
    smooth_amp: float = 0.5
    contraction_center: tuple = (1.0, 0.0, 0.0, 0.0)
    contraction_n: int = 10
    banach_offset: float = 0.09
    banach_tol: float = 1e-12
    lipschitz_pairs: int = 10_000
    collapse_schedule: tuple = (4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048)
    collapse_tol: float = 1e-6
    second_center: tuple = (0.0, 1.0, 0.0, 0.0)
    reduce_centers: int = 1
    seed: int = 2024

    def __post_init__(self):
        if int(self.grid_n) != self.grid_n or self.grid_n < 4:
            raise ConfigError(f"grid_n must be an integer >= 4, got {self.grid_n}")
        object.__setattr__(self, "grid_n", int(self.grid_n))
        if not (self.box_length > 0 and math.isfinite(self.box_length)):
            raise ConfigError("box_length must be positive and finite")
        if self.metric not in (lattice.EUCLIDEAN, lattice.LORENTZIAN):
            raise ConfigError(f"unknown metric {self.metric!r}")
        if not (self.coupling > 0 and math.isfinite(self.coupling)):
            raise ConfigError("coupling must be positive and finite")
        if self.pauli_index not in (1, 2, 3):
            raise ConfigError(f"pauli_index must be 1..3, got {self.pauli_index}")
        object.__setattr__(self, "phase_waves", _check_waves(self.phase_waves, "phase_waves"))
        comps = tuple(int(c) for c in self.phase_components)
        if len(comps) != len(self.phase_waves) or any(c not in (1, 2, 3, 4) for c in comps):
            raise ConfigError("phase_components must list one component (1..4) per phase wave")
        object.__setattr__(self, "phase_components", comps)
        object.__setattr__(
            self, "gradient_waves", _check_waves(self.gradient_waves, "gradient_waves")
        )
        amps = tuple(float(a) for a in self.scaling_amplitudes)
        if len(amps) < 2 or any(not (a > 0 and math.isfinite(a)) for a in amps):
            raise ConfigError("scaling_amplitudes needs >= 2 positive finite entries")
        if any(b >= a for a, b in zip(amps, amps[1:])):
            raise ConfigError("scaling_amplitudes must decrease strictly")
        object.__setattr__(self, "scaling_amplitudes", amps)
        if not (self.anomaly_amplitude > 0 and math.isfinite(self.anomaly_amplitude)):
            raise ConfigError("anomaly_amplitude must be positive and finite")
        for name in ("raw_order_grids", "divergence_grids", "covariance_grids", "pure_gauge_grids"):
            object.__setattr__(self, name, _check_ladder(getattr(self, name), name))
        if not (self.smooth_amp > 0 and math.isfinite(self.smooth_amp)):
            raise ConfigError("smooth_amp must be positive and finite")
        object.__setattr__(self, "contraction_center", _check_center(self.contraction_center))
        if int(self.contraction_n) != self.contraction_n or self.contraction_n < 1:
            raise ConfigError(f"contraction_n must be an integer >= 1, got {self.contraction_n}")
        object.__setattr__(self, "contraction_n", int(self.contraction_n))
        if not (self.banach_offset > 0 and math.isfinite(self.banach_offset)):
            raise ConfigError("banach_offset must be positive and finite")
        if not (self.banach_tol > 0 and math.isfinite(self.banach_tol)):
            raise ConfigError("banach_tol must be positive and finite")
        if int(self.lipschitz_pairs) != self.lipschitz_pairs or self.lipschitz_pairs < 2:
            raise ConfigError("lipschitz_pairs must be an integer >= 2")
        object.__setattr__(self, "lipschitz_pairs", int(self.lipschitz_pairs))
        object.__setattr__(
            self, "collapse_schedule", _check_ladder(self.collapse_schedule, "collapse_schedule")
        )
        if not (self.collapse_tol > 0 and math.isfinite(self.collapse_tol)):
            raise ConfigError("collapse_tol must be positive and finite")
        object.__setattr__(self, "second_center", _check_center(self.second_center))
        if self.reduce_centers not in (1, 2):
            raise ConfigError(f"reduce_centers must be 1 or 2, got {self.reduce_centers}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    def grid(self) -> lattice.Grid4:
        return lattice.Grid4.cubic(self.grid_n, self.box_length, self.metric)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = _plain(v)
        return out


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def _check_waves(waves, name):
    checked = []
    for i, entry in enumerate(waves):
        try:
            cycles, amp, phase = entry
        except (TypeError, ValueError):
            raise ConfigError(f"{name}[{i}] must be (cycles, amplitude, phase)") from None
        cyc = tuple(cycles)
        if len(cyc) != 4:
            raise ConfigError(f"{name}[{i}] cycles must have four entries")
        for c in cyc:
            # reject non-integer cycle counts up front: a fractional wave
            # is silently incommensurate with the periodic grid
            if float(c) != int(c):
                raise ConfigError(f"{name}[{i}] cycle counts must be integers, got {c!r}")
        amp = float(amp)
        phase = float(phase)
        if not (math.isfinite(amp) and math.isfinite(phase)):
            raise ConfigError(f"{name}[{i}] amplitude and phase must be finite")
        checked.append((tuple(int(c) for c in cyc), amp, phase))
    if not checked:
        raise ConfigError(f"{name} must not be empty")
    return tuple(checked)


def _check_ladder(ladder, name):
    ns = tuple(int(n) for n in ladder)
    if len(ns) < 2 or ns[0] < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError(f"{name} must be >= 2 strictly increasing grid sizes")
    return ns


def _check_center(center):
    c = tuple(float(v) for v in center)
    if len(c) != 4 or any(not math.isfinite(v) for v in c):
        raise ConfigError("centers must be finite 4-vectors")
    return c


def load_config(path) -> ScenarioConfig:
    """Read a JSON file of overrides on top of the defaults."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kw = {}
    for key, val in raw.items():
        kw[key] = tuple(_tupled(val)) if isinstance(val, list) else val
    return ScenarioConfig(**kw)


def _tupled(v):
    return [tuple(_tupled(x)) if isinstance(x, list) else x for x in v]
