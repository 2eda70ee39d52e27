"""Scenario configuration: defaults, validation, and JSON round-trip.

A scenario file is a JSON object whose keys match the ScenarioConfig field
names exactly; unknown keys are rejected by name so typos surface early.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError
from .geometry import (MATCHED_AVERAGE_POWER, SceneGeometry, TransmitBeamSet,
                       _POWER_NORMALIZATIONS)
from .metrics import NoiseModel
from .protocol import (ALL_SCHEMES, PERFECT_CSIT_SCHEMES,
                       RULE2_ERP_SUM_RATE, RULE2_SCALARIZATIONS,
                       SCHEME_BEAM_ZF_IMPERFECT)

__all__ = ["GeometryConfig", "BeamConfig", "ScenarioConfig", "load_config"]

DEFAULT_SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
DEFAULT_SEED = 727_961_853


@dataclass(frozen=True)
class GeometryConfig:
    """Two parallel antenna lines with the scatterer sphere at the midpoint."""

    tx_rx_separation: float = 100.0
    element_spacing: float = 100.0
    sphere_radius: float = 50.0
    carrier_wavelength: float = 0.125

    def __post_init__(self):
        for name in ("tx_rx_separation", "element_spacing", "sphere_radius",
                     "carrier_wavelength"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"geometry.{name} must be positive")


@dataclass(frozen=True)
class BeamConfig:
    """Transmit beam pattern parameters shared by every transmitter."""

    shape_exponent: float = 6.0
    floor_gain: float = 0.1
    power_normalization: str = MATCHED_AVERAGE_POWER

    def __post_init__(self):
        if not self.shape_exponent > 0:
            raise ConfigurationError("beams.shape_exponent must be positive")
        if not 0.0 <= self.floor_gain < 1.0:
            raise ConfigurationError("beams.floor_gain must lie in [0, 1)")
        if self.power_normalization not in _POWER_NORMALIZATIONS:
            raise ConfigurationError(
                "beams.power_normalization must be one of "
                f"{_POWER_NORMALIZATIONS}, got {self.power_normalization!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one Monte Carlo experiment."""

    K: int = 2
    L: int = 4
    scatterer_count: int = 100
    geometry: GeometryConfig = GeometryConfig()
    beams: BeamConfig = BeamConfig()
    snr_grid_db: tuple = DEFAULT_SNR_GRID
    runs: int = 1000
    normalization_subruns: int = 100
    schemes: tuple = PERFECT_CSIT_SCHEMES
    csit_error_variances: tuple = ()
    rule2_scalarization: str = RULE2_ERP_SUM_RATE
    seed: int = DEFAULT_SEED
    total_power: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_db",
                           tuple(float(v) for v in self.snr_grid_db))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "csit_error_variances",
                           tuple(float(v) for v in self.csit_error_variances))
        if self.K < 1:
            raise ConfigurationError(f"K must be >= 1, got {self.K}")
        if self.L < 1:
            raise ConfigurationError(f"L must be >= 1, got {self.L}")
        if self.scatterer_count < 1:
            raise ConfigurationError("scatterer_count must be >= 1")
        if not self.snr_grid_db:
            raise ConfigurationError("snr_grid_db must not be empty")
        if self.runs < 1:
            raise ConfigurationError(f"runs must be >= 1, got {self.runs}")
        if self.normalization_subruns < 1:
            raise ConfigurationError("normalization_subruns must be >= 1")
        for scheme in self.schemes:
            if scheme not in ALL_SCHEMES:
                raise ConfigurationError(
                    f"schemes: unknown scheme {scheme!r}; valid schemes are "
                    f"{', '.join(ALL_SCHEMES)}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigurationError("schemes must not contain duplicates")
        if any(v < 0 for v in self.csit_error_variances):
            raise ConfigurationError("csit_error_variances must be >= 0")
        if (SCHEME_BEAM_ZF_IMPERFECT in self.schemes
                and not self.csit_error_variances):
            raise ConfigurationError(
                "csit_error_variances must be set when the "
                f"{SCHEME_BEAM_ZF_IMPERFECT} scheme is enabled")
        if self.rule2_scalarization not in RULE2_SCALARIZATIONS:
            raise ConfigurationError(
                "rule2_scalarization must be one of "
                f"{RULE2_SCALARIZATIONS}, got {self.rule2_scalarization!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.total_power is not None and not self.total_power > 0:
            raise ConfigurationError("total_power must be positive")

    @property
    def resolved_total_power(self) -> float:
        """Total transmit power P; defaults to K (unit symbol variance)."""
        return float(self.K) if self.total_power is None else self.total_power

    def scene_geometry(self) -> SceneGeometry:
        g = self.geometry
        return SceneGeometry.two_line(
            self.K, tx_rx_separation=g.tx_rx_separation,
            element_spacing=g.element_spacing, sphere_radius=g.sphere_radius,
            carrier_wavelength=g.carrier_wavelength)

    def beam_set(self) -> TransmitBeamSet:
        b = self.beams
        return TransmitBeamSet.uniform(self.L, b.shape_exponent, b.floor_gain,
                                       b.power_normalization)

    def noise_for(self, snr_db: float) -> NoiseModel:
        return NoiseModel.from_snr_db(
            snr_db, symbol_variance=self.resolved_total_power / self.K,
            total_power=self.resolved_total_power)

    def with_updates(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["snr_grid_db"] = list(self.snr_grid_db)
        out["schemes"] = list(self.schemes)
        out["csit_error_variances"] = list(self.csit_error_variances)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("scenario must be a JSON object")
        data = dict(data)
        nested = {"geometry": GeometryConfig, "beams": BeamConfig}
        kwargs = {}
        for key, value in data.items():
            if key in nested:
                kwargs[key] = _nested_from_dict(nested[key], key, value)
            elif key in _SCENARIO_FIELDS:
                kwargs[key] = value
            else:
                raise ConfigurationError(
                    f"unknown scenario field {key!r}; valid fields are "
                    f"{', '.join(sorted(_SCENARIO_FIELDS))}")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigurationError(f"invalid scenario: {exc}") from exc


_SCENARIO_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)}


def _nested_from_dict(cls, section: str, value):
    if not isinstance(value, dict):
        raise ConfigurationError(f"{section} must be a JSON object")
    valid = {f.name for f in dataclasses.fields(cls)}
    for key in value:
        if key not in valid:
            raise ConfigurationError(
                f"unknown {section} field {key!r}; valid fields are "
                f"{', '.join(sorted(valid))}")
    return cls(**value)


def load_config(path) -> ScenarioConfig:
    """Read a scenario JSON file; errors name the file or offending field."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {p} is not valid JSON: {exc}") from exc
    return ScenarioConfig.from_dict(data)
