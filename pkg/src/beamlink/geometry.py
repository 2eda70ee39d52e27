"""Scene geometry, scatterer fields, beam patterns, and channel synthesis.

The propagation model is single-bounce: every transmit/receive path is the
composition of a transmitter-to-scatterer and a scatterer-to-receiver
sub-path.  Scatterers live on the surface of a sphere centered halfway
between the transmitter and receiver groups and apply an i.i.d. complex
gain.  Each sub-path contributes a 1/distance amplitude (referenced to
``d_ref`` = sphere radius) and a carrier phase rotation, so the entry for
receiver k and transmitter m is

    h[k, m] = sum_s  g_s * G_m(az(m -> s)) * (d_ref/d_ms) * (d_ref/d_sk)
                 * exp(-2j*pi*(d_ms + d_sk)/wavelength)

where ``G_m`` is the azimuthal gain of the beam selected at transmitter m
(identically one for omnidirectional transmission).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from numpy.random import Generator

from . import _core
from .errors import ConfigurationError, GeometryError, NormalizationError

__all__ = [
    "OMNI", "OmniMarker", "SceneGeometry", "ScattererField", "BeamPattern",
    "TransmitBeamSet", "BeamCombination", "ChannelMatrix",
    "MATCHED_AVERAGE_POWER", "UNIT_PEAK",
    "draw_scatterers", "beam_gain", "pattern_average_power",
    "synthesize_channel", "synthesize_beam_bank", "combination_channels",
    "estimate_normalization", "apply_normalization",
]

# Pattern power-normalization modes for a transmit beam set.  Matched
# average power scales every pattern so its azimuth-averaged power gain is
# one (same total radiated power as an omnidirectional element, i.e. the
# peak carries the directivity of the beam).  Unit peak applies the raw
# pattern with G(steering) = 1, which radiates less total power the
# narrower the beam is.
MATCHED_AVERAGE_POWER = "matched-average-power"
UNIT_PEAK = "unit-peak"
_POWER_NORMALIZATIONS = (MATCHED_AVERAGE_POWER, UNIT_PEAK)


class OmniMarker:
    """Sentinel selecting omnidirectional (unit-gain) transmission."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OMNI"


OMNI = OmniMarker()


def _as_points(value, name: str) -> np.ndarray:
    pts = np.asarray(value, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ConfigurationError(f"{name} must be an (n, 3) array of coordinates")
    return pts


@dataclass(frozen=True)
class SceneGeometry:
    """Transmitter/receiver placement plus the scatterer sphere.

    The sphere center must sit at the midpoint between the transmitter and
    receiver group centroids, and no antenna may lie inside the sphere.
    """

    tx_positions: np.ndarray
    rx_positions: np.ndarray
    sphere_center: np.ndarray
    sphere_radius: float
    carrier_wavelength: float

    def __post_init__(self):
        tx = _as_points(self.tx_positions, "tx_positions")
        rx = _as_points(self.rx_positions, "rx_positions")
        center = np.asarray(self.sphere_center, dtype=np.float64).reshape(3)
        object.__setattr__(self, "tx_positions", tx)
        object.__setattr__(self, "rx_positions", rx)
        object.__setattr__(self, "sphere_center", center)
        if len(tx) != len(rx) or len(tx) == 0:
            raise ConfigurationError(
                "tx_positions and rx_positions must hold the same nonzero "
                f"number of points, got {len(tx)} and {len(rx)}")
        if not self.sphere_radius > 0:
            raise ConfigurationError("sphere_radius must be positive")
        if not self.carrier_wavelength > 0:
            raise ConfigurationError("carrier_wavelength must be positive")
        midpoint = 0.5 * (tx.mean(axis=0) + rx.mean(axis=0))
        scale = max(1.0, float(np.abs(midpoint).max()))
        if not np.allclose(center, midpoint, atol=1e-9 * scale):
            raise ConfigurationError(
                "sphere_center must be the midpoint between the TX and RX "
                f"group centroids {midpoint}, got {center}")
        dist = np.linalg.norm(np.vstack([tx, rx]) - center, axis=1)
        if np.any(dist < self.sphere_radius * (1.0 - 1e-12)):
            raise ConfigurationError(
                "no TX or RX may lie inside the scatterer sphere "
                f"(min antenna distance {dist.min():.6g} < radius "
                f"{self.sphere_radius:.6g})")

    @property
    def user_count(self) -> int:
        return len(self.tx_positions)

    @classmethod
    def two_line(cls, k: int, tx_rx_separation: float = 100.0,
                 element_spacing: float = 100.0, sphere_radius: float = 50.0,
                 carrier_wavelength: float = 0.125) -> "SceneGeometry":
        """K TX on the x=0 line, K RX on the parallel x=separation line.

        Adjacent elements are ``element_spacing`` apart along y, both lines
        centered on y=0, with the scatterer sphere at the midpoint.
        """
        if k < 1:
            raise ConfigurationError(f"k must be >= 1, got {k}")
        ys = (np.arange(k) - (k - 1) / 2.0) * element_spacing
        tx = np.column_stack([np.zeros(k), ys, np.zeros(k)])
        rx = np.column_stack([np.full(k, float(tx_rx_separation)), ys, np.zeros(k)])
        center = np.array([tx_rx_separation / 2.0, 0.0, 0.0])
        return cls(tx, rx, center, float(sphere_radius), float(carrier_wavelength))


@dataclass(frozen=True)
class ScattererField:
    """Positions on the sphere surface and complex scatterer gains."""

    positions: np.ndarray
    gains: np.ndarray

    def __post_init__(self):
        pos = _as_points(self.positions, "scatterer positions")
        gains = np.asarray(self.gains, dtype=np.complex128)
        if gains.shape != (len(pos),):
            raise ConfigurationError(
                f"gains must be one complex scalar per scatterer, got shape "
                f"{gains.shape} for {len(pos)} positions")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "gains", gains)

    @property
    def count(self) -> int:
        return len(self.positions)

    def union(self, other: "ScattererField") -> "ScattererField":
        return ScattererField(np.vstack([self.positions, other.positions]),
                              np.concatenate([self.gains, other.gains]))


@dataclass(frozen=True)
class BeamPattern:
    """Azimuthal power-raised-cosine beam with a sidelobe floor.

    Gain is max(floor_gain, cos(delta)**shape_exponent) inside the
    |delta| < pi/2 main sector and floor_gain outside, where delta is the
    wrapped offset from the steering azimuth.  Peak gain is one.
    """

    steering_azimuth: float
    shape_exponent: float = 6.0
    floor_gain: float = 0.1

    def __post_init__(self):
        if not self.shape_exponent > 0:
            raise ConfigurationError("shape_exponent must be positive")
        if not 0.0 <= self.floor_gain < 1.0:
            raise ConfigurationError("floor_gain must lie in [0, 1)")


def _wrap_angle(delta):
    return (np.asarray(delta) + np.pi) % (2 * np.pi) - np.pi


def beam_gain(pattern: BeamPattern, azimuth) -> Union[float, np.ndarray]:
    """Pattern amplitude gain at the given azimuth(s); peak gain is 1."""
    delta = _wrap_angle(np.asarray(azimuth, dtype=np.float64) - pattern.steering_azimuth)
    lobe = np.where(np.abs(delta) < np.pi / 2,
                    np.cos(np.where(np.abs(delta) < np.pi / 2, delta, 0.0))
                    ** pattern.shape_exponent,
                    0.0)
    out = np.maximum(lobe, pattern.floor_gain)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=128)
def _average_power_cached(shape_exponent: float, floor_gain: float) -> float:
    # Azimuth-average of G^2 via composite Simpson on the smooth pieces.
    # The integrand switches from cos^q to the floor at delta0.
    q2 = 2.0 * shape_exponent
    if floor_gain > 0.0:
        delta0 = math.acos(floor_gain ** (1.0 / shape_exponent))
    else:
        delta0 = math.pi / 2

    def _simpson(lo: float, hi: float, n: int = 4096) -> float:
        x = np.linspace(lo, hi, n + 1)
        y = np.cos(x) ** q2
        return float((hi - lo) / (3 * n)
                     * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))

    lobe = _simpson(0.0, delta0)
    floor_part = floor_gain ** 2 * (math.pi - delta0)
    return (lobe + floor_part) / math.pi


def pattern_average_power(pattern: BeamPattern) -> float:
    """Azimuth-averaged power gain of the pattern (its inverse directivity)."""
    return _average_power_cached(pattern.shape_exponent, pattern.floor_gain)


@dataclass(frozen=True)
class TransmitBeamSet:
    """The L selectable patterns shared by every transmitter."""

    patterns: tuple
    power_normalization: str = MATCHED_AVERAGE_POWER

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if not self.patterns:
            raise ConfigurationError("a beam set needs at least one pattern")
        if self.power_normalization not in _POWER_NORMALIZATIONS:
            raise ConfigurationError(
                f"power_normalization must be one of {_POWER_NORMALIZATIONS}, "
                f"got {self.power_normalization!r}")

    @property
    def beam_count(self) -> int:
        return len(self.patterns)

    def amplitude_scale(self, beam: int) -> float:
        """Amplitude applied on top of the unit-peak pattern shape."""
        if self.power_normalization == UNIT_PEAK:
            return 1.0
        return 1.0 / math.sqrt(pattern_average_power(self.patterns[beam]))

    @classmethod
    def uniform(cls, l: int, shape_exponent: float = 6.0, floor_gain: float = 0.1,
                power_normalization: str = MATCHED_AVERAGE_POWER) -> "TransmitBeamSet":
        """L beams steered at equally spaced azimuths 2*pi*i/L."""
        if l < 1:
            raise ConfigurationError(f"l must be >= 1, got {l}")
        patterns = tuple(BeamPattern(2 * np.pi * i / l, shape_exponent, floor_gain)
                         for i in range(l))
        return cls(patterns, power_normalization)


@dataclass(frozen=True, order=True)
class BeamCombination:
    """One beam index per transmitter, the unit of selection."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise ConfigurationError(f"beam indices must be >= 0, got {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ChannelMatrix:
    """K x K beam-domain (or omni) channel with normalization metadata."""

    entries: np.ndarray
    normalization_constant: complex | float | None = None
    is_normalized: bool = False

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=np.complex128)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ConfigurationError(f"channel matrix must be square, got {h.shape}")
        object.__setattr__(self, "entries", h)

    @property
    def user_count(self) -> int:
        return self.entries.shape[0]

    def frobenius_power(self) -> float:
        """Squared Frobenius norm, the power gain of the channel."""
        return float(np.sum(np.abs(self.entries) ** 2))


def draw_scatterers(geometry: SceneGeometry, count: int, rng: Generator) -> ScattererField:
    """Sample `count` scatterers uniformly on the sphere surface.

    Gains are i.i.d. zero-mean complex Gaussian with per-scatterer variance
    1/count, so the expected total scattered power is one regardless of the
    scatterer count.
    """
    if count < 1:
        raise ConfigurationError(
            "scatterer count must be >= 1; a zero-scatterer channel is "
            "identically zero")
    directions = rng.standard_normal((count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    positions = geometry.sphere_center + geometry.sphere_radius * directions
    scale = math.sqrt(0.5 / count)
    gains = scale * (rng.standard_normal(count) + 1j * rng.standard_normal(count))
    return ScattererField(positions, gains)


def _tx_azimuths(geometry: SceneGeometry, positions: np.ndarray) -> np.ndarray:
    """Azimuth (x-y plane) from each TX to each scatterer, shape (K, N)."""
    d = positions[None, :, :] - geometry.tx_positions[:, None, :]
    return np.arctan2(d[:, :, 1], d[:, :, 0])


def _beam_weight_table(geometry: SceneGeometry, field_: ScattererField,
                       beam_set: TransmitBeamSet) -> np.ndarray:
    """Amplitude weight of every beam at every (TX, scatterer), (L, K, N)."""
    az = _tx_azimuths(geometry, field_.positions)
    table = np.empty((beam_set.beam_count, *az.shape))
    for i, pattern in enumerate(beam_set.patterns):
        table[i] = beam_set.amplitude_scale(i) * beam_gain(pattern, az)
    return table


def _check_subpaths(geometry: SceneGeometry, field_: ScattererField) -> None:
    for name, pts in (("TX", geometry.tx_positions), ("RX", geometry.rx_positions)):
        d = np.linalg.norm(field_.positions[None, :, :] - pts[:, None, :], axis=2)
        if np.any(d == 0.0):
            raise GeometryError(f"a scatterer coincides with a {name} position "
                                "(zero-length sub-path)")


def synthesize_channel(geometry: SceneGeometry, field_: ScattererField,
                       beams: Union[BeamCombination, OmniMarker],
                       beam_set: TransmitBeamSet | None = None) -> ChannelMatrix:
    """Synthesize the K x K channel for one beam combination (or omni)."""
    if field_.count == 0:
        raise ConfigurationError("scatterer field is empty")
    _check_subpaths(geometry, field_)
    k = geometry.user_count
    if isinstance(beams, OmniMarker):
        h = _core.omni_channel_batch(
            field_.positions[None], field_.gains[None],
            geometry.tx_positions, geometry.rx_positions,
            geometry.carrier_wavelength, geometry.sphere_radius)[0]
        return ChannelMatrix(h)
    if beam_set is None:
        raise ConfigurationError("beam_set is required for non-omni synthesis")
    if len(beams) != k:
        raise ConfigurationError(
            f"combination has {len(beams)} beam indices for {k} transmitters")
    if max(beams.indices) >= beam_set.beam_count:
        raise ConfigurationError(
            f"beam index {max(beams.indices)} out of range for a set of "
            f"{beam_set.beam_count} beams")
    az = _tx_azimuths(geometry, field_.positions)
    weights = np.empty_like(az)
    for m, beam in enumerate(beams.indices):
        weights[m] = (beam_set.amplitude_scale(beam)
                      * beam_gain(beam_set.patterns[beam], az[m]))
    h = _core.beam_channel_tensor(
        field_.positions, field_.gains, geometry.tx_positions,
        geometry.rx_positions, weights[None],
        geometry.carrier_wavelength, geometry.sphere_radius)[0]
    return ChannelMatrix(h)


def synthesize_beam_bank(geometry: SceneGeometry, field_: ScattererField,
                         beam_set: TransmitBeamSet) -> np.ndarray:
    """Per-beam channel columns for one field, shape (L, K, K).

    ``bank[b, k, m]`` is the channel from transmitter m to receiver k when
    transmitter m uses beam b.  The channel of combination (b_1, ..., b_K)
    is assembled by picking column m from slice b_m (see
    :func:`combination_channels`); the scatterer sum runs once per beam
    instead of once per combination.
    """
    weights = _beam_weight_table(geometry, field_, beam_set)
    return _core.beam_channel_tensor(
        field_.positions, field_.gains, geometry.tx_positions,
        geometry.rx_positions, weights,
        geometry.carrier_wavelength, geometry.sphere_radius)


def combination_channels(bank: np.ndarray,
                         combinations: Sequence[BeamCombination]) -> np.ndarray:
    """Assemble combination channel matrices from a beam bank, (C, K, K)."""
    k = bank.shape[2]
    idx = np.asarray([c.indices for c in combinations])
    out = np.empty((len(idx), k, k), dtype=np.complex128)
    for m in range(k):
        out[:, :, m] = bank[idx[:, m], :, m]
    return out


def estimate_normalization(geometry: SceneGeometry,
                           beams: Union[BeamCombination, OmniMarker],
                           count: int, rng: Generator, *,
                           scatterer_count: int,
                           beam_set: TransmitBeamSet | None = None) -> float:
    """Normalization constant a = sqrt(K^2 / mean ||H||_F^2) over `count` draws.

    Each sub-run draws an independent scatterer field and synthesizes the
    channel for `beams` (the omni marker gives the omni-referenced constant
    used by the sweep harness).  Always real and positive.
    """
    if count < 1:
        raise ConfigurationError(f"sub-run count must be >= 1, got {count}")
    fields = [draw_scatterers(geometry, scatterer_count, rng) for _ in range(count)]
    k = geometry.user_count
    if isinstance(beams, OmniMarker):
        batch = _core.omni_channel_batch(
            np.stack([f.positions for f in fields]),
            np.stack([f.gains for f in fields]),
            geometry.tx_positions, geometry.rx_positions,
            geometry.carrier_wavelength, geometry.sphere_radius)
        mean_power = float(np.mean(np.sum(np.abs(batch) ** 2, axis=(1, 2))))
    else:
        powers = [synthesize_channel(geometry, f, beams, beam_set).frobenius_power()
                  for f in fields]
        mean_power = float(np.mean(powers))
    return math.sqrt(k * k / mean_power)


def apply_normalization(h: ChannelMatrix, a: complex | float) -> ChannelMatrix:
    """Scale the channel by `a` and mark it normalized."""
    if h.is_normalized:
        raise NormalizationError("channel matrix is already normalized")
    return ChannelMatrix(a * h.entries, normalization_constant=a,
                         is_normalized=True)
