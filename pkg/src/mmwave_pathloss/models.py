"""Closed-form path loss models anchored to a 1 m free space reference.

All distance arguments accept a float or an array-like of floats; a scalar
input returns a float, an array input returns a numpy array.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import BelowReferenceDistanceError, DomainError, OutOfValidityError

SPEED_OF_LIGHT = 3e8  # m/s, the value used by the 32.4 dB anchor constant
FSPL_1M_CONSTANT_DB = 32.4
REFERENCE_DISTANCE_M = 1.0
SUI_MIN_FREQ_GHZ = 2.0

# Shadowing draws come from numpy's PCG64 bit generator through
# Generator.standard_normal, scaled by sigma. Bump the version if this changes.
SHADOWING_SAMPLER = "pcg64-standard-normal/v1"

Distance = Union[float, np.ndarray]


def _as_distance(d, *, name: str = "distance") -> np.ndarray:
    arr = np.asarray(d, dtype=float)
    if arr.size == 0:
        raise DomainError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < REFERENCE_DISTANCE_M):
        raise BelowReferenceDistanceError(
            f"{name} must be >= 1 m (close-in reference distance), got {arr.min():g} m"
        )
    return arr


def _out(arr: np.ndarray):
    return float(arr) if np.ndim(arr) == 0 else arr


def to_db(x):
    """Linear power ratio to dB."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("linear value must be > 0 to convert to dB")
    return _out(10.0 * np.log10(arr))


def to_linear(x_db):
    return _out(10.0 ** (np.asarray(x_db, dtype=float) / 10.0))


@dataclass(frozen=True)
class FrequencyBand:
    """Carrier frequency in GHz."""

    carrier: float

    def __post_init__(self):
        if not (math.isfinite(self.carrier) and self.carrier > 0):
            raise DomainError(f"carrier frequency must be > 0 GHz, got {self.carrier}")

    @property
    def carrier_mhz(self) -> float:
        return 1000.0 * self.carrier

    @property
    def carrier_hz(self) -> float:
        return 1e9 * self.carrier

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz


class TerrainClass(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"


_TERRAIN_CONSTANTS = {
    TerrainClass.A: (4.6, 0.0075, 12.6),  # hilly, dense vegetation
    TerrainClass.B: (4.0, 0.0065, 17.1),  # hilly, rare vegetation
    TerrainClass.C: (3.6, 0.005, 20.0),  # flat, rare vegetation
}


@dataclass(frozen=True)
class TerrainParams:
    terrain_class: TerrainClass
    a: float
    b: float
    c: float

    @classmethod
    def of(cls, terrain: Union[str, TerrainClass]) -> "TerrainParams":
        try:
            tc = TerrainClass(str(getattr(terrain, "value", terrain)).upper())
        except ValueError:
            raise DomainError(f"unknown terrain class {terrain!r}, expected A, B or C") from None
        return cls(tc, *_TERRAIN_CONSTANTS[tc])


@dataclass(frozen=True)
class SuiContext:
    band: FrequencyBand
    terrain: TerrainParams
    h_tx: float
    h_rx: float

    def __post_init__(self):
        if not self.h_tx > 0:
            raise DomainError(f"TX height must be > 0 m, got {self.h_tx}")
        if not self.h_rx > 0:
            raise DomainError(f"RX height must be > 0 m, got {self.h_rx}")
        _check_sui_frequency(self.band)


@dataclass(frozen=True)
class ShadowingSpec:
    """Zero-mean normal shadowing in dB, reproducible from ``seed``."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise DomainError(f"shadowing sigma must be >= 0 dB, got {self.sigma}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("shadowing seed must be a 64-bit unsigned integer")


def sample_shadowing(shadow: ShadowingSpec, size: int | None = None):
    """Draw shadowing values in dB. The first ``k`` draws of a seed are fixed."""
    if shadow.sigma == 0:
        return 0.0 if size is None else np.zeros(size)
    rng = np.random.Generator(np.random.PCG64(int(shadow.seed)))
    if size is None:
        return float(rng.standard_normal() * shadow.sigma)
    return rng.standard_normal(size) * shadow.sigma


def _add_shadowing(pl: np.ndarray, shadow: ShadowingSpec | None) -> np.ndarray:
    if shadow is None or shadow.sigma == 0:
        return pl
    if pl.ndim == 0:
        return pl + sample_shadowing(shadow)
    return pl + sample_shadowing(shadow, pl.size).reshape(pl.shape)


@dataclass(frozen=True)
class CiModel:
    """Close-in free space reference distance model (d0 = 1 m)."""

    band: FrequencyBand
    ple: float
    sigma: float = 0.0
    d0: float = field(default=REFERENCE_DISTANCE_M, init=False)

    def __post_init__(self):
        if not self.ple > 0:
            raise DomainError(f"path loss exponent must be > 0, got {self.ple}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be >= 0 dB, got {self.sigma}")


@dataclass(frozen=True)
class FreeSpaceBase:
    band: FrequencyBand
    tx_gain: float = 0.0
    rx_gain: float = 0.0


BaseModel = Union[FreeSpaceBase, SuiContext]


@dataclass(frozen=True)
class ModifiedModel:
    """A free space or SUI model with its distance slope scaled by ``alpha``."""

    base: BaseModel
    alpha: float
    sigma: float = 0.0

    def __post_init__(self):
        if not isinstance(self.base, (FreeSpaceBase, SuiContext)):
            raise DomainError("base must be FreeSpaceBase or SuiContext")
        if not self.alpha > 0:
            raise DomainError(f"slope correction factor must be > 0, got {self.alpha}")

    @property
    def band(self) -> FrequencyBand:
        return self.base.band

    @property
    def anchor_pl(self) -> float:
        return fspl_1m(self.base.band)


def fspl_1m(band: FrequencyBand) -> float:
    """Free space path loss at 1 m, using the rounded 32.4 dB constant."""
    return FSPL_1M_CONSTANT_DB + 20.0 * math.log10(band.carrier)


def fs_path_loss(band: FrequencyBand, d: Distance, tx_gain: float = 0.0, rx_gain: float = 0.0):
    """Friis free space path loss in dB with antenna gains in dBi."""
    d = _as_distance(d)
    gain = 10.0 ** ((tx_gain + rx_gain) / 10.0)
    ratio = gain * band.wavelength_m**2 / (4.0 * math.pi * d) ** 2
    return _out(-10.0 * np.log10(ratio))


def sui_ple(terrain: TerrainParams, h_tx: float) -> float:
    if not h_tx > 0:
        raise DomainError(f"TX height must be > 0 m, got {h_tx}")
    return terrain.a - terrain.b * h_tx + terrain.c / h_tx


def _check_sui_frequency(band: FrequencyBand) -> None:
    # 2 GHz itself is allowed: the correction is exactly 0 there.
    if band.carrier < SUI_MIN_FREQ_GHZ:
        raise OutOfValidityError(
            f"SUI frequency correction requires f >= 2 GHz, got {band.carrier} GHz"
        )


def sui_freq_correction(band: FrequencyBand) -> float:
    _check_sui_frequency(band)
    return 6.0 * math.log10(band.carrier_mhz / 2000.0)


def sui_rx_height_correction(terrain_class: Union[TerrainClass, str], h_rx: float) -> float:
    if not h_rx > 0:
        raise DomainError(f"RX height must be > 0 m, got {h_rx}")
    tc = TerrainParams.of(terrain_class).terrain_class
    slope = 20.0 if tc is TerrainClass.C else 10.8
    return -slope * math.log10(h_rx / 2.0)


def sui_path_loss(ctx: SuiContext, d: Distance, shadow: ShadowingSpec | None = None):
    d = _as_distance(d)
    n = sui_ple(ctx.terrain, ctx.h_tx)
    pl = (
        fspl_1m(ctx.band)
        + 10.0 * n * np.log10(d)
        + sui_freq_correction(ctx.band)
        + sui_rx_height_correction(ctx.terrain.terrain_class, ctx.h_rx)
    )
    return _out(_add_shadowing(pl, shadow))


def ci_path_loss(model: CiModel, d: Distance, shadow: ShadowingSpec | None = None):
    d = _as_distance(d)
    pl = fspl_1m(model.band) + 10.0 * model.ple * np.log10(d)
    return _out(_add_shadowing(pl, shadow))


def base_slope_term(base: BaseModel, d: Distance):
    """``PL_base(d) - PL_base(1 m)`` for a free space or SUI base model."""
    d = _as_distance(d)
    if isinstance(base, FreeSpaceBase):
        pl = fs_path_loss(base.band, d, base.tx_gain, base.rx_gain)
        pl0 = fs_path_loss(base.band, REFERENCE_DISTANCE_M, base.tx_gain, base.rx_gain)
    elif isinstance(base, SuiContext):
        pl = sui_path_loss(base, d)
        pl0 = sui_path_loss(base, REFERENCE_DISTANCE_M)
    else:
        raise DomainError(f"unsupported base model {type(base).__name__}")
    return np.asarray(pl) - pl0


def base_ple(base: BaseModel) -> float:
    """Distance slope of the base model per decade, divided by 10."""
    if isinstance(base, FreeSpaceBase):
        return 2.0
    return sui_ple(base.terrain, base.h_tx)


def _modified_path_loss(model: ModifiedModel, d, shadow):
    pl = model.alpha * base_slope_term(model.base, d) + model.anchor_pl
    return _out(_add_shadowing(pl, shadow))


def modified_fs_path_loss(model: ModifiedModel, d: Distance, shadow: ShadowingSpec | None = None):
    if not isinstance(model.base, FreeSpaceBase):
        raise DomainError("modified_fs_path_loss needs a FreeSpaceBase model")
    return _modified_path_loss(model, d, shadow)


def modified_sui_path_loss(model: ModifiedModel, d: Distance, shadow: ShadowingSpec | None = None):
    """Modified SUI loss; frequency and RX-height corrections cancel out."""
    if not isinstance(model.base, SuiContext):
        raise DomainError("modified_sui_path_loss needs a SuiContext base model")
    return _modified_path_loss(model, d, shadow)
