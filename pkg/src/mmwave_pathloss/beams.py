"""Multi-beam received power combining and the beam-combining CI model."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence, Tuple

import numpy as np

from .errors import (
    BelowFreeSpaceWarning,
    DomainError,
    EmptyInputError,
    InsufficientBeamsError,
)
from .models import (
    FrequencyBand,
    ShadowingSpec,
    _add_shadowing,
    _as_distance,
    _out,
    fspl_1m,
)


class CombiningScheme(str, enum.Enum):
    COHERENT = "coherent"
    NON_COHERENT = "noncoherent"

    @classmethod
    def parse(cls, value) -> "CombiningScheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"coherent": cls.COHERENT, "cc": cls.COHERENT,
                   "noncoherent": cls.NON_COHERENT, "ncc": cls.NON_COHERENT}
        if key not in aliases:
            raise DomainError(f"unknown combining scheme {value!r}")
        return aliases[key]


@dataclass(frozen=True)
class BeamSet:
    """Received powers (mW) of the beams measured at one location."""

    location_id: Hashable
    distance: float
    beams: Tuple[Tuple[int, float], ...]  # (beam index, power in mW)

    def __post_init__(self):
        object.__setattr__(self, "beams", tuple((int(i), float(p)) for i, p in self.beams))
        if not self.beams:
            raise EmptyInputError(f"location {self.location_id!r} has no beams")
        indices = [i for i, _ in self.beams]
        if len(set(indices)) != len(indices):
            raise DomainError(f"duplicate beam index at location {self.location_id!r}")
        if any(not p > 0 for _, p in self.beams):
            raise DomainError(f"beam powers must be > 0 mW at location {self.location_id!r}")

    @classmethod
    def from_powers(cls, powers: Sequence[float], *, location_id: Hashable = 0,
                    distance: float = 1.0) -> "BeamSet":
        return cls(location_id, distance, tuple(enumerate(powers)))

    @property
    def powers(self) -> list:
        return [p for _, p in self.beams]

    @property
    def indices(self) -> list:
        return [i for i, _ in self.beams]

    def __len__(self):
        return len(self.beams)


def combine(powers: Iterable[float], scheme) -> float:
    """Combine per-beam powers in mW.

    Coherent combining adds amplitudes, ``(sum sqrt(P_i))**2``; non-coherent
    combining adds powers.
    """
    p = np.asarray(list(powers), dtype=float)
    if p.size == 0:
        raise EmptyInputError("cannot combine an empty list of beam powers")
    if np.any(~(p > 0)):
        raise DomainError("beam powers must be > 0 mW")
    scheme = CombiningScheme.parse(scheme)
    # fsum is correctly rounded, so the result does not depend on input order.
    # The coherent sum is expanded as sum_ij sqrt(P_i P_j): sqrt(P*P) == P in
    # IEEE arithmetic, which keeps N equal beams at exactly N**2 * P.
    if scheme is CombiningScheme.COHERENT:
        return math.fsum(np.sqrt(np.outer(p, p)).ravel())
    return math.fsum(p)


def select_best_beams(beam_set: BeamSet, n_r: int) -> BeamSet:
    """Keep the ``n_r`` strongest beams, strongest first; ties go to the lower index."""
    if int(n_r) != n_r or n_r < 1:
        raise DomainError(f"number of beams must be an integer >= 1, got {n_r}")
    if n_r > len(beam_set):
        raise InsufficientBeamsError(
            f"location {beam_set.location_id!r} has {len(beam_set)} beams, {n_r} requested"
        )
    ranked = sorted(beam_set.beams, key=lambda b: (-b[1], b[0]))
    return BeamSet(beam_set.location_id, beam_set.distance, tuple(ranked[: int(n_r)]))


@dataclass(frozen=True)
class BcCiModel:
    """Beam-combining CI model: PLE scales as ``n_single * (1 - A log2 N_r)``."""

    band: FrequencyBand
    n_single: float
    a_weight: float
    scheme: CombiningScheme = CombiningScheme.COHERENT
    sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "scheme", CombiningScheme.parse(self.scheme))
        if not self.n_single > 0:
            raise DomainError(f"single-beam PLE must be > 0, got {self.n_single}")
        if not 0 <= self.a_weight < 1:
            raise DomainError(f"weighting factor A must be in [0, 1), got {self.a_weight}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be >= 0 dB, got {self.sigma}")


def _check_n_r(n_r) -> int:
    if isinstance(n_r, bool) or int(n_r) != n_r or n_r < 1:
        raise DomainError(f"number of combined beams must be an integer >= 1, got {n_r}")
    return int(n_r)


def effective_ple(model: BcCiModel, n_r: int) -> float:
    n_r = _check_n_r(n_r)
    n = model.n_single * (1.0 - model.a_weight * math.log2(n_r))
    if n < 2.0:
        warnings.warn(
            f"effective PLE {n:.3f} at N_r={n_r} is below free space (2.0)",
            BelowFreeSpaceWarning,
            stacklevel=2,
        )
    return n


def bc_ci_path_loss(model: BcCiModel, n_r: int, d, shadow: ShadowingSpec | None = None):
    d = _as_distance(d)
    n = effective_ple(model, n_r)
    pl = fspl_1m(model.band) + 10.0 * n * np.log10(d)
    return _out(_add_shadowing(pl, shadow))


def measured_path_loss_from_beams(
    beam_set: BeamSet,
    n_r: int,
    scheme,
    tx_power_dbm: float,
    tx_gain_dbi: float,
    rx_gain_dbi: float,
) -> float:
    """Path loss in dB implied by combining the ``n_r`` strongest beams."""
    best = select_best_beams(beam_set, n_r)
    received_dbm = 10.0 * math.log10(combine(best.powers, scheme))
    return tx_power_dbm + tx_gain_dbi + rx_gain_dbi - received_dbm
