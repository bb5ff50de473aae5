"""Range queries over the CI and beam-combining CI models."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .beams import BcCiModel, bc_ci_path_loss, effective_ple
from .errors import DomainError, OutOfRangeError
from .models import CiModel, FrequencyBand, ci_path_loss, fspl_1m

BRACKET_M = (1.0, 1e6)

Model = Union[CiModel, BcCiModel]


@dataclass(frozen=True)
class RangeQuery:
    """Find the distance at which ``model`` reaches ``target_loss`` dB."""

    model: Model
    target_loss: float
    n_r: int = 1
    atmospheric_rate: float = 0.0  # dB/km

    def __post_init__(self):
        if not isinstance(self.model, (CiModel, BcCiModel)):
            raise DomainError("range queries need a CiModel or BcCiModel")
        if isinstance(self.model, CiModel) and self.n_r != 1:
            raise DomainError("n_r only applies to beam-combining models")
        if not self.atmospheric_rate >= 0:
            raise DomainError(f"atmospheric rate must be >= 0 dB/km, got {self.atmospheric_rate}")
        if not self.target_loss >= self.anchor:
            raise DomainError(
                f"target loss {self.target_loss:.3f} dB is below the 1 m free space "
                f"anchor {self.anchor:.3f} dB"
            )

    @property
    def band(self) -> FrequencyBand:
        return self.model.band

    @property
    def anchor(self) -> float:
        return fspl_1m(self.model.band)

    @property
    def ple(self) -> float:
        if isinstance(self.model, BcCiModel):
            return effective_ple(self.model, self.n_r)
        return self.model.ple


def atmospheric_loss(rate: float, d: float) -> float:
    """Extra loss in dB from a linear ``rate`` in dB/km over ``d`` meters."""
    if not rate >= 0:
        raise DomainError(f"atmospheric rate must be >= 0 dB/km, got {rate}")
    if not d >= 0:
        raise DomainError(f"distance must be >= 0 m, got {d}")
    return rate * d / 1000.0


def attenuation_per_decade_delta(ple_a: float, ple_b: float) -> float:
    """Difference in dB per decade of distance between two exponents."""
    if not (ple_a > 0 and ple_b > 0):
        raise DomainError("path loss exponents must be > 0")
    return 10.0 * (ple_a - ple_b)


def _excess_loss(q: RangeQuery, n: float, d: float) -> float:
    return 10.0 * n * math.log10(d) + atmospheric_loss(q.atmospheric_rate, d)


def _bisect(q: RangeQuery, n: float) -> float:
    budget = q.target_loss - q.anchor
    lo, hi = BRACKET_M
    if _excess_loss(q, n, hi) < budget:
        raise OutOfRangeError(
            f"target loss {q.target_loss:.3f} dB is not reached within {hi:g} m"
        )
    if budget == 0.0:
        return lo
    # Bisect on log-distance; stop when the bracket collapses to float spacing.
    lo_l, hi_l = math.log10(lo), math.log10(hi)
    for _ in range(200):
        mid = 0.5 * (lo_l + hi_l)
        if mid in (lo_l, hi_l):
            break
        if _excess_loss(q, n, 10.0**mid) < budget:
            lo_l = mid
        else:
            hi_l = mid
    return 10.0 ** (0.5 * (lo_l + hi_l))


def distance_for_loss(q: RangeQuery, method: str = "auto") -> float:
    """Distance in meters at which the query's model reaches the target loss.

    ``method`` is ``"auto"`` (closed form when no atmospheric term),
    ``"closed-form"`` or ``"bisection"``.
    """
    n = q.ple
    if method == "auto":
        method = "closed-form" if q.atmospheric_rate == 0 else "bisection"
    if method == "bisection":
        return _bisect(q, n)
    if method != "closed-form":
        raise DomainError(f"unknown method {method!r}")
    if q.atmospheric_rate != 0:
        raise DomainError("the closed form ignores atmospheric loss; use bisection")
    d = 10.0 ** ((q.target_loss - q.anchor) / (10.0 * n))
    if d > BRACKET_M[1]:
        raise OutOfRangeError(f"target loss is reached at {d:.6g} m, beyond {BRACKET_M[1]:g} m")
    return d


def link_path_loss(model: Model, d: float, n_r: int = 1, atmospheric_rate: float = 0.0) -> float:
    """Model path loss plus the optional linear atmospheric term, in dB."""
    if isinstance(model, BcCiModel):
        pl = bc_ci_path_loss(model, n_r, d)
    else:
        pl = ci_path_loss(model, d)
    return pl + atmospheric_loss(atmospheric_rate, d)
