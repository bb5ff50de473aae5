"""Minimum mean square error fitters for the model parameters.

Each fitter is a single-parameter least squares problem through the 1 m
anchor, ``y = value * x``, so the MMSE solution is ``sum(x*y) / sum(x*x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateFitError, DomainError, EmptyInputError, UnidentifiableError
from .models import (
    BaseModel,
    CiModel,
    FrequencyBand,
    _as_distance,
    base_slope_term,
    ci_path_loss,
    fspl_1m,
)


@dataclass(frozen=True)
class FitDataset:
    """Path loss samples ``(distance_m, path_loss_db)``, optionally with beam counts."""

    band: FrequencyBand
    distances: np.ndarray
    path_loss: np.ndarray
    n_r: Optional[np.ndarray] = None

    def __post_init__(self):
        d = _as_distance(np.atleast_1d(np.asarray(self.distances, dtype=float)), name="distances")
        pl = np.atleast_1d(np.asarray(self.path_loss, dtype=float))
        if d.ndim != 1 or pl.shape != d.shape:
            raise DomainError("distances and path losses must be 1-D and of equal length")
        if not np.all(np.isfinite(pl)):
            raise DomainError("path loss samples must be finite")
        d.setflags(write=False)
        pl.setflags(write=False)
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "path_loss", pl)
        if self.n_r is not None:
            nr = np.atleast_1d(np.asarray(self.n_r))
            if nr.shape != d.shape:
                raise DomainError("n_r must have one entry per sample")
            if np.any(nr < 1) or np.any(nr != np.round(nr)):
                raise DomainError("n_r entries must be integers >= 1")
            nr = nr.astype(int)
            nr.setflags(write=False)
            object.__setattr__(self, "n_r", nr)

    @classmethod
    def from_samples(cls, band: FrequencyBand, samples: Iterable[Sequence[float]]) -> "FitDataset":
        """Build from ``(d, pl)`` or ``(d, pl, n_r)`` tuples."""
        rows = [tuple(s) for s in samples]
        if not rows:
            raise EmptyInputError("no samples")
        d = [r[0] for r in rows]
        pl = [r[1] for r in rows]
        n_r = [r[2] for r in rows] if all(len(r) > 2 for r in rows) else None
        return cls(band, np.array(d), np.array(pl), None if n_r is None else np.array(n_r))

    def __len__(self):
        return int(self.distances.size)


@dataclass(frozen=True)
class FitResult:
    value: float
    sigma: float
    residuals: np.ndarray
    rmse: float

    def __len__(self):
        return int(self.residuals.size)


def shadowing_sigma(residuals) -> float:
    """Root mean square of the residuals, dividing by K (not K - 1)."""
    r = np.asarray(residuals, dtype=float).ravel()
    if r.size == 0:
        raise EmptyInputError("cannot compute sigma of an empty residual list")
    return math.sqrt(math.fsum(r * r) / r.size)


def _solve_through_origin(x: np.ndarray, y: np.ndarray, what: str) -> float:
    sxx = math.fsum(x * x)
    if sxx == 0.0:
        raise DegenerateFitError(f"{what} is unidentifiable: every regressor is zero")
    return math.fsum(x * y) / sxx


def _result(value: float, residuals: np.ndarray) -> FitResult:
    residuals = np.asarray(residuals, dtype=float)
    residuals.setflags(write=False)
    sigma = shadowing_sigma(residuals)
    return FitResult(value=value, sigma=sigma, residuals=residuals, rmse=sigma)


def _check_slope_identifiable(data: FitDataset) -> None:
    if np.unique(data.distances).size < 2:
        raise DegenerateFitError("slope fits need samples at two or more distinct distances")


def residuals_about_ci(data: FitDataset, ple: float) -> np.ndarray:
    """Measured minus CI model loss, per sample."""
    return data.path_loss - ci_path_loss(CiModel(data.band, ple), data.distances)


def fit_ci_ple(data: FitDataset) -> FitResult:
    """Least squares path loss exponent of the CI model."""
    _check_slope_identifiable(data)
    x = 10.0 * np.log10(data.distances)
    y = data.path_loss - fspl_1m(data.band)
    n = _solve_through_origin(x, y, "path loss exponent")
    return _result(n, y - n * x)


def fit_slope_correction(data: FitDataset, base: BaseModel) -> FitResult:
    """MMSE slope correction factor that maps ``base`` onto the data.

    The regressor is the base model's own distance term, so any base model
    whose loss grows from its 1 m value can be corrected the same way.
    """
    if base.band != data.band:
        raise DomainError(
            f"base model band {base.band.carrier} GHz differs from data band {data.band.carrier} GHz"
        )
    _check_slope_identifiable(data)
    x = base_slope_term(base, data.distances)
    y = data.path_loss - fspl_1m(data.band)
    alpha = _solve_through_origin(x, y, "slope correction factor")
    return _result(alpha, y - alpha * x)


def fit_bc_weight(data: FitDataset, n_single: float) -> FitResult:
    """MMSE weighting factor A of the beam-combining CI model.

    Samples with a single beam carry no information about A and drop out of
    the normal equation, but still contribute residuals.
    """
    if data.n_r is None:
        raise UnidentifiableError("fitting A needs the number of combined beams per sample")
    if not n_single > 0:
        raise DomainError(f"single-beam PLE must be > 0, got {n_single}")
    log_d = 10.0 * n_single * np.log10(data.distances)
    x = -log_d * np.log2(data.n_r)
    y = data.path_loss - fspl_1m(data.band) - log_d
    if not np.any(x != 0.0):
        raise UnidentifiableError(
            "A is unidentifiable: no sample combines two or more beams beyond 1 m"
        )
    a = _solve_through_origin(x, y, "weighting factor A")
    return _result(a, y - a * x)
