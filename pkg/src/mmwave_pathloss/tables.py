"""Published model parameters and recomputation of every derived table cell.

Inputs (PLEs, sigma, A, heights) are stored as printed. Derived cells
(slope correction factors, beam-combining PLEs, sigma differences) are
recomputed through the library fitters and model functions, then compared
with the printed value after rounding to three decimals.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Dict, List, Optional, Tuple

import numpy as np

from .beams import BcCiModel, CombiningScheme, effective_ple
from .estimation import FitDataset, fit_bc_weight, fit_slope_correction
from .models import (
    CiModel,
    FreeSpaceBase,
    FrequencyBand,
    SuiContext,
    TerrainParams,
    ci_path_loss,
)

PRINTED_DECIMALS = 3
FIT_POINTS = 16  # samples per noiseless regeneration grid


@dataclass(frozen=True)
class SlopeColumn:
    """One environment column of the slope correction tables."""

    label: str
    scenario: str  # "LOS" or "NLOS"
    freq_ghz: float
    h_tx: float
    h_rx: float
    ple: float
    sigma: float
    span_m: Tuple[float, float]
    gain_dbi: float
    alphas: Dict[str, float]  # terrain class, or "FS" for LOS, -> printed alpha


@dataclass(frozen=True)
class BeamGroup:
    label: str
    freq_ghz: float
    h_tx: Tuple[float, ...]
    h_rx: float
    scheme: CombiningScheme
    n_single: float
    a_weight: float
    bc_ple: Tuple[float, ...]  # printed n_single * (1 - A log2 N_r), N_r = 1..4
    ci_ple: Tuple[float, ...]  # printed CI PLE fitted separately per N_r
    sigma_bc: Tuple[float, ...]
    sigma_ci: Tuple[float, ...]
    gain_dbi: float


_SPAN_60 = (29.0, 129.0)
_SPAN_73_LOS = (31.0, 102.0)
_SPAN_73_NLOS = (53.0, 187.0)

TABLE_I = (
    SlopeColumn("NLOS courtyard", "NLOS", 60.0, 1.5, 1.5, 3.6, 9.0, _SPAN_60, 25.0,
                {"A": 0.277, "B": 0.234, "C": 0.213}),
    SlopeColumn("NLOS in-vehicle", "NLOS", 60.0, 1.5, 1.5, 5.4, 14.8, _SPAN_60, 25.0,
                {"A": 0.416, "B": 0.351, "C": 0.319}),
    SlopeColumn("LOS courtyard", "LOS", 60.0, 1.5, 1.5, 2.2, 2.0, _SPAN_60, 25.0,
                {"FS": 1.10}),
    SlopeColumn("LOS in-vehicle", "LOS", 60.0, 1.5, 1.5, 2.5, 3.5, _SPAN_60, 25.0,
                {"FS": 1.25}),
)

TABLE_II = (
    SlopeColumn("NLOS tx17 rx2", "NLOS", 73.0, 17.0, 2.0, 4.4, 11.7, _SPAN_73_NLOS, 27.0,
                {"A": 0.844, "B": 0.899}),
    SlopeColumn("NLOS tx7 rx2", "NLOS", 73.0, 7.0, 2.0, 4.9, 11.9, _SPAN_73_NLOS, 27.0,
                {"A": 0.772, "B": 0.766}),
    SlopeColumn("NLOS tx17 rx4.06", "NLOS", 73.0, 17.0, 4.06, 4.5, 12.6, _SPAN_73_NLOS, 27.0,
                {"A": 0.863, "B": 0.919}),
    SlopeColumn("NLOS tx7 rx4.06", "NLOS", 73.0, 7.0, 4.06, 4.8, 12.4, _SPAN_73_NLOS, 27.0,
                {"A": 0.756, "B": 0.750}),
    SlopeColumn("LOS tx17 rx2", "LOS", 73.0, 17.0, 2.0, 2.2, 4.1, _SPAN_73_LOS, 27.0,
                {"FS": 1.10}),
    SlopeColumn("LOS tx7 rx2", "LOS", 73.0, 7.0, 2.0, 2.3, 6.9, _SPAN_73_LOS, 27.0,
                {"FS": 1.15}),
    SlopeColumn("LOS tx17 rx4.06", "LOS", 73.0, 17.0, 4.06, 2.3, 4.6, _SPAN_73_LOS, 27.0,
                {"FS": 1.15}),
    SlopeColumn("LOS tx7 rx4.06", "LOS", 73.0, 7.0, 4.06, 2.4, 9.1, _SPAN_73_LOS, 27.0,
                {"FS": 1.20}),
)

_CC, _NCC = CombiningScheme.COHERENT, CombiningScheme.NON_COHERENT

TABLE_III = (
    BeamGroup("28 GHz mobile CC", 28.0, (7.0, 17.0), 1.5, _CC, 3.812, 0.0671,
              (3.812, 3.557, 3.407, 3.301), (3.812, 3.548, 3.406, 3.307),
              (9.1, 9.1, 9.2, 9.2), (9.1, 9.1, 9.2, 9.2), 24.5),
    BeamGroup("28 GHz mobile NCC", 28.0, (7.0, 17.0), 1.5, _NCC, 3.812, 0.0297,
              (3.812, 3.699, 3.633, 3.586), (3.812, 3.692, 3.631, 3.591),
              (9.1, 9.2, 9.2, 9.2), (9.1, 9.2, 9.2, 9.2), 24.5),
    BeamGroup("73 GHz mobile CC", 73.0, (7.0, 17.0), 2.0, _CC, 3.728, 0.0673,
              (3.728, 3.477, 3.330, 3.226), (3.728, 3.466, 3.327, 3.235),
              (7.6, 7.3, 7.2, 7.2), (7.6, 7.3, 7.2, 7.2), 27.0),
    BeamGroup("73 GHz mobile NCC", 73.0, (7.0, 17.0), 2.0, _NCC, 3.728, 0.0284,
              (3.728, 3.622, 3.560, 3.516), (3.728, 3.613, 3.557, 3.523),
              (7.6, 7.4, 7.3, 7.3), (7.6, 7.4, 7.3, 7.3), 27.0),
    BeamGroup("73 GHz backhaul CC", 73.0, (7.0, 17.0), 4.06, _CC, 3.823, 0.0621,
              (3.823, 3.586, 3.447, 3.348), (3.823, 3.578, 3.446, 3.353),
              (8.9, 8.5, 8.1, 7.8), (8.9, 8.5, 8.1, 7.8), 27.0),
    BeamGroup("73 GHz backhaul NCC", 73.0, (7.0, 17.0), 4.06, _NCC, 3.823, 0.0256,
              (3.823, 3.726, 3.668, 3.628), (3.823, 3.718, 3.667, 3.632),
              (8.9, 8.6, 8.3, 8.1), (8.9, 8.6, 8.3, 8.1), 27.0),
)

BEAM_COUNTS = (1, 2, 3, 4)
TABLES = {"I": TABLE_I, "II": TABLE_II, "III": TABLE_III}


@dataclass(frozen=True)
class TableCell:
    """A recomputed table cell.

    ``kind`` is ``"derived"`` for cells the table itself derives from its
    inputs (checked and flagged), or ``"comparison"`` for cross-model
    comparisons reported with their difference but never flagged.
    """

    table: str
    group: str
    quantity: str
    column: str
    computed: float
    printed: Optional[float]
    kind: str = "derived"

    @property
    def rounded(self) -> Decimal:
        return round_printed(self.computed)

    @property
    def diff(self) -> Optional[float]:
        return None if self.printed is None else self.computed - self.printed

    @property
    def flagged(self) -> bool:
        if self.kind != "derived" or self.printed is None:
            return False
        return self.rounded != round_printed(self.printed)


def round_printed(x: float, decimals: int = PRINTED_DECIMALS) -> Decimal:
    """Round half-even to the printed number of decimals."""
    return Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-decimals), ROUND_HALF_EVEN)


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """Log-spaced grid with endpoints exactly ``lo`` and ``hi``."""
    grid = np.logspace(np.log10(lo), np.log10(hi), count)
    grid[0], grid[-1] = lo, hi
    return grid


def _noiseless_ci(band: FrequencyBand, ple: float, span: Tuple[float, float]) -> FitDataset:
    d = log_grid(*span, FIT_POINTS)
    return FitDataset(band, d, ci_path_loss(CiModel(band, ple), d))


def slope_base(col: SlopeColumn, terrain: str):
    band = FrequencyBand(col.freq_ghz)
    if terrain == "FS":
        return FreeSpaceBase(band)
    return SuiContext(band, TerrainParams.of(terrain), col.h_tx, col.h_rx)


def recompute_alpha(col: SlopeColumn, terrain: str) -> float:
    """MMSE slope correction fitted to noiseless CI data over the column's span."""
    band = FrequencyBand(col.freq_ghz)
    return fit_slope_correction(_noiseless_ci(band, col.ple, col.span_m), slope_base(col, terrain)).value


def _slope_cells(name: str, columns) -> List[TableCell]:
    cells = []
    for col in columns:
        for terrain, printed in col.alphas.items():
            quantity = "alpha (FS)" if terrain == "FS" else f"alpha (terrain {terrain})"
            cells.append(TableCell(name, f"{col.freq_ghz:g} GHz", quantity, col.label,
                                   recompute_alpha(col, terrain), printed))
    return cells


def bc_model(group: BeamGroup) -> BcCiModel:
    return BcCiModel(FrequencyBand(group.freq_ghz), group.n_single, group.a_weight, group.scheme)


def refit_a_from_ci_ples(group: BeamGroup, span: Tuple[float, float] = _SPAN_73_NLOS) -> float:
    """Fit A to equal-weight samples drawn from the per-beam-count CI PLEs."""
    band = FrequencyBand(group.freq_ghz)
    d = log_grid(*span, FIT_POINTS)
    dist, pl, n_r = [], [], []
    for k, ple in zip(BEAM_COUNTS, group.ci_ple):
        dist.append(d)
        pl.append(ci_path_loss(CiModel(band, ple), d))
        n_r.append(np.full(d.size, k))
    data = FitDataset(band, np.concatenate(dist), np.concatenate(pl), np.concatenate(n_r))
    return fit_bc_weight(data, group.n_single).value


def _beam_cells(name: str, groups) -> List[TableCell]:
    cells = []
    for g in groups:
        model = bc_model(g)
        for i, k in enumerate(BEAM_COUNTS):
            col = f"N_r={k}"
            n_eff = effective_ple(model, k)
            cells.append(TableCell(name, g.label, "bc-ci ple", col, n_eff, g.bc_ple[i]))
            cells.append(TableCell(name, g.label, "bc-ci ple vs per-N_r ci ple", col, n_eff,
                                   g.ci_ple[i], kind="comparison"))
            cells.append(TableCell(name, g.label, "delta sigma", col,
                                   abs(g.sigma_ci[i] - g.sigma_bc[i]), 0.0))
        cells.append(TableCell(name, g.label, "A refit from per-N_r ci ples", "all",
                               refit_a_from_ci_ples(g), g.a_weight, kind="comparison"))
    return cells


def table_cells(selector: str) -> List[TableCell]:
    """Recompute the cells of table ``"I"``, ``"II"``, ``"III"`` or ``"all"``."""
    key = str(selector).strip().upper()
    if key == "ALL":
        return [c for k in TABLES for c in table_cells(k)]
    if key not in TABLES:
        raise ValueError(f"unknown table {selector!r}, expected I, II, III or all")
    if key == "III":
        return _beam_cells(key, TABLES[key])
    return _slope_cells(key, TABLES[key])
