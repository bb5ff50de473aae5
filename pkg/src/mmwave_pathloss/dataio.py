"""Measurement and beam CSV files, synthetic datasets, table and plot-data export.

File format: UTF-8, LF line endings, ``.`` decimal separator, one header
row with fixed column names. Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Callable, Iterable, List, Sequence, TextIO, Tuple, Union

import numpy as np

from .beams import (
    BcCiModel,
    BeamSet,
    bc_ci_path_loss,
    effective_ple,
    measured_path_loss_from_beams,
)
from .errors import DomainError, FormatError
from .estimation import FitDataset
from .models import (
    SHADOWING_SAMPLER,
    CiModel,
    FreeSpaceBase,
    FrequencyBand,
    ModifiedModel,
    ShadowingSpec,
    SuiContext,
    TerrainParams,
    base_ple,
    ci_path_loss,
    fspl_1m,
    modified_fs_path_loss,
    modified_sui_path_loss,
)
from .tables import TABLE_I, TABLE_II, TABLE_III, log_grid, round_printed, table_cells

MEASUREMENT_COLUMNS = (
    "frequency_ghz", "environment", "scenario", "tx_height_m", "rx_height_m",
    "distance_m", "path_loss_db",
)
BEAM_COLUMNS = (
    "location_id", "frequency_ghz", "environment", "scenario", "tx_height_m",
    "rx_height_m", "distance_m", "beam_index", "received_power_mw", "tx_power_dbm",
    "tx_gain_dbi", "rx_gain_dbi",
)
SCENARIOS = ("LOS", "NLOS")
SANITY_MARGIN_DB = 6.0

Source = Union[str, Path, TextIO, Iterable[str]]


@dataclass(frozen=True)
class MeasurementRecord:
    frequency_ghz: float
    environment: str
    scenario: str
    tx_height_m: float
    rx_height_m: float
    distance_m: float
    path_loss_db: float


@dataclass(frozen=True)
class BeamRecord:
    location_id: str
    frequency_ghz: float
    environment: str
    scenario: str
    tx_height_m: float
    rx_height_m: float
    distance_m: float
    beam_index: int
    received_power_mw: float
    tx_power_dbm: float
    tx_gain_dbi: float
    rx_gain_dbi: float


@dataclass(frozen=True)
class Diagnostic:
    line: int
    reason: str
    rejected: bool = True


def fmt6(x: float) -> str:
    """Fixed 6-decimal text, rounded half-even."""
    q = Decimal(repr(float(x))).quantize(Decimal("0.000001"), ROUND_HALF_EVEN)
    return "0.000000" if q.is_zero() else format(q, "f")


def fmt_power(x: float) -> str:
    # mW values span many decades; keep 6 decimals of mantissa
    return f"{float(x):.6e}"


def _lines(source: Source) -> List[str]:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8").splitlines()
    if isinstance(source, str):
        return source.splitlines()
    return [line.rstrip("\r\n") for line in source]


def _read_table(source: Source, columns: Sequence[str]):
    """Yield ``(line_number, fields)`` for data lines after checking the header."""
    lines = _lines(source)
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not numbered:
        raise FormatError("missing header row")
    header_line, header = numbered[0]
    got = [h.strip() for h in next(csv.reader([header]))]
    if got != list(columns):
        raise FormatError(f"line {header_line}: expected header {','.join(columns)!r}, got {header!r}")
    rows = []
    for lineno, text in numbered[1:]:
        rows.append((lineno, [f.strip() for f in next(csv.reader([text]))]))
    return rows


class _Reject(Exception):
    pass


def _number(fields, columns, name) -> float:
    raw = fields[columns.index(name)]
    try:
        value = float(raw)
    except ValueError:
        raise _Reject(f"{name}: not a number ({raw!r})") from None
    if not math.isfinite(value):
        raise _Reject(f"{name}: must be finite")
    return value


def _common_fields(fields, columns) -> dict:
    out = {}
    out["frequency_ghz"] = f = _number(fields, columns, "frequency_ghz")
    if f <= 0:
        raise _Reject("frequency_ghz: must be > 0")
    out["environment"] = fields[columns.index("environment")]
    scenario = fields[columns.index("scenario")].upper()
    if scenario not in SCENARIOS:
        raise _Reject(f"scenario: expected LOS or NLOS, got {scenario!r}")
    out["scenario"] = scenario
    for name in ("tx_height_m", "rx_height_m"):
        out[name] = _number(fields, columns, name)
        if out[name] <= 0:
            raise _Reject(f"{name}: must be > 0")
    out["distance_m"] = d = _number(fields, columns, "distance_m")
    if d < 1.0:
        raise _Reject("distance_m: below the 1 m close-in reference distance")
    return out


def parse_measurements(source: Source) -> Tuple[List[MeasurementRecord], List[Diagnostic]]:
    """Parse a measurement CSV.

    Bad rows are skipped and reported in the diagnostics; rows whose path
    loss falls more than 6 dB under the 1 m free space loss are kept but
    flagged with ``rejected=False``.
    """
    rows = _read_table(source, MEASUREMENT_COLUMNS)
    records, diags = [], []
    for lineno, fields in rows:
        try:
            if len(fields) != len(MEASUREMENT_COLUMNS):
                raise _Reject(f"expected {len(MEASUREMENT_COLUMNS)} fields, got {len(fields)}")
            values = _common_fields(fields, MEASUREMENT_COLUMNS)
            values["path_loss_db"] = pl = _number(fields, MEASUREMENT_COLUMNS, "path_loss_db")
        except _Reject as exc:
            diags.append(Diagnostic(lineno, str(exc)))
            continue
        floor = fspl_1m(FrequencyBand(values["frequency_ghz"])) - SANITY_MARGIN_DB
        if pl < floor:
            diags.append(Diagnostic(
                lineno, f"path_loss_db: {pl:g} dB is below the free space sanity floor {floor:.3f} dB",
                rejected=False))
        records.append(MeasurementRecord(**values))
    if rows and not records:
        raise FormatError(f"no parseable records among {len(rows)} data rows")
    return records, diags


def read_measurements(path) -> Tuple[List[MeasurementRecord], List[Diagnostic]]:
    return parse_measurements(Path(path))


def write_measurements(records: Iterable[MeasurementRecord], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MEASUREMENT_COLUMNS)
    for r in records:
        w.writerow([fmt6(r.frequency_ghz), r.environment, r.scenario, fmt6(r.tx_height_m),
                    fmt6(r.rx_height_m), fmt6(r.distance_m), fmt6(r.path_loss_db)])
    return buf.getvalue()


def parse_beams(source: Source) -> Tuple[List[BeamRecord], List[Diagnostic]]:
    rows = _read_table(source, BEAM_COLUMNS)
    records, diags, seen = [], [], set()
    for lineno, fields in rows:
        try:
            if len(fields) != len(BEAM_COLUMNS):
                raise _Reject(f"expected {len(BEAM_COLUMNS)} fields, got {len(fields)}")
            values = _common_fields(fields, BEAM_COLUMNS)
            values["location_id"] = loc = fields[0]
            if not loc:
                raise _Reject("location_id: empty")
            idx = _number(fields, BEAM_COLUMNS, "beam_index")
            if idx < 0 or idx != int(idx):
                raise _Reject("beam_index: must be an integer >= 0")
            values["beam_index"] = int(idx)
            values["received_power_mw"] = p = _number(fields, BEAM_COLUMNS, "received_power_mw")
            if p <= 0:
                raise _Reject("received_power_mw: must be > 0")
            for name in ("tx_power_dbm", "tx_gain_dbi", "rx_gain_dbi"):
                values[name] = _number(fields, BEAM_COLUMNS, name)
            if (loc, int(idx)) in seen:
                raise _Reject(f"duplicate beam {int(idx)} at location {loc!r}")
        except _Reject as exc:
            diags.append(Diagnostic(lineno, str(exc)))
            continue
        seen.add((loc, values["beam_index"]))
        records.append(BeamRecord(**values))
    if rows and not records:
        raise FormatError(f"no parseable records among {len(rows)} data rows")
    return records, diags


def write_beams(records: Iterable[BeamRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BEAM_COLUMNS)
    for r in records:
        w.writerow([r.location_id, fmt6(r.frequency_ghz), r.environment, r.scenario,
                    fmt6(r.tx_height_m), fmt6(r.rx_height_m), fmt6(r.distance_m), r.beam_index,
                    fmt_power(r.received_power_mw), fmt6(r.tx_power_dbm), fmt6(r.tx_gain_dbi),
                    fmt6(r.rx_gain_dbi)])
    return buf.getvalue()


def group_beams(records: Sequence[BeamRecord]) -> List[Tuple[BeamSet, BeamRecord]]:
    """Group beam records per location, in order of first appearance.

    Each BeamSet is paired with the location's first record, which carries
    the link budget fields.
    """
    order, beams, first = [], {}, {}
    for r in records:
        if r.location_id not in beams:
            order.append(r.location_id)
            beams[r.location_id] = []
            first[r.location_id] = r
        beams[r.location_id].append((r.beam_index, r.received_power_mw))
    return [(BeamSet(loc, first[loc].distance_m, tuple(beams[loc])), first[loc]) for loc in order]


def beam_fit_dataset(records: Sequence[BeamRecord], scheme, max_beams: int) -> FitDataset:
    """Combined-beam path loss samples for every location and N_r = 1..max_beams.

    Locations with fewer beams contribute every count they can support.
    """
    if max_beams < 1:
        raise DomainError("max_beams must be >= 1")
    groups = group_beams(records)
    if not groups:
        raise DomainError("no beam records")
    freqs = {r.frequency_ghz for _, r in groups}
    if len(freqs) != 1:
        raise DomainError(f"beam records mix carrier frequencies {sorted(freqs)}")
    d, pl, n_r = [], [], []
    for beam_set, meta in groups:
        for k in range(1, min(max_beams, len(beam_set)) + 1):
            d.append(beam_set.distance)
            pl.append(measured_path_loss_from_beams(
                beam_set, k, scheme, meta.tx_power_dbm, meta.tx_gain_dbi, meta.rx_gain_dbi))
            n_r.append(k)
    return FitDataset(FrequencyBand(freqs.pop()), np.array(d), np.array(pl), np.array(n_r))


def measurement_dataset(records: Sequence[MeasurementRecord]) -> FitDataset:
    if not records:
        raise DomainError("no measurement records")
    freqs = {r.frequency_ghz for r in records}
    if len(freqs) != 1:
        raise DomainError(f"records mix carrier frequencies {sorted(freqs)}")
    return FitDataset(FrequencyBand(freqs.pop()),
                      np.array([r.distance_m for r in records]),
                      np.array([r.path_loss_db for r in records]))


def synth_header(model: CiModel, seed: int) -> List[str]:
    return [
        "synthetic CI dataset (not measured data)",
        f"sampler={SHADOWING_SAMPLER} seed={int(seed)}",
        f"frequency_ghz={model.band.carrier!r} ple={model.ple!r} sigma_db={model.sigma!r}",
    ]


def generate_ci_dataset(
    model: CiModel,
    distances: Sequence[float],
    seed: int,
    *,
    environment: str = "synthetic",
    scenario: str = "NLOS",
    tx_height_m: float = 1.5,
    rx_height_m: float = 1.5,
) -> List[MeasurementRecord]:
    """One record per distance, shadowed with the model's sigma from ``seed``."""
    d = np.asarray(list(distances), dtype=float)
    pl = np.atleast_1d(ci_path_loss(model, d, ShadowingSpec(model.sigma, seed)))
    scenario = scenario.upper()
    if scenario not in SCENARIOS:
        raise DomainError(f"scenario must be LOS or NLOS, got {scenario!r}")
    return [
        MeasurementRecord(model.band.carrier, environment, scenario, tx_height_m, rx_height_m,
                          float(di), float(pi))
        for di, pi in zip(d, pl)
    ]


# -- rendering ---------------------------------------------------------------

def render(columns: Sequence[str], rows: Sequence[Sequence], fmt: str = "text",
           command: str = "", notes: Sequence[str] = ()) -> str:
    """Render rows as aligned text, CSV (6 decimals) or JSON."""
    if fmt == "json":
        doc = {"command": command, "columns": list(columns),
               "rows": [dict(zip(columns, _json_value(r))) for r in rows], "notes": list(notes)}
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_csv_cell(v) for v in r])
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    cells = [list(columns)] + [[_text_cell(v) for v in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(c.rjust(w) if _numeric(c) else c.ljust(w) for c, w in zip(row, widths)).rstrip()
             for row in cells]
    lines.extend(f"# {n}" for n in notes)
    return "\n".join(lines) + "\n"


def _json_value(row):
    out = []
    for v in row:
        if isinstance(v, Decimal):
            v = float(v)
        elif isinstance(v, np.generic):
            v = v.item()
        out.append(v)
    return out


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt6(v)
    return str(v)


def _text_cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "FLAG" if v else ""
    if isinstance(v, (float, np.floating)):
        return format(round_printed(v, 4), "f")
    return str(v)


def _numeric(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


# -- tables and plot data ----------------------------------------------------

TABLE_COLUMNS = ("table", "group", "quantity", "column", "computed", "rounded", "printed",
                 "diff", "kind", "flagged")


def table_rows(selector: str) -> List[tuple]:
    return [(c.table, c.group, c.quantity, c.column, c.computed, c.rounded, c.printed, c.diff,
             c.kind, c.flagged) for c in table_cells(selector)]


def table_notes(selector: str) -> List[str]:
    flagged = [c for c in table_cells(selector) if c.flagged]
    notes = [f"{len(flagged)} derived cell(s) differ from the printed value after rounding to 3 decimals"]
    notes += [f"flagged: table {c.table} / {c.group} / {c.quantity} / {c.column}: "
              f"computed {c.rounded} vs printed {c.printed}" for c in flagged]
    return notes


def export_tables(selector: str = "all", fmt: str = "text") -> str:
    """Recomputed table cells, flagging derived cells that differ after rounding."""
    return render(TABLE_COLUMNS, table_rows(selector), fmt, command="tables",
                  notes=table_notes(selector))


@dataclass(frozen=True)
class Curve:
    name: str
    ple: float  # slope per decade / 10
    evaluate: Callable
    span_m: Tuple[float, float]


def _slope_curves(columns, terrain_for_nlos: str = "A") -> List[Curve]:
    curves = []
    for col in columns:
        band = FrequencyBand(col.freq_ghz)
        ci = CiModel(band, col.ple, col.sigma)
        curves.append(Curve(f"CI n={col.ple:g} ({col.label})", col.ple,
                            lambda d, m=ci: ci_path_loss(m, d), col.span_m))
        if col.scenario == "LOS":
            mod = ModifiedModel(FreeSpaceBase(band), col.alphas["FS"])
            fn = modified_fs_path_loss
            label = f"modified FS alpha={col.alphas['FS']:g} ({col.label})"
        else:
            ctx = SuiContext(band, TerrainParams.of(terrain_for_nlos), col.h_tx, col.h_rx)
            mod = ModifiedModel(ctx, col.alphas[terrain_for_nlos])
            fn = modified_sui_path_loss
            label = (f"modified SUI terrain {terrain_for_nlos} "
                     f"alpha={col.alphas[terrain_for_nlos]:g} ({col.label})")
        curves.append(Curve(label, mod.alpha * base_ple(mod.base),
                            lambda d, m=mod, f=fn: f(m, d), col.span_m))
    return curves


FIG7_BEAMS = (1, 2, 4, 6, 8, 10)


def figure_curves(figure: int) -> List[Curve]:
    """Model curves shown in figure ``figure`` (1-7)."""
    t2 = TABLE_II
    selection = {
        1: [c for c in TABLE_I if c.scenario == "LOS"],
        2: [c for c in TABLE_I if c.scenario == "NLOS"],
        3: [c for c in t2 if c.scenario == "LOS" and c.h_rx == 2.0],
        4: [c for c in t2 if c.scenario == "NLOS" and c.h_rx == 2.0],
        5: [c for c in t2 if c.scenario == "LOS" and c.h_rx == 4.06],
        6: [c for c in t2 if c.scenario == "NLOS" and c.h_rx == 4.06],
    }
    if figure in selection:
        return _slope_curves(selection[figure])
    if figure != 7:
        raise ValueError(f"unknown figure {figure!r}, expected 1-7")
    group = TABLE_III[0]  # 28 GHz coherent combining
    model = BcCiModel(FrequencyBand(group.freq_ghz), group.n_single, group.a_weight, group.scheme)
    span = (1.0, 1000.0)
    curves = [Curve(f"BC-CI N_r={k}", effective_ple(model, k),
                    lambda d, k=k: bc_ci_path_loss(model, k, d), span) for k in FIG7_BEAMS]
    for k in (2, 4):
        ci = CiModel(model.band, group.ci_ple[k - 1])
        curves.append(Curve(f"CI N_r={k}", ci.ple, lambda d, m=ci: ci_path_loss(m, d), span))
    return curves


PLOT_COLUMNS = ("figure", "curve", "ple", "distance_m", "path_loss_db")


def plot_rows(figure: int, resolution: int = 10) -> List[tuple]:
    """Rows over each curve's span at ``resolution`` points per decade, plus the 1 m anchor."""
    if int(resolution) != resolution or resolution < 2:
        raise ValueError(f"resolution must be an integer >= 2 points per decade, got {resolution}")
    rows = []
    for curve in figure_curves(figure):
        lo, hi = curve.span_m
        count = max(2, int(math.ceil(resolution * math.log10(hi / lo))) + 1)
        grid = log_grid(lo, hi, count)
        if lo > 1.0:
            grid = np.concatenate(([1.0], grid))
        pl = curve.evaluate(grid)
        rows.extend((figure, curve.name, curve.ple, float(d), float(p)) for d, p in zip(grid, pl))
    return rows


def export_plot_data(figure: int, resolution: int = 10, fmt: str = "csv") -> str:
    return render(PLOT_COLUMNS, plot_rows(figure, resolution), fmt, command="plot-data")
