"""Command line front end.

Exit status: 0 success, 1 domain/data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import dataio
from .beams import BcCiModel, bc_ci_path_loss
from .errors import DomainError, FormatError
from .estimation import (
    FitDataset,
    fit_bc_weight,
    fit_ci_ple,
    fit_slope_correction,
    residuals_about_ci,
    shadowing_sigma,
)
from .link import RangeQuery, attenuation_per_decade_delta, distance_for_loss, link_path_loss
from .models import (
    CiModel,
    FreeSpaceBase,
    FrequencyBand,
    ModifiedModel,
    ShadowingSpec,
    SuiContext,
    TerrainParams,
    ci_path_loss,
    fs_path_loss,
    modified_fs_path_loss,
    modified_sui_path_loss,
    sui_path_loss,
)
from .tables import log_grid

PROG = "mmwave-pl"
MODELS = ("fs", "sui", "ci", "fs-los", "sui-nlos", "bc-ci")


# -- flag types: range checks happen at parse time -----------------------------

def _float_type(name: str, check, rule: str):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
        if not np.isfinite(value) or not check(value):
            raise argparse.ArgumentTypeError(f"{text} violates {rule}")
        return value
    parse.__name__ = name
    return parse


positive = _float_type("positive", lambda v: v > 0, "the requirement > 0")
non_negative = _float_type("non_negative", lambda v: v >= 0, "the requirement >= 0")
number = _float_type("number", lambda v: True, "")
distance = _float_type("distance", lambda v: v >= 1.0,
                       "the 1 m close-in reference distance rule (distance must be >= 1 m)")
a_weight = _float_type("a_weight", lambda v: 0 <= v < 1, "0 <= A < 1")


def _int_type(name: str, low: int, rule: str):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
        if value < low:
            raise argparse.ArgumentTypeError(f"{text} violates {rule}")
        return value
    parse.__name__ = name
    return parse


beam_count = _int_type("beam_count", 1, "N_r >= 1")
seed_type = _int_type("seed", 0, "seed >= 0")
resolution_type = _int_type("resolution", 2, "resolution >= 2 points per decade")


# -- parser ---------------------------------------------------------------------

def _add_format(p, default="text"):
    p.add_argument("--format", choices=("text", "csv", "json"), default=default,
                   help=f"output format (default {default})")


def _add_input(p, help_text):
    p.add_argument("--input", required=True, metavar="PATH", help=help_text + " ('-' for stdin)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Millimeter-wave path loss models.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("pathloss", help="evaluate a path loss model")
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--freq-ghz", required=True, type=positive)
    p.add_argument("--distance-m", required=True, type=distance, nargs="+")
    p.add_argument("--ple", type=positive, help="CI path loss exponent")
    p.add_argument("--alpha", type=positive, help="slope correction factor")
    p.add_argument("--terrain", choices=("A", "B", "C"), type=str.upper)
    p.add_argument("--h-tx", type=positive, help="TX height in m")
    p.add_argument("--h-rx", type=positive, help="RX height in m")
    p.add_argument("--tx-gain", type=number, default=0.0, help="TX gain in dBi (fs only)")
    p.add_argument("--rx-gain", type=number, default=0.0, help="RX gain in dBi (fs only)")
    p.add_argument("--n-single", type=positive, help="single best beam PLE (bc-ci)")
    p.add_argument("--a-weight", type=a_weight, help="weighting factor A (bc-ci)")
    p.add_argument("--beams", type=beam_count, help="number of combined beams N_r (bc-ci)")
    p.add_argument("--scheme", choices=("cc", "ncc"), default="cc")
    shadow = p.add_mutually_exclusive_group()
    shadow.add_argument("--sigma", type=non_negative, help="shadowing sigma in dB")
    shadow.add_argument("--no-shadow", action="store_true", help="disable shadowing (default)")
    p.add_argument("--seed", type=seed_type, default=0)
    _add_format(p)

    p = sub.add_parser("fit-ci", help="fit the CI path loss exponent to measurements")
    _add_input(p, "measurement CSV")
    p.add_argument("--scenario", choices=("LOS", "NLOS"), type=str.upper)
    _add_format(p)

    p = sub.add_parser("fit-alpha", help="fit a slope correction factor to measurements")
    _add_input(p, "measurement CSV")
    p.add_argument("--base", required=True, choices=("fs", "sui"))
    p.add_argument("--terrain", choices=("A", "B", "C"), type=str.upper)
    p.add_argument("--h-tx", type=positive)
    p.add_argument("--h-rx", type=positive)
    p.add_argument("--scenario", choices=("LOS", "NLOS"), type=str.upper)
    _add_format(p)

    p = sub.add_parser("fit-bc", help="fit the beam combining weight A to beam records")
    _add_input(p, "beam CSV")
    p.add_argument("--scheme", choices=("cc", "ncc"), default="cc")
    p.add_argument("--max-beams", type=beam_count, default=4)
    p.add_argument("--n-single", type=positive,
                   help="single best beam PLE (default: fitted from the N_r=1 samples)")
    _add_format(p)

    p = sub.add_parser("sigma", help="shadowing sigma of residuals or of data about a CI model")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--residuals", type=number, nargs="+", metavar="DB")
    src.add_argument("--input", metavar="PATH", help="measurement CSV ('-' for stdin)")
    p.add_argument("--ple", type=positive, help="CI exponent the residuals are taken about")
    _add_format(p)

    p = sub.add_parser("tables", help="recompute the published parameter tables")
    p.add_argument("--table", choices=("I", "II", "III", "all"), default="all",
                   type=lambda s: "all" if s.lower() == "all" else s.upper())
    _add_format(p)

    p = sub.add_parser("range", help="distance at which a model reaches a target loss")
    p.add_argument("--freq-ghz", required=True, type=positive)
    p.add_argument("--ple", type=positive, help="CI path loss exponent")
    p.add_argument("--n-single", type=positive)
    p.add_argument("--a-weight", type=a_weight)
    p.add_argument("--beams", type=beam_count)
    p.add_argument("--scheme", choices=("cc", "ncc"), default="cc")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--target-loss", type=positive, metavar="DB")
    target.add_argument("--target-loss-of", action="store_true",
                        help="use the loss of the CI model --ple-ref at --at-m as target")
    p.add_argument("--ple-ref", type=positive)
    p.add_argument("--at-m", type=distance)
    p.add_argument("--atm-db-per-km", type=non_negative, default=0.0)
    _add_format(p)

    p = sub.add_parser("synth", help="generate a seeded synthetic CI measurement CSV")
    p.add_argument("--freq-ghz", required=True, type=positive)
    p.add_argument("--ple", required=True, type=positive)
    p.add_argument("--sigma", type=non_negative, default=0.0)
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("--distances", type=distance, nargs="+", metavar="M")
    p.add_argument("--d-min", type=distance)
    p.add_argument("--d-max", type=distance)
    p.add_argument("--count", type=_int_type("count", 1, "count >= 1"))
    p.add_argument("--environment", default="synthetic")
    p.add_argument("--scenario", choices=("LOS", "NLOS"), type=str.upper, default="NLOS")
    p.add_argument("--h-tx", type=positive, default=1.5)
    p.add_argument("--h-rx", type=positive, default=1.5)
    p.add_argument("--output", metavar="PATH", help="write here instead of stdout")

    p = sub.add_parser("plot-data", help="emit model curves of a figure as data")
    p.add_argument("--figure", required=True, type=int, choices=range(1, 8))
    p.add_argument("--resolution", type=resolution_type, default=10,
                   help="points per decade of distance (default 10)")
    _add_format(p, default="csv")
    return parser


def _require(parser, args, flags: Sequence[str], why: str):
    missing = [f for f in flags if getattr(args, f.lstrip("-").replace("-", "_")) is None]
    if missing:
        parser.error(f"{why} requires {', '.join(missing)}")


def validate(parser: argparse.ArgumentParser, args) -> None:
    """Cross-flag checks that argparse cannot express."""
    cmd = args.command
    if cmd == "pathloss":
        needs = {
            "sui": ["--terrain", "--h-tx", "--h-rx"],
            "ci": ["--ple"],
            "fs-los": ["--alpha"],
            "sui-nlos": ["--alpha", "--terrain", "--h-tx", "--h-rx"],
            "bc-ci": ["--n-single", "--a-weight", "--beams"],
        }.get(args.model, [])
        _require(parser, args, needs, f"--model {args.model}")
        if args.model in ("sui", "sui-nlos") and args.freq_ghz < 2.0:
            parser.error(f"argument --freq-ghz: {args.freq_ghz} violates the SUI frequency "
                         "validity f >= 2 GHz")
        if args.model != "fs" and (args.tx_gain or args.rx_gain):
            parser.error("--tx-gain/--rx-gain only apply to --model fs")
        if args.model == "fs" and args.sigma is not None:
            parser.error("argument --sigma: not allowed with --model fs (no shadowing term)")
    elif cmd == "fit-alpha" and args.base == "sui":
        _require(parser, args, ["--terrain"], "--base sui")
    elif cmd == "sigma" and args.input is not None:
        _require(parser, args, ["--ple"], "--input")
    elif cmd == "range":
        if args.ple is None:
            _require(parser, args, ["--n-single", "--a-weight", "--beams"], "range without --ple")
        elif args.n_single is not None or args.beams is not None or args.a_weight is not None:
            parser.error("argument --ple: not allowed with --n-single/--a-weight/--beams")
        if args.target_loss_of:
            _require(parser, args, ["--ple-ref", "--at-m"], "--target-loss-of")
        elif args.ple_ref is not None or args.at_m is not None:
            parser.error("--ple-ref/--at-m need --target-loss-of")
    elif cmd == "synth":
        grid = [args.d_min, args.d_max, args.count]
        if args.distances is None:
            _require(parser, args, ["--d-min", "--d-max", "--count"], "synth without --distances")
            if args.d_max < args.d_min:
                parser.error("argument --d-max: must be >= --d-min")
        elif any(v is not None for v in grid):
            parser.error("argument --distances: not allowed with --d-min/--d-max/--count")


# -- commands -------------------------------------------------------------------

@dataclass
class _Output:
    command: str
    columns: Sequence[str]
    rows: list
    notes: Sequence[str] = ()


def _open_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _report(diags) -> None:
    for d in diags:
        kind = "rejected" if d.rejected else "flagged"
        print(f"{PROG}: line {d.line}: {kind}: {d.reason}", file=sys.stderr)


def _load_measurements(path: str, scenario: Optional[str] = None):
    records, diags = dataio.parse_measurements(_open_text(path))
    _report(diags)
    if scenario:
        records = [r for r in records if r.scenario == scenario]
    return records


def _shadow(args) -> Optional[ShadowingSpec]:
    if args.sigma is None or args.no_shadow:
        return None
    return ShadowingSpec(args.sigma, args.seed)


def cmd_pathloss(args) -> _Output:
    band = FrequencyBand(args.freq_ghz)
    shadow = _shadow(args)
    d = np.asarray(args.distance_m, dtype=float)
    m = args.model
    if m == "fs":
        pl = fs_path_loss(band, d, args.tx_gain, args.rx_gain)
    elif m == "sui":
        ctx = SuiContext(band, TerrainParams.of(args.terrain), args.h_tx, args.h_rx)
        pl = sui_path_loss(ctx, d, shadow)
    elif m == "ci":
        pl = ci_path_loss(CiModel(band, args.ple), d, shadow)
    elif m == "fs-los":
        pl = modified_fs_path_loss(ModifiedModel(FreeSpaceBase(band), args.alpha), d, shadow)
    elif m == "sui-nlos":
        ctx = SuiContext(band, TerrainParams.of(args.terrain), args.h_tx, args.h_rx)
        pl = modified_sui_path_loss(ModifiedModel(ctx, args.alpha), d, shadow)
    else:
        model = BcCiModel(band, args.n_single, args.a_weight, args.scheme)
        pl = bc_ci_path_loss(model, args.beams, d, shadow)
    rows = [(m, args.freq_ghz, float(di), float(pi)) for di, pi in zip(d, pl)]
    return _Output("pathloss", ("model", "freq_ghz", "distance_m", "path_loss_db"), rows)


def _fit_rows(name, result, samples):
    return [(name, result.value, result.sigma, result.rmse, samples)]


FIT_COLUMNS = ("parameter", "value", "sigma_db", "rmse_db", "samples")


def cmd_fit_ci(args) -> _Output:
    data = dataio.measurement_dataset(_load_measurements(args.input, args.scenario))
    res = fit_ci_ple(data)
    return _Output("fit-ci", FIT_COLUMNS, _fit_rows("ple", res, len(data)))


def _unique(records, attr, flag):
    values = {getattr(r, attr) for r in records}
    if len(values) != 1:
        raise DomainError(f"records carry several {attr} values {sorted(values)}; pass {flag}")
    return values.pop()


def cmd_fit_alpha(args) -> _Output:
    records = _load_measurements(args.input, args.scenario)
    data = dataio.measurement_dataset(records)
    if args.base == "fs":
        base = FreeSpaceBase(data.band)
    else:
        h_tx = args.h_tx if args.h_tx is not None else _unique(records, "tx_height_m", "--h-tx")
        h_rx = args.h_rx if args.h_rx is not None else _unique(records, "rx_height_m", "--h-rx")
        base = SuiContext(data.band, TerrainParams.of(args.terrain), h_tx, h_rx)
    res = fit_slope_correction(data, base)
    return _Output("fit-alpha", FIT_COLUMNS, _fit_rows("alpha", res, len(data)))


def cmd_fit_bc(args) -> _Output:
    records, diags = dataio.parse_beams(_open_text(args.input))
    _report(diags)
    data = dataio.beam_fit_dataset(records, args.scheme, args.max_beams)
    rows = []
    n_single = args.n_single
    if n_single is None:
        single = data.n_r == 1
        best = FitDataset(data.band, data.distances[single], data.path_loss[single])
        res = fit_ci_ple(best)
        n_single = res.value
        rows += _fit_rows("n_single", res, len(best))
    res = fit_bc_weight(data, n_single)
    rows += _fit_rows("a_weight", res, len(data))
    return _Output("fit-bc", FIT_COLUMNS, rows)


def cmd_sigma(args) -> _Output:
    if args.residuals is not None:
        residuals = args.residuals
    else:
        data = dataio.measurement_dataset(_load_measurements(args.input))
        residuals = residuals_about_ci(data, args.ple)
    return _Output("sigma", ("sigma_db", "samples"), [(shadowing_sigma(residuals), len(residuals))])


def cmd_tables(args) -> _Output:
    return _Output("tables", dataio.TABLE_COLUMNS, dataio.table_rows(args.table),
                   dataio.table_notes(args.table))


def cmd_range(args) -> _Output:
    band = FrequencyBand(args.freq_ghz)
    if args.ple is not None:
        model, n_r = CiModel(band, args.ple), 1
    else:
        model, n_r = BcCiModel(band, args.n_single, args.a_weight, args.scheme), args.beams
    if args.target_loss_of:
        target = link_path_loss(CiModel(band, args.ple_ref), args.at_m,
                                atmospheric_rate=args.atm_db_per_km)
    else:
        target = args.target_loss
    q = RangeQuery(model, target, n_r=n_r, atmospheric_rate=args.atm_db_per_km)
    d = distance_for_loss(q)
    columns = ["distance_m", "ple", "target_loss_db", "atm_db_per_km"]
    row = [d, q.ple, target, args.atm_db_per_km]
    if args.target_loss_of:
        columns.append("delta_db_per_decade")
        row.append(attenuation_per_decade_delta(args.ple_ref, q.ple))
    return _Output("range", tuple(columns), [tuple(row)])


def cmd_plot_data(args) -> _Output:
    return _Output("plot-data", dataio.PLOT_COLUMNS, dataio.plot_rows(args.figure, args.resolution))


def cmd_synth(args) -> str:
    model = CiModel(FrequencyBand(args.freq_ghz), args.ple, args.sigma)
    if args.distances is not None:
        d = args.distances
    else:
        d = log_grid(args.d_min, args.d_max, args.count) if args.count > 1 else [args.d_min]
    records = dataio.generate_ci_dataset(
        model, d, args.seed, environment=args.environment, scenario=args.scenario,
        tx_height_m=args.h_tx, rx_height_m=args.h_rx)
    return dataio.write_measurements(records, comments=dataio.synth_header(model, args.seed))


COMMANDS = {
    "pathloss": cmd_pathloss,
    "fit-ci": cmd_fit_ci,
    "fit-alpha": cmd_fit_alpha,
    "fit-bc": cmd_fit_bc,
    "sigma": cmd_sigma,
    "tables": cmd_tables,
    "range": cmd_range,
    "plot-data": cmd_plot_data,
}


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        validate(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "synth":
                text = cmd_synth(args)
                if args.output:
                    Path(args.output).write_text(text, encoding="utf-8", newline="\n")
                    text = ""
            else:
                out = COMMANDS[args.command](args)
                text = dataio.render(out.columns, out.rows, args.format, command=out.command,
                                     notes=out.notes)
        for w in caught:
            print(f"{PROG}: warning: {w.message}", file=sys.stderr)
    except (DomainError, FormatError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"{PROG}: error: argument --input: cannot open {exc.filename}", file=sys.stderr)
        return 2
    stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
