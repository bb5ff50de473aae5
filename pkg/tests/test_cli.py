import io
import json
from pathlib import Path

import pytest
from jsonschema import validate

from mmwave_pathloss import (
    BcCiModel,
    CiModel,
    FrequencyBand,
    RangeQuery,
    ci_path_loss,
    distance_for_loss,
    modified_sui_path_loss,
    ModifiedModel,
    SuiContext,
    TerrainParams,
)
from mmwave_pathloss.cli import run

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "cli-output.schema.json").read_text())


def cli(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], stdout=out)
    return code, out.getvalue()


def cli_json(*argv):
    code, text = cli(*argv, "--format", "json")
    assert code == 0, text
    doc = json.loads(text)
    validate(doc, SCHEMA)
    return doc


def test_pathloss_ci_example():
    code, text = cli("pathloss", "--model", "ci", "--freq-ghz", 73, "--ple", 4.4, "--distance-m", 100)
    assert code == 0
    assert "157.6665" in text


def test_pathloss_golden_against_library():
    doc = cli_json("pathloss", "--model", "ci", "--freq-ghz", 73, "--ple", 4.4,
                   "--distance-m", 10, 100, 187)
    expected = [ci_path_loss(CiModel(FrequencyBand(73), 4.4), d) for d in (10, 100, 187)]
    assert [r["path_loss_db"] for r in doc["rows"]] == expected
    doc = cli_json("pathloss", "--model", "sui-nlos", "--freq-ghz", 73, "--terrain", "A",
                   "--h-tx", 17, "--h-rx", 2, "--alpha", 0.844, "--distance-m", 100)
    ctx = SuiContext(FrequencyBand(73), TerrainParams.of("A"), 17, 2)
    assert doc["rows"][0]["path_loss_db"] == modified_sui_path_loss(ModifiedModel(ctx, 0.844), 100.0)


@pytest.mark.parametrize("model_args", [
    ["--model", "fs", "--tx-gain", 27, "--rx-gain", 27],
    ["--model", "sui", "--terrain", "B", "--h-tx", 7, "--h-rx", 2],
    ["--model", "fs-los", "--alpha", 1.1],
    ["--model", "bc-ci", "--n-single", 3.812, "--a-weight", 0.0671, "--beams", 4],
])
def test_pathloss_models(model_args):
    doc = cli_json("pathloss", "--freq-ghz", 28, "--distance-m", 50, *model_args)
    assert len(doc["rows"]) == 1


def test_pathloss_shadowing_seeded():
    args = ["pathloss", "--model", "ci", "--freq-ghz", 28, "--ple", 3, "--distance-m", 50,
            "--sigma", 9, "--seed", 4]
    assert cli(*args) == cli(*args)
    assert cli(*args)[1] != cli(*args[:-1], 5)[1]


def test_tables_table_ii():
    doc = cli_json("tables", "--table", "II")
    alphas = [float(r["rounded"]) for r in doc["rows"]]
    printed = [r["printed"] for r in doc["rows"]]
    assert len(alphas) == 12
    assert alphas == printed


def test_range_example():
    code, text = cli("range", "--freq-ghz", 73, "--ple", 3.226, "--target-loss-of",
                     "--ple-ref", 3.728, "--at-m", 100)
    assert code == 0
    assert "204.7488" in text
    doc = cli_json("range", "--freq-ghz", 73, "--ple", 3.226, "--target-loss-of",
                   "--ple-ref", 3.728, "--at-m", 100)
    row = doc["rows"][0]
    band = FrequencyBand(73)
    target = ci_path_loss(CiModel(band, 3.728), 100.0)
    assert row["distance_m"] == distance_for_loss(RangeQuery(CiModel(band, 3.226), target))
    assert row["delta_db_per_decade"] == pytest.approx(5.02, abs=1e-12)


def test_range_bc_model():
    doc = cli_json("range", "--freq-ghz", 73, "--n-single", 3.728, "--a-weight", 0.0673,
                   "--beams", 4, "--target-loss", 150)
    q = RangeQuery(BcCiModel(FrequencyBand(73), 3.728, 0.0673), 150.0, n_r=4)
    assert doc["rows"][0]["distance_m"] == distance_for_loss(q)


def test_sigma_residuals():
    doc = cli_json("sigma", "--residuals", 1, 2, 2, 4, 6)
    assert doc["rows"][0]["sigma_db"] == pytest.approx(3.492849839315, abs=1e-12)


@pytest.mark.parametrize("argv", [
    ["pathloss", "--model", "ci", "--freq-ghz", 73, "--ple", 4.4, "--distance-m", 0.5],
    ["pathloss", "--model", "bc-ci", "--freq-ghz", 28, "--n-single", 3.8, "--a-weight", 0.06,
     "--beams", 0, "--distance-m", 10],
    ["pathloss", "--model", "ci", "--freq-ghz", 73, "--ple", 4.4, "--distance-m", 10,
     "--sigma", 3, "--no-shadow"],
    ["pathloss", "--model", "sui-nlos", "--freq-ghz", 1.9, "--terrain", "A", "--h-tx", 7,
     "--h-rx", 2, "--alpha", 0.8, "--distance-m", 10],
    ["pathloss", "--model", "ci", "--freq-ghz", 73, "--distance-m", 10],
    ["pathloss", "--model", "ci", "--freq-ghz", 73, "--ple", 4.4, "--distance-m", 10, "--bogus"],
    ["frobnicate"],
    [],
    ["fit-ci", "--input", "/nonexistent/file.csv"],
    ["plot-data", "--figure", 9],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _ = cli(*argv)
    assert code == 2


def test_usage_messages_name_the_rule(capsys):
    cli("pathloss", "--model", "ci", "--freq-ghz", 73, "--ple", 4.4, "--distance-m", 0.5)
    assert "--distance-m" in capsys.readouterr().err
    cli("pathloss", "--model", "ci", "--freq-ghz", 73, "--ple", 4.4, "--distance-m", 10,
        "--sigma", 3, "--no-shadow")
    err = capsys.readouterr().err
    assert "--sigma" in err and "--no-shadow" in err


def test_sui_boundary_accepted():
    code, _ = cli("pathloss", "--freq-ghz", 2, "--model", "sui-nlos", "--terrain", "A",
                  "--h-tx", 7, "--h-rx", 2, "--alpha", 0.8, "--distance-m", 10)
    assert code == 0


def test_domain_error_exit_1(capsys):
    code, _ = cli("range", "--freq-ghz", 73, "--ple", 3, "--target-loss", 40)
    assert code == 1
    assert "anchor" in capsys.readouterr().err


def test_format_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("distance,loss\n10,100\n")
    assert cli("fit-ci", "--input", bad)[0] == 1


def test_synth_fit_pipeline(tmp_path):
    path = tmp_path / "d.csv"
    code, text = cli("synth", "--freq-ghz", 60, "--ple", 3.6, "--sigma", 0, "--d-min", 29,
                     "--d-max", 129, "--count", 16, "--output", path)
    assert code == 0 and text == ""
    assert path.read_text().startswith("# synthetic")
    doc = cli_json("fit-ci", "--input", path)
    assert doc["rows"][0]["value"] == pytest.approx(3.6, abs=1e-6)
    doc = cli_json("fit-alpha", "--input", path, "--base", "sui", "--terrain", "A")
    assert round(doc["rows"][0]["value"], 3) == 0.277
    doc = cli_json("fit-alpha", "--input", path, "--base", "fs")
    assert doc["rows"][0]["value"] == pytest.approx(1.8, abs=1e-6)
    doc = cli_json("sigma", "--input", path, "--ple", 3.6)
    assert doc["rows"][0]["sigma_db"] < 1e-5


def test_synth_stdout_deterministic():
    args = ["synth", "--freq-ghz", 28, "--ple", 3.0, "--sigma", 8, "--seed", 9,
            "--distances", 10, 20, 40]
    a, b = cli(*args), cli(*args)
    assert a == b and a[0] == 0
    assert len(a[1].strip().splitlines()) == 3 + 1 + 3


def test_fit_bc(tmp_path):
    lines = ["location_id,frequency_ghz,environment,scenario,tx_height_m,rx_height_m,distance_m,"
             "beam_index,received_power_mw,tx_power_dbm,tx_gain_dbi,rx_gain_dbi"]
    for loc, d, powers in [("a", 40, [2e-9, 1e-9, 5e-10]), ("b", 90, [4e-11, 3e-11, 1e-11]),
                           ("c", 150, [8e-12, 1e-12])]:
        lines += [f"{loc},73,urban,NLOS,7,2,{d},{i},{p:.6e},30,27,27" for i, p in enumerate(powers)]
    path = tmp_path / "beams.csv"
    path.write_text("\n".join(lines) + "\n")
    doc = cli_json("fit-bc", "--input", path, "--max-beams", 3)
    assert [r["parameter"] for r in doc["rows"]] == ["n_single", "a_weight"]
    doc = cli_json("fit-bc", "--input", path, "--n-single", 3.7, "--scheme", "ncc")
    assert [r["parameter"] for r in doc["rows"]] == ["a_weight"]


@pytest.mark.parametrize("argv", [
    ["tables"],
    ["tables", "--table", "III", "--format", "csv"],
    ["plot-data", "--figure", 7],
    ["plot-data", "--figure", 2, "--format", "json"],
])
def test_outputs_byte_identical(argv):
    assert cli(*argv) == cli(*argv)


@pytest.mark.parametrize("argv", [
    ["tables"],
    ["plot-data", "--figure", 3],
    ["fit-ci", "--input", "-"],
])
def test_json_schema_all_commands(argv, monkeypatch, tmp_path):
    if "-" in argv:
        _, text = cli("synth", "--freq-ghz", 28, "--ple", 3, "--sigma", 4, "--count", 5,
                      "--d-min", 5, "--d-max", 100, "--seed", 2)
        monkeypatch.setattr("sys.stdin", io.StringIO(text))
    cli_json(*argv)
