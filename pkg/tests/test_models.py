import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmwave_pathloss import (
    BelowReferenceDistanceError,
    CiModel,
    DomainError,
    FreeSpaceBase,
    FrequencyBand,
    ModifiedModel,
    OutOfValidityError,
    ShadowingSpec,
    SuiContext,
    TerrainParams,
    ci_path_loss,
    fs_path_loss,
    fspl_1m,
    modified_fs_path_loss,
    modified_sui_path_loss,
    sample_shadowing,
    sui_freq_correction,
    sui_path_loss,
    sui_ple,
    sui_rx_height_correction,
    to_db,
    to_linear,
)

F28, F60, F73 = FrequencyBand(28), FrequencyBand(60), FrequencyBand(73)
TA, TB, TC = TerrainParams.of("A"), TerrainParams.of("B"), TerrainParams.of("C")


def test_band_conversions():
    band = FrequencyBand(73.5)
    assert band.carrier_mhz == 73500.0
    assert band.carrier_hz == 73.5e9
    with pytest.raises(DomainError):
        FrequencyBand(0)


@pytest.mark.parametrize("terrain, abc", [
    ("A", (4.6, 0.0075, 12.6)),
    ("b", (4.0, 0.0065, 17.1)),
    ("C", (3.6, 0.005, 20.0)),
])
def test_terrain_constants(terrain, abc):
    t = TerrainParams.of(terrain)
    assert (t.a, t.b, t.c) == abc


def test_unknown_terrain():
    with pytest.raises(DomainError):
        TerrainParams.of("D")


# Expected values below were evaluated at 40 digits with mpmath.

@pytest.mark.parametrize("f, expected", [(28, 61.343160626844), (73, 69.666457202409), (1, 32.4)])
def test_fspl_1m(f, expected):
    assert fspl_1m(FrequencyBand(f)) == pytest.approx(expected, abs=1e-9)


def test_fs_path_loss_values():
    assert fs_path_loss(F73, 1) == pytest.approx(69.708229388458, abs=1e-9)
    assert fs_path_loss(F73, 100) == pytest.approx(109.708229388458, abs=1e-9)


@given(st.floats(1, 1e4), st.floats(-10, 40), st.floats(1, 100))
def test_fs_gains_subtract(d, g, f):
    band = FrequencyBand(f)
    assert fs_path_loss(band, d, g, g) - fs_path_loss(band, d) == pytest.approx(-2 * g, abs=1e-9)


@given(st.floats(1, 1e4), st.floats(0.5, 300))
def test_fs_close_to_rounded_anchor(d, f):
    band = FrequencyBand(f)
    assert abs(fs_path_loss(band, d) - (fspl_1m(band) + 20 * math.log10(d))) < 0.05


def test_fs_below_reference_distance():
    with pytest.raises(BelowReferenceDistanceError):
        fs_path_loss(F73, 0.99)


@pytest.mark.parametrize("terrain, h, expected", [
    (TA, 1.5, 12.98875), (TA, 17, 5.213676470588), (TB, 7, 6.397357142857),
])
def test_sui_ple(terrain, h, expected):
    assert sui_ple(terrain, h) == pytest.approx(expected, abs=1e-9)


def test_sui_ple_domain():
    with pytest.raises(DomainError):
        sui_ple(TA, 0)


def test_sui_freq_correction():
    assert sui_freq_correction(FrequencyBand(2)) == 0.0
    assert sui_freq_correction(F73) == pytest.approx(9.373757186739, abs=1e-9)
    assert sui_freq_correction(F28) == pytest.approx(6.876768214069, abs=1e-9)
    with pytest.raises(OutOfValidityError):
        sui_freq_correction(FrequencyBand(1.9))


def test_sui_rx_height_correction():
    assert sui_rx_height_correction("A", 2) == 0.0
    assert sui_rx_height_correction("A", 4.06) == pytest.approx(-3.320957209463, abs=1e-9)
    assert sui_rx_height_correction("C", 1.5) == pytest.approx(2.498774732166, abs=1e-9)
    # A and B share the same slope
    assert sui_rx_height_correction("B", 4.06) == sui_rx_height_correction("A", 4.06)
    with pytest.raises(DomainError):
        sui_rx_height_correction("A", -1)


def test_sui_path_loss():
    ctx = SuiContext(F73, TA, h_tx=17, h_rx=2)
    assert sui_path_loss(ctx, 1) == pytest.approx(79.040214389148, abs=1e-9)
    assert sui_path_loss(ctx, 100) == pytest.approx(183.313743800913, abs=1e-9)
    assert sui_path_loss(ctx, 100, ShadowingSpec(0.0, seed=5)) == sui_path_loss(ctx, 100)


def test_sui_context_rejects_low_frequency():
    with pytest.raises(OutOfValidityError):
        SuiContext(FrequencyBand(1.0), TA, 10, 2)
    SuiContext(FrequencyBand(2.0), TA, 10, 2)


def test_ci_path_loss():
    assert ci_path_loss(CiModel(F73, 4.4), 1) == fspl_1m(F73)
    assert ci_path_loss(CiModel(F73, 4.4), 100) == pytest.approx(157.666457202409, abs=1e-9)
    assert ci_path_loss(CiModel(F28, 3.812), 100) == pytest.approx(137.583160626844, abs=1e-9)
    with pytest.raises(BelowReferenceDistanceError):
        ci_path_loss(CiModel(F73, 4.4), 0.5)


def test_ci_vectorized_matches_scalar():
    model = CiModel(F28, 3.1)
    d = np.array([1.0, 5.0, 50.0])
    out = ci_path_loss(model, d)
    assert isinstance(out, np.ndarray)
    assert list(out) == [ci_path_loss(model, x) for x in d]


def test_modified_fs():
    m = ModifiedModel(FreeSpaceBase(F60), 1.1)
    assert modified_fs_path_loss(m, 1) == pytest.approx(67.963025007673, abs=1e-12)
    assert modified_fs_path_loss(m, 100) == pytest.approx(111.963025007673, abs=1e-9)
    assert modified_fs_path_loss(m, 100) == pytest.approx(ci_path_loss(CiModel(F60, 2.2), 100), abs=1e-9)
    m = ModifiedModel(FreeSpaceBase(F60), 1.25)
    assert modified_fs_path_loss(m, 10) == pytest.approx(92.963025007673, abs=1e-9)


def test_modified_fs_ignores_gains():
    plain = ModifiedModel(FreeSpaceBase(F73), 1.15)
    horns = ModifiedModel(FreeSpaceBase(F73, 27, 27), 1.15)
    d = np.geomspace(1, 1000, 20)
    assert np.allclose(modified_fs_path_loss(plain, d), modified_fs_path_loss(horns, d), atol=1e-9)


def test_modified_sui():
    ctx = SuiContext(F73, TA, 17, 2)
    exact = ModifiedModel(ctx, 4.4 / sui_ple(TA, 17))
    assert modified_sui_path_loss(exact, 100) == pytest.approx(157.666457202409, abs=1e-9)
    table = ModifiedModel(ctx, 0.844)
    assert modified_sui_path_loss(table, 100) == pytest.approx(157.673316025939, abs=1e-9)
    assert abs(modified_sui_path_loss(table, 100) - 157.666457202409) < 0.01
    assert modified_sui_path_loss(table, 1) == pytest.approx(fspl_1m(F73), abs=1e-12)


def test_modified_model_validation():
    with pytest.raises(DomainError):
        ModifiedModel(FreeSpaceBase(F60), 0)
    with pytest.raises(DomainError):
        modified_sui_path_loss(ModifiedModel(FreeSpaceBase(F60), 1), 10)
    with pytest.raises(DomainError):
        modified_fs_path_loss(ModifiedModel(SuiContext(F60, TA, 2, 2), 1), 10)


@given(st.floats(0.1, 8), st.floats(1, 1e4), st.floats(1, 1e4))
def test_ci_monotone(n, d1, d2):
    model = CiModel(F28, n)
    lo, hi = sorted((d1, d2))
    if hi > lo:
        assert ci_path_loss(model, hi) > ci_path_loss(model, lo)


@settings(max_examples=50)
@given(st.floats(2, 100), st.floats(0.5, 50), st.floats(0.5, 50), st.sampled_from("ABC"),
       st.floats(1.5, 8))
def test_exact_alpha_equivalence(f, h_tx, h_rx, terrain, n_ci):
    band = FrequencyBand(f)
    d = np.geomspace(1, 1e4, 200)
    ci = ci_path_loss(CiModel(band, n_ci), d)
    fs = modified_fs_path_loss(ModifiedModel(FreeSpaceBase(band), n_ci / 2), d)
    ctx = SuiContext(band, TerrainParams.of(terrain), h_tx, h_rx)
    sui = modified_sui_path_loss(ModifiedModel(ctx, n_ci / sui_ple(ctx.terrain, h_tx)), d)
    assert np.max(np.abs(fs - ci)) < 1e-9
    assert np.max(np.abs(sui - ci)) < 1e-9


def test_shadowing_statistics():
    spec = ShadowingSpec(9.0, seed=2024)
    x = sample_shadowing(spec, 200_000)
    assert abs(x.mean()) < 0.05 * 9.0
    assert abs(x.std() / 9.0 - 1) < 0.02


def test_shadowing_deterministic():
    spec = ShadowingSpec(4.0, seed=7)
    model = CiModel(F28, 3.0)
    a = ci_path_loss(model, 50, spec)
    assert a == ci_path_loss(model, 50, spec)
    assert a - ci_path_loss(model, 50) == pytest.approx(sample_shadowing(spec), abs=1e-12)
    assert ci_path_loss(model, 50, ShadowingSpec(4.0, seed=8)) != a


def test_shadowing_spec_validation():
    with pytest.raises(DomainError):
        ShadowingSpec(-1.0)
    with pytest.raises(DomainError):
        ShadowingSpec(1.0, seed=-1)
    with pytest.raises(DomainError):
        ShadowingSpec(1.0, seed=2**64)


@given(st.floats(-300, 300))
def test_db_round_trip(x):
    assert abs(to_db(to_linear(x)) - x) < 1e-12


def test_to_db_domain():
    with pytest.raises(DomainError):
        to_db(0.0)
