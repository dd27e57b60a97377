import math

import numpy as np
import pytest

from bosim.distinguishability import (
    DelaySetting,
    WavepacketModel,
    delay_from_path,
    overlap,
    temporal_decomposition,
)

MODEL = WavepacketModel(210.0)


def test_delay_from_path():
    assert delay_from_path(0.0) == 0.0
    # 160 um / 0.299792458 um/fs
    assert delay_from_path(160.0) == pytest.approx(533.7025523170433, rel=1e-12)
    assert delay_from_path(-160.0) == -delay_from_path(160.0)
    assert int(delay_from_path(160.0)) == 533
    assert DelaySetting(160.0).delay == delay_from_path(160.0)


def test_delay_from_path_accepts_arrays():
    out = delay_from_path(np.array([-160.0, 0.0, 160.0]))
    assert out.shape == (3,)
    assert out[1] == 0.0


def test_overlap_examples():
    assert overlap(0.0, MODEL) == 1.0
    # exp(-0.5 * (533/210)^2)
    assert overlap(533.0, MODEL) == pytest.approx(0.03991657136727, rel=1e-10)
    assert overlap(533.0, MODEL) ** 2 == pytest.approx(1.593332669718359e-3, rel=1e-10)
    assert overlap(210.0, MODEL) == pytest.approx(0.6065306597126334, rel=1e-12)


def test_overlap_even_and_decreasing():
    grid = np.linspace(0, 2000, 401)
    v = overlap(grid, MODEL)
    assert np.all(np.diff(v) < 0)
    assert np.array_equal(v, overlap(-grid, MODEL))


def test_decomposition_examples():
    assert temporal_decomposition(0.0, MODEL) == (1.0, 0.0)
    c_par, c_perp = temporal_decomposition(1e6, MODEL)
    assert c_par == pytest.approx(0.0, abs=1e-300) and c_perp == 1.0
    c_par, c_perp = temporal_decomposition(533.0, MODEL)
    assert c_par == pytest.approx(0.0399, abs=5e-5)
    assert c_perp == pytest.approx(0.9992030160734512, rel=1e-12)


@pytest.mark.parametrize("delay", [-700.0, -100.0, 0.0, 37.5, 210.0, 533.7])
def test_decomposition_round_trip(delay):
    c_par, c_perp = temporal_decomposition(delay, MODEL)
    assert c_par ** 2 + c_perp ** 2 == pytest.approx(1.0, abs=1e-15)
    reference = np.array([1.0, 0.0])
    delayed = np.array([c_par, c_perp])
    assert abs(np.vdot(reference, delayed)) == overlap(delay, MODEL)


@pytest.mark.parametrize("tau_c", [0.0, -1.0])
def test_invalid_coherence_time(tau_c):
    with pytest.raises(ValueError):
        WavepacketModel(tau_c)
