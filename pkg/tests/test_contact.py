import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agriterrain.core import GRAVITY, Attitude, VehicleParams
from agriterrain.exceptions import (
    EmptyWindowError,
    InvalidArgumentError,
    InvalidKinematicsError,
    InvalidLoadError,
    MissingDataError,
    SlipRangeWarning,
    TipOverWarning,
)
from agriterrain.features import contact_feature_vector, motion_resistance, slip, vertical_accel_stats, wheel_loads
from agriterrain.features.contact import motion_resistance_samples, wheel_loads_array
from agriterrain.series import CurrentStream, EncoderStream, ImuStream, PoseStream, SensorSeries
from oracles import load_balance_residuals

P = VehicleParams()
small_angle = st.floats(-math.radians(20), math.radians(20))


def test_level_loads_quarter_weight():
    assert wheel_loads(P, Attitude()).fz == (78.4, 78.4, 78.4, 78.4)


def test_pitch_five_degrees():
    fz = wheel_loads(P, Attitude(0, math.radians(5), 0)).fz
    assert fz[0] == pytest.approx(82.01, abs=0.01) and fz[2] == pytest.approx(82.01, abs=0.01)
    assert fz[1] == pytest.approx(74.19, abs=0.01) and fz[3] == pytest.approx(74.19, abs=0.01)


def test_positive_roll_loads_right_side():
    fz = wheel_loads(P, Attitude(math.radians(10), 0, 0)).fz
    assert fz[2] > fz[0] and fz[3] > fz[1]


@given(small_angle, small_angle, st.floats(-math.pi, math.pi))
def test_load_equilibrium(roll, pitch, yaw):
    fz = wheel_loads(P, Attitude(roll, pitch, yaw)).fz
    for r in load_balance_residuals(fz, P.weight, roll, pitch, P.cg_height, P.length, P.width):
        assert abs(r) < 1e-9


def test_literal_form_breaks_equilibrium_under_roll():
    roll = math.radians(10)
    fz = wheel_loads(P, Attitude(roll, 0, 0), legacy_rear_right=True).fz
    vertical, _, _ = load_balance_residuals(fz, P.weight, roll, 0, P.cg_height, P.length, P.width)
    assert abs(vertical) > 1.0
    # without roll the two forms agree
    assert wheel_loads(P, Attitude(0, 0.1, 0), legacy_rear_right=True) == wheel_loads(P, Attitude(0, 0.1, 0))


def test_tip_over_flag():
    with pytest.warns(TipOverWarning):
        loads = wheel_loads(P, Attitude(1.2, 0, 0))
    assert loads.tip_over and min(loads.fz) < 0


def test_attitude_outside_quasi_static_range():
    with pytest.raises(InvalidArgumentError):
        wheel_loads(P, Attitude(math.pi / 2, 0, 0))


def test_vectorised_loads_match_scalar():
    rpy = np.random.default_rng(2).uniform(-0.3, 0.3, (20, 3))
    batch = wheel_loads_array(P, rpy)
    for row, fz in zip(rpy, batch):
        assert tuple(fz) == wheel_loads(P, Attitude(*row)).fz


def test_motion_resistance_examples():
    assert motion_resistance(0.0, 78.4, P) == 0.0
    expected = 78.71 * 0.044 * 1.0 / (0.165 * 78.4)
    assert motion_resistance(1.0, 78.4, P) == pytest.approx(expected, rel=1e-12)
    assert motion_resistance(1.0, 78.4, P) == pytest.approx(0.2677, abs=1e-4)


@given(st.floats(0, 10), st.floats(1, 500), st.floats(0.1, 10))
def test_motion_resistance_homogeneous(i, fz, k):
    assert motion_resistance(k * i, k * fz, P) == pytest.approx(motion_resistance(i, fz, P), rel=1e-12)


@pytest.mark.parametrize("fz", [0.0, -5.0])
def test_motion_resistance_needs_positive_load(fz):
    with pytest.raises(InvalidLoadError):
        motion_resistance(1.0, fz, P)


def test_slip_examples():
    assert slip(0.5, 0.5 / 0.165, 0.165) == pytest.approx(0, abs=1e-15)
    assert slip(0.5, 3.367, 0.165) == pytest.approx(0.100, abs=1e-3)
    assert slip(0.0, 2.0, 0.165) == 1.0


def test_slip_errors_and_clamp():
    with pytest.raises(InvalidKinematicsError):
        slip(0.5, 0.0, 0.165)
    with pytest.warns(SlipRangeWarning):
        assert slip(1.0, 3.0, 0.165) == -0.05


@given(st.floats(0, 2), st.floats(0.5, 20))
def test_slip_range(v, w):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlipRangeWarning)
        assert -0.05 <= slip(v, w, 0.165) <= 1.0


def test_vertical_accel_stats_examples():
    rest = np.tile([0, 0, -GRAVITY], (10, 1))
    assert vertical_accel_stats(rest, np.zeros((10, 3))) == (0.0, 0.0)
    alt = np.tile([0, 0, -GRAVITY], (10, 1)) + np.array([[0, 0, 0.1], [0, 0, -0.1]] * 5)
    rms, std = vertical_accel_stats(alt, np.zeros((10, 3)))
    assert rms == pytest.approx(0.1, abs=1e-12) and std == pytest.approx(0.1, abs=1e-12)
    rms, std = vertical_accel_stats(rest + [0, 0, 0.05], np.zeros((10, 3)))
    assert rms == pytest.approx(0.05, abs=1e-12) and std == pytest.approx(0, abs=1e-12)


def test_vertical_accel_compensates_tilt():
    rpy = np.array([[0.1, 0.2, 0.0]])
    accel = np.array([[0, 0, -GRAVITY * math.cos(0.1) * math.cos(0.2)]])
    assert vertical_accel_stats(accel, rpy)[0] == pytest.approx(0, abs=1e-12)


def test_empty_accel_window():
    with pytest.raises(EmptyWindowError):
        vertical_accel_stats(np.empty((0, 3)), np.empty((0, 3)))


def constant_series(current=0.8, omega=3.1, speed=0.5, duration=4.0, drop_enc=None):
    t = np.arange(0, duration, 0.02)
    tp = np.arange(0, duration, 0.1)
    enc_t = t if drop_enc is None else t[(t < drop_enc[0]) | (t > drop_enc[1])]
    return SensorSeries(
        imu=ImuStream(t, np.tile([0, 0, -GRAVITY], (len(t), 1)), np.zeros((len(t), 3))),
        enc=EncoderStream(enc_t, np.full((len(enc_t), 4), omega)),
        cur=CurrentStream(t, np.full((len(t), 2), current)),
        pose=PoseStream(tp, np.column_stack((speed * tp, 0 * tp, 0 * tp)), np.zeros((len(tp), 3))),
    )


def test_constant_window_closed_form():
    f = contact_feature_vector(constant_series(), (1.0, 2.5), P)
    assert f.motion_resistance == pytest.approx(78.71 * 0.044 * 0.8 / (0.165 * 313.6 / 2), rel=1e-12)
    assert f.slip == pytest.approx(1 - 0.5 / (3.1 * 0.165), rel=1e-9)
    assert f.accel_rms == 0.0 and f.accel_std == 0.0
    assert f.negative_slip_samples == 0


def test_uncompensated_assumes_level_loads():
    s = constant_series()
    np.testing.assert_allclose(motion_resistance_samples(s, P), motion_resistance_samples(s, P, compensate=False))


def test_encoder_dropout_names_stream():
    with pytest.raises(MissingDataError) as info:
        contact_feature_vector(constant_series(drop_enc=(1.0, 2.0)), (0.5, 2.5), P)
    assert info.value.stream == "enc"


def test_simulated_dirt_road_window_recovers_presets(mixed_run):
    series, _ = mixed_run
    f = contact_feature_vector(series, (2.0, 18.0), P)
    assert f.slip == pytest.approx(0.0021, abs=0.002)
    assert f.motion_resistance == pytest.approx(0.05, rel=0.2)
    assert f.accel_std == pytest.approx(0.026, rel=0.3)
