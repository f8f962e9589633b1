import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import signal

from optbackstep.errors import NumericBlowup, RejectedInput
from optbackstep.numkit import (
    Biquad,
    OdeStepper,
    RbfLayout,
    biquad_step,
    butterworth2_design,
    ode_step,
    rbf_eval,
)

finite = st.floats(-5, 5, allow_nan=False)


# -- RBF ----------------------------------------------------------------------

def test_rbf_center_hit_is_one():
    layout = RbfLayout([[0.0, 1.0], [2.0, -1.0]], 1.5)
    assert rbf_eval(layout, [2.0, -1.0])[1] == 1.0


def test_rbf_mirror_symmetric_centers_equal():
    layout = RbfLayout([[-1.0], [1.0]], 0.7)
    b = rbf_eval(layout, [0.0])
    assert b[0] == b[1]


def test_rbf_closed_form_value():
    b = rbf_eval(RbfLayout([[0.0]], 1.0), [2.0])
    assert b[0] == pytest.approx(math.exp(-4.0), abs=1e-15)
    assert b[0] == pytest.approx(0.018316, abs=1e-6)


def test_rbf_dimension_mismatch_rejected():
    with pytest.raises(RejectedInput):
        rbf_eval(RbfLayout([[0.0, 0.0]], 1.0), [1.0])


def test_rbf_bad_width_rejected():
    with pytest.raises(RejectedInput):
        RbfLayout([[0.0]], 0.0)


def test_grid_layout_shape_and_width():
    layout = RbfLayout.grid([(-2, 2), (-2, 2)], [5, 5])
    assert layout.count == 25 and layout.dim == 2
    assert layout.width == 1.0 and layout.scale is None


def test_grid_mixed_spacing_matches_per_axis_gaussian():
    layout = RbfLayout.grid([(-2, 2), (-30, 30)], [5, 5])
    x = np.array([0.3, 7.0])
    got = rbf_eval(layout, x)
    # brute force: exp(-sum(((x_k - c_k) / spacing_k)^2))
    want = [math.exp(-((x[0] - a) / 1.0) ** 2 - ((x[1] - b) / 15.0) ** 2)
            for a in np.linspace(-2, 2, 5) for b in np.linspace(-30, 30, 5)]
    np.testing.assert_allclose(got, want, rtol=1e-13)


@given(st.lists(st.tuples(finite, finite), min_size=2, max_size=8), st.tuples(finite, finite),
       st.randoms(use_true_random=False))
def test_rbf_permutation_equivariant(centers, x, rnd):
    perm = list(range(len(centers)))
    rnd.shuffle(perm)
    base = rbf_eval(RbfLayout(centers, 1.3), x)
    shuffled = rbf_eval(RbfLayout([centers[p] for p in perm], 1.3), x)
    np.testing.assert_array_equal(shuffled, base[perm])


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=6), st.tuples(finite, finite))
def test_rbf_range(centers, x):
    b = rbf_eval(RbfLayout(centers, 2.0), x)
    assert np.all(b > 0) and np.all(b <= 1)


# -- integrators ------------------------------------------------------------------

@pytest.mark.parametrize("method", ["euler", "rk4"])
def test_zero_field_leaves_state(method):
    x = np.array([1.0, -2.0])
    out = ode_step(OdeStepper(method, 0.01), lambda t, x: np.zeros_like(x), 0.0, x)
    np.testing.assert_array_equal(out, x)


@pytest.mark.parametrize("method", ["euler", "rk4"])
def test_unit_field_adds_dt(method):
    x = np.array([1.0, -2.0, 0.5])
    out = ode_step(OdeStepper(method, 0.001), lambda t, x: np.ones_like(x), 0.0, x)
    np.testing.assert_allclose(out, x + 0.001, atol=1e-15)


def test_rk4_exponential_single_step():
    out = ode_step(OdeStepper("rk4", 0.1), lambda t, x: x, 0.0, np.array([1.0]))
    assert out[0] == pytest.approx(1.105170918, abs=1e-7)
    assert abs(out[0] - math.exp(0.1)) < 1e-7


def _rk4_error(dt):
    stepper = OdeStepper("rk4", dt)
    x = np.array([1.0])
    steps = int(round(1.0 / dt))
    for k in range(steps):
        x = ode_step(stepper, lambda t, x: x, k * dt, x)
    return abs(x[0] - math.e)


def test_rk4_global_order():
    ratio = _rk4_error(1e-2) / _rk4_error(5e-3)
    assert math.log2(ratio) >= 3.8


def test_blowup_carries_time():
    with pytest.raises(NumericBlowup) as info:
        ode_step(OdeStepper("euler", 0.1), lambda t, x: np.full_like(x, np.inf), 2.5, np.array([1.0]))
    assert info.value.t == 2.5


def test_stepper_rejects_bad_dt():
    with pytest.raises(RejectedInput):
        OdeStepper("rk4", 0.0)
    with pytest.raises(RejectedInput):
        OdeStepper("midpoint", 0.1)


# -- filter -------------------------------------------------------------------------

@pytest.mark.parametrize("coeff_mid, cutoff, dt", [
    (1.141, 10.0, 1e-3), (1.4142, 1.0, 1e-3), (0.5, 300.0, 1e-3), (2.0, 3.0, 0.05),
])
def test_design_unit_dc_gain(coeff_mid, cutoff, dt):
    assert butterworth2_design(coeff_mid, cutoff, dt).dc_gain == pytest.approx(1.0, abs=1e-9)


def test_magnitude_at_cutoff_matches_prototype():
    filt = butterworth2_design(1.4142, 1.0, 1e-3)
    analog = 1.0 / abs(complex(1.0 - 1.0, 1.4142 * 1.0))
    assert analog == pytest.approx(1 / math.sqrt(2), abs=1e-4)
    assert abs(abs(filt.response(1.0, 1e-3)) - analog) < 1e-3
    assert abs(abs(filt.response(1.0, 1e-3)) - 1 / math.sqrt(2)) < 1e-3


@pytest.mark.parametrize("coeff_mid, cutoff, dt", [(1.141, 10.0, 1e-3), (1.4142, 2.0, 0.01)])
def test_design_matches_scipy_prewarped_bilinear(coeff_mid, cutoff, dt):
    # independent route: prewarp the analog cutoff and let scipy do the bilinear map
    wa = 2.0 / dt * math.tan(cutoff * dt / 2.0)
    b, a = signal.bilinear([wa * wa], [1.0, coeff_mid * wa, wa * wa], fs=1.0 / dt)
    f = butterworth2_design(coeff_mid, cutoff, dt)
    np.testing.assert_allclose([f.b0, f.b1, f.b2], b, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose([1.0, f.a1, f.a2], a, rtol=1e-9, atol=1e-15)


def test_prototype_coefficients_at_unit_cutoff():
    # the continuous prototype is 1 / (s^2 + 1.141 s + 1); at cutoff 1 rad/s |H(j)| = 1 / 1.141
    filt = butterworth2_design(1.141, 1.0, 1e-3)
    assert abs(filt.response(1.0, 1e-3)) == pytest.approx(1 / 1.141, abs=1e-6)


def test_monotone_magnitude_for_butterworth_damping():
    filt = butterworth2_design(math.sqrt(2), 10.0, 1e-3)
    w = np.linspace(0.0, 0.95 * math.pi / 1e-3, 400)
    mag = np.abs([filt.response(x, 1e-3) for x in w])
    assert np.all(np.diff(mag) <= 1e-12)


def test_design_rejects_nyquist():
    with pytest.raises(RejectedInput):
        butterworth2_design(1.141, math.pi / 1e-3, 1e-3)
    with pytest.raises(RejectedInput):
        butterworth2_design(-1.0, 1.0, 1e-3)


def test_zero_in_zero_out():
    filt = butterworth2_design(1.141, 10.0, 1e-3)
    assert biquad_step(filt, 0.0) == 0.0


def test_step_response_settles_to_input():
    dt = 1e-3
    filt = butterworth2_design(1.141, 10.0, dt)
    y = 0.0
    for _ in range(int(10 / dt)):
        y = biquad_step(filt, 1.0)
    assert abs(y - 1.0) < 1e-3


def test_impulse_response_sums_to_one():
    filt = butterworth2_design(1.141, 10.0, 1e-3)
    total = biquad_step(filt, 1.0)
    for _ in range(50_000):
        total += biquad_step(filt, 0.0)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_reset_is_steady_state():
    filt = butterworth2_design(1.141, 10.0, 1e-3)
    filt.reset(2.5)
    for _ in range(5):
        assert biquad_step(filt, 2.5) == pytest.approx(2.5, abs=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=40), st.floats(-10, 10))
def test_biquad_linear(inputs, scale):
    base = butterworth2_design(1.141, 10.0, 1e-3)
    f1 = Biquad(base.b0, base.b1, base.b2, base.a1, base.a2)
    f2 = Biquad(base.b0, base.b1, base.b2, base.a1, base.a2)
    for u in inputs:
        y1 = biquad_step(f1, u)
        y2 = biquad_step(f2, scale * u)
        assert abs(y2 - scale * y1) <= 1e-12 * max(1.0, abs(scale * y1))


def test_biquad_rejects_nan():
    with pytest.raises(NumericBlowup):
        biquad_step(butterworth2_design(1.141, 10.0, 1e-3), float("nan"))
