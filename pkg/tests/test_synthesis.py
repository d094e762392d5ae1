import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pulsepath import (
    ControlEvaluator, ControlSpec, Pulse, SystemParams, control_function, envelope, initial_state,
    population, relative_phase, sample_pulse, sigmoid, synthesize_field_closed,
    synthesize_field_generic,
)
from pulsepath.analysis import pulse_metrics
from pulsepath.synthesis import InvalidControlError, SingularityError, control_complement

# 1/(1+e^-1) and 0.4 + 0.6/(1+e^15), 40-digit mpmath
SIGMOID_AT_ONE = 0.73105857863000487925
F_AT_MINUS_1500 = 0.40000018354133617758
# dense 0.01-au scan of the literal closed form over [-1500, 1500] (mu=6, omega0=0.02)
FIG1_PEAK_SCAN = 5.619756158306182e-4
FIG2_PEAK_SCAN = 2.8098780600803383e-3

populations = st.floats(0.0, 1.0)
alphas = st.floats(1e-3, 1.0)


def literal_closed_form(t, spec, params):
    """The closed-form pulse exactly as written; only safe for moderate alpha*t."""
    e = np.exp(spec.alpha * t)
    num = spec.alpha * (spec.a_f - spec.a_i) * e
    den = (1 + e) * np.sqrt((1 - spec.a_i + (1 - spec.a_f) * e) * (spec.a_i + spec.a_f * e))
    return num / den / params.mu * np.sin(params.omega0 * t + spec.phi)


class TestSigmoid:
    def test_symmetry_point(self):
        for a in (1e-3, 0.01, 3.0):
            assert sigmoid(0.0, a) == 0.5

    def test_asymptotics_without_overflow(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert sigmoid(1e6, 0.01) == 1.0
            assert sigmoid(-1e6, 0.01) == 0.0
            assert sigmoid(-1e6, 0.01) >= 0.0

    def test_reference_value(self):
        assert sigmoid(100.0, 0.01) == pytest.approx(SIGMOID_AT_ONE, rel=1e-15)

    @given(st.floats(-1e4, 1e4), st.floats(1e-3, 1e3), alphas)
    def test_strictly_increasing(self, t, dt, a):
        lo, hi = sigmoid(t, a), sigmoid(t + dt, a)
        assert hi >= lo
        if 0.0 < lo < 1.0 and abs(a * t) < 30 and a * dt > 1e-10:
            assert hi > lo


class TestControlFunction:
    def test_midpoint(self):
        f, _ = control_function(0.0, ControlSpec(0.4, 1.0, 0.01))
        assert f == pytest.approx(0.7, abs=1e-15)

    def test_constant_path(self):
        spec = ControlSpec(0.3, 0.3, 0.02)
        f, fdot = control_function(np.linspace(-1000, 1000, 11), spec)
        np.testing.assert_allclose(f, 0.3, rtol=0, atol=1e-16)
        np.testing.assert_array_equal(fdot, 0.0)

    def test_window_edge(self):
        spec = ControlSpec(0.4, 1.0, 0.01)
        f, _ = control_function(-1500.0, spec)
        assert f == pytest.approx(F_AT_MINUS_1500, rel=1e-15)
        assert control_complement(-1500.0, spec) == pytest.approx(1 - F_AT_MINUS_1500, rel=1e-14)

    @given(populations, populations, alphas, st.floats(-1e4, 1e4))
    def test_stays_between_endpoints(self, ai, af, a, t):
        f, fdot = control_function(t, ControlSpec(ai, af, a))
        assert min(ai, af) - 1e-15 <= f <= max(ai, af) + 1e-15
        assert fdot * (af - ai) >= 0

    @given(populations, populations, alphas)
    def test_monotone_direction(self, ai, af, a):
        t = np.linspace(-5 / a, 5 / a, 101)
        f, _ = control_function(t, ControlSpec(ai, af, a))
        d = np.diff(f)
        if ai < af and af - ai > 1e-6:
            assert np.all(d > 0)
        elif ai > af and ai - af > 1e-6:
            assert np.all(d < 0)
        elif ai == af:
            assert np.all(d == 0)

    def test_fdot_matches_finite_difference(self):
        spec = ControlSpec(0.2, 0.9, 0.03)
        t = np.linspace(-300, 300, 61)
        h = 1e-3
        fd = (control_function(t + h, spec)[0] - control_function(t - h, spec)[0]) / (2 * h)
        np.testing.assert_allclose(control_function(t, spec)[1], fd, rtol=1e-7, atol=1e-12)


class TestClosedForm:
    def test_equal_endpoints_give_zero(self, fig_params):
        t = np.linspace(-1e5, 1e5, 1001)
        spec = ControlSpec(0.3, 0.3, 0.01)
        assert np.all(synthesize_field_closed(spec, fig_params, t) == 0.0)

    def test_matches_literal_formula(self, fig_params, rng):
        for _ in range(200):
            spec = ControlSpec(rng.uniform(0, 1), rng.uniform(0, 1), 10 ** rng.uniform(-3, -1),
                               rng.uniform(-math.pi, math.pi))
            t = rng.uniform(-30, 30, size=20) / spec.alpha
            ours = synthesize_field_closed(spec, fig_params, t)
            ref = literal_closed_form(t, spec, fig_params)
            np.testing.assert_allclose(ours, ref, rtol=1e-12, atol=1e-300)

    @given(st.sampled_from([0.0, 1.0, 0.4]), st.sampled_from([0.0, 1.0, 0.6]), alphas,
           st.floats(-1e8, 1e8))
    def test_finite_everywhere(self, ai, af, a, t):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            v = synthesize_field_closed(ControlSpec(ai, af, a), SystemParams(0.02, 6.0), t)
        assert math.isfinite(v)

    def test_vanishes_at_infinity(self, fig_params):
        for ai, af in [(0.4, 1.0), (1.0, 0.0), (0.0, 1.0), (0.2, 0.7)]:
            spec = ControlSpec(ai, af, 0.01)
            tail = envelope(spec, fig_params, np.array([-1e5, 1e5]))
            assert np.all(tail < 1e-150)

    def test_fig1_peak_against_dense_scan(self, fig_params, fig1_spec):
        grid = np.arange(-150000, 150001) * 0.01
        scan = envelope(fig1_spec, fig_params, grid).max()
        assert scan == pytest.approx(FIG1_PEAK_SCAN, rel=1e-12)
        pm = pulse_metrics(fig1_spec, fig_params, (-1500, 1500))
        assert pm.peak_amplitude >= scan * (1 - 1e-14)
        assert pm.peak_amplitude == pytest.approx(FIG1_PEAK_SCAN, rel=1e-9)

    def test_fig2_peak_against_dense_scan(self, fig_params, fig2_spec):
        pm = pulse_metrics(fig2_spec, fig_params)
        assert pm.peak_amplitude == pytest.approx(FIG2_PEAK_SCAN, rel=1e-8)

    def test_inversion_pulse_symmetric(self, fig_params):
        spec = ControlSpec(0.4, 0.6, 0.01)
        t = np.linspace(0, 3000, 30001)
        env = envelope(spec, fig_params, t)
        np.testing.assert_allclose(env, envelope(spec, fig_params, -t), rtol=0, atol=1e-12 * env.max())
        assert np.argmax(envelope(spec, fig_params, np.linspace(-3000, 3000, 60001))) == 30000

    def test_fig1_pulse_is_asymmetric(self, fig_params, fig1_spec):
        t = np.linspace(0, 1500, 1501)
        assert np.max(np.abs(envelope(fig1_spec, fig_params, t) - envelope(fig1_spec, fig_params, -t))) > 1e-5

    @given(populations, populations, alphas, st.floats(-1e4, 1e4))
    def test_endpoint_swap_reflects_time(self, ai, af, a, t):
        prm = SystemParams(0.02, 6.0)
        e = envelope(ControlSpec(ai, af, a), prm, t)
        e_swap = envelope(ControlSpec(af, ai, a), prm, -t)
        assert e_swap == pytest.approx(e, rel=1e-13, abs=1e-300)

    @given(populations, populations, alphas, st.floats(-1e4, 1e4))
    def test_envelope_bounds_field(self, ai, af, a, t):
        spec, prm = ControlSpec(ai, af, a), SystemParams(0.02, 6.0)
        assert abs(synthesize_field_closed(spec, prm, t)) <= envelope(spec, prm, t) * (1 + 1e-15)

    @given(populations, populations, alphas)
    def test_zero_field_iff_constant_path(self, ai, af, a):
        spec = ControlSpec(ai, af, a)
        t = np.linspace(-20 / a, 20 / a, 2001)
        zero = np.all(synthesize_field_closed(spec, SystemParams(0.02, 6.0), t) == 0.0)
        assert zero == (ai == af)

    @given(populations, populations, alphas, st.floats(-1e4, 1e4))
    def test_doubling_mu_halves_field(self, ai, af, a, t):
        spec = ControlSpec(ai, af, a, 0.3)
        e1 = synthesize_field_closed(spec, SystemParams(0.02, 3.0), t)
        e2 = synthesize_field_closed(spec, SystemParams(0.02, 6.0), t)
        assert e2 == pytest.approx(e1 / 2, rel=1e-15, abs=1e-300)

    def test_complex_envelope_reconstructs_field(self, fig_params, fig1_spec):
        pulse = Pulse(fig1_spec, fig_params)
        t = np.linspace(-1500, 1500, 3001)
        recon = 2 * (pulse.complex_envelope(t) * np.exp(-1j * fig_params.omega0 * t)).real
        np.testing.assert_allclose(recon, pulse(t), rtol=0, atol=1e-12 * FIG1_PEAK_SCAN)
        assert pulse.carrier == fig_params.omega0


class TestGenericSynthesizer:
    def test_agrees_with_closed_form(self, rng):
        worst = 0.0
        for _ in range(1000):
            spec = ControlSpec(rng.uniform(0, 1), rng.uniform(0, 1), 10 ** rng.uniform(-3, -1),
                               rng.uniform(-math.pi, math.pi))
            prm = SystemParams(10 ** rng.uniform(-3, 0), rng.choice([-1, 1]) * 10 ** rng.uniform(-1, 1))
            t = rng.uniform(-20, 20) / spec.alpha
            ev = ControlEvaluator.from_spec(spec)
            gen = synthesize_field_generic(ev, prm, spec.phi, t)
            closed = synthesize_field_closed(spec, prm, t)
            peak = envelope(spec, prm, -math.log(1) / spec.alpha)  # envelope scale near t=0
            bound = 1e-12 * abs(closed) + 1e-15 * max(peak, envelope(spec, prm, t))
            assert abs(gen - closed) <= bound, (spec, prm, t)
            if closed != 0:
                worst = max(worst, abs(gen - closed) / abs(closed))
        assert worst < 1e-12

    def test_zero_slope_gives_zero_field(self, fig_params):
        ev = ControlEvaluator(f=lambda t: np.full_like(np.asarray(t, float), 0.3),
                              fdot=lambda t: np.zeros_like(np.asarray(t, float)),
                              probe_window=(-10, 10))
        assert synthesize_field_generic(ev, fig_params, 0.0, 1.234) == 0.0

    def test_cosine_inversion_path(self):
        T = 100.0
        omega0 = 0.02
        phi = math.pi / 2 - omega0 * T / 2
        ev = ControlEvaluator(f=lambda t: 0.5 * (1 - np.cos(np.pi * np.asarray(t) / T)),
                              fdot=lambda t: 0.5 * np.pi / T * np.sin(np.pi * np.asarray(t) / T),
                              probe_window=(0.0, T))
        field = synthesize_field_generic(ev, SystemParams(omega0, 1.0), phi, T / 2)
        assert field == pytest.approx(math.pi / T, rel=1e-14)

    def test_pure_state_at_finite_time_is_singular(self):
        T = 100.0
        ev = ControlEvaluator(f=lambda t: 0.5 * (1 - np.cos(np.pi * np.asarray(t) / T)),
                              fdot=lambda t: 0.5 * np.pi / T * np.sin(np.pi * np.asarray(t) / T),
                              probe_window=(0.0, T))
        with pytest.raises(SingularityError):
            synthesize_field_generic(ev, SystemParams(0.02, 1.0), 0.0, 0.0)
        with pytest.raises(SingularityError):
            synthesize_field_generic(ev, SystemParams(0.02, 1.0), 0.0, np.array([50.0, T]))

    def test_asymptotic_limit_returns_zero(self, fig_params):
        ev = ControlEvaluator.from_spec(ControlSpec(0.4, 1.0, 0.01))
        assert synthesize_field_generic(ev, fig_params, 0.0, 1e5) == 0.0
        ev0 = ControlEvaluator.from_spec(ControlSpec(0.0, 1.0, 0.01))
        assert synthesize_field_generic(ev0, fig_params, 0.0, -1e5) == 0.0

    def test_rejects_path_outside_unit_interval(self):
        with pytest.raises(InvalidControlError, match="leaves"):
            ControlEvaluator(f=lambda t: 1.2 * np.ones_like(np.asarray(t, float)),
                             fdot=lambda t: np.zeros_like(np.asarray(t, float)),
                             probe_window=(0, 1))

    def test_rejects_inconsistent_slope(self):
        with pytest.raises(InvalidControlError, match="finite difference"):
            ControlEvaluator(f=lambda t: 0.5 + 0.4 * np.tanh(np.asarray(t)),
                             fdot=lambda t: 0.5 / np.cosh(np.asarray(t)) ** 2,
                             probe_window=(-5, 5))

    def test_accepts_consistent_slope(self):
        ev = ControlEvaluator(f=lambda t: 0.5 + 0.4 * np.tanh(np.asarray(t)),
                              fdot=lambda t: 0.4 / np.cosh(np.asarray(t)) ** 2,
                              probe_window=(-5, 5))
        assert not ev.asymptotic


class TestInitialState:
    def test_fig1_start(self, fig1_spec):
        s = initial_state(fig1_spec, -1500.0)
        assert s.c1 == pytest.approx(math.sqrt(F_AT_MINUS_1500), rel=1e-15)
        assert s.c2 == pytest.approx(math.sqrt(1 - F_AT_MINUS_1500), rel=1e-14)
        assert abs(s.norm - 1) <= 1e-15

    def test_phase_convention(self):
        s = initial_state(ControlSpec(0.5, 0.5, 0.01, math.pi / 2), 0.0)
        assert s.c1 == pytest.approx(1j * math.sqrt(0.5), abs=1e-16)
        assert s.c2 == pytest.approx(math.sqrt(0.5), abs=1e-16)
        assert relative_phase(s) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_pure_start(self):
        s = initial_state(ControlSpec(1.0, 1.0, 0.01, 0.7), -100.0)
        assert s.c1 == pytest.approx(complex(math.cos(0.7), math.sin(0.7)), abs=1e-16)
        assert s.c2 == 0

    @given(populations, populations, alphas, st.floats(-math.pi, math.pi), st.floats(-1e4, 1e4))
    def test_population_follows_path(self, ai, af, a, phi, t0):
        spec = ControlSpec(ai, af, a, phi)
        s = initial_state(spec, t0)
        assert abs(s.norm - 1) <= 1e-15
        assert population(s, 1) == pytest.approx(control_function(t0, spec)[0], abs=1e-15)


def test_sample_pulse_pointwise(fig_params, fig1_spec):
    grid = np.linspace(-1500, 1500, 301)
    s = sample_pulse(fig1_spec, fig_params, grid)
    assert len(s) == 301
    for k in (0, 150, 213, 300):
        assert s.field[k] == synthesize_field_closed(fig1_spec, fig_params, grid[k])
        assert s.envelope[k] == envelope(fig1_spec, fig_params, grid[k])
    with pytest.raises(ValueError):
        sample_pulse(fig1_spec, fig_params, grid[::-1])
