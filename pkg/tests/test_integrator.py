"""Coupled-mode integrator tests against independent closed-form oracles."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from atomlight import _kernels_py
from atomlight.core import (
    DecoherenceModel,
    RamanCoupling,
    TriWaveState,
    beam_splitter_transform,
    integrate_three_wave,
)

UNIT_ETA = RamanCoupling(g_eg=1.0, g_em=1.0, delta=1.0)
LOSSLESS = DecoherenceModel()


def manley_rowe(traj, i):
    first = abs(traj.a_w[i]) ** 2 + abs(traj.s_a[i]) ** 2
    second = abs(traj.a_s[i]) ** 2 - abs(traj.s_a[i]) ** 2
    return first, second


class TestBasics:
    def test_write_only_is_fixed_point(self):
        state = TriWaveState(a_w=1.0)
        traj = integrate_three_wave(state, UNIT_ETA, LOSSLESS, duration=1.0, dt=1e-3)
        assert np.allclose(traj.a_w, 1.0, atol=1e-14)
        assert np.allclose(traj.a_s, 0.0, atol=1e-14)
        assert np.allclose(traj.s_a, 0.0, atol=1e-14)

    def test_rejects_non_positive_dt(self):
        with pytest.raises(ValueError):
            integrate_three_wave(TriWaveState(a_w=1.0), UNIT_ETA, LOSSLESS, 1.0, dt=0.0)
        with pytest.raises(ValueError):
            integrate_three_wave(TriWaveState(a_w=1.0), UNIT_ETA, LOSSLESS, 1.0, dt=-1e-3)

    def test_rejects_duration_below_one_step(self):
        with pytest.raises(ValueError):
            integrate_three_wave(TriWaveState(a_w=1.0), UNIT_ETA, LOSSLESS, 1e-4, dt=1e-3)

    def test_trajectory_includes_endpoints(self):
        state = TriWaveState(a_w=0.3, a_s=1.0, s_a=0.2)
        traj = integrate_three_wave(state, UNIT_ETA, LOSSLESS, duration=1.0, dt=1e-3, sample_every=7)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(1.0, rel=1e-12)
        assert traj.state(0) == state

    def test_auto_step_limits_area(self):
        state = TriWaveState(a_s=50.0, s_a=1.0)
        traj = integrate_three_wave(state, UNIT_ETA, LOSSLESS, duration=0.01)
        dt = traj.times[1] - traj.times[0]
        assert 2.0 * 50.0 * dt <= 0.01 * 1.0001


class TestConservation:
    def test_manley_rowe_over_1e4_steps(self):
        state = TriWaveState(a_w=1.0, a_s=2.0 + 0.5j, s_a=0.5 - 0.3j)
        traj = integrate_three_wave(state, UNIT_ETA, LOSSLESS, duration=5.0, dt=5e-4, sample_every=100)
        f0, s0 = manley_rowe(traj, 0)
        for i in range(len(traj)):
            f, s = manley_rowe(traj, i)
            assert abs(f - f0) <= 1e-9 * f0
            assert abs(s - s0) <= 1e-9 * max(abs(s0), 1.0)

    def test_fourth_order_convergence(self):
        state = TriWaveState(a_w=1.0, a_s=2.0 + 0.5j, s_a=0.5 - 0.3j)

        def final(dt):
            traj = integrate_three_wave(state, UNIT_ETA, LOSSLESS, duration=2.0, dt=dt, sample_every=10**9)
            return np.array([traj.a_w[-1], traj.a_s[-1], traj.s_a[-1]])

        reference = final(0.01 / 16)
        err_coarse = np.linalg.norm(final(0.01) - reference)
        err_fine = np.linalg.norm(final(0.005) - reference)
        assert 12.0 <= err_coarse / err_fine <= 20.0


class TestUndepletedLimit:
    def test_matches_rotation_oracle(self):
        # drive phase pi (real negative amplitude) reproduces the rotation
        # sign convention of beam_splitter_transform
        w0, m0 = 0.6 + 0.1j, 0.8 - 0.2j
        signal = abs(w0) ** 2 + abs(m0) ** 2
        pump = -math.sqrt(1e4 * signal)
        omega = 2.0 * abs(pump)
        state = TriWaveState(w0, pump, m0)
        traj = integrate_three_wave(
            state, UNIT_ETA, LOSSLESS, duration=2 * math.pi / omega, dt=0.01 / omega
        )
        scale = math.sqrt(signal)
        for i, t in enumerate(traj.times):
            ref = beam_splitter_transform(TriWaveState(w0, 0.0, m0), omega * t)
            err = math.hypot(abs(traj.a_w[i] - ref.a_w), abs(traj.s_a[i] - ref.s_a)) / scale
            assert err <= 1e-3

    def test_general_drive_phase_sets_the_rotation_axis(self):
        # closed form for arbitrary drive phase: with Omega = 2*eta*conj(A),
        # a_w(t) = w0 cos - e^{-i arg(Omega)} m0 sin, s_a the conjugate mix
        import cmath

        rng = np.random.default_rng(5)
        for phase in (0.0, 0.9, -2.2):
            w0 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            m0 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            signal = abs(w0) ** 2 + abs(m0) ** 2
            pump = math.sqrt(1e4 * signal) * cmath.exp(1j * phase)
            omega_c = 2.0 * UNIT_ETA.eta * pump.conjugate()
            mod, arg = abs(omega_c), cmath.phase(omega_c)
            traj = integrate_three_wave(
                TriWaveState(w0, pump, m0), UNIT_ETA, LOSSLESS, 2 * math.pi / mod, 0.01 / mod
            )
            for i, t in enumerate(traj.times):
                c, s = math.cos(mod * t / 2), math.sin(mod * t / 2)
                ref_w = w0 * c - cmath.exp(-1j * arg) * m0 * s
                ref_m = m0 * c + cmath.exp(1j * arg) * w0 * s
                err = math.hypot(abs(traj.a_w[i] - ref_w), abs(traj.s_a[i] - ref_m))
                assert err / math.sqrt(signal) <= 1e-3

    def test_damped_oscillation_matches_matrix_exponential(self):
        # oracle: exact solution of the damped two-mode system
        gamma = 2.0
        pump = 100.0
        omega = 2.0 * pump
        deco = DecoherenceModel(gamma=gamma)
        traj = integrate_three_wave(
            TriWaveState(0.0, -pump, 1.0), UNIT_ETA, deco, duration=24 * math.pi / omega,
            dt=0.01 / omega, sample_every=5,
        )
        generator = np.array([[0.0, omega / 2.0], [-omega / 2.0, -gamma / 2.0]])
        for i, t in enumerate(traj.times):
            ref = expm(generator * t) @ np.array([0.0, 1.0])
            assert abs(traj.a_w[i]) ** 2 == pytest.approx(ref[0] ** 2, abs=0.05)

    def test_damped_envelope_is_half_gamma_on_intensity(self):
        # with the -(gamma/2) s_a damping term the two-mode eigenvalues have
        # real part -gamma/4, so the intensity envelope decays at gamma/2
        gamma = 2.0
        pump = 100.0
        omega = 2.0 * pump
        deco = DecoherenceModel(gamma=gamma)
        peaks = []
        for k in range(4):
            t_peak = (2 * k + 1) * math.pi / omega
            traj = integrate_three_wave(
                TriWaveState(0.0, -pump, 1.0), UNIT_ETA, deco, duration=t_peak, dt=0.005 / omega,
                sample_every=10**9,
            )
            peaks.append((t_peak, abs(traj.a_w[-1]) ** 2))
        for t, value in peaks:
            assert value == pytest.approx(math.exp(-gamma * t / 2.0), rel=0.05)


class TestBackends:
    def test_pure_python_matches_selected_backend_bitwise(self):
        compiled = pytest.importorskip("atomlight._kernels")
        args = (0.6 + 0.1j, -10.0 + 0j, 0.8 - 0.2j, 1.0, 0.3, 1e-4, 5000, 7)
        for fast, slow in zip(compiled.rk4_three_wave(*args), _kernels_py.rk4_three_wave(*args)):
            assert np.array_equal(fast, slow)

    def test_env_var_forces_pure_python(self, monkeypatch):
        import importlib

        import atomlight.kernels as kernels_module

        monkeypatch.setenv("ATOMLIGHT_PURE_PYTHON", "1")
        reloaded = importlib.reload(kernels_module)
        try:
            assert reloaded.BACKEND == "pure-python"
        finally:
            monkeypatch.delenv("ATOMLIGHT_PURE_PYTHON")
            importlib.reload(kernels_module)
