# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled three-wave RK4 kernel.

Keep every expression tree identical to atomlight._kernels_py so both
backends produce bit-identical trajectories.
"""

import numpy as np


def rk4_three_wave(double complex w0, double complex p0, double complex m0,
                   double eta, double gamma, double dt,
                   Py_ssize_t n_steps, Py_ssize_t sample_every):
    """Fixed-step classical RK4 for the coupled-mode equations.

    See atomlight._kernels_py.rk4_three_wave for the reference semantics.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")

    cdef Py_ssize_t n_out = n_steps // sample_every + 1
    if n_steps % sample_every:
        n_out += 1
    out_w_arr = np.empty(n_out, dtype=np.complex128)
    out_p_arr = np.empty(n_out, dtype=np.complex128)
    out_m_arr = np.empty(n_out, dtype=np.complex128)
    cdef double complex[::1] out_w = out_w_arr
    cdef double complex[::1] out_p = out_p_arr
    cdef double complex[::1] out_m = out_m_arr

    cdef double complex w = w0
    cdef double complex p = p0
    cdef double complex m = m0
    cdef double half_gamma = 0.5 * gamma
    cdef double half_dt = 0.5 * dt
    cdef double sixth_dt = dt / 6.0

    cdef double complex kw1, kp1, km1, kw2, kp2, km2
    cdef double complex kw3, kp3, km3, kw4, kp4, km4
    cdef double complex w1, p1, m1, w2, p2, m2, w3, p3, m3
    cdef Py_ssize_t step, idx

    out_w[0] = w
    out_p[0] = p
    out_m[0] = m
    idx = 1
    for step in range(1, n_steps + 1):
        kw1 = -eta * p * m
        kp1 = eta * w * m.conjugate()
        km1 = eta * w * p.conjugate() - half_gamma * m

        w1 = w + half_dt * kw1
        p1 = p + half_dt * kp1
        m1 = m + half_dt * km1
        kw2 = -eta * p1 * m1
        kp2 = eta * w1 * m1.conjugate()
        km2 = eta * w1 * p1.conjugate() - half_gamma * m1

        w2 = w + half_dt * kw2
        p2 = p + half_dt * kp2
        m2 = m + half_dt * km2
        kw3 = -eta * p2 * m2
        kp3 = eta * w2 * m2.conjugate()
        km3 = eta * w2 * p2.conjugate() - half_gamma * m2

        w3 = w + dt * kw3
        p3 = p + dt * kp3
        m3 = m + dt * km3
        kw4 = -eta * p3 * m3
        kp4 = eta * w3 * m3.conjugate()
        km4 = eta * w3 * p3.conjugate() - half_gamma * m3

        w = w + sixth_dt * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4)
        p = p + sixth_dt * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4)
        m = m + sixth_dt * (km1 + 2.0 * km2 + 2.0 * km3 + km4)

        if step % sample_every == 0 or step == n_steps:
            out_w[idx] = w
            out_p[idx] = p
            out_m[idx] = m
            idx += 1

    return out_w_arr, out_p_arr, out_m_arr
