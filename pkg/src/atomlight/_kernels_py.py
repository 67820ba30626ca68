"""Pure-Python fallback for the three-wave RK4 kernel.

Mirrors atomlight._kernels operation for operation.  The expression trees
must stay identical to the Cython source so that both backends produce
bit-identical trajectories (the compiled module is built with
-ffp-contract=off for the same reason).
"""

import numpy as np


def rk4_three_wave(w0, p0, m0, eta, gamma, dt, n_steps, sample_every):
    """Integrate the coupled-mode equations with fixed-step classical RK4.

    State is (write field w, drive field p, spin wave m):
        w' = -eta * p * m
        p' =  eta * w * conj(m)
        m' =  eta * w * conj(p) - (gamma/2) * m

    Returns three complex128 arrays (w, p, m) sampled every
    ``sample_every`` steps, always including the initial and final state.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")

    n_out = n_steps // sample_every + 1
    if n_steps % sample_every:
        n_out += 1
    out_w = np.empty(n_out, dtype=np.complex128)
    out_p = np.empty(n_out, dtype=np.complex128)
    out_m = np.empty(n_out, dtype=np.complex128)

    w = complex(w0)
    p = complex(p0)
    m = complex(m0)
    half_gamma = 0.5 * gamma
    half_dt = 0.5 * dt
    sixth_dt = dt / 6.0

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

    return out_w, out_p, out_m
