"""Pure-numpy implementations of the hot kernels.

These are the reference semantics for the compiled extension: every
expression here is written in the exact evaluation order used by
``_fast.pyx`` so that both backends produce bit-identical outputs for the
same inputs (the extension is compiled with -ffp-contract=off for the same
reason). Keep the two files in sync.

Outcome index conventions:

* Bell outcomes: 0 = psi_minus, 1 = psi_plus, 2 = phi_minus, 3 = phi_plus
  (core.BELL_LABELS order); the estimate is "identical" iff the outcome is
  a triplet (index != 0).
* Local outcome pairs: 0 = (+,+), 1 = (+,-), 2 = (-,+), 3 = (-,-), where +
  means "along the declared axis" and the first slot is Alice.

Noise models for joint trials: model 0 = ideal, 1 = statistics-level
depolarizing with weight ``noise``, 2 = partial distinguishability with
overlap ``noise`` (ideal statistics mixed with the interference-free
rail-transmission statistics of the standard 6-mode coincidence gate).
"""

from __future__ import annotations

import numpy as np


def joint_trials(a0, a1, b0, b1, j, u, noise, model, out_outcome, out_correct):
    """Simulate Bell-analyzer outcomes for a batch of product states.

    a0, a1, b0, b1: complex128 arrays (n,), the H/V amplitudes of Alice's
    and Bob's single-photon states. j: uint8 correlation flags. u: float64
    uniforms in [0, 1) used for outcome sampling. Results are written into
    out_outcome / out_correct (uint8).
    """
    a0r, a0i = a0.real, a0.imag
    a1r, a1i = a1.real, a1.imag
    b0r, b0i = b0.real, b0.imag
    b1r, b1i = b1.real, b1.imag

    # product amplitudes c_xy = a_x * b_y in basis order (HH, HV, VH, VV)
    c0r = a0r * b0r - a0i * b0i
    c0i = a0r * b0i + a0i * b0r
    c1r = a0r * b1r - a0i * b1i
    c1i = a0r * b1i + a0i * b1r
    c2r = a1r * b0r - a1i * b0i
    c2i = a1r * b0i + a1i * b0r
    c3r = a1r * b1r - a1i * b1i
    c3i = a1r * b1i + a1i * b1r

    # Born probabilities of the four Bell outcomes
    dr = c1r - c2r
    di = c1i - c2i
    p0 = 0.5 * (dr * dr + di * di)
    sr = c1r + c2r
    si = c1i + c2i
    p1 = 0.5 * (sr * sr + si * si)
    er = c0r - c3r
    ei = c0i - c3i
    p2 = 0.5 * (er * er + ei * ei)
    fr = c0r + c3r
    fi = c0i + c3i
    p3 = 0.5 * (fr * fr + fi * fi)

    if model == 1:
        base = 0.25 * (1.0 - noise)
        q0 = noise * p0 + base
        q1 = noise * p1 + base
        q2 = noise * p2 + base
        q3 = noise * p3 + base
    elif model == 2:
        w = 1.0 - noise
        pv = a1r * a1r + a1i * a1i
        q1v = b1r * b1r + b1i * b1i
        sfrac = (q1v + pv) / (1.0 + 2.0 * pv)
        half_s = 0.5 * sfrac
        half_c = 0.5 * (1.0 - sfrac)
        q0 = noise * p0 + w * half_s
        q1 = noise * p1 + w * half_s
        q2 = noise * p2 + w * half_c
        q3 = noise * p3 + w * half_c
    else:
        q0, q1, q2, q3 = p0, p1, p2, p3

    s0 = q0
    s1 = s0 + q1
    s2 = s1 + q2
    o = (u >= s0).astype(np.uint8)
    o += u >= s1
    o += u >= s2
    out_outcome[:] = o
    out_correct[:] = ((o != 0).astype(np.uint8) == j).astype(np.uint8)


def local_trials(a0, a1, b0, b1, j, u, ua, ub, rule, out_outcome, out_correct):
    """Simulate a fixed product projective measurement on a batch.

    ua / ub are the axis states (2,) complex for Alice / Bob; ``rule`` maps
    the four outcome pairs to estimates (uint8 (4,), order as above).
    """
    a0r, a0i = a0.real, a0.imag
    a1r, a1i = a1.real, a1.imag
    b0r, b0i = b0.real, b0.imag
    b1r, b1i = b1.real, b1.imag
    ua0r, ua0i = float(ua[0].real), float(ua[0].imag)
    ua1r, ua1i = float(ua[1].real), float(ua[1].imag)
    ub0r, ub0i = float(ub[0].real), float(ub[0].imag)
    ub1r, ub1i = float(ub[1].real), float(ub[1].imag)

    xr = ua0r * a0r + ua0i * a0i + ua1r * a1r + ua1i * a1i
    xi = ua0r * a0i - ua0i * a0r + ua1r * a1i - ua1i * a1r
    pa = xr * xr + xi * xi
    yr = ub0r * b0r + ub0i * b0i + ub1r * b1r + ub1i * b1i
    yi = ub0r * b0i - ub0i * b0r + ub1r * b1i - ub1i * b1r
    pb = yr * yr + yi * yi

    q0 = pa * pb
    q1 = pa * (1.0 - pb)
    q2 = (1.0 - pa) * pb

    s0 = q0
    s1 = s0 + q1
    s2 = s1 + q2
    o = (u >= s0).astype(np.uint8)
    o += u >= s1
    o += u >= s2
    est = rule[o]
    out_outcome[:] = o
    out_correct[:] = (est == j).astype(np.uint8)


def grid_best(alpha0, beta0, gamma0, alpha1, beta1, gamma1, out_payoff, out_rule):
    """Best decision-rule payoff per grid cell of product measurement axes.

    alpha_j[ia] = axis_a . bloch(rho_j, Alice side), beta_j[ib] likewise for
    Bob, gamma_j[ia, ib] = axis_a . T(rho_j) . axis_b. Writes, per cell, the
    payoff of the best of the 16 deterministic decision rules and that
    rule's id (bit o of the id = estimate for outcome o; ties keep bit 0).
    """
    a0 = alpha0[:, None]
    b0 = beta0[None, :]
    a1 = alpha1[:, None]
    b1 = beta1[None, :]

    p0pp = 0.25 * (1.0 + a0 + b0 + gamma0)
    p0pm = 0.25 * (1.0 + a0 - b0 - gamma0)
    p0mp = 0.25 * (1.0 - a0 + b0 - gamma0)
    p0mm = 0.25 * (1.0 - a0 - b0 + gamma0)
    p1pp = 0.25 * (1.0 + a1 + b1 + gamma1)
    p1pm = 0.25 * (1.0 + a1 - b1 - gamma1)
    p1mp = 0.25 * (1.0 - a1 + b1 - gamma1)
    p1mm = 0.25 * (1.0 - a1 - b1 + gamma1)

    m0 = np.maximum(p0pp, p1pp)
    m1 = np.maximum(p0pm, p1pm)
    m2 = np.maximum(p0mp, p1mp)
    m3 = np.maximum(p0mm, p1mm)
    out_payoff[:, :] = 0.5 * (((m0 + m1) + m2) + m3)

    rule = (p1pp > p0pp).astype(np.uint8)
    rule += 2 * (p1pm > p0pm).astype(np.uint8)
    rule += 4 * (p1mp > p0mp).astype(np.uint8)
    rule += 8 * (p1mm > p0mm).astype(np.uint8)
    out_rule[:, :] = rule


def binary_trials(p0, j, u, out_outcome, out_correct):
    """Sample a two-outcome measurement given per-trial probability of outcome 0."""
    o = (u >= p0).astype(np.uint8)
    out_outcome[:] = o
    out_correct[:] = (o == j).astype(np.uint8)
