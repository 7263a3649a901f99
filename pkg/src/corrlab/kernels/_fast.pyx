# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``fallback.py``.

Every arithmetic expression matches the fallback's evaluation order so the
two backends agree bit for bit (the build uses -ffp-contract=off to keep
gcc from fusing multiply-adds). Change one file, change both.
"""


def joint_trials(const double complex[::1] a0, const double complex[::1] a1,
                 const double complex[::1] b0, const double complex[::1] b1,
                 const unsigned char[::1] j, const double[::1] u,
                 double noise, int model,
                 unsigned char[::1] out_outcome, unsigned char[::1] out_correct):
    cdef Py_ssize_t n = a0.shape[0]
    cdef Py_ssize_t i
    cdef double a0r, a0i, a1r, a1i, b0r, b0i, b1r, b1i
    cdef double c0r, c0i, c1r, c1i, c2r, c2i, c3r, c3i
    cdef double dr, di, sr, si, er, ei, fr, fi
    cdef double p0, p1, p2, p3, q0, q1, q2, q3
    cdef double base, w, pv, q1v, sfrac, half_s, half_c
    cdef double s0, s1, s2
    cdef int o, est
    with nogil:
        for i in range(n):
            a0r = a0[i].real; a0i = a0[i].imag
            a1r = a1[i].real; a1i = a1[i].imag
            b0r = b0[i].real; b0i = b0[i].imag
            b1r = b1[i].real; b1i = b1[i].imag

            c0r = a0r * b0r - a0i * b0i
            c0i = a0r * b0i + a0i * b0r
            c1r = a0r * b1r - a0i * b1i
            c1i = a0r * b1i + a0i * b1r
            c2r = a1r * b0r - a1i * b0i
            c2i = a1r * b0i + a1i * b0r
            c3r = a1r * b1r - a1i * b1i
            c3i = a1r * b1i + a1i * b1r

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
                q0 = p0
                q1 = p1
                q2 = p2
                q3 = p3

            s0 = q0
            s1 = s0 + q1
            s2 = s1 + q2
            o = 0
            if u[i] >= s0:
                o += 1
            if u[i] >= s1:
                o += 1
            if u[i] >= s2:
                o += 1
            est = 1 if o != 0 else 0
            out_outcome[i] = <unsigned char> o
            out_correct[i] = 1 if est == j[i] else 0


def local_trials(const double complex[::1] a0, const double complex[::1] a1,
                 const double complex[::1] b0, const double complex[::1] b1,
                 const unsigned char[::1] j, const double[::1] u,
                 ua, ub, const unsigned char[::1] rule,
                 unsigned char[::1] out_outcome, unsigned char[::1] out_correct):
    cdef Py_ssize_t n = a0.shape[0]
    cdef Py_ssize_t i
    cdef double ua0r = ua[0].real, ua0i = ua[0].imag
    cdef double ua1r = ua[1].real, ua1i = ua[1].imag
    cdef double ub0r = ub[0].real, ub0i = ub[0].imag
    cdef double ub1r = ub[1].real, ub1i = ub[1].imag
    cdef double a0r, a0i, a1r, a1i, b0r, b0i, b1r, b1i
    cdef double xr, xi, yr, yi, pa, pb
    cdef double q0, q1, q2, s0, s1, s2
    cdef int o
    with nogil:
        for i in range(n):
            a0r = a0[i].real; a0i = a0[i].imag
            a1r = a1[i].real; a1i = a1[i].imag
            b0r = b0[i].real; b0i = b0[i].imag
            b1r = b1[i].real; b1i = b1[i].imag

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
            o = 0
            if u[i] >= s0:
                o += 1
            if u[i] >= s1:
                o += 1
            if u[i] >= s2:
                o += 1
            out_outcome[i] = <unsigned char> o
            out_correct[i] = 1 if rule[o] == j[i] else 0


def grid_best(const double[::1] alpha0, const double[::1] beta0, const double[:, ::1] gamma0,
              const double[::1] alpha1, const double[::1] beta1, const double[:, ::1] gamma1,
              double[:, ::1] out_payoff, unsigned char[:, ::1] out_rule):
    cdef Py_ssize_t na = alpha0.shape[0]
    cdef Py_ssize_t nb = beta0.shape[0]
    cdef Py_ssize_t ia, ib
    cdef double a0, b0v, g0, a1, b1v, g1
    cdef double p0pp, p0pm, p0mp, p0mm, p1pp, p1pm, p1mp, p1mm
    cdef double m0, m1, m2, m3
    cdef int rule
    with nogil:
        for ia in range(na):
            a0 = alpha0[ia]
            a1 = alpha1[ia]
            for ib in range(nb):
                b0v = beta0[ib]
                b1v = beta1[ib]
                g0 = gamma0[ia, ib]
                g1 = gamma1[ia, ib]

                p0pp = 0.25 * (1.0 + a0 + b0v + g0)
                p0pm = 0.25 * (1.0 + a0 - b0v - g0)
                p0mp = 0.25 * (1.0 - a0 + b0v - g0)
                p0mm = 0.25 * (1.0 - a0 - b0v + g0)
                p1pp = 0.25 * (1.0 + a1 + b1v + g1)
                p1pm = 0.25 * (1.0 + a1 - b1v - g1)
                p1mp = 0.25 * (1.0 - a1 + b1v - g1)
                p1mm = 0.25 * (1.0 - a1 - b1v + g1)

                m0 = p1pp if p0pp < p1pp else p0pp
                m1 = p1pm if p0pm < p1pm else p0pm
                m2 = p1mp if p0mp < p1mp else p0mp
                m3 = p1mm if p0mm < p1mm else p0mm
                out_payoff[ia, ib] = 0.5 * (((m0 + m1) + m2) + m3)

                rule = 0
                if p1pp > p0pp:
                    rule += 1
                if p1pm > p0pm:
                    rule += 2
                if p1mp > p0mp:
                    rule += 4
                if p1mm > p0mm:
                    rule += 8
                out_rule[ia, ib] = <unsigned char> rule


def binary_trials(const double[::1] p0, const unsigned char[::1] j, const double[::1] u,
                  unsigned char[::1] out_outcome, unsigned char[::1] out_correct):
    cdef Py_ssize_t n = p0.shape[0]
    cdef Py_ssize_t i
    cdef int o
    with nogil:
        for i in range(n):
            o = 1 if u[i] >= p0[i] else 0
            out_outcome[i] = <unsigned char> o
            out_correct[i] = 1 if o == j[i] else 0
