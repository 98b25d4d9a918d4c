# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 stepping for planar polynomial fields.

Arithmetic order matches ``_pykernels`` operation for operation so both
backends give bit-identical trajectories.
"""

import numpy as np

from libc.math cimport isfinite, fabs

DEF MAXDEG = 32


cdef inline void _field(
    const long[:, ::1] pe, const double[::1] pc,
    const long[:, ::1] qe, const double[::1] qc,
    int deg, double x, double y, double* fx, double* fy,
) noexcept nogil:
    cdef double xp[MAXDEG + 1]
    cdef double yp[MAXDEG + 1]
    cdef int k
    cdef Py_ssize_t t
    cdef double acc
    xp[0] = 1.0
    yp[0] = 1.0
    for k in range(1, deg + 1):
        xp[k] = xp[k - 1] * x
        yp[k] = yp[k - 1] * y
    acc = 0.0
    for t in range(pc.shape[0]):
        acc = acc + pc[t] * xp[pe[t, 0]] * yp[pe[t, 1]]
    fx[0] = acc
    acc = 0.0
    for t in range(qc.shape[0]):
        acc = acc + qc[t] * xp[qe[t, 0]] * yp[qe[t, 1]]
    fy[0] = acc


def rk4_poly(
    const long[:, ::1] pe, const double[::1] pc,
    const long[:, ::1] qe, const double[::1] qc,
    int deg, double x0, double y0, double h, long n_steps,
    double blowup, window,
):
    """Fixed-step RK4; returns ``(states[m, 2], status)``.

    status: 0 ran to completion, 1 blow-up (norm above ``blowup`` or
    non-finite), 2 left ``window = (xmin, xmax, ymin, ymax)``.
    """
    if deg > MAXDEG:
        raise ValueError("field degree exceeds compiled kernel limit")
    out = np.empty((n_steps + 1, 2), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef bint use_window = window is not None
    cdef double wx0 = 0.0, wx1 = 0.0, wy0 = 0.0, wy1 = 0.0
    if use_window:
        wx0, wx1, wy0, wy1 = window
    cdef double x = x0, y = y0
    cdef double hh = 0.5 * h
    cdef double h6 = h / 6.0
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, xn, yn
    cdef long i, m = 1
    cdef int status = 0
    o[0, 0] = x
    o[0, 1] = y
    with nogil:
        for i in range(n_steps):
            _field(pe, pc, qe, qc, deg, x, y, &k1x, &k1y)
            _field(pe, pc, qe, qc, deg, x + hh * k1x, y + hh * k1y, &k2x, &k2y)
            _field(pe, pc, qe, qc, deg, x + hh * k2x, y + hh * k2y, &k3x, &k3y)
            _field(pe, pc, qe, qc, deg, x + h * k3x, y + h * k3y, &k4x, &k4y)
            xn = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            yn = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            if not (isfinite(xn) and isfinite(yn)):
                status = 1
                break
            x = xn
            y = yn
            o[m, 0] = x
            o[m, 1] = y
            m += 1
            if fabs(x) > blowup or fabs(y) > blowup or x * x + y * y > blowup * blowup:
                status = 1
                break
            if use_window and (x < wx0 or x > wx1 or y < wy0 or y > wy1):
                status = 2
                break
    return out[:m], status
