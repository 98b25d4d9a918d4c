"""Pure-Python fallback for the compiled kernels (same arithmetic order)."""

from __future__ import annotations

import math

import numpy as np


def _field(pe, pc, qe, qc, deg, x, y):
    xp = [1.0] * (deg + 1)
    yp = [1.0] * (deg + 1)
    for k in range(1, deg + 1):
        xp[k] = xp[k - 1] * x
        yp[k] = yp[k - 1] * y
    fx = 0.0
    for (i, j), c in zip(pe, pc):
        fx = fx + c * xp[i] * yp[j]
    fy = 0.0
    for (i, j), c in zip(qe, qc):
        fy = fy + c * xp[i] * yp[j]
    return fx, fy


def rk4_poly(pe, pc, qe, qc, deg, x0, y0, h, n_steps, blowup, window):
    pe = [tuple(int(v) for v in row) for row in pe]
    qe = [tuple(int(v) for v in row) for row in qe]
    pc = [float(c) for c in pc]
    qc = [float(c) for c in qc]
    x, y = float(x0), float(y0)
    h = float(h)
    hh = 0.5 * h
    h6 = h / 6.0
    states = [(x, y)]
    status = 0
    for _ in range(int(n_steps)):
        k1x, k1y = _field(pe, pc, qe, qc, deg, x, y)
        k2x, k2y = _field(pe, pc, qe, qc, deg, x + hh * k1x, y + hh * k1y)
        k3x, k3y = _field(pe, pc, qe, qc, deg, x + hh * k2x, y + hh * k2y)
        k4x, k4y = _field(pe, pc, qe, qc, deg, x + h * k3x, y + h * k3y)
        xn = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        yn = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if not (math.isfinite(xn) and math.isfinite(yn)):
            status = 1
            break
        x, y = xn, yn
        states.append((x, y))
        if abs(x) > blowup or abs(y) > blowup or x * x + y * y > blowup * blowup:
            status = 1
            break
        if window is not None:
            wx0, wx1, wy0, wy1 = window
            if x < wx0 or x > wx1 or y < wy0 or y > wy1:
                status = 2
                break
    return np.array(states, dtype=np.float64).reshape(-1, 2), status
