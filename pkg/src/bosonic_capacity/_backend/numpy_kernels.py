"""Vectorised numpy implementations of the per-mode sums."""

import numpy as np

LN2 = np.log(2.0)
SMALL_X = 1e-8
EXP_CUTOFF = 700.0


def g_values(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    big = x >= SMALL_X
    small = (x > 0.0) & ~big
    xb = x[big]
    out[big] = (np.log1p(xb) + xb * np.log1p(1.0 / xb)) / LN2
    xs = x[small]
    out[small] = (xs * (1.0 - np.log(xs)) + 0.5 * xs * xs) / LN2
    return out


def g_sum(x):
    return float(np.sum(g_values(x)))


def shannon_sum(x, xi):
    x = np.asarray(x, dtype=float)
    return float(np.sum(xi * np.log1p(x / (xi * xi)))) / LN2


def holevo_occupation(omega, eta, beta):
    z = beta * omega / eta
    out = np.zeros_like(z)
    live = z <= EXP_CUTOFF
    out[live] = (1.0 / eta[live]) / np.expm1(z[live])
    return out


def holevo_energy(omega, eta, beta):
    return float(np.sum(omega * holevo_occupation(omega, eta, beta)))


def waterfill_occupation(omega, eta, beta, xi2):
    return np.maximum(1.0 / (beta * omega) - xi2 / eta, 0.0)


def waterfill_energy(omega, eta, beta, xi2):
    return float(np.sum(omega * waterfill_occupation(omega, eta, beta, xi2)))
