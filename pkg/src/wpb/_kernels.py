"""Array kernels for packet pairs and packet sums.

Every kernel has a numba loop version (``*_jit``) and a broadcast numpy
version (``*_numpy``).  The public names pick one according to
:data:`wpb._accel.USE_NUMBA`.  Both must agree to round-off; the test-suite
checks this.

Packets enter as four parallel arrays ``center``, ``momentum`` (float64),
``width``, ``logc`` (complex128).  See ``docs/derivations.md`` for the pair
integral.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

_LOG_2PI = float(np.log(2.0 * np.pi))


@njit(cache=True)
def pair_matrices_jit(center, momentum, width, logc, mass):
    n = center.shape[0]
    S = np.empty((n, n), dtype=np.complex128)
    M = np.empty((5, n, n), dtype=np.complex128)
    T = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        ga = np.conj(width[i])
        la = np.conj(logc[i])
        for j in range(n):
            gb = width[j]
            A = ga + gb
            inv = 1.0 / A
            d = center[i] - center[j]
            dp = momentum[j] - momentum[i]
            expo = (-(ga * gb * d * d - 2j * ga * d * dp + dp * dp) * 0.5 * inv
                    + 1j * momentum[i] * d + la + logc[j]
                    + 0.5 * (_LOG_2PI - np.log(A)))
            s = np.exp(expo)
            muy = (ga * d + 1j * dp) * inv
            mu = center[j] + muy
            m1 = mu
            m2 = mu * m1 + inv
            m3 = mu * m2 + 2.0 * inv * m1
            m4 = mu * m3 + 3.0 * inv * m2
            S[i, j] = s
            M[0, i, j] = s
            M[1, i, j] = s * m1
            M[2, i, j] = s * m2
            M[3, i, j] = s * m3
            M[4, i, j] = s * m4
            q = 1j * momentum[j] - gb * muy
            T[i, j] = -s * (q * q + gb * gb * inv - gb) / (2.0 * mass)
    return S, M, T


def pair_matrices_numpy(center, momentum, width, logc, mass):
    ga = np.conj(width)[:, None]
    gb = width[None, :]
    A = ga + gb
    inv = 1.0 / A
    d = center[:, None] - center[None, :]
    dp = momentum[None, :] - momentum[:, None]
    expo = (-(ga * gb * d * d - 2j * ga * d * dp + dp * dp) * 0.5 * inv
            + 1j * momentum[:, None] * d
            + np.conj(logc)[:, None] + logc[None, :]
            + 0.5 * (_LOG_2PI - np.log(A)))
    s = np.exp(expo)
    muy = (ga * d + 1j * dp) * inv
    mu = center[None, :] + muy
    m1 = mu
    m2 = mu * m1 + inv
    m3 = mu * m2 + 2.0 * inv * m1
    m4 = mu * m3 + 3.0 * inv * m2
    M = np.stack([s, s * m1, s * m2, s * m3, s * m4])
    q = 1j * momentum[None, :] - gb * muy
    T = -s * (q * q + gb * gb * inv - gb) / (2.0 * mass)
    return s, M, T


@njit(cache=True)
def packet_sum_jit(center, momentum, width, logc, coeffs, xs):
    out = np.zeros(xs.shape[0], dtype=np.complex128)
    for n in range(center.shape[0]):
        cn = coeffs[n]
        if cn == 0:
            continue
        for k in range(xs.shape[0]):
            u = xs[k] - center[n]
            out[k] += cn * np.exp(logc[n] + 1j * momentum[n] * u - 0.5 * width[n] * u * u)
    return out


def packet_sum_numpy(center, momentum, width, logc, coeffs, xs):
    u = xs[None, :] - center[:, None]
    vals = np.exp(logc[:, None] + 1j * momentum[:, None] * u - 0.5 * width[:, None] * u * u)
    return coeffs @ vals


if USE_NUMBA:
    pair_matrices = pair_matrices_jit
    packet_sum = packet_sum_jit
else:
    pair_matrices = pair_matrices_numpy
    packet_sum = packet_sum_numpy
