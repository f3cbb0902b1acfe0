"""Generalized (complex-width) Gaussian wave packets.

A packet is the function

    psi(x) = exp(L) * exp(i p (x - c)) * exp(-gamma (x - c)**2 / 2)

with real center ``c``, real mean momentum ``p``, complex width ``gamma``
(``Re gamma > 0``) and complex log-prefactor ``L``.  Units have hbar = 1.

The product ``conj(a) * b`` of two packets is again a Gaussian, so overlaps,
polynomial moments and kinetic matrix elements all have closed forms.  The
derivation is written out in ``docs/derivations.md``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

__all__ = [
    "GeneralizedGaussian",
    "evaluate",
    "shift",
    "boost",
    "normalize",
    "norm_squared",
    "overlap",
    "moment",
    "kinetic_element",
    "packet_arrays",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GeneralizedGaussian:
    """Immutable generalized Gaussian packet.

    Attributes
    ----------
    center : float
        Packet center.
    momentum : float
        Mean momentum.
    width : complex
        Complex width; the envelope is ``exp(-width (x - center)**2 / 2)``.
    log_prefactor : complex
        Logarithm of the prefactor.  The real part fixes the norm, the
        imaginary part the global phase.
    """

    center: float
    momentum: float
    width: complex
    log_prefactor: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "momentum", float(self.momentum))
        object.__setattr__(self, "width", complex(self.width))
        object.__setattr__(self, "log_prefactor", complex(self.log_prefactor))
        if not (math.isfinite(self.center) and math.isfinite(self.momentum)):
            raise DomainError("packet center and momentum must be finite")
        if not cmath.isfinite(self.width) or not cmath.isfinite(self.log_prefactor):
            raise DomainError("packet width and prefactor must be finite")
        if self.width.real <= 0.0:
            raise DomainError(f"Re(width) must be positive, got {self.width!r}")

    @classmethod
    def normalized(cls, width, center=0.0, momentum=0.0, phase=0.0):
        """Unit-norm packet with the given global phase."""
        w = complex(width)
        if not w.real > 0.0:
            raise DomainError(f"Re(width) must be positive, got {w!r}")
        return cls(center, momentum, w, complex(_normalized_log_modulus(w.real), phase))

    @property
    def phase(self):
        return self.log_prefactor.imag

    def __call__(self, x):
        return evaluate(self, x)


def _normalized_log_modulus(width_re):
    # |C|^2 sqrt(pi / Re gamma) = 1
    return 0.25 * math.log(width_re / math.pi)


def evaluate(g: GeneralizedGaussian, x):
    """Wavefunction value(s) at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("evaluation point must be finite")
    u = xa - g.center
    val = np.exp(g.log_prefactor + 1j * g.momentum * u - 0.5 * g.width * u * u)
    if np.ndim(val) == 0:
        return complex(val)
    return val


def shift(g: GeneralizedGaussian, dx: float) -> GeneralizedGaussian:
    """Translate the packet by ``dx``: ``psi(x) -> psi(x - dx)``."""
    if dx == 0:
        return g
    return replace(g, center=g.center + dx)


def boost(g: GeneralizedGaussian, dp: float) -> GeneralizedGaussian:
    """Multiply the packet by ``exp(i dp x)``.

    The factor splits as ``exp(i dp c) exp(i dp (x - c))``; the constant part
    goes into the phase so the result is exactly the boosted wavefunction.
    """
    if dp == 0:
        return g
    return replace(g, momentum=g.momentum + dp,
                   log_prefactor=g.log_prefactor + 1j * dp * g.center)


def norm_squared(g: GeneralizedGaussian) -> float:
    """``<g|g>``."""
    return math.exp(2.0 * g.log_prefactor.real) * math.sqrt(math.pi / g.width.real)


def normalize(g: GeneralizedGaussian) -> GeneralizedGaussian:
    """Reset the modulus of the prefactor so that ``<g|g> = 1``; keeps the phase."""
    lp = complex(_normalized_log_modulus(g.width.real), g.log_prefactor.imag)
    if lp == g.log_prefactor:
        return g
    return replace(g, log_prefactor=lp)


def _pair(a: GeneralizedGaussian, b: GeneralizedGaussian):
    """Log-overlap, precision ``A`` and offset of the product mean from ``b.center``.

    ``conj(a) b`` is proportional to a Gaussian in ``x`` with precision
    ``A = conj(gamma_a) + gamma_b`` and mean ``b.center + mu_y``.
    """
    ga = a.width.conjugate()
    gb = b.width
    A = ga + gb
    if A.real <= 0.0:
        raise DomainError("sum of widths must have positive real part")
    d = a.center - b.center
    dp = b.momentum - a.momentum
    log_s = (-(ga * gb * d * d - 2j * ga * d * dp + dp * dp) / (2.0 * A)
             + 1j * a.momentum * d
             + a.log_prefactor.conjugate() + b.log_prefactor
             + 0.5 * (_LOG_2PI - cmath.log(A)))
    mu_y = (ga * d + 1j * dp) / A
    return log_s, A, mu_y


def overlap(a: GeneralizedGaussian, b: GeneralizedGaussian) -> complex:
    """``<a|b> = integral of conj(a(x)) b(x) dx``."""
    log_s, _, _ = _pair(a, b)
    return cmath.exp(log_s)


def _raw_moments(mu, inv_a, kmax):
    # moments of a (complex) normal with mean mu and variance inv_a
    out = [1.0 + 0j, mu]
    for k in range(2, kmax + 1):
        out.append(mu * out[k - 1] + (k - 1) * inv_a * out[k - 2])
    return out[: kmax + 1]


def moment(a: GeneralizedGaussian, b: GeneralizedGaussian, k: int) -> complex:
    """``<a| x**k |b>`` for ``k`` in 0..4."""
    if k not in (0, 1, 2, 3, 4) or isinstance(k, bool):
        raise ValueError(f"moment order must be an integer in 0..4, got {k!r}")
    log_s, A, mu_y = _pair(a, b)
    return cmath.exp(log_s) * _raw_moments(b.center + mu_y, 1.0 / A, k)[k]


def kinetic_element(a: GeneralizedGaussian, b: GeneralizedGaussian, m: float) -> complex:
    """``<a| p**2 / (2 m) |b>``.

    Uses ``b'' = b * ((i p_b - gamma_b u)**2 - gamma_b)`` with ``u = x - c_b``,
    then averages the quadratic in ``u`` over the product Gaussian.
    """
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m!r}")
    log_s, A, mu_y = _pair(a, b)
    gb = b.width
    q = 1j * b.momentum - gb * mu_y
    return -cmath.exp(log_s) * (q * q + gb * gb / A - gb) / (2.0 * m)


def packet_arrays(packets):
    """Split a packet list into the four parallel arrays used by the kernels."""
    center = np.array([g.center for g in packets], dtype=np.float64)
    momentum = np.array([g.momentum for g in packets], dtype=np.float64)
    width = np.array([g.width for g in packets], dtype=np.complex128)
    logc = np.array([g.log_prefactor for g in packets], dtype=np.complex128)
    return center, momentum, width, logc
