"""Closed-form evolution of generalized Gaussians under quadratic Hamiltonians.

Everything here is one routine, :func:`quadratic_evolve`, which propagates a
packet exactly under

    H = p**2/(2m) + E0 - F (x - x0) + (k/2) (x - x0)**2

for any real stiffness ``k`` (positive, zero or negative).  For such an ``H``
a Gaussian stays Gaussian:

* center and momentum follow the classical flow;
* ``gamma(t) = -i m w'(t) / w(t)`` where ``w'' = -(k/m) w``,
  ``w(0) = 1`` and ``w'(0) = i gamma0 / m``;
* ``log C(t) = log C0 + i S(t) - log(w(t)) / 2`` with ``S`` the classical
  action ``int (p**2/2m - V(x_cl)) dt``.

``w`` is evaluated through entire functions of ``(omega t)**2``, so the free
limit and over-barrier (imaginary omega) steps need no special casing.  The
branch of ``log w`` is tracked continuously in time.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .packets import GeneralizedGaussian, normalize
from .potentials import EffectiveQuadraticParams

__all__ = [
    "ClassicalPoint",
    "quadratic_evolve",
    "free_evolve",
    "harmonic_evolve",
    "coherent_trajectory",
    "driven_harmonic_step",
    "product_form_prefactor",
]

_SERIES_RADIUS = 1.0
_SERIES_TERMS = 24


def _entire(z: complex):
    """``(cos q, sin q / q, (1 - cos q)/q**2, (q - sin q)/q**3)`` with ``q**2 = z``."""
    if abs(z) < _SERIES_RADIUS:
        c = s = g = h = 0j
        term = 1.0 + 0j  # (-z)^n
        fact = 1.0       # (2n)!
        for n in range(_SERIES_TERMS):
            c += term / fact
            s += term / (fact * (2 * n + 1))
            g += term / (fact * (2 * n + 1) * (2 * n + 2))
            h += term / (fact * (2 * n + 1) * (2 * n + 2) * (2 * n + 3))
            term *= -z
            fact *= (2 * n + 1) * (2 * n + 2)
        return c, s, g, h
    q = cmath.sqrt(z)
    cq = cmath.cos(q)
    sq = cmath.sin(q)
    return cq, sq / q, (1.0 - cq) / z, (q - sq) / (z * q)


def _w(gamma0: complex, m: float, k: float, t: float) -> complex:
    c, s, _, _ = _entire(complex(k / m) * t * t)
    return c + 1j * gamma0 / m * (t * s)


def _log_w(gamma0: complex, m: float, k: float, t: float) -> complex:
    """``log w(t)`` continued from ``log w(0) = 0`` along ``[0, t]``."""
    if t == 0:
        return 0j
    # ~16 samples per radian of oscillation; the free case needs one.
    q = math.sqrt(abs(k / m)) * abs(t) if k else 0.0
    n = max(1, int(math.ceil(16.0 * q / math.pi)))
    while True:
        total = 0j
        prev = 1.0 + 0j
        ok = True
        for j in range(1, n + 1):
            cur = _w(gamma0, m, k, t * j / n)
            if cur == 0:
                raise ArithmeticError("Gaussian width diverged during evolution")
            step = cmath.log(cur / prev)
            if abs(step.imag) > 0.5 * math.pi:
                ok = False
                break
            total += step
            prev = cur
        if ok:
            return total
        n *= 2
        if n > 1 << 22:  # pragma: no cover - cannot happen for Re(gamma0) > 0
            raise ArithmeticError("could not resolve branch of the width evolution")


def quadratic_evolve(g: GeneralizedGaussian, m: float, t: float, *, stiffness: float = 0.0,
                     force: float = 0.0, origin: float = 0.0, offset: float = 0.0
                     ) -> GeneralizedGaussian:
    """Exact evolution for time ``t`` under a general 1D quadratic Hamiltonian.

    Parameters
    ----------
    g : GeneralizedGaussian
        Initial packet.
    m : float
        Mass.
    t : float
        Elapsed time (may be negative).
    stiffness : float
        ``k`` in ``k/2 (x - origin)**2``; negative values give an inverted well.
    force : float
        Constant force ``F`` (the potential contains ``-F (x - origin)``).
    origin : float
        Expansion point ``x0``.
    offset : float
        Constant energy ``E0``.
    """
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m!r}")
    if t == 0:
        return g
    k = float(stiffness)
    z = complex(k / m) * t * t
    c, s1, g2, h3 = _entire(z)
    s = t * s1           # sin(wt)/w
    gt = t * t * g2      # (1 - cos wt)/w^2
    ht = t * t * t * h3  # (wt - sin wt)/w^3
    c, s, gt, ht = c.real, s.real, gt.real, ht.real

    u0 = g.center - origin
    p0 = g.momentum
    u1 = u0 * c + p0 / m * s + force / m * gt
    p1 = p0 * c - k * u0 * s + force * s
    int_u = u0 * s + p0 / m * gt + force / m * ht
    action = 0.5 * (u1 * p1 - u0 * p0) + 0.5 * force * int_u - offset * t

    gamma0 = g.width
    w = c + 1j * gamma0 / m * s
    wdot = -(k / m) * s + 1j * gamma0 / m * c
    gamma1 = -1j * m * wdot / w
    logc = g.log_prefactor + 1j * action - 0.5 * _log_w(gamma0, m, k, t)
    return GeneralizedGaussian(origin + u1, p1, gamma1, logc)


def free_evolve(g: GeneralizedGaussian, m: float, t: float) -> GeneralizedGaussian:
    """Evolve under ``H = p**2/(2m)``: ``gamma(t) = gamma / (1 + i gamma t / m)``."""
    return quadratic_evolve(g, m, t)


def harmonic_evolve(g: GeneralizedGaussian, m: float, omega: float, t: float) -> GeneralizedGaussian:
    """Evolve under ``H = p**2/(2m) + m omega**2 x**2 / 2``.

    The width follows the Moebius map

        gamma(t) = gamma (cos wt + i (m w/gamma) sin wt) / (cos wt + i (gamma/(m w)) sin wt)

    which has the fixed point ``gamma = m omega``; there the packet only picks
    up the phase ``exp(-i omega t / 2)``.
    """
    if not m > 0 or not omega > 0:
        raise ValueError("harmonic evolution needs m > 0 and omega > 0")
    return quadratic_evolve(g, m, t, stiffness=m * omega * omega)


@dataclass(frozen=True)
class ClassicalPoint:
    """Phase-space point reached along a classical trajectory.

    ``action_phase`` is the accumulated Lagrangian action ``int (p**2/2m - V) dt``;
    it is the phase acquired by a coherent state written with its momentum
    phase measured from the packet center.
    """

    t: float
    x: float
    p: float
    action_phase: float


def coherent_trajectory(x0: float, p0: float, m: float, omega: float, t: float) -> ClassicalPoint:
    """Classical harmonic (or, with ``omega == 0``, free) motion from ``(x0, p0)``."""
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m!r}")
    if omega < 0:
        raise ValueError(f"omega must be non-negative, got {omega!r}")
    k = m * omega * omega
    c, s1, g2, _ = _entire(complex(omega * omega) * t * t)
    c, s = c.real, (t * s1).real
    x = x0 * c + p0 / m * s
    p = p0 * c - k * x0 * s
    action = 0.5 * (x * p - x0 * p0)
    return ClassicalPoint(t, x, p, action)


def driven_harmonic_step(g: GeneralizedGaussian, params: EffectiveQuadraticParams, dt: float,
                         renormalize: bool = False) -> GeneralizedGaussian:
    """One exact step of length ``dt`` under the local quadratic Hamiltonian ``params``.

    The new center is ``x_n + x(dt)``, the momentum ``p(dt)``, with

        x(dt) = F/(m w^2) (1 - cos w dt) + p_n/(m w) sin w dt     (packet at x_n)
        p(dt) = p_n cos w dt + (F/w) sin w dt

    and the width follows the harmonic Moebius map with ``omega_n``.  Imaginary
    ``omega_n`` (negative curvature) continues to cosh/sinh.  The packet's own
    momentum is the ``p_n`` used.

    If ``renormalize`` is set, the modulus of the prefactor is reset to unit
    norm (the phase is kept).
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt!r}")
    out = quadratic_evolve(g, params.m, dt, stiffness=params.stiffness, force=params.F_n,
                           origin=params.x_n, offset=params.energy_offset)
    return normalize(out) if renormalize else out


def product_form_prefactor(g: GeneralizedGaussian, params: EffectiveQuadraticParams, dt: float
                           ) -> complex:
    """Log-prefactor update in the literal product form

        C1 = C0 / sqrt(cos wdt + i gamma/(m w) sin wdt)
                * exp(i F^2/(2 m w^2)) * exp(-i F/(m w^2) (p1 - p0)) * exp(i p1 x1)

    kept for regression comparison only.  Its modulus is correct for real
    ``omega_n``; its phase is not the propagator phase (see
    ``docs/derivations.md``) and it is singular at ``omega_n = 0``.
    """
    m = params.m
    w = complex(params.omega_n)
    wt = w * dt
    gamma = g.width
    x1 = (params.F_n / (m * w * w) * (1 - cmath.cos(wt))
          + g.momentum / (m * w) * cmath.sin(wt))
    p1 = cmath.cos(wt) * g.momentum + params.F_n / w * cmath.sin(wt)
    log_c = (g.log_prefactor
             - 0.5 * cmath.log(cmath.cos(wt) + 1j * gamma / (m * w) * cmath.sin(wt))
             + 1j * params.F_n ** 2 / (2 * m * w * w)
             - 1j * params.F_n / (m * w * w) * (p1 - g.momentum)
             + 1j * p1 * x1)
    return log_c
