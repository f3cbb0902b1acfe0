"""Polynomial potentials and the Gaussian-averaged local quadratic expansion.

All supported potentials are polynomials of degree at most four, stored as
coefficient arrays ``(c0, c1, c2, c3, c4)`` in powers of ``x``.  That keeps
every matrix element between Gaussians in closed form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .packets import GeneralizedGaussian

__all__ = [
    "KINDS",
    "PotentialSpec",
    "EffectiveQuadraticParams",
    "value",
    "derivative",
    "gaussian_average",
    "effective_quadratic",
]

KINDS = ("free", "harmonic", "quartic", "double_well")


@dataclass(frozen=True)
class PotentialSpec:
    """One of the four model potentials.

    ``lam`` is the quartic coupling (called lambda in configs).  Fields not
    used by ``kind`` must be left as ``None``.
    """

    kind: str
    m: float = 1.0
    omega: float | None = None
    lam: float | None = None
    f: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unsupported potential kind {self.kind!r}; expected one of {KINDS}")
        if not (math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass must be positive, got {self.m!r}")
        needs = {
            "free": (),
            "harmonic": ("omega",),
            "quartic": ("lam",),
            "double_well": ("lam", "f"),
        }[self.kind]
        for name in ("omega", "lam", "f"):
            val = getattr(self, name)
            if name in needs:
                if val is None or not math.isfinite(val) or val <= 0:
                    raise ValueError(f"{self.kind} potential needs {name} > 0, got {val!r}")
            elif val is not None:
                raise ValueError(f"{name} is not a parameter of the {self.kind} potential")

    @classmethod
    def free(cls, m=1.0):
        return cls("free", m)

    @classmethod
    def harmonic(cls, m=1.0, omega=1.0):
        return cls("harmonic", m, omega=omega)

    @classmethod
    def quartic(cls, m=1.0, lam=1.0):
        return cls("quartic", m, lam=lam)

    @classmethod
    def double_well(cls, m=1.0, lam=1.0, f=1.0):
        return cls("double_well", m, lam=lam, f=f)

    def coefficients(self) -> np.ndarray:
        """Power-series coefficients ``c0..c4``."""
        c = np.zeros(5)
        if self.kind == "harmonic":
            c[2] = 0.5 * self.m * self.omega ** 2
        elif self.kind == "quartic":
            c[4] = self.lam
        elif self.kind == "double_well":
            f2 = self.f * self.f
            c[0] = self.lam * f2 * f2
            c[2] = -2.0 * self.lam * f2
            c[4] = self.lam
        return c

    def polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients())

    def barrier_height(self) -> float:
        """``V(0) - V(f)`` for the double well, 0 otherwise."""
        if self.kind != "double_well":
            return 0.0
        return self.lam * self.f ** 4

    def __call__(self, x):
        return value(self, x)


def value(pot: PotentialSpec, x):
    """Point value ``V(x)``."""
    return pot.polynomial()(x)


def derivative(pot: PotentialSpec, x, order: int = 1):
    """``V'(x)`` (order 1) or ``V''(x)`` (order 2)."""
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order!r}")
    return pot.polynomial().deriv(order)(x)


def gaussian_average(poly: Polynomial, center: float, width_re: float) -> float:
    """Average of ``poly(center + y)`` over ``|psi|^2`` of a real-width Gaussian.

    The density ``exp(-width_re y**2)`` is normal with variance ``1/(2 width_re)``;
    odd moments vanish and ``<y^2> = s``, ``<y^4> = 3 s^2``.
    """
    if not width_re > 0:
        raise ValueError("width must be positive")
    shifted = poly(Polynomial([center, 1.0])).coef
    s = 0.5 / width_re
    moments = (1.0, 0.0, s, 0.0, 3.0 * s * s)
    return float(sum(c * moments[k] for k, c in enumerate(shifted)))


@dataclass(frozen=True)
class EffectiveQuadraticParams:
    """Local quadratic Hamiltonian around ``x_n``.

        H = p**2/(2m) + V_n - F_n (x - x_n) + (m omega_n**2 / 2) ((x - x_n)**2 - spread)

    ``spread`` is the packet's ``<(x - x_n)**2>`` when the expansion came from
    Gaussian averaging, so that the constant term reproduces ``<V>`` exactly
    and the harmonic potential is reproduced without an energy offset.  It is
    zero for a hand-built quadratic.  ``p_n`` records the momentum of the
    packet the expansion was taken on.
    """

    x_n: float
    p_n: float
    V_n: float
    F_n: float
    omega_n: complex
    m: float
    spread: float = 0.0

    def __post_init__(self):
        for name in ("x_n", "p_n", "V_n", "F_n", "m", "spread"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.m > 0:
            raise ValueError("mass must be positive")
        w = complex(self.omega_n)
        if not cmath.isfinite(w):
            raise ValueError("omega_n must be finite")
        if abs(w.real * w.imag) > 1e-12 * max(1.0, abs(w) ** 2):
            raise ValueError("omega_n must be real or purely imaginary")
        object.__setattr__(self, "omega_n", w)

    @property
    def stiffness(self) -> float:
        """``m omega_n**2`` (negative over a barrier)."""
        return self.m * (self.omega_n * self.omega_n).real

    @property
    def energy_offset(self) -> float:
        """Constant term of the quadratic after folding in ``spread``."""
        return self.V_n - 0.5 * self.stiffness * self.spread

    @classmethod
    def from_stiffness(cls, x_n, p_n, V_n, F_n, stiffness, m, spread=0.0):
        omega = cmath.sqrt(complex(stiffness / m))
        return cls(x_n, p_n, V_n, F_n, omega, m, spread)


def effective_quadratic(pot: PotentialSpec, g: GeneralizedGaussian) -> EffectiveQuadraticParams:
    """Gaussian-averaged second-order expansion of ``pot`` around the packet ``g``.

    Averages use the real-width density ``exp(-Re(gamma) (x - x_n)**2)``, so
    all returned coefficients are real even for complex ``gamma``.

    For ``V = lam x**4`` and ``g = Re(gamma)`` this gives
    ``V_n = lam x_n**4 + 3 lam x_n**2 / g + 3 lam / (4 g**2)``.  A variant with
    ``x_n**4`` in the middle term circulates; it does not follow from the
    moment expansion and is not used.
    """
    if pot.kind not in KINDS:  # pragma: no cover - guarded by PotentialSpec
        raise ValueError(f"unsupported potential kind {pot.kind!r}")
    poly = pot.polynomial()
    x_n = g.center
    gr = g.width.real
    V_n = gaussian_average(poly, x_n, gr)
    F_n = -gaussian_average(poly.deriv(1), x_n, gr)
    stiffness = gaussian_average(poly.deriv(2), x_n, gr)
    return EffectiveQuadraticParams.from_stiffness(
        x_n, g.momentum, V_n, F_n, stiffness, pot.m, spread=0.5 / gr)
