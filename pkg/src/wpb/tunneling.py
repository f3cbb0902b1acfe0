"""Double-well tunneling: stationary Gaussians, the instanton path and splittings.

For ``V = lam (x**2 - f**2)**2`` a Gaussian of width ``gamma`` centered at
``c`` feels the averaged force

    <V'(x + c)> = 4 lam c (c**2 + 3/(2 gamma) - f**2)

and the averaged curvature ``<V''> = 8 lam f**2 - 12 lam / gamma`` once the
force vanishes.  Stationarity (``gamma = sqrt(m <V''>)``) therefore reduces
to the cubic ``gamma**3 - 8 m lam f**2 gamma + 12 m lam = 0``, and the
center sits at ``c**2 = f**2 - 3/(2 gamma)``, slightly inside the minimum.

The instanton is the Euclidean motion ``m x'' = V'(x)`` between the two
turning points ``-c`` and ``+c``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, linalg, optimize

from .brigade import _whiten
from .errors import DegenerateBasisError, NoInstantonError, NoStationarySolutionError
from .oracle_grid import GridSpec, _imag_batch, apply_hamiltonian, sample_packet
from .packets import GeneralizedGaussian
from .potentials import PotentialSpec, gaussian_average

__all__ = [
    "StationaryWell",
    "InstantonPath",
    "Splitting",
    "find_stationary_gaussians",
    "instanton_trajectory",
    "instanton_basis",
    "ode_residuals",
    "smoothed_hamiltonian",
    "splitting_and_transfer",
]


def _require_double_well(pot):
    if pot.kind != "double_well":
        raise ValueError(f"expected a double_well potential, got {pot.kind!r}")


@dataclass(frozen=True)
class StationaryWell:
    center: float
    width: float
    side: str

    def packet(self, phase: float = 0.0) -> GeneralizedGaussian:
        return GeneralizedGaussian.normalized(self.width, self.center, 0.0, phase)

    def residuals(self, pot: PotentialSpec):
        """``(force, width)`` self-consistency residuals."""
        poly = pot.polynomial()
        force = gaussian_average(poly.deriv(1), self.center, self.width)
        curv = gaussian_average(poly.deriv(2), self.center, self.width)
        return force, self.width - math.sqrt(pot.m * curv)


def find_stationary_gaussians(pot: PotentialSpec, *, damping: float = 0.5,
                              max_iter: int = 10_000, tol: float = 1e-15):
    """Mirror pair ``(left, right)`` of self-consistent stationary Gaussians.

    Damped fixed-point iteration on ``gamma = sqrt(m (8 lam f^2 - 12 lam / gamma))``
    started from the harmonic width at the minimum, followed by Newton polishing
    of the equivalent cubic.
    """
    _require_double_well(pot)
    m, lam, f = pot.m, pot.lam, pot.f
    a = 8.0 * m * lam * f * f
    b = 12.0 * m * lam
    gamma = math.sqrt(a)
    for _ in range(max_iter):
        arg = a - b / gamma
        if arg <= 0:
            raise NoStationarySolutionError("averaged curvature is not positive: wells too shallow")
        new = (1.0 - damping) * gamma + damping * math.sqrt(arg)
        if abs(new - gamma) <= tol * gamma:
            gamma = new
            break
        gamma = new
    else:
        raise NoStationarySolutionError("stationary width iteration did not converge")
    for _ in range(3):
        p = gamma ** 3 - a * gamma + b
        dp = 3.0 * gamma * gamma - a
        if dp == 0:
            break
        gamma -= p / dp
    c2 = f * f - 1.5 / gamma
    if c2 <= 0:
        raise NoStationarySolutionError("x^2 = f^2 - 3/(2 gamma) is not positive: wells too shallow")
    c = math.sqrt(c2)
    return StationaryWell(-c, gamma, "left"), StationaryWell(c, gamma, "right")


@dataclass(frozen=True)
class InstantonPath:
    """Samples ``(tau, x, p)`` of the Euclidean bounce between ``-c_min`` and ``+c_min``.

    ``tau = 0`` at ``x = 0``; ``p = m dx/dtau``.  ``delta`` is the distance of the
    outermost samples from the turning points.
    """

    tau: np.ndarray
    x: np.ndarray
    p: np.ndarray
    c_min: float
    delta: float
    potential: PotentialSpec

    @property
    def samples(self):
        return list(zip(self.tau.tolist(), self.x.tolist(), self.p.tolist()))

    def __len__(self):
        return len(self.x)

    @property
    def turning_energy(self) -> float:
        return float(self.potential(self.c_min))

    def euclidean_energy(self) -> np.ndarray:
        """``m (dx/dtau)^2 / 2 - V(x)`` at every sample."""
        m = self.potential.m
        return 0.5 * self.p ** 2 / m - self.potential(self.x)

    def half_period(self) -> float:
        """Euclidean time from ``x = 0`` to the turning point."""
        return _tau_of(self.potential, self.c_min, self.c_min)

    def x_at(self, tau):
        """Position at Euclidean time ``tau``, reflecting at the turning points."""
        half = self.half_period()
        t = float(tau)
        # reduce to [-half, half] using the bounce symmetry
        period = 4.0 * half
        t = (t + half) % period - half
        if t > half:
            t = 2.0 * half - t
        if t == half:
            return self.c_min
        if t == -half:
            return -self.c_min
        c = self.c_min
        return optimize.brentq(lambda x: _tau_of(self.potential, c, x) - t, -c, c,
                               xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def _gap(pot, c, x):
    """``V(x) - V(c)`` in factored form, accurate near the turning point."""
    lam, f = pot.lam, pot.f
    return lam * (x * x - c * c) * (x * x + c * c - 2.0 * f * f)


def _tau_of(pot, c, x):
    """Euclidean time from ``0`` to ``x`` along the bounce with turning points ``+-c``.

    Substituting ``x' = c - w^2`` removes the turning-point singularity.
    """
    ax = min(abs(x), c)
    m, lam, f = pot.m, pot.lam, pot.f

    def integrand(w):
        xp = c - w * w
        return 2.0 / math.sqrt((2.0 * lam / m) * (2.0 * c - w * w) * (2.0 * f * f - c * c - xp * xp))

    val, _ = integrate.quad(integrand, math.sqrt(c - ax), math.sqrt(c), epsabs=1e-14, epsrel=1e-13,
                            limit=200)
    return math.copysign(val, x)


def instanton_trajectory(pot: PotentialSpec, well, n_samples: int = 16, *,
                         edge_fraction: float = 1e-8) -> InstantonPath:
    """Sample the Euclidean path from ``-c_min`` to ``+c_min`` uniformly in ``x``.

    ``well`` is a :class:`StationaryWell` (its ``|center|`` is the turning point)
    or a positive turning-point distance.  The outermost samples sit ``delta``
    inside the turning points, with ``V(x) - V(c_min) = edge_fraction * barrier``.
    """
    _require_double_well(pot)
    if n_samples < 3:
        raise ValueError("n_samples must be at least 3")
    c = abs(well.center) if isinstance(well, StationaryWell) else float(well)
    if not 0 < c:
        raise ValueError("turning point must be non-zero")
    probe = np.linspace(-c, c, 257)[1:-1]
    if c >= math.sqrt(2.0) * pot.f or np.any(_gap(pot, c, probe) <= 0):
        raise NoInstantonError("no barrier between the turning points")
    target = edge_fraction * pot.barrier_height()
    delta = optimize.brentq(lambda d: _gap(pot, c, c - d) - target, 0.0, c,
                            xtol=1e-300, rtol=4 * np.finfo(float).eps)
    xs = np.linspace(-(c - delta), c - delta, n_samples)
    tau = np.array([_tau_of(pot, c, x) for x in xs])
    v = np.sqrt(np.maximum(2.0 / pot.m * _gap(pot, c, xs), 0.0))
    return InstantonPath(tau, xs, pot.m * v, c, delta, pot)


def ode_residuals(path: InstantonPath, h: float = 2e-3) -> np.ndarray:
    """``|x'' - V'(x)/m|`` at each sample.

    ``x''`` is a Richardson-extrapolated central difference in ``tau`` of the
    path obtained by inverting the ``tau(x)`` quadrature, independent of the
    sampled momenta.
    """
    pot = path.potential
    out = []
    for t, x in zip(path.tau, path.x):
        def d2(step):
            return (path.x_at(t + step) - 2.0 * x + path.x_at(t - step)) / (step * step)
        acc = (4.0 * d2(0.5 * h) - d2(h)) / 3.0
        out.append(abs(acc - pot.polynomial().deriv(1)(x) / pot.m))
    return np.array(out)


def instanton_basis(path: InstantonPath, gamma: float, p_mode: str = "frozen"):
    """One normalized packet of width ``gamma`` per path sample.

    ``p_mode="with_momentum"`` gives each packet the path momentum; ``"frozen"``
    keeps them at rest.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if p_mode not in ("frozen", "with_momentum"):
        raise ValueError("p_mode must be 'frozen' or 'with_momentum'")
    moms = path.p if p_mode == "with_momentum" else np.zeros_like(path.p)
    return [GeneralizedGaussian.normalized(gamma, x, p) for x, p in zip(path.x, moms)]


def smoothed_hamiltonian(packets, pot: PotentialSpec, t: float, spec: GridSpec,
                         eps: float = 1e-8) -> np.ndarray:
    """Imaginary-time-smoothed Hamiltonian over ``packets``.

    With ``phi_l = exp(-t H / 2) psi_l`` (on the grid, not renormalized) this is
    ``S^{-1/2} Htilde S^{-1/2}`` for ``S_lm = <phi_l|phi_m>`` and
    ``Htilde_lm = <phi_l|H|phi_m>``.  The inverse square root is taken on the
    eigen-directions of ``S`` above ``eps`` times its largest eigenvalue, so the
    result is an ``r x r`` Hermitian matrix in that orthonormal frame.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    psi = np.array([sample_packet(g, spec) for g in packets])
    phi = _imag_batch(psi, spec, pot, 0.5 * t) if t > 0 else psi
    S = (phi.conj() @ phi.T) * spec.dx
    Hm = (phi.conj() @ apply_hamiltonian(phi, spec, pot).T) * spec.dx
    S = 0.5 * (S + S.conj().T)
    Hm = 0.5 * (Hm + Hm.conj().T)
    X = _whiten(S, eps).matrix
    h = X.conj().T @ Hm @ X
    return 0.5 * (h + h.conj().T)


class Splitting(NamedTuple):
    delta_e: float
    transfer_time: float

    @property
    def rate(self) -> float:
        """Two-level tunneling rate ``1 / transfer_time``."""
        return 1.0 / self.transfer_time


def splitting_and_transfer(h, left_index_set=None, right_index_set=None) -> Splitting:
    """Level splitting ``E1 - E0`` and two-level transfer time ``pi / (E1 - E0)``.

    If index sets are given, ``h`` must be expressed in an orthonormal basis
    whose indices are localized on the two sides; both lowest eigenvectors
    are then required to have weight on each side.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 2:
        raise ValueError("need a square Hamiltonian with at least 2 modes")
    vals, vecs = linalg.eigh(0.5 * (h + h.conj().T))
    if left_index_set is not None or right_index_set is not None:
        left = sorted(set(left_index_set or ()))
        right = sorted(set(right_index_set or ()))
        if not left or not right or set(left) & set(right):
            raise ValueError("left and right index sets must be non-empty and disjoint")
        if min(left + right) < 0 or max(left + right) >= h.shape[0]:
            raise ValueError("index set out of range")
        for j in (0, 1):
            w = np.abs(vecs[:, j]) ** 2
            if w[left].sum() < 1e-6 or w[right].sum() < 1e-6:
                raise ValueError("lowest levels are not delocalized over both wells")
    delta = float(vals[1] - vals[0])
    if not delta > 0:
        raise DegenerateBasisError("lowest two levels are degenerate")
    return Splitting(delta, math.pi / delta)
