"""Brute-force reference solver on a uniform periodic grid.

Real- and imaginary-time evolution use the symmetric (Strang) split-step
Fourier scheme; eigenpairs come from dense diagonalization of the same
discretized Hamiltonian, with the kinetic operator applied spectrally.  The
grid is periodic, so packets must have negligible amplitude at the edges.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DecayUnderflowError, DomainTooSmallError, StepSizeError
from .packets import GeneralizedGaussian, evaluate
from .potentials import PotentialSpec

__all__ = [
    "GridSpec",
    "GridState",
    "DEFAULT_GRID",
    "sample_packet",
    "init_from_packet",
    "evolve_real_time",
    "evolve_imag_time",
    "propagate",
    "evolve_eigenbasis",
    "apply_hamiltonian",
    "lowest_eigenpairs",
    "inner",
    "norm",
    "l2_error",
    "expectation_x",
    "rayleigh_quotient",
]

_BOUNDARY_TOL = 1e-12
_NORM_DRIFT_TOL = 1e-6
_UNDERFLOW = 1e-300


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid ``x_i = x_min + i dx``, ``dx = (x_max - x_min) / n_points``."""

    x_min: float = -12.0
    x_max: float = 12.0
    n_points: int = 1024
    dt: float = 1e-3

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("grid needs x_max > x_min")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise ValueError("grid needs an integer n_points >= 16")
        if not self.dt > 0:
            raise ValueError("grid time step must be positive")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class GridState:
    spec: GridSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.spec.n_points,):
            raise ValueError("amplitude array does not match the grid")
        object.__setattr__(self, "amplitudes", amps)


def sample_packet(g: GeneralizedGaussian, spec: GridSpec) -> np.ndarray:
    """Raw samples of the packet on the grid (no renormalization)."""
    return evaluate(g, spec.x)


def init_from_packet(g: GeneralizedGaussian, spec: GridSpec) -> GridState:
    """Sample a packet on the grid and renormalize it there."""
    psi = sample_packet(g, spec)
    # the right edge of the periodic cell is x_max itself
    edge = max(abs(psi[0]), abs(complex(evaluate(g, spec.x_max))))
    total = math.sqrt(float(np.sum(np.abs(psi) ** 2) * spec.dx))
    if total == 0.0 or edge / total >= _BOUNDARY_TOL:
        raise DomainTooSmallError(
            f"packet at {g.center:.4g} is not contained in [{spec.x_min}, {spec.x_max}]")
    return GridState(spec, psi / total)


def _norm_sq(psi, dx):
    return np.sum(np.abs(psi) ** 2, axis=-1) * dx


def _split_step(psi, spec: GridSpec, pot: PotentialSpec, t_total: float, imaginary: bool):
    """Strang split-step over ``t_total`` with step ``<= spec.dt``.

    ``psi`` may carry leading batch axes; evolution is along the last axis.
    """
    if t_total == 0:
        return psi.copy()
    n_steps = max(1, int(math.ceil(abs(t_total) / spec.dt - 1e-9)))
    h = t_total / n_steps
    v = pot.polynomial()(spec.x)
    kin = spec.k ** 2 / (2.0 * pot.m)
    if imaginary:
        half_v = np.exp(-0.5 * h * v)
        full_v = half_v * half_v
        kin_f = np.exp(-h * kin)
    else:
        half_v = np.exp(-0.5j * h * v)
        full_v = half_v * half_v
        kin_f = np.exp(-1j * h * kin)
    psi = psi * half_v
    for step in range(n_steps):
        psi = np.fft.ifft(np.fft.fft(psi, axis=-1) * kin_f, axis=-1)
        psi *= full_v if step < n_steps - 1 else half_v
    return psi


def evolve_real_time(s: GridState, pot: PotentialSpec, t_total: float) -> GridState:
    """Apply ``exp(-i t_total H)``; raises :class:`StepSizeError` on norm drift."""
    if t_total < 0:
        raise ValueError("t_total must be non-negative")
    before = float(_norm_sq(s.amplitudes, s.spec.dx))
    psi = _split_step(s.amplitudes, s.spec, pot, t_total, imaginary=False)
    after = float(_norm_sq(psi, s.spec.dx))
    if not np.isfinite(after) or abs(after - before) > _NORM_DRIFT_TOL * max(before, 1e-300):
        raise StepSizeError(f"norm drifted from {before:.3e} to {after:.3e}; reduce dt")
    return GridState(s.spec, psi)


def evolve_imag_time(s: GridState, pot: PotentialSpec, tau: float, renormalize: bool = True) -> GridState:
    """Apply ``exp(-tau H)``, optionally rescaling to unit norm."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    psi = _imag_batch(s.amplitudes, s.spec, pot, tau)
    if renormalize:
        psi = psi / math.sqrt(float(_norm_sq(psi, s.spec.dx)))
    return GridState(s.spec, psi)


def _imag_batch(psi, spec: GridSpec, pot: PotentialSpec, tau: float):
    out = _split_step(np.asarray(psi, dtype=np.complex128), spec, pot, tau, imaginary=True)
    nrm = _norm_sq(out, spec.dx)
    if np.any(~np.isfinite(nrm)) or np.any(nrm < _UNDERFLOW):
        raise DecayUnderflowError("imaginary-time decay underflowed; use a smaller tau")
    return out


def propagate(s: GridState, pot: PotentialSpec, times):
    """Yield the state at each of the sorted, non-negative ``times``."""
    t_prev = 0.0
    psi = s.amplitudes
    before = float(_norm_sq(psi, s.spec.dx))
    for t in times:
        if t < t_prev:
            raise ValueError("times must be sorted and non-negative")
        psi = _split_step(psi, s.spec, pot, t - t_prev, imaginary=False)
        t_prev = t
        after = float(_norm_sq(psi, s.spec.dx))
        if abs(after - before) > _NORM_DRIFT_TOL * before:
            raise StepSizeError(f"norm drifted from {before:.3e} to {after:.3e}; reduce dt")
        yield GridState(s.spec, psi)


def apply_hamiltonian(psi, spec: GridSpec, pot: PotentialSpec):
    """``H psi`` with spectral kinetic energy; batch axes allowed."""
    kin = spec.k ** 2 / (2.0 * pot.m)
    return np.fft.ifft(np.fft.fft(psi, axis=-1) * kin, axis=-1) + pot.polynomial()(spec.x) * psi


def hamiltonian_matrix(pot: PotentialSpec, spec: GridSpec) -> np.ndarray:
    """Dense real symmetric matrix of the discretized Hamiltonian."""
    kin = spec.k ** 2 / (2.0 * pot.m)
    col = np.fft.ifft(kin).real
    H = linalg.circulant(col)
    H = 0.5 * (H + H.T)
    H[np.diag_indices_from(H)] += pot.polynomial()(spec.x)
    return H


@functools.lru_cache(maxsize=4)
def _spectral_decomposition(pot: PotentialSpec, spec: GridSpec):
    return linalg.eigh(hamiltonian_matrix(pot, spec))


def evolve_eigenbasis(s: GridState, pot: PotentialSpec, t: float) -> GridState:
    """Apply ``exp(-i t H)`` exactly in time through the full eigenbasis of the
    discretized Hamiltonian.  Free of splitting error; the diagonalization is
    cached per (potential, grid) and practical for ``n_points <= 2048``.
    """
    vals, vecs = _spectral_decomposition(pot, s.spec)
    coeffs = vecs.T @ s.amplitudes
    return GridState(s.spec, vecs @ (np.exp(-1j * t * vals) * coeffs))


def lowest_eigenpairs(pot: PotentialSpec, spec: GridSpec, k: int):
    """The ``k`` lowest eigenpairs ``[(E, GridState), ...]``, states unit-normalized."""
    if k < 1 or k > spec.n_points // 8:
        raise ValueError(f"k must be in 1..{spec.n_points // 8}")
    H = hamiltonian_matrix(pot, spec)
    vals, vecs = linalg.eigh(H, subset_by_index=[0, k - 1])
    out = []
    for j in range(k):
        v = vecs[:, j] / math.sqrt(spec.dx)
        # fix the sign so the largest-modulus sample is positive
        v = v * np.sign(v[np.argmax(np.abs(v))])
        out.append((float(vals[j]), GridState(spec, v.astype(np.complex128))))
    return out


def _check(a: GridState, b: GridState):
    if a.spec != b.spec:
        raise ValueError("grid states live on different grids")


def inner(a: GridState, b: GridState) -> complex:
    _check(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.spec.dx)


def norm(s: GridState) -> float:
    return math.sqrt(float(_norm_sq(s.amplitudes, s.spec.dx)))


def l2_error(a: GridState, b: GridState) -> float:
    _check(a, b)
    return math.sqrt(float(_norm_sq(a.amplitudes - b.amplitudes, a.spec.dx)))


def expectation_x(s: GridState) -> float:
    w = np.abs(s.amplitudes) ** 2
    return float(np.sum(w * s.spec.x) / np.sum(w))


def rayleigh_quotient(s: GridState, pot: PotentialSpec) -> float:
    hpsi = apply_hamiltonian(s.amplitudes, s.spec, pot)
    return float((np.vdot(s.amplitudes, hpsi) / np.vdot(s.amplitudes, s.amplitudes)).real)
