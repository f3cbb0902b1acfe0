"""Bucket-brigade propagation over a trajectory of Gaussian packets.

The scheme has three stages:

1. march a packet forward with the locally fitted quadratic Hamiltonian,
   collecting every packet it visits;
2. build the overlap (Gram) matrix and the exact Hamiltonian matrix over the
   collected packets and keep only the significantly independent directions;
3. exponentiate the projected Hamiltonian in that orthonormal subspace.

Only stage 1 uses the quadratic approximation; stages 2 and 3 use the true
Hamiltonian restricted to the subspace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import _kernels
from .errors import DegenerateBasisError, NumericalFailure
from .exact_propagators import driven_harmonic_step
from .packets import GeneralizedGaussian, packet_arrays
from .potentials import PotentialSpec, effective_quadratic

__all__ = [
    "BrigadeConfig",
    "BasisSet",
    "SubspaceTransform",
    "generate_trajectory_basis",
    "assemble_matrices",
    "significant_subspace",
    "initial_coefficients",
    "project_and_exponentiate",
    "SubspacePropagator",
    "reconstruct",
]

HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class BrigadeConfig:
    """Stepping and filtering parameters.

    ``thin`` keeps every ``thin``-th packet of the trajectory (the first and
    last packets are always kept).
    """

    dt: float
    n_steps: int
    significance_eps: float = 1e-8
    renormalize_each_step: bool = True
    thin: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError("n_steps must be a positive integer")
        if not 0 < self.significance_eps < 1:
            raise ValueError("significance_eps must lie in (0, 1)")
        if int(self.thin) != self.thin or self.thin < 1:
            raise ValueError("thin must be a positive integer")


def generate_trajectory_basis(g0: GeneralizedGaussian, pot: PotentialSpec, cfg: BrigadeConfig):
    """``[g0, g1, ..., g_n]`` with ``g_{k+1}`` the quadratic step of ``g_k``."""
    packets = [g0]
    g = g0
    for step in range(cfg.n_steps):
        params = effective_quadratic(pot, g)
        try:
            g = driven_harmonic_step(g, params, cfg.dt, renormalize=cfg.renormalize_each_step)
        except (ArithmeticError, ValueError) as exc:
            raise NumericalFailure(f"trajectory step {step + 1} failed: {exc}") from exc
        packets.append(g)
    if cfg.thin > 1:
        kept = packets[::cfg.thin]
        if (len(packets) - 1) % cfg.thin:
            kept.append(packets[-1])
        packets = kept
    return packets


@dataclass(frozen=True)
class BasisSet:
    """Packets with their Gram matrix ``N`` and Hamiltonian matrix ``H``."""

    packets: tuple
    gram: np.ndarray
    hamiltonian: np.ndarray
    potential: PotentialSpec | None = None

    def __len__(self):
        return len(self.packets)


def _hermitize(M, what):
    scale = max(1.0, float(np.max(np.abs(M))))
    dev = float(np.max(np.abs(M - M.conj().T))) / scale
    if dev > HERMITIAN_TOL:
        raise NumericalFailure(f"{what} matrix is not Hermitian (relative deviation {dev:.2e})")
    return 0.5 * (M + M.conj().T)


def assemble_matrices(packets, pot: PotentialSpec) -> BasisSet:
    """Closed-form ``N_nm = <n|m>`` and ``H_nm = <n| p^2/2m + V |m>``."""
    packets = tuple(packets)
    if not packets:
        raise ValueError("cannot assemble matrices over an empty packet list")
    c, p, w, lc = packet_arrays(packets)
    S, M, T = _kernels.pair_matrices(c, p, w, lc, float(pot.m))
    coeffs = pot.coefficients()
    H = T + np.tensordot(coeffs, M, axes=1)
    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(H))):
        raise NumericalFailure("non-finite matrix elements")
    return BasisSet(packets, _hermitize(S, "overlap"), _hermitize(H, "Hamiltonian"), pot)


@dataclass(frozen=True)
class SubspaceTransform:
    """Whitening map from orthonormal-mode coefficients to packet coefficients.

    Columns of ``matrix`` are the retained orthonormal modes expressed over the
    packets, ordered by decreasing Gram eigenvalue, so
    ``matrix^H @ gram @ matrix = I``.
    """

    matrix: np.ndarray
    retained_modes: int
    discarded_eigenvalues: tuple
    gram_eigenvalues: np.ndarray = field(repr=False, default=None)


def significant_subspace(basis: BasisSet, eps: float = 1e-8) -> SubspaceTransform:
    """Keep Gram eigen-directions with eigenvalue above ``eps * max eigenvalue``."""
    return _whiten(basis.gram, eps)


def _whiten(gram, eps):
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    vals, vecs = linalg.eigh(gram)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    top = vals[0]
    if not top > 0:
        raise DegenerateBasisError("overlap matrix has no positive eigenvalue")
    keep = vals > eps * top
    r = int(np.count_nonzero(keep))
    if r == 0:  # pragma: no cover - the top eigenvalue always passes
        raise DegenerateBasisError("all modes discarded")
    X = vecs[:, :r] / np.sqrt(vals[:r])
    return SubspaceTransform(X, r, tuple(float(v) for v in vals[r:]), vals)


def projected_hamiltonian(basis: BasisSet, transform: SubspaceTransform) -> np.ndarray:
    X = transform.matrix
    h = X.conj().T @ basis.hamiltonian @ X
    return 0.5 * (h + h.conj().T)


def initial_coefficients(basis: BasisSet, transform: SubspaceTransform, psi) -> np.ndarray:
    """Least-squares packet coefficients of ``psi`` in the retained subspace.

    ``psi`` is either a packet or a vector of packet coefficients.
    """
    if isinstance(psi, GeneralizedGaussian):
        c, p, w, lc = packet_arrays(basis.packets + (psi,))
        S, _, _ = _kernels.pair_matrices(c, p, w, lc, 1.0)
        b = S[:-1, -1]
    else:
        b = basis.gram @ _as_coeffs(basis, psi)
    X = transform.matrix
    return X @ (X.conj().T @ b)


def _as_coeffs(basis, init):
    init = np.asarray(init, dtype=np.complex128)
    if init.shape != (len(basis.packets),):
        raise ValueError(f"coefficient vector has shape {init.shape}, expected ({len(basis.packets)},)")
    return init


class SubspacePropagator:
    """``exp(-i t h)`` in the retained orthonormal subspace, diagonalized once.

    Attributes
    ----------
    energies : ndarray
        Eigenvalues of the projected Hamiltonian, ascending.
    """

    def __init__(self, basis: BasisSet, transform: SubspaceTransform):
        self.basis = basis
        self.transform = transform
        self.h = projected_hamiltonian(basis, transform)
        self.energies, self.modes = linalg.eigh(self.h)

    def to_modes(self, coeffs):
        """Orthonormal-mode amplitudes of a packet-coefficient vector."""
        X = self.transform.matrix
        return X.conj().T @ (self.basis.gram @ _as_coeffs(self.basis, coeffs))

    def evolve_modes(self, d0, t):
        U = self.modes
        return U @ (np.exp(-1j * t * self.energies) * (U.conj().T @ d0))

    def evolve(self, init, t):
        """Packet coefficients after time ``t``."""
        return self.transform.matrix @ self.evolve_modes(self.to_modes(init), t)

    def energy(self, d):
        return float(np.real(np.vdot(d, self.h @ d)))


def project_and_exponentiate(basis: BasisSet, transform: SubspaceTransform, init, t: float) -> np.ndarray:
    """Packet coefficients of ``exp(-i t H) psi_init`` within the retained subspace."""
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    if transform.matrix.shape[0] != len(basis.packets):
        raise ValueError("transform does not match the basis")
    return SubspacePropagator(basis, transform).evolve(init, t)


def reconstruct(packets, coeffs, xs) -> np.ndarray:
    """``sum_n coeffs[n] psi_n(x)`` at each ``x`` in ``xs``."""
    packets = tuple(packets)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != (len(packets),):
        raise ValueError("coefficient vector length does not match the packet list")
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    c, p, w, lc = packet_arrays(packets)
    return _kernels.packet_sum(c, p, w, lc, coeffs, xs)
