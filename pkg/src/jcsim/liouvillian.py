"""Vectorised Lindblad master equation: superoperators, steady state, propagation.

Vectorisation is row-major, ``vec(rho)[i*dim + j] = rho[i, j]``, which makes

    vec(A rho B) = (A kron B^T) vec(rho)

so the commutator and dissipator superoperators take the familiar forms
``-i (H x 1 - 1 x H^T)`` and ``L x L* - (L^dag L) x 1 / 2 - 1 x (L^dag L)^T / 2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .hilbert import (
    DetuningSpec,
    FockBasis,
    RateSet,
    build_annihilation,
    build_h_rotating,
    build_sigma_minus,
)

# Fixed numerical slack for density-matrix checks.
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_SLACK = -1e-8
STEADY_RESIDUAL_TOL = 1e-10


class SteadyStateError(RuntimeError):
    """The Liouvillian has no unique, well-resolved steady state."""


def vectorize(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1).astype(complex, copy=True)


def devectorize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    dim = int(round(np.sqrt(v.size)))
    if v.ndim != 1 or dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorised square matrix")
    return v.reshape(dim, dim).copy()


def trace_functional(dim: int) -> np.ndarray:
    """Row vector ``t`` with ``t @ vec(rho) = tr(rho)``."""
    return np.eye(dim).reshape(-1)


def build_hamiltonian_part(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("Hamiltonian must be square")
    eye = np.eye(H.shape[0])
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def build_dissipator(L: np.ndarray) -> np.ndarray:
    L = np.asarray(L)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("Lindblad operator must be square")
    eye = np.eye(L.shape[0])
    LdL = L.conj().T @ L
    return np.kron(L, L.conj()) - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T)


def build_liouvillian(H: np.ndarray, lindblads) -> np.ndarray:
    """``D = u[H] + sum_L l[L]``; Lindblad operators carry their rates (``L = sqrt(rate) * J``)."""
    D = build_hamiltonian_part(H)
    for L in lindblads:
        if np.shape(L) != np.shape(H):
            raise ValueError(f"Lindblad operator shape {np.shape(L)} != Hamiltonian shape {np.shape(H)}")
        D = D + build_dissipator(L)
    return D


def jc_lindblads(basis: FockBasis, rates: RateSet):
    """Cavity loss ``sqrt(kappa) a`` and emitter loss ``sqrt(gamma) |g><e|``."""
    return [np.sqrt(rates.kappa) * build_annihilation(basis), np.sqrt(rates.gamma) * build_sigma_minus(basis)]


def steady_state(D: np.ndarray, check=True) -> np.ndarray:
    """Unique steady state of ``d vec(rho)/dt = D vec(rho)``.

    One row of ``D`` is replaced by the trace functional and the bordered
    system ``D' v = e_0`` is solved. A (near-)singular bordered matrix means
    the null space of ``D`` is degenerate, which raises
    :class:`SteadyStateError` rather than silently picking one state.
    """
    n = D.shape[0]
    dim = int(round(np.sqrt(n)))
    A = np.array(D, dtype=complex, copy=True)
    A[0, :] = trace_functional(dim)
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            v = sla.solve(A, rhs)
        except (sla.LinAlgError, sla.LinAlgWarning) as exc:
            raise SteadyStateError(f"steady state is not unique: {exc}") from exc
    rho = devectorize(v)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    if check:
        resid = np.linalg.norm(D @ vectorize(rho))
        if not np.isfinite(resid) or resid > STEADY_RESIDUAL_TOL * max(1.0, np.abs(D).max()):
            raise SteadyStateError(f"steady-state residual {resid:.3e} too large")
    return rho


def steady_state_eig(D: np.ndarray) -> np.ndarray:
    """Null vector of ``D`` via a full eigendecomposition (slow cross-check)."""
    w, V = np.linalg.eig(D)
    k = np.argmin(np.abs(w))
    rho = devectorize(V[:, k])
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def liouvillian_spectrum(D: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``D`` sorted by increasing modulus."""
    w = np.linalg.eigvals(D)
    return w[np.argsort(np.abs(w))]


def spectral_gap(D: np.ndarray) -> float:
    """Second-smallest eigenvalue modulus; zero signals a degenerate steady state."""
    return float(np.abs(liouvillian_spectrum(D)[1]))


def propagator(D: np.ndarray, dt: float) -> np.ndarray:
    if not np.isfinite(dt) or dt < 0:
        raise ValueError(f"time step must be finite and >= 0, got {dt!r}")
    return sla.expm(D * dt)


def propagate(D: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    return devectorize(propagator(D, t) @ vectorize(rho0))


def evolve_on_grid(D: np.ndarray, rho0: np.ndarray, dt: float, n_steps: int) -> np.ndarray:
    """States at ``t = 0, dt, ..., n_steps*dt`` using one cached step propagator.

    Returns an array of vectorised states with shape ``(n_steps + 1, dim**2)``.
    """
    P = propagator(D, dt)
    out = np.empty((n_steps + 1, D.shape[0]), dtype=complex)
    out[0] = vectorize(rho0)
    for k in range(n_steps):
        out[k + 1] = P @ out[k]
    return out


def check_density_matrix(rho, hermitian_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, positivity=POSITIVITY_SLACK):
    """Return a list of violated density-matrix properties (empty when valid)."""
    problems = []
    herm = np.abs(rho - rho.conj().T).max()
    if herm > hermitian_tol:
        problems.append(f"non-Hermitian by {herm:.2e}")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        problems.append(f"trace {tr:.12g}")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lam < positivity:
        problems.append(f"negative eigenvalue {lam:.2e}")
    return problems


def expect(op: np.ndarray, rho: np.ndarray) -> complex:
    return np.trace(op @ rho)


@dataclass(frozen=True)
class DrivenSystem:
    """Coherently driven, dissipative Jaynes-Cummings system in the laser frame.

    Operators and the steady state are built lazily and cached; the instance
    itself is immutable.
    """

    rates: RateSet
    n_max: int = 15
    delta_C: float = 0.0
    delta_L: float = 0.0
    omega: float = 0.0
    extra_lindblads: tuple = field(default=(), compare=False)

    @cached_property
    def basis(self):
        return FockBasis(self.n_max)

    @cached_property
    def a(self):
        return build_annihilation(self.basis)

    @cached_property
    def sigma_minus(self):
        return build_sigma_minus(self.basis)

    @cached_property
    def number(self):
        return self.a.conj().T @ self.a

    @cached_property
    def hamiltonian(self):
        return build_h_rotating(self.basis, self.rates, DetuningSpec(self.delta_C, self.delta_L), self.omega)

    @cached_property
    def lindblads(self):
        return jc_lindblads(self.basis, self.rates) + list(self.extra_lindblads)

    @cached_property
    def liouvillian(self):
        return build_liouvillian(self.hamiltonian, self.lindblads)

    @cached_property
    def steady_state(self):
        return steady_state(self.liouvillian)

    @property
    def photon_number(self):
        return float(expect(self.number, self.steady_state).real)

    def with_(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)
