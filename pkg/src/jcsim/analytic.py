"""Closed-form results for resonant two-photon driving of a resonant cavity (delta_C = 0).

Within ``span{|0>, |1+>, |1->, |2+->}`` and for ``Omega << g`` the first rung
can be eliminated, leaving a two-level problem ``|0> <-> |2+->`` with an
effective Rabi coupling, a light shift and an effective decay rate. The
conditional dynamics after the first emission reduce to a damped
``{|g,1>, |e,0>}`` doublet. These functions serve as oracles for the full
numerics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .hilbert import RateSet

PERTURBATIVE_LIMIT = 0.1  # warn above Omega / g


class AnalyticRegimeError(ValueError):
    """Parameters outside the oscillatory regime of the closed forms."""


class PerturbativeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TwoPhotonSolution:
    omega: float
    omega_eff: float
    kappa_eff: float
    light_shift: float
    B: float
    branch: int

    @property
    def saturation(self):
        return self.omega_eff / self.kappa_eff


@dataclass(frozen=True)
class PostEmissionState:
    """State after the first cavity emission from ``|2+->``: amplitudes on ``|g,1>`` and ``|e,0>``."""

    g1: float
    e0: float

    @property
    def norm(self):
        return float(np.hypot(self.g1, self.e0))

    @property
    def pauli_vector(self):
        """``(n0, nx, ny, nz)`` with ``rho = sum n_a sigma_a`` on ``(|g,1>, |e,0>)``."""
        return np.array([0.5, self.g1 * self.e0, 0.0, 0.5 * (self.g1**2 - self.e0**2)])


def _branch(branch):
    if branch in (+1, "+", "upper"):
        return 1
    if branch in (-1, "-", "lower"):
        return -1
    raise ValueError(f"branch must be +1 or -1, got {branch!r}")


def oscillation_b(rates: RateSet):
    """``B = sqrt(g^2 - ((gamma - kappa)/4)^2)``; raises outside the oscillatory regime."""
    arg = rates.g**2 - ((rates.gamma - rates.kappa) / 4) ** 2
    if arg <= 0:
        raise AnalyticRegimeError("g <= |gamma - kappa|/4: conditional dynamics are overdamped")
    return float(np.sqrt(arg))


def effective_two_photon(rates: RateSet, omega_rabi, branch=-1) -> TwoPhotonSolution:
    """Effective parameters of the ``|0> <-> |2+->`` two-photon transition."""
    s = _branch(branch)
    if not omega_rabi > 0:
        raise ValueError("omega_rabi must be > 0")
    if omega_rabi > PERTURBATIVE_LIMIT * rates.g:
        warnings.warn(f"Omega/g = {omega_rabi / rates.g:.3g} exceeds {PERTURBATIVE_LIMIT}; "
                      "the two-photon elimination is not reliable", PerturbativeWarning, stacklevel=2)
    g = rates.g
    return TwoPhotonSolution(
        omega=float(omega_rabi),
        omega_eff=2 * np.sqrt(2) * omega_rabi**2 / g,
        kappa_eff=1.5 * rates.kappa + 0.5 * rates.gamma,
        light_shift=s * 5 * omega_rabi**2 / (np.sqrt(2) * g),
        B=oscillation_b(rates),
        branch=s,
    )


def two_photon_laser_detuning(rates: RateSet, omega_rabi, branch=-1):
    """``Delta_L`` of the two-photon resonance including the light shift."""
    s = _branch(branch)
    return 0.5 * s * (np.sqrt(2) * rates.g + 5 * omega_rabi**2 / (np.sqrt(2) * rates.g))


def first_photon_rate(sol: TwoPhotonSolution, rates: RateSet):
    """``p_s = (3 kappa / 4)(1 - 1 / (1 + 8 (Omega_eff / kappa_eff)^2))``."""
    x2 = (sol.omega_eff / sol.kappa_eff) ** 2
    return 0.75 * rates.kappa * (1 - 1 / (1 + 8 * x2))


def post_emission_state(branch=-1) -> PostEmissionState:
    s = _branch(branch)
    return PostEmissionState(np.sqrt(2 / 3), s * np.sqrt(1 / 3))


def conditional_generator(rates: RateSet):
    """Generator ``M`` of the Pauli components ``(n0, nx, ny, nz)`` on ``(|g,1>, |e,0>)``.

    Only the anticommutator part of the dissipators is kept, so probability
    leaks out of the doublet at the emission rates.
    """
    k, gm, g = rates.kappa, rates.gamma, rates.g
    d = -(gm + k) / 2
    h = (gm - k) / 2
    return np.array([
        [d, 0, 0, h],
        [0, d, 0, 0],
        [0, 0, d, -2 * g],
        [h, 0, 2 * g, d],
    ])


def second_photon_rate(rates: RateSet, t, branch=-1):
    """Conditional cavity emission rate ``p_i(t) = kappa (n0 + nz)`` after a first emission.

    Evaluated by exponentiating :func:`conditional_generator`; see
    :func:`second_photon_rate_closed` for the closed form.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    M = conditional_generator(rates)
    v0 = post_emission_state(branch).pauli_vector
    w, V = np.linalg.eig(M)
    c = np.linalg.solve(V, v0)
    readout = np.array([1.0, 0.0, 0.0, 1.0]) @ V
    vals = np.real(np.exp(np.multiply.outer(t, w)) @ (readout * c))
    return rates.kappa * vals


def second_photon_rate_expm(rates: RateSet, t, branch=-1):
    """Same as :func:`second_photon_rate` through a dense matrix exponential (scalar ``t``)."""
    v = sla.expm(conditional_generator(rates) * t) @ post_emission_state(branch).pauli_vector
    return rates.kappa * (v[0] + v[3])


def second_photon_phase(rates: RateSet):
    """Amplitude and phase with ``12 g^2 + A cos(2Bt + phi)`` equal to the bracket of the closed form."""
    B = oscillation_b(rates)
    g, d = rates.g, rates.gamma - rates.kappa
    c = 4 * (4 * B**2 - 3 * g**2)
    s = 4 * B * d
    return float(np.hypot(c, s)), float(np.arctan2(-s, c))


def second_photon_rate_closed(rates: RateSet, t, form="trig"):
    """Closed forms of ``p_i(t)``.

    ``form="trig"`` uses cosine and sine terms; ``form="phase"`` uses the
    single shifted cosine with amplitude ``sqrt(4 g^2 + 2 (gamma - kappa)^2)``.
    """
    t = np.asarray(t, dtype=float)
    k, gm, g = rates.kappa, rates.gamma, rates.g
    B = oscillation_b(rates)
    env = np.exp(-t * (k + gm) / 2)
    if form == "trig":
        br = 12 * g**2 + 4 * (4 * B**2 - 3 * g**2) * np.cos(2 * B * t) + 4 * B * (gm - k) * np.sin(2 * B * t)
        return k * env / (24 * B**2) * br
    if form == "phase":
        _, phi = second_photon_phase(rates)
        return k * g * env / (12 * B**2) * (6 * g + np.sqrt(4 * g**2 + 2 * (gm - k) ** 2) * np.cos(2 * B * t + phi))
    raise ValueError(f"unknown form {form!r}")


def analytic_g2_tau(rates: RateSet, omega_rabi, t, branch=-1):
    """``g2(t) = p_i(t) / p_s`` of the effective model."""
    sol = effective_two_photon(rates, omega_rabi, branch)
    return second_photon_rate(rates, t, branch) / first_photon_rate(sol, rates)


def analytic_g2_zero(rates: RateSet, omega_rabi):
    """``8/9 + g^2 (gamma + 3 kappa)^2 / (288 Omega^4)``."""
    if not omega_rabi > 0:
        raise ValueError("omega_rabi must be > 0")
    return 8 / 9 + rates.g**2 * (rates.gamma + 3 * rates.kappa) ** 2 / (288 * omega_rabi**4)


def envelope_rate(rates: RateSet):
    return (rates.kappa + rates.gamma) / 2


def quoted_oscillation_frequency(rates: RateSet):
    """``sqrt(4 g^2 - (gamma - kappa)^2)`` (rad/ns); equals ``2B`` up to O(((gamma-kappa)/g)^2)."""
    return float(np.sqrt(4 * rates.g**2 - (rates.gamma - rates.kappa) ** 2))


def cascade_intensity_ratio(rates: RateSet):
    """Fraction of all cavity photons that are first photons of a two-photon cascade.

    In the unsaturated limit every ``|2+->`` decay feeds the first rung at
    rate ``kappa_eff``, and the first rung emits a second cavity photon with
    probability ``kappa / (kappa + gamma)``. The effective model's ``p_s``
    counts only the first photons, while ``kappa <a^dag a>`` counts both.
    """
    k, gm = rates.kappa, rates.gamma
    first = 1.5 * k
    second = (1.5 * k + 0.5 * gm) * k / (k + gm)
    return first / (first + second)
