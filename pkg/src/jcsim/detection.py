"""Laser-background admixture and click-detector statistics.

The leaked laser enters through a beam splitter with transmission ``eta``;
the detected field is ``c = sqrt(eta) a - i sqrt(1 - eta) b`` with ``b`` in a
coherent state ``|alpha>``. Because ``b`` is coherent and independent of
the emitter-cavity system, every normally and time ordered moment of ``c``
equals that of the displaced system operator ``sqrt(eta) a - i sqrt(1-eta) alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hilbert import FockBasis, RateSet
from .liouvillian import expect

POWER_MODE_ETA = 0.999
POWER_MODE_COEFF = 1000.0


@dataclass(frozen=True)
class BackgroundModel:
    """Coherent laser background mixed into the detected mode.

    Attributes
    ----------
    eta : float
        Signal transmission of the mixing beam splitter, ``0 < eta <= 1``.
    alpha : float
        Background amplitude modulus ``|alpha|``.
    phase : float
        Phase of ``alpha`` in rad (0 = real positive).
    phase_averaged : bool
        Average correlators over the background phase instead of fixing it.
    mode : str
        ``"fixed-sbr"`` or ``"power"``; informational.
    """

    eta: float = 1.0
    alpha: float = 0.0
    phase: float = 0.0
    phase_averaged: bool = False
    mode: str = "fixed-sbr"
    eta2: float | None = None
    power_coeff: float | None = None

    def __post_init__(self):
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not (np.isfinite(self.alpha) and np.isfinite(self.phase)):
            raise ValueError("background amplitude and phase must be finite")
        if self.alpha < 0:
            raise ValueError("alpha is a modulus; use phase for its argument")

    @classmethod
    def off(cls):
        return cls()

    @classmethod
    def from_sbr(cls, sbr, resonant_photon_number, phase=0.0, phase_averaged=False):
        """Fixed-SBR background: ``eta = 1 - 1/SBR`` and ``|alpha|^2`` equal to the resonant photon number."""
        if not sbr > 1:
            raise ValueError("SBR must exceed 1")
        return cls(1.0 - 1.0 / sbr, float(np.sqrt(resonant_photon_number)), phase, phase_averaged)

    @classmethod
    def power_proportional(cls, power, eta2, power_coeff=POWER_MODE_COEFF, phase=0.0, phase_averaged=False):
        """Background that scales with laser power: ``eta = 0.999``, ``alpha = sqrt(power_coeff * P * eta2)``."""
        if power < 0 or not 0 < eta2 <= 1:
            raise ValueError("need power >= 0 and 0 < eta2 <= 1")
        return cls(POWER_MODE_ETA, float(np.sqrt(power_coeff * power * eta2)), phase, phase_averaged, "power", eta2, power_coeff)

    @property
    def sbr(self):
        return np.inf if self.eta == 1.0 else 1.0 / (1.0 - self.eta)

    @property
    def amplitude(self):
        return self.alpha * np.exp(1j * self.phase)

    def at_phase(self, phase):
        return replace(self, phase=phase, phase_averaged=False)


@dataclass(frozen=True)
class DetectorModel:
    """Click probability per detection window for one cavity photon, ``T = kappa tau_det eta_det``."""

    T: float
    tau_det: float | None = None

    def __post_init__(self):
        if not 0.0 < self.T < 1.0:
            raise ValueError(f"T must lie in (0, 1), got {self.T!r}")

    @classmethod
    def from_window(cls, rates: RateSet, tau_det_ns, eta_det):
        return cls(rates.kappa * tau_det_ns * eta_det, tau_det_ns)


def displaced_operator(a, bg: BackgroundModel):
    """Effective detected-mode operator ``sqrt(eta) a - i sqrt(1 - eta) alpha 1``."""
    return np.sqrt(bg.eta) * a - 1j * np.sqrt(1.0 - bg.eta) * bg.amplitude * np.eye(a.shape[0])


def _phases(n):
    return 2 * np.pi * np.arange(n) / n


def detected_moments(rho, a, bg: BackgroundModel, n_phase=64):
    """``(<c^dag c>, <c^dag^2 c^2>)``, phase averaged when ``bg.phase_averaged``."""
    models = [bg.at_phase(p) for p in _phases(n_phase)] if bg.phase_averaged else [bg]
    n1 = n2 = 0.0
    for m in models:
        c = displaced_operator(a, m)
        cd = c.conj().T
        n1 += expect(cd @ c, rho).real
        n2 += expect(cd @ cd @ c @ c, rho).real
    return n1 / len(models), n2 / len(models)


def detected_g2_zero(rho, a, bg: BackgroundModel, n_phase=64):
    """Zero-delay g2 of the detected field.

    For phase averaging the numerator and denominator are averaged
    separately (ratio of averages), as an intensity-correlation measurement
    integrating over a slowly drifting phase would do.
    """
    n1, n2 = detected_moments(rho, a, bg, n_phase)
    if n1 <= 0:
        raise ValueError("zero detected intensity")
    return n2 / n1**2


def phase_resolved_intensity(system, bg: BackgroundModel):
    return detected_moments(system.steady_state, system.a, bg)[0]


def detected_g2_tau(D, rho, a, bg: BackgroundModel, tau_ps, n_phase=16):
    """g2(tau) of the detected field; phase averaging uses a ratio of averages."""
    from .correlator import CorrelationTrace, g2_tau

    if not bg.phase_averaged:
        return g2_tau(D, rho, displaced_operator(a, bg), tau_ps)
    num = 0.0
    den = 0.0
    for p in _phases(n_phase):
        c = displaced_operator(a, bg.at_phase(p))
        mean = expect(c.conj().T @ c, rho).real
        tr = g2_tau(D, rho, c, tau_ps)
        num = num + tr.values * mean**2
        den += mean
    den /= n_phase
    return CorrelationTrace(np.asarray(tau_ps, float), num / n_phase / den**2)


def coherent_ket(alpha, n_levels):
    n = np.arange(n_levels)
    from scipy.special import gammaln

    logamp = n * np.log(abs(alpha) + 1e-300) - 0.5 * gammaln(n + 1)
    ket = np.exp(logamp - 0.5 * abs(alpha) ** 2) * np.exp(1j * np.angle(alpha) * n)
    if alpha == 0:
        ket = np.zeros(n_levels, complex)
        ket[0] = 1
    return ket.astype(complex)


def tensored_g2_zero(rho, a, bg: BackgroundModel, n_background=30):
    """Zero-delay g2 with an explicit truncated background mode (slow cross-check).

    Builds ``rho (x) |alpha><alpha|`` and ``c = sqrt(eta) a (x) 1 - i sqrt(1-eta) 1 (x) b``.
    Only practical for small system truncations.
    """
    b = np.diag(np.sqrt(np.arange(1, n_background)), 1).astype(complex)
    ket = coherent_ket(bg.amplitude, n_background)
    rb = np.outer(ket, ket.conj())
    big = np.kron(rho, rb)
    c = np.sqrt(bg.eta) * np.kron(a, np.eye(n_background)) - 1j * np.sqrt(1 - bg.eta) * np.kron(np.eye(a.shape[0]), b)
    cd = c.conj().T
    n1 = np.trace(cd @ c @ big).real
    n2 = np.trace(cd @ cd @ c @ c @ big).real
    return n2 / n1**2


def _photon_numbers(rho, photon_numbers):
    if photon_numbers is None:
        photon_numbers = FockBasis.from_dim(rho.shape[0]).photon_numbers
    return np.asarray(photon_numbers, dtype=float)


def no_click_expectation(rho, x, photon_numbers=None):
    """``<x^(a^dag a)>`` for a state diagonal-readable in the photon-number basis."""
    n = _photon_numbers(rho, photon_numbers)
    return float(np.real(np.diag(rho)) @ (x**n))


def npnr_click_probability(rho, det: DetectorModel, photon_numbers=None):
    """Click probability of one detector behind a 50/50 splitter, ``1 - <(1 - T/2)^n>``."""
    return 1.0 - no_click_expectation(rho, 1.0 - det.T / 2, photon_numbers)


def npnr_coincidence_probability(rho, det: DetectorModel, photon_numbers=None):
    """Both detectors click: ``1 - 2<(1 - T/2)^n> + <(1 - T)^n>``."""
    return (
        1.0
        - 2.0 * no_click_expectation(rho, 1.0 - det.T / 2, photon_numbers)
        + no_click_expectation(rho, 1.0 - det.T, photon_numbers)
    )


def npnr_g2(rho, det: DetectorModel, photon_numbers=None):
    ps = npnr_click_probability(rho, det, photon_numbers)
    if ps <= 0:
        raise ValueError("zero click probability")
    return npnr_coincidence_probability(rho, det, photon_numbers) / ps**2


def coherent_click_probability(nbar, T):
    return -np.expm1(-T * nbar / 2)


def coherent_coincidence_probability(nbar, T):
    # 1 - 2 e^{-T n/2} + e^{-T n} = (1 - e^{-T n/2})^2
    return np.expm1(-T * nbar / 2) ** 2


def coherent_npnr_g2(nbar, T):
    """Closed-form NPNR g2 of a coherent state; identically 1."""
    return coherent_coincidence_probability(nbar, T) / coherent_click_probability(nbar, T) ** 2


def rabi_from_power(P, P0, rates: RateSet):
    """Drive amplitude ``sqrt(P/P0) (kappa + gamma) / (2 sqrt(2))`` from laser power."""
    P = np.asarray(P, dtype=float)
    if np.any(P < 0) or not P0 > 0:
        raise ValueError("need P >= 0 and P0 > 0")
    out = np.sqrt(P / P0) * (rates.kappa + rates.gamma) / (2 * np.sqrt(2))
    return float(out) if out.ndim == 0 else out
