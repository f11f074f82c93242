"""Four-level effective model for pump-probe g2 spectroscopy.

Two lasers address a pair of ladder transitions. After moving to a frame
co-rotating with both lasers and time-averaging the fast-rotating parts of
the noise terms, the dynamics reduce to a time-independent four-level master
equation with eight single-jump Lindblad operators. Couplings and jump
prefactors carry the leading-order cavity-detuning corrections in
``delta_C / g``.

Two configurations are provided:

* ``"lower"``: basis ``(|0>, |1->, |1+>, |2+>)``; laser 1 near ``|0> -> |1->``,
  laser 2 near ``|1-> -> |2+>``.
* ``"upper"``: basis ``(|0>, |1->, |1+>, |2->)``; laser 1 near ``|0> -> |1+>``,
  laser 2 near ``|1+> -> |2->``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .hilbert import DressedLevel, FockBasis, RateSet, build_annihilation, build_sigma_minus, dressed_transform
from .liouvillian import build_liouvillian, steady_state

DEFAULT_RATIO_THRESHOLD = 0.2
SQ2 = np.sqrt(2.0)
KAPPA_JUMPS = ("k0-", "k0+", "k-2", "k+2")
GAMMA_JUMPS = ("g0-", "g0+", "g-2", "g+2")


class TwoLaserRegimeError(ValueError):
    """Drive or detuning too large compared with g for the four-level model."""


class ProbeFitError(RuntimeError):
    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


@dataclass(frozen=True)
class TwoLaserScenario:
    """Drive parameters (rad/ns) of the two-laser experiment."""

    omega1: float
    omega2: float
    delta1: float = 0.0
    delta2: float = 0.0
    delta_C: float = 0.0
    config: str = "upper"
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD
    tau_int_ps: float = 155.0  # detection interval; metadata only

    def __post_init__(self):
        if self.config not in ("lower", "upper"):
            raise ValueError("config must be 'lower' or 'upper'")
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("Rabi amplitudes must be >= 0")
        vals = (self.omega1, self.omega2, self.delta1, self.delta2, self.delta_C)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("scenario parameters must be finite")

    def check_regime(self, rates: RateSet):
        names = ("omega1", "omega2", "delta1", "delta2", "delta_C")
        bad = [n for n in names if abs(getattr(self, n)) > self.ratio_threshold * rates.g]
        if bad:
            raise TwoLaserRegimeError(
                f"{', '.join(bad)} exceed {self.ratio_threshold} g = {self.ratio_threshold * rates.g:.4g} rad/ns")

    def with_(self, **kw):
        return replace(self, **kw)


@dataclass(frozen=True)
class EffectiveModel:
    H: np.ndarray
    lindblads: dict = field(repr=False)
    basis_labels: tuple = ()

    @property
    def kappa_ops(self):
        return [self.lindblads[k] for k in KAPPA_JUMPS]

    @property
    def all_ops(self):
        return [self.lindblads[k] for k in KAPPA_JUMPS + GAMMA_JUMPS]

    @property
    def liouvillian(self):
        return build_liouvillian(self.H, self.all_ops)


def _jump(i, j):
    t = np.zeros((4, 4), dtype=complex)
    t[i, j] = 1.0
    return t


def effective_coefficients(config, g, delta_C):
    """Leading-order coupling and jump prefactors of the effective model.

    Returns a dict with the four drive couplings per unit Rabi amplitude
    (keys ``"h01", "h02", "h13", "h23"``) and the eight jump prefactors
    without the ``sqrt(rate)`` factor (keys as in ``KAPPA_JUMPS`` and
    ``GAMMA_JUMPS``).
    """
    e = delta_C / g
    a = e / (4 * SQ2)
    b = e / (8 * SQ2)
    if config == "lower":
        return {
            "h01": 1 / SQ2 - a,
            "h02": 1 / SQ2 + a,
            "h13": -b - 0.5 + 1 / SQ2,
            "h23": b + 0.5 + 1 / SQ2,
            "k0-": 1 / SQ2 - a,
            "k0+": 1 / SQ2 + a,
            "k-2": 1 / SQ2 - 0.5 - b,
            "k+2": 1 / SQ2 + 0.5 + b,
            "g0-": -(1 / SQ2 + a),
            "g0+": 1 / SQ2 - a,
            "g-2": 0.5 - (2 + SQ2) * e / 16,
            "g+2": 0.5 + (2 - SQ2) * e / 16,
        }
    if config == "upper":
        return {
            "h01": 1 / SQ2 - a,
            "h02": 1 / SQ2 + a,
            "h13": -b + 0.5 + 1 / SQ2,
            "h23": b - 0.5 + 1 / SQ2,
            "k0-": 1 / SQ2 - a,
            "k0+": 1 / SQ2 + a,
            "k-2": 1 / SQ2 + 0.5 - b,
            "k+2": 1 / SQ2 - 0.5 + b,
            "g0-": -(1 / SQ2 + a),
            "g0+": 1 / SQ2 - a,
            "g-2": -(0.5 - (2 - SQ2) * e / 16),
            "g+2": -(0.5 + (2 + SQ2) * e / 16),
        }
    raise ValueError(config)


def build_effective_model(s: TwoLaserScenario, rates: RateSet, check=True) -> EffectiveModel:
    """Hamiltonian and Lindblad operators of the four-level model for ``s``."""
    if check:
        s.check_regime(rates)
    g, dC = rates.g, s.delta_C
    c = effective_coefficients(s.config, g, dC)
    H = np.zeros((4, 4), dtype=complex)
    if s.config == "lower":
        # |0>-|1-> by laser 1, |0>-|1+> by laser 2, |1->-|2+> by laser 2, |1+>-|2+> by laser 1
        H[0, 1] = c["h01"] * s.omega1
        H[0, 2] = c["h02"] * s.omega2
        H[1, 3] = c["h13"] * s.omega2
        H[2, 3] = c["h23"] * s.omega1
        diag = [0.0, dC / 2 - s.delta1, -SQ2 * g - s.delta2 + dC / 2, -s.delta1 - s.delta2 + 1.5 * dC]
        labels = ("0", "1-", "1+", "2+")
    else:
        # |0>-|1-> by laser 2, |0>-|1+> by laser 1, |1->-|2-> by laser 1, |1+>-|2-> by laser 2
        H[0, 1] = c["h01"] * s.omega2
        H[0, 2] = c["h02"] * s.omega1
        H[1, 3] = c["h13"] * s.omega1
        H[2, 3] = c["h23"] * s.omega2
        diag = [0.0, SQ2 * g - s.delta2 + dC / 2, dC / 2 - s.delta1, -s.delta1 - s.delta2 + 1.5 * dC]
        labels = ("0", "1-", "1+", "2-")
    H = H + H.conj().T + np.diag(diag)
    pairs = {"0-": (0, 1), "0+": (0, 2), "-2": (1, 3), "+2": (2, 3)}
    lind = {}
    for key, (i, j) in pairs.items():
        lind["k" + key] = np.sqrt(rates.kappa) * c["k" + key] * _jump(i, j)
        lind["g" + key] = np.sqrt(rates.gamma) * c["g" + key] * _jump(i, j)
    return EffectiveModel(H, lind, labels)


def count_and_coincidence_rates(model: EffectiveModel):
    """Steady-state cavity count rate ``p_S`` and coincidence rate ``p_C``."""
    rho = steady_state(model.liouvillian)
    ks = model.kappa_ops
    p_s = sum(np.trace(L @ rho @ L.conj().T).real for L in ks)
    p_c = 0.0
    for La in ks:
        inner = La @ rho @ La.conj().T
        for Lb in ks:
            p_c += np.trace(Lb @ inner @ Lb.conj().T).real
    return float(p_s), float(p_c)


@dataclass(frozen=True)
class G2SpectroscopyScan:
    delta2: np.ndarray
    signal: np.ndarray  # eta_det * p_S, counts per ns
    g2: np.ndarray
    p_s: np.ndarray
    p_c: np.ndarray

    @property
    def peak_index(self):
        return int(np.argmax(self.g2))

    @property
    def peak_delta2(self):
        return float(self.delta2[self.peak_index])


def _map(fn, items, threads):
    if threads is None or threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def g2_spectroscopy_scan(s: TwoLaserScenario, rates: RateSet, delta2_grid, eta_det=0.1, threads=None):
    """Signal ``eta_det p_S`` and ``g2 = p_C / p_S^2`` versus the probe detuning."""
    d2 = np.asarray(delta2_grid, dtype=float)
    if not np.all(np.isfinite(d2)):
        raise ValueError("delta2 grid must be finite")

    def one(x):
        return count_and_coincidence_rates(build_effective_model(s.with_(delta2=float(x)), rates))

    res = np.array(_map(one, d2, threads))
    p_s, p_c = res[:, 0], res[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = np.where(p_s > 0, p_c / p_s**2, np.nan)
    return G2SpectroscopyScan(d2, eta_det * p_s, g2, p_s, p_c)


def predicted_peak(s: TwoLaserScenario):
    """Probe detuning at which ``|0> -> |2>`` is two-laser resonant: ``3 delta_C / 2 - delta1``."""
    return 1.5 * s.delta_C - s.delta1


@dataclass
class ProbeFit:
    omega2: float
    eta_det: float
    residual_norm: float
    nfev: int


def fit_probe_rabi(delta2, signal, s: TwoLaserScenario, rates: RateSet, omega2_guess=None, eta_guess=0.1):
    """Least-squares estimate of ``(Omega_2, eta_det)`` from the signal versus probe detuning."""
    d2 = np.asarray(delta2, dtype=float)
    y = np.asarray(signal, dtype=float)
    if d2.size < 8 or d2.shape != y.shape:
        raise ProbeFitError("need at least 8 (delta2, signal) pairs of equal length")
    if not np.all(np.isfinite(y)) or np.ptp(y) <= 1e-12 * max(np.abs(y).max(), 1e-300):
        raise ProbeFitError("flat or non-finite signal carries no probe information")
    om0 = omega2_guess if omega2_guess is not None else 0.1 * rates.g
    scale = np.abs(y).max()

    def model(theta):
        om2, eta = theta
        sc = s.with_(omega2=float(om2))
        return eta * np.array([count_and_coincidence_rates(build_effective_model(sc.with_(delta2=x), rates, check=False))[0] for x in d2])

    def resid(theta):
        return (model(theta) - y) / scale

    s.with_(omega2=om0).check_regime(rates)
    try:
        res = optimize.least_squares(resid, [om0, eta_guess], bounds=([0.0, 0.0], [s.ratio_threshold * rates.g, 1.0]),
                                     x_scale=[om0, eta_guess], xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=500)
    except Exception as exc:  # noqa: BLE001 - surface any solver failure uniformly
        raise ProbeFitError(f"probe fit failed: {exc}") from exc
    if res.status <= 0:
        raise ProbeFitError(f"probe fit did not converge: {res.message}", best=res.x)
    return ProbeFit(float(res.x[0]), float(res.x[1]), float(np.linalg.norm(res.fun) * scale), int(res.nfev))


def exact_dressed_elements(config, rates: RateSet, delta_C):
    """Moduli of the exact dressed-basis elements of ``a`` and ``|g><e|`` for the four-level subspace.

    Used to check the leading-order prefactors of :func:`effective_coefficients`.
    Keys match those of :func:`effective_coefficients`.
    """
    basis = FockBasis(3)
    U = dressed_transform(basis, rates, delta_C)
    a = U.conj().T @ build_annihilation(basis) @ U
    sm = U.conj().T @ build_sigma_minus(basis) @ U
    # dressed column order: 0, 1+, 1-, 2+, 2-
    idx = {"0": 0, "1+": 1, "1-": 2, "2+": 3, "2-": 4}
    top = "2+" if config == "lower" else "2-"
    pairs = {"0-": ("0", "1-"), "0+": ("0", "1+"), "-2": ("1-", top), "+2": ("1+", top)}
    out = {}
    for key, (lo, hi) in pairs.items():
        out["k" + key] = abs(a[idx[lo], idx[hi]])
        out["g" + key] = abs(sm[idx[lo], idx[hi]])
    out["h01"], out["h02"] = out["k0-"], out["k0+"]
    out["h13"], out["h23"] = out["k-2"], out["k+2"]
    return out


def effective_level_energies(config, rates: RateSet, delta_C):
    """Exact dressed energies of the four levels of ``config`` (lab frame, omega_0 = 0)."""
    from .hilbert import dressed_energy

    top = DressedLevel(2, 1 if config == "lower" else -1)
    return np.array([0.0, dressed_energy(DressedLevel(1, -1), rates, delta_C),
                     dressed_energy(DressedLevel(1, 1), rates, delta_C), dressed_energy(top, rates, delta_C)])
