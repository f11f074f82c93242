"""Emission rates, g2(tau) by quantum regression, smoothing, FFT peaks and spectra.

Delays are handled in picoseconds at the interface and converted to ns
(the time unit matching rad/ns rates) internally. FFT frequencies are
ordinary frequencies in GHz.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal

from .hilbert import FockBasis, RateSet, build_annihilation
from .liouvillian import DrivenSystem, evolve_on_grid, expect, vectorize

SMOOTH_BIN_PS = 16.0
SMOOTH_CUTOFF_GHZ = 14.0
DEFAULT_STEP_PS = 4.0
DEFAULT_SPAN_PS = 3000.0
DEFAULT_ETA_DET = 0.12


class CorrelationError(ValueError):
    """g2 is undefined (no emission) or the delay grid is unusable."""


class FitError(RuntimeError):
    """Spectrum fit did not converge; ``best`` holds the best parameters found."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


@dataclass(frozen=True)
class CorrelationTrace:
    """g2 sampled on a uniform delay grid starting at zero delay."""

    tau_ps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau_ps, dtype=float)
        if tau.ndim != 1 or tau.size < 2 or tau.shape != np.shape(self.values):
            raise CorrelationError("tau grid and values must be 1-D arrays of equal length >= 2")
        steps = np.diff(tau)
        if abs(tau[0]) > 1e-9 or np.ptp(steps) > 1e-6 * steps[0] or steps[0] <= 0:
            raise CorrelationError("tau grid must be uniform and start at 0")

    @property
    def step_ps(self):
        return float(self.tau_ps[1] - self.tau_ps[0])

    @property
    def g2_zero(self):
        return float(self.values[0])


@dataclass(frozen=True)
class FftPeaks:
    frequencies_ghz: np.ndarray
    amplitudes: np.ndarray
    bin_ghz: float
    nyquist_ghz: float

    def nearest(self, f_ghz):
        """Distance in bins from ``f_ghz`` to the closest extracted peak."""
        if len(self.frequencies_ghz) == 0:
            return np.inf
        return float(np.min(np.abs(self.frequencies_ghz - f_ghz)) / self.bin_ghz)


@dataclass(frozen=True)
class SpectrumScan:
    """Detected rate on a (delta_C, delta_L) grid; ``signal[i, j]`` belongs to ``delta_C[i], delta_L[j]``."""

    delta_L: np.ndarray
    delta_C: np.ndarray
    signal: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def row(self, i=0):
        return self.signal[i]


def tau_grid_ps(span_ps=DEFAULT_SPAN_PS, step_ps=DEFAULT_STEP_PS):
    n = int(round(span_ps / step_ps))
    return np.arange(n + 1) * step_ps


def emission_rate(rho, rates: RateSet, a=None):
    """Cavity emission rate ``kappa <a^dag a>`` (photons per ns)."""
    if a is None:
        a = build_annihilation(FockBasis.from_dim(rho.shape[0]))
    return float(rates.kappa * expect(a.conj().T @ a, rho).real)


def g2_zero_direct(rho, c):
    """``<c^dag^2 c^2> / <c^dag c>^2`` evaluated on ``rho``."""
    cd = c.conj().T
    n1 = expect(cd @ c, rho).real
    if n1 <= 0:
        raise CorrelationError("zero mean intensity; g2 undefined")
    return float(expect(cd @ cd @ c @ c, rho).real / n1**2)


def g2_tau(D, rho, c, tau_ps) -> CorrelationTrace:
    """Intensity correlation of the field ``c`` by quantum regression.

    ``g2(tau) = tr(c^dag c exp(D tau)[c rho c^dag]) / tr(c^dag c rho)^2``.
    ``c`` may be a displaced field operator (containing a multiple of the
    identity); the formula stays exact for coherent admixtures.
    """
    tau_ps = np.asarray(tau_ps, dtype=float)
    cd = c.conj().T
    n_op = cd @ c
    mean = expect(n_op, rho).real
    if not mean > 0:
        raise CorrelationError("zero mean intensity; g2 undefined for an undriven system")
    steps = np.diff(tau_ps)
    if tau_ps[0] != 0 or np.ptp(steps) > 1e-6 * steps[0]:
        raise CorrelationError("tau grid must be uniform and start at 0")
    dt_ns = steps[0] * 1e-3
    jumped = c @ rho @ cd
    states = evolve_on_grid(D, jumped, dt_ns, tau_ps.size - 1)
    # tr(N X) = sum_ij N_ji X_ij = vec(N^T) . vec(X) in row-major order
    readout = vectorize(n_op.T)
    values = (states @ readout).real / mean**2
    return CorrelationTrace(tau_ps, values)


def system_g2(system: DrivenSystem, tau_ps, c=None) -> CorrelationTrace:
    """Convenience wrapper using the cached steady state of ``system``."""
    return g2_tau(system.liouvillian, system.steady_state, system.a if c is None else c, tau_ps)


def _rebin(trace: CorrelationTrace, bin_ps):
    step = trace.step_ps
    if step > bin_ps + 1e-9:
        raise CorrelationError(f"grid step {step} ps is coarser than the {bin_ps} ps smoothing bin")
    m = bin_ps / step
    if abs(m - round(m)) > 1e-6:
        raise CorrelationError(f"grid step {step} ps does not divide the {bin_ps} ps bin")
    m = int(round(m))
    v = trace.values
    # g2 is even in tau for a stationary field; mirror for negative delays
    full = np.concatenate([v[:0:-1], v])
    centre = v.size - 1
    if m == 1:
        weights, half = np.ones(1), 0
    elif m % 2 == 0:
        half = m // 2
        weights = np.ones(m + 1)
        weights[[0, -1]] = 0.5
        weights /= m
    else:
        half = m // 2
        weights = np.ones(m) / m
    n_bins = (v.size - 1 - half) // m
    if n_bins < 2:
        raise CorrelationError("trace too short for rebinning")
    out = np.empty(n_bins + 1)
    for k in range(n_bins + 1):
        i = centre + k * m
        out[k] = weights @ full[i - half : i + half + 1]
    return out


def g2_zero_smoothed(trace: CorrelationTrace, bin_ps=SMOOTH_BIN_PS, cutoff_ghz=SMOOTH_CUTOFF_GHZ):
    """Zero-delay g2 after rebinning and a hard low-pass filter.

    The trace is rebinned to ``bin_ps``, mirrored to negative delays, Fourier
    transformed, stripped of components above ``cutoff_ghz`` and transformed
    back; the value at zero delay is returned.
    """
    binned = _rebin(trace, bin_ps)
    sym = np.concatenate([binned, binned[-2:0:-1]])
    spec = np.fft.rfft(sym)
    f = np.fft.rfftfreq(sym.size, d=bin_ps * 1e-3)
    spec[f > cutoff_ghz] = 0
    return float(np.fft.irfft(spec, n=sym.size)[0])


def fft_peaks(trace: CorrelationTrace, prominence=0.1, min_samples=256, pad_factor=8, tail_fraction=0.1) -> FftPeaks:
    """Local maxima of the magnitude spectrum of ``g2(tau) - g2(inf)``.

    The long-delay level is estimated as the mean over the last
    ``tail_fraction`` of the trace and subtracted, so the trace ends near
    zero and truncation adds no sinc ripple. The transform is zero-padded
    by ``pad_factor`` and each maximum is refined by a parabola through its
    three samples; ``bin_ghz`` still reports the native resolution
    ``1 / span``. Maxima inside the first native bin (the DC lobe of the
    decay envelope) are ignored, and a peak is kept when its prominence is
    at least ``prominence`` times the largest prominence found.
    """
    v = np.asarray(trace.values, dtype=float)
    if v.size < min_samples:
        raise CorrelationError(f"need at least {min_samples} samples for FFT peaks, got {v.size}")
    dt_ns = trace.step_ps * 1e-3
    pad = max(int(pad_factor), 1)
    n_fft = v.size * pad
    tail = v[-max(int(tail_fraction * v.size), 1) :].mean()
    mag = np.abs(np.fft.rfft(v - tail, n=n_fft))
    freqs = np.fft.rfftfreq(n_fft, d=dt_ns)
    df = freqs[1]
    native = 1.0 / (v.size * dt_ns)
    body = mag[pad:]
    padded = np.concatenate([[np.inf], body, [0.0]])
    idx, props = signal.find_peaks(padded, prominence=0.0)
    if idx.size:
        keep = props["prominences"] >= prominence * props["prominences"].max()
        idx = idx[keep]
    idx = idx - 1 + pad
    fpk, apk = [], []
    for i in idx:
        if 0 < i < mag.size - 1:
            y0, y1, y2 = mag[i - 1], mag[i], mag[i + 1]
            den = y0 - 2 * y1 + y2
            shift = 0.5 * (y0 - y2) / den if den != 0 else 0.0
            fpk.append(freqs[i] + shift * df)
            apk.append(y1 - 0.25 * (y0 - y2) * shift)
        else:
            fpk.append(freqs[i])
            apk.append(mag[i])
    return FftPeaks(np.array(fpk), np.array(apk), float(native), float(freqs[-1]))


def dominant_frequency(trace: CorrelationTrace) -> float:
    peaks = fft_peaks(trace)
    return float(peaks.frequencies_ghz[np.argmax(peaks.amplitudes)])


def _map(fn, items, threads):
    if threads is None or threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def detected_photon_flux(system: DrivenSystem, background=None):
    """Mean intensity ``<c^dag c>`` at the detector for ``system``'s steady state."""
    if background is None:
        return system.photon_number
    from .detection import phase_resolved_intensity

    return phase_resolved_intensity(system, background)


def spectrum_scan(
    rates: RateSet,
    delta_L_grid,
    omega_rabi,
    delta_C_grid=(0.0,),
    background=None,
    eta_det=DEFAULT_ETA_DET,
    n_max=15,
    threads=None,
) -> SpectrumScan:
    """Detected rate ``eta_det kappa <c^dag c>`` (counts/ns) over laser and cavity detunings.

    ``omega_rabi`` may be a scalar or a callable of ``delta_L`` (e.g. for a
    power ladder built elsewhere).
    """
    dL = np.asarray(delta_L_grid, dtype=float)
    dC = np.atleast_1d(np.asarray(delta_C_grid, dtype=float))
    if not (np.all(np.isfinite(dL)) and np.all(np.isfinite(dC))):
        raise ValueError("detuning grids must be finite")
    points = [(c, l) for c in dC for l in dL]

    def one(p):
        c, l = p
        om = omega_rabi(l) if callable(omega_rabi) else omega_rabi
        s = DrivenSystem(rates, n_max, c, l, om)
        return eta_det * rates.kappa * detected_photon_flux(s, background)

    sig = np.array(_map(one, points, threads)).reshape(dC.size, dL.size)
    return SpectrumScan(dL, dC, np.clip(sig, 0.0, None), {"eta_det": eta_det, "omega_rabi": omega_rabi if np.isscalar(omega_rabi) else None})


def find_spectrum_peaks(delta_L, signal_row, rel_prominence=0.05):
    """Laser detunings of local maxima in one spectrum row, refined by a parabola."""
    y = np.asarray(signal_row, dtype=float)
    x = np.asarray(delta_L, dtype=float)
    idx, _ = signal.find_peaks(y, prominence=rel_prominence * y.max())
    out = []
    for i in idx:
        if 0 < i < y.size - 1:
            y0, y1, y2 = y[i - 1 : i + 2]
            den = y0 - 2 * y1 + y2
            shift = 0.5 * (y0 - y2) / den if den != 0 else 0.0
            out.append(x[i] + shift * (x[1] - x[0]))
        else:
            out.append(x[i])
    return np.array(out)


def weak_drive_response(delta_L, delta_C, g, kappa, gamma):
    """Intracavity ``|<a>|^2`` per unit drive in the linear-response limit."""
    dL = np.asarray(delta_L, dtype=float)
    amp = 1j / (g**2 / (1j * dL - gamma / 2) - kappa / 2 - 1j * (delta_C - dL))
    return np.abs(amp) ** 2


@dataclass
class FitReport:
    rates: RateSet
    amplitude: float
    offset: float
    residual_norm: float
    covariance: np.ndarray
    nfev: int

    @property
    def stderr(self):
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))


def _model(theta, dL, dC):
    lg, lk, lgm, la, off = theta
    g, k, gm, amp = np.exp([lg, lk, lgm, la])
    return np.concatenate([amp * weak_drive_response(dL, c, g, k, gm) + off for c in dC])


def fit_jc_spectrum(scan: SpectrumScan, initial: RateSet, max_iter=4000, restarts=2) -> FitReport:
    """Fit ``(g, kappa, gamma, amplitude, offset)`` of the weak-drive model to a scan.

    Nelder-Mead on log-rates (restarted from its own optimum) gets close,
    then a finite-difference least-squares polish refines the optimum and
    provides the curvature used for the covariance estimate.
    """
    data = np.asarray(scan.signal, dtype=float).ravel()
    n_par = 5
    if data.size < 3 * n_par:
        raise FitError(f"need >= {3 * n_par} points to fit {n_par} parameters, got {data.size}")
    if not np.all(np.isfinite(data)):
        raise FitError("non-finite data")
    if np.ptp(data) <= 1e-12 * max(1.0, np.abs(data).max()):
        raise FitError("flat input spectrum carries no lineshape information")
    dL, dC = scan.delta_L, scan.delta_C
    shape0 = np.concatenate([weak_drive_response(dL, c, initial.g, initial.kappa, initial.gamma) for c in dC])
    amp0 = max(np.ptp(data) / max(shape0.max(), 1e-300), 1e-300)
    theta = np.array([np.log(initial.g), np.log(initial.kappa), np.log(initial.gamma), np.log(amp0), data.min()])
    scale = np.abs(data).max()

    def resid(t):
        return (_model(t, dL, dC) - data) / scale

    def cost(t):
        r = resid(t)
        return float(r @ r) if np.all(np.isfinite(r)) else np.inf

    best = theta
    for _ in range(restarts + 1):
        res = optimize.minimize(cost, best, method="Nelder-Mead",
                                options={"maxiter": max_iter, "xatol": 1e-10, "fatol": 1e-16})
        if res.fun <= cost(best):
            best = res.x
    lsq = optimize.least_squares(resid, best, method="lm", max_nfev=max_iter * n_par, x_scale="jac")
    if not lsq.success and lsq.status <= 0:
        raise FitError(f"least-squares polish failed: {lsq.message}", best=best)
    theta = lsq.x
    J = lsq.jac
    r = lsq.fun
    dof = max(data.size - n_par, 1)
    try:
        cov = np.linalg.pinv(J.T @ J) * (r @ r) / dof
    except np.linalg.LinAlgError:
        cov = np.full((n_par, n_par), np.nan)
    g, k, gm, amp = np.exp(theta[:4])
    return FitReport(RateSet(g, k, gm), float(amp), float(theta[4]), float(np.linalg.norm(r) * scale), cov, int(lsq.nfev))


def write_trace_csv(path, trace: CorrelationTrace):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["tau_ps", "g2"])
        for t, v in zip(trace.tau_ps, trace.values):
            w.writerow([repr(float(t)), repr(float(v))])
    return os.fspath(path)


def write_scan_csv(path, scan: SpectrumScan):
    from .hilbert import rad_per_ns_to_ghz

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["delta_L_GHz", "delta_C_GHz", "signal_cts_per_s"])
        for i, c in enumerate(scan.delta_C):
            for j, l in enumerate(scan.delta_L):
                # counts/ns -> counts/s
                w.writerow([repr(rad_per_ns_to_ghz(l)), repr(rad_per_ns_to_ghz(c)), repr(float(scan.signal[i, j]) * 1e9)])
    return os.fspath(path)
