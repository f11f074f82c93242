import csv

import numpy as np
import pytest

from jcsim.correlator import (
    CorrelationError,
    CorrelationTrace,
    FitError,
    SpectrumScan,
    dominant_frequency,
    emission_rate,
    fft_peaks,
    find_spectrum_peaks,
    fit_jc_spectrum,
    g2_tau,
    g2_zero_direct,
    g2_zero_smoothed,
    spectrum_scan,
    system_g2,
    tau_grid_ps,
    weak_drive_response,
    write_scan_csv,
    write_trace_csv,
)
from jcsim.hilbert import RateSet
from jcsim.liouvillian import DrivenSystem

TAU = tau_grid_ps(3000, 4)
T_NS = TAU * 1e-3


def _trace(values):
    return CorrelationTrace(TAU, values)


def test_trace_validation():
    with pytest.raises(CorrelationError):
        CorrelationTrace(np.array([1.0, 2.0, 3.0]), np.ones(3))
    with pytest.raises(CorrelationError):
        CorrelationTrace(np.array([0.0, 1.0, 3.0]), np.ones(3))
    with pytest.raises(CorrelationError):
        CorrelationTrace(TAU, np.ones(3))
    tr = _trace(np.ones_like(TAU))
    assert tr.step_ps == pytest.approx(4.0)
    assert tr.g2_zero == 1.0


def test_coherent_cavity_field_is_poissonian():
    # emitter effectively decoupled: a driven damped cavity holds a coherent state
    s = DrivenSystem(RateSet(1e-4, 2.0, 1.0), 8, 0.0, 0.0, 0.3)
    tr = system_g2(s, tau_grid_ps(2000, 10))
    np.testing.assert_allclose(tr.values, 1.0, atol=1e-8)


def test_regression_trace_limits(paper_rates):
    s = DrivenSystem(paper_rates, 6, 0.0, -paper_rates.g / np.sqrt(2), paper_rates.g / 40)
    # the two-photon resonance has a slow tail; go well past it
    tr = system_g2(s, tau_grid_ps(30000, 20))
    assert tr.values[0] == pytest.approx(g2_zero_direct(s.steady_state, s.a), rel=1e-10)
    assert tr.values[-1] == pytest.approx(1.0, abs=1e-3)
    assert emission_rate(s.steady_state, paper_rates) == pytest.approx(paper_rates.kappa * s.photon_number)


def test_quantum_regression_matches_direct_propagation(unit_rates):
    from jcsim.liouvillian import propagate

    s = DrivenSystem(unit_rates, 4, 0.0, -1.0, 0.1)
    a, rho = s.a, s.steady_state
    tau_ps = np.array([0.0, 500.0, 1000.0])
    tr = g2_tau(s.liouvillian, rho, a, tau_ps)
    n = np.trace(a.conj().T @ a @ rho).real
    cond = propagate(s.liouvillian, a @ rho @ a.conj().T, 1.0)
    assert tr.values[2] == pytest.approx(np.trace(a.conj().T @ a @ cond).real / n**2, rel=1e-9)


def test_smoothing_keeps_slow_and_removes_fast_components():
    assert g2_zero_smoothed(_trace(np.ones_like(TAU))) == pytest.approx(1.0, abs=1e-12)
    slow = g2_zero_smoothed(_trace(1 + np.cos(2 * np.pi * 5 * T_NS)))
    assert slow == pytest.approx(2.0, abs=0.03)
    fast = g2_zero_smoothed(_trace(1 + np.cos(2 * np.pi * 40 * T_NS)))
    assert fast == pytest.approx(1.0, abs=0.01)


def test_fft_peaks_recover_damped_cosines():
    v = 1 + np.exp(-T_NS) * (np.cos(2 * np.pi * 5 * T_NS) + 0.5 * np.cos(2 * np.pi * 2 * T_NS))
    pk = fft_peaks(_trace(v))
    assert pk.bin_ghz == pytest.approx(1 / 3.004, rel=1e-3)
    np.testing.assert_allclose(pk.frequencies_ghz, [2.0, 5.0], atol=0.2 * pk.bin_ghz)
    assert pk.amplitudes[1] > pk.amplitudes[0]
    assert dominant_frequency(_trace(v)) == pytest.approx(5.0, abs=0.05)
    assert pk.nearest(5.1) < 1
    assert fft_peaks(_trace(np.ones_like(TAU))).frequencies_ghz.size == 0
    with pytest.raises(CorrelationError):
        fft_peaks(CorrelationTrace(TAU[:100], v[:100]))


def test_weak_drive_spectrum_peaks_at_polaritons(unit_rates):
    dL = np.linspace(-2, 2, 201)
    sc = spectrum_scan(unit_rates, dL, 1e-3, n_max=3)
    pk = find_spectrum_peaks(dL, sc.row())
    np.testing.assert_allclose(pk, [-1, 1], atol=0.02)
    lin = weak_drive_response(dL, 0.0, unit_rates.g, unit_rates.kappa, unit_rates.gamma)
    np.testing.assert_allclose(sc.row() / sc.row().max(), lin / lin.max(), atol=2e-3)


def test_spectrum_scan_threads_are_deterministic(unit_rates):
    dL = np.linspace(-2, 2, 17)
    a = spectrum_scan(unit_rates, dL, 0.05, [0.0, 0.5], n_max=3)
    b = spectrum_scan(unit_rates, dL, 0.05, [0.0, 0.5], n_max=3, threads=4)
    np.testing.assert_array_equal(a.signal, b.signal)
    assert a.signal.shape == (2, 17)
    c = spectrum_scan(unit_rates, dL, lambda x: 0.05, [0.0, 0.5], n_max=3)
    np.testing.assert_array_equal(a.signal, c.signal)


def _synthetic_scan(rates, amp=2.0, noise=0.0, seed=0):
    dL = np.linspace(-2.5, 2.5, 121)
    dC = np.array([-0.4, 0.0, 0.4])
    sig = np.array([amp * weak_drive_response(dL, c, rates.g, rates.kappa, rates.gamma) for c in dC])
    if noise:
        sig = sig + noise * sig.max() * np.random.default_rng(seed).standard_normal(sig.shape)
    return SpectrumScan(dL, dC, sig)


def test_fit_recovers_rates():
    true = RateSet(1.0, 0.19, 0.07)
    rep = fit_jc_spectrum(_synthetic_scan(true), RateSet(0.8, 0.3, 0.12))
    assert rep.rates.g == pytest.approx(1.0, rel=1e-6)
    assert rep.rates.kappa == pytest.approx(0.19, rel=1e-5)
    assert rep.rates.gamma == pytest.approx(0.07, rel=1e-5)
    assert rep.amplitude == pytest.approx(2.0, rel=1e-5)


def test_fit_uncertainty_covers_truth():
    true = RateSet(1.0, 0.19, 0.07)
    rep = fit_jc_spectrum(_synthetic_scan(true, noise=0.01, seed=3), RateSet(0.8, 0.3, 0.12))
    got = np.log([rep.rates.g, rep.rates.kappa, rep.rates.gamma])
    z = np.abs(got - np.log([1.0, 0.19, 0.07])) / rep.stderr[:3]
    assert np.all(z < 4)
    assert np.all(rep.stderr[:3] > 0)


def test_fit_rejects_bad_input():
    dL = np.linspace(-1, 1, 10)
    with pytest.raises(FitError):
        fit_jc_spectrum(SpectrumScan(dL, np.array([0.0]), np.ones((1, 10))), RateSet(1, 0.1, 0.1))
    dL = np.linspace(-1, 1, 40)
    with pytest.raises(FitError):
        fit_jc_spectrum(SpectrumScan(dL, np.array([0.0]), np.ones((1, 40))), RateSet(1, 0.1, 0.1))
    bad = np.ones((1, 40))
    bad[0, 3] = np.nan
    with pytest.raises(FitError):
        fit_jc_spectrum(SpectrumScan(dL, np.array([0.0]), bad), RateSet(1, 0.1, 0.1))


def test_csv_writers(tmp_path):
    tr = _trace(np.linspace(2, 1, TAU.size))
    write_trace_csv(tmp_path / "t.csv", tr)
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert rows[0] == ["tau_ps", "g2"] and float(rows[1][1]) == 2.0 and len(rows) == TAU.size + 1
    sc = SpectrumScan(np.array([-2 * np.pi, 2 * np.pi]), np.array([0.0]), np.array([[1e-3, 2e-3]]))
    write_scan_csv(tmp_path / "s.csv", sc)
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert rows[0] == ["delta_L_GHz", "delta_C_GHz", "signal_cts_per_s"]
    assert float(rows[1][0]) == pytest.approx(-1.0) and float(rows[2][2]) == pytest.approx(2e6)
