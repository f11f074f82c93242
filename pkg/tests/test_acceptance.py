"""Acceptance criteria 1-13.

Each test records a one-line verdict (shown in the pytest terminal summary,
or printed when this file is run as a script) before asserting.
Criterion 7 fails: the closed-form two-photon model omits re-emission from the
first rung, which lowers g2 by more than its tolerance allows.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from jcsim import analytic as an
from jcsim.config import PRESET_DIR, ScenarioConfig, list_presets, make_grid
from jcsim.correlator import (
    dominant_frequency, fft_peaks, find_spectrum_peaks, g2_tau, g2_zero_direct, g2_zero_smoothed, spectrum_scan,
    system_g2, tau_grid_ps,
)
from jcsim.detection import (
    DetectorModel, coherent_npnr_g2, detected_g2_tau, detected_g2_zero, npnr_click_probability,
    npnr_coincidence_probability,
)
from jcsim.hilbert import DressedLevel, RateSet, dressed_energy, ghz_to_rad_per_ns, matrix_element_ratio
from jcsim.liouvillian import DrivenSystem, evolve_on_grid, spectral_gap, steady_state, vectorize
from jcsim.tmm import (
    LayerStack, load_stack, quarter_wave_reflectance, quarter_wave_stack, stack_spectrum, stopband_center,
)
from jcsim.twolaser import build_effective_model, g2_spectroscopy_scan

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

G = 2 * np.pi * 3.45
PAPER = RateSet.from_ratios(G, 5.3, 14.0)


def record(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _random_state(rng, dim):
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


def test_criterion_01_liouvillian_integrity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240101)
    worst = {"trace": 0.0, "herm": 0.0, "min_eig": np.inf}
    for _ in range(10):
        rates = RateSet(1.0, rng.uniform(0.05, 0.5), rng.uniform(0.01, 0.3))
        s = DrivenSystem(rates, int(rng.integers(3, 7)), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.01, 0.5))
        dim = s.basis.dim
        t_end = 20.0 / rates.kappa
        traj = evolve_on_grid(s.liouvillian, _random_state(rng, dim), t_end / 200, 200)
        for v in traj:
            rho = v.reshape(dim, dim)
            worst["trace"] = max(worst["trace"], abs(np.trace(rho) - 1))
            worst["herm"] = max(worst["herm"], np.abs(rho - rho.conj().T).max())
            worst["min_eig"] = min(worst["min_eig"], np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    dt = time.perf_counter() - t0
    ok = worst["trace"] < 1e-9 and worst["herm"] < 1e-9 and worst["min_eig"] >= -1e-7 and dt < 60
    record(1, ok, f"max|tr-1|={worst['trace']:.1e} max|rho-rho^dag|={worst['herm']:.1e} "
                  f"min eig={worst['min_eig']:.1e} runtime={dt:.1f}s")
    assert ok


def _preset_systems():
    for name in list_presets():
        cfg = ScenarioConfig.load(name)
        if "system" not in cfg.raw:
            continue
        if "g2spec" in cfg.raw:
            from jcsim.cli import _scenario

            sc = _scenario(cfg)
            for d2 in ghz_to_rad_per_ns(make_grid(cfg.block("g2spec")["delta2_GHz"])):
                yield name, build_effective_model(sc.with_(delta2=float(d2)), cfg.rates).liouvillian, cfg.rates
            continue
        if "drive" not in cfg.raw:
            continue
        powers = cfg.block("spectrum").get("power_nW") or []
        for om in [cfg.omega] + [cfg.omega_for_power(p) for p in powers]:
            yield name, DrivenSystem(cfg.rates, cfg.n_max, cfg.delta_C, cfg.delta_L, om).liouvillian, cfg.rates


def test_criterion_02_steady_state_residual_and_uniqueness():
    worst_res, worst_gap, names, count = 0.0, np.inf, set(), 0
    for name, D, rates in _preset_systems():
        rho = steady_state(D)
        worst_res = max(worst_res, np.linalg.norm(D @ vectorize(rho)))
        worst_gap = min(worst_gap, spectral_gap(D) / rates.kappa)
        names.add(name)
        count += 1
    ok = worst_res < 1e-10 and worst_gap > 1e-6
    record(2, ok, f"{count} operating points in {len(names)} presets: max residual={worst_res:.1e}, "
                  f"min gap={worst_gap:.3f} kappa")
    assert ok


def test_criterion_03_polariton_spectrum():
    cfg = ScenarioConfig.load("fig2")
    g = cfg.rates.g
    dL = cfg._grid("spectrum", "delta_L")
    step = dL[1] - dL[0]
    row = spectrum_scan(cfg.rates, dL, cfg.omega, [0.0], None, cfg.eta_det, cfg.n_max).row()
    pk = np.sort(find_spectrum_peaks(dL, row, 0.02))
    resonant_ok = pk.size == 2 and abs(pk[0] + g) <= step and abs(pk[1] - g) <= step

    cfg = ScenarioConfig.load("fig1c")
    dL = cfg._grid("spectrum", "delta_L")
    dC = cfg._grid("spectrum", "delta_C")
    scan = spectrum_scan(cfg.rates, dL, cfg.omega, dC, None, cfg.eta_det, cfg.n_max)
    worst_g, worst_rel, found = 0.0, 0.0, 0
    for i, c in enumerate(dC):
        p = find_spectrum_peaks(dL, scan.signal[i], 0.02)
        for s in (-1, 1):
            E = dressed_energy(DressedLevel(1, s), cfg.rates, c)
            if not dL[0] < E < dL[-1] or p.size == 0:
                continue
            d = np.min(np.abs(p - E))
            found += d < 0.1 * g
            worst_g = max(worst_g, d / g)
            worst_rel = max(worst_rel, d / abs(E))
    ok = resonant_ok and found == 2 * dC.size and worst_g < 0.01
    record(3, ok, f"peaks at {np.round(pk / g, 4)} g (step {step / g:.3f} g); {found}/{2 * dC.size} branch points, "
                  f"max |peak-E1|={worst_g * 100:.2f}% of g ({worst_rel * 100:.2f}% of |E1|)")
    assert ok


def test_criterion_04_vacuum_rabi_oscillation():
    t0 = time.perf_counter()
    cfg = ScenarioConfig.load("fig3")
    g = cfg.rates.g
    f_exp = np.sqrt(cfg.delta_C**2 + 4 * g**2) / (2 * np.pi)
    s = DrivenSystem(cfg.rates, cfg.n_max, cfg.delta_C, cfg.delta_L, cfg.omega)
    tr = system_g2(s, tau_grid_ps(cfg.block("g2")["tau_span_ps"], cfg.block("g2")["tau_step_ps"]))
    f = dominant_frequency(tr)
    sm = g2_zero_smoothed(tr)
    dt = time.perf_counter() - t0
    ok = abs(f / f_exp - 1) < 0.02 and abs(1e3 / f_exp - 220) < 0.5 and tr.g2_zero > 20 and sm > 20 and dt < 120
    record(4, ok, f"dominant {f:.3f} GHz vs {f_exp:.3f} GHz ({100 * abs(f / f_exp - 1):.2f}%), period "
                  f"{1e3 / f_exp:.1f} ps, g2(0)={tr.g2_zero:.0f}, smoothed={sm:.0f}, runtime={dt:.1f}s")
    assert ok


def test_criterion_05_blockade_bunching_and_background_shape():
    vals = {}
    for name in ("fig4b", "fig4c"):
        cfg = ScenarioConfig.load(name)
        s = DrivenSystem(cfg.rates, cfg.n_max, cfg.delta_C, cfg.delta_L, cfg.omega)
        b = cfg.block("g2")
        vals[name] = g2_zero_smoothed(system_g2(s, tau_grid_ps(b["tau_span_ps"], b["tau_step_ps"])))

    cfg = ScenarioConfig.load("fig4e")
    sweep = cfg._grid("g2", "sweep_delta_L")
    bg = cfg.background()
    bg_avg = replace(bg, phase_averaged=True)
    raw, det, det_avg = [], [], []
    for x in sweep:
        s = DrivenSystem(cfg.rates, cfg.n_max, cfg.delta_C, float(x), cfg.omega)
        raw.append(g2_zero_direct(s.steady_state, s.a))
        det.append(detected_g2_zero(s.steady_state, s.a, bg))
        det_avg.append(detected_g2_zero(s.steady_state, s.a, bg_avg))
    raw, det, det_avg = map(np.array, (raw, det, det_avg))

    def shape(curve):
        k = int(np.argmax(curve))
        return 0 < k < curve.size - 1 and curve[k] > 10 and curve[-1] < curve[k] / 5 and raw[-1] > raw[k]

    ok = vals["fig4b"] < 1 and vals["fig4c"] > 10 and shape(det) and shape(det_avg)
    k = int(np.argmax(det))
    record(5, ok, f"smoothed g2(0)={vals['fig4b']:.3f} at -g, {vals['fig4c']:.1f} at -g/sqrt2; SBR 85: detected "
                  f"max {det[k]:.1f} at {sweep[k] / cfg.rates.g:.2f} g falling to {det[-1]:.2f} at "
                  f"{sweep[-1] / cfg.rates.g:.2f} g (raw {raw[-1]:.0f}); phase-averaged max {det_avg.max():.1f}")
    assert ok


def test_criterion_06_fft_peak_trio():
    cfg = ScenarioConfig.load("fig4e")
    g = cfg.rates.g
    b = cfg.block("g2")
    tau = tau_grid_ps(b["tau_span_ps"], b["tau_step_ps"])
    bg = cfg.background()
    n_peaks, bad, hits = 0, [], np.zeros(3, int)
    for x in cfg._grid("g2", "sweep_delta_L"):
        s = DrivenSystem(cfg.rates, cfg.n_max, cfg.delta_C, float(x), cfg.omega)
        pk = fft_peaks(detected_g2_tau(s.liouvillian, s.steady_state, s.a, bg, tau), prominence=b.get("fft_prominence", 0.1))
        trio = np.array([2 * g, abs(g - x), abs(g + x)]) / (2 * np.pi)
        for f in pk.frequencies_ghz:
            d = np.abs(trio - f) / pk.bin_ghz
            n_peaks += 1
            if d.min() > 2:
                bad.append((round(x / g, 2), round(f, 2)))
            hits[d <= 2] += 1
    ok = not bad and np.all(hits > 0)
    record(6, ok, f"{n_peaks - len(bad)}/{n_peaks} peaks within 2 bins ({pk.bin_ghz:.3f} GHz) of the trio; "
                  f"hits per member (2g, |g-dL|, |g+dL|) = {hits.tolist()}" + (f"; unmatched {bad}" if bad else ""))
    assert ok


def test_criterion_07_closed_form_first_emission_rate():
    # exact part of the oracle criterion, checked separately so it is not masked by the expected failure below
    for r in (PAPER, RateSet(1.0, 0.3, 0.01), RateSet(1.0, 0.01, 0.3)):
        assert an.second_photon_rate(r, 0.0) == pytest.approx(2 * r.kappa / 3, rel=1e-12)


def test_criterion_07_oracle_equivalence():
    t0 = time.perf_counter()
    r = PAPER
    tau_ns = np.linspace(0.0, 4.0 / (r.kappa + r.gamma), 121)
    g0_dev, tau_dev, ratios = [], [], []
    for om in (r.g / 40, r.g / 30, r.g / 20):
        s = DrivenSystem(r, 10, 0.0, an.two_photon_laser_detuning(r, om), om)
        num0 = g2_zero_direct(s.steady_state, s.a)
        ana0 = an.analytic_g2_zero(r, om)
        ratios.append(num0 / ana0)
        g0_dev.append(abs(num0 / ana0 - 1))
        tr = g2_tau(s.liouvillian, s.steady_state, s.a, tau_ns * 1e3)
        tau_dev.append(np.max(np.abs(tr.values / an.analytic_g2_tau(r, om, tau_ns) - 1)))
    p0_ok = an.second_photon_rate(r, 0.0) == pytest.approx(2 * r.kappa / 3, rel=1e-12)
    dt = time.perf_counter() - t0
    ok = max(g0_dev) < 0.10 and max(tau_dev) < 0.05 and p0_ok and dt < 120
    record(7, ok, f"numeric/closed-form g2(0) = {np.round(ratios, 3).tolist()} for Omega = g/40, g/30, g/20 "
                  f"(need 0.9-1.1); max pointwise g2(tau) deviation {max(tau_dev) * 100:.0f}% (need 5%); "
                  f"p_i(0)=2kappa/3 {'exact' if p0_ok else 'WRONG'}; cascade^2 bound "
                  f"{an.cascade_intensity_ratio(r) ** 2:.3f}; runtime={dt:.1f}s")
    assert ok


def test_criterion_08_two_laser_spectroscopy():
    cfg = ScenarioConfig.load("fig5")
    from jcsim.cli import _scenario

    grid = make_grid(cfg.block("g2spec")["delta2_GHz"])
    step = grid[1] - grid[0]
    sc = g2_spectroscopy_scan(_scenario(cfg), cfg.rates, ghz_to_rad_per_ns(grid), cfg.eta_det)
    peak = grid[sc.peak_index]
    m = matrix_element_ratio()
    ok = abs(peak - 0.30) <= step * (1 + 1e-9) and abs(m - 0.029) <= 0.001
    record(8, ok, f"g2 maximum at delta2={peak:.3f} GHz (target 0.30 +- {step:.3f}), matrix-element ratio {m:.4f}")
    assert ok


def test_criterion_09_detector_povm():
    det = DetectorModel(1e-3)
    devs = {}
    for label, x in (("antibunched", -G), ("bunched", -G / np.sqrt(2))):
        s = DrivenSystem(PAPER, 8, 0.0, x, G / 40)
        g2 = g2_zero_direct(s.steady_state, s.a)
        p1 = npnr_click_probability(s.steady_state, det)
        pc = npnr_coincidence_probability(s.steady_state, det)
        devs[label] = (g2, abs(pc / p1**2 - g2) / g2)
    coherent = all(coherent_npnr_g2(n, T) == 1.0 for n in (1e-3, 0.5, 20.0) for T in (1e-3, 0.2, 0.9))
    ok = all(d < 0.01 for _, d in devs.values()) and coherent
    record(9, ok, "; ".join(f"{k} g2={v[0]:.3g} rel dev {v[1]:.1e}" for k, v in devs.items())
           + f"; coherent closed form == 1: {coherent}")
    assert ok


@pytest.mark.slow
def test_criterion_10_power_dependence():
    cfg = ScenarioConfig.load("fig4a")
    g = cfg.rates.g
    dL = cfg._grid("spectrum", "delta_L")
    prom = cfg.block("spectrum")["peak_prominence"]
    powers = cfg.block("spectrum")["power_nW"]
    i_lp1 = int(np.argmin(np.abs(dL + g)))
    lp1, peaks = [], {}
    for P in powers:
        row = spectrum_scan(cfg.rates, dL, cfg.omega_for_power(P), [cfg.delta_C], None, cfg.eta_det, cfg.n_max).row()
        lp1.append(row[i_lp1])
        peaks[P] = find_spectrum_peaks(dL, row, prom) / g
    lp1 = np.array(lp1)
    monotone = np.all(np.diff(lp1) > 0) and max(powers) / min(powers) >= 1e3
    low = [P for P in powers if P <= 100]
    low_clean = all(np.all(np.abs(np.abs(peaks[P]) - 1) < 0.05) for P in low)

    def shoulders(p):
        return np.any((p > -0.85) & (p < -0.6)) and np.any((p > 0.6) & (p < 0.85))

    mid = [P for P in powers if 100 < P < max(powers) and shoulders(peaks[P])]
    top = np.any(np.abs(peaks[max(powers)]) < 0.1)
    ok = monotone and low_clean and bool(mid) and top
    record(10, ok, f"LP1 signal {np.array2string(lp1, precision=3)} cts/ns over {powers[0]:g}-{powers[-1]:g} nW "
                   f"(monotone: {monotone}); LP2/UP2 shoulders at {mid} nW only; zero-detuning feature at "
                   f"{powers[-1]:g} nW: {bool(top)}")
    assert ok


def test_criterion_11_truncation_convergence():
    worst, checked = 0.0, []
    for name in list_presets():
        cfg = ScenarioConfig.load(name)
        if "system" not in cfg.raw or "drive" not in cfg.raw or cfg.block("spectrum").get("power_nW"):
            continue
        if cfg.omega > 0.05 * cfg.rates.g:
            continue
        g = cfg.rates.g
        for x in (cfg.delta_L, -g, -g / np.sqrt(2)):
            v = []
            for n in (10, 15):
                s = DrivenSystem(cfg.rates, n, cfg.delta_C, x, cfg.omega)
                v.append((s.photon_number, g2_zero_direct(s.steady_state, s.a)))
            worst = max(worst, abs(v[1][0] / v[0][0] - 1), abs(v[1][1] / v[0][1] - 1))
        checked.append(name)
    ok = worst < 0.01 and len(checked) >= 5
    record(11, ok, f"max relative change n_max 10->15 = {worst:.1e} over {', '.join(checked)}")
    assert ok


def test_criterion_12_transfer_matrix():
    t0 = time.perf_counter()
    qw = 0.0
    for pairs in (1, 5, 12, 25):
        s = quarter_wave_stack(3.49, 2.92, pairs, 940.0, 1.0, 3.49)
        qw = max(qw, abs(stack_spectrum(s, [940.0]).R[0] - quarter_wave_reflectance(1.0, 3.49, 2.92, 3.49, pairs)))
    wl = np.linspace(850, 1050, 2001)
    dbr = load_stack(PRESET_DIR / "gaas_dbr.stack")
    c0 = stopband_center(stack_spectrum(dbr, wl))
    r_c = stack_spectrum(dbr, [c0]).R[0]
    wl2 = np.linspace(830, 1050, 2201)
    c_nom = stopband_center(stack_spectrum(dbr, wl2))
    c_drift = stopband_center(stack_spectrum(load_stack(PRESET_DIR / "gaas_dbr_drift.stack"), wl2))
    rng = np.random.default_rng(5)
    energy = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 60))
        s = LayerStack(rng.uniform(1, 3.6, k), rng.uniform(10, 300, k), rng.uniform(1, 3.6), rng.uniform(1, 3.6))
        sp = stack_spectrum(s, wl)
        energy = max(energy, np.abs(sp.R + sp.T - 1).max())
    sp = stack_spectrum(dbr, wl)
    energy = max(energy, np.abs(sp.R + sp.T - 1).max())
    dt = time.perf_counter() - t0
    ok = qw < 1e-6 and r_c > 0.9999 and c_drift < c_nom and energy < 1e-10 and dt < 30
    record(12, ok, f"quarter-wave |R-closed form|={qw:.1e}; 46-pair R={r_c:.7f} at {c0:.2f} nm; drift moves centre "
                   f"{c_nom:.1f} -> {c_drift:.1f} nm; max|R+T-1|={energy:.1e}; runtime={dt:.1f}s")
    assert ok


def test_criterion_13_derived_scalars():
    C = PAPER.cooperativity
    beta = PAPER.beta
    ok = (C == pytest.approx(2 * PAPER.g**2 / (PAPER.kappa * PAPER.gamma)) and round(C, -1) == 150
          and beta == pytest.approx(2 * C / (2 * C + 1)) and round(100 * beta, 1) == 99.7)
    record(13, ok, f"C={C:.1f} (rounds to {round(C, -1):.0f}), beta={100 * beta:.2f}%")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
