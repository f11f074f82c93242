"""Command-line front end: ``jcsim <command> <config.json> [--out DIR] [--threads N] [--seed-check]``.

Commands ``spectrum``, ``g2``, ``g2spec``, ``oracle``, ``tmm`` and ``fit`` run a
scenario and write CSV files plus ``manifest.json`` (written last).
``validate`` checks a config without computing; ``presets`` lists the
shipped scenario files, which can be named instead of a path.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import platform
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, ConfigError, ScenarioConfig, list_presets, make_grid
from .hilbert import DressedLevel, RateSet, dressed_energy, ghz_to_rad_per_ns, rad_per_ns_to_ghz

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
TRUNCATION_RULE = 20.0  # warn when omega > n_max * g / TRUNCATION_RULE
CONVERGENCE_TOL = 0.01

REQUIRED_BLOCKS = {
    "spectrum": ("system", "drive", "spectrum"),
    "g2": ("system", "drive"),
    "g2spec": ("system", "g2spec"),
    "oracle": ("system", "drive"),
    "tmm": ("tmm",),
    "fit": ("fit",),
}


def _f(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_f(v) if isinstance(v, (float, np.floating, int, np.integer)) and not isinstance(v, bool) else v for v in r])
    return Path(path)


def write_summary(path, items):
    return write_csv(path, ["quantity", "value"], list(items))


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _ghz(x):
    return rad_per_ns_to_ghz(x)


# -- commands -----------------------------------------------------------------

def run_spectrum(cfg: ScenarioConfig, out: Path, threads):
    from .correlator import find_spectrum_peaks, spectrum_scan

    rates = cfg.rates
    sp = cfg.block("spectrum")
    dL = cfg._grid("spectrum", "delta_L")
    dC = cfg._grid("spectrum", "delta_C")
    if dC is None:
        dC = np.array([cfg.delta_C])
    powers = sp.get("power_nW")
    prom = sp.get("peak_prominence", 0.02)
    rows, peaks = [], []
    for P in (powers if powers is not None else [None]):
        om = cfg.omega if P is None else cfg.omega_for_power(P)
        scan = spectrum_scan(rates, dL, om, dC, cfg.background(P), cfg.eta_det, cfg.n_max, threads)
        lead = [] if P is None else [float(P)]
        for i, c in enumerate(dC):
            for j, l in enumerate(dL):
                rows.append(lead + [_ghz(l), _ghz(c), float(scan.signal[i, j]) * 1e9])
            for x in find_spectrum_peaks(dL, scan.signal[i], prom):
                peaks.append(lead + [_ghz(c), _ghz(x), x / rates.g])
    pw = [] if powers is None else ["power_nW"]
    files = [
        write_csv(out / "spectrum.csv", pw + ["delta_L_GHz", "delta_C_GHz", "signal_cts_per_s"], rows),
        write_csv(out / "peaks.csv", pw + ["delta_C_GHz", "peak_delta_L_GHz", "peak_delta_L_over_g"], peaks),
    ]
    if dC.size > 1:
        br = [[_ghz(c), _ghz(dressed_energy(DressedLevel(1, -1), rates, c)), _ghz(dressed_energy(DressedLevel(1, 1), rates, c))]
              for c in dC]
        files.append(write_csv(out / "branches.csv", ["delta_C_GHz", "E1_minus_GHz", "E1_plus_GHz"], br))
    return files, {}


def _trace_for(system, tau, bg):
    from .correlator import system_g2
    from .detection import detected_g2_tau

    raw = system_g2(system, tau)
    det = None if bg is None else detected_g2_tau(system.liouvillian, system.steady_state, system.a, bg, tau)
    return raw, det


def run_g2(cfg: ScenarioConfig, out: Path, threads):
    from .correlator import _map, dominant_frequency, fft_peaks, g2_zero_smoothed, tau_grid_ps
    from .liouvillian import DrivenSystem

    rates = cfg.rates
    b = cfg.block("g2")
    tau = tau_grid_ps(b.get("tau_span_ps", 3000.0), b.get("tau_step_ps", 4.0))
    prom = b.get("fft_prominence", 0.1)
    bg = cfg.background()
    system = DrivenSystem(rates, cfg.n_max, cfg.delta_C, cfg.delta_L, cfg.omega)
    raw, det = _trace_for(system, tau, bg)
    used = raw if det is None else det
    cols = [tau, raw.values] + ([] if det is None else [det.values])
    files = [write_csv(out / "g2_trace.csv", ["tau_ps", "g2"] + ([] if det is None else ["g2_detected"]), zip(*cols))]
    pk = fft_peaks(used, prominence=prom)
    files.append(write_csv(out / "fft_peaks.csv", ["frequency_GHz", "amplitude"], zip(pk.frequencies_ghz, pk.amplitudes)))
    summ = [
        ("g2_zero", raw.g2_zero),
        ("g2_zero_smoothed", g2_zero_smoothed(raw)),
        ("dominant_frequency_GHz", dominant_frequency(used)),
        ("fft_bin_GHz", pk.bin_ghz),
        ("vacuum_rabi_frequency_GHz", _ghz(np.sqrt(cfg.delta_C**2 + 4 * rates.g**2))),
    ]
    if det is not None:
        summ += [("g2_zero_detected", det.g2_zero), ("g2_zero_detected_smoothed", g2_zero_smoothed(det))]
    files.append(write_summary(out / "summary.csv", summ))

    sweep = cfg._grid("g2", "sweep_delta_L")
    if sweep is not None:
        def one(x):
            s = system.with_(delta_L=float(x))
            r, d = _trace_for(s, tau, bg)
            u = r if d is None else d
            p = fft_peaks(u, prominence=prom)
            vals = [r.g2_zero, g2_zero_smoothed(r)] + ([] if d is None else [d.g2_zero, g2_zero_smoothed(d)])
            return vals, p

        res = _map(one, sweep, threads)
        head = ["delta_L_GHz", "delta_L_over_g", "g2_zero", "g2_zero_smoothed"]
        if bg is not None:
            head += ["g2_zero_detected", "g2_zero_detected_smoothed"]
        files.append(write_csv(out / "g2_zero_sweep.csv", head,
                               [[_ghz(x), x / rates.g] + v for x, (v, _) in zip(sweep, res)]))
        files.append(write_csv(out / "fft_sweep.csv", ["delta_L_GHz", "delta_L_over_g", "frequency_GHz", "amplitude"],
                               [[_ghz(x), x / rates.g, f, a] for x, (_, p) in zip(sweep, res)
                                for f, a in zip(p.frequencies_ghz, p.amplitudes)]))
    return files, {}


def _scenario(cfg: ScenarioConfig):
    from .twolaser import DEFAULT_RATIO_THRESHOLD, TwoLaserScenario

    b = cfg.block("g2spec")
    return TwoLaserScenario(
        ghz_to_rad_per_ns(b["omega1_GHz"]), ghz_to_rad_per_ns(b["omega2_GHz"]),
        ghz_to_rad_per_ns(b["delta1_GHz"]), 0.0, ghz_to_rad_per_ns(b["delta_C_GHz"]),
        b.get("config", "upper"), b.get("ratio_threshold", DEFAULT_RATIO_THRESHOLD), b.get("tau_int_ps", 155.0))


def run_g2spec(cfg: ScenarioConfig, out: Path, threads):
    from .hilbert import matrix_element_ratio
    from .twolaser import g2_spectroscopy_scan, predicted_peak

    rates = cfg.rates
    s = _scenario(cfg)
    grid_ghz = make_grid(cfg.block("g2spec")["delta2_GHz"])
    sc = g2_spectroscopy_scan(s, rates, ghz_to_rad_per_ns(grid_ghz), cfg.eta_det, threads)
    files = [
        write_csv(out / "g2spec.csv", ["delta2_GHz", "signal_cts_per_s", "g2", "p_s_per_ns", "p_c_per_ns2"],
                  zip(grid_ghz, sc.signal * 1e9, sc.g2, sc.p_s, sc.p_c)),
        write_summary(out / "summary.csv", [
            ("peak_delta2_GHz", grid_ghz[sc.peak_index]),
            ("peak_g2", float(sc.g2[sc.peak_index])),
            ("predicted_peak_delta2_GHz", _ghz(predicted_peak(s))),
            ("matrix_element_ratio", matrix_element_ratio()),
        ]),
    ]
    return files, {}


def run_oracle(cfg: ScenarioConfig, out: Path, threads):
    from . import analytic as an

    rates = cfg.rates
    branch = -1 if cfg.block("oracle").get("branch", "lower") == "lower" else 1
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", an.PerturbativeWarning)
        sol = an.effective_two_photon(rates, cfg.omega, branch)
    t_ps = cfg.block("oracle").get("t_ps", {"start": 0.0, "stop": 1000.0, "num": 251})
    t = make_grid(t_ps) * 1e-3
    p_i = an.second_photon_rate(rates, t, branch)
    p_s = an.first_photon_rate(sol, rates)
    files = [
        write_summary(out / "oracle.csv", [
            ("omega_eff_GHz", _ghz(sol.omega_eff)),
            ("kappa_eff_GHz", _ghz(sol.kappa_eff)),
            ("light_shift_GHz", _ghz(sol.light_shift)),
            ("two_photon_delta_L_GHz", _ghz(an.two_photon_laser_detuning(rates, cfg.omega, branch))),
            ("B_GHz", _ghz(sol.B)),
            ("oscillation_frequency_GHz", _ghz(2 * sol.B)),
            ("quoted_oscillation_frequency_GHz", _ghz(an.quoted_oscillation_frequency(rates))),
            ("p_s_per_ns", p_s),
            ("p_i_zero_per_ns", float(an.second_photon_rate(rates, 0.0, branch))),
            ("g2_zero_closed_form", an.analytic_g2_zero(rates, cfg.omega)),
            ("cascade_intensity_ratio", an.cascade_intensity_ratio(rates)),
            ("cooperativity", rates.cooperativity),
            ("beta", rates.beta),
        ]),
        write_csv(out / "p_i.csv", ["t_ps", "p_i_per_ns", "g2_analytic"], zip(t * 1e3, p_i, p_i / p_s)),
    ]
    return files, {"warnings": [str(w.message) for w in caught]}


def run_tmm(cfg: ScenarioConfig, out: Path, threads):
    from .tmm import (StopbandError, cavity_q_estimate, load_stack, penetration_length, stack_spectrum,
                      stopband_center, write_spectrum_csv)

    b = cfg.block("tmm")
    try:
        stack = load_stack(cfg.relative_path(b["stack_file"]))
    except OSError as exc:
        raise ConfigError(f"cannot read stack file: {exc.strerror}", "tmm.stack_file") from None
    sp = stack_spectrum(stack, make_grid(b["wavelength_nm"]))
    files = [Path(write_spectrum_csv(out / "tmm_spectrum.csv", sp))]
    k = int(np.argmax(sp.R))
    summ = [("layers", len(stack)), ("R_max", sp.R[k]), ("wavelength_at_R_max_nm", sp.wavelength_nm[k]),
            ("max_abs_R_plus_T_minus_1", float(np.abs(sp.R + sp.T - 1).max()))]
    try:
        c = stopband_center(sp)
        at = stack_spectrum(stack, [c])
        summ += [("stopband_center_nm", c), ("R_at_center", at.R[0]), ("T_at_center", at.T[0])]
    except StopbandError as exc:
        summ += [("stopband_center_nm", f"none: {exc}")]
    cav = b.get("cavity")
    if cav is not None:
        lam = cav["wavelength_nm"]
        L = cav.get("gap_over_lambda", 1.5) * lam
        if "penetration_stack_file" in cav:
            try:
                mirror = load_stack(cfg.relative_path(cav["penetration_stack_file"]))
            except OSError as exc:
                raise ConfigError(f"cannot read stack file: {exc.strerror}", "tmm.cavity.penetration_stack_file") from None
            lp = penetration_length(mirror, lam)
            L += 2 * lp
            summ.append(("penetration_length_nm", lp))
        T1, T2 = (x * 1e-6 for x in cav["mirror_T_ppm"])
        est = cavity_q_estimate(T1, T2, L, lam, cav.get("losses_ppm", 0.0) * 1e-6)
        summ += [("L_eff_nm", est.L_eff_nm), ("finesse", est.finesse), ("Q", est.Q)]
    files.append(write_summary(out / "summary.csv", summ))
    return files, {}


def _read_scan_csv(path):
    from .correlator import SpectrumScan

    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read data file: {exc.strerror}", "fit.data_csv") from None
    need = {"delta_L_GHz", "delta_C_GHz", "signal_cts_per_s"}
    if not rows or not need <= set(rows[0]):
        raise ConfigError(f"data file needs columns {', '.join(sorted(need))}", "fit.data_csv")
    dL = sorted({float(r["delta_L_GHz"]) for r in rows})
    dC = sorted({float(r["delta_C_GHz"]) for r in rows})
    sig = np.full((len(dC), len(dL)), np.nan)
    iL = {v: i for i, v in enumerate(dL)}
    iC = {v: i for i, v in enumerate(dC)}
    for r in rows:
        sig[iC[float(r["delta_C_GHz"])], iL[float(r["delta_L_GHz"])]] = float(r["signal_cts_per_s"]) * 1e-9
    if np.isnan(sig).any():
        raise ConfigError("data file is not a complete delta_L x delta_C grid", "fit.data_csv")
    return SpectrumScan(ghz_to_rad_per_ns(np.array(dL)), ghz_to_rad_per_ns(np.array(dC)), sig, {})


def run_fit(cfg: ScenarioConfig, out: Path, threads):
    from .correlator import SpectrumScan, _model, fit_jc_spectrum, spectrum_scan

    b = cfg.block("fit")
    if "data_csv" in b:
        scan = _read_scan_csv(cfg.relative_path(b["data_csv"]))
    else:
        dL = cfg._grid("spectrum", "delta_L")
        dC = cfg._grid("spectrum", "delta_C")
        dC = np.array([cfg.delta_C]) if dC is None else dC
        scan = spectrum_scan(cfg.rates, dL, cfg.omega, dC, None, cfg.eta_det, cfg.n_max, threads)
        rng = np.random.default_rng(b.get("seed", 1))
        noisy = scan.signal + b["synthetic_noise"] * scan.signal.max() * rng.standard_normal(scan.signal.shape)
        scan = SpectrumScan(scan.delta_L, scan.delta_C, noisy, scan.meta)
    ini = b["initial"]
    rep = fit_jc_spectrum(scan, RateSet.from_ghz(ini["g_GHz"], ini["kappa_GHz"], ini["gamma_GHz"]))
    se = rep.stderr
    r = rep.rates
    theta = [np.log(r.g), np.log(r.kappa), np.log(r.gamma), np.log(rep.amplitude), rep.offset]
    model = _model(theta, scan.delta_L, scan.delta_C).reshape(scan.signal.shape)
    files = [
        write_csv(out / "fit.csv", ["parameter", "value", "stderr"], [
            ("g_GHz", _ghz(r.g), _ghz(r.g * se[0])),
            ("kappa_GHz", _ghz(r.kappa), _ghz(r.kappa * se[1])),
            ("gamma_GHz", _ghz(r.gamma), _ghz(r.gamma * se[2])),
            ("amplitude_cts_per_s", rep.amplitude * 1e9, rep.amplitude * se[3] * 1e9),
            ("offset_cts_per_s", rep.offset * 1e9, se[4] * 1e9),
            ("residual_norm_cts_per_s", rep.residual_norm * 1e9, ""),
        ]),
        write_csv(out / "fit_curve.csv", ["delta_L_GHz", "delta_C_GHz", "data_cts_per_s", "model_cts_per_s"],
                  [[_ghz(l), _ghz(c), scan.signal[i, j] * 1e9, model[i, j] * 1e9]
                   for i, c in enumerate(scan.delta_C) for j, l in enumerate(scan.delta_L)]),
    ]
    return files, {"fit_nfev": rep.nfev}


RUNNERS = {
    "spectrum": run_spectrum,
    "g2": run_g2,
    "g2spec": run_g2spec,
    "oracle": run_oracle,
    "tmm": run_tmm,
    "fit": run_fit,
}


# -- validation and diagnostics ----------------------------------------------

def validate_report(cfg: ScenarioConfig, command=None):
    """Dry-run checks; returns a list of warning strings (empty when clean)."""
    command = command or cfg.raw.get("command")
    issues = []
    if command in REQUIRED_BLOCKS:
        for blk in REQUIRED_BLOCKS[command]:
            if blk not in cfg.raw:
                issues.append(f"missing block '{blk}' required by '{command}'")
    if "system" in cfg.raw and "drive" in cfg.raw:
        g = cfg.rates.g
        oms = [cfg.omega]
        powers = cfg.block("spectrum").get("power_nW")
        if powers:
            oms += [cfg.omega_for_power(p) for p in powers]
        om = max(oms)
        if om > cfg.n_max * g / TRUNCATION_RULE:
            issues.append(f"truncation: Omega/g = {om / g:.3g} is large for n_max = {cfg.n_max}; "
                          f"increase n_max above {int(np.ceil(om / g * TRUNCATION_RULE))}")
        if command == "oracle":
            from .analytic import PERTURBATIVE_LIMIT

            if cfg.omega > PERTURBATIVE_LIMIT * g:
                issues.append(f"perturbative: Omega/g = {cfg.omega / g:.3g} exceeds {PERTURBATIVE_LIMIT}; "
                              "closed forms are unreliable")
            if abs(cfg.delta_C) > 0:
                issues.append("oracle closed forms assume delta_C = 0")
    if "g2spec" in cfg.raw and "system" in cfg.raw:
        from .twolaser import TwoLaserRegimeError

        sc = _scenario(cfg)
        try:
            sc.check_regime(cfg.rates)
            grid = ghz_to_rad_per_ns(make_grid(cfg.block("g2spec")["delta2_GHz"]))
            sc.with_(delta2=float(np.abs(grid).max())).check_regime(cfg.rates)
        except TwoLaserRegimeError as exc:
            issues.append(f"two-laser regime: {exc}")
    if "tmm" in cfg.raw:
        for key in ("stack_file",):
            if key in cfg.block("tmm") and not cfg.relative_path(cfg.block("tmm")[key]).exists():
                issues.append(f"tmm.{key} not found: {cfg.block('tmm')[key]}")
        cav = cfg.block("tmm").get("cavity", {})
        if "penetration_stack_file" in cav and not cfg.relative_path(cav["penetration_stack_file"]).exists():
            issues.append(f"tmm.cavity.penetration_stack_file not found: {cav['penetration_stack_file']}")
        if any(not 0 < t < 1e6 for t in cav.get("mirror_T_ppm", [1.0])):
            issues.append("tmm.cavity.mirror_T_ppm must lie in (0, 1e6)")
    if "fit" in cfg.raw and "data_csv" in cfg.block("fit"):
        if not cfg.relative_path(cfg.block("fit")["data_csv"]).exists():
            issues.append(f"fit.data_csv not found: {cfg.block('fit')['data_csv']}")
    return issues


def convergence_check(cfg: ScenarioConfig, low=10, high=15):
    """Relative change of steady <a^dag a> and g2(0) between two truncations at the nominal drive point."""
    from .correlator import g2_zero_direct
    from .liouvillian import DrivenSystem

    if "system" not in cfg.raw or "drive" not in cfg.raw:
        return None
    hi = max(high, cfg.n_max)
    vals = []
    for n in (low, hi):
        s = DrivenSystem(cfg.rates, n, cfg.delta_C, cfg.delta_L, cfg.omega)
        vals.append((s.photon_number, g2_zero_direct(s.steady_state, s.a)))
    dn = abs(vals[1][0] - vals[0][0]) / abs(vals[1][0])
    dg = abs(vals[1][1] - vals[0][1]) / abs(vals[1][1])
    return {"n_max_low": low, "n_max_high": hi, "rel_change_photon_number": dn, "rel_change_g2_zero": dg,
            "passed": bool(dn < CONVERGENCE_TOL and dg < CONVERGENCE_TOL)}


def _threads(arg):
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("JCSIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"JCSIM_THREADS must be an integer, got {env!r}") from None
    return 1


def execute(command, cfg: ScenarioConfig, out: Path, threads=1, seed_check=False):
    """Run ``command`` and write outputs plus the manifest into ``out``; returns the manifest dict."""
    declared = cfg.raw.get("command")
    if declared and declared != command:
        raise ConfigError(f"config declares command '{declared}'", "command")
    for blk in REQUIRED_BLOCKS[command]:
        cfg.require(blk)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    files, extra = RUNNERS[command](cfg, out, threads)
    manifest = {
        "tool": "jcsim",
        "version": __version__,
        "command": command,
        "config": os.fspath(cfg.path) if cfg.path else None,
        "config_sha256": hashlib.sha256((cfg.text or "").encode()).hexdigest(),
        "resolved": cfg.resolved(),
        "outputs": [{"file": p.name, "sha256": sha256(p), "bytes": p.stat().st_size} for p in files],
        "python": platform.python_version(),
        "threads": threads,
    }
    if command in ("spectrum", "g2", "oracle"):
        manifest["convergence"] = convergence_check(cfg)
    manifest.update(extra)
    if seed_check:
        with tempfile.TemporaryDirectory() as tmp:
            again, _ = RUNNERS[command](cfg, Path(tmp), threads)
            ref = {e["file"]: e["sha256"] for e in manifest["outputs"]}
            same = {p.name: sha256(p) == ref.get(p.name) for p in again}
        manifest["seed_check"] = {"identical": all(same.values()) and len(same) == len(ref), "files": same}
    manifest["wall_clock_s"] = time.perf_counter() - t0
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, default=_json_default)
        fh.write("\n")
    return manifest


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _numerical_errors():
    from .analytic import AnalyticRegimeError
    from .correlator import CorrelationError, FitError
    from .liouvillian import SteadyStateError
    from .tmm import StackFormatError, StopbandError
    from .twolaser import ProbeFitError, TwoLaserRegimeError

    return (SteadyStateError, FitError, CorrelationError, AnalyticRegimeError, ProbeFitError,
            TwoLaserRegimeError, StopbandError, np.linalg.LinAlgError, FloatingPointError), (StackFormatError,)


def build_parser():
    p = argparse.ArgumentParser(prog="jcsim", description="Driven dissipative Jaynes-Cummings simulations.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=f"run the {name} task of a scenario file")
        s.add_argument("config", help="scenario JSON file or shipped preset name")
        s.add_argument("--out", default=None, help="output directory (default: out/<config name>)")
        s.add_argument("--threads", type=int, default=None, help="sweep worker threads (env JCSIM_THREADS)")
        s.add_argument("--seed-check", action="store_true", help="re-run and verify bit-identical outputs")
    v = sub.add_parser("validate", help="check a scenario file without computing")
    v.add_argument("config")
    v.add_argument("--command", choices=COMMANDS, default=None, dest="task")
    sub.add_parser("presets", help="list shipped scenario presets")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name in list_presets():
            print(name)
        return EXIT_OK
    numerical, config_like = _numerical_errors()
    try:
        cfg = ScenarioConfig.load(args.config)
        if args.command == "validate":
            issues = validate_report(cfg, args.task)
            for msg in issues:
                print(f"warning: {msg}")
            print("ok" if not issues else f"{len(issues)} issue(s)")
            return EXIT_OK
        threads = _threads(args.threads)
        out = Path(args.out) if args.out else Path("out") / Path(cfg.path).stem
        m = execute(args.command, cfg, out, threads, args.seed_check)
    except (ConfigError,) + config_like as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except numerical as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for e in m["outputs"]:
        print(out / e["file"])
    conv = m.get("convergence")
    if conv is not None and not conv["passed"]:
        print(f"warning: n_max {conv['n_max_low']} -> {conv['n_max_high']} changes results by "
              f"{100 * max(conv['rel_change_photon_number'], conv['rel_change_g2_zero']):.2g}%", file=sys.stderr)
    if args.seed_check and not m["seed_check"]["identical"]:
        print("numerical error: repeated run produced different outputs", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
