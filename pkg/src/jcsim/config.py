"""Scenario files: strict JSON schema with explicit unit suffixes.

Frequencies are ordinary frequencies (``_GHz``) or multiples of ``g``
(``_over_g``); they are converted to rad/ns on loading. Delays use ``_ps``,
powers ``_nW``, wavelengths ``_nm``.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hilbert import DressedLevel, RateSet, dressed_energy, ghz_to_rad_per_ns

PRESET_DIR = Path(__file__).with_name("presets")
COMMANDS = ("spectrum", "g2", "g2spec", "oracle", "tmm", "fit")


class ConfigError(ValueError):
    """Invalid scenario file; carries the offending field and its line if known."""

    def __init__(self, msg, field=None, line=None, col=None):
        self.field = field
        self.line = line
        self.col = col
        where = []
        if line is not None:
            where.append(f"line {line}" + (f", column {col}" if col is not None else ""))
        if field:
            where.append(f"field '{field}'")
        super().__init__(f"{'; '.join(where)}: {msg}" if where else msg)


# -- schema primitives --------------------------------------------------------

def _num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def _check(kind, v):
    """Return an error string or None."""
    if kind == "num":
        return None if _num(v) else "expected a finite number"
    if kind == "pos":
        return None if _num(v) and v > 0 else "expected a number > 0"
    if kind == "nonneg":
        return None if _num(v) and v >= 0 else "expected a number >= 0"
    if kind == "frac":
        return None if _num(v) and 0 < v <= 1 else "expected a number in (0, 1]"
    if kind == "int":
        return None if isinstance(v, int) and not isinstance(v, bool) and v >= 1 else "expected an integer >= 1"
    if kind == "bool":
        return None if isinstance(v, bool) else "expected true or false"
    if kind == "str":
        return None if isinstance(v, str) and v else "expected a non-empty string"
    if kind == "grid":
        return _grid_error(v)
    if kind == "numlist":
        ok = isinstance(v, list) and v and all(_num(x) for x in v)
        return None if ok else "expected a non-empty list of numbers"
    if isinstance(kind, tuple):
        return None if v in kind else f"expected one of {', '.join(map(str, kind))}"
    if isinstance(kind, dict):
        return None if isinstance(v, dict) else "expected an object"
    raise AssertionError(kind)


def _grid_error(v):
    if isinstance(v, list):
        return None if v and all(_num(x) for x in v) else "expected a non-empty list of numbers"
    if isinstance(v, dict):
        if set(v) != {"start", "stop", "num"}:
            return "grid object needs exactly the keys start, stop, num"
        if not (_num(v["start"]) and _num(v["stop"])):
            return "grid start/stop must be finite numbers"
        if not (isinstance(v["num"], int) and not isinstance(v["num"], bool) and v["num"] >= 1):
            return "grid num must be an integer >= 1"
        return None
    return "expected a list of numbers or {start, stop, num}"


def make_grid(v):
    if isinstance(v, dict):
        return np.linspace(float(v["start"]), float(v["stop"]), int(v["num"]))
    return np.asarray(v, dtype=float)


SCHEMA = {
    "command": COMMANDS,
    "description": "str",
    "system": {
        "g_GHz": "pos", "kappa_GHz": "pos", "gamma_GHz": "pos",
        "g_over_kappa": "pos", "g_over_gamma": "pos",
    },
    "basis": {"n_max": "int"},
    "drive": {
        "omega_rabi_GHz": "nonneg", "omega_rabi_over_g": "nonneg",
        "power_nW": "nonneg", "P0_nW": "pos",
        "delta_L_GHz": "num", "delta_L_over_g": "num",
        "delta_C_GHz": "num", "delta_C_over_g": "num",
    },
    "background": {
        "sbr": "pos", "off": "bool", "phase_rad": "num", "phase_averaged": "bool",
        "mode": ("fixed-sbr", "power"), "eta2": "frac", "power_coeff": "pos",
    },
    "detection": {"eta_det": "frac", "tau_det_ps": "pos"},
    "spectrum": {
        "delta_L_GHz": "grid", "delta_L_over_g": "grid",
        "delta_C_GHz": "grid", "delta_C_over_g": "grid",
        "power_nW": "numlist", "peak_prominence": "frac",
    },
    "g2": {
        "tau_span_ps": "pos", "tau_step_ps": "pos",
        "sweep_delta_L_GHz": "grid", "sweep_delta_L_over_g": "grid",
        "fft_prominence": "frac",
    },
    "g2spec": {
        "omega1_GHz": "nonneg", "omega2_GHz": "nonneg", "delta1_GHz": "num", "delta_C_GHz": "num",
        "config": ("lower", "upper"), "delta2_GHz": "grid", "ratio_threshold": "pos", "tau_int_ps": "pos",
    },
    "oracle": {"t_ps": "grid", "branch": ("upper", "lower")},
    "tmm": {
        "stack_file": "str", "wavelength_nm": "grid",
        "cavity": {
            "mirror_T_ppm": "numlist", "losses_ppm": "nonneg", "gap_over_lambda": "pos",
            "wavelength_nm": "pos", "penetration_stack_file": "str",
        },
    },
    "fit": {
        "data_csv": "str",
        "synthetic_noise": "nonneg", "seed": "int",
        "initial": {"g_GHz": "pos", "kappa_GHz": "pos", "gamma_GHz": "pos"},
    },
}


def _locate(text, path):
    """Best-effort line number of the last key of ``path`` in the JSON text."""
    if text is None or not path:
        return None
    pos = 0
    for key in path:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if not m:
            return None
        pos = m.start()
    return text.count("\n", 0, pos) + 1


def _validate(obj, schema, path, text):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", ".".join(path) or "<root>", _locate(text, path))
    for key, val in obj.items():
        p = path + [key]
        if key not in schema:
            allowed = ", ".join(sorted(schema))
            raise ConfigError(f"unknown key (allowed: {allowed})", ".".join(p), _locate(text, p))
        kind = schema[key]
        err = _check(kind, val)
        if err:
            raise ConfigError(err, ".".join(p), _locate(text, p))
        if isinstance(kind, dict):
            _validate(val, kind, p, text)


def _one_of(block, keys, path, text, required=True):
    present = [k for k in keys if k in block]
    if len(present) > 1:
        raise ConfigError(f"give exactly one of {', '.join(keys)}", f"{path}.{present[1]}", _locate(text, [path, present[1]]))
    if required and not present:
        raise ConfigError(f"missing one of {', '.join(keys)}", path, _locate(text, [path]))
    return present[0] if present else None


# -- resolved scenario --------------------------------------------------------

@dataclass
class ScenarioConfig:
    raw: dict
    path: Path | None = None
    text: str | None = field(default=None, repr=False)

    # construction ---------------------------------------------------------

    @classmethod
    def from_text(cls, text, path=None):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc.msg}", line=exc.lineno, col=exc.colno) from None
        cfg = cls(raw, Path(path) if path else None, text)
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path):
        p = resolve_config_path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}") from None
        return cls.from_text(text, p)

    def check(self):
        _validate(self.raw, SCHEMA, [], self.text)
        sys_ = self.raw.get("system")
        if sys_ is not None:
            if "g_GHz" not in sys_:
                raise ConfigError("g_GHz is required", "system.g_GHz", _locate(self.text, ["system"]))
            abs_ = {"kappa_GHz", "gamma_GHz"} & set(sys_)
            rat = {"g_over_kappa", "g_over_gamma"} & set(sys_)
            if abs_ and rat:
                raise ConfigError("mix of absolute and ratio rate forms", "system", _locate(self.text, ["system"]))
            if len(abs_ | rat) != 2:
                raise ConfigError("need kappa_GHz and gamma_GHz, or g_over_kappa and g_over_gamma", "system",
                                  _locate(self.text, ["system"]))
        drv = self.raw.get("drive")
        if drv is not None:
            amp = _one_of(drv, ("omega_rabi_GHz", "omega_rabi_over_g", "power_nW"), "drive", self.text)
            if amp == "power_nW" and "P0_nW" not in drv:
                raise ConfigError("power_nW needs P0_nW", "drive.P0_nW", _locate(self.text, ["drive"]))
            if amp != "power_nW" and "P0_nW" in drv:
                raise ConfigError("P0_nW only applies with power_nW", "drive.P0_nW", _locate(self.text, ["drive", "P0_nW"]))
            _one_of(drv, ("delta_L_GHz", "delta_L_over_g"), "drive", self.text, required=False)
            _one_of(drv, ("delta_C_GHz", "delta_C_over_g"), "drive", self.text, required=False)
        bg = self.raw.get("background")
        if bg is not None:
            mode = bg.get("mode", "fixed-sbr")
            if bg.get("off"):
                extra = set(bg) - {"off"}
                if extra:
                    raise ConfigError("background is off; remove other keys", f"background.{sorted(extra)[0]}",
                                      _locate(self.text, ["background", sorted(extra)[0]]))
            elif mode == "fixed-sbr":
                if "sbr" not in bg:
                    raise ConfigError("fixed-sbr background needs sbr", "background.sbr", _locate(self.text, ["background"]))
                if bg["sbr"] <= 1:
                    raise ConfigError("sbr must exceed 1", "background.sbr", _locate(self.text, ["background", "sbr"]))
            else:
                if "eta2" not in bg or "sbr" in bg:
                    raise ConfigError("power background needs eta2 and no sbr", "background", _locate(self.text, ["background"]))
                if "power_nW" not in (drv or {}):
                    raise ConfigError("power background needs drive.power_nW", "background.mode",
                                      _locate(self.text, ["background", "mode"]))
        sp = self.raw.get("spectrum")
        if sp is not None:
            _one_of(sp, ("delta_L_GHz", "delta_L_over_g"), "spectrum", self.text)
            _one_of(sp, ("delta_C_GHz", "delta_C_over_g"), "spectrum", self.text, required=False)
            if "power_nW" in sp and "P0_nW" not in (drv or {}):
                raise ConfigError("power sweep needs drive.P0_nW", "spectrum.power_nW", _locate(self.text, ["spectrum", "power_nW"]))
        g2 = self.raw.get("g2")
        if g2 is not None:
            _one_of(g2, ("sweep_delta_L_GHz", "sweep_delta_L_over_g"), "g2", self.text, required=False)
            if g2.get("tau_step_ps", 4.0) >= g2.get("tau_span_ps", 3000.0):
                raise ConfigError("tau_step_ps must be smaller than tau_span_ps", "g2.tau_step_ps", _locate(self.text, ["g2", "tau_step_ps"]))
        spec = self.raw.get("g2spec")
        if spec is not None:
            for k in ("omega1_GHz", "omega2_GHz", "delta1_GHz", "delta_C_GHz", "delta2_GHz"):
                if k not in spec:
                    raise ConfigError("required", f"g2spec.{k}", _locate(self.text, ["g2spec"]))
        tm = self.raw.get("tmm")
        if tm is not None:
            for k in ("stack_file", "wavelength_nm"):
                if k not in tm:
                    raise ConfigError("required", f"tmm.{k}", _locate(self.text, ["tmm"]))
            cav = tm.get("cavity")
            if cav is not None:
                if len(cav.get("mirror_T_ppm", [])) != 2:
                    raise ConfigError("need two mirror transmissions", "tmm.cavity.mirror_T_ppm",
                                      _locate(self.text, ["tmm", "cavity"]))
                if "wavelength_nm" not in cav:
                    raise ConfigError("required", "tmm.cavity.wavelength_nm", _locate(self.text, ["tmm", "cavity"]))
        ft = self.raw.get("fit")
        if ft is not None:
            if ("data_csv" in ft) == ("synthetic_noise" in ft):
                raise ConfigError("give exactly one of data_csv, synthetic_noise", "fit", _locate(self.text, ["fit"]))
            if "initial" not in ft or set(ft["initial"]) != {"g_GHz", "kappa_GHz", "gamma_GHz"}:
                raise ConfigError("initial needs g_GHz, kappa_GHz, gamma_GHz", "fit.initial", _locate(self.text, ["fit"]))
            if "synthetic_noise" in ft and "spectrum" not in self.raw:
                raise ConfigError("synthetic fit data needs a spectrum block", "fit.synthetic_noise",
                                  _locate(self.text, ["fit", "synthetic_noise"]))

    def require(self, *blocks):
        for b in blocks:
            if b not in self.raw:
                raise ConfigError(f"block '{b}' is required for this command", b)

    def block(self, name):
        return self.raw.get(name, {})

    def relative_path(self, p):
        p = Path(p)
        if p.is_absolute():
            return p
        base = self.path.parent if self.path else Path.cwd()
        return base / p

    # resolved quantities (rad/ns) -----------------------------------------

    @property
    def rates(self) -> RateSet:
        self.require("system")
        s = self.raw["system"]
        g = ghz_to_rad_per_ns(s["g_GHz"])
        if "kappa_GHz" in s:
            return RateSet(g, ghz_to_rad_per_ns(s["kappa_GHz"]), ghz_to_rad_per_ns(s["gamma_GHz"]))
        return RateSet.from_ratios(g, s["g_over_kappa"], s["g_over_gamma"])

    @property
    def n_max(self):
        return int(self.block("basis").get("n_max", 15))

    def _freq(self, block, stem, default=0.0):
        b = self.block(block)
        if f"{stem}_GHz" in b:
            return ghz_to_rad_per_ns(b[f"{stem}_GHz"])
        if f"{stem}_over_g" in b:
            return b[f"{stem}_over_g"] * self.rates.g
        return default

    def _grid(self, block, stem):
        b = self.block(block)
        if f"{stem}_GHz" in b:
            return ghz_to_rad_per_ns(make_grid(b[f"{stem}_GHz"]))
        if f"{stem}_over_g" in b:
            return make_grid(b[f"{stem}_over_g"]) * self.rates.g
        return None

    @property
    def delta_L(self):
        return self._freq("drive", "delta_L")

    @property
    def delta_C(self):
        return self._freq("drive", "delta_C")

    @property
    def power_nW(self):
        return self.block("drive").get("power_nW")

    def omega_for_power(self, P):
        from .detection import rabi_from_power

        return rabi_from_power(P, self.block("drive")["P0_nW"], self.rates)

    @property
    def omega(self):
        self.require("drive")
        d = self.raw["drive"]
        if "power_nW" in d:
            return self.omega_for_power(d["power_nW"])
        return self._freq("drive", "omega_rabi")

    @property
    def eta_det(self):
        from .correlator import DEFAULT_ETA_DET

        return float(self.block("detection").get("eta_det", DEFAULT_ETA_DET))

    @property
    def has_background(self):
        bg = self.raw.get("background")
        return bg is not None and not bg.get("off", False)

    def background(self, power=None):
        """Background model; fixed-SBR amplitude uses the resonant (LP1) photon number at the same drive."""
        from .detection import BackgroundModel
        from .liouvillian import DrivenSystem

        if not self.has_background:
            return None
        bg = self.raw["background"]
        phase = float(bg.get("phase_rad", 0.0))
        avg = bool(bg.get("phase_averaged", False))
        if bg.get("mode", "fixed-sbr") == "power":
            P = self.power_nW if power is None else power
            kw = {"power_coeff": bg["power_coeff"]} if "power_coeff" in bg else {}
            return BackgroundModel.power_proportional(P, bg["eta2"], phase=phase, phase_averaged=avg, **kw)
        om = self.omega if power is None else self.omega_for_power(power)
        lp1 = dressed_energy(DressedLevel(1, -1), self.rates, self.delta_C)
        n_res = DrivenSystem(self.rates, self.n_max, self.delta_C, lp1, om).photon_number
        return BackgroundModel.from_sbr(bg["sbr"], n_res, phase, avg)

    def resolved(self):
        """Resolved parameters in angular units for the manifest."""
        out = {}
        if "system" in self.raw:
            r = self.rates
            out["rates_rad_per_ns"] = {"g": r.g, "kappa": r.kappa, "gamma": r.gamma}
            out["cooperativity"] = r.cooperativity
            out["beta"] = r.beta
            out["n_max"] = self.n_max
        if "drive" in self.raw:
            out["drive_rad_per_ns"] = {"omega": self.omega, "delta_L": self.delta_L, "delta_C": self.delta_C}
            if self.power_nW is not None:
                out["drive_rad_per_ns"]["power_nW"] = self.power_nW
        if "background" in self.raw:
            bg = self.background()
            out["background"] = None if bg is None else {
                "eta": bg.eta, "alpha": bg.alpha, "phase_rad": bg.phase, "phase_averaged": bg.phase_averaged, "mode": bg.mode}
        for name in ("spectrum", "g2", "g2spec", "oracle", "tmm", "fit", "detection"):
            if name in self.raw:
                out[name] = self.raw[name]
        return out


def resolve_config_path(path):
    """A file path, or the name of a shipped preset (with or without ``.json``)."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    cand = PRESET_DIR / name
    if len(p.parts) == 1 and cand.exists():
        return cand
    raise ConfigError(f"config file not found: {os.fspath(path)}")


def list_presets():
    return sorted(q.stem for q in PRESET_DIR.glob("*.json"))
