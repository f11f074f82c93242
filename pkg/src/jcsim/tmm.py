"""Normal-incidence transfer matrices for planar mirror stacks.

Each layer of index ``n`` and thickness ``d`` has the characteristic matrix

    [[cos(delta), i sin(delta) / n], [i n sin(delta), cos(delta)]],  delta = 2 pi n d / lambda

and the stack response follows from ``[B, C]^T = M [1, n_out]^T``:
``r = (n_in B - C) / (n_in B + C)`` and ``t = 2 n_in / (n_in B + C)``.
Layers are listed from the incidence side towards the exit medium.
Indices are real and dispersionless.
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass

import numpy as np


class StackFormatError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


class StopbandError(ValueError):
    pass


@dataclass(frozen=True)
class LayerStack:
    indices: np.ndarray
    thicknesses_nm: np.ndarray
    n_in: float = 1.0
    n_out: float = 1.0

    def __post_init__(self):
        n = np.asarray(self.indices, dtype=float)
        d = np.asarray(self.thicknesses_nm, dtype=float)
        if n.ndim != 1 or n.size == 0 or n.shape != d.shape:
            raise ValueError("stack needs matching, non-empty index and thickness lists")
        if np.any(d <= 0) or not np.all(np.isfinite(d)):
            raise ValueError("layer thicknesses must be finite and > 0")
        if np.any(n < 1) or self.n_in < 1 or self.n_out < 1:
            raise ValueError("refractive indices must be real and >= 1")
        object.__setattr__(self, "indices", n)
        object.__setattr__(self, "thicknesses_nm", d)

    def __len__(self):
        return self.indices.size

    @property
    def optical_thickness_nm(self):
        return float(self.indices @ self.thicknesses_nm)

    def reversed(self):
        return LayerStack(self.indices[::-1], self.thicknesses_nm[::-1], self.n_out, self.n_in)

    def with_media(self, n_in=None, n_out=None):
        return LayerStack(self.indices, self.thicknesses_nm,
                          self.n_in if n_in is None else n_in, self.n_out if n_out is None else n_out)

    def __add__(self, other):
        return LayerStack(np.concatenate([self.indices, other.indices]),
                          np.concatenate([self.thicknesses_nm, other.thicknesses_nm]), self.n_in, other.n_out)


@dataclass(frozen=True)
class ReflectanceSpectrum:
    wavelength_nm: np.ndarray
    R: np.ndarray
    T: np.ndarray
    r: np.ndarray  # complex amplitude reflection coefficient

    @property
    def absorptance(self):
        return 1.0 - self.R - self.T

    @property
    def phase(self):
        return np.unwrap(np.angle(self.r))


def quarter_wave_stack(n_high, n_low, pairs, design_nm, n_in=1.0, n_out=1.0, start="high"):
    """``pairs`` repetitions of quarter-wave layers, starting with ``start`` on the incidence side."""
    first, second = (n_high, n_low) if start == "high" else (n_low, n_high)
    idx = np.tile([first, second], pairs)
    return LayerStack(idx, design_nm / (4 * idx), n_in, n_out)


def drifted_pairs(n_a, n_b, d_a, d_b, pairs, n_in=1.0, n_out=1.0):
    """Pairs whose thicknesses vary linearly from ``d_x[0]`` (first pair) to ``d_x[1]`` (last pair)."""
    frac = np.linspace(0.0, 1.0, pairs) if pairs > 1 else np.zeros(1)
    ta = d_a[0] + (d_a[1] - d_a[0]) * frac
    tb = d_b[0] + (d_b[1] - d_b[0]) * frac
    return LayerStack(np.tile([n_a, n_b], pairs), np.column_stack([ta, tb]).ravel(), n_in, n_out)


def characteristic_matrices(n, d_nm, wavelength_nm):
    """Characteristic matrix of one layer for each wavelength, shape ``(len(wl), 2, 2)``."""
    lam = np.atleast_1d(np.asarray(wavelength_nm, dtype=float))
    delta = 2 * np.pi * n * d_nm / lam
    c, s = np.cos(delta), np.sin(delta)
    M = np.empty((lam.size, 2, 2), dtype=complex)
    M[:, 0, 0] = c
    M[:, 0, 1] = 1j * s / n
    M[:, 1, 0] = 1j * n * s
    M[:, 1, 1] = c
    return M


def stack_matrix(stack: LayerStack, wavelength_nm):
    lam = np.atleast_1d(np.asarray(wavelength_nm, dtype=float))
    M = np.broadcast_to(np.eye(2, dtype=complex), (lam.size, 2, 2)).copy()
    for n, d in zip(stack.indices, stack.thicknesses_nm):
        M = M @ characteristic_matrices(n, d, lam)
    return M


def stack_spectrum(stack: LayerStack, wavelength_nm) -> ReflectanceSpectrum:
    lam = np.atleast_1d(np.asarray(wavelength_nm, dtype=float))
    if np.any(lam <= 0):
        raise ValueError("wavelengths must be > 0")
    M = stack_matrix(stack, lam)
    B = M[:, 0, 0] + M[:, 0, 1] * stack.n_out
    C = M[:, 1, 0] + M[:, 1, 1] * stack.n_out
    den = stack.n_in * B + C
    r = (stack.n_in * B - C) / den
    t = 2 * stack.n_in / den
    R = np.abs(r) ** 2
    T = stack.n_out / stack.n_in * np.abs(t) ** 2
    return ReflectanceSpectrum(lam, R, T, r)


def fresnel_reflectance(n1, n2):
    return ((n1 - n2) / (n1 + n2)) ** 2


def quarter_wave_reflectance(n_in, n_high, n_low, n_out, pairs):
    """Peak reflectance of ``(HL)^N`` between ``n_in`` and ``n_out`` at the design wavelength."""
    a = n_in * n_low ** (2 * pairs)
    b = n_out * n_high ** (2 * pairs)
    return ((a - b) / (a + b)) ** 2


def stopband_center(spectrum: ReflectanceSpectrum, rel=0.999, min_peak=0.5):
    """Centre of the contiguous band around the maximum with ``R >= rel * max``.

    Band edges are linearly interpolated; the centre is their midpoint in
    wavenumber, where a quarter-wave stopband is symmetric.
    """
    R = spectrum.R
    wl = spectrum.wavelength_nm
    k = int(np.argmax(R))
    if R[k] < min_peak:
        raise StopbandError(f"maximum reflectance {R[k]:.3g} below {min_peak}; no stopband in range")
    thr = rel * R[k]
    lo = k
    while lo > 0 and R[lo - 1] >= thr:
        lo -= 1
    hi = k
    while hi < R.size - 1 and R[hi + 1] >= thr:
        hi += 1
    if lo == 0 or hi == R.size - 1:
        raise StopbandError("stopband reaches the edge of the wavelength grid")

    def edge(i, j):
        # crossing between sample i (inside) and j (outside)
        f = (R[i] - thr) / (R[i] - R[j])
        return wl[i] + f * (wl[j] - wl[i])

    a, b = edge(lo, lo - 1), edge(hi, hi + 1)
    return float(2.0 / (1.0 / a + 1.0 / b))


def penetration_length(stack: LayerStack, wavelength_nm, dlam_nm=0.01):
    """Mirror penetration length ``|lambda^2 / (4 pi) d phi / d lambda|`` from the reflection group delay."""
    lam = float(wavelength_nm)
    sp = stack_spectrum(stack, [lam - dlam_nm, lam + dlam_nm])
    dphi = np.angle(sp.r[1] / sp.r[0])
    return float(abs(lam**2 / (4 * np.pi) * dphi / (2 * dlam_nm)))


@dataclass(frozen=True)
class CavityEstimate:
    finesse: float
    Q: float
    L_eff_nm: float


def cavity_q_estimate(mirror_T1, mirror_T2, L_eff_nm, wavelength_nm, losses=0.0) -> CavityEstimate:
    """Fabry-Perot estimate ``F = 2 pi / (T1 + T2 + losses)`` and ``Q = F * 2 L_eff / lambda``."""
    if not (0 < mirror_T1 < 1 and 0 < mirror_T2 < 1) or losses < 0:
        raise ValueError("need 0 < T < 1 for both mirrors and losses >= 0")
    F = 2 * np.pi / (mirror_T1 + mirror_T2 + losses)
    return CavityEstimate(F, F * 2 * L_eff_nm / wavelength_nm, L_eff_nm)


_REPEAT = re.compile(r"^repeat\s+(\d+)\s*\{$")
_LAYER = re.compile(r"^(\S+)\s+(\S+)(?:\s*->\s*(\S+))?$")


def parse_stack(text: str) -> LayerStack:
    """Parse a plain-text stack description.

    One layer per line as ``index thickness_nm``; inside a ``repeat N { ... }``
    block a layer may be written ``index start_nm -> end_nm`` to vary its
    thickness linearly over the repetitions. ``incident n`` and
    ``substrate n`` set the outer media (default 1.0). ``#`` starts a comment.
    Blocks may be nested.
    """
    n_in = n_out = 1.0
    root: list = []
    stack = [(root, None, 0)]
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _REPEAT.match(line)
        if m:
            count = int(m.group(1))
            if count < 1:
                raise StackFormatError("repeat count must be >= 1", lineno)
            block: list = []
            stack.append((block, count, lineno))
            continue
        if line == "}":
            if len(stack) == 1:
                raise StackFormatError("unmatched '}'", lineno)
            block, count, _ = stack.pop()
            stack[-1][0].append(("repeat", count, block))
            continue
        key = line.split()
        if key[0] in ("incident", "substrate"):
            if len(key) != 2:
                raise StackFormatError(f"expected '{key[0]} <index>'", lineno)
            try:
                val = float(key[1])
            except ValueError:
                raise StackFormatError(f"bad index {key[1]!r}", lineno) from None
            if key[0] == "incident":
                n_in = val
            else:
                n_out = val
            continue
        m = _LAYER.match(line)
        if not m:
            raise StackFormatError(f"cannot parse {raw.strip()!r}", lineno)
        try:
            n = float(m.group(1))
            d0 = float(m.group(2))
            d1 = float(m.group(3)) if m.group(3) else d0
        except ValueError:
            raise StackFormatError(f"non-numeric layer entry {raw.strip()!r}", lineno) from None
        if m.group(3) and len(stack) == 1:
            raise StackFormatError("thickness drift is only meaningful inside a repeat block", lineno)
        if n < 1 or d0 <= 0 or d1 <= 0:
            raise StackFormatError("need index >= 1 and positive thickness", lineno)
        stack[-1][0].append(("layer", n, d0, d1))
    if len(stack) != 1:
        raise StackFormatError(f"repeat block opened on line {stack[-1][2]} is not closed")

    def expand(items, frac):
        out = []
        for it in items:
            if it[0] == "layer":
                _, n, d0, d1 = it
                out.append((n, d0 + (d1 - d0) * frac))
            else:
                _, count, block = it
                for k in range(count):
                    out.extend(expand(block, k / (count - 1) if count > 1 else 0.0))
        return out

    layers = expand(root, 0.0)
    if not layers:
        raise StackFormatError("stack contains no layers")
    arr = np.array(layers)
    return LayerStack(arr[:, 0], arr[:, 1], n_in, n_out)


def load_stack(path) -> LayerStack:
    with open(path, encoding="utf-8") as fh:
        return parse_stack(fh.read())


def write_spectrum_csv(path, spectrum: ReflectanceSpectrum):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["wavelength_nm", "R", "T"])
        for row in zip(spectrum.wavelength_nm, spectrum.R, spectrum.T):
            w.writerow([repr(float(x)) for x in row])
    return os.fspath(path)
