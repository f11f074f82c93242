"""Truncated emitter-cavity Hilbert space and Jaynes-Cummings Hamiltonians.

Conventions
-----------
* Rates and detunings are angular frequencies in rad/ns. Use
  :func:`ghz_to_rad_per_ns` at the boundary when values are ordinary
  frequencies in GHz.
* The bare emitter frequency is the energy origin (omega_0 = 0).
* Bare basis states are grouped by rung::

      index 0          |g,0>
      index 2k-1       |g,k>      (k = 1 .. n_max)
      index 2k         |e,k-1>

  so every Jaynes-Cummings block is a contiguous 2x2 slice.
* Dressed states are ordered ``[|0>, |1+>, |1->, |2+>, |2->, ...]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi


def ghz_to_rad_per_ns(f_ghz):
    """Convert an ordinary frequency in GHz to an angular frequency in rad/ns."""
    return TWO_PI * np.asarray(f_ghz, dtype=float) if np.ndim(f_ghz) else TWO_PI * float(f_ghz)


def rad_per_ns_to_ghz(w):
    return np.asarray(w, dtype=float) / TWO_PI if np.ndim(w) else float(w) / TWO_PI


@dataclass(frozen=True)
class RateSet:
    """Coupling and loss rates of the emitter-cavity system (rad/ns).

    Attributes
    ----------
    g : float
        Emitter-cavity coupling.
    kappa : float
        Cavity photon (energy) decay rate.
    gamma : float
        Emitter decay rate into non-cavity modes.
    """

    g: float
    kappa: float
    gamma: float

    def __post_init__(self):
        for name in ("g", "kappa", "gamma"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def from_ghz(cls, g_ghz, kappa_ghz, gamma_ghz):
        return cls(TWO_PI * g_ghz, TWO_PI * kappa_ghz, TWO_PI * gamma_ghz)

    @classmethod
    def from_ratios(cls, g, g_over_kappa, g_over_gamma):
        """Build from an absolute ``g`` (rad/ns) and the ratios g/kappa, g/gamma."""
        return cls(g, g / g_over_kappa, g / g_over_gamma)

    @property
    def cooperativity(self):
        return 2.0 * self.g**2 / (self.kappa * self.gamma)

    @property
    def beta(self):
        c = self.cooperativity
        return 2.0 * c / (2.0 * c + 1.0)

    def scaled(self, factor):
        return RateSet(self.g * factor, self.kappa * factor, self.gamma * factor)


@dataclass(frozen=True)
class DetuningSpec:
    """Cavity detuning ``delta_C = w_C - w_0`` and laser detuning ``delta_L = w_L - w_0`` (rad/ns)."""

    delta_C: float = 0.0
    delta_L: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.delta_C) and np.isfinite(self.delta_L)):
            raise ValueError("detunings must be finite")


@dataclass(frozen=True)
class DressedLevel:
    n: int
    sign: int  # +1 or -1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dressed levels start at rung n = 1")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


@dataclass(frozen=True)
class FockBasis:
    """Truncated basis holding rungs 0..n_max of the Jaynes-Cummings ladder."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @classmethod
    def from_dim(cls, dim):
        if dim < 3 or dim % 2 == 0:
            raise ValueError(f"dimension {dim} is not of the form 2*n_max + 1")
        return cls((dim - 1) // 2)

    @property
    def dim(self):
        return 2 * self.n_max + 1

    def index(self, atom, n):
        """Position of ``|atom, n>`` where ``atom`` is ``'g'`` or ``'e'``."""
        if atom == "g":
            if not 0 <= n <= self.n_max:
                raise IndexError(f"|g,{n}> outside truncation")
            return 0 if n == 0 else 2 * n - 1
        if atom == "e":
            if not 0 <= n <= self.n_max - 1:
                raise IndexError(f"|e,{n}> outside truncation")
            return 2 * n + 2
        raise ValueError("atom must be 'g' or 'e'")

    @cached_property
    def labels(self):
        out = [("g", 0)]
        for k in range(1, self.n_max + 1):
            out += [("g", k), ("e", k - 1)]
        return tuple(out)

    @cached_property
    def photon_numbers(self):
        return np.array([n for _, n in self.labels], dtype=float)

    @cached_property
    def excited_mask(self):
        return np.array([atom == "e" for atom, _ in self.labels])

    @cached_property
    def rungs(self):
        """Total excitation number of each basis state."""
        return np.array([n + (atom == "e") for atom, n in self.labels], dtype=int)

    def ket(self, atom, n):
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(atom, n)] = 1.0
        return v

    def projector(self, atom, n):
        v = self.ket(atom, n)
        return np.outer(v, v.conj())


def build_annihilation(basis: FockBasis) -> np.ndarray:
    """Cavity annihilation operator ``a`` in the bare basis.

    ``a`` lowers the photon number and leaves the emitter untouched. Because
    the adjoint is taken of the truncated matrix, ``a.conj().T`` maps the top
    rung to zero.
    """
    a = np.zeros((basis.dim, basis.dim), dtype=complex)
    for atom, n in basis.labels:
        if n == 0:
            continue
        a[basis.index(atom, n - 1), basis.index(atom, n)] = np.sqrt(n)
    return a


def build_sigma_minus(basis: FockBasis) -> np.ndarray:
    """Emitter lowering operator ``|g><e|`` tensored with the photon identity."""
    s = np.zeros((basis.dim, basis.dim), dtype=complex)
    for n in range(basis.n_max):
        s[basis.index("g", n), basis.index("e", n)] = 1.0
    return s


def build_h_free(basis: FockBasis, rates: RateSet, det: DetuningSpec | None = None) -> np.ndarray:
    """Free Jaynes-Cummings Hamiltonian in the lab frame with ``omega_0 = 0``.

    Each rung ``n`` contributes the block ``[[n dC, sqrt(n) g], [sqrt(n) g, (n-1) dC]]``
    on ``(|g,n>, |e,n-1>)``.
    """
    dC = 0.0 if det is None else det.delta_C
    a = build_annihilation(basis)
    sm = build_sigma_minus(basis)
    ad = a.conj().T
    # dC * a^dag a gives n dC on |g,n> and (n-1) dC on |e,n-1>;
    # a^dag sigma- (not sigma- a^dag) keeps the coupling inside the top rung
    return dC * (ad @ a) + rates.g * (ad @ sm + sm.conj().T @ a)


def build_h_rotating(basis: FockBasis, rates: RateSet, det: DetuningSpec, omega_rabi: float) -> np.ndarray:
    """Single-laser Hamiltonian in the frame rotating at the laser frequency.

    ``H = omega (a + a^dag) + (dC - dL) a^dag a - dL |e><e| + g (sigma- a^dag + sigma+ a)``
    """
    if omega_rabi < 0:
        raise ValueError("omega_rabi must be >= 0")
    a = build_annihilation(basis)
    sm = build_sigma_minus(basis)
    ad = a.conj().T
    sp = sm.conj().T
    return (
        omega_rabi * (a + ad)
        + (det.delta_C - det.delta_L) * (ad @ a)
        - det.delta_L * (sp @ sm)
        + rates.g * (ad @ sm + sp @ a)
    )


def dressed_transform(basis: FockBasis, rates: RateSet, delta_C: float = 0.0) -> np.ndarray:
    """Unitary whose columns are the dressed states in the bare basis.

    Column order is ``[|0>, |1+>, |1->, |2+>, |2->, ...]``. For ``delta_C = 0``
    the states are ``(|g,n> +- |e,n-1>)/sqrt(2)``.
    """
    U = np.zeros((basis.dim, basis.dim), dtype=complex)
    U[0, 0] = 1.0
    g = rates.g
    for n in range(1, basis.n_max + 1):
        ig, ie = basis.index("g", n), basis.index("e", n - 1)
        root = np.sqrt(delta_C**2 / 4 + n * g**2)
        for col, s in ((2 * n - 1, 1), (2 * n, -1)):
            cg = delta_C / 2 + s * root
            ce = np.sqrt(n) * g
            # overall sign chosen so delta_C -> 0 gives (|g,n> +- |e,n-1>)/sqrt(2)
            norm = s * np.hypot(cg, ce)
            U[ig, col] = cg / norm
            U[ie, col] = ce / norm
    return U


def to_dressed(op: np.ndarray, U: np.ndarray) -> np.ndarray:
    return U.conj().T @ op @ U


def t_coefficient(n, sign):
    """Dressed-basis ladder element ``T_n^+- = (sqrt(n+1) +- sqrt(n)) / 2``."""
    return (np.sqrt(n + 1) + sign * np.sqrt(n)) / 2.0


def dressed_energy(level: DressedLevel, rates: RateSet, delta_C: float = 0.0) -> float:
    """``E_n^+- = (n - 1/2) dC +- sqrt(dC^2/4 + n g^2)`` with ``omega_0 = 0``."""
    n = level.n
    return (n - 0.5) * delta_C + level.sign * np.sqrt(delta_C**2 / 4 + n * rates.g**2)


def polariton_splitting(rates: RateSet, delta_C=0.0):
    """First-rung splitting ``E_1^+ - E_1^- = sqrt(dC^2 + 4 g^2)`` (vectorised in ``delta_C``)."""
    return np.sqrt(np.asarray(delta_C, dtype=float) ** 2 + 4 * rates.g**2)


def anharmonicity(n: int, s: int, p: int, rates: RateSet, delta_C: float = 0.0) -> float:
    """Deviation ``(E_{n+1}^s - E_n^p - omega_0) / g`` of a ladder transition.

    For ``n = 0`` the lower level is the ground state with zero energy and
    ``p`` is ignored.
    """
    upper = dressed_energy(DressedLevel(n + 1, s), rates, delta_C)
    lower = 0.0 if n == 0 else dressed_energy(DressedLevel(n, p), rates, delta_C)
    return (upper - lower) / rates.g


def matrix_element_ratio() -> float:
    """Squared ratio of the |1+> <-> |2-> and |1+> <-> |2+> ladder matrix elements."""
    return (t_coefficient(1, -1) / t_coefficient(1, +1)) ** 2


def h_rotating_dressed(basis: FockBasis, rates: RateSet, delta_L: float, omega_rabi: float) -> np.ndarray:
    """Resonant-cavity rotating-frame Hamiltonian assembled directly in the dressed basis.

    Built from the closed-form ladder elements ``T_n^+-`` and the detunings
    ``Delta_n^+- = +-sqrt(n) g - n delta_L``, independently of
    :func:`build_h_rotating`. Used to cross-check the bare-basis construction.
    """
    dim = basis.dim
    a = np.zeros((dim, dim), dtype=complex)
    a[0, 1] = a[0, 2] = 1 / np.sqrt(2)
    for n in range(1, basis.n_max):
        p, m = 2 * n - 1, 2 * n
        pp, mm = 2 * n + 1, 2 * n + 2
        tp, tm = t_coefficient(n, 1), t_coefficient(n, -1)
        a[p, pp], a[p, mm] = tp, tm
        a[m, pp], a[m, mm] = tm, tp
    diag = np.zeros(dim)
    for n in range(1, basis.n_max + 1):
        diag[2 * n - 1] = np.sqrt(n) * rates.g - n * delta_L
        diag[2 * n] = -np.sqrt(n) * rates.g - n * delta_L
    return omega_rabi * (a + a.conj().T) + np.diag(diag)
