"""Driven, dissipative Jaynes-Cummings simulations: spectra, g2(tau), two-laser g2 spectroscopy and mirror stacks."""

__version__ = "0.1.0"

from .hilbert import DetuningSpec, DressedLevel, FockBasis, RateSet, ghz_to_rad_per_ns, rad_per_ns_to_ghz
from .liouvillian import DrivenSystem, SteadyStateError, build_liouvillian, steady_state
from .correlator import CorrelationTrace, FftPeaks, SpectrumScan, fft_peaks, g2_zero_smoothed, spectrum_scan, system_g2
from .detection import BackgroundModel, DetectorModel
from .analytic import TwoPhotonSolution, effective_two_photon
from .twolaser import TwoLaserScenario, g2_spectroscopy_scan
from .tmm import LayerStack, ReflectanceSpectrum, stack_spectrum, stopband_center

__all__ = [
    "BackgroundModel", "CorrelationTrace", "DetectorModel", "DetuningSpec", "DressedLevel", "DrivenSystem",
    "FftPeaks", "FockBasis", "LayerStack", "RateSet", "ReflectanceSpectrum", "SpectrumScan", "SteadyStateError",
    "TwoLaserScenario", "TwoPhotonSolution", "build_liouvillian", "effective_two_photon", "fft_peaks",
    "g2_spectroscopy_scan", "g2_zero_smoothed", "ghz_to_rad_per_ns", "rad_per_ns_to_ghz", "spectrum_scan",
    "stack_spectrum", "steady_state", "stopband_center", "system_g2",
]
