import numpy as np
import pytest

from jcsim.correlator import g2_zero_direct, system_g2, tau_grid_ps
from jcsim.detection import (
    BackgroundModel,
    DetectorModel,
    coherent_click_probability,
    coherent_ket,
    coherent_npnr_g2,
    detected_g2_tau,
    detected_g2_zero,
    detected_moments,
    displaced_operator,
    npnr_click_probability,
    npnr_coincidence_probability,
    npnr_g2,
    rabi_from_power,
    tensored_g2_zero,
)
from jcsim.liouvillian import DrivenSystem


def _system(rates, x, n_max=8, om_frac=1 / 40):
    return DrivenSystem(rates, n_max, 0.0, x * rates.g, om_frac * rates.g)


def test_background_model_construction():
    bg = BackgroundModel.from_sbr(85, 0.04)
    assert bg.eta == pytest.approx(1 - 1 / 85)
    assert bg.sbr == pytest.approx(85)
    assert bg.alpha == pytest.approx(0.2)
    assert BackgroundModel.off().sbr == np.inf
    p = BackgroundModel.power_proportional(2.0, 0.5)
    assert p.eta == 0.999 and p.alpha == pytest.approx(np.sqrt(1000.0))
    assert bg.at_phase(np.pi / 2).amplitude == pytest.approx(0.2j)
    for kw in ({"eta": 0.0}, {"eta": 1.1}, {"alpha": -1.0}, {"alpha": np.nan}):
        with pytest.raises(ValueError):
            BackgroundModel(**kw)
    with pytest.raises(ValueError):
        BackgroundModel.from_sbr(1.0, 0.1)


def test_no_background_reproduces_system_statistics(paper_rates):
    s = _system(paper_rates, -0.7)
    off = BackgroundModel.off()
    assert detected_g2_zero(s.steady_state, s.a, off) == pytest.approx(g2_zero_direct(s.steady_state, s.a), rel=1e-12)
    tau = tau_grid_ps(400, 4)
    np.testing.assert_allclose(detected_g2_tau(s.liouvillian, s.steady_state, s.a, off, tau).values,
                               system_g2(s, tau).values, rtol=1e-12)


def test_displacement_matches_explicit_background_mode(paper_rates):
    s = _system(paper_rates, -0.7, n_max=3)
    for phase in (0.0, 1.1):
        bg = BackgroundModel.from_sbr(20, s.photon_number, phase=phase)
        fast = detected_g2_zero(s.steady_state, s.a, bg)
        slow = tensored_g2_zero(s.steady_state, s.a, bg, n_background=12)
        assert fast == pytest.approx(slow, rel=1e-8)


def test_pure_background_is_poissonian(paper_rates):
    s = _system(paper_rates, -0.7)
    bg = BackgroundModel(eta=1e-12, alpha=1.0)
    assert detected_g2_zero(s.steady_state, s.a, bg) == pytest.approx(1.0, abs=1e-5)


def test_sbr_monotonic_approach(paper_rates):
    s = _system(paper_rates, -0.7)
    n_res = _system(paper_rates, -1.0).photon_number
    clean = g2_zero_direct(s.steady_state, s.a)
    gaps = [abs(detected_g2_zero(s.steady_state, s.a, BackgroundModel.from_sbr(sbr, n_res)) - clean)
            for sbr in (5, 20, 85, 400, 1e4, 1e6)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] / clean < 1e-2


def test_phase_average_is_ratio_of_averages(paper_rates):
    s = _system(paper_rates, -0.5)
    bg = BackgroundModel.from_sbr(85, 0.01, phase_averaged=True)
    n1, n2 = detected_moments(s.steady_state, s.a, bg, n_phase=32)
    m = [detected_moments(s.steady_state, s.a, bg.at_phase(p)) for p in 2 * np.pi * np.arange(32) / 32]
    assert n1 == pytest.approx(np.mean([x[0] for x in m]))
    assert detected_g2_zero(s.steady_state, s.a, bg, n_phase=32) == pytest.approx(np.mean([x[1] for x in m]) / n1**2)
    c = displaced_operator(s.a, bg)
    assert c.shape == s.a.shape


@pytest.mark.parametrize("x", [-1.0, -0.6])
def test_npnr_povm_matches_normal_ordered_g2(paper_rates, x):
    s = _system(paper_rates, x)
    g2 = g2_zero_direct(s.steady_state, s.a)
    det = DetectorModel(1e-3)
    p1 = npnr_click_probability(s.steady_state, det)
    pc = npnr_coincidence_probability(s.steady_state, det)
    assert abs(pc / p1**2 - g2) < 0.01 * g2
    assert npnr_g2(s.steady_state, det) == pytest.approx(pc / p1**2)


def test_coherent_state_closed_form_is_exactly_one():
    for nbar in (1e-4, 0.3, 5.0, 80.0):
        for T in (1e-3, 0.1, 0.9):
            assert coherent_npnr_g2(nbar, T) == 1.0
    assert coherent_click_probability(0.0, 0.5) == 0.0


def test_npnr_on_explicit_coherent_state():
    # a truncated coherent state in a cavity-only basis reproduces the closed forms
    alpha, T = 0.8, 0.05
    ket = coherent_ket(alpha, 40)
    rho = np.outer(ket, ket.conj())
    n = np.arange(40)
    det = DetectorModel(T)
    assert npnr_click_probability(rho, det, n) == pytest.approx(coherent_click_probability(alpha**2, T), rel=1e-12)
    assert npnr_g2(rho, det, n) == pytest.approx(1.0, rel=1e-10)


def test_detector_and_power_helpers(paper_rates):
    d = DetectorModel.from_window(paper_rates, 0.01, 0.1)
    assert d.T == pytest.approx(paper_rates.kappa * 1e-3)
    with pytest.raises(ValueError):
        DetectorModel(1.5)
    om = rabi_from_power(214.0, 214.0, paper_rates)
    assert om == pytest.approx((paper_rates.kappa + paper_rates.gamma) / (2 * np.sqrt(2)))
    np.testing.assert_allclose(rabi_from_power(np.array([0.0, 856.0]), 214.0, paper_rates), [0.0, 2 * om])
    with pytest.raises(ValueError):
        rabi_from_power(-1.0, 214.0, paper_rates)
