"""Semiclassical equilibria, critical pumping and bifurcation structure."""

import numpy as np
import pytest

from ioncavity import semiclassical as sc
from ioncavity.model import SystemParams


def params(**kw):
    base = dict(C=2.0, c=1.0, kappa=1.0, x_eq=5.0, eta_scaled=1.0)
    base.update(kw)
    return SystemParams(**base)


def at_gamma(gamma, **kw):
    kw.setdefault("x_eq", 5.0)
    return params(eta_scaled=kw["x_eq"] * np.sqrt(gamma), **kw)


def test_effective_potential_no_pump():
    p = params(eta_scaled=0.0)
    xs = np.linspace(-4, 4, 9)
    assert np.allclose(sc.effective_potential(xs, p), 0.0)
    assert np.allclose(sc.total_potential(xs, p), 0.5 * xs**2)


def test_effective_potential_vanishes_at_wells():
    p = params(c=1.0, eta_scaled=2.0)
    assert np.isclose(sc.effective_potential(p.x_eq, p), 0.0)
    assert np.isclose(sc.effective_potential(-p.x_eq, p), 0.0)


def test_effective_potential_center_value():
    # Delta_c=0, C=2: Delta_eff(0) = -2 kappa, V_eff(0) = (eta^2/kappa) arctan(2)
    p = params(C=2.0, c=1.0, kappa=1.0, eta_scaled=1.5)
    assert np.isclose(sc.effective_potential(0.0, p), p.eta**2 * np.arctan(2.0))


def test_photon_amplitude_closed_form():
    p = params(eta_scaled=2.0)
    x = 1.3
    d = sc.delta_eff(x, p)
    assert np.isclose(sc.photon_amplitude(x, p), p.eta / (p.kappa - 1j * d))


def test_mean_photon_center():
    # Delta_c=0, C=2, eta_scaled=2, kappa=omega: n = 4/(1+4)
    p = params(C=2.0, c=1.0, kappa=1.0, eta_scaled=2.0)
    assert np.isclose(sc.mean_photon_semiclassical(0.0, p), 0.8)


def test_mean_photon_at_well_and_no_pump():
    p = params(eta_scaled=3.0)
    assert np.isclose(sc.mean_photon_semiclassical(p.x_eq, p), p.eta**2 / p.kappa**2)
    assert sc.mean_photon_semiclassical(1.0, params(eta_scaled=0.0)) == 0.0


def test_center_critical_gamma():
    assert np.isclose(sc.center_critical_gamma(params(C=2.0, c=1.0)), 0.625, atol=1e-12)
    assert np.isclose(sc.center_critical_gamma(params(C=0.5, c=1.0)), 0.625, atol=1e-12)


def test_center_critical_gamma_large_C():
    p = params(C=1e4, c=0.7)
    assert np.isclose(sc.center_critical_gamma(p), 0.7**2 * 1e4 / 4, rtol=1e-3)


def test_side_critical_gamma_closed_form():
    g = sc.side_critical_gamma(params(C=2.0, c=1.0))
    assert np.isclose(g, 1.0 / (3.0**0.75 * np.sqrt(2.0)), atol=1e-12)
    g05 = sc.side_critical_gamma(params(C=0.5, c=1.0))
    assert np.isclose(g05, 1.0 / (3.0**0.75 * np.sqrt(0.5)), atol=1e-12)


def test_side_critical_gamma_general_solver_matches_closed_form():
    # run the general fold solver just off c=1 and compare against the
    # closed form by continuity
    C = 2.0
    g1 = sc.side_critical_gamma(params(C=C, c=1.0))
    g1p = sc.side_critical_gamma(params(C=C, c=1.0 + 1e-8))
    assert abs(g1 - g1p) < 1e-6


def test_side_critical_absent_for_continuous_case():
    # C below C_crit: no fold, continuous transition
    assert sc.side_critical_gamma(params(C=0.4, c=1.0)) is None or sc.transition_type(
        0.4, 1.0
    ) == "continuous"
    assert sc.side_critical_gamma(params(C=1.0, c=5.0)) is None


def test_transition_type():
    assert np.isclose(1.0 / np.sqrt(3.0), 0.57735, atol=1e-5)
    assert sc.transition_type(0.5, 1.0) == "continuous"
    assert sc.transition_type(2.0, 1.0) == "discontinuous"
    assert sc.transition_type(100.0, 5.0) == "continuous"
    assert sc.transition_type(0.578, 1.0) == "discontinuous"
    assert sc.transition_type(0.577, 1.0) == "continuous"


def test_side_equilibria_below_onset_empty():
    g_cs = sc.side_critical_gamma(params())
    assert sc.side_equilibria(at_gamma(0.9 * g_cs)) == []


def test_side_equilibria_double_root_at_fold():
    # c=1, C=2: at the fold the two side roots merge at z = (3 C^2)^(-1/4)
    C = 2.0
    g_cs = 1.0 / (3.0**0.75 * np.sqrt(C))
    z_fold = (3.0 * C**2) ** -0.25
    eqs = sc.side_equilibria(at_gamma(g_cs * (1 + 1e-10), C=C))
    assert len(eqs) == 2
    zs = 1.0 - (np.array([e.x_bar for e in eqs]) / 5.0) ** 2
    assert np.allclose(zs, z_fold, atol=1e-4)
    assert all(e.stable and e.branch == "side" for e in eqs)


def test_side_equilibria_strong_pumping_limit():
    eqs = sc.side_equilibria(at_gamma(50.0))
    assert eqs
    assert eqs[-1].x_bar > 0.99 * 5.0


def test_side_equilibria_amplitude_consistency():
    for e in sc.side_equilibria(at_gamma(0.5)):
        p = at_gamma(0.5)
        assert np.isclose(e.photon_amplitude, sc.photon_amplitude(e.x_bar, p))
        assert 0.0 < e.x_bar < p.x_eq


def test_minima_are_stationary():
    for gamma in (0.2, 0.4, 0.7):
        p = at_gamma(gamma)
        h = 1e-5
        for x in sc._local_minima(p):
            vm = sc.total_potential(max(x - h, 0.0), p)
            v0 = sc.total_potential(x, p)
            vp = sc.total_potential(x + h, p)
            if x > h:
                assert abs((vp - vm) / (2 * h)) < 1e-3
            assert vp - 2 * v0 + vm > 0.0


def test_grid_oracle_agreement():
    # dense grid minimization agrees with the root-seeded minima
    rng = np.random.default_rng(7)
    for _ in range(50):
        p = params(
            C=float(rng.uniform(0.2, 4.0)),
            c=float(rng.uniform(0.2, 2.0)),
            kappa=float(rng.uniform(0.3, 2.0)),
            x_eq=float(rng.uniform(2.0, 6.0)),
            eta_scaled=float(rng.uniform(0.1, 6.0)),
        )
        xs = np.linspace(0.0, p.x_eq, 10001)
        vs = sc.total_potential(xs, p)
        x_grid = xs[np.argmin(vs)]
        x_best = sc._global_minimum(p)
        assert abs(x_best - x_grid) < 1e-3 * max(1.0, p.x_eq)


def test_scale_invariance_in_gamma():
    # branches depend on (C, c, gamma) only
    g = 0.45
    a = sc._global_minimum(at_gamma(g, C=2.0, c=1.0, kappa=1.0))
    b = sc._global_minimum(at_gamma(g, C=2.0, c=1.0, kappa=2.0))
    assert abs(a - b) < 1e-10


def test_bifurcation_window_structure():
    p = params(C=2.0, c=1.0, x_eq=3.0)
    g_cs = sc.side_critical_gamma(p)
    g_c0 = sc.center_critical_gamma(p)
    assert g_cs < g_c0
    eta = np.linspace(0.5, 3.5, 61)
    branch = sc.bifurcation_scan(p, eta)
    gammas = (eta / 3.0) ** 2
    for g, minima in zip(gammas, branch.minima):
        if g < g_cs - 1e-3:
            assert minima == [0.0]
        elif g_cs + 1e-3 < g < g_c0 - 1e-3:
            assert len(minima) == 2 and minima[0] == 0.0  # coexistence
        elif g > g_c0 + 1e-3:
            assert all(m > 0 for m in minima)  # center destabilized


def test_bifurcation_continuous_case():
    p = params(C=0.5, c=1.0, x_eq=3.0)
    eta = np.linspace(0.5, 3.5, 61)
    branch = sc.bifurcation_scan(p, eta)
    assert branch.transition == "continuous"
    assert np.all(np.diff(branch.global_minimum) > -1e-9)  # single rising branch


def test_bifurcation_switch_point():
    p = params(C=2.0, c=1.0, x_eq=3.0)
    eta = np.linspace(0.5, 3.5, 31)
    branch = sc.bifurcation_scan(p, eta)
    assert branch.global_min_switch is not None
    g_switch = (branch.global_min_switch / 3.0) ** 2
    assert sc.side_critical_gamma(p) < g_switch < sc.center_critical_gamma(p)


def test_bifurcation_requires_monotone_grid():
    with pytest.raises(ValueError):
        sc.bifurcation_scan(params(), np.array([1.0, 3.0, 2.0]))


def test_critical_gammas_coincide_at_ccrit():
    c = 1.0
    C_crit = 1.0 / np.sqrt(c * (4.0 - c))
    for C in (C_crit * 1.001, C_crit * 1.01):
        g_cs = sc.side_critical_gamma(params(C=C, c=c))
        g_c0 = sc.center_critical_gamma(params(C=C, c=c))
        assert g_cs <= g_c0 + 1e-12
    g_cs = sc.side_critical_gamma(params(C=C_crit * (1 + 1e-7), c=c))
    g_c0 = sc.center_critical_gamma(params(C=C_crit * (1 + 1e-7), c=c))
    assert abs(g_cs - g_c0) < 1e-4


def test_gamma_eta_conversion_roundtrip():
    assert np.isclose(sc.gamma_to_eta_scaled(0.625, 5.0), np.sqrt(0.625) * 5.0)
    p = at_gamma(0.31)
    assert np.isclose(p.gamma, 0.31)
