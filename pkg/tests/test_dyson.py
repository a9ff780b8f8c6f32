import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from rmtldp.dyson import (
    CovarianceModel,
    DegenerateModelError,
    detect_degenerate,
    edge_solve,
    f_rho,
    g_bar_sigma,
    g_sigma,
    h_rho,
    sigma_density,
    sigma_measure,
    support_window,
    theta_max,
    thresholds,
)
from rmtldp.measures import SpectralMeasure, remove_zero_atom


def wishart(alpha, sign=1.0, beta=1, law="gaussian"):
    return CovarianceModel(SpectralMeasure.point_mass(sign), alpha, beta, law)


def semicircle_model(alpha=1.0):
    return CovarianceModel(SpectralMeasure.semicircle(2.0, 1.0), alpha)


def mp_right_edge(alpha):
    return (1.0 + 1.0 / math.sqrt(alpha)) ** 2


def mp_density(x, alpha=1.0):
    # density of the limit of (1/M) Z^T Z eigenvalues, M/N -> alpha
    lo = (1.0 - 1.0 / math.sqrt(alpha)) ** 2
    hi = mp_right_edge(alpha)
    if not lo < x < hi:
        return 0.0
    return alpha * math.sqrt((x - lo) * (hi - x)) / (2.0 * math.pi * x)


class TestModelValidation:
    def test_alpha_positive(self):
        with pytest.raises(ValueError):
            CovarianceModel(SpectralMeasure.point_mass(1.0), 0.0)

    def test_non_gaussian_needs_nonnegative_support(self):
        with pytest.raises(ValueError):
            CovarianceModel(SpectralMeasure.point_mass(-1.0), 1.0, 1, "rademacher")

    def test_beta_law_consistency(self):
        with pytest.raises(ValueError):
            CovarianceModel(SpectralMeasure.point_mass(1.0), 1.0, 2, "gaussian")
        with pytest.raises(ValueError):
            CovarianceModel(SpectralMeasure.point_mass(1.0), 1.0, 1, "complex_gaussian")
        CovarianceModel(SpectralMeasure.point_mass(1.0), 1.0, 2, "complex_rademacher")


class TestHRho:
    def test_wishart_value(self):
        assert h_rho(wishart(1.0), 0.5) == pytest.approx(4.0, rel=1e-14)

    def test_negative_atom_value(self):
        assert h_rho(wishart(2.0, sign=-1.0), 1.0) == pytest.approx(1.0 - 2.0 / 3.0, rel=1e-14)

    def test_semicircle_at_theta_max(self):
        model = semicircle_model()
        assert h_rho(model, 1.0 / 3.0) == pytest.approx(18.0, abs=1e-4)

    def test_domain_rejection(self):
        with pytest.raises(ValueError):
            h_rho(wishart(1.0), 0.0)
        with pytest.raises(ValueError):
            h_rho(wishart(1.0), 1.0)  # theta_max with an atom at the edge

    def test_matches_direct_quadrature(self):
        model = semicircle_model()
        for theta in (0.05, 0.2, 0.3):
            a = model.alpha
            direct = 1.0 / theta + model.rho.integrate(
                lambda u: a * u / (a - theta * np.asarray(u))
            )
            assert h_rho(model, theta) == pytest.approx(direct, rel=1e-10)


class TestThresholds:
    def test_atom_at_positive_edge(self):
        tmax, x_c = thresholds(wishart(2.0))
        assert tmax == 2.0
        assert x_c == math.inf

    def test_negative_support(self):
        tmax, x_c = thresholds(wishart(1.0, sign=-1.0))
        assert tmax == math.inf and x_c == math.inf

    def test_semicircle(self):
        tmax, x_c = thresholds(semicircle_model())
        assert tmax == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert x_c == pytest.approx(18.0, abs=1e-4)


class TestDegenerate:
    def test_examples(self):
        assert detect_degenerate(wishart(0.5, sign=-1.0)) is True
        assert detect_degenerate(wishart(2.0, sign=-1.0)) is False
        assert detect_degenerate(wishart(0.5)) is False

    @pytest.mark.parametrize("alpha", [0.2, 0.7, 1.0, 1.0001, 3.0])
    def test_matches_alpha_condition_without_zero_atom(self, alpha):
        # with rho({0}) = 0 and r(rho) <= 0, degeneracy is exactly alpha <= 1
        assert detect_degenerate(wishart(alpha, sign=-1.0)) == (alpha <= 1.0)

    def test_zero_atom_correction(self):
        rho = SpectralMeasure.from_atoms([0.0, -1.0], [0.5, 0.5])
        assert detect_degenerate(CovarianceModel(rho, 1.5)) is True
        assert detect_degenerate(CovarianceModel(rho, 2.5)) is False


class TestEdgeSolve:
    def test_wishart_symmetric_case(self):
        edge = edge_solve(wishart(1.0))
        assert edge.theta_c == pytest.approx(0.5, abs=1e-12)
        assert edge.r_sigma == pytest.approx(4.0, abs=1e-12)
        assert edge.case_tag == "pos_edge_infinite_xc"

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_marchenko_pastur_edges(self, alpha):
        edge = edge_solve(wishart(alpha))
        assert edge.r_sigma == pytest.approx(mp_right_edge(alpha), abs=1e-8)

    def test_negative_wishart(self):
        edge = edge_solve(wishart(2.0, sign=-1.0))
        assert edge.theta_c == pytest.approx(2.0 * (1.0 + math.sqrt(2.0)), abs=1e-8)
        assert edge.r_sigma == pytest.approx(-((1.0 - 1.0 / math.sqrt(2.0)) ** 2), abs=1e-8)
        assert edge.case_tag == "nonpos_edge"

    def test_cross_check_by_direct_minimization(self):
        model = semicircle_model()
        res = minimize_scalar(lambda t: h_rho(model, t), bounds=(1e-6, 1.0 / 3.0 - 1e-9),
                              method="bounded", options={"xatol": 1e-12})
        edge = edge_solve(model)
        assert edge.r_sigma == pytest.approx(res.fun, abs=1e-8)
        assert edge.theta_c == pytest.approx(res.x, abs=1e-6)
        assert edge.case_tag == "pos_edge_finite_xc"

    def test_degenerate_flagged(self):
        edge = edge_solve(wishart(0.5, sign=-1.0))
        assert edge.degenerate is True
        assert edge.theta_c is None and edge.r_sigma is None


class TestBranches:
    def test_g_sigma_examples(self):
        model = wishart(1.0)
        edge = edge_solve(model)
        assert g_sigma(edge, model, 4.0) == pytest.approx(0.5, abs=1e-10)
        assert g_sigma(edge, model, 5.0) == pytest.approx((5.0 - math.sqrt(5.0)) / 10.0, abs=1e-12)
        assert g_sigma(edge, model, 100.0) == pytest.approx(0.01, rel=0.02)

    def test_g_bar_examples(self):
        model = wishart(1.0)
        edge = edge_solve(model)
        assert g_bar_sigma(edge, model, 5.0) == pytest.approx((5.0 + math.sqrt(5.0)) / 10.0, abs=1e-12)

    def test_g_bar_capped_beyond_x_c(self):
        model = semicircle_model()
        edge = edge_solve(model)
        assert g_bar_sigma(edge, model, 25.0) == edge.theta_max == pytest.approx(1.0 / 3.0)
        assert g_bar_sigma(edge, model, 18.0) == edge.theta_max

    def test_g_bar_negative_support_divergence(self):
        model = wishart(2.0, sign=-1.0)
        edge = edge_solve(model)
        assert g_bar_sigma(edge, model, -0.01) > g_bar_sigma(edge, model, -0.05)
        with pytest.raises(ValueError):
            g_bar_sigma(edge, model, 0.0)

    def test_below_edge_rejected(self):
        model = wishart(1.0)
        edge = edge_solve(model)
        with pytest.raises(ValueError):
            g_sigma(edge, model, 3.0)
        with pytest.raises(ValueError):
            g_bar_sigma(edge, model, 3.0)

    def test_degenerate_rejected(self):
        model = wishart(0.5, sign=-1.0)
        edge = edge_solve(model)
        with pytest.raises(DegenerateModelError):
            g_sigma(edge, model, 1.0)


class TestBranchInvariants:
    @pytest.mark.parametrize("make_model", [
        lambda: wishart(1.0),
        lambda: wishart(2.0, sign=-1.0),
        lambda: semicircle_model(),
    ])
    def test_both_branches_solve_dyson(self, make_model):
        model = make_model()
        edge = edge_solve(model)
        hi = min(edge.x_c, edge.r_sigma + 10.0)
        if model.rho.right_edge <= 0.0:
            hi = min(hi, -1e-3)
        for x in np.linspace(edge.r_sigma + 1e-4, hi, 12):
            assert h_rho(model, g_sigma(edge, model, x)) == pytest.approx(x, abs=1e-9)
            assert h_rho(model, g_bar_sigma(edge, model, x)) == pytest.approx(x, abs=1e-9)

    def test_branch_ordering_and_monotonicity(self):
        model = wishart(1.0)
        edge = edge_solve(model)
        xs = np.linspace(edge.r_sigma + 1e-6, edge.r_sigma + 8.0, 40)
        g = np.array([g_sigma(edge, model, x) for x in xs])
        gb = np.array([g_bar_sigma(edge, model, x) for x in xs])
        assert np.all(gb > g)
        assert np.all(np.diff(g) < 0)
        assert np.all(np.diff(gb) > 0)
        assert abs(g_sigma(edge, model, edge.r_sigma) - g_bar_sigma(edge, model, edge.r_sigma)) < 1e-8

    @pytest.mark.parametrize("make_model", [
        lambda: wishart(1.0),
        lambda: semicircle_model(),
        lambda: wishart(2.0, sign=-1.0),
    ])
    def test_f_rho_increasing_with_limit_minus_one(self, make_model):
        model = make_model()
        tmax = theta_max(model)
        hi = 0.999 * tmax if math.isfinite(tmax) else 50.0
        thetas = np.linspace(1e-6, hi, 100)
        vals = np.array([f_rho(model, t) for t in thetas])
        assert np.all(np.diff(vals) > 0)
        assert vals[0] == pytest.approx(-1.0, abs=1e-4)


class TestRemoveZeroAtomIdentity:
    def test_h_invariance(self):
        rho = SpectralMeasure.from_atoms([0.0, -1.0], [0.5, 0.5])
        tau, alpha_prime = remove_zero_atom(rho, 3.0)
        model = CovarianceModel(rho, 3.0)
        model_tau = CovarianceModel(tau, alpha_prime)
        for theta in (0.1, 0.5):
            assert h_rho(model, theta) == pytest.approx(h_rho(model_tau, theta), abs=1e-12)

    def test_h_invariance_on_grid(self):
        rho = SpectralMeasure.from_atoms([0.0, -2.0, -0.5], [0.25, 0.5, 0.25])
        tau, alpha_prime = remove_zero_atom(rho, 4.0)
        model = CovarianceModel(rho, 4.0)
        model_tau = CovarianceModel(tau, alpha_prime)
        for theta in np.linspace(0.05, 3.0, 17):
            assert h_rho(model, theta) == pytest.approx(h_rho(model_tau, theta), abs=1e-10)


class TestSupportWindow:
    def test_mp1_hard_edge(self):
        model = wishart(1.0)
        win = support_window(model)
        assert win.left == 0.0
        assert win.right == pytest.approx(4.0, abs=1e-10)
        assert win.zero_atom == 0.0

    def test_mp2_soft_left_edge(self):
        win = support_window(wishart(2.0))
        assert win.left == pytest.approx((1.0 - 1.0 / math.sqrt(2.0)) ** 2, abs=1e-10)

    def test_negative_model_window(self):
        win = support_window(wishart(2.0, sign=-1.0))
        assert win.left == pytest.approx(-((1.0 + 1.0 / math.sqrt(2.0)) ** 2), abs=1e-10)
        assert win.right == pytest.approx(-((1.0 - 1.0 / math.sqrt(2.0)) ** 2), abs=1e-10)

    def test_zero_atom_for_small_alpha(self):
        win = support_window(wishart(0.5))
        assert win.zero_atom == pytest.approx(0.5, abs=1e-14)
        assert win.left == 0.0


class TestMixedSignSpectrum:
    # two-atom population spectra (-2K and 2, equal weight) at alpha = 4:
    # the top edge of the limit decreases in K and turns negative around
    # K ~ 15 even though the population edge stays at +2

    def make(self, k):
        rho = SpectralMeasure.from_atoms([-2.0 * k, 2.0], [0.5, 0.5])
        return CovarianceModel(rho, 4.0)

    def test_edge_decreases_and_changes_sign(self):
        edges = [edge_solve(self.make(k)).r_sigma for k in (1.0, 3.0, 10.0, 20.0)]
        assert all(a > b for a, b in zip(edges, edges[1:]))
        assert edges[0] > 0.0 > edges[-1]

    def test_negative_edge_branches_still_solve(self):
        model = self.make(20.0)
        edge = edge_solve(model)
        assert edge.r_sigma < 0.0
        assert edge.case_tag == "pos_edge_infinite_xc"
        for x in (edge.r_sigma + 0.3, 0.0, 1.5):
            assert h_rho(model, g_sigma(edge, model, x)) == pytest.approx(x, abs=1e-9)
            assert h_rho(model, g_bar_sigma(edge, model, x)) == pytest.approx(x, abs=1e-9)

    def test_wide_atoms_merge_into_one_band(self):
        # for alpha = 4 the free components overlap: the density bridges the
        # region between the population atoms instead of leaving a gap
        model = self.make(3.0)
        assert sigma_density(model, -3.0, 1e-5) > 0.01
        sm = sigma_measure(model, 1200)
        assert abs(sm.total_mass() - 1.0) < 1e-12
        assert sm.raw_mass_defect < 1e-3


class TestDisconnectedSupport:
    # two separated positive population atoms at small alpha give a large
    # zero atom plus two separated spectral bands of equal mass; the split
    # is pinned by a Monte Carlo oracle (exactly half the nonzero
    # eigenvalues sit in each band: cdf(18) = 0.95)

    def make(self):
        rho = SpectralMeasure.from_atoms([1.0, 4.0], [0.5, 0.5])
        return CovarianceModel(rho, 0.1)

    def test_gap_density_vanishes(self):
        model = self.make()
        edge = edge_solve(model)
        assert sigma_density(model, 18.0, 1e-6, edge) <= 1e-6
        assert sigma_density(model, 10.0, 1e-6, edge) > 1e-3
        assert sigma_density(model, 40.0, 1e-6, edge) > 1e-3

    def test_band_masses_match_sampling_oracle(self):
        sm = sigma_measure(self.make(), 2000)
        assert sm.atom_mass(0.0) == pytest.approx(0.9, abs=1e-12)
        assert sm.raw_mass_defect < 1e-4
        assert sm.cdf(18.0) == pytest.approx(0.95, abs=1e-3)


class TestRandomizedAtomicModels:
    # seeded random population spectra: the solved branch structure must
    # satisfy its defining identities regardless of the atom layout

    @pytest.mark.parametrize("trial", range(12))
    def test_branch_identities(self, trial):
        rng = np.random.default_rng(trial)
        k = int(rng.integers(1, 5))
        locs = rng.uniform(-3.0, 3.0, k)
        w = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
        rho = SpectralMeasure.from_atoms(locs, w / w.sum())
        alpha = float(rng.uniform(0.2, 4.0))
        model = CovarianceModel(rho, alpha)
        if detect_degenerate(model):
            assert rho.right_edge <= 0.0
            assert alpha * (1.0 - rho.atom_mass(0.0)) <= 1.0
            return
        edge = edge_solve(model)
        assert edge.theta_c > 0.0
        hi = edge.r_sigma + 1.5
        if rho.right_edge <= 0.0:
            hi = min(hi, 0.5 * edge.r_sigma) if edge.r_sigma < 0 else -1e-6
        for x in np.linspace(edge.r_sigma + 1e-5, hi, 4):
            g = g_sigma(edge, model, x)
            gb = g_bar_sigma(edge, model, x)
            assert gb >= g
            assert h_rho(model, g) == pytest.approx(x, abs=1e-8)
            assert h_rho(model, gb) == pytest.approx(x, abs=1e-8)


class TestMixedAtomAndDensity:
    def make_model(self):
        # population law: half an atom at 0.5, half a semicircle around 2
        obj = {
            "atoms": [[0.5, 0.5]],
            "density": {"kind": "semicircle",
                        "params": {"center": 2.0, "radius": 0.8, "mass": 0.5},
                        "support": [1.2, 2.8], "nodes": 128},
        }
        return CovarianceModel(SpectralMeasure.from_json(obj), 1.5)

    def test_solves_and_normalizes(self):
        model = self.make_model()
        assert abs(model.rho.total_mass() - 1.0) < 1e-12
        edge = edge_solve(model)
        assert edge.r_sigma > 2.8  # top edge beyond the population support
        for x in (edge.r_sigma + 0.2, edge.r_sigma + 1.0):
            assert h_rho(model, g_sigma(edge, model, x)) == pytest.approx(x, abs=1e-9)
            assert h_rho(model, g_bar_sigma(edge, model, x)) == pytest.approx(x, abs=1e-9)

    def test_grid_measure_quality(self):
        sm = sigma_measure(self.make_model(), 1200)
        assert abs(sm.total_mass() - 1.0) < 1e-12
        assert sm.raw_mass_defect < 1e-3


class TestSigmaDensity:
    def test_mp1_bulk_value(self):
        model = wishart(1.0)
        val = sigma_density(model, 2.0, 1e-4)
        assert val == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-3)

    def test_mp1_outside_support(self):
        assert sigma_density(wishart(1.0), 5.0, 1e-4) <= 1e-3

    def test_mp1_curve(self):
        model = wishart(1.0)
        xs = np.linspace(0.2, 3.8, 25)
        vals = sigma_density(model, xs, 1e-4)
        oracle = np.array([mp_density(x) for x in xs])
        assert np.max(np.abs(vals - oracle)) < 1e-3

    def test_eta_rejected(self):
        with pytest.raises(ValueError):
            sigma_density(wishart(1.0), 2.0, 0.0)


class TestSigmaMeasure:
    def test_mass_normalized(self):
        sm = sigma_measure(wishart(1.0), 800)
        assert abs(sm.total_mass() - 1.0) < 1e-12
        assert sm.raw_mass_defect < 1e-3

    def test_cdf_matches_mp1(self):
        sm = sigma_measure(wishart(1.0), 1500)
        from scipy import integrate
        for x in (0.5, 1.0, 2.0, 3.5):
            oracle, _ = integrate.quad(mp_density, 0.0, x, limit=200)
            assert sm.cdf(x) == pytest.approx(oracle, abs=2e-3)

    def test_zero_atom_included(self):
        sm = sigma_measure(wishart(0.5), 600)
        assert sm.atom_mass(0.0) == pytest.approx(0.5, abs=1e-12)
        assert abs(sm.total_mass() - 1.0) < 1e-12

    def test_negative_model_support(self):
        sm = sigma_measure(wishart(2.0, sign=-1.0), 600)
        lo, hi = sm.edges()
        assert lo == pytest.approx(-((1.0 + 1.0 / math.sqrt(2.0)) ** 2), abs=1e-8)
        assert hi == pytest.approx(-((1.0 - 1.0 / math.sqrt(2.0)) ** 2), abs=1e-8)
