import numpy as np
import pytest
from scipy import optimize, stats

from stochord import (DomainError, Empirical, GridSpec, Normal, NormalMixture,
                      ParameterError, epsilon_index, gamma_index, index_report,
                      optimal_copula_eval, pi_index, rearranged_quantile,
                      rho_index, vartheta_index)


def two_normal_gamma(m1, s1, m2, s2):
    """Closed-form measure of {t : m1 + s1 z(t) > m2 + s2 z(t)}."""
    if s1 == s2:
        return 1.0 if m1 > m2 else 0.0
    zstar = (m2 - m1) / (s1 - s2)
    p = stats.norm.cdf(zstar)
    return 1.0 - p if s1 > s2 else p


@pytest.mark.parametrize("params", [
    (100, 10, 116, 20), (100, 10, 105, 20), (0, 1, 0, 2), (0, 2, 1, 1),
    (3, 1.5, 2.5, 0.7),
])
def test_gamma_two_normals_closed_form(params):
    m1, s1, m2, s2 = params
    got = gamma_index(Normal(m1, s1), Normal(m2, s2), GridSpec(2001))
    assert abs(got - two_normal_gamma(m1, s1, m2, s2)) < 2 / 1999


def test_gamma_complement_sums_to_one():
    F, G = Normal(0.3, 1.1), NormalMixture([(0.4, -1.0, 0.6), (0.6, 1.5, 2.0)])
    grid = GridSpec(1001)
    assert abs(gamma_index(F, G, grid) + gamma_index(G, F, grid) - 1.0) \
        < 2 / 999


def test_gamma_dominated_pair_is_zero():
    assert gamma_index(Normal(0, 1), Normal(3, 1), GridSpec(1001)) == 0.0
    assert gamma_index(Normal(3, 1), Normal(0, 1), GridSpec(1001)) == 1.0


def test_rho_two_normals_closed_form():
    # P(X > Y) = Phi((mF - mG)/sqrt(sF^2 + sG^2)) for independent normals
    for (m1, s1, m2, s2) in [(100, 10, 116, 20), (100, 10, 105, 20),
                             (0, 1, 1, 3)]:
        got = rho_index(Normal(m1, s1), Normal(m2, s2), GridSpec(4001))
        ref = stats.norm.cdf((m1 - m2) / np.hypot(s1, s2))
        assert abs(got - ref) < 5e-4


def test_rho_empirical_is_exact_pair_count():
    rng = np.random.default_rng(11)
    xs, ys = rng.normal(size=40), rng.normal(0.4, 1.3, size=60)
    got = rho_index(Empirical(xs), Empirical(ys))
    ref = np.mean(xs[:, None] > ys[None, :])
    assert got == ref


def test_pi_matches_direct_sup_search():
    F = Normal(0.0, 1.0)
    G = NormalMixture([(0.05, -5.0, 1.4), (0.95, 1.0, 1.0)])
    got = pi_index(F, G)
    neg_gap = lambda x: float(F.cdf(x) - G.cdf(x))
    best = -min(optimize.minimize_scalar(
        neg_gap, bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12}).fun
        for lo, hi in [(-12, -2), (-2, 2), (2, 12)])
    assert abs(got - best) < 1e-9


def test_pi_of_dominating_pair_is_zero():
    # identical scale, shifted up: G's cdf never exceeds F's
    assert pi_index(Normal(1.0, 1.0), Normal(3.0, 1.0)) == 0.0


def test_pi_empirical_is_exact():
    xs = np.array([1.0, 2.0, 3.0, 10.0])
    ys = np.array([0.5, 2.5, 9.0, 11.0])
    F, G = Empirical(xs), Empirical(ys)
    zs = np.concatenate([xs, ys])
    ref = max(float(G.cdf(z) - F.cdf(z)) for z in zs)
    ref = max(ref, max(float(G.cdf(z - 1e-9) - F.cdf(z - 1e-9)) for z in zs))
    assert abs(pi_index(F, G) - ref) < 1e-12


def test_vartheta_identity():
    F, G = Normal(0, 1), Normal(0.5, 2)
    assert vartheta_index(F, G) == pytest.approx(1.0 - pi_index(G, F), abs=0)


def test_epsilon_symmetric_pair_is_half():
    # equal means, different scales: positive and negative areas match
    got = epsilon_index(Normal(0, 1), Normal(0, 2))
    assert got == pytest.approx(0.5, abs=1e-9)


def test_epsilon_dominated_and_identical():
    assert epsilon_index(Normal(0, 1), Normal(2, 1)) < 1e-9
    assert epsilon_index(Normal(0, 1), Normal(0, 1)) is None
    xs = np.array([1.0, 2.0, 5.0])
    assert epsilon_index(Empirical(xs), Empirical(xs)) is None


def test_epsilon_empirical_matches_analytic_limit():
    rng = np.random.default_rng(4)
    F, G = Normal(0, 1), Normal(0.3, 1.8)
    xs, ys = F.sample(60000, 1), G.sample(60000, 2)
    exact = epsilon_index(Empirical(xs), Empirical(ys))
    assert abs(exact - epsilon_index(F, G)) < 0.01


def test_epsilon_affine_invariance():
    xs = np.random.default_rng(8).normal(size=50)
    ys = np.random.default_rng(9).normal(0.3, 1.7, size=50)
    base = epsilon_index(Empirical(xs), Empirical(ys))
    moved = epsilon_index(Empirical(3.0 * xs - 2.0), Empirical(3.0 * ys - 2.0))
    assert moved == pytest.approx(base, abs=1e-12)


def test_rearranged_quantile_measure_identity():
    F, G = Normal(100, 10), Normal(116, 20)
    pi0 = pi_index(F, G)
    ts = GridSpec(1001).interior()
    qf = np.asarray(F.quantile(ts))
    meas = float(np.mean(qf > rearranged_quantile(G, pi0, ts)))
    assert abs(meas - pi0) < 2 / 1001


def test_rearranged_quantile_zero_shift_is_quantile():
    G = Normal(1, 2)
    ts = np.linspace(0.01, 0.99, 23)
    assert np.allclose(rearranged_quantile(G, 0.0, ts), G.quantile(ts),
                       atol=0)


def test_rearranged_quantile_boundary():
    G = Normal(0, 1)
    assert rearranged_quantile(G, 0.25, 0.75) == -np.inf
    E = Empirical([5.0, 7.0, 9.0])
    assert rearranged_quantile(E, 0.25, 0.75) == 5.0
    with pytest.raises(DomainError):
        rearranged_quantile(G, 1.0, 0.5)
    with pytest.raises(DomainError):
        rearranged_quantile(G, 0.2, 1.0)


def test_copula_margins_and_bounds():
    rng = np.random.default_rng(15)
    us = rng.uniform(0, 1, 200)
    for pi0 in (0.0, 0.1, 0.45, 0.8):
        assert np.allclose(optimal_copula_eval(pi0, us, 1.0), us, atol=1e-15)
        assert np.allclose(optimal_copula_eval(pi0, 1.0, us), us, atol=1e-15)
        assert np.all(optimal_copula_eval(pi0, us, 0.0) == 0.0)
        assert np.all(optimal_copula_eval(pi0, 0.0, us) == 0.0)
        xs, ys = rng.uniform(0, 1, 300), rng.uniform(0, 1, 300)
        c = optimal_copula_eval(pi0, xs, ys)
        assert np.all(c <= np.minimum(xs, ys) + 1e-15)
        assert np.all(c >= np.maximum(xs + ys - 1.0, 0.0) - 1e-15)


def test_copula_comonotone_at_zero():
    xs = np.array([0.2, 0.7, 0.5])
    ys = np.array([0.6, 0.3, 0.5])
    assert np.array_equal(optimal_copula_eval(0.0, xs, ys),
                          np.minimum(xs, ys))


def test_copula_coupling_exceedance_mass():
    # the copula's P(X > Y) under uniform margins equals pi0: check by
    # Monte Carlo differencing of the rectangle {u > v}
    pi0 = 0.3
    m = 400
    us = (np.arange(m) + 0.5) / m
    # P(U <= u, V <= u) along the diagonal recovers P(U > V) via
    # inclusion-exclusion on a fine partition
    grid = np.linspace(0, 1, 801)
    cc = optimal_copula_eval(pi0, grid[:, None], grid[None, :])
    dens = np.diff(np.diff(cc, axis=0), axis=1)
    above = np.triu(np.ones((800, 800)), k=1)  # cells with u > v
    mass_above = float(np.sum(dens * above.T))
    assert abs(mass_above - pi0) < 0.01


def test_grid_spec_validation_and_interior():
    with pytest.raises(ParameterError):
        GridSpec(2)
    with pytest.raises(ParameterError):
        GridSpec(1001, kind="log")
    g = GridSpec(11)
    assert np.allclose(g.interior(), np.arange(1, 10) / 10)
    r = GridSpec(5, kind="rank")
    assert np.allclose(r.interior(), (2 * np.arange(1, 6) - 1) / 10)


def test_index_report_consistency_and_csv():
    F, G = Normal(100, 10), Normal(116, 20)
    rep = index_report(F, G)
    assert rep.pi <= rep.gamma + 2 / 999 + 1e-9
    assert rep.pi <= rep.rho + 2 / 999 + 1e-9
    assert rep.vartheta == pytest.approx(1 - pi_index(G, F))
    row = rep.to_csv_row()
    assert len(row) == len(rep.csv_header())
    payload = rep.to_json()
    assert set(("gamma", "rho", "pi", "vartheta", "epsilon")) <= set(payload)


def test_index_report_identical_models():
    rep = index_report(Normal(0, 1), Normal(0, 1))
    assert rep.gamma == 0.0
    assert rep.pi == pytest.approx(0.0, abs=1e-12)
    assert rep.epsilon is None
    assert not rep.epsilon_defined
