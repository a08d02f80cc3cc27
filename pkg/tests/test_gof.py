import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import model_trace
from v2vpl import gof
from v2vpl.estimation import fit_all
from v2vpl.gof import GofWeights, grg_mape, pcc_mape, rank_models, rho_grg, rho_mape, rho_pcc, rmse
from v2vpl.propagation import ProposedParams


def grg_bruteforce(x0, xi, rho=0.5):
    """Loop-by-loop Deng grade, written out from the definition."""
    deltas = [abs(a - b) for a, b in zip(x0, xi)]
    lo, hi = min(deltas), max(deltas)
    if hi == 0:
        return 1.0
    return sum((lo + rho * hi) / (dk + rho * hi) for dk in deltas) / len(deltas)


class TestRmse:
    def test_identical(self):
        assert rmse([1, 2, 3], [1, 2, 3]) == 0.0

    def test_hand(self):
        assert rmse([0, 0], [3, -3]) == pytest.approx(3.0, abs=1e-12)

    @given(c=st.floats(-50, 50))
    def test_offset(self, c):
        x = np.linspace(60, 100, 17)
        assert rmse(x, x + c) == pytest.approx(abs(c), abs=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rmse([1, 2], [1])


class TestRhoMape:
    def test_exact(self):
        assert rho_mape([80, 90], [80, 90]) == 1.0

    def test_hand(self):
        assert rho_mape([100, 100], [90, 110]) == pytest.approx(0.9, abs=1e-12)

    def test_double(self):
        assert rho_mape([50, 80, 99], [100, 160, 198]) == pytest.approx(0.0, abs=1e-12)

    def test_zero_measured(self):
        with pytest.raises(ValueError):
            rho_mape([0, 1], [1, 1])

    def test_fold_back(self):
        # 300% error folds back to |1 - 3| = 2
        assert rho_mape([10, 10], [40, 40]) == pytest.approx(2.0)
        assert gof.mape([10, 10], [40, 40]) == pytest.approx(3.0)


class TestRhoGrg:
    def test_identical(self):
        assert rho_grg([70, 80, 90], [70, 80, 90]) == 1.0

    def test_hand(self):
        # deltas [0, 1]
        assert rho_grg([5.0, 5.0], [5.0, 6.0], 0.5) == pytest.approx(2 / 3, abs=1e-12)

    @settings(max_examples=100)
    @given(xs=st.lists(st.tuples(st.floats(50, 120), st.floats(-20, 20)), min_size=1, max_size=40),
           rho=st.floats(0.05, 1.0))
    def test_matches_bruteforce_and_range(self, xs, rho):
        x0 = [a for a, _ in xs]
        xi = [a + e for a, e in xs]
        g = rho_grg(x0, xi, rho)
        assert 0 < g <= 1
        if max(abs(e) for _, e in xs) > 1e-9:
            assert g == pytest.approx(grg_bruteforce(x0, xi, rho), abs=1e-12)

    def test_one_only_when_identical(self):
        assert rho_grg([70, 80, 90], [70, 80, 90.5]) < 1

    def test_bad_coeff(self):
        with pytest.raises(ValueError):
            rho_grg([1, 2], [1, 2], 0.0)


class TestRhoPcc:
    x = np.array([70.0, 75.0, 79.0, 88.0, 91.0])

    def test_identical(self):
        assert rho_pcc(self.x, self.x) == pytest.approx(1.0, abs=1e-12)

    def test_anti(self):
        assert rho_pcc(self.x, -self.x) == pytest.approx(0.0, abs=1e-12)

    @given(a=st.floats(0.01, 100), b=st.floats(-100, 100))
    def test_affine(self, a, b):
        assert rho_pcc(self.x, a * self.x + b) == pytest.approx(1.0, abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(ValueError):
            rho_pcc(self.x, np.full(5, 3.0))

    @settings(max_examples=50)
    @given(seed=st.integers(0, 1000), a=st.floats(0.1, 10), b=st.floats(-50, 50))
    def test_invariance_against_numpy(self, seed, a, b):
        rng = np.random.default_rng(seed)
        m, p = rng.normal(80, 5, 30), rng.normal(80, 5, 30)
        r = np.corrcoef(m, p)[0, 1]
        assert rho_pcc(m, p) == pytest.approx((r + 1) / 2, abs=1e-12)
        assert rho_pcc(a * m + b, p) == pytest.approx(rho_pcc(m, p), abs=1e-12)


class TestCombined:
    def test_exact(self):
        x = [70.0, 80.0, 85.0]
        assert grg_mape(x, x) == pytest.approx(1.0, abs=1e-12)
        assert pcc_mape(x, x) == pytest.approx(1.0, abs=1e-12)

    def test_grg_hand(self):
        assert gof.combine(2 / 3, 0.9) == pytest.approx(0.1 * 2 / 3 + 0.81, abs=1e-12)
        assert gof.combine(2 / 3, 0.9) == pytest.approx(0.8767, abs=5e-5)
        # same numbers through the full path: deltas [0, 10] on measured 100
        m, p = [100.0, 100.0], [100.0, 110.0]
        assert rho_grg(m, p) == pytest.approx(2 / 3, abs=1e-12)
        assert rho_mape(m, p) == pytest.approx(0.95, abs=1e-12)
        assert grg_mape(m, p) == pytest.approx(0.1 * 2 / 3 + 0.9 * 0.95, abs=1e-12)

    def test_pcc_hand(self):
        assert gof.combine(1.0, 0.9) == pytest.approx(0.91, abs=1e-12)

    def test_degenerate_weights(self):
        m = np.array([70.0, 80.0, 85.0, 90.0])
        p = m + np.array([1.0, -2.0, 0.5, 3.0])
        assert grg_mape(m, p, GofWeights(1, 0)) == pytest.approx(rho_grg(m, p), abs=1e-12)
        assert pcc_mape(m, p, GofWeights(0, 1)) == pytest.approx(rho_mape(m, p), abs=1e-12)

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            GofWeights(-0.1, 0.9)

    @given(s1=st.floats(0, 1), s2=st.floats(0, 1), m=st.floats(0, 1),
           a=st.floats(0, 1), b=st.floats(0, 1))
    def test_monotone_in_constituents(self, s1, s2, m, a, b):
        w = GofWeights(a, b)
        lo, hi = sorted((s1, s2))
        assert gof.combine(lo, m, w) <= gof.combine(hi, m, w)
        assert gof.combine(m, lo, w) <= gof.combine(m, hi, w)

    @settings(max_examples=50)
    @given(seed=st.integers(0, 1000), sigma=st.floats(0.1, 20))
    def test_default_weights_unit_interval(self, seed, sigma):
        rng = np.random.default_rng(seed)
        m = rng.uniform(60, 110, 50)
        p = m + rng.normal(0, sigma, 50)
        assert 0 <= grg_mape(m, p) <= 1
        assert 0 <= pcc_mape(m, p) <= 1


def test_rmse_symmetric_and_zero_iff_identical():
    rng = np.random.default_rng(0)
    a, b = rng.normal(80, 3, 20), rng.normal(80, 3, 20)
    assert rmse(a, b) == rmse(b, a)
    assert rmse(a, b) > 0


def test_grg_mape_degrades_with_noise():
    rng = np.random.default_rng(123)
    measured = np.linspace(70, 100, 200)
    medians = []
    for sigma in (0.5, 1, 2, 4, 8):
        scores = [grg_mape(measured, measured + rng.normal(0, sigma, measured.size))
                  for _ in range(50)]
        medians.append(np.median(scores))
    assert all(a >= b for a, b in zip(medians, medians[1:]))


IN70 = ProposedParams(41.51, 9.92)


class TestRankModels:
    d = np.linspace(1, 35, 360)

    def test_single(self):
        trace = model_trace(IN70, self.d, sigma=6, seed=1)
        rep = rank_models(fit_all(trace, ["ci"]), trace)
        assert rep.ranking == {m: ["ci"] for m in gof.METRICS}
        assert all(r["ci"] == 1 for r in rep.ranks.values())

    def test_noiseless_proposed_first(self):
        trace = model_trace(IN70, self.d)
        rep = rank_models(fit_all(trace), trace)
        for metric in gof.METRICS:
            assert rep.ranks[metric]["proposed"] == 1
        s = rep.score("proposed")
        assert s.rmse_db < 1e-9
        assert s.grg_mape == pytest.approx(1, abs=1e-9)
        assert s.pcc_mape == pytest.approx(1, abs=1e-9)
        assert rep.ranking["rmse_db"][-1] == "3gpp"

    def test_ties_follow_declaration_order(self):
        trace = model_trace(IN70, self.d, sigma=6, seed=3)
        rep = rank_models(fit_all(trace), trace)
        top = rep.ranking["rmse_db"][:3]
        assert top == ["fi", "abg", "proposed"]
        assert {rep.ranks["rmse_db"][f] for f in top} == {1}

    def test_proposed_best_rmse_monte_carlo(self):
        wins = 0
        for seed in range(100):
            trace = model_trace(IN70, self.d, sigma=6, seed=seed)
            rep = rank_models(fit_all(trace), trace)
            wins += rep.ranks["rmse_db"]["proposed"] == 1
        assert wins >= 95

    def test_empty(self):
        trace = model_trace(IN70, self.d)
        with pytest.raises(ValueError):
            rank_models([], trace)
