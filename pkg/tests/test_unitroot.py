"""ADF and PP unit-root tests against published surfaces and each other."""

import math

import numpy as np
import pytest

from currsub.errors import DataError, DegeneracyError, ParameterError
from currsub.series import MonthStamp, MonthlySeries
from currsub.unitroot import (
    DETERMINISTIC_KINDS,
    INTERCEPT,
    TREND_AND_INTERCEPT,
    UnitRootReport,
    adf_test,
    mackinnon_critical_values,
    mackinnon_p_value,
    pp_test,
)

START = MonthStamp(2001, 9)


def series(values):
    return MonthlySeries(START, np.asarray(values, dtype=float))


def random_walk(seed, n, scale=1.0):
    rng = np.random.default_rng(seed)
    return series(np.cumsum(rng.standard_normal(n)) * scale)


def ar1_series(seed, n, rho=0.5):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n)
    u = np.empty(n)
    u[0] = e[0] / math.sqrt(1.0 - rho * rho)
    for k in range(1, n):
        u[k] = rho * u[k - 1] + e[k]
    return series(u)


class TestMacKinnonCriticalValues:
    def test_response_surface_at_100(self):
        cvs = mackinnon_critical_values(INTERCEPT, 100)
        assert cvs["1%"] == pytest.approx(-3.4975, abs=1e-4)
        assert cvs["5%"] == pytest.approx(-2.8909, abs=1e-4)
        assert cvs["10%"] == pytest.approx(-2.5824, abs=1e-4)

    def test_asymptote_is_the_leading_coefficient(self):
        cvs = mackinnon_critical_values(TREND_AND_INTERCEPT, 10**9)
        assert cvs["1%"] == pytest.approx(-3.95877, abs=1e-5)
        assert cvs["5%"] == pytest.approx(-3.41049, abs=1e-5)
        assert cvs["10%"] == pytest.approx(-3.12705, abs=1e-5)

    def test_ordering(self):
        for kind in DETERMINISTIC_KINDS:
            cvs = mackinnon_critical_values(kind, 171)
            assert cvs["1%"] < cvs["5%"] < cvs["10%"] < 0.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ParameterError):
            mackinnon_critical_values("none", 100)
        with pytest.raises(DataError):
            mackinnon_critical_values(INTERCEPT, 0)


class TestMacKinnonPValue:
    def test_interior_value(self):
        assert mackinnon_p_value(-2.0, INTERCEPT) == pytest.approx(
            0.2865731, abs=1e-6
        )

    def test_clamps(self):
        assert mackinnon_p_value(3.0, INTERCEPT) == 1.0
        assert mackinnon_p_value(-20.0, INTERCEPT) == 0.0
        assert mackinnon_p_value(1.0, TREND_AND_INTERCEPT) == 1.0

    def test_monotone_in_statistic(self):
        grid = np.linspace(-6.0, 0.5, 40)
        for kind in DETERMINISTIC_KINDS:
            ps = [mackinnon_p_value(t, kind) for t in grid]
            assert all(a <= b + 1e-12 for a, b in zip(ps, ps[1:]))

    def test_branch_continuity_at_tau_star(self):
        # The quadratic and cubic surfaces meet near tau*; the published
        # fits agree there to about a tenth of a percentage point.
        for kind, tau_star in ((INTERCEPT, -1.61), (TREND_AND_INTERCEPT, -2.89)):
            left = mackinnon_p_value(tau_star, kind)
            right = mackinnon_p_value(tau_star + 1e-9, kind)
            assert left == pytest.approx(right, abs=2e-3)


class TestAdf:
    def test_fixed_lag_matches_statsmodels(self):
        sm = pytest.importorskip("statsmodels.tsa.stattools")
        y = random_walk(0, 200)
        for kind, reg in ((INTERCEPT, "c"), (TREND_AND_INTERCEPT, "ct")):
            for lag in (0, 3):
                ours = adf_test(y, kind, lags=lag)
                ref = sm.adfuller(y.values, maxlag=lag, regression=reg, autolag=None)
                assert ours.statistic == pytest.approx(ref[0], abs=1e-8)
                assert ours.n_obs == ref[3]

    def test_aic_selection_matches_statsmodels(self):
        sm = pytest.importorskip("statsmodels.tsa.stattools")
        for seed in range(5):
            y = ar1_series(seed, 240)
            ours = adf_test(y, INTERCEPT, max_lags=8)
            ref = sm.adfuller(y.values, maxlag=8, regression="c", autolag="AIC")
            assert ours.lags_or_bandwidth == ref[2]
            assert ours.statistic == pytest.approx(ref[0], abs=1e-8)

    def test_report_fields(self):
        rep = adf_test(random_walk(1, 171), TREND_AND_INTERCEPT)
        assert rep.test == "ADF"
        assert rep.spec == TREND_AND_INTERCEPT
        assert 0 <= rep.lags_or_bandwidth <= 12
        assert rep.n_obs == 170 - rep.lags_or_bandwidth
        for level in ("1%", "5%", "10%"):
            assert rep.reject_at[level] == (
                rep.statistic < rep.critical_values[level]
            )

    def test_affine_invariance(self):
        y = random_walk(2, 150)
        base = adf_test(y, INTERCEPT, lags=2)
        moved = adf_test(series(3.5 * y.values - 11.0), INTERCEPT, lags=2)
        assert moved.statistic == pytest.approx(base.statistic, abs=1e-8)

    def test_stationary_series_rejects(self):
        rep = adf_test(ar1_series(3, 400), INTERCEPT)
        assert rep.reject_at["5%"]
        assert rep.approx_p_value < 0.01

    def test_random_walk_fails_to_reject(self):
        rep = adf_test(random_walk(4, 400), INTERCEPT)
        assert not rep.reject_at["5%"]

    def test_constant_series_degenerate(self):
        with pytest.raises(DegeneracyError):
            adf_test(series(np.ones(100)), INTERCEPT, lags=0)

    def test_too_short_rejected(self):
        with pytest.raises(DataError, match="at least"):
            adf_test(series(np.arange(25.0)), INTERCEPT)  # needs 20 + 12

    def test_bad_lags_rejected(self):
        y = random_walk(5, 100)
        with pytest.raises(ParameterError):
            adf_test(y, INTERCEPT, lags=-1)
        with pytest.raises(ParameterError):
            adf_test(y, INTERCEPT, max_lags=-1)

    def test_unknown_spec_rejected(self):
        with pytest.raises(ParameterError, match="deterministic"):
            adf_test(random_walk(6, 100), "none")


class TestPp:
    def test_bandwidth_zero_equals_unaugmented_adf(self):
        # With no kernel terms the correction factor is exactly one, so
        # Z_tau collapses to the plain Dickey-Fuller t-ratio.
        for seed in range(3):
            y = random_walk(seed, 171)
            for kind in DETERMINISTIC_KINDS:
                z = pp_test(y, kind, bandwidth=0)
                t = adf_test(y, kind, lags=0)
                assert z.statistic == pytest.approx(t.statistic, abs=1e-10)
                assert z.n_obs == t.n_obs

    def test_automatic_bandwidth(self):
        rep = pp_test(random_walk(7, 171), INTERCEPT)
        # 170 residual rows -> floor(4 * 1.7^(2/9)) = 4.
        assert rep.lags_or_bandwidth == 4
        assert rep.test == "PP"

    def test_affine_invariance(self):
        y = random_walk(8, 150)
        base = pp_test(y, TREND_AND_INTERCEPT)
        moved = pp_test(series(-2.0 * y.values + 5.0), TREND_AND_INTERCEPT)
        # Sign flips do not matter for either spec: the level regressor
        # rescales and the t-ratio is scale-free.
        assert moved.statistic == pytest.approx(base.statistic, abs=1e-8)

    def test_stationary_series_rejects(self):
        rep = pp_test(ar1_series(9, 400), INTERCEPT)
        assert rep.reject_at["5%"]

    def test_too_short_rejected(self):
        with pytest.raises(DataError, match="at least 25"):
            pp_test(series(np.arange(24.0)))

    def test_oversized_bandwidth_rejected(self):
        with pytest.raises(DataError, match="too large"):
            pp_test(random_walk(10, 30), INTERCEPT, bandwidth=29)

    def test_negative_bandwidth_rejected(self):
        with pytest.raises(ParameterError):
            pp_test(random_walk(11, 100), INTERCEPT, bandwidth=-1)

    def test_constant_series_degenerate(self):
        with pytest.raises(DegeneracyError):
            pp_test(series(np.ones(100)))


class TestUnitRootReport:
    def _kwargs(self):
        return dict(
            test="ADF",
            spec=INTERCEPT,
            statistic=-3.0,
            lags_or_bandwidth=1,
            critical_values={"1%": -3.46, "5%": -2.88, "10%": -2.57},
            approx_p_value=0.03,
            reject_at={"1%": False, "5%": True, "10%": True},
            n_obs=150,
        )

    def test_valid_report(self):
        rep = UnitRootReport(**self._kwargs())
        assert rep.reject_at["5%"]

    def test_inconsistent_rejection_flag_rejected(self):
        kwargs = self._kwargs()
        kwargs["reject_at"] = {"1%": True, "5%": True, "10%": True}
        with pytest.raises(ParameterError, match="inconsistent"):
            UnitRootReport(**kwargs)

    def test_disordered_critical_values_rejected(self):
        kwargs = self._kwargs()
        kwargs["critical_values"] = {"1%": -2.57, "5%": -2.88, "10%": -3.46}
        kwargs["reject_at"] = {"1%": True, "5%": True, "10%": False}
        with pytest.raises(ParameterError, match="increase"):
            UnitRootReport(**kwargs)

    def test_bad_p_value_rejected(self):
        kwargs = self._kwargs()
        kwargs["approx_p_value"] = 1.5
        with pytest.raises(ParameterError, match="p-value"):
            UnitRootReport(**kwargs)

    def test_unknown_test_rejected(self):
        kwargs = self._kwargs()
        kwargs["test"] = "KPSS"
        with pytest.raises(ParameterError):
            UnitRootReport(**kwargs)
