"""Augmented Dickey-Fuller and Phillips-Perron unit-root tests.

Both tests share the Dickey-Fuller regression of the first difference on
the lagged level and deterministics, the MacKinnon response-surface
critical values, and the MacKinnon (1994) approximate p-values. The ADF
variant augments the regression with lagged differences (AIC-selected by
default); the PP variant instead corrects the unaugmented t-ratio with a
Bartlett long-run variance of the residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._ols import OlsFit, solve_ols
from .errors import DataError, DegeneracyError, ParameterError
from .lrcov import bartlett_long_run_variance, newey_west_bandwidth
from .series import MonthlySeries

__all__ = [
    "INTERCEPT",
    "TREND_AND_INTERCEPT",
    "DETERMINISTIC_KINDS",
    "UnitRootReport",
    "adf_test",
    "pp_test",
    "mackinnon_critical_values",
    "mackinnon_p_value",
]

INTERCEPT = "intercept"
TREND_AND_INTERCEPT = "trend_and_intercept"
DETERMINISTIC_KINDS = (INTERCEPT, TREND_AND_INTERCEPT)

SIGNIFICANCE_LEVELS = ("1%", "5%", "10%")

# MacKinnon (2010) response-surface coefficients for the t-ratio with one
# unit-root process: critical value = b0 + b1/T + b2/T^2 + b3/T^3.
_CRIT_SURFACE = {
    INTERCEPT: {
        "1%": (-3.43035, -6.5393, -16.786, -79.433),
        "5%": (-2.86154, -2.8903, -4.234, -40.04),
        "10%": (-2.56677, -1.5384, -2.809, 0.0),
    },
    TREND_AND_INTERCEPT: {
        "1%": (-3.95877, -9.0531, -28.428, -134.155),
        "5%": (-3.41049, -4.3904, -9.036, -45.374),
        "10%": (-3.12705, -2.5856, -3.925, -22.38),
    },
}

# MacKinnon (1994) approximate asymptotic p-values: p = Phi(poly(tau)),
# with the quadratic fit left of tau_star and the cubic fit right of it;
# statistics beyond (tau_min, tau_max) clamp to p = 0 or 1.
_P_SURFACE = {
    INTERCEPT: {
        "tau_star": -1.61,
        "tau_max": 2.74,
        "tau_min": -18.83,
        "small": (2.1659, 1.4412, 0.038269),
        "large": (1.7339, 0.93202, -0.12745, -0.010368),
    },
    TREND_AND_INTERCEPT: {
        "tau_star": -2.89,
        "tau_max": 0.7,
        "tau_min": -16.18,
        "small": (3.2512, 1.6047, 0.049588),
        "large": (2.5261, 0.61654, -0.37956, -0.060285),
    },
}


def _check_kind(kind: str) -> str:
    if kind not in DETERMINISTIC_KINDS:
        raise ParameterError(
            f"deterministic spec must be one of {DETERMINISTIC_KINDS}, got {kind!r}"
        )
    return kind


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def mackinnon_critical_values(kind: str, nobs: int) -> dict[str, float]:
    """Finite-sample critical values for the given regression sample size."""
    _check_kind(kind)
    if nobs < 1:
        raise DataError(f"need a positive sample size, got {nobs}")
    out = {}
    for level in SIGNIFICANCE_LEVELS:
        b0, b1, b2, b3 = _CRIT_SURFACE[kind][level]
        out[level] = b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3
    return out


def mackinnon_p_value(statistic: float, kind: str) -> float:
    """Approximate asymptotic p-value of a Dickey-Fuller t-ratio."""
    _check_kind(kind)
    surf = _P_SURFACE[kind]
    if statistic > surf["tau_max"]:
        return 1.0
    if statistic < surf["tau_min"]:
        return 0.0
    coef = surf["small"] if statistic <= surf["tau_star"] else surf["large"]
    poly = 0.0
    for c in reversed(coef):
        poly = poly * statistic + c
    return _norm_cdf(poly)


@dataclass(frozen=True)
class UnitRootReport:
    """Outcome of one unit-root test.

    ``lags_or_bandwidth`` is the augmentation lag count for ADF and the
    kernel bandwidth for PP. ``reject_at`` is recomputed on construction
    and must match statistic < critical value at every level.
    """

    test: str
    spec: str
    statistic: float
    lags_or_bandwidth: int
    critical_values: dict[str, float]
    approx_p_value: float
    reject_at: dict[str, bool]
    n_obs: int

    def __post_init__(self) -> None:
        if self.test not in ("ADF", "PP"):
            raise ParameterError(f"unknown test {self.test!r}")
        _check_kind(self.spec)
        cvs = [self.critical_values[level] for level in SIGNIFICANCE_LEVELS]
        if not (cvs[0] < cvs[1] < cvs[2]):
            raise ParameterError(f"critical values must increase with level: {cvs}")
        if not 0.0 <= self.approx_p_value <= 1.0:
            raise ParameterError(f"p-value outside [0, 1]: {self.approx_p_value}")
        for level in SIGNIFICANCE_LEVELS:
            expected = self.statistic < self.critical_values[level]
            if self.reject_at[level] is not expected:
                raise ParameterError(
                    f"reject_at[{level}] inconsistent with the statistic"
                )


def _report(test: str, kind: str, statistic: float, lags_or_bw: int, nobs: int) -> UnitRootReport:
    cvs = mackinnon_critical_values(kind, nobs)
    return UnitRootReport(
        test=test,
        spec=kind,
        statistic=float(statistic),
        lags_or_bandwidth=int(lags_or_bw),
        critical_values=cvs,
        approx_p_value=mackinnon_p_value(float(statistic), kind),
        reject_at={level: float(statistic) < cvs[level] for level in SIGNIFICANCE_LEVELS},
        n_obs=int(nobs),
    )


def _deterministics(kind: str, nrows: int) -> np.ndarray:
    cols = [np.ones(nrows)]
    if kind == TREND_AND_INTERCEPT:
        cols.append(np.arange(1.0, nrows + 1.0))
    return np.column_stack(cols)


def _df_regression(y: np.ndarray, kind: str, lag: int, trim: int) -> OlsFit:
    """Dickey-Fuller regression with ``lag`` augmentation terms.

    Rows start at difference index ``trim`` (>= lag), so candidate lag
    orders can be compared on one common sample.
    """
    dy = np.diff(y)
    rows = np.arange(trim, dy.size)
    lhs = dy[rows]
    cols = [y[rows]]
    for j in range(1, lag + 1):
        cols.append(dy[rows - j])
    x = np.column_stack(cols + [_deterministics(kind, rows.size)])
    return solve_ols(x, lhs)


def _t_on_level(fit: OlsFit) -> float:
    se = fit.standard_errors()[0]
    if not se > 0.0:
        raise DegeneracyError("zero standard error on the lagged level")
    return float(fit.beta[0] / se)


def adf_test(
    s: MonthlySeries,
    spec: str = INTERCEPT,
    lags: int | None = None,
    max_lags: int = 12,
) -> UnitRootReport:
    """Augmented Dickey-Fuller test; the null is a unit root.

    ``lags`` fixes the augmentation order; when None, the order is
    chosen by AIC over 0..``max_lags``, evaluated on the common sample
    that the largest candidate allows, then refit on the full sample the
    winning order allows.
    """
    _check_kind(spec)
    y = s.values
    if lags is not None:
        if lags < 0:
            raise ParameterError(f"lags must be >= 0, got {lags}")
        best = int(lags)
        needed = 20 + best
    else:
        if max_lags < 0:
            raise ParameterError(f"max_lags must be >= 0, got {max_lags}")
        needed = 20 + max_lags
    if y.size < needed:
        raise DataError(f"need at least {needed} observations, got {y.size}")

    if lags is None:
        best, best_aic = 0, math.inf
        for k in range(max_lags + 1):
            fit = _df_regression(y, spec, k, trim=max_lags)
            aic = fit.nobs * math.log(fit.ssr / fit.nobs) + 2.0 * fit.nparams
            if aic < best_aic:
                best, best_aic = k, aic

    fit = _df_regression(y, spec, best, trim=best)
    return _report("ADF", spec, _t_on_level(fit), best, fit.nobs)


def pp_test(
    s: MonthlySeries,
    spec: str = INTERCEPT,
    bandwidth: int | None = None,
) -> UnitRootReport:
    """Phillips-Perron Z-tau test; the null is a unit root.

    The unaugmented Dickey-Fuller t-ratio is corrected nonparametrically
    with a Bartlett long-run variance of the regression residuals;
    ``bandwidth`` None means the automatic Newey-West lag.
    """
    _check_kind(spec)
    y = s.values
    if y.size < 25:
        raise DataError(f"need at least 25 observations, got {y.size}")
    fit = _df_regression(y, spec, 0, trim=0)
    nobs = fit.nobs
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(nobs)
    bandwidth = int(bandwidth)
    if bandwidth < 0:
        raise ParameterError(f"bandwidth must be >= 0, got {bandwidth}")
    if bandwidth >= nobs:
        raise DataError(f"bandwidth {bandwidth} too large for {nobs} residuals")

    tstat = _t_on_level(fit)
    se_rho = fit.standard_errors()[0]
    s_hat = math.sqrt(fit.sigma2)
    gamma0 = fit.ssr / nobs
    lam2 = bartlett_long_run_variance(fit.resid, bandwidth)
    if not lam2 > 0.0:
        raise DegeneracyError("long-run residual variance is zero")
    z_tau = math.sqrt(gamma0 / lam2) * tstat - 0.5 * (lam2 - gamma0) / math.sqrt(
        lam2
    ) * (nobs * se_rho / s_hat)
    return _report("PP", spec, z_tau, bandwidth, nobs)
