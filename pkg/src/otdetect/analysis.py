"""Closed-form and semi-analytic performance of the OT fusion rule.

Four independent routes to the system's behaviour, each cross-checkable
against the trial simulator in :mod:`otdetect.protocol`:

* exact detection/false-alarm/error probabilities of the full-sum test
  (a binomial mixture of Gaussian tails over the compromised-sensor count);
* a Monte-Carlo evaluation of the exact order-statistic expression for the
  expected number of transmissions;
* the density of the k-th largest LLR magnitude;
* Cauchy-Schwarz upper/lower bounds on the expected transmissions saved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.integrate import quad
from scipy.optimize import brentq

from .core import (
    EstimateWithError,
    Hypothesis,
    LlrMixture,
    ModelConfig,
    abs_llr_cdf,
    abs_llr_pdf,
    llr_mixture,
    population_moments,
    q_function,
)
from .protocol import RngSpec

__all__ = [
    "ErrorProbabilities",
    "ExpectedTransmissions",
    "BoundsReport",
    "analytic_error_probs",
    "expected_transmissions",
    "abs_order_stat_pdf",
    "abs_order_stat_cdf",
    "transmission_savings_bounds",
]

_SQRT2 = math.sqrt(2.0)
_QUAD_EPSABS = 1e-9


@dataclass(frozen=True)
class ErrorProbabilities:
    """Detection/false-alarm/error probabilities of the full-sum Bayesian test.

    By the early-stopping equivalence these are also the OT system's
    probabilities.  ``threshold`` is the LLR-sum threshold ln(pi0/pi1).
    """

    p_d: float
    p_f: float
    p_e: float
    threshold: float


@dataclass(frozen=True)
class ExpectedTransmissions:
    """Expected transmissions until the fusion center can stop.

    ``survival_h0[k-1]`` estimates P(stop time >= k | H0) (likewise H1);
    ``total`` is the prior-weighted sum over k of those survival terms.
    """

    total: EstimateWithError
    survival_h0: np.ndarray
    survival_h0_se: np.ndarray
    survival_h1: np.ndarray
    survival_h1_se: np.ndarray
    n_samples: int


@dataclass(frozen=True)
class BoundsReport:
    """Upper/lower bounds on the expected number of transmissions saved.

    ``g_lower_per_k``/``g_upper_per_k`` hold the partial-sum envelopes used
    at each prefix length k, one column per hypothesis (H0, H1).
    """

    k_grid: np.ndarray
    lb_saved: float
    ub_saved: float
    g_lower_per_k: np.ndarray
    g_upper_per_k: np.ndarray
    mode: str


def analytic_error_probs(config: ModelConfig) -> ErrorProbabilities:
    """Exact error probabilities of the N-sensor full-sum test.

    Conditioned on the number m of compromised sensors, the LLR sum is
    Gaussian with mean (N-m)*mean_honest + m*mean_byz and variance N*beta,
    so each probability is a Binomial(N, alpha0)-weighted sum of N+1
    Gaussian tails.  Runs in O(N).
    """
    n = config.n_sensors
    lam = config.threshold
    scale = math.sqrt(n * config.llr_var)
    m = np.arange(n + 1)
    weights = stats.binom.pmf(m, n, config.byz_frac)

    def tail_mix(h: Hypothesis) -> float:
        mix = llr_mixture(config, h)
        means = (n - m) * mix.mean_honest + m * mix.mean_byz
        return float(np.sum(weights * q_function((lam - means) / scale)))

    p_d = min(max(tail_mix(Hypothesis.H1), 0.0), 1.0)
    p_f = min(max(tail_mix(Hypothesis.H0), 0.0), 1.0)
    p_e = config.prior_h1 * (1.0 - p_d) + config.prior_h0 * p_f
    return ErrorProbabilities(p_d=p_d, p_f=p_f, p_e=p_e, threshold=lam)


def expected_transmissions(
    config: ModelConfig, n_samples: int = 100_000, seed: int = 0
) -> ExpectedTransmissions:
    """Monte-Carlo evaluation of the expected stop time E[k*].

    E[k*] = sum_k [pi1 P(k* >= k|H1) + pi0 P(k* >= k|H0)], and the survival
    probability at k equals an expectation over k-1 i.i.d. LLRs: the
    indicator that their sum is still bracketed by the threshold envelope
    lam -/+ (N-k+1) * (smallest magnitude), times the chance
    F(|L|_(k-1))^(N-k+1) that the N-k+1 remaining sensors all have smaller
    magnitude, times the C(N, k-1) ways to pick the leading set.

    Fresh counter-based substreams per (hypothesis, k) make every term an
    independent mean of i.i.d. weights, so standard errors combine in
    quadrature.
    """
    if n_samples < 1000:
        raise ValueError(f"n_samples must be >= 1000, got {n_samples}")
    n = config.n_sensors
    lam = config.threshold
    surv = np.ones((2, n))
    surv_se = np.zeros((2, n))
    for h in (Hypothesis.H0, Hypothesis.H1):
        mix = llr_mixture(config, h)
        for k in range(2, n + 1):
            gen = RngSpec(seed, int(h) * (n + 1) + k).generator()
            draws = mix.sample(gen, n_samples * (k - 1)).reshape(n_samples, k - 1)
            row_sum = draws.sum(axis=1)
            min_mag = np.abs(draws).min(axis=1)
            envelope = (n - k + 1) * min_mag
            inside = (row_sum <= lam + envelope) & (row_sum >= lam - envelope)
            weights = (
                math.comb(n, k - 1)
                * abs_llr_cdf(mix, min_mag) ** (n - k + 1)
                * inside
            )
            surv[h, k - 1] = weights.mean()
            surv_se[h, k - 1] = weights.std(ddof=1) / math.sqrt(n_samples)
    pi0, pi1 = config.prior_h0, config.prior_h1
    total = float(np.sum(pi0 * surv[0] + pi1 * surv[1]))
    total_se = float(np.sqrt(np.sum((pi0 * surv_se[0]) ** 2 + (pi1 * surv_se[1]) ** 2)))
    return ExpectedTransmissions(
        total=EstimateWithError(total, total_se, n_samples),
        survival_h0=surv[0],
        survival_h0_se=surv_se[0],
        survival_h1=surv[1],
        survival_h1_se=surv_se[1],
        n_samples=n_samples,
    )


def _check_order_stat_args(config: ModelConfig, k: int) -> None:
    if not 1 <= k <= config.n_sensors:
        raise ValueError(f"k must be in [1, {config.n_sensors}], got {k}")


def abs_order_stat_pdf(config: ModelConfig, hypothesis: Hypothesis, k: int, x):
    """Density of the k-th largest LLR magnitude among the N sensors.

    Standard order-statistic form on the |L| sample:
    N * C(N-1, k-1) * f(x) * F(x)^(N-k) * (1 - F(x))^(k-1) with f and F the
    folded mixture density and CDF.  Evaluated in log space so large N does
    not overflow the binomial coefficient.
    """
    _check_order_stat_args(config, k)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("order-statistic density is defined for nonnegative x only")
    n = config.n_sensors
    mix = llr_mixture(config, hypothesis)
    f = abs_llr_pdf(mix, x_arr)
    cdf = abs_llr_cdf(mix, x_arr)
    log_coef = math.log(n) + math.lgamma(n) - math.lgamma(k) - math.lgamma(n - k + 1)
    with np.errstate(divide="ignore"):
        log_val = log_coef + np.log(f)
        if n > k:
            log_val = log_val + (n - k) * np.log(cdf)
        if k > 1:
            log_val = log_val + (k - 1) * np.log1p(-cdf)
    out = np.where(np.isneginf(log_val), 0.0, np.exp(log_val))
    return float(out) if np.ndim(x) == 0 else out


def _scalar_folded(mix: LlrMixture, x: float) -> tuple[float, float]:
    """(density, CDF) of |L| at scalar x >= 0, on a fast math-only path."""
    sd = mix.std
    norm = 1.0 / (sd * math.sqrt(2.0 * math.pi))

    def comp(mean: float) -> tuple[float, float]:
        zp = (x - mean) / sd
        zm = (x + mean) / sd
        pdf = norm * (math.exp(-0.5 * zp * zp) + math.exp(-0.5 * zm * zm))
        cdf = 0.5 * (math.erfc(-zm / _SQRT2) - math.erfc(zp / _SQRT2))
        return pdf, cdf

    a = mix.weight_byz
    if a == 0.0:
        return comp(mix.mean_honest)
    if a == 1.0:
        return comp(mix.mean_byz)
    pdf_b, cdf_b = comp(mix.mean_byz)
    pdf_h, cdf_h = comp(mix.mean_honest)
    return a * pdf_b + (1.0 - a) * pdf_h, a * cdf_b + (1.0 - a) * cdf_h


def _abs_support_hi(mix: LlrMixture) -> float:
    """x beyond which |L| carries no representable mass."""
    return max(abs(mix.mean_honest), abs(mix.mean_byz)) + 40.0 * mix.std


def _abs_quantile(mix: LlrMixture, u: float, hi: float) -> float:
    """Inverse of the |L| CDF by bracketing (u strictly inside (0, 1))."""
    return brentq(lambda x: _scalar_folded(mix, x)[1] - u, 0.0, hi, xtol=1e-12)


def _order_stat_cdf(mix: LlrMixture, n: int, k: int, w: float) -> float:
    """P(k-th largest |L| <= w) by adaptive quadrature of its density.

    The density can be a narrow spike well inside [0, w] for large N, so the
    quadrature gets interior break points at the spike's location (the
    Beta(n-k+1, k) quantiles of the underlying |L| probability mapped back
    through the |L| quantile function).
    """
    if w <= 0.0:
        return 0.0
    hi = _abs_support_hi(mix)
    w_eff = min(w, hi)
    log_coef = math.log(n) + math.lgamma(n) - math.lgamma(k) - math.lgamma(n - k + 1)

    def integrand(x: float) -> float:
        f, cdf = _scalar_folded(mix, x)
        if f <= 0.0:
            return 0.0
        if cdf <= 0.0:
            return n * f if k == n else 0.0
        if cdf >= 1.0:
            return n * f if k == 1 else 0.0
        return math.exp(
            log_coef + math.log(f) + (n - k) * math.log(cdf) + (k - 1) * math.log1p(-cdf)
        )

    u_pts = stats.beta.ppf([1e-4, 0.5, 1.0 - 1e-4], n - k + 1, k)
    pts = [_abs_quantile(mix, u, hi) for u in u_pts]
    interior = [p for p in pts if 0.0 < p < w_eff]
    value, _ = quad(
        integrand,
        0.0,
        w_eff,
        points=interior or None,
        limit=200,
        epsabs=_QUAD_EPSABS,
        epsrel=1e-9,
    )
    return min(max(value, 0.0), 1.0)


def abs_order_stat_cdf(config: ModelConfig, hypothesis: Hypothesis, k: int, x: float) -> float:
    """P(k-th largest LLR magnitude <= x), integrating :func:`abs_order_stat_pdf`."""
    _check_order_stat_args(config, k)
    mix = llr_mixture(config, hypothesis)
    return _order_stat_cdf(mix, config.n_sensors, k, float(x))


def _envelope_radius(n: int, k: int, v: float | np.ndarray):
    """Half-width of the Cauchy-Schwarz envelope on a k-term ordered head.

    For selector weights of k ones among N, the centered weight sum is
    k(N-k)/N, giving sqrt(k(N-k)/N * (N-1) * v) for dispersion v.
    """
    return np.sqrt(k * (n - k) / n * (n - 1) * v)


def transmission_savings_bounds(
    config: ModelConfig,
    mode: str = "population",
    n_samples: int = 20_000,
    seed: int = 0,
) -> BoundsReport:
    """Bounds on the expected number of transmissions the OT scheme saves.

    The head sum of the k largest-magnitude LLRs is bracketed by
    g_L <= sum <= g_U (Cauchy-Schwarz around the sample mean), which turns
    the stop events at prefix k into |L_[k]| threshold events:

    * lower bound: stopping is implied when g_L clears the threshold upward
      or g_U clears it downward;
    * upper bound: stopping implies g_U clears upward or g_L downward.

    ``mode="population"`` substitutes the per-sensor population mean and
    (N/(N-1))-scaled variance into the envelope and integrates the k-th
    magnitude order-statistic density (good for large N).
    ``mode="empirical"`` redraws the envelope from each simulated
    realization's sample mean/variance and counts events directly.
    """
    n = config.n_sensors
    if n < 2:
        raise ValueError("bounds need at least 2 sensors")
    if mode not in ("population", "empirical"):
        raise ValueError(f"unknown mode {mode!r}")
    lam = config.threshold
    priors = {Hypothesis.H0: config.prior_h0, Hypothesis.H1: config.prior_h1}
    ks = np.arange(1, n)
    g_lower = np.zeros((n - 1, 2))
    g_upper = np.zeros((n - 1, 2))
    lb = 0.0
    ub = 0.0

    if mode == "population":
        mom = population_moments(config)
        for h in (Hypothesis.H0, Hypothesis.H1):
            mix = llr_mixture(config, h)
            delta = mom.mean(h)
            v = n / (n - 1) * mom.var(h)
            for k in ks:
                rad = float(_envelope_radius(n, int(k), v))
                g_u = rad + k * delta
                g_l = -rad + k * delta
                g_upper[k - 1, int(h)] = g_u
                g_lower[k - 1, int(h)] = g_l
                n_rem = n - int(k)
                p_ub_1 = _order_stat_cdf(mix, n, int(k), (g_u - lam) / n_rem)
                p_ub_2 = _order_stat_cdf(mix, n, int(k), (lam - g_l) / n_rem)
                ub_term = p_ub_1 + p_ub_2 - min(p_ub_1, p_ub_2)
                lb_term = _order_stat_cdf(mix, n, int(k), (g_l - lam) / n_rem)
                lb_term += _order_stat_cdf(mix, n, int(k), (lam - g_u) / n_rem)
                ub += priors[h] * ub_term
                lb += priors[h] * lb_term
    else:
        if n_samples < 1000:
            raise ValueError(f"n_samples must be >= 1000, got {n_samples}")
        for h in (Hypothesis.H0, Hypothesis.H1):
            mix = llr_mixture(config, h)
            gen = RngSpec(seed, int(h)).generator()
            draws = mix.sample(gen, n_samples * n).reshape(n_samples, n)
            mags = np.sort(np.abs(draws), axis=1)[:, ::-1]
            sample_mean = draws.mean(axis=1)
            sample_var = draws.var(axis=1, ddof=1)
            for k in ks:
                rad = _envelope_radius(n, int(k), sample_var)
                g_u = rad + k * sample_mean
                g_l = -rad + k * sample_mean
                spread = (n - int(k)) * mags[:, k - 1]
                ub_event = (g_u > lam + spread) | (g_l < lam - spread)
                lb_event = (g_l > lam + spread) | (g_u < lam - spread)
                ub += priors[h] * float(ub_event.mean())
                lb += priors[h] * float(lb_event.mean())
                g_upper[k - 1, int(h)] = float(g_u.mean())
                g_lower[k - 1, int(h)] = float(g_l.mean())

    return BoundsReport(
        k_grid=ks,
        lb_saved=lb,
        ub_saved=ub,
        g_lower_per_k=g_lower,
        g_upper_per_k=g_upper,
        mode=mode,
    )
