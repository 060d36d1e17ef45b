//! Closed-form multi-hop delay and reliability, evaluated by adaptive
//! quadrature.
//!
//! Under uniform relay selection among positive-progress candidates, the
//! per-hop forward progress is uniform on `[0, lt/sqrt(2)]` and the per-hop
//! Manhattan distance has density `2 d / lt^2` on `[0, lt]`. Combining the
//! distance law with lognormal shadowing gives the SNR distribution of a
//! hop, from which the expected end-to-end delay and reliability follow with
//! the hop count `k = 2 sqrt(2) R_valid / lt`.
//!
//! The hop count is kept real-valued; rounding it would contradict the
//! closed form and introduce steps into otherwise continuous curves.
//!
//! This layer treats relay positions as a continuum along the roads: the
//! minimum-gap headway parameter `d_safe` does not appear anywhere in it.
//! Discrete-vehicle effects, including `d_safe`, exist only in the
//! [`crate::montecarlo`] simulator, which is the companion half of the
//! model.

use crate::quad::{self, QuadError};
use crate::radiolink::{single_hop_delay_s, snr_db, LinkBudget};
use std::cell::Cell;
use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "quadrature failed to converge after {evaluations} evaluations \
         (estimated error {est_error:.3e})"
    )]
    NonConvergent { evaluations: u64, est_error: f64 },
}

impl From<QuadError> for AnalyticsError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::NonConvergent {
                evaluations,
                est_error,
                ..
            } => AnalyticsError::NonConvergent {
                evaluations,
                est_error,
            },
            QuadError::BadInterval { a, b } => {
                AnalyticsError::Domain(format!("bad integration interval [{a}, {b}]"))
            }
        }
    }
}

/// Tolerances and limits for the quadrature-backed evaluations.
///
/// `db_range` is the shadowing integration window in dB; the default spans
/// eight standard deviations of the default 4 dB shadowing on both sides,
/// beyond which the Gaussian weight is below 1e-15.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
    pub db_range: (f64, f64),
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 512,
            db_range: (-32.0, 32.0),
        }
    }
}

impl QuadratureSpec {
    /// Default tolerances with the shadowing window rescaled to eight
    /// standard deviations of `sigma_db`.
    pub fn for_sigma(sigma_db: f64) -> Self {
        Self {
            db_range: (-8.0 * sigma_db, 8.0 * sigma_db),
            ..Self::default()
        }
    }
}

/// Value produced by a quadrature-backed evaluation, together with the
/// accumulated error estimate and integrand-evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticResult {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: u64,
}

/// Density of the per-hop forward progress: `sqrt(2)/lt` on
/// `[0, lt/sqrt(2)]`, zero outside.
pub fn fp_pdf(z: f64, lt: f64) -> f64 {
    debug_assert!(lt > 0.0);
    if (0.0..=lt / SQRT_2).contains(&z) {
        SQRT_2 / lt
    } else {
        0.0
    }
}

/// Upper end of the forward-progress support, `lt/sqrt(2)`.
pub fn fp_support_max(lt: f64) -> f64 {
    lt / SQRT_2
}

/// Expected number of hops from source to destination:
/// `2 sqrt(2) r_valid / lt` (real-valued by design).
pub fn hop_count(r_valid: f64, lt: f64) -> f64 {
    debug_assert!(r_valid > 0.0 && lt > 0.0);
    2.0 * SQRT_2 * r_valid / lt
}

/// Density of the per-hop Manhattan distance: `2 d / lt^2` on `[0, lt]`,
/// zero outside.
pub fn manhattan_pdf(d: f64, lt: f64) -> f64 {
    debug_assert!(lt > 0.0);
    if (0.0..=lt).contains(&d) {
        2.0 * d / (lt * lt)
    } else {
        0.0
    }
}

/// CDF of the per-hop Manhattan distance, `d^2 / lt^2` clamped to `[0, 1]`.
pub fn manhattan_cdf(d: f64, lt: f64) -> f64 {
    debug_assert!(lt > 0.0);
    if d <= 0.0 {
        0.0
    } else if d >= lt {
        1.0
    } else {
        d * d / (lt * lt)
    }
}

/// erf of `num/denom`, degrading to the sign step when `denom` is zero
/// (the no-shadowing limit).
#[inline]
fn erf_ratio(num: f64, denom: f64) -> f64 {
    if denom == 0.0 {
        if num > 0.0 {
            1.0
        } else if num < 0.0 {
            -1.0
        } else {
            0.0
        }
    } else {
        libm::erf(num / denom)
    }
}

/// CDF of the per-hop SNR at threshold `gamma_db`, averaging the Gaussian
/// shadowing tail over the Manhattan-distance law:
///
/// `F(gamma) = 1/2 - 1/2 * Int_0^lt erf(Y(d)) * (2d/lt^2) dd`,
/// `Y(d) = (M - gamma - 10 alpha log10 d) / (sqrt(2) sigma)`.
pub fn snr_cdf(
    gamma_db: f64,
    budget: &LinkBudget,
    lt: f64,
    spec: &QuadratureSpec,
) -> Result<AnalyticResult, AnalyticsError> {
    if !lt.is_finite() || lt <= 0.0 {
        return Err(AnalyticsError::Domain(format!(
            "lt must be positive and finite, got {lt}"
        )));
    }
    let m = budget.link_margin_db();
    let denom = SQRT_2 * budget.sigma_db;
    let alpha = budget.alpha;
    let integrand = move |d: f64| {
        if d <= 0.0 {
            return 0.0;
        }
        let y_num = m - gamma_db - 10.0 * alpha * d.log10();
        erf_ratio(y_num, denom) * manhattan_pdf(d, lt)
    };
    let out = quad::integrate(
        integrand,
        0.0,
        lt,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
    )?;
    let raw = 0.5 - 0.5 * out.value;
    let est_error = 0.5 * out.est_error;
    let value = clamp_probability(raw, spec.abs_tol)?;
    Ok(AnalyticResult {
        value,
        est_error,
        evaluations: out.evaluations,
    })
}

fn clamp_probability(p: f64, tol: f64) -> Result<f64, AnalyticsError> {
    if (-tol..=1.0 + tol).contains(&p) {
        Ok(p.clamp(0.0, 1.0))
    } else {
        Err(AnalyticsError::Domain(format!(
            "probability {p} overshoots [0, 1] beyond tolerance {tol}"
        )))
    }
}

/// Expected single-hop delay under the Manhattan-distance and shadowing
/// laws, as a nested integral: outer over distance, inner over the
/// shadowing dB window weighted by the Gaussian density.
fn expected_hop_delay(
    budget: &LinkBudget,
    lt: f64,
    spec: &QuadratureSpec,
) -> Result<AnalyticResult, AnalyticsError> {
    let sigma = budget.sigma_db;
    let (rho_lo, rho_hi) = spec.db_range;
    if sigma > 0.0 && rho_lo >= rho_hi {
        return Err(AnalyticsError::Domain(format!(
            "empty shadowing window [{rho_lo}, {rho_hi}]"
        )));
    }
    let gauss_norm = 1.0 / (sigma * (2.0 * PI).sqrt());

    // Bookkeeping smuggled out of the Fn-closure: evaluation totals, the
    // worst inner error, and the first inner failure.
    let inner_evals = Cell::new(0u64);
    let inner_err_max = Cell::new(0.0f64);
    let poison: Cell<Option<QuadError>> = Cell::new(None);

    let hop_delay = |d: f64, rho: f64| -> f64 {
        // The d -> 0 limit of the hop delay is zero (the SNR diverges).
        if d <= 0.0 {
            return 0.0;
        }
        let snr = snr_db(budget, d, rho).expect("positive distance");
        single_hop_delay_s(budget, snr)
    };

    let outer = |d: f64| -> f64 {
        let weight = manhattan_pdf(d, lt);
        if weight == 0.0 {
            return 0.0;
        }
        let conditional = if sigma == 0.0 {
            hop_delay(d, 0.0)
        } else {
            match quad::integrate(
                |rho| gauss_norm * (-(rho * rho) / (2.0 * sigma * sigma)).exp() * hop_delay(d, rho),
                rho_lo,
                rho_hi,
                spec.abs_tol * 0.1,
                spec.rel_tol * 0.1,
                spec.max_subdivisions,
            ) {
                Ok(o) => {
                    inner_evals.set(inner_evals.get() + o.evaluations);
                    inner_err_max.set(inner_err_max.get().max(o.est_error));
                    o.value
                }
                Err(e) => {
                    if poison.take().is_none() {
                        poison.set(Some(e));
                    }
                    0.0
                }
            }
        };
        weight * conditional
    };

    let out = quad::integrate(
        outer,
        0.0,
        lt,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
    );
    if let Some(e) = poison.take() {
        return Err(e.into());
    }
    let out = out?;
    Ok(AnalyticResult {
        value: out.value,
        // Inner errors enter the outer integral weighted by a density, so
        // the worst inner estimate times the domain length bounds their
        // contribution.
        est_error: out.est_error + inner_err_max.get() * lt,
        evaluations: out.evaluations + inner_evals.get(),
    })
}

/// Expected end-to-end delay of a message over the multi-hop link:
/// `k * E[hop delay] + (k - 1) * T_proc` with `k = 2 sqrt(2) r_valid / lt`.
pub fn avg_total_delay(
    budget: &LinkBudget,
    r_valid: f64,
    lt: f64,
    spec: &QuadratureSpec,
) -> Result<AnalyticResult, AnalyticsError> {
    if !lt.is_finite() || lt <= 0.0 {
        return Err(AnalyticsError::Domain(format!(
            "lt must be positive and finite, got {lt}"
        )));
    }
    if !r_valid.is_finite() || r_valid <= 0.0 {
        return Err(AnalyticsError::Domain(format!(
            "r_valid must be positive and finite, got {r_valid}"
        )));
    }
    let k = hop_count(r_valid, lt);
    let hop = expected_hop_delay(budget, lt, spec)?;
    Ok(AnalyticResult {
        value: k * hop.value + (k - 1.0) * budget.proc_delay_s,
        est_error: k * hop.est_error,
        evaluations: hop.evaluations,
    })
}

/// End-to-end reliability of the multi-hop link: the probability that every
/// hop clears the SNR threshold, `(1 - F(epsilon))^k`.
pub fn avg_total_reliability(
    budget: &LinkBudget,
    r_valid: f64,
    lt: f64,
    epsilon_db: f64,
    spec: &QuadratureSpec,
) -> Result<AnalyticResult, AnalyticsError> {
    if !r_valid.is_finite() || r_valid <= 0.0 {
        return Err(AnalyticsError::Domain(format!(
            "r_valid must be positive and finite, got {r_valid}"
        )));
    }
    let cdf = snr_cdf(epsilon_db, budget, lt, spec)?;
    let per_hop = 1.0 - cdf.value;
    let k = hop_count(r_valid, lt);
    let value = per_hop.powf(k);
    let est_error = if per_hop > 0.0 {
        k * per_hop.powf(k - 1.0) * cdf.est_error
    } else {
        0.0
    };
    Ok(AnalyticResult {
        value,
        est_error,
        evaluations: cdf.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    const R_VALID: f64 = 707.1067811865476; // 500 * sqrt(2)

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn fp_pdf_support_and_level() {
        let lt = 100.0;
        assert!((fp_pdf(10.0, lt) - 0.01414).abs() < 5e-6);
        assert_eq!(fp_pdf(lt / SQRT_2 + 1e-9, lt), 0.0);
        assert_eq!(fp_pdf(-1e-9, lt), 0.0);
        let mass = quad::integrate(|z| fp_pdf(z, lt), 0.0, fp_support_max(lt), 1e-13, 1e-13, 64)
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn manhattan_pdf_normalization_and_mean() {
        let lt = 100.0;
        assert_eq!(manhattan_pdf(0.0, lt), 0.0);
        let mass = quad::integrate(|d| manhattan_pdf(d, lt), 0.0, lt, 1e-13, 1e-13, 64)
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-12);
        let mean = quad::integrate(|d| d * manhattan_pdf(d, lt), 0.0, lt, 1e-13, 1e-13, 64)
            .unwrap()
            .value;
        assert!((mean - 2.0 * lt / 3.0).abs() < 1e-9);
        assert!((mean - 66.67).abs() < 5e-3);
    }

    #[test]
    fn manhattan_cdf_matches_region_area_ratio() {
        let lt = 130.0;
        for d in [0.0, 13.0, 65.0, 100.0, 130.0] {
            let ratio = crate::geometry::region_areas(lt, d).unwrap().ratio();
            assert!((manhattan_cdf(d, lt) - ratio).abs() < 1e-15);
        }
    }

    #[test]
    fn hop_count_closed_form() {
        assert!((hop_count(R_VALID, 100.0) - 20.0).abs() < 1e-12);
        let r = 90.0;
        assert!((hop_count(r, 2.0 * SQRT_2 * r) - 1.0).abs() < 1e-12);
        assert!((hop_count(R_VALID, 50.0) - 2.0 * hop_count(R_VALID, 100.0)).abs() < 1e-12);
    }

    #[test]
    fn snr_cdf_limits() {
        let b = LinkBudget::default();
        let lo = snr_cdf(-200.0, &b, 100.0, &spec()).unwrap().value;
        assert!(lo < 1e-6, "CDF at -200 dB is {lo}");
        let hi = snr_cdf(200.0, &b, 100.0, &spec()).unwrap().value;
        assert!(hi > 1.0 - 1e-6, "CDF at +200 dB is {hi}");
    }

    #[test]
    fn snr_cdf_monotone_on_coarse_grid() {
        let b = LinkBudget::default();
        let mut prev = -1.0;
        for i in 0..21 {
            let gamma = -50.0 + 10.0 * i as f64;
            let v = snr_cdf(gamma, &b, 100.0, &spec()).unwrap().value;
            assert!(v + 1e-10 >= prev, "CDF not monotone at {gamma} dB");
            prev = v;
        }
    }

    #[test]
    fn snr_cdf_without_shadowing_is_distance_law_step() {
        let b = LinkBudget {
            sigma_db: 0.0,
            ..LinkBudget::default()
        };
        // With sigma = 0 the SNR is a deterministic function of distance, so
        // F(gamma) = P(d >= d*(gamma)) = 1 - (d*/lt)^2.
        let lt = 100.0;
        let gamma = 15.0;
        let d_star = 10f64.powf((b.link_margin_db() - gamma) / (10.0 * b.alpha));
        let expected = 1.0 - manhattan_cdf(d_star, lt);
        let got = snr_cdf(gamma, &b, lt, &spec()).unwrap().value;
        assert!((got - expected).abs() < 1e-7, "got {got}, expected {expected}");
    }

    #[test]
    fn delay_separates_processing_term() {
        let b = LinkBudget::default();
        let mut no_proc = b;
        no_proc.proc_delay_s = 0.0;
        let lt = 100.0;
        let k = hop_count(R_VALID, lt);
        let with = avg_total_delay(&b, R_VALID, lt, &spec()).unwrap().value;
        let without = avg_total_delay(&no_proc, R_VALID, lt, &spec()).unwrap().value;
        let proc_term = (k - 1.0) * 2.0e-5;
        assert!((proc_term - 380.0e-6).abs() < 1e-12);
        assert!((with - without - proc_term).abs() < 1e-12);
    }

    #[test]
    fn reliability_limits_and_log_identity() {
        let b = LinkBudget::default();
        let lt = 100.0;
        let certain = avg_total_reliability(&b, R_VALID, lt, -1000.0, &spec())
            .unwrap()
            .value;
        assert!((certain - 1.0).abs() < 1e-9);

        let eps = 5.0;
        let cdf = snr_cdf(eps, &b, lt, &spec()).unwrap().value;
        let k = hop_count(R_VALID, lt);
        let direct = avg_total_reliability(&b, R_VALID, lt, eps, &spec())
            .unwrap()
            .value;
        let via_log = (k * (1.0 - cdf).ln()).exp();
        assert!((direct - via_log).abs() < 1e-12);
        assert!(direct > 0.0 && direct <= 1.0);
    }

    #[test]
    fn reliability_monotone_in_threshold() {
        let b = LinkBudget::default();
        let mut prev = 2.0;
        for eps in [-20.0, -5.0, 0.0, 5.0, 10.0, 15.0] {
            let v = avg_total_reliability(&b, R_VALID, 100.0, eps, &spec())
                .unwrap()
                .value;
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn non_convergence_surfaces_with_evaluation_count() {
        let b = LinkBudget::default();
        let strict = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_subdivisions: 0,
            ..QuadratureSpec::default()
        };
        match snr_cdf(5.0, &b, 100.0, &strict) {
            Err(AnalyticsError::NonConvergent { evaluations, .. }) => {
                assert!(evaluations >= 15)
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn domain_errors_for_bad_inputs() {
        let b = LinkBudget::default();
        assert!(matches!(
            snr_cdf(5.0, &b, 0.0, &spec()),
            Err(AnalyticsError::Domain(_))
        ));
        assert!(matches!(
            avg_total_delay(&b, -1.0, 100.0, &spec()),
            Err(AnalyticsError::Domain(_))
        ));
    }
}
