//! Beta-distribution kernel: expectation, regularized incomplete beta and the
//! quantile rejection test used by the majority-rule rating filter.
//!
//! Evidence always enters as counts `(p, n)` of positive and negative ratings,
//! mapping to `Beta(p + 1, n + 1)`.

use thiserror::Error;

use crate::ledger::RatingAggregate;

/// Maximum iterations for the continued-fraction evaluation.
const MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BetaError {
    #[error("argument out of domain: x={x}, alpha={alpha}, beta={beta}")]
    Domain { x: f64, alpha: f64, beta: f64 },
    #[error("continued fraction failed to converge for x={x}, alpha={alpha}, beta={beta}")]
    NoConvergence { x: f64, alpha: f64, beta: f64 },
}

/// Beta evidence pair derived from a rating aggregate: `alpha = p + 1`, `beta = n + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEvidence {
    pub alpha: f64,
    pub beta: f64,
}

impl From<RatingAggregate> for BetaEvidence {
    fn from(agg: RatingAggregate) -> Self {
        BetaEvidence {
            alpha: agg.p as f64 + 1.0,
            beta: agg.n as f64 + 1.0,
        }
    }
}

/// Expected value of `Beta(p + 1, n + 1)`: `(p + 1) / (p + n + 2)`.
///
/// With no evidence this is 0.5, the default reputation of an unknown party.
#[inline]
pub fn beta_mean(p: u64, n: u64) -> f64 {
    (p as f64 + 1.0) / (p as f64 + n as f64 + 2.0)
}

/// Regularized incomplete beta function `I_x(alpha, beta)`, i.e. the CDF of the
/// beta distribution at `x`.
///
/// Evaluated by the modified Lentz continued fraction, switching to the
/// symmetric form `1 - I_{1-x}(beta, alpha)` when `x > (alpha+1)/(alpha+beta+2)`
/// so the fraction always converges quickly.
pub fn beta_cdf(x: f64, alpha: f64, beta: f64) -> Result<f64, BetaError> {
    if !(0.0..=1.0).contains(&x) || alpha < 1.0 || beta < 1.0 || !x.is_finite() {
        return Err(BetaError::Domain { x, alpha, beta });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let prefix = (alpha * x.ln() + beta * (1.0 - x).ln() - ln_beta(alpha, beta)).exp();
    if x > (alpha + 1.0) / (alpha + beta + 2.0) {
        let cf = betacf(beta, alpha, 1.0 - x)
            .ok_or(BetaError::NoConvergence { x, alpha, beta })?;
        Ok(1.0 - prefix * cf / beta)
    } else {
        let cf = betacf(alpha, beta, x).ok_or(BetaError::NoConvergence { x, alpha, beta })?;
        Ok(prefix * cf / alpha)
    }
}

/// Whitby's two-sided quantile test: does the reputation `rep` fall in the
/// rejection area (below the `q` quantile or above the `1 - q` quantile) of the
/// beta distribution of an advisor's own rating evidence?
pub fn in_rejection_region(rep: f64, agg: RatingAggregate, q: f64) -> bool {
    debug_assert!(q > 0.0 && q < 0.5);
    let ev = BetaEvidence::from(agg);
    let cdf = beta_cdf(rep, ev.alpha, ev.beta)
        .expect("rep in [0,1] and alpha,beta >= 1 are always in domain");
    cdf < q || cdf > 1.0 - q
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn betacf(a: f64, b: f64, x: f64) -> Option<f64> {
    const TINY: f64 = 1e-30;
    let eps = f64::EPSILON;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        // even step
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        // odd step
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < eps {
            return Some(h);
        }
    }
    None
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lanczos approximation of `ln Γ(x)` for `x > 0` (g = 5, n = 6 coefficients).
fn ln_gamma(x: f64) -> f64 {
    const COF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for c in COF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg(p: u32, n: u32) -> RatingAggregate {
        RatingAggregate { p, n }
    }

    #[test]
    fn mean_of_no_evidence_is_half() {
        assert_eq!(beta_mean(0, 0), 0.5);
    }

    #[test]
    fn mean_matches_direct_arithmetic() {
        assert!((beta_mean(3, 1) - 4.0 / 6.0).abs() < 1e-15);
        assert!((beta_mean(0, 10) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn mean_monotone_in_counts() {
        for p in 0..30u64 {
            for n in 0..30u64 {
                assert!(beta_mean(p + 1, n) > beta_mean(p, n));
                assert!(beta_mean(p, n + 1) < beta_mean(p, n));
            }
        }
    }

    #[test]
    fn cdf_uniform() {
        assert!((beta_cdf(0.5, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        for x in [0.1, 0.25, 0.9] {
            assert!((beta_cdf(x, 1.0, 1.0).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_analytic_power_laws() {
        // Beta(2,1) has CDF x^2; Beta(11,1) has CDF x^11.
        assert!((beta_cdf(0.5, 2.0, 1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((beta_cdf(0.1, 11.0, 1.0).unwrap() - 1e-11).abs() < 1e-21);
        // Beta(1,b) has CDF 1 - (1-x)^b.
        let got = beta_cdf(0.8, 1.0, 4.0).unwrap();
        assert!((got - (1.0 - 0.2f64.powi(4))).abs() < 1e-12);
    }

    #[test]
    fn cdf_endpoints() {
        assert_eq!(beta_cdf(0.0, 3.0, 7.0).unwrap(), 0.0);
        assert_eq!(beta_cdf(1.0, 3.0, 7.0).unwrap(), 1.0);
    }

    #[test]
    fn cdf_rejects_out_of_domain() {
        assert!(beta_cdf(-0.1, 1.0, 1.0).is_err());
        assert!(beta_cdf(1.1, 1.0, 1.0).is_err());
        assert!(beta_cdf(0.5, 0.5, 1.0).is_err());
        assert!(beta_cdf(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn cdf_monotone_in_x() {
        let mut prev = 0.0;
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let v = beta_cdf(x, 7.0, 3.0).unwrap();
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }

    #[test]
    fn rejection_region_examples() {
        // CDF of Beta(11,1) at 0.1 is 1e-11 < 0.01: advisor rejected.
        assert!(in_rejection_region(0.1, agg(10, 0), 0.01));
        // Uniform at its center: kept.
        assert!(!in_rejection_region(0.5, agg(0, 0), 0.01));
        // Mirror case via Beta(1,11): 1 - 0.1^11 > 0.99.
        assert!(in_rejection_region(0.9, agg(0, 10), 0.01));
    }

    #[test]
    fn cdf_matches_quadrature_oracle_on_sample_grid() {
        // The oracle integrates the unnormalized density numerically and
        // shares no code with the continued-fraction path.
        let mut max_err = 0.0f64;
        for &a in &[1u32, 2, 3, 5, 8, 13, 21, 34, 50] {
            for &b in &[1u32, 2, 4, 7, 11, 25, 50] {
                for i in 1..10 {
                    let x = i as f64 / 10.0;
                    let got = beta_cdf(x, a as f64, b as f64).unwrap();
                    let want = crate::acceptance::quadrature_cdf(x, a as f64, b as f64);
                    max_err = max_err.max((got - want).abs());
                }
            }
        }
        assert!(max_err <= 1e-8, "max abs error {max_err:.3e}");
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // I_x(a,b) + I_{1-x}(b,a) = 1 within 1e-10.
        #[test]
        fn cdf_symmetry(x in 0.0f64..=1.0, a in 1u32..60, b in 1u32..60) {
            let lhs = beta_cdf(x, a as f64, b as f64).unwrap();
            let rhs = beta_cdf(1.0 - x, b as f64, a as f64).unwrap();
            prop_assert!((lhs + rhs - 1.0).abs() < 1e-10);
        }

        #[test]
        fn cdf_in_unit_interval(x in 0.0f64..=1.0, a in 1u32..80, b in 1u32..80) {
            let v = beta_cdf(x, a as f64, b as f64).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
