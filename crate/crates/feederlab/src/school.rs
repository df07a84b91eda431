//! School-side views of the market: utility (mean true potential of the
//! admitted cohort) under the unbiased and biased matchings, and the
//! proportion of `G2` students per school.
//!
//! In the continuum a school is a point, so "utility" is the conditional
//! mean at the admission cutoff: a density-weighted mixture of the true
//! potentials of the `G1` and `G2` students sitting exactly at the cutoff.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::market::MarketParams;

fn check_rank(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid("s", format!("must lie in [0, 1] (got {s})")));
    }
    Ok(())
}

/// Mean true potential of school `s` when schools observe true potentials:
/// the `s`-quantile of the potential law.
pub fn utility_unbiased(params: &MarketParams, s: f64) -> Result<f64> {
    check_rank(s)?;
    params.dist().inv_ccdf(s)
}

/// Mean true potential of school `s` under the biased matching.
pub fn utility_biased(params: &MarketParams, s: f64) -> Result<f64> {
    check_rank(s)?;
    let p = params.p();
    let beta = params.beta();
    if let Distribution::Pareto { alpha } = *params.dist() {
        let ba = beta.powf(alpha);
        let split = 1.0 - p + p * ba;
        return Ok(if s <= split {
            let bap1 = beta.powf(alpha + 1.0);
            (split / (1.0 - p + p * bap1)) * (s / split).powf(-1.0 / alpha)
        } else {
            ((s - (1.0 - p)) / p).powf(-1.0 / alpha)
        });
    }
    Ok(utility_biased_from_cutoff(params, params.school_cutoff(s)?))
}

/// Density-mixture route to the biased utility, valid for every law; used
/// as the general path and as a cross-check on the Pareto closed form.
pub fn utility_biased_from_cutoff(params: &MarketParams, cutoff: f64) -> f64 {
    let p = params.p();
    let beta = params.beta();
    let (lo, _) = params.dist().support();
    if cutoff < lo {
        // Only G2 students reach perceived potentials below the support
        // floor, so the school admits overqualified G2 students alone.
        return cutoff / beta;
    }
    let w1 = (1.0 - p) * params.dist().pdf(cutoff);
    let w2 = p * params.dist().pdf(cutoff / beta);
    if w1 + w2 == 0.0 {
        return 0.5 * (cutoff + cutoff / beta);
    }
    (w1 * cutoff + w2 * (cutoff / beta)) / (w1 + w2)
}

/// Proportion of `G2` students at school `s`. Without bias this is the
/// population share `p`; with bias the share collapses at selective schools
/// and saturates to 1 once the cutoff falls below the potential floor.
pub fn diversity(params: &MarketParams, s: f64, biased: bool) -> Result<f64> {
    check_rank(s)?;
    if !biased {
        return Ok(params.p());
    }
    let p = params.p();
    let beta = params.beta();
    if let Distribution::Pareto { alpha } = *params.dist() {
        let ba = beta.powf(alpha);
        let split = 1.0 - p + p * ba;
        return Ok(if s <= split { p * ba / split } else { 1.0 });
    }
    let cutoff = params.school_cutoff(s)?;
    let (lo, _) = params.dist().support();
    if cutoff < lo {
        return Ok(1.0);
    }
    // Perceived-potential densities at the cutoff: the G2 branch carries the
    // 1/beta Jacobian of z_hat = beta * z.
    let w1 = (1.0 - p) * params.dist().pdf(cutoff);
    let w2 = p * params.dist().pdf(cutoff / beta) / beta;
    if w1 + w2 == 0.0 {
        return Ok(p);
    }
    Ok(w2 / (w1 + w2))
}
