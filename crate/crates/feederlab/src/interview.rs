//! School-led debiasing by interviewing: each school can reveal the true
//! potentials of the `G2` students originally placed in the rank window
//! `[s, s + iv]` below it.
//!
//! Three scenarios are covered: every school interviews with the same
//! capacity, a single school interviews, and a single school abstains while
//! everyone else interviews.

use crate::error::{Error, Result};
use crate::market::MarketParams;

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(name, format!("must lie in [0, 1] (got {v})")));
    }
    Ok(())
}

/// True-potential admission cutoffs `(d1, d2)` for `G1` and `G2` students
/// at school `s` when every school interviews with capacity `iv`.
///
/// Schools at least as good as `s` collectively see the true potentials of
/// `G2` students down to the original cutoff of school `min(1, s + iv)`.
/// When that revealed pool more than covers their seats the two cutoffs
/// coincide at the unbiased one; otherwise every revealed `G2` student is
/// admitted and `G1` students fill the remaining mass.
pub fn interview_cutoffs(params: &MarketParams, s: f64, iv: f64) -> Result<(f64, f64)> {
    check_unit("s", s)?;
    check_unit("iv", iv)?;
    let dist = params.dist();
    let p = params.p();
    let reach = (s + iv).min(1.0);
    let d2_candidate = params.school_cutoff(reach)? / params.beta();
    if dist.ccdf(d2_candidate) >= s {
        let d = dist.inv_ccdf(s)?;
        return Ok((d, d));
    }
    if p == 1.0 {
        // No G1 mass: the G1 cutoff is vacuous, report the market cutoff.
        return Ok((d2_candidate, d2_candidate));
    }
    let d2 = d2_candidate;
    let residual = ((s - p * dist.ccdf(d2)) / (1.0 - p)).clamp(0.0, 1.0);
    let d1 = dist.inv_ccdf(residual)?;
    Ok((d1, d2))
}

/// Utility of school `s` when all schools interview with capacity `iv`:
/// the density-weighted mean of the two group cutoffs, collapsing to the
/// `G2` cutoff once the `G1` cutoff hits the support floor.
pub fn utility_all_interview(params: &MarketParams, s: f64, iv: f64) -> Result<f64> {
    let (d1, d2) = interview_cutoffs(params, s, iv)?;
    let (lo, _) = params.dist().support();
    if d1 <= lo {
        return Ok(d2);
    }
    let w1 = (1.0 - params.p()) * params.dist().pdf(d1);
    let w2 = params.p() * params.dist().pdf(d2);
    if w1 + w2 == 0.0 {
        return Ok(d2);
    }
    Ok((w1 * d1 + w2 * d2) / (w1 + w2))
}

/// Utility of school `s` when it is the only school that interviews: it
/// skims the best still-hidden `G2` students, worth `d(s) / beta`.
pub fn utility_solo_interview(params: &MarketParams, s: f64) -> Result<f64> {
    check_unit("s", s)?;
    Ok(params.school_cutoff(s)? / params.beta())
}

/// Utility of school `s` when it is the only school that does not
/// interview: it is left with the `G1` cutoff of the interviewing market.
pub fn utility_solo_abstain(params: &MarketParams, s: f64, iv: f64) -> Result<f64> {
    Ok(interview_cutoffs(params, s, iv)?.0)
}
