//! Centrally funded debiasing: vouchers reveal the true potentials of `G2`
//! students whose potential falls in a target band `[Z1, Z2]`, subject to a
//! resource budget equal to the potential-law mass of the band.
//!
//! The module provides the post-intervention ranking, two unfairness
//! measures — the worst mistreatment `mm` and the positive area under the
//! displacement curve `PAUC` — sufficient conditions for an interval to
//! improve the worst-off student, closed-form optimal intervals for Pareto
//! potentials, and a sliding-window search for arbitrary laws.
//!
//! Band endpoints are treated as not debiased (the band is open). This is a
//! measure-zero choice, but it makes the worst mistreatment of an optimal
//! band attained at both endpoints, which is how the closed forms equalize
//! them.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::market::{Group, MarketParams};
use crate::numeric;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Mass of debiasing resources, as a fraction of the potential law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoucherBudget(f64);

impl VoucherBudget {
    pub fn new(c_hat: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c_hat) {
            return Err(Error::invalid("c_hat", format!("must lie in [0, 1] (got {c_hat})")));
        }
        Ok(VoucherBudget(c_hat))
    }

    pub fn mass(&self) -> f64 {
        self.0
    }
}

/// Target band of true potentials to debias; possibly empty. Endpoints may
/// be infinite (e.g. a bottom band `(-inf, q]` under a Gaussian law).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DebiasInterval {
    bounds: Option<(f64, f64)>,
}

impl DebiasInterval {
    pub fn new(z1: f64, z2: f64) -> Result<Self> {
        if z1.is_nan() || z2.is_nan() || z1 > z2 {
            return Err(Error::invalid(
                "interval",
                format!("requires z1 <= z2 (got [{z1}, {z2}])"),
            ));
        }
        Ok(DebiasInterval { bounds: Some((z1, z2)) })
    }

    pub const fn empty() -> Self {
        DebiasInterval { bounds: None }
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    /// Whether a debiased student sits strictly inside the band.
    pub fn contains_open(&self, z: f64) -> bool {
        match self.bounds {
            Some((z1, z2)) => z > z1 && z < z2,
            None => false,
        }
    }

    /// Whether `z` lies in the closed band; the discrete simulator offers
    /// vouchers on the closed interval.
    pub fn contains_closed(&self, z: f64) -> bool {
        match self.bounds {
            Some((z1, z2)) => z >= z1 && z <= z2,
            None => false,
        }
    }
}

impl Serialize for DebiasInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DebiasInterval", 2)?;
        match self.bounds {
            Some((z1, z2)) => {
                st.serialize_field("z1", &Some(z1))?;
                st.serialize_field("z2", &Some(z2))?;
            }
            None => {
                st.serialize_field("z1", &None::<f64>)?;
                st.serialize_field("z2", &None::<f64>)?;
            }
        }
        st.end()
    }
}

/// Which unfairness measure an optimizer targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Supremum of `G2` mistreatment.
    Mm,
    /// Positive area under the displacement curve.
    Pauc,
}

/// Snapshot of both unfairness measures under a given band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnfairnessReport {
    pub mm: f64,
    pub pauc: f64,
    pub interval: DebiasInterval,
}

/// Evaluate both measures for `interval`.
pub fn assess(params: &MarketParams, interval: &DebiasInterval) -> UnfairnessReport {
    UnfairnessReport {
        mm: mistreatment_max(params, interval),
        pauc: pauc(params, interval),
        interval: *interval,
    }
}

/// Potential-law mass of the band: the budget it consumes.
pub fn budget_of_interval(params: &MarketParams, interval: &DebiasInterval) -> f64 {
    match interval.bounds() {
        None => 0.0,
        Some((z1, z2)) => params.dist().ccdf(z1) - params.dist().ccdf(z2),
    }
}

/// Mass of debiased `G2` potentials above `t`.
fn treated_mass_above(params: &MarketParams, interval: &DebiasInterval, t: f64) -> f64 {
    match interval.bounds() {
        None => 0.0,
        Some((z1, z2)) => {
            (params.dist().ccdf(t.max(z1)) - params.dist().ccdf(z2)).max(0.0)
        }
    }
}

/// Rank of a student after the band has been debiased.
///
/// For `G2` the three regimes (above, inside, below the band) follow the
/// counting rule for post-intervention perceived potentials; for `G1` the
/// rank counts the same revealed masses from the other side. An empty band
/// reduces to the biased rank, bit for bit.
pub fn rank_post_voucher(
    params: &MarketParams,
    interval: &DebiasInterval,
    z: f64,
    group: Group,
) -> f64 {
    let p = params.p();
    let beta = params.beta();
    let dist = params.dist();
    let Some((z1, z2)) = interval.bounds() else {
        return params.rank_biased(z, group);
    };
    match group {
        Group::G2 => {
            if z <= z1 {
                // Still biased, and nobody below the band jumped over.
                params.rank_biased(z, group)
            } else if z >= z2 {
                // Still biased; debiased students with revealed potential
                // above this student's perceived one move ahead.
                (1.0 - p) * dist.ccdf(beta * z)
                    + p * dist.ccdf(z)
                    + p * treated_mass_above(params, interval, beta * z)
            } else {
                // Debiased: ahead are G1 above z, debiased G2 in (z, z2),
                // and still-biased G2 whose discounted potential tops z.
                (1.0 - p) * dist.ccdf(z)
                    + p * (dist.ccdf(z) - dist.ccdf(z2))
                    + p * dist.ccdf((z / beta).max(z2))
            }
        }
        Group::G1 => {
            (1.0 - p) * dist.ccdf(z)
                + p * (dist.ccdf(z / beta) - treated_mass_above(params, interval, z / beta))
                + p * treated_mass_above(params, interval, z)
        }
    }
}

/// Post-voucher displacement of a `G2` student.
fn post_displacement(params: &MarketParams, interval: &DebiasInterval, z: f64) -> f64 {
    rank_post_voucher(params, interval, z, Group::G2) - params.rank_unbiased(z)
}

/// Worst mistreatment under the band: `sup (rank_post - rank_unbiased)`
/// over `G2`.
///
/// For Pareto potentials every smooth piece of the post-voucher
/// displacement is monotone, so the supremum sits on a piece boundary and
/// evaluating the boundary set is exact. Other laws go through a quantile
/// grid with golden-section refinement.
pub fn mistreatment_max(params: &MarketParams, interval: &DebiasInterval) -> f64 {
    if interval.is_empty() {
        return params.max_displacement().0;
    }
    if params.dist().is_pareto() {
        let (z1, z2) = interval.bounds().expect("non-empty");
        let beta = params.beta();
        let lo = 1.0;
        let mut best: f64 = 0.0;
        for cand in [lo, 1.0 / beta, z1, z2, z1 / beta, z2 / beta] {
            if cand.is_finite() && cand >= lo {
                best = best.max(post_displacement(params, interval, cand));
            }
        }
        best
    } else {
        mistreatment_max_numeric(params, interval)
    }
}

/// Grid-plus-refinement route to the worst mistreatment, valid for every
/// law; doubles as a cross-check on the Pareto boundary evaluation.
pub fn mistreatment_max_numeric(params: &MarketParams, interval: &DebiasInterval) -> f64 {
    let dist = params.dist();
    let beta = params.beta();
    let (lo, _) = dist.support();
    let mut grid = dist.quantile_grid(4001, 1e-5, 1.0 - 1e-5);
    if let Some((z1, z2)) = interval.bounds() {
        for cand in [z1, z2, z1 / beta, z2 / beta, beta * z2] {
            if cand.is_finite() && cand >= lo {
                grid.push(cand);
            }
        }
    }
    if lo.is_finite() {
        grid.push(lo / beta);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let f = |z: f64| post_displacement(params, interval, z);
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &z) in grid.iter().enumerate() {
        let v = f(z);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = grid[best_i.saturating_sub(1)];
    let b = grid[(best_i + 1).min(grid.len() - 1)];
    let (_, refined) = numeric::golden_max(f, a, b, 1e-8);
    refined.max(best_v).max(0.0)
}

/// `beta^alpha` helpers for the Pareto case formulas.
fn pareto_consts(params: &MarketParams) -> Option<(f64, f64, f64)> {
    match *params.dist() {
        Distribution::Pareto { alpha } => {
            let ba = params.beta().powf(alpha);
            Some((alpha, ba, 1.0 / ba))
        }
        _ => None,
    }
}

/// PAUC: the positive part of the post-voucher displacement integrated
/// against the potential law. Closed case formulas for Pareto, adaptive
/// quadrature otherwise.
pub fn pauc(params: &MarketParams, interval: &DebiasInterval) -> f64 {
    if let Some((alpha, ba, ia)) = pareto_consts(params) {
        let p = params.p();
        let status_quo = 0.5 * (1.0 - p) * (1.0 - ba);
        let Some((z1, z2)) = interval.bounds() else {
            return status_quo;
        };
        let z1 = z1.max(1.0);
        let beta = params.beta();
        let x1 = z1.powf(-alpha).min(1.0);
        let x2 = if z2.is_finite() { z2.powf(-alpha) } else { 0.0 };
        let a_coef = 0.5 * ((1.0 - p) * (ia - 1.0) + p * ba);
        let b_coef = 0.5 * (p * ba - (1.0 - p));
        let gain = if beta * z2 <= 1.0 {
            b_coef * (x1 * x1 - x2 * x2) + (1.0 - p) * (x1 - x2) + p * x2 * x2 - p * x1 * x2
        } else if beta * z2 >= z1 {
            if beta * z1 >= 1.0 {
                0.5 * (1.0 - p) * (ia - 1.0) * x1 * x1
                    + 0.5 * (p - p * ba - ia + 1.0) * x2 * x2
            } else {
                -0.5 * (1.0 - p) * ba
                    + (1.0 - p) * (x1 - 0.5 * x1 * x1)
                    + 0.5 * (p - p * ba - ia + 1.0) * x2 * x2
            }
        } else if beta * z1 >= 1.0 {
            a_coef * (x1 * x1 - x2 * x2) + p * x2 * x2 - p * x1 * x2
        } else {
            -0.5 * (1.0 - p) * ba + b_coef * x1 * x1 + (1.0 - p) * x1 - a_coef * x2 * x2
                + p * x2 * x2
                - p * x1 * x2
        };
        return status_quo - gain;
    }
    pauc_numeric(params, interval)
}

/// Integration breakpoints where the post-voucher displacement changes
/// expression.
fn displacement_breakpoints(params: &MarketParams, interval: &DebiasInterval) -> Vec<f64> {
    let beta = params.beta();
    let (lo, _) = params.dist().support();
    let mut pts = Vec::new();
    if lo.is_finite() {
        pts.push(lo / beta);
    }
    if let Some((z1, z2)) = interval.bounds() {
        pts.extend([z1, z2, beta * z2, z1 / beta, z2 / beta]);
    }
    pts
}

/// Quadrature route to the PAUC (absolute tolerance 1e-8 on the integral),
/// valid for every law; doubles as the independent check on the Pareto
/// case formulas.
pub fn pauc_numeric(params: &MarketParams, interval: &DebiasInterval) -> f64 {
    let dist = params.dist();
    let (lo, hi) = dist.support();
    let a = if lo.is_finite() { lo } else { dist.inv_ccdf(1.0 - 1e-12).expect("in range") };
    let b = if hi.is_finite() { hi } else { dist.inv_ccdf(1e-12).expect("in range") };
    let f = |z: f64| post_displacement(params, interval, z).max(0.0) * dist.pdf(z);
    numeric::integrate_piecewise(&f, a, b, &displacement_breakpoints(params, interval), 1e-8)
}

/// PAUC improvement of the band over the status quo, integrating only where
/// the two displacement curves differ. Used by the window search.
fn pauc_gain_numeric(params: &MarketParams, z1: f64, z2: f64) -> f64 {
    let dist = params.dist();
    let beta = params.beta();
    let (lo, hi) = dist.support();
    let interval = DebiasInterval::new(z1, z2).expect("caller orders endpoints");
    let a = z1.max(if lo.is_finite() { lo } else { dist.inv_ccdf(1.0 - 1e-12).expect("in range") });
    let b = (z2 / beta).min(if hi.is_finite() { hi } else { dist.inv_ccdf(1e-12).expect("in range") });
    let f = |z: f64| {
        let before = params.displacement(z, Group::G2).max(0.0);
        let after = post_displacement(params, &interval, z).max(0.0);
        (before - after) * dist.pdf(z)
    };
    numeric::integrate_piecewise(&f, a, b, &displacement_breakpoints(params, &interval), 1e-9)
}

/// Verdict on whether debiasing a band strictly improves the worst-off
/// `G2` student relative to leaving the market alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImprovementVerdict {
    /// The band strictly lowers the supremum of mistreatment where it acts.
    Improves,
    /// The band strictly raises that supremum: resources spent here hurt.
    Worsens,
    /// The whole band maps below the perceived-potential floor; such bands
    /// can never improve the worst-off student.
    NeverImproves,
    /// No strict change (no bias, empty band, or a boundary tie).
    NoStrictChange,
}

/// Classify a band by the closed sufficient conditions (Pareto only).
///
/// The comparisons `beta*z2` vs `z1` and `beta*z1` vs `1` vs `beta*z2`
/// select one of five regimes; each has a strict inequality deciding
/// whether the supremum of mistreatment drops.
pub fn improvement_condition(
    params: &MarketParams,
    interval: &DebiasInterval,
) -> Result<ImprovementVerdict> {
    let Some((alpha, ba, ia)) = pareto_consts(params) else {
        return Err(Error::RequiresPareto("improvement_condition"));
    };
    let p = params.p();
    let beta = params.beta();
    if params.beta() == 1.0 {
        return Ok(ImprovementVerdict::NoStrictChange);
    }
    let Some((z1, z2)) = interval.bounds() else {
        return Ok(ImprovementVerdict::NoStrictChange);
    };
    let z1 = z1.max(1.0);
    if z1 == z2 {
        return Ok(ImprovementVerdict::NoStrictChange);
    }
    if beta * z2 <= 1.0 {
        return Ok(ImprovementVerdict::NeverImproves);
    }
    let x1 = z1.powf(-alpha);
    let x2 = if z2.is_finite() { z2.powf(-alpha) } else { 0.0 };
    let (lhs, rhs) = if beta * z2 >= z1 {
        if beta * z1 >= 1.0 {
            (p, 1.0 - (z1 / z2).powf(alpha))
        } else {
            (p, 1.0 - (beta * z2).powf(-alpha))
        }
    } else if beta * z1 >= 1.0 {
        (p, 1.0 - ba)
    } else {
        (p * (x1 - x2), (1.0 - p) * (ia - 1.0) * (ba - x2))
    };
    Ok(if lhs < rhs {
        ImprovementVerdict::Improves
    } else if lhs > rhs {
        ImprovementVerdict::Worsens
    } else {
        ImprovementVerdict::NoStrictChange
    })
}

/// An optimizer's answer: the band, the measure after debiasing it, and
/// whether the closed form's optimality precondition held.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalInterval {
    pub interval: DebiasInterval,
    pub value_after: f64,
    pub assumption_satisfied: bool,
}

/// Budget-exact band minimizing the worst mistreatment (Pareto closed
/// form). Requires Pareto potentials; `assumption_satisfied` reports
/// whether `p < 1 - beta^alpha`, the regime where the closed form is
/// provably optimal.
pub fn optimal_interval_mm(params: &MarketParams, budget: VoucherBudget) -> Result<OptimalInterval> {
    let Some((alpha, ba, ia)) = pareto_consts(params) else {
        return Err(Error::RequiresPareto("optimal_interval_mm"));
    };
    let p = params.p();
    let c = budget.mass();
    let assumption = p < 1.0 - ba;
    if c == 0.0 || params.beta() == 1.0 {
        // Nothing to spend, or nothing to fix.
        return Ok(OptimalInterval {
            interval: DebiasInterval::empty(),
            value_after: (1.0 - p) * (1.0 - ba),
            assumption_satisfied: assumption,
        });
    }
    let threshold = (1.0 - p) * (1.0 - ba) / ((1.0 - p) + (1.0 - ba));
    let (x1, x2, mm_after) = if c >= threshold {
        let denom = ia - p;
        let x1 = ((1.0 - p) + (ia - 1.0) * c) / denom;
        let x2 = (1.0 - p) * (1.0 - c) / denom;
        let mm = (1.0 - p) * (1.0 - ba) * (1.0 - c) / (1.0 - p * ba);
        (x1, x2, mm)
    } else {
        let x2 = (1.0 - p - c) * ba / (1.0 - p);
        let x1 = x2 + c;
        let mm = (1.0 - p - c) * (1.0 - ba) + p * c;
        (x1, x2, mm)
    };
    let z1 = x1.powf(-1.0 / alpha);
    let z2 = if x2 > 0.0 { x2.powf(-1.0 / alpha) } else { f64::INFINITY };
    Ok(OptimalInterval {
        interval: DebiasInterval::new(z1, z2)?,
        value_after: mm_after,
        assumption_satisfied: assumption,
    })
}

/// Budget-exact band minimizing the PAUC (Pareto closed form). The
/// precondition here is `p < 1 - beta^alpha` and `p < 1/2`.
pub fn optimal_interval_pauc(
    params: &MarketParams,
    budget: VoucherBudget,
) -> Result<OptimalInterval> {
    let Some((alpha, ba, ia)) = pareto_consts(params) else {
        return Err(Error::RequiresPareto("optimal_interval_pauc"));
    };
    let p = params.p();
    let c = budget.mass();
    let assumption = p < 1.0 - ba && p < 0.5;
    let status_quo = 0.5 * (1.0 - p) * (1.0 - ba);
    if c == 0.0 || params.beta() == 1.0 {
        return Ok(OptimalInterval {
            interval: DebiasInterval::empty(),
            value_after: status_quo,
            assumption_satisfied: assumption,
        });
    }
    let threshold = (1.0 - p) * (1.0 - ba) / (2.0 - p - ba - p * ba + p * ba * ba);
    let (x2, pauc_after) = if c >= threshold {
        let denom = p * ba + ia - 2.0 * p;
        let x2 = (1.0 - p) * (1.0 - c) / denom;
        let after = 0.5 * (1.0 - p) * (1.0 - ba) * ((ia - p) * (1.0 - c) * (1.0 - c) / denom);
        (x2, after)
    } else {
        let num = (p * ba - 1.0) * c + (1.0 - p);
        let x2 = num / ((1.0 - p) * ia);
        let after = 0.5 * (1.0 - p) * (1.0 - c) * (1.0 - c)
            - 0.5 * ba * (num * num / (1.0 - p) + p * c * c);
        (x2, after)
    };
    let x1 = x2 + c;
    let z1 = x1.powf(-1.0 / alpha);
    let z2 = if x2 > 0.0 { x2.powf(-1.0 / alpha) } else { f64::INFINITY };
    Ok(OptimalInterval {
        interval: DebiasInterval::new(z1, z2)?,
        value_after: pauc_after,
        assumption_satisfied: assumption,
    })
}

/// Sliding-window search for the best band under either measure, for any
/// potential law.
///
/// The lower endpoint runs over a quantile grid (the outer 0.01% tails are
/// excluded so heavy tails keep the upper endpoint finite); the upper
/// endpoint is set so the band holds exactly the budget mass. Ties pick the
/// leftmost window. Windows are scored in parallel; the reduction is a
/// deterministic min over (value, window index).
pub fn optimal_interval_numeric(
    params: &MarketParams,
    budget: VoucherBudget,
    measure: Measure,
    grid_size: usize,
) -> Result<OptimalInterval> {
    if grid_size < 2 {
        return Err(Error::invalid("grid_size", format!("must be at least 2 (got {grid_size})")));
    }
    let c = budget.mass();
    let assumption = params.assumption_holds().unwrap_or(true);
    if c == 0.0 {
        let value = match measure {
            Measure::Mm => mistreatment_max(params, &DebiasInterval::empty()),
            Measure::Pauc => pauc(params, &DebiasInterval::empty()),
        };
        return Ok(OptimalInterval {
            interval: DebiasInterval::empty(),
            value_after: value,
            assumption_satisfied: assumption,
        });
    }
    const TAIL: f64 = 1e-4;
    let u_hi = 1.0 - TAIL;
    let u_lo = (c + TAIL).min(u_hi);
    let status_quo_pauc = match measure {
        Measure::Pauc => pauc(params, &DebiasInterval::empty()),
        Measure::Mm => 0.0,
    };
    let dist = params.dist();
    // z1 ascends with the window index, so the (value, index) min is the
    // leftmost optimal window.
    let windows: Vec<(f64, f64)> = (0..grid_size)
        .map(|i| {
            let u = u_hi - (u_hi - u_lo) * i as f64 / (grid_size - 1) as f64;
            let z1 = dist.inv_ccdf(u).expect("u in range");
            let z2 = dist.inv_ccdf(u - c).expect("u - c in range");
            (z1, z2)
        })
        .collect();
    let scored: Vec<f64> = windows
        .par_iter()
        .map(|&(z1, z2)| match measure {
            Measure::Mm => {
                let interval = DebiasInterval::new(z1, z2).expect("ordered");
                mistreatment_max(params, &interval)
            }
            Measure::Pauc => {
                if dist.is_pareto() {
                    let interval = DebiasInterval::new(z1, z2).expect("ordered");
                    pauc(params, &interval)
                } else {
                    status_quo_pauc - pauc_gain_numeric(params, z1, z2)
                }
            }
        })
        .collect();
    let mut best = 0usize;
    for i in 1..scored.len() {
        if scored[i] < scored[best] {
            best = i;
        }
    }
    let (z1, z2) = windows[best];
    Ok(OptimalInterval {
        interval: DebiasInterval::new(z1, z2)?,
        value_after: scored[best],
        assumption_satisfied: assumption,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use approx::assert_abs_diff_eq;

    fn pareto_params() -> MarketParams {
        MarketParams::new(Distribution::pareto(3.0).unwrap(), 0.8, 0.25).unwrap()
    }

    #[test]
    fn budget_examples() {
        let m = pareto_params();
        let i = DebiasInterval::new(1.2252, 1.3111).unwrap();
        assert_abs_diff_eq!(budget_of_interval(&m, &i), 0.10002, epsilon = 5e-6);
        assert_eq!(budget_of_interval(&m, &DebiasInterval::empty()), 0.0);
        let full = DebiasInterval::new(1.0, f64::INFINITY).unwrap();
        assert_eq!(budget_of_interval(&m, &full), 1.0);
    }

    #[test]
    fn interval_validation() {
        assert!(DebiasInterval::new(2.0, 1.0).is_err());
        assert!(DebiasInterval::new(f64::NAN, 1.0).is_err());
        assert!(DebiasInterval::new(f64::NEG_INFINITY, 1.0).is_ok());
        assert!(VoucherBudget::new(-0.1).is_err());
        assert!(VoucherBudget::new(1.1).is_err());
    }

    #[test]
    fn empty_band_is_biased_rank_bit_for_bit() {
        let m = pareto_params();
        let e = DebiasInterval::empty();
        for z in [1.0, 1.1, 1.25, 2.0, 5.0] {
            assert_eq!(rank_post_voucher(&m, &e, z, Group::G2), m.rank_biased(z, Group::G2));
            assert_eq!(rank_post_voucher(&m, &e, z, Group::G1), m.rank_biased(z, Group::G1));
        }
    }

    #[test]
    fn unaffected_students_keep_their_biased_rank_exactly() {
        let m = pareto_params();
        let i = DebiasInterval::new(1.2, 1.5).unwrap();
        // Outside [z1, z2/beta] the post-voucher rank is the biased rank.
        for z in [1.0, 1.1, 1.19, 1.875, 2.0, 10.0] {
            assert_eq!(
                rank_post_voucher(&m, &i, z, Group::G2),
                m.rank_biased(z, Group::G2),
                "affected-region leak at z={z}"
            );
        }
    }

    #[test]
    fn full_band_restores_unbiased_rank() {
        let m = pareto_params();
        let full = DebiasInterval::new(1.0, f64::INFINITY).unwrap();
        for z in [1.1, 1.5, 2.0, 4.0] {
            assert_abs_diff_eq!(
                rank_post_voucher(&m, &full, z, Group::G2),
                m.rank_unbiased(z),
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                rank_post_voucher(&m, &full, z, Group::G1),
                m.rank_unbiased(z),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn displacement_at_band_start_matches_small_budget_worst_case() {
        // Band fitting the small-budget closed form at c=0.10: the student
        // at the lower endpoint stays biased and carries the worst
        // mistreatment (1-p-c)(1-beta^alpha) + p c = 0.3422.
        let m = pareto_params();
        let opt = optimal_interval_mm(&m, VoucherBudget::new(0.10).unwrap()).unwrap();
        let (z1, _) = opt.interval.bounds().unwrap();
        let disp = rank_post_voucher(&m, &opt.interval, z1, Group::G2) - m.rank_unbiased(z1);
        assert_abs_diff_eq!(disp, 0.3422, epsilon = 1e-10);
        assert_abs_diff_eq!(opt.value_after, 0.3422, epsilon = 1e-10);
    }

    #[test]
    fn mistreatment_examples() {
        let m = pareto_params();
        assert_abs_diff_eq!(
            mistreatment_max(&m, &DebiasInterval::empty()),
            0.366,
            epsilon = 1e-12
        );
        let opt = optimal_interval_mm(&m, VoucherBudget::new(0.40).unwrap()).unwrap();
        assert_abs_diff_eq!(
            mistreatment_max(&m, &opt.interval),
            0.75 * 0.488 * 0.6 / (1.0 - 0.128),
            epsilon = 1e-10
        );
        let nobias = MarketParams::new(Distribution::pareto(3.0).unwrap(), 1.0, 0.25).unwrap();
        assert_eq!(mistreatment_max(&nobias, &DebiasInterval::empty()), 0.0);
    }

    #[test]
    fn mistreatment_boundary_eval_matches_grid_route() {
        let m = pareto_params();
        for (z1, z2) in [(1.05, 1.2), (1.1, 1.6), (1.3, 1.5), (1.3, 2.0), (1.5, 2.5)] {
            let i = DebiasInterval::new(z1, z2).unwrap();
            let exact = mistreatment_max(&m, &i);
            let gridded = mistreatment_max_numeric(&m, &i);
            assert!(
                (exact - gridded).abs() < 1e-7,
                "mm route mismatch on [{z1},{z2}]: {exact} vs {gridded}"
            );
        }
    }

    #[test]
    fn pauc_examples() {
        let m = pareto_params();
        assert_abs_diff_eq!(pauc(&m, &DebiasInterval::empty()), 0.183, epsilon = 1e-12);
        let opt = optimal_interval_pauc(&m, VoucherBudget::new(0.40).unwrap()).unwrap();
        assert_abs_diff_eq!(opt.value_after, 0.070963, epsilon = 5e-7);
        assert_abs_diff_eq!(pauc(&m, &opt.interval), opt.value_after, epsilon = 1e-10);
    }

    #[test]
    fn pauc_quadrature_matches_case_formulas() {
        let m = pareto_params();
        // One interval per regime, plus an unbounded top band.
        let cases = [
            (1.3, 1.5),            // beta*z2 <= z1, beta*z1 >= 1
            (1.05, 1.2),           // beta*z2 <= 1
            (1.05, 1.45),          // beta*z1 <= 1 <= beta*z2 <= z1... (II.2)
            (1.3, 1.7),            // overlap, beta*z1 >= 1 (I.1)
            (1.1, 1.6),            // overlap, beta*z1 <= 1 (I.2)
            (2.0, f64::INFINITY),  // top band
        ];
        for (z1, z2) in cases {
            let i = DebiasInterval::new(z1, z2).unwrap();
            let closed = pauc(&m, &i);
            let quad = pauc_numeric(&m, &i);
            assert!(
                (closed - quad).abs() < 1e-7,
                "pauc route mismatch on [{z1},{z2}]: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn improvement_condition_examples() {
        let m = pareto_params();
        let verdict = improvement_condition(&m, &DebiasInterval::new(1.3, 1.5).unwrap()).unwrap();
        assert_eq!(verdict, ImprovementVerdict::Improves);
        let verdict = improvement_condition(&m, &DebiasInterval::new(1.05, 1.2).unwrap()).unwrap();
        assert_eq!(verdict, ImprovementVerdict::NeverImproves);
        let nobias = MarketParams::new(Distribution::pareto(3.0).unwrap(), 1.0, 0.25).unwrap();
        let verdict =
            improvement_condition(&nobias, &DebiasInterval::new(1.3, 1.5).unwrap()).unwrap();
        assert_eq!(verdict, ImprovementVerdict::NoStrictChange);
        let gaussian =
            MarketParams::new(Distribution::normal(0.0, 1.0).unwrap(), 0.8, 0.25).unwrap();
        assert!(improvement_condition(&gaussian, &DebiasInterval::new(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn optimal_mm_table_rows() {
        let m = pareto_params();
        let opt = optimal_interval_mm(&m, VoucherBudget::new(0.10).unwrap()).unwrap();
        let (z1, z2) = opt.interval.bounds().unwrap();
        assert_abs_diff_eq!(z1, 1.2252, epsilon = 1e-4);
        assert_abs_diff_eq!(z2, 1.3111, epsilon = 1e-4);
        let opt = optimal_interval_mm(&m, VoucherBudget::new(0.40).unwrap()).unwrap();
        let (z1, z2) = opt.interval.bounds().unwrap();
        assert_abs_diff_eq!(z1, 1.1461, epsilon = 1e-4);
        assert_abs_diff_eq!(z2, 1.5584, epsilon = 1e-4);
        // c = 0 keeps the market as is.
        let opt = optimal_interval_mm(&m, VoucherBudget::new(0.0).unwrap()).unwrap();
        assert!(opt.interval.is_empty());
        assert_abs_diff_eq!(opt.value_after, 0.366, epsilon = 1e-12);
    }

    #[test]
    fn optimal_pauc_table_rows() {
        let m = pareto_params();
        let opt = optimal_interval_pauc(&m, VoucherBudget::new(0.10).unwrap()).unwrap();
        let (z1, z2) = opt.interval.bounds().unwrap();
        assert_abs_diff_eq!(z1, 1.2187, epsilon = 1e-4);
        assert_abs_diff_eq!(z2, 1.3026, epsilon = 1e-4);
        let opt = optimal_interval_pauc(&m, VoucherBudget::new(0.40).unwrap()).unwrap();
        let (z1, z2) = opt.interval.bounds().unwrap();
        assert_abs_diff_eq!(z1, 1.1346, epsilon = 1e-4);
        assert_abs_diff_eq!(z2, 1.5203, epsilon = 1e-4);
    }

    #[test]
    fn closed_forms_are_budget_exact() {
        let m = pareto_params();
        for i in 1..=8 {
            let c = i as f64 / 10.0;
            let b = VoucherBudget::new(c).unwrap();
            for opt in [
                optimal_interval_mm(&m, b).unwrap(),
                optimal_interval_pauc(&m, b).unwrap(),
            ] {
                let used = budget_of_interval(&m, &opt.interval);
                assert!((used - c).abs() <= 1e-6, "budget drift at c={c}: {used}");
            }
        }
    }

    #[test]
    fn endpoint_mistreatment_equalizes() {
        let m = pareto_params();
        for c in [0.1, 0.25, 0.3, 0.4, 0.6, 0.8] {
            let opt = optimal_interval_mm(&m, VoucherBudget::new(c).unwrap()).unwrap();
            let (z1, z2) = opt.interval.bounds().unwrap();
            let d1 = post_displacement(&m, &opt.interval, z1);
            let d2 = post_displacement(&m, &opt.interval, z2);
            assert!((d1 - d2).abs() <= 1e-6, "endpoints differ at c={c}: {d1} vs {d2}");
        }
    }

    #[test]
    fn measures_nonincreasing_in_budget() {
        let m = pareto_params();
        let mut last_mm = f64::INFINITY;
        let mut last_pauc = f64::INFINITY;
        for i in 0..=16 {
            let b = VoucherBudget::new(i as f64 / 20.0).unwrap();
            let mm_v = optimal_interval_mm(&m, b).unwrap().value_after;
            let pauc_v = optimal_interval_pauc(&m, b).unwrap().value_after;
            assert!(mm_v <= last_mm + 1e-12);
            assert!(pauc_v <= last_pauc + 1e-12);
            last_mm = mm_v;
            last_pauc = pauc_v;
        }
    }

    #[test]
    fn pauc_regimes_join_continuously_at_the_threshold() {
        // The two closed-form regimes meet where the interior optimum
        // crosses the band-geometry boundary; both must produce the same
        // band there.
        let m = pareto_params();
        let (p, ba) = (0.25, 0.512f64);
        let threshold = (1.0 - p) * (1.0 - ba) / (2.0 - p - ba - p * ba + p * ba * ba);
        let below = optimal_interval_pauc(&m, VoucherBudget::new(threshold - 1e-9).unwrap()).unwrap();
        let above = optimal_interval_pauc(&m, VoucherBudget::new(threshold + 1e-9).unwrap()).unwrap();
        let (b1, b2) = below.interval.bounds().unwrap();
        let (a1, a2) = above.interval.bounds().unwrap();
        assert!((b1 - a1).abs() < 1e-6 && (b2 - a2).abs() < 1e-6);
        assert!((below.value_after - above.value_after).abs() < 1e-6);
    }

    #[test]
    fn assumption_flag_reports_regime() {
        let ok = pareto_params();
        assert_eq!(ok.assumption_holds(), Some(true));
        let tight = MarketParams::new(Distribution::pareto(3.0).unwrap(), 0.9, 0.5).unwrap();
        let opt = optimal_interval_mm(&tight, VoucherBudget::new(0.2).unwrap()).unwrap();
        assert!(!opt.assumption_satisfied);
    }

    #[test]
    fn numeric_search_matches_closed_forms_within_grid_cell() {
        let m = pareto_params();
        let b = VoucherBudget::new(0.10).unwrap();
        let closed = optimal_interval_mm(&m, b).unwrap();
        let numeric = optimal_interval_numeric(&m, b, Measure::Mm, 2000).unwrap();
        let (cz1, cz2) = closed.interval.bounds().unwrap();
        let (nz1, nz2) = numeric.interval.bounds().unwrap();
        assert!((cz1 - nz1).abs() < 1e-3, "{cz1} vs {nz1}");
        assert!((cz2 - nz2).abs() < 1e-3, "{cz2} vs {nz2}");

        let closed = optimal_interval_pauc(&m, b).unwrap();
        let numeric = optimal_interval_numeric(&m, b, Measure::Pauc, 2000).unwrap();
        let (cz1, cz2) = closed.interval.bounds().unwrap();
        let (nz1, nz2) = numeric.interval.bounds().unwrap();
        assert!((cz1 - nz1).abs() < 1e-3, "{cz1} vs {nz1}");
        assert!((cz2 - nz2).abs() < 1e-3, "{cz2} vs {nz2}");
    }

    #[test]
    fn gaussian_search_targets_upper_middle() {
        let m = MarketParams::new(Distribution::normal(1550.0, 310.0).unwrap(), 0.8, 0.5).unwrap();
        let b = VoucherBudget::new(0.30).unwrap();
        let opt = optimal_interval_numeric(&m, b, Measure::Pauc, 300).unwrap();
        let (z1, z2) = opt.interval.bounds().unwrap();
        assert!(z1 > 1550.0, "band should start above the mean, got {z1}");
        // Independently computed optimum for this configuration.
        assert_abs_diff_eq!(z1, 1700.0, epsilon = 6.0);
        assert_abs_diff_eq!(z2, 2230.0, epsilon = 6.0);
        assert_abs_diff_eq!(opt.value_after, 0.08323, epsilon = 2e-4);
    }

    #[test]
    fn zero_budget_numeric_is_status_quo() {
        let m = pareto_params();
        let opt =
            optimal_interval_numeric(&m, VoucherBudget::new(0.0).unwrap(), Measure::Pauc, 100)
                .unwrap();
        assert!(opt.interval.is_empty());
        assert_abs_diff_eq!(opt.value_after, 0.183, epsilon = 1e-12);
    }

    #[test]
    fn report_bundles_both_measures() {
        let m = pareto_params();
        let r = assess(&m, &DebiasInterval::empty());
        assert!(r.pauc <= r.mm);
        assert_abs_diff_eq!(r.mm, 0.366, epsilon = 1e-12);
        assert_abs_diff_eq!(r.pauc, 0.183, epsilon = 1e-12);
    }
}
