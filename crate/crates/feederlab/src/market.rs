//! Continuous biased market: perceived potentials, normalized rankings,
//! displacement, and school admission cutoffs.
//!
//! Schools are the unit interval with 0 the most selective. A student's
//! rank under a matching is the mass of students placed strictly better,
//! so smaller is better and ranks double as school identities.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric;
use serde::{Deserialize, Serialize};

/// Population group. `G2` students are perceived at `beta` times their true
/// potential; `G1` students are perceived exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    G1,
    G2,
}

/// Market primitives: the `G2` population fraction `p`, the bias factor
/// `beta`, and the law of true potentials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketParams {
    p: f64,
    beta: f64,
    dist: Distribution,
}

/// One student: group tag, true potential, perceived potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Student {
    pub group: Group,
    pub z: f64,
    pub z_hat: f64,
}

impl Student {
    pub fn new(params: &MarketParams, z: f64, group: Group) -> Self {
        Student {
            group,
            z,
            z_hat: params.perceived(z, group),
        }
    }
}

impl MarketParams {
    pub fn new(dist: Distribution, beta: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("must lie in [0, 1] (got {p})")));
        }
        if beta.is_nan() || beta <= 0.0 || beta > 1.0 {
            return Err(Error::invalid("beta", format!("must lie in (0, 1] (got {beta})")));
        }
        Ok(MarketParams { p, beta, dist })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dist(&self) -> &Distribution {
        &self.dist
    }

    /// `beta^alpha` for Pareto potentials.
    pub(crate) fn beta_alpha(&self) -> Option<f64> {
        match self.dist {
            Distribution::Pareto { alpha } => Some(self.beta.powf(alpha)),
            _ => None,
        }
    }

    /// Whether `p < 1 - beta^alpha` holds (Pareto only): the regime in which
    /// the closed-form optimal voucher intervals are known to be optimal.
    pub fn assumption_holds(&self) -> Option<bool> {
        self.beta_alpha().map(|ba| self.p < 1.0 - ba)
    }

    /// Perceived potential: `z` for `G1`, `beta * z` for `G2`.
    pub fn perceived(&self, z: f64, group: Group) -> f64 {
        match group {
            Group::G1 => z,
            Group::G2 => self.beta * z,
        }
    }

    /// Rank when schools observe true potentials: the tail mass above `z`.
    pub fn rank_unbiased(&self, z: f64) -> f64 {
        self.dist.ccdf(z)
    }

    /// Mass of students whose *perceived* potential exceeds `z_hat`. The
    /// ccdf extension below the support carries the bottom-school clamp.
    pub fn perceived_rank(&self, z_hat: f64) -> f64 {
        (1.0 - self.p) * self.dist.ccdf(z_hat) + self.p * self.dist.ccdf(z_hat / self.beta)
    }

    /// Rank under the biased matching.
    pub fn rank_biased(&self, z: f64, group: Group) -> f64 {
        match group {
            Group::G1 => {
                (1.0 - self.p) * self.dist.ccdf(z) + self.p * self.dist.ccdf(z / self.beta)
            }
            Group::G2 => {
                (1.0 - self.p) * self.dist.ccdf(self.beta * z) + self.p * self.dist.ccdf(z)
            }
        }
    }

    /// Shift in school rank caused by bias: `rank_biased - rank_unbiased`.
    /// Nonnegative for `G2`, nonpositive for `G1`.
    pub fn displacement(&self, z: f64, group: Group) -> f64 {
        self.rank_biased(z, group) - self.rank_unbiased(z)
    }

    /// Pareto closed form of the displacement; must agree with
    /// [`Self::displacement`] to machine accuracy.
    pub fn displacement_closed_form(&self, z: f64, group: Group) -> Result<f64> {
        let Distribution::Pareto { alpha } = self.dist else {
            return Err(Error::RequiresPareto("displacement_closed_form"));
        };
        let ba = self.beta.powf(alpha);
        Ok(match group {
            Group::G1 => (-self.p + self.p * ba) * z.powf(-alpha),
            Group::G2 => {
                if z >= 1.0 / self.beta {
                    (1.0 - self.p) * z.powf(-alpha) * (1.0 / ba - 1.0)
                } else {
                    (1.0 - self.p) * (1.0 - z.powf(-alpha).min(1.0))
                }
            }
        })
    }

    /// Largest displacement suffered by a `G2` student, with the potential
    /// at which it occurs. Closed form at `1/beta` for Pareto; a quantile
    /// grid plus golden-section refinement otherwise.
    pub fn max_displacement(&self) -> (f64, f64) {
        if let Some(ba) = self.beta_alpha() {
            return ((1.0 - self.p) * (1.0 - ba), 1.0 / self.beta);
        }
        if self.beta == 1.0 {
            return (0.0, self.dist.inv_ccdf(0.5).expect("0.5 is in range"));
        }
        let grid = self.dist.quantile_grid(10_000, 1e-4, 1.0 - 1e-4);
        let f = |z: f64| self.displacement(z, Group::G2);
        let mut best = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        for (i, &z) in grid.iter().enumerate() {
            let v = f(z);
            if v > best_v {
                best_v = v;
                best = i;
            }
        }
        let a = grid[best.saturating_sub(1)];
        let b = grid[(best + 1).min(grid.len() - 1)];
        let (at, value) = numeric::golden_max(f, a, b, 1e-8);
        (value, at)
    }

    /// Admission cutoff of school `s`: the perceived potential at which the
    /// perceived-rank identity equals `s`. Closed two-branch form for
    /// Pareto, bisection otherwise.
    pub fn school_cutoff(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid("s", format!("must lie in [0, 1] (got {s})")));
        }
        if let Distribution::Pareto { alpha } = self.dist {
            let ba = self.beta.powf(alpha);
            let split = 1.0 - self.p + self.p * ba;
            return Ok(if s <= split {
                (s / split).powf(-1.0 / alpha)
            } else {
                self.beta * ((s - (1.0 - self.p)) / self.p).powf(-1.0 / alpha)
            });
        }
        Ok(self.school_cutoff_numeric(s))
    }

    /// Bisection route for the cutoff, valid for every law. Exposed so the
    /// Pareto closed form can be cross-checked against it.
    pub fn school_cutoff_numeric(&self, s: f64) -> f64 {
        assert!((0.0..=1.0).contains(&s));
        let (lo_sup, hi_sup) = self.dist.support();
        if s == 0.0 {
            return hi_sup;
        }
        // Perceived potentials live on [beta * lo, inf).
        if s == 1.0 {
            return if lo_sup.is_finite() { self.beta * lo_sup } else { f64::NEG_INFINITY };
        }
        let g = |z_hat: f64| self.perceived_rank(z_hat) - s;
        let scale = match &self.dist {
            Distribution::Normal { stddev, .. }
            | Distribution::TruncatedNormal { stddev, .. } => *stddev,
            _ => 1.0,
        };
        // Walk out from a central guess until the root is bracketed.
        let origin = if lo_sup.is_finite() {
            self.beta * lo_sup
        } else {
            self.dist.inv_ccdf(0.5).expect("0.5 is in range")
        };
        let mut step = scale.max(1e-6);
        let mut lo = origin;
        while g(lo) < 0.0 {
            lo -= step;
            step *= 2.0;
        }
        step = scale.max(1e-6);
        let mut hi = lo + step;
        while g(hi) > 0.0 {
            step *= 2.0;
            hi += step;
        }
        numeric::bisect_decreasing(g, lo, hi)
    }
}
