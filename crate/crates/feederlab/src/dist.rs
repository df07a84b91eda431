//! Laws of student potential behind one pdf / cdf / ccdf / inverse-ccdf
//! contract.
//!
//! Values are immutable after construction and safe to evaluate from many
//! threads. Conventions shared by every variant:
//!
//! - `cdf` is nondecreasing and right-continuous with range `[0, 1]`;
//! - `ccdf(x) = 1 - cdf(x)`, extended as the constant 1 below the support
//!   and 0 above it;
//! - `inv_ccdf(q)` is the smallest `x` with `ccdf(x) <= q`; closed form for
//!   Pareto, bracketed bisection elsewhere.

use crate::error::{Error, Result};
use crate::numeric;
use rand::Rng;
use serde::Serialize;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal cdf, accurate in the lower tail.
fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal ccdf, accurate in the upper tail.
fn norm_ccdf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Probability law of a student's true potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Distribution {
    /// Power law on `[1, inf)`: `ccdf(x) = x^-alpha`.
    Pareto { alpha: f64 },
    /// Gaussian on the whole real line.
    Normal { mean: f64, stddev: f64 },
    /// Gaussian with its mass renormalized to `[lower, upper]`.
    TruncatedNormal {
        mean: f64,
        stddev: f64,
        lower: f64,
        upper: f64,
    },
    /// Sorted sample. The cdf is the right-continuous step function; the
    /// inverse interpolates linearly between order statistics placed at the
    /// midpoint levels `(i + 1/2) / n`.
    Empirical { sample: Vec<f64> },
}

impl Distribution {
    pub fn pareto(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("must be positive (got {alpha})")));
        }
        Ok(Distribution::Pareto { alpha })
    }

    pub fn normal(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::invalid("mean", format!("must be finite (got {mean})")));
        }
        if stddev.is_nan() || stddev <= 0.0 || !stddev.is_finite() {
            return Err(Error::invalid("stddev", format!("must be positive (got {stddev})")));
        }
        Ok(Distribution::Normal { mean, stddev })
    }

    pub fn truncated_normal(mean: f64, stddev: f64, lower: f64, upper: f64) -> Result<Self> {
        Self::normal(mean, stddev)?;
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::invalid(
                "lower/upper",
                format!("truncation requires lower < upper (got {lower}, {upper})"),
            ));
        }
        Ok(Distribution::TruncatedNormal { mean, stddev, lower, upper })
    }

    /// Builds an empirical law from a sample; the sample is sorted here.
    pub fn empirical(mut sample: Vec<f64>) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::invalid("sample", "must be non-empty"));
        }
        if sample.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sample", "must contain only finite values"));
        }
        sample.sort_by(f64::total_cmp);
        Ok(Distribution::Empirical { sample })
    }

    /// Support bounds; infinite where the law is unbounded.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Pareto { .. } => (1.0, f64::INFINITY),
            Distribution::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Distribution::TruncatedNormal { lower, upper, .. } => (*lower, *upper),
            Distribution::Empirical { sample } => (sample[0], sample[sample.len() - 1]),
        }
    }

    /// Density at `x`; 0 outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Pareto { alpha } => {
                if x < 1.0 {
                    0.0
                } else {
                    alpha * x.powf(-alpha - 1.0)
                }
            }
            Distribution::Normal { mean, stddev } => norm_pdf((x - mean) / stddev) / stddev,
            Distribution::TruncatedNormal { mean, stddev, lower, upper } => {
                if x < *lower || x > *upper {
                    return 0.0;
                }
                let mass = norm_cdf((upper - mean) / stddev) - norm_cdf((lower - mean) / stddev);
                norm_pdf((x - mean) / stddev) / (stddev * mass)
            }
            Distribution::Empirical { sample } => {
                // Density of the midpoint-interpolated cdf, which rises by
                // exactly 1/n between consecutive index knots; duplicated
                // values contribute point masses instead of density.
                let n = sample.len();
                if n < 2 || x < sample[0] || x >= sample[n - 1] {
                    return 0.0;
                }
                let i = sample.partition_point(|v| *v <= x);
                let gap = sample[i] - sample[i - 1];
                if gap <= 0.0 {
                    0.0
                } else {
                    1.0 / (n as f64 * gap)
                }
            }
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Pareto { alpha } => {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-*alpha)
                }
            }
            Distribution::Normal { mean, stddev } => norm_cdf((x - mean) / stddev),
            Distribution::TruncatedNormal { mean, stddev, lower, upper } => {
                if x < *lower {
                    return 0.0;
                }
                if x >= *upper {
                    return 1.0;
                }
                let zl = (lower - mean) / stddev;
                let zu = (upper - mean) / stddev;
                let mass = norm_cdf(zu) - norm_cdf(zl);
                ((norm_cdf((x - mean) / stddev) - norm_cdf(zl)) / mass).clamp(0.0, 1.0)
            }
            Distribution::Empirical { sample } => {
                sample.partition_point(|v| *v <= x) as f64 / sample.len() as f64
            }
        }
    }

    /// Tail distribution `1 - cdf`, extended as 1 below the support.
    pub fn ccdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Pareto { alpha } => {
                if x < 1.0 {
                    1.0
                } else {
                    x.powf(-*alpha)
                }
            }
            Distribution::Normal { mean, stddev } => norm_ccdf((x - mean) / stddev),
            Distribution::TruncatedNormal { mean, stddev, lower, upper } => {
                if x < *lower {
                    return 1.0;
                }
                if x >= *upper {
                    return 0.0;
                }
                let zl = (lower - mean) / stddev;
                let zu = (upper - mean) / stddev;
                let mass = norm_cdf(zu) - norm_cdf(zl);
                ((norm_ccdf((x - mean) / stddev) - norm_ccdf(zu)) / mass).clamp(0.0, 1.0)
            }
            Distribution::Empirical { .. } => 1.0 - self.cdf(x),
        }
    }

    /// Smallest `x` with `ccdf(x) <= q`, for `q` in `[0, 1]`.
    ///
    /// `q = 1` maps to the lower support bound, `q = 0` to the upper one
    /// (infinite for unbounded laws).
    pub fn inv_ccdf(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid("q", format!("must lie in [0, 1] (got {q})")));
        }
        let (lo, hi) = self.support();
        if q == 1.0 {
            return Ok(lo);
        }
        if q == 0.0 {
            return Ok(hi);
        }
        Ok(match self {
            Distribution::Pareto { alpha } => q.powf(-1.0 / alpha).max(1.0),
            Distribution::Normal { mean, stddev } => {
                // Geometric bracket expansion around the mean, then bisection.
                let mut step = stddev.max(f64::MIN_POSITIVE);
                let mut a = mean - step;
                let mut b = mean + step;
                while self.ccdf(b) > q {
                    step *= 2.0;
                    b += step;
                }
                while self.ccdf(a) < q {
                    step *= 2.0;
                    a -= step;
                }
                numeric::bisect_decreasing(|x| self.ccdf(x) - q, a, b)
            }
            Distribution::TruncatedNormal { lower, upper, .. } => {
                numeric::bisect_decreasing(|x| self.ccdf(x) - q, *lower, *upper)
            }
            Distribution::Empirical { sample } => {
                let n = sample.len();
                let target = 1.0 - q; // cdf level
                let level = |i: usize| (i as f64 + 0.5) / n as f64;
                if target <= level(0) {
                    return Ok(sample[0]);
                }
                if target >= level(n - 1) {
                    return Ok(sample[n - 1]);
                }
                // First knot with level >= target, then interpolate back.
                let j = ((target * n as f64 - 0.5).ceil() as usize).clamp(1, n - 1);
                let (l0, l1) = (level(j - 1), level(j));
                let t = (target - l0) / (l1 - l0);
                sample[j - 1] + t * (sample[j] - sample[j - 1])
            }
        })
    }

    /// `n` support points placed at evenly spaced tail levels between
    /// `q_hi` and `q_lo` (ccdf scale), returned in increasing `x` order.
    pub fn quantile_grid(&self, n: usize, q_lo: f64, q_hi: f64) -> Vec<f64> {
        assert!(n >= 2 && q_lo < q_hi);
        (0..n)
            .map(|i| {
                let q = q_hi - (q_hi - q_lo) * i as f64 / (n - 1) as f64;
                self.inv_ccdf(q).expect("quantile levels are in range")
            })
            .collect()
    }

    /// Draw one value. Pareto and normal use direct transforms; the
    /// truncated normal inverts its ccdf; the empirical law resamples the
    /// data points (bootstrap).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Pareto { alpha } => {
                let u = 1.0 - rng.random::<f64>(); // (0, 1]
                u.powf(-1.0 / alpha)
            }
            Distribution::Normal { mean, stddev } => {
                use rand_distr::Distribution as _;
                let z: f64 = rand_distr::StandardNormal.sample(rng);
                mean + stddev * z
            }
            Distribution::TruncatedNormal { .. } => {
                let u = rng.random::<f64>();
                self.inv_ccdf(u).expect("u is in [0, 1)")
            }
            Distribution::Empirical { sample } => sample[rng.random_range(0..sample.len())],
        }
    }

    pub fn is_pareto(&self) -> bool {
        matches!(self, Distribution::Pareto { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pareto_point_values() {
        let d = Distribution::pareto(3.0).unwrap();
        // pdf alpha * x^-(alpha+1)
        assert_abs_diff_eq!(d.pdf(2.0), 0.1875, epsilon = 1e-12);
        assert_eq!(d.pdf(0.5), 0.0);
        assert_abs_diff_eq!(d.cdf(2.0), 0.875, epsilon = 1e-12);
        assert_eq!(d.cdf(1.0), 0.0);
        assert_abs_diff_eq!(d.ccdf(2.0), 0.125, epsilon = 1e-12);
        assert_eq!(d.ccdf(0.3), 1.0);
        assert_abs_diff_eq!(d.inv_ccdf(0.125).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(d.inv_ccdf(1.0).unwrap(), 1.0);
        assert_eq!(d.inv_ccdf(0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn pareto_pdf_matches_cdf_derivative() {
        let d = Distribution::pareto(3.0).unwrap();
        let h = 1e-6;
        let fd = (d.cdf(2.0 + h) - d.cdf(2.0 - h)) / (2.0 * h);
        assert_abs_diff_eq!(d.pdf(2.0), fd, epsilon = 1e-8);
    }

    #[test]
    fn normal_point_values() {
        let d = Distribution::normal(1550.0, 310.0).unwrap();
        assert_abs_diff_eq!(d.pdf(1550.0), 1.0 / (310.0 * (2.0 * std::f64::consts::PI).sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(d.pdf(1550.0), 1.2870e-3, epsilon = 1e-6);
        assert_abs_diff_eq!(d.cdf(1550.0), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(d.ccdf(1550.0), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(d.inv_ccdf(0.5).unwrap(), 1550.0, epsilon = 1e-7);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Distribution::pareto(0.0).is_err());
        assert!(Distribution::normal(0.0, 0.0).is_err());
        assert!(Distribution::truncated_normal(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(Distribution::empirical(vec![]).is_err());
        let d = Distribution::pareto(3.0).unwrap();
        assert!(d.inv_ccdf(-0.1).is_err());
        assert!(d.inv_ccdf(1.5).is_err());
    }

    fn complement_holds(d: &Distribution) {
        let grid = d.quantile_grid(10_000, 1e-4, 1.0 - 1e-4);
        for x in grid {
            assert!(
                (d.cdf(x) + d.ccdf(x) - 1.0).abs() <= 1e-12,
                "cdf+ccdf != 1 at {x} for {d:?}"
            );
        }
    }

    #[test]
    fn cdf_ccdf_complement_on_grid() {
        complement_holds(&Distribution::pareto(3.0).unwrap());
        complement_holds(&Distribution::normal(1550.0, 310.0).unwrap());
        complement_holds(&Distribution::truncated_normal(1550.0, 310.0, 600.0, 2400.0).unwrap());
    }

    fn roundtrip_holds(d: &Distribution) {
        for i in 1..999 {
            let q = i as f64 / 1000.0;
            let x = d.inv_ccdf(q).unwrap();
            assert!(
                (d.ccdf(x) - q).abs() <= 1e-8,
                "roundtrip off at q={q} for {d:?}: {}",
                d.ccdf(x)
            );
        }
    }

    #[test]
    fn inverse_roundtrip_on_grid() {
        roundtrip_holds(&Distribution::pareto(3.0).unwrap());
        roundtrip_holds(&Distribution::pareto(0.7).unwrap());
        roundtrip_holds(&Distribution::normal(1550.0, 310.0).unwrap());
        roundtrip_holds(&Distribution::normal(0.0, 1.0).unwrap());
        roundtrip_holds(&Distribution::truncated_normal(1550.0, 310.0, 600.0, 2400.0).unwrap());
    }

    #[test]
    fn pdf_integrates_to_one() {
        let cases = [
            Distribution::pareto(3.0).unwrap(),
            Distribution::normal(1550.0, 310.0).unwrap(),
            Distribution::truncated_normal(1550.0, 310.0, 600.0, 2400.0).unwrap(),
        ];
        for d in cases {
            let (lo, hi) = d.support();
            let a = if lo.is_finite() { lo } else { d.inv_ccdf(1.0 - 1e-10).unwrap() };
            let b = if hi.is_finite() { hi } else { d.inv_ccdf(1e-10).unwrap() };
            let mass = numeric::adaptive_simpson(&|x| d.pdf(x), a, b, 1e-9);
            assert!((mass - 1.0).abs() <= 1e-6, "pdf mass {mass} for {d:?}");
        }
    }

    #[test]
    fn truncated_normal_clips_and_renormalizes() {
        let d = Distribution::truncated_normal(1550.0, 310.0, 600.0, 2400.0).unwrap();
        assert_eq!(d.pdf(599.0), 0.0);
        assert_eq!(d.pdf(2401.0), 0.0);
        assert_eq!(d.cdf(2400.0), 1.0);
        assert_eq!(d.ccdf(600.0 - 1.0), 1.0);
        // Renormalization makes the interior density slightly larger.
        let plain = Distribution::normal(1550.0, 310.0).unwrap();
        assert!(d.pdf(1550.0) > plain.pdf(1550.0));
    }

    #[test]
    fn empirical_step_cdf_and_midpoint_inverse() {
        let d = Distribution::empirical(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(1.0), 1.0 / 3.0);
        assert_eq!(d.cdf(1.5), 1.0 / 3.0);
        assert_eq!(d.cdf(3.0), 1.0);
        // Midpoint knots at cdf levels 1/6, 3/6, 5/6.
        assert_abs_diff_eq!(d.inv_ccdf(0.5).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(d.inv_ccdf(1.0).unwrap(), 1.0);
        assert_eq!(d.inv_ccdf(0.0).unwrap(), 3.0);
        // Interpolation halfway between the first two knots.
        assert_abs_diff_eq!(d.inv_ccdf(1.0 - 1.0 / 3.0).unwrap(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn empirical_density_handles_duplicates() {
        let d = Distribution::empirical(vec![1.0, 2.0, 2.0, 3.0]).unwrap();
        // The interpolated cdf rises 1/n per index knot; duplicates stack
        // into a jump carrying no density.
        assert_abs_diff_eq!(d.pdf(1.5), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(d.pdf(2.5), 0.25, epsilon = 1e-15);
        assert_eq!(d.pdf(0.5), 0.0);
        assert_eq!(d.pdf(3.0), 0.0);
        // cdf + ccdf stays an exact complement for the step law.
        for x in [0.5, 1.0, 1.7, 2.0, 2.2, 3.0, 4.0] {
            assert_eq!(d.cdf(x) + d.ccdf(x), 1.0);
        }
    }

    #[test]
    fn sampling_matches_law() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let d = Distribution::pareto(3.0).unwrap();
        let n = 200_000;
        let mut above = 0usize;
        for _ in 0..n {
            if d.sample(&mut rng) > 2.0 {
                above += 1;
            }
        }
        let frac = above as f64 / n as f64;
        // ccdf(2) = 0.125; three-sigma band for n draws.
        assert!((frac - 0.125).abs() < 3.0 * (0.125f64 * 0.875 / n as f64).sqrt());
    }
}
