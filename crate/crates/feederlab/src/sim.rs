//! Finite-market Monte Carlo: discrete students and schools with fixed
//! capacities, heterogeneous bias factors, voucher take-up, and seeded
//! replications with mean / standard-error aggregation.
//!
//! Determinism contract: replicate `r` draws from a ChaCha8 stream seeded
//! `base_seed + r`. Stream 0 of that seed carries the market draws
//! (potentials, group tags, per-student bias), stream 1 the voucher
//! take-up coins, so interventions never disturb the market itself.
//! Results are independent of worker count.

use crate::error::{Error, Result};
use crate::market::{Group, MarketParams};
use crate::numeric;
use crate::voucher::{DebiasInterval, Measure, VoucherBudget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Stream index for voucher take-up coins within a replicate's seed.
const TAKE_UP_STREAM: u64 = 1;

/// Shape and knobs of one simulated market.
#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    pub n_students: usize,
    pub n_schools: usize,
    pub capacity: usize,
    pub params: MarketParams,
    /// Per-student bias spread: `beta_i ~ Uniform[beta - epsilon, beta + epsilon]`,
    /// clipped to at most 1.
    pub epsilon: f64,
    /// Probability that an offered voucher is actually used.
    pub take_up: f64,
    pub replications: usize,
    pub base_seed: u64,
}

impl SimConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_students: usize,
        n_schools: usize,
        capacity: usize,
        params: MarketParams,
        epsilon: f64,
        take_up: f64,
        replications: usize,
        base_seed: u64,
    ) -> Result<Self> {
        if n_schools == 0 || capacity == 0 {
            return Err(Error::invalid("n_schools/capacity", "must be positive".to_string()));
        }
        if n_students != n_schools * capacity {
            return Err(Error::invalid(
                "n_students",
                format!("must equal n_schools * capacity ({} != {} * {})", n_students, n_schools, capacity),
            ));
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::invalid("epsilon", format!("must be nonnegative (got {epsilon})")));
        }
        if params.beta() - epsilon <= 0.0 {
            return Err(Error::invalid(
                "epsilon",
                format!("beta - epsilon must stay positive (got beta {} and epsilon {epsilon})", params.beta()),
            ));
        }
        if !(0.0..=1.0).contains(&take_up) {
            return Err(Error::invalid("take_up", format!("must lie in [0, 1] (got {take_up})")));
        }
        if replications == 0 {
            return Err(Error::invalid("replications", "must be positive".to_string()));
        }
        Ok(SimConfig {
            n_students,
            n_schools,
            capacity,
            params,
            epsilon,
            take_up,
            replications,
            base_seed,
        })
    }
}

/// One simulated student; `beta` is the personal bias factor actually
/// applied (1 is stored for `G1` so the field is always meaningful).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimStudent {
    pub group: Group,
    pub z: f64,
    pub beta: f64,
    pub z_hat: f64,
}

/// A drawn market instance.
#[derive(Debug, Clone)]
pub struct DiscreteMarket {
    pub students: Vec<SimStudent>,
    pub n_schools: usize,
    pub capacity: usize,
}

impl DiscreteMarket {
    /// School index per student (0 = best school), filling capacities in
    /// order of potential. Ties break by true potential, then by student
    /// index, descending preference first.
    pub fn assignment(&self, use_perceived: bool) -> Vec<u32> {
        let n = self.students.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            let (sa, sb) = (&self.students[a as usize], &self.students[b as usize]);
            let (ka, kb) = if use_perceived { (sa.z_hat, sb.z_hat) } else { (sa.z, sb.z) };
            kb.total_cmp(&ka)
                .then(sb.z.total_cmp(&sa.z))
                .then(a.cmp(&b))
        });
        let mut school = vec![0u32; n];
        for (pos, &i) in order.iter().enumerate() {
            school[i as usize] = (pos / self.capacity) as u32;
        }
        school
    }
}

/// Draw a market instance: i.i.d. potentials, Bernoulli(p) group tags, and
/// per-student bias factors when `epsilon > 0`.
pub fn build_market(config: &SimConfig, seed: u64) -> DiscreteMarket {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = &config.params;
    let beta = params.beta();
    let mut students = Vec::with_capacity(config.n_students);
    for _ in 0..config.n_students {
        let z = params.dist().sample(&mut rng);
        let group = if rng.random::<f64>() < params.p() { Group::G2 } else { Group::G1 };
        let beta_i = if config.epsilon > 0.0 {
            rng.random_range(beta - config.epsilon..beta + config.epsilon).min(1.0)
        } else {
            beta
        };
        let (beta_i, z_hat) = match group {
            Group::G1 => (1.0, z),
            Group::G2 => (beta_i, beta_i * z),
        };
        students.push(SimStudent { group, z, beta: beta_i, z_hat });
    }
    DiscreteMarket {
        students,
        n_schools: config.n_schools,
        capacity: config.capacity,
    }
}

/// Offer vouchers to `G2` students whose true potential lies in the closed
/// band; each uses it independently with probability `take_up`, revealing
/// the true potential.
///
/// One uniform is drawn per student in index order regardless of
/// eligibility, so different bands share the same coins.
pub fn apply_vouchers(
    market: &DiscreteMarket,
    interval: &DebiasInterval,
    take_up: f64,
    seed: u64,
) -> DiscreteMarket {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TAKE_UP_STREAM);
    let mut treated = market.clone();
    for s in &mut treated.students {
        let coin = rng.random::<f64>();
        if s.group == Group::G2 && interval.contains_closed(s.z) && coin < take_up {
            s.z_hat = s.z;
        }
    }
    treated
}

/// PAUC and worst displacement of a market.
///
/// Per-student displacement is the school-index shift between the
/// perceived-potential and true-potential assignments, in units of the
/// school range. PAUC averages the positive part over `G2` students
/// (matching the continuous measure, which weighs the mistreatment profile
/// by the potential law); `mm` is the largest displacement.
pub fn metrics(market: &DiscreteMarket) -> (f64, f64) {
    let biased = market.assignment(true);
    let unbiased = market.assignment(false);
    displacement_metrics(market, &biased, &unbiased)
}

fn displacement_metrics(market: &DiscreteMarket, treated: &[u32], unbiased: &[u32]) -> (f64, f64) {
    let m = market.n_schools as f64;
    let mut pos_sum = 0.0;
    let mut mm = 0.0f64;
    let mut g2 = 0usize;
    for (i, s) in market.students.iter().enumerate() {
        let disp = (treated[i] as f64 - unbiased[i] as f64) / m;
        mm = mm.max(disp);
        if s.group == Group::G2 {
            g2 += 1;
            if disp > 0.0 {
                pos_sum += disp;
            }
        }
    }
    let pauc = if g2 == 0 { 0.0 } else { pos_sum / g2 as f64 };
    (pauc, mm)
}

/// Metrics of one replicate, with and without the intervention.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReplicateMetrics {
    pub pauc: f64,
    pub mm: f64,
    pub baseline_pauc: f64,
    pub baseline_mm: f64,
}

/// Aggregated experiment outcome. The headline fields describe the treated
/// market (equal to the baseline when the band is empty); baselines are the
/// same replicates without the intervention.
#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub pauc_mean: f64,
    pub pauc_sem: f64,
    pub mm_mean: f64,
    pub mm_sem: f64,
    pub baseline_pauc_mean: f64,
    pub baseline_pauc_sem: f64,
    pub baseline_mm_mean: f64,
    pub baseline_mm_sem: f64,
    pub per_replicate: Vec<ReplicateMetrics>,
}

/// Run `replications` seeded replicates, each comparing the intervention
/// band against the untouched market.
pub fn run_experiment(config: &SimConfig, interval: &DebiasInterval) -> SimResult {
    let reps: Vec<ReplicateMetrics> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let seed = config.base_seed.wrapping_add(r as u64);
            let market = build_market(config, seed);
            let unbiased = market.assignment(false);
            let biased = market.assignment(true);
            let (baseline_pauc, baseline_mm) = displacement_metrics(&market, &biased, &unbiased);
            let (pauc, mm) = if interval.is_empty() {
                (baseline_pauc, baseline_mm)
            } else {
                let treated = apply_vouchers(&market, interval, config.take_up, seed);
                let treated_assign = treated.assignment(true);
                displacement_metrics(&market, &treated_assign, &unbiased)
            };
            ReplicateMetrics { pauc, mm, baseline_pauc, baseline_mm }
        })
        .collect();
    let (pauc_mean, pauc_sem) = numeric::mean_sem(&collect(&reps, |m| m.pauc));
    let (mm_mean, mm_sem) = numeric::mean_sem(&collect(&reps, |m| m.mm));
    let (baseline_pauc_mean, baseline_pauc_sem) =
        numeric::mean_sem(&collect(&reps, |m| m.baseline_pauc));
    let (baseline_mm_mean, baseline_mm_sem) = numeric::mean_sem(&collect(&reps, |m| m.baseline_mm));
    SimResult {
        pauc_mean,
        pauc_sem,
        mm_mean,
        mm_sem,
        baseline_pauc_mean,
        baseline_pauc_sem,
        baseline_mm_mean,
        baseline_mm_sem,
        per_replicate: reps,
    }
}

fn collect(reps: &[ReplicateMetrics], f: impl Fn(&ReplicateMetrics) -> f64) -> Vec<f64> {
    reps.iter().map(f).collect()
}

/// Number of candidate windows the empirical search scores.
const SEARCH_WINDOWS: usize = 160;

/// Empirically best band: slide a window holding a `c_hat` share of the
/// voucher-eligible (`G2`) potentials, score each candidate band by the
/// replication-averaged measure, and keep the best (leftmost on ties).
///
/// Candidate endpoints come from the pooled `G2` potentials across all
/// replicates; every candidate is scored on the same replicate markets and
/// take-up coins, so comparisons between bands are paired.
pub fn empirical_best_interval(
    config: &SimConfig,
    c_hat: f64,
    measure: Measure,
) -> Result<(DebiasInterval, f64)> {
    let budget = VoucherBudget::new(c_hat)?;
    struct Prepared {
        market: DiscreteMarket,
        unbiased: Vec<u32>,
        coins: Vec<f64>,
    }
    let prepared: Vec<Prepared> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let seed = config.base_seed.wrapping_add(r as u64);
            let market = build_market(config, seed);
            let unbiased = market.assignment(false);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(TAKE_UP_STREAM);
            let coins = (0..market.students.len()).map(|_| rng.random::<f64>()).collect();
            Prepared { market, unbiased, coins }
        })
        .collect();

    let score = |interval: &DebiasInterval| -> f64 {
        let values: Vec<f64> = prepared
            .par_iter()
            .map(|rep| {
                let mut treated = rep.market.clone();
                for (s, &coin) in treated.students.iter_mut().zip(&rep.coins) {
                    if s.group == Group::G2
                        && interval.contains_closed(s.z)
                        && coin < config.take_up
                    {
                        s.z_hat = s.z;
                    }
                }
                let assign = treated.assignment(true);
                let (pauc, mm) = displacement_metrics(&rep.market, &assign, &rep.unbiased);
                match measure {
                    Measure::Pauc => pauc,
                    Measure::Mm => mm,
                }
            })
            .collect();
        numeric::mean_sem(&values).0
    };

    let mut pool: Vec<f64> = prepared
        .iter()
        .flat_map(|rep| {
            rep.market
                .students
                .iter()
                .filter(|s| s.group == Group::G2)
                .map(|s| s.z)
        })
        .collect();
    pool.sort_by(f64::total_cmp);
    let width = (budget.mass() * pool.len() as f64).floor() as usize;
    if width == 0 {
        let value = score(&DebiasInterval::empty());
        return Ok((DebiasInterval::empty(), value));
    }
    let last_start = pool.len() - width;
    let stride = (last_start / SEARCH_WINDOWS).max(1);
    let mut best: Option<(f64, DebiasInterval)> = None;
    let mut start = 0usize;
    loop {
        let interval = DebiasInterval::new(pool[start], pool[start + width - 1])?;
        let value = score(&interval);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, interval));
        }
        if start == last_start {
            break;
        }
        start = (start + stride).min(last_start);
    }
    let (value, interval) = best.expect("at least one window scored");
    Ok((interval, value))
}
