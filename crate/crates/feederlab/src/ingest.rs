//! School-level score records to a fitted potential law: load and validate
//! a CSV of schools, simulate per-student scores, split the population by
//! economic-need index, estimate the bias factor, and fit the potential
//! distribution of the debiased pool.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::market::Group;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Score scale bounds; simulated scores are clipped to this range.
pub const SCORE_MIN: f64 = 600.0;
pub const SCORE_MAX: f64 = 2400.0;

/// One school row: identifier, reported average score, number of test
/// takers, and economic-need index in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchoolRecord {
    pub school_id: String,
    pub avg_sat: f64,
    pub num_takers: u32,
    pub eni: f64,
}

impl SchoolRecord {
    fn validate(&self, row: usize) -> Result<()> {
        if !(SCORE_MIN..=SCORE_MAX).contains(&self.avg_sat) {
            return Err(Error::InvalidRecord {
                row,
                message: format!(
                    "avg_sat must lie in [{SCORE_MIN}, {SCORE_MAX}] (got {})",
                    self.avg_sat
                ),
            });
        }
        if !(0.0..=1.0).contains(&self.eni) {
            return Err(Error::InvalidRecord {
                row,
                message: format!("eni must lie in [0, 1] (got {})", self.eni),
            });
        }
        Ok(())
    }
}

/// Simulated student-level scores, kept as parallel columns.
#[derive(Debug, Clone, Default)]
pub struct SimulatedCohort {
    pub scores: Vec<f64>,
    pub group_labels: Vec<Group>,
    pub source_school: Vec<String>,
}

impl SimulatedCohort {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Scores of one group.
    pub fn group_scores(&self, group: Group) -> Vec<f64> {
        self.scores
            .iter()
            .zip(&self.group_labels)
            .filter(|(_, g)| **g == group)
            .map(|(s, _)| *s)
            .collect()
    }
}

/// Load and validate school records from a CSV with header
/// `school_id,avg_sat,num_takers,eni`. Row numbers in errors are 1-based
/// and count the header line.
pub fn load_schools(path: impl AsRef<Path>) -> Result<Vec<SchoolRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<SchoolRecord>().enumerate() {
        let row_no = i + 2; // header is row 1
        let record: SchoolRecord = row.map_err(|e| Error::InvalidRecord {
            row: row_no,
            message: e.to_string(),
        })?;
        record.validate(row_no)?;
        records.push(record);
    }
    Ok(records)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Split schools by the median economic-need index: strictly above the
/// median means `G2`. Returns the per-school labels and the resulting
/// student share of `G2` (weighted by test-taker counts).
pub fn split_by_eni(records: &[SchoolRecord]) -> (Vec<Group>, f64) {
    if records.is_empty() {
        return (Vec::new(), 0.0);
    }
    let mut enis: Vec<f64> = records.iter().map(|r| r.eni).collect();
    let cut = median(&mut enis);
    let labels: Vec<Group> = records
        .iter()
        .map(|r| if r.eni > cut { Group::G2 } else { Group::G1 })
        .collect();
    let total: u64 = records.iter().map(|r| u64::from(r.num_takers)).sum();
    let g2: u64 = records
        .iter()
        .zip(&labels)
        .filter(|(_, g)| **g == Group::G2)
        .map(|(r, _)| u64::from(r.num_takers))
        .sum();
    let p = if total == 0 { 0.0 } else { g2 as f64 / total as f64 };
    (labels, p)
}

/// Simulate per-student scores: for each school, `num_takers` draws from
/// `Normal(avg_sat, sd)` clipped to the score scale. School `k` draws from
/// stream `k` of the seed, so schools can be simulated in any order.
pub fn simulate_students(records: &[SchoolRecord], sd: f64, seed: u64) -> Result<SimulatedCohort> {
    if sd.is_nan() || sd <= 0.0 {
        return Err(Error::invalid("sd", format!("must be positive (got {sd})")));
    }
    let (labels, _) = split_by_eni(records);
    let mut cohort = SimulatedCohort::default();
    for (k, (record, group)) in records.iter().zip(&labels).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for _ in 0..record.num_takers {
            use rand_distr::Distribution as _;
            let z: f64 = rand_distr::StandardNormal.sample(&mut rng);
            let score = (record.avg_sat + sd * z).clamp(SCORE_MIN, SCORE_MAX);
            cohort.scores.push(score);
            cohort.group_labels.push(*group);
            cohort.source_school.push(record.school_id.clone());
        }
    }
    Ok(cohort)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Bias factor estimate: ratio of group mean scores, clipped to `(0, 1]`.
pub fn estimate_beta(g1_scores: &[f64], g2_scores: &[f64]) -> Result<f64> {
    if g1_scores.is_empty() {
        return Err(Error::DegenerateSample("no G1 scores"));
    }
    if g2_scores.is_empty() {
        return Err(Error::DegenerateSample("no G2 scores"));
    }
    let m1 = mean(g1_scores);
    if m1 == 0.0 {
        return Err(Error::DegenerateSample("G1 mean score is zero"));
    }
    Ok((mean(g2_scores) / m1).clamp(f64::MIN_POSITIVE, 1.0))
}

/// Sensitivity variant: ratio of group medians instead of means.
pub fn estimate_beta_quantile(g1_scores: &[f64], g2_scores: &[f64]) -> Result<f64> {
    if g1_scores.is_empty() || g2_scores.is_empty() {
        return Err(Error::DegenerateSample("empty group"));
    }
    let mut g1 = g1_scores.to_vec();
    let mut g2 = g2_scores.to_vec();
    let m1 = median(&mut g1);
    if m1 == 0.0 {
        return Err(Error::DegenerateSample("G1 median score is zero"));
    }
    Ok((median(&mut g2) / m1).clamp(f64::MIN_POSITIVE, 1.0))
}

/// Fit the potential law: divide `G2` scores by `beta` (debiasing), pool
/// with `G1`, and return a normal law with the pooled sample mean and
/// standard deviation (n-1 denominator).
pub fn fit_potential_dist(cohort: &SimulatedCohort, beta: f64) -> Result<Distribution> {
    if beta.is_nan() || beta <= 0.0 || beta > 1.0 {
        return Err(Error::invalid("beta", format!("must lie in (0, 1] (got {beta})")));
    }
    if cohort.len() < 2 {
        return Err(Error::DegenerateSample("need at least two scores"));
    }
    let pooled: Vec<f64> = cohort
        .scores
        .iter()
        .zip(&cohort.group_labels)
        .map(|(s, g)| match g {
            Group::G1 => *s,
            Group::G2 => *s / beta,
        })
        .collect();
    let m = mean(&pooled);
    let var = pooled.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (pooled.len() as f64 - 1.0);
    let sd = var.sqrt();
    if sd == 0.0 {
        return Err(Error::DegenerateSample("pooled scores have zero variance"));
    }
    Distribution::normal(m, sd)
}

/// Write the cohort as CSV `score,group,school_id`.
pub fn write_cohort<W: std::io::Write>(cohort: &SimulatedCohort, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["score", "group", "school_id"])?;
    for i in 0..cohort.len() {
        let group = match cohort.group_labels[i] {
            Group::G1 => "G1",
            Group::G2 => "G2",
        };
        w.write_record([
            cohort.scores[i].to_string().as_str(),
            group,
            cohort.source_school[i].as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Knobs for the synthetic school table used in lieu of the real data.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub n_schools: usize,
    pub takers_per_school: u32,
    /// Mean of the underlying potential law.
    pub mean: f64,
    /// Spread of school averages around the group mean.
    pub between_sd: f64,
    /// Bias factor applied to the averages of high-need schools.
    pub beta: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        // With per-student sd 264.6, the pipeline's pooled debiased law
        // comes out near Normal(1550, 310): 80^2 + (1 + 0.8^-2)/2 * 264.6^2
        // is approximately 310^2. The between-school spread is kept small
        // so its sampling noise cannot dominate the recovered variance.
        SyntheticConfig {
            n_schools: 2000,
            takers_per_school: 50,
            mean: 1550.0,
            between_sd: 80.0,
            beta: 0.8,
            seed: 20_240_613,
        }
    }
}

/// Generate a synthetic school table shaped like the case-study inputs:
/// half the schools low-need (`eni < 0.5`, unbiased averages), half
/// high-need (`eni > 0.5`, averages discounted by `beta`).
pub fn synthetic_schools(config: &SyntheticConfig) -> Vec<SchoolRecord> {
    use rand_distr::Distribution as _;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::with_capacity(config.n_schools);
    for k in 0..config.n_schools {
        let high_need = k % 2 == 1;
        let z: f64 = rand_distr::StandardNormal.sample(&mut rng);
        let eni = if high_need {
            0.5 + 0.5 * rng.random::<f64>() + f64::EPSILON
        } else {
            0.5 * rng.random::<f64>()
        };
        let raw_avg = config.mean + config.between_sd * z;
        let avg = if high_need { config.beta * raw_avg } else { raw_avg };
        records.push(SchoolRecord {
            school_id: format!("S{k:04}"),
            avg_sat: avg.clamp(SCORE_MIN, SCORE_MAX),
            num_takers: config.takers_per_school,
            eni: eni.min(1.0),
        });
    }
    records
}
