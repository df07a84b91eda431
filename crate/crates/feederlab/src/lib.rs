//! Continuous two-sided admission market where one group of students is
//! perceived at a multiplicatively discounted potential, plus the machinery
//! to quantify the damage and to size interventions against it.
//!
//! The library is organized around [`MarketParams`] (population split `p`,
//! bias factor `beta`, and the law of true potentials):
//!
//! - [`dist`] — potential laws (Pareto, normal, truncated normal, empirical)
//!   behind one pdf / cdf / ccdf / inverse-ccdf contract.
//! - [`market`] — perceived potentials, normalized rankings, displacement,
//!   and school admission cutoffs.
//! - [`school`] — school-side utilities and cohort diversity.
//! - [`interview`] — school-led debiasing via interview capacity.
//! - [`voucher`] — centrally funded debiasing of a potential band: post-voucher
//!   rankings, the `mm` and `PAUC` unfairness measures, closed-form optimal
//!   intervals for Pareto potentials, and a grid-search optimizer for
//!   arbitrary laws.
//! - [`sim`] — finite-market Monte Carlo with seeded replications.
//! - [`ingest`] — school-level score records to a fitted potential law.
//!
//! The `feederlab` binary exposes all of the above as subcommands; see the
//! repository README.
//!
//! Quick example:
//! ```
//! use feederlab::voucher::{self, VoucherBudget};
//! use feederlab::{Distribution, MarketParams};
//!
//! let params = MarketParams::new(Distribution::pareto(3.0)?, 0.8, 0.25)?;
//!
//! // The worst-displaced student sits at potential 1/beta.
//! let (worst, at) = params.max_displacement();
//! assert!((worst - 0.366).abs() < 1e-12);
//! assert!((at - 1.25).abs() < 1e-12);
//!
//! // Spending 10% of the potential mass on vouchers, optimally targeted,
//! // debiases a band around the middle of the distribution.
//! let best = voucher::optimal_interval_mm(&params, VoucherBudget::new(0.10)?)?;
//! let (z1, z2) = best.interval.bounds().unwrap();
//! assert!((z1 - 1.2252).abs() < 1e-4 && (z2 - 1.3111).abs() < 1e-4);
//! assert!(best.value_after < worst);
//! # Ok::<(), feederlab::Error>(())
//! ```

pub mod cli;
pub mod dist;
pub mod error;
pub mod ingest;
pub mod interview;
pub mod market;
pub(crate) mod numeric;
pub mod school;
pub mod sim;
pub mod voucher;

pub use dist::Distribution;
pub use error::{Error, Result};
pub use market::{Group, MarketParams, Student};
pub use voucher::{DebiasInterval, Measure, UnfairnessReport, VoucherBudget};
