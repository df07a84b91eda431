//! C ABI for the feederlab library.
//!
//! The surface follows the usual opaque-handle pattern: construct an
//! [`FlMarket`] with one of the `fl_market_new_*` functions, call the
//! analysis functions against it, and release it with [`fl_market_free`].
//! Handles are immutable and safe to share across threads.
//!
//! Every function returns an [`FlStatus`]; results come back through out
//! pointers, which are written only on `FL_STATUS_OK`. Debias bands are
//! passed as `(z1, z2)` doubles; a band with both endpoints NaN is the
//! empty band. Panics are caught at the boundary and reported as
//! `FL_STATUS_INTERNAL_ERROR`.
//!
//! Functions taking handle or out pointers check for null and report
//! `FL_STATUS_NULL_POINTER`; passing a dangling or foreign pointer is
//! undefined behavior, as usual at a C boundary.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use feederlab::voucher::{self, DebiasInterval, Measure, VoucherBudget};
use feederlab::{interview, school, Distribution, Error, Group, MarketParams};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Opaque market handle (population split, bias factor, potential law).
pub struct FlMarket {
    params: MarketParams,
}

/// Status code returned by every FFI call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FlStatus {
    Ok = 0,
    /// A parameter violated its domain; nothing was written.
    InvalidArgument = 1,
    /// The operation has a closed form only for Pareto potentials.
    RequiresPareto = 2,
    /// A required pointer was null.
    NullPointer = 3,
    /// An internal panic was caught at the boundary.
    InternalError = 4,
}

/// Student group tag.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FlGroup {
    /// Perceived at true potential.
    G1 = 1,
    /// Perceived at `beta` times true potential.
    G2 = 2,
}

impl From<FlGroup> for Group {
    fn from(g: FlGroup) -> Group {
        match g {
            FlGroup::G1 => Group::G1,
            FlGroup::G2 => Group::G2,
        }
    }
}

/// Unfairness measure selector for the optimizers.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FlMeasure {
    /// Worst mistreatment.
    Mm = 0,
    /// Positive area under the displacement curve.
    Pauc = 1,
}

impl From<FlMeasure> for Measure {
    fn from(m: FlMeasure) -> Measure {
        match m {
            FlMeasure::Mm => Measure::Mm,
            FlMeasure::Pauc => Measure::Pauc,
        }
    }
}

fn status_of(err: &Error) -> FlStatus {
    match err {
        Error::RequiresPareto(_) => FlStatus::RequiresPareto,
        _ => FlStatus::InvalidArgument,
    }
}

/// Run `f` with panics converted to `FL_STATUS_INTERNAL_ERROR`.
fn guarded(f: impl FnOnce() -> FlStatus) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => FlStatus::InternalError,
    }
}

/// Write `value` through `out`, which must be non-null.
unsafe fn write_out(out: *mut f64, value: f64) -> FlStatus {
    if out.is_null() {
        return FlStatus::NullPointer;
    }
    unsafe { *out = value };
    FlStatus::Ok
}

unsafe fn market<'a>(handle: *const FlMarket) -> Option<&'a MarketParams> {
    unsafe { handle.as_ref() }.map(|m| &m.params)
}

fn new_market(dist: Result<Distribution, Error>, beta: f64, p: f64, out: *mut *mut FlMarket) -> FlStatus {
    if out.is_null() {
        return FlStatus::NullPointer;
    }
    let params = dist.and_then(|d| MarketParams::new(d, beta, p));
    match params {
        Ok(params) => {
            let handle = Box::new(FlMarket { params });
            unsafe { *out = Box::into_raw(handle) };
            FlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Band decoding: both endpoints NaN means the empty band.
fn band(z1: f64, z2: f64) -> Result<DebiasInterval, Error> {
    if z1.is_nan() && z2.is_nan() {
        Ok(DebiasInterval::empty())
    } else {
        DebiasInterval::new(z1, z2)
    }
}

/// Create a market with Pareto(1, `alpha`) potentials.
#[no_mangle]
pub extern "C" fn fl_market_new_pareto(
    alpha: f64,
    beta: f64,
    p: f64,
    out: *mut *mut FlMarket,
) -> FlStatus {
    guarded(|| new_market(Distribution::pareto(alpha), beta, p, out))
}

/// Create a market with normal potentials.
#[no_mangle]
pub extern "C" fn fl_market_new_normal(
    mean: f64,
    stddev: f64,
    beta: f64,
    p: f64,
    out: *mut *mut FlMarket,
) -> FlStatus {
    guarded(|| new_market(Distribution::normal(mean, stddev), beta, p, out))
}

/// Create a market with normal potentials renormalized to `[lower, upper]`.
#[no_mangle]
pub extern "C" fn fl_market_new_truncated_normal(
    mean: f64,
    stddev: f64,
    lower: f64,
    upper: f64,
    beta: f64,
    p: f64,
    out: *mut *mut FlMarket,
) -> FlStatus {
    guarded(|| new_market(Distribution::truncated_normal(mean, stddev, lower, upper), beta, p, out))
}

/// Release a market handle. Null is accepted and ignored.
#[no_mangle]
pub extern "C" fn fl_market_free(market: *mut FlMarket) {
    if !market.is_null() {
        drop(unsafe { Box::from_raw(market) });
    }
}

/// Rank of a student with true potential `z` when schools see true
/// potentials (0 is the best school).
#[no_mangle]
pub extern "C" fn fl_rank_unbiased(
    market_ptr: *const FlMarket,
    z: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        unsafe { write_out(out, params.rank_unbiased(z)) }
    })
}

/// Rank of a student under the biased matching.
#[no_mangle]
pub extern "C" fn fl_rank_biased(
    market_ptr: *const FlMarket,
    z: f64,
    group: FlGroup,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        unsafe { write_out(out, params.rank_biased(z, group.into())) }
    })
}

/// Rank shift caused by bias (positive means a worse school).
#[no_mangle]
pub extern "C" fn fl_displacement(
    market_ptr: *const FlMarket,
    z: f64,
    group: FlGroup,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        unsafe { write_out(out, params.displacement(z, group.into())) }
    })
}

/// Largest displacement suffered by a G2 student and where it occurs.
#[no_mangle]
pub extern "C" fn fl_max_displacement(
    market_ptr: *const FlMarket,
    value: *mut f64,
    at_z: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        let (v, z) = params.max_displacement();
        let status = unsafe { write_out(value, v) };
        if status != FlStatus::Ok {
            return status;
        }
        unsafe { write_out(at_z, z) }
    })
}

/// Perceived-potential admission cutoff of school `s` in `[0, 1]`.
#[no_mangle]
pub extern "C" fn fl_school_cutoff(
    market_ptr: *const FlMarket,
    s: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match params.school_cutoff(s) {
            Ok(v) => unsafe { write_out(out, v) },
            Err(e) => status_of(&e),
        }
    })
}

/// Mean admitted true potential of school `s` without bias.
#[no_mangle]
pub extern "C" fn fl_utility_unbiased(
    market_ptr: *const FlMarket,
    s: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match school::utility_unbiased(params, s) {
            Ok(v) => unsafe { write_out(out, v) },
            Err(e) => status_of(&e),
        }
    })
}

/// Mean admitted true potential of school `s` under bias.
#[no_mangle]
pub extern "C" fn fl_utility_biased(
    market_ptr: *const FlMarket,
    s: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match school::utility_biased(params, s) {
            Ok(v) => unsafe { write_out(out, v) },
            Err(e) => status_of(&e),
        }
    })
}

/// Share of G2 students at school `s`, biased or unbiased matching.
#[no_mangle]
pub extern "C" fn fl_diversity(
    market_ptr: *const FlMarket,
    s: f64,
    biased: bool,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match school::diversity(params, s, biased) {
            Ok(v) => unsafe { write_out(out, v) },
            Err(e) => status_of(&e),
        }
    })
}

/// School utilities under the three interviewing scenarios at capacity `iv`.
#[no_mangle]
pub extern "C" fn fl_interview_utilities(
    market_ptr: *const FlMarket,
    s: f64,
    iv: f64,
    all_interview: *mut f64,
    solo_interview: *mut f64,
    solo_abstain: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        let values = interview::utility_all_interview(params, s, iv).and_then(|all| {
            Ok((
                all,
                interview::utility_solo_interview(params, s)?,
                interview::utility_solo_abstain(params, s, iv)?,
            ))
        });
        match values {
            Ok((all, solo, abstain)) => {
                for (ptr, v) in [(all_interview, all), (solo_interview, solo), (solo_abstain, abstain)] {
                    let status = unsafe { write_out(ptr, v) };
                    if status != FlStatus::Ok {
                        return status;
                    }
                }
                FlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Rank of a student after debiasing the band `[z1, z2]` (NaN endpoints
/// for the empty band).
#[no_mangle]
pub extern "C" fn fl_rank_post_voucher(
    market_ptr: *const FlMarket,
    z1: f64,
    z2: f64,
    z: f64,
    group: FlGroup,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match band(z1, z2) {
            Ok(interval) => unsafe {
                write_out(out, voucher::rank_post_voucher(params, &interval, z, group.into()))
            },
            Err(e) => status_of(&e),
        }
    })
}

/// Worst G2 mistreatment after debiasing the band.
#[no_mangle]
pub extern "C" fn fl_mistreatment_max(
    market_ptr: *const FlMarket,
    z1: f64,
    z2: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match band(z1, z2) {
            Ok(interval) => unsafe {
                write_out(out, voucher::mistreatment_max(params, &interval))
            },
            Err(e) => status_of(&e),
        }
    })
}

/// Positive area under the displacement curve after debiasing the band.
#[no_mangle]
pub extern "C" fn fl_pauc(
    market_ptr: *const FlMarket,
    z1: f64,
    z2: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match band(z1, z2) {
            Ok(interval) => unsafe { write_out(out, voucher::pauc(params, &interval)) },
            Err(e) => status_of(&e),
        }
    })
}

/// Potential-law mass (budget) consumed by the band.
#[no_mangle]
pub extern "C" fn fl_budget_of_interval(
    market_ptr: *const FlMarket,
    z1: f64,
    z2: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        match band(z1, z2) {
            Ok(interval) => unsafe {
                write_out(out, voucher::budget_of_interval(params, &interval))
            },
            Err(e) => status_of(&e),
        }
    })
}

fn write_optimal(
    opt: voucher::OptimalInterval,
    z1: *mut f64,
    z2: *mut f64,
    value_after: *mut f64,
    assumption_satisfied: *mut bool,
) -> FlStatus {
    let (a, b) = opt.interval.bounds().unwrap_or((f64::NAN, f64::NAN));
    for (ptr, v) in [(z1, a), (z2, b), (value_after, opt.value_after)] {
        let status = unsafe { write_out(ptr, v) };
        if status != FlStatus::Ok {
            return status;
        }
    }
    if assumption_satisfied.is_null() {
        return FlStatus::NullPointer;
    }
    unsafe { *assumption_satisfied = opt.assumption_satisfied };
    FlStatus::Ok
}

/// Closed-form optimal band for the budget under the chosen measure
/// (Pareto potentials only). NaN endpoints signal the empty band.
#[no_mangle]
pub extern "C" fn fl_optimal_interval(
    market_ptr: *const FlMarket,
    measure: FlMeasure,
    c_hat: f64,
    z1: *mut f64,
    z2: *mut f64,
    value_after: *mut f64,
    assumption_satisfied: *mut bool,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        let result = VoucherBudget::new(c_hat).and_then(|budget| match measure.into() {
            Measure::Mm => voucher::optimal_interval_mm(params, budget),
            Measure::Pauc => voucher::optimal_interval_pauc(params, budget),
        });
        match result {
            Ok(opt) => write_optimal(opt, z1, z2, value_after, assumption_satisfied),
            Err(e) => status_of(&e),
        }
    })
}

/// Sliding-window optimal band for any potential law.
#[no_mangle]
pub extern "C" fn fl_optimal_interval_numeric(
    market_ptr: *const FlMarket,
    measure: FlMeasure,
    c_hat: f64,
    grid_size: usize,
    z1: *mut f64,
    z2: *mut f64,
    value_after: *mut f64,
) -> FlStatus {
    guarded(|| {
        let Some(params) = (unsafe { market(market_ptr) }) else {
            return FlStatus::NullPointer;
        };
        let result = VoucherBudget::new(c_hat).and_then(|budget| {
            voucher::optimal_interval_numeric(params, budget, measure.into(), grid_size)
        });
        match result {
            Ok(opt) => {
                let (a, b) = opt.interval.bounds().unwrap_or((f64::NAN, f64::NAN));
                for (ptr, v) in [(z1, a), (z2, b), (value_after, opt.value_after)] {
                    let status = unsafe { write_out(ptr, v) };
                    if status != FlStatus::Ok {
                        return status;
                    }
                }
                FlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
