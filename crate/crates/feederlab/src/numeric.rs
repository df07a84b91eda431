//! Small numeric toolkit: bracketed bisection on monotone functions,
//! golden-section maximization, and adaptive Simpson quadrature.

/// Absolute tolerance for bisection root finding.
pub const BISECT_TOL: f64 = 1e-10;
/// Iteration cap for bisection.
pub const BISECT_MAX_ITER: usize = 200;

/// Root of a nonincreasing function `g` on `[lo, hi]`, assuming
/// `g(lo) >= 0 >= g(hi)`. Plain bisection: no derivative, robust on
/// monotone inputs.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..BISECT_MAX_ITER {
        if hi - lo <= BISECT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximize a unimodal function on `[a, b]` by golden-section search.
/// Returns `(argmax, max)` once the bracket shrinks below `tol`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    estimate: f64,
}

fn simpson_rec<F: Fn(f64) -> f64>(f: &F, panel: Panel, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (panel.a + panel.b);
    let lm = 0.5 * (panel.a + m);
    let rm = 0.5 * (m + panel.b);
    let flm = f(lm);
    let frm = f(rm);
    let left = Panel {
        a: panel.a,
        b: m,
        fa: panel.fa,
        fm: flm,
        fb: panel.fm,
        estimate: simpson(panel.a, m, panel.fa, flm, panel.fm),
    };
    let right = Panel {
        a: m,
        b: panel.b,
        fa: panel.fm,
        fm: frm,
        fb: panel.fb,
        estimate: simpson(m, panel.b, panel.fm, frm, panel.fb),
    };
    let delta = left.estimate + right.estimate - panel.estimate;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left.estimate + right.estimate + delta / 15.0
    } else {
        simpson_rec(f, left, 0.5 * tol, depth - 1) + simpson_rec(f, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a.is_nan() || b.is_nan() || b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let root = Panel { a, b, fa, fm, fb, estimate: simpson(a, b, fa, fm, fb) };
    simpson_rec(f, root, tol, 48)
}

/// Adaptive Simpson over `[a, b]` split at the interior `breakpoints`,
/// so integrand kinks land on piece boundaries.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> f64 {
    if a.is_nan() || b.is_nan() || b <= a {
        return 0.0;
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut lo = a;
    let mut total = 0.0;
    let piece_tol = tol / (cuts.len() + 1) as f64;
    for cut in cuts {
        total += adaptive_simpson(f, lo, cut, piece_tol);
        lo = cut;
    }
    total + adaptive_simpson(f, lo, b, piece_tol)
}

/// Mean and standard error of the mean of a sample. SEM uses the sample
/// standard deviation (n-1 denominator); a single observation yields SEM 0.
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}
