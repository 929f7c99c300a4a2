//! Small 1D search utilities: grid scan, golden-section refinement, and
//! bisection. The objectives in this crate are smooth, cheap and
//! one-dimensional, so nothing fancier is warranted.

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[lo, hi]` to a relative tolerance
/// in the argument. Returns `(argmax, max)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * scale {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}

/// Coarse grid scan followed by golden-section refinement around the best
/// grid cell. Returns `(argmax, max)`.
pub fn grid_then_golden_max<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n_grid: usize,
    rel_tol: f64,
) -> (f64, f64) {
    let n = n_grid.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    golden_section_max(f, a, b, rel_tol)
}

/// Bisection for a root of `f` on a bracket `[lo, hi]` with
/// `f(lo) * f(hi) <= 0`. Runs until the bracket shrinks below `rel_tol`
/// relative to its midpoint magnitude.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= rel_tol * m.abs().max(f64::MIN_POSITIVE) {
            return m;
        }
        let fm = f(m);
        if (fa <= 0.0) == (fm <= 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
