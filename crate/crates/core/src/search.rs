//! One-dimensional search primitives: golden-section extremisation with
//! bracket expansion, and bisection root finding.
//!
//! Every optimiser in this crate that has no closed form reduces to a 1-D
//! convex (or unimodal) problem — the shift α in the conjugate infimum, the
//! scale t in the scaled objective, the t in fast/slow bound assembly — so a
//! single careful golden-section routine is all we need. The argument
//! tolerance is fixed at 1e-10 with an iteration cap of 200; a golden step
//! shrinks the bracket by ~0.618 per iteration, so the cap is never the
//! binding constraint for the bracket widths used here.

/// (1 + √5) / 2.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Absolute tolerance on the argument at which bracket shrinking stops.
pub const ARG_TOL: f64 = 1e-10;

/// Iteration cap for a single golden-section pass.
pub const MAX_GOLDEN_ITERS: usize = 200;

/// Result of a (possibly bracket-expanding) 1-D extremisation.
#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    /// Argmin (or argmax) found.
    pub x: f64,
    /// Objective value at `x`.
    pub value: f64,
    /// True when the optimum still sat on the bracket edge after all
    /// allowed expansions — the caller decides whether that means
    /// "unbounded" or "constrained solution on the boundary".
    pub on_boundary: bool,
    /// Final bracket searched.
    pub bracket: (f64, f64),
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Extremum {
    debug_assert!(a < b, "empty bracket [{a}, {b}]");
    let (orig_a, orig_b) = (a, b);
    let inv = 1.0 / GOLDEN_RATIO;
    let (mut a, mut b) = (a, b);
    let mut c = b - (b - a) * inv;
    let mut d = a + (b - a) * inv;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_GOLDEN_ITERS {
        if (b - a).abs() <= ARG_TOL {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv;
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    // "On the boundary" is judged against the original bracket: the interior
    // of a genuinely unimodal problem is never this close to an endpoint.
    let margin = (orig_b - orig_a) * 1e-7 + 10.0 * ARG_TOL;
    Extremum {
        x,
        value: f(x),
        on_boundary: x - orig_a < margin || orig_b - x < margin,
        bracket: (orig_a, orig_b),
    }
}

/// Golden-section maximisation (negated minimisation).
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Extremum {
    let m = golden_min(|x| -f(x), a, b);
    Extremum {
        value: -m.value,
        ..m
    }
}

/// Minimise on `[a, b]`, doubling the bracket width on whichever side the
/// optimum lands, at most `max_doublings` times. If the optimum still sits
/// on an edge afterwards, `on_boundary` stays set.
pub fn golden_min_expanding(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    max_doublings: usize,
) -> Extremum {
    let (mut a, mut b) = (a, b);
    let mut best = golden_min(&f, a, b);
    for _ in 0..max_doublings {
        if !best.on_boundary {
            return best;
        }
        let width = b - a;
        let margin = width * 1e-6;
        if best.x - a < margin {
            a -= width;
        } else {
            b += width;
        }
        best = golden_min(&f, a, b);
    }
    best
}

/// Maximising counterpart of [`golden_min_expanding`].
pub fn golden_max_expanding(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    max_doublings: usize,
) -> Extremum {
    let m = golden_min_expanding(|x| -f(x), a, b, max_doublings);
    Extremum {
        value: -m.value,
        ..m
    }
}

/// Bisection root of a continuous `f` with a sign change on `[lo, hi]`,
/// to absolute argument tolerance `tol`. Returns `None` when `f` has the
/// same sign at both ends.
pub fn bisect_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return Some(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
