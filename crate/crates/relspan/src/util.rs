//! Tolerances, seed derivation, and small shared helpers.

/// Relative tolerance for all comparisons of accumulated distances against
/// bounds. Shortest-path sums over f64 weights pick up rounding.
pub const REL_TOL: f64 = 1e-9;

/// `a <= b`, up to relative tolerance.
pub fn le_tol(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * b.abs().max(1.0)
}

/// `a >= b`, up to relative tolerance.
pub fn ge_tol(a: f64, b: f64) -> bool {
    b <= a + REL_TOL * a.abs().max(1.0)
}

/// `a == b`, up to relative tolerance.
pub fn eq_tol(a: f64, b: f64) -> bool {
    le_tol(a, b) && ge_tol(a, b)
}

/// Ceiling that forgives floating point values sitting just above an
/// integer (e.g. `log2(8.0)` evaluating to `3.0000000000000004`).
pub fn ceil_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.ceil()
    }
}

/// Derive an independent stream seed from a base seed and a salt
/// (splitmix64 finalizer).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(salt.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Configure the global rayon pool from the SPANNER_THREADS environment
/// variable. Safe to call more than once; later calls are no-ops.
pub fn init_threads() {
    if let Ok(v) = std::env::var("SPANNER_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}
