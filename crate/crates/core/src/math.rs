//! Scalar helpers that work without `std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn asin(x: f64) -> f64 {
    libm::asin(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn hypot(a: f64, b: f64) -> f64 {
    libm::hypot(a, b)
}

/// Pairwise summation. The split points depend only on the length, so results are
/// reproducible bit for bit.
pub fn pairwise_sum<F: Fn(usize) -> f64>(n: usize, term: &F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        if hi - lo <= 64 {
            let mut s = 0.0;
            for i in lo..hi {
                s += term(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    rec(0, n, term)
}

/// Euclidean pairing `<a, b>` with deterministic pairwise summation.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise_sum(a.len(), &|i| a[i] * b[i])
}

/// `<a, diag(w) b>`.
pub fn weighted_dot(a: &[f64], w: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    debug_assert_eq!(a.len(), w.len());
    pairwise_sum(a.len(), &|i| a[i] * w[i] * b[i])
}

pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Largest absolute entry, or `None` if any entry is non-finite.
pub fn max_abs_finite(a: &[f64]) -> Option<f64> {
    let mut m = 0.0f64;
    for &x in a {
        if !x.is_finite() {
            return None;
        }
        let ax = x.abs();
        if ax > m {
            m = ax;
        }
    }
    Some(m)
}
