use super::{c, g_func, PolylogError, C64};

/// Iteration cap for a single nested sum.
const MAX_TERMS: usize = 20_000_000;

/// Above this geometric rate the series is routed through the G-function
/// representation, which may apply the Hölder convolution.
const DIRECT_RATE: f64 = 0.9;

fn check_args(m: &[u32], x: &[C64]) -> Result<(), PolylogError> {
    if m.is_empty() {
        return Err(PolylogError::Domain("empty multi-index".into()));
    }
    if m.len() != x.len() {
        return Err(PolylogError::Domain("index and argument lengths differ".into()));
    }
    if m.contains(&0) {
        return Err(PolylogError::Domain("indices must be positive".into()));
    }
    Ok(())
}

fn partial_products(x: &[C64]) -> Vec<C64> {
    let mut y = Vec::with_capacity(x.len());
    let mut acc = c(1.0);
    for &xi in x {
        acc *= xi;
        y.push(acc);
    }
    y
}

/// Nested power series, no acceleration. Requires every partial product
/// `|x_1 ... x_j| < 1`, or `<= 1` when the caller accepts slow convergence.
pub fn li_direct(m: &[u32], x: &[C64], rel_tol: f64) -> Result<C64, PolylogError> {
    check_args(m, x)?;
    let y = partial_products(x);
    if y.iter().any(|v| *v == c(0.0)) {
        return Ok(c(0.0));
    }
    let rate = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if rate > 1.0 + 1e-15 {
        return Err(PolylogError::Domain(format!(
            "partial product of arguments exceeds 1 in modulus ({rate})"
        )));
    }
    if m[0] == 1 && (x[0] - c(1.0)).norm() == 0.0 {
        return Err(PolylogError::Divergent("Li with m1 = 1 at x1 = 1".into()));
    }
    nested_sum(m, &y, rel_tol, rate)
}

/// Sums `Σ_{i1>...>ik>0} Π y_j^{i_j - i_{j+1}} / i_j^{m_j}`, which equals the
/// multiple polylogarithm with partial products `y`. Every factor is a
/// nonnegative power of some `y_j`, so nothing overflows.
fn nested_sum(m: &[u32], y: &[C64], rel_tol: f64, rate: f64) -> Result<C64, PolylogError> {
    let k = m.len();
    // v[j] holds V_{j+2}(i) for j = 0..k-1; v[k-1] is y_k^i.
    let mut v = vec![c(0.0); k];
    v[k - 1] = y[k - 1];
    let tail_factor = if rate < 1.0 { 1.0 / (1.0 - rate) } else { 1.0 };
    let mut sum = c(0.0);
    let mut small = 0;
    for i in 1..=MAX_TERMS {
        let fi = i as f64;
        let term = v[0] / fi.powi(m[0] as i32);
        sum += term;
        if i >= k {
            if term.norm() * tail_factor <= rel_tol * sum.norm() {
                small += 1;
                if small >= 3 {
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
        }
        // advance V_j(i) -> V_j(i+1), using the old inner value
        for j in 0..k.saturating_sub(1) {
            let inner = v[j + 1] / fi.powi(m[j + 1] as i32);
            v[j] = y[j] * (v[j] + inner);
        }
        v[k - 1] *= y[k - 1];
    }
    Err(PolylogError::NoConvergence(format!(
        "no convergence after {MAX_TERMS} terms"
    )))
}

/// Multiple polylogarithm `Li_{m1..mk}(x1..xk)` by its nested series. Inputs
/// close to the boundary of convergence go through the G-function form with
/// Hölder acceleration.
pub fn li_series(m: &[u32], x: &[C64], rel_tol: f64) -> Result<C64, PolylogError> {
    check_args(m, x)?;
    let y = partial_products(x);
    if y.iter().any(|v| *v == c(0.0)) {
        return Ok(c(0.0));
    }
    if m[0] == 1 && x[0] == c(1.0) {
        return Err(PolylogError::Divergent("Li with m1 = 1 at x1 = 1".into()));
    }
    let rate = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if rate > 1.0 + 1e-15 {
        return Err(PolylogError::Domain(format!(
            "outside the region of convergence (max |x1...xj| = {rate})"
        )));
    }
    if rate <= DIRECT_RATE {
        return nested_sum(m, &y, rel_tol, rate);
    }
    // Li_m(x) = (-1)^k G_m(1/y_1, ..., 1/y_k; 1)
    let mut word = Vec::new();
    for (&mj, yj) in m.iter().zip(&y) {
        word.extend(std::iter::repeat_n(c(0.0), mj as usize - 1));
        word.push(c(1.0) / yj);
    }
    let sign = if m.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    match g_func(&word, c(1.0), rel_tol) {
        Ok(v) => Ok(v * sign),
        Err(e) if rate < 1.0 => nested_sum(m, &y, rel_tol, rate).map_err(|_| e),
        Err(e) => Err(e),
    }
}

/// Nielsen polylogarithm `S_{n,p}(x) = Li_{n+1,1,...,1}(x,1,...,1)`, depth p.
pub fn nielsen(n: u32, p: u32, x: C64, rel_tol: f64) -> Result<C64, PolylogError> {
    if p == 0 {
        return Err(PolylogError::Domain("Nielsen depth p must be >= 1".into()));
    }
    let mut m = vec![n + 1];
    m.extend(std::iter::repeat_n(1, p as usize - 1));
    let mut xs = vec![x];
    xs.extend(std::iter::repeat_n(c(1.0), p as usize - 1));
    li_series(&m, &xs, rel_tol)
}

/// Harmonic polylogarithm `H_{m1..mk}(x) = Li_{m1..mk}(x,1,...,1)`.
pub fn hpl(m: &[u32], x: C64, rel_tol: f64) -> Result<C64, PolylogError> {
    let mut xs = vec![x];
    xs.extend(std::iter::repeat_n(c(1.0), m.len().saturating_sub(1)));
    li_series(m, &xs, rel_tol)
}
