use super::li::li_direct;
use super::{c, PolylogError, C64};

/// Evaluation route for a G-function with nonzero last argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GPath {
    /// Pick the faster convergent route automatically.
    Auto,
    /// Convert to a multiple polylogarithm and sum its series.
    Direct,
    /// Split with the Hölder convolution at p = 2 first.
    Hoelder,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn is_zero(z: C64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

/// `G(z_1, ..., z_k; y)` on the principal branch.
pub fn g_func(z: &[C64], y: C64, rel_tol: f64) -> Result<C64, PolylogError> {
    g_func_with(z, y, rel_tol, GPath::Auto)
}

pub fn g_func_with(z: &[C64], y: C64, rel_tol: f64, path: GPath) -> Result<C64, PolylogError> {
    if z.is_empty() {
        return Ok(c(1.0));
    }
    let trailing = z.iter().rev().take_while(|v| is_zero(**v)).count();
    if is_zero(y) {
        if trailing > 0 {
            return Err(PolylogError::Domain("G with trailing zeros at y = 0".into()));
        }
        return Ok(c(0.0));
    }
    if trailing == z.len() {
        let k = z.len();
        return Ok(y.ln().powu(k as u32) / factorial(k));
    }
    if trailing > 0 {
        return trailing_zeros(z, trailing, y, rel_tol, path);
    }
    if z[0] == y {
        return Err(PolylogError::Domain(
            "G(z1, ...; y) with z1 = y diverges at the endpoint".into(),
        ));
    }
    // scaling relation: G(z; y) = G(z/y; 1)
    let w: Vec<C64> = z.iter().map(|v| v / y).collect();
    check_cut(&w)?;
    let rd = direct_rate(&w);
    let rh = hoelder_rate(&w);
    let use_hoelder = match path {
        GPath::Direct => false,
        GPath::Hoelder => true,
        GPath::Auto => {
            if rd < 1.0 && rd <= rh {
                false
            } else if rh < 1.0 {
                true
            } else if rd < 1.0 {
                false
            } else {
                return Err(PolylogError::Domain(format!(
                    "arguments outside the implemented convergent region (rates {rd:.3}, {rh:.3})"
                )));
            }
        }
    };
    if use_hoelder {
        if rh >= 1.0 {
            return Err(PolylogError::Domain("Hölder split does not converge here".into()));
        }
        hoelder_sum(&w, 2.0, rel_tol)
    } else {
        g_direct_unit(&w, rel_tol)
    }
}

/// Letters on the open segment (0, 1) lie on the integration path.
fn check_cut(w: &[C64]) -> Result<(), PolylogError> {
    for z in w {
        if !is_zero(*z) && z.im == 0.0 && z.re > 0.0 && z.re < 1.0 {
            return Err(PolylogError::Domain(format!(
                "argument {z} lies on the integration path (branch cut)"
            )));
        }
    }
    Ok(())
}

fn direct_rate(w: &[C64]) -> f64 {
    w.iter()
        .filter(|z| !is_zero(**z))
        .map(|z| 1.0 / z.norm())
        .fold(0.0, f64::max)
}

fn hoelder_rate(w: &[C64]) -> f64 {
    let mut r: f64 = 0.0;
    for z in w {
        if !is_zero(*z) {
            r = r.max(0.5 / z.norm());
        }
        let one_minus = c(1.0) - z;
        if !is_zero(one_minus) {
            r = r.max(0.5 / one_minus.norm());
        }
    }
    r
}

/// `G(w; 1)` with nonzero last letter through `(-1)^k Li_m(1/z1, z1/z2, ...)`.
fn g_direct_unit(w: &[C64], rel_tol: f64) -> Result<C64, PolylogError> {
    let mut m = Vec::new();
    let mut zs = Vec::new();
    let mut run = 1u32;
    for z in w {
        if is_zero(*z) {
            run += 1;
        } else {
            m.push(run);
            zs.push(*z);
            run = 1;
        }
    }
    let mut x = Vec::with_capacity(zs.len());
    let mut prev = c(1.0);
    for z in &zs {
        x.push(prev / z);
        prev = *z;
    }
    let sign = if m.len() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(li_direct(&m, &x, rel_tol)? * sign)
}

/// Sub-G evaluation inside the Hölder sum: no further splitting.
fn g_plain(z: &[C64], y: C64, rel_tol: f64) -> Result<C64, PolylogError> {
    g_func_with(z, y, rel_tol, GPath::Direct)
}

fn hoelder_sum(w: &[C64], p: f64, rel_tol: f64) -> Result<C64, PolylogError> {
    let n = w.len();
    let lo = c(1.0 - 1.0 / p);
    let hi = c(1.0 / p);
    let mut total = c(0.0);
    for j in 0..=n {
        let left: Vec<C64> = w[..j].iter().rev().map(|z| c(1.0) - z).collect();
        let right = &w[j..];
        let a = g_plain(&left, lo, rel_tol)?;
        if is_zero(a) {
            continue;
        }
        let b = g_plain(right, hi, rel_tol)?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += a * b * sign;
    }
    Ok(total)
}

/// Both sides of the Hölder convolution for `G(z; 1)` at parameter `p`.
/// The right side uses the empty-product convention `G(; y) = 1`.
pub fn hoelder(z: &[C64], p: f64, rel_tol: f64) -> Result<(C64, C64), PolylogError> {
    if z.is_empty() {
        return Err(PolylogError::Domain("empty argument list".into()));
    }
    if z[0] == c(1.0) {
        return Err(PolylogError::Domain("Hölder convolution needs z1 != 1".into()));
    }
    if is_zero(z[z.len() - 1]) {
        return Err(PolylogError::Domain("Hölder convolution needs z_w != 0".into()));
    }
    if p < 1.0 {
        return Err(PolylogError::Domain("Hölder parameter must be >= 1".into()));
    }
    let lhs = g_func(z, c(1.0), rel_tol)?;
    let rhs = hoelder_sum(z, p, rel_tol)?;
    Ok((lhs, rhs))
}

/// `G(w, 0^r; y)` via the shuffle with `G(0; y)`:
/// `r G(w,0^r) = G(0) G(w,0^{r-1}) - Σ_{i<|w|} G(w[..i], 0, w[i..], 0^{r-1})`.
fn trailing_zeros(z: &[C64], r: usize, y: C64, rel_tol: f64, path: GPath) -> Result<C64, PolylogError> {
    let n = z.len() - r;
    let head = &z[..n];
    let shorter = &z[..z.len() - 1];
    let mut acc = y.ln() * g_func_with(shorter, y, rel_tol, path)?;
    for i in 0..n {
        let mut word = Vec::with_capacity(z.len());
        word.extend_from_slice(&head[..i]);
        word.push(c(0.0));
        word.extend_from_slice(&head[i..]);
        word.extend(std::iter::repeat_n(c(0.0), r - 1));
        acc -= g_func_with(&word, y, rel_tol, path)?;
    }
    Ok(acc / r as f64)
}
