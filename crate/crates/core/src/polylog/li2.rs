use std::f64::consts::PI;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use super::{c, PolylogError, C64};
use crate::rational::{binomial, to_f64, Q};

/// Side of the real cut `[1, ∞)` for the dilogarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSide {
    /// `x + i0`
    Above,
    /// `x - i0`
    Below,
}

const N_BERNOULLI: usize = 60;

/// Bernoulli numbers `B_0..B_{N-1}` (with `B_1 = -1/2`), exact then rounded.
fn bernoulli() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut b: Vec<Q> = vec![Q::one()];
        for m in 1..N_BERNOULLI as u32 {
            let mut s = Q::zero();
            for (k, bk) in b.iter().enumerate() {
                s += binomial(m + 1, k as u32) * bk;
            }
            b.push(-s / Q::from_integer((m + 1).into()));
        }
        b.iter().map(to_f64).collect()
    })
}

fn zeta2() -> f64 {
    PI * PI / 6.0
}

/// Dilogarithm via the inversion and reflection maps and the Bernoulli series
/// in `u = -ln(1-x)`. Real arguments above 1 need an explicit side.
pub fn li2_numeric(x: C64, side: Option<BranchSide>) -> Result<C64, PolylogError> {
    if x.im == 0.0 && x.re > 1.0 {
        let s =
            side.ok_or_else(|| PolylogError::Domain(format!("Li2({}) lies on the branch cut; give a side", x.re)))?;
        let l = x.re.ln();
        let re = -li2_core(c(1.0 / x.re)).re + 2.0 * zeta2() - 0.5 * l * l;
        let im = match s {
            BranchSide::Above => PI * l,
            BranchSide::Below => -PI * l,
        };
        return Ok(C64::new(re, im));
    }
    Ok(li2_core(x))
}

fn li2_core(x: C64) -> C64 {
    if x == c(0.0) {
        return c(0.0);
    }
    if x == c(1.0) {
        return c(zeta2());
    }
    if x.norm() > 1.0 {
        // Li2(x) = -Li2(1/x) - ζ2 - ln²(-x)/2
        let l = (-x).ln();
        return -li2_core(c(1.0) / x) - zeta2() - l * l * 0.5;
    }
    if x.re > 0.5 {
        // Li2(x) = -Li2(1-x) + ζ2 - ln(x) ln(1-x)
        let y = c(1.0) - x;
        return -bernoulli_series(y) + zeta2() - x.ln() * y.ln();
    }
    bernoulli_series(x)
}

/// `ln(1 - x)` without cancellation for small `x`.
fn ln_one_minus(x: C64) -> C64 {
    let (a, b) = (-x.re, -x.im);
    C64::new(0.5 * (2.0 * a + a * a + b * b).ln_1p(), b.atan2(1.0 + a))
}

fn bernoulli_series(x: C64) -> C64 {
    let u = -ln_one_minus(x);
    let b = bernoulli();
    let mut sum = c(0.0);
    let mut upow = u; // u^{i+1}
    let mut fact = 1.0; // (i+1)!
    for (i, bi) in b.iter().enumerate() {
        if i > 0 {
            upow *= u;
            fact *= (i + 1) as f64;
        }
        if *bi == 0.0 {
            continue;
        }
        let term = upow * (*bi / fact);
        sum += term;
        if i > 2 && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        assert_eq!(li2_numeric(c(0.0), None).unwrap(), c(0.0));
        let one = li2_numeric(c(1.0), None).unwrap();
        assert!((one.re - PI * PI / 6.0).abs() < 1e-15);
        let m1 = li2_numeric(c(-1.0), None).unwrap();
        assert!((m1.re + PI * PI / 12.0).abs() < 1e-15, "{m1}");
        let half = li2_numeric(c(0.5), None).unwrap();
        let ln2 = 2f64.ln();
        assert!((half.re - (PI * PI / 12.0 - 0.5 * ln2 * ln2)).abs() < 1e-15);
    }

    #[test]
    fn cut_needs_a_side() {
        assert!(li2_numeric(c(2.0), None).is_err());
        let a = li2_numeric(c(2.0), Some(BranchSide::Above)).unwrap();
        let b = li2_numeric(c(2.0), Some(BranchSide::Below)).unwrap();
        // Li2(2 ± i0) = π²/4 ± iπ ln 2
        assert!((a.re - PI * PI / 4.0).abs() < 1e-14, "{a}");
        assert!((a.im - PI * 2f64.ln()).abs() < 1e-14);
        assert_eq!(a.conj(), b);
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli();
        assert_eq!(b[1], -0.5);
        assert!((b[2] - 1.0 / 6.0).abs() < 1e-17);
        assert_eq!(b[3], 0.0);
        assert!((b[4] + 1.0 / 30.0).abs() < 1e-17);
    }
}
