use std::fmt;

use num_traits::{One, Zero};

use super::li::li_series;
use super::{PolylogError, C64};
use crate::rational::{format_rational, to_f64, Q};
use crate::words::{quasi_shuffle, LinComb, Pairing, Word, WordsError};

/// Upper summation limit of a Z-sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Upper {
    Finite(u64),
    Infinity,
}

/// The letter `(m, x)` standing for the summand `x^i / i^m`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZLetter {
    pub m: u32,
    pub x: Q,
}

impl ZLetter {
    pub fn new(m: u32, x: Q) -> Self {
        ZLetter { m, x }
    }
}

impl fmt::Display for ZLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{}]", self.m, format_rational(&self.x))
    }
}

/// Pointwise product of summands: `(m_a, x_a)(m_b, x_b) -> (m_a + m_b, x_a x_b)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZPairing;

impl Pairing<ZLetter> for ZPairing {
    fn pair(&self, a: &ZLetter, b: &ZLetter) -> Result<Option<ZLetter>, WordsError> {
        Ok(Some(ZLetter::new(a.m + b.m, &a.x * &b.x)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSum {
    pub n: Upper,
    pub word: Word<ZLetter>,
}

impl ZSum {
    pub fn new(n: Upper, m: &[u32], x: &[Q]) -> Self {
        let letters = m.iter().zip(x).map(|(&mi, xi)| ZLetter::new(mi, xi.clone())).collect();
        ZSum {
            n,
            word: Word::new(letters),
        }
    }

    pub fn indices(&self) -> Vec<u32> {
        self.word.letters().iter().map(|l| l.m).collect()
    }

    pub fn scales(&self) -> Vec<Q> {
        self.word.letters().iter().map(|l| l.x.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZValue {
    Exact(Q),
    Numeric(C64),
}

impl ZValue {
    pub fn to_c64(&self) -> C64 {
        match self {
            ZValue::Exact(q) => C64::new(to_f64(q), 0.0),
            ZValue::Numeric(v) => *v,
        }
    }
}

/// `Z(n; m; x) = Σ_{n >= i1 > ... > ik > 0} Π x_j^{i_j} / i_j^{m_j}`, exactly.
/// The empty index gives 1.
pub fn zsum_exact(n: u64, m: &[u32], x: &[Q]) -> Q {
    assert_eq!(m.len(), x.len());
    let k = m.len();
    if k == 0 {
        return Q::one();
    }
    // s[j] = Z(i; m_j.., x_j..) for the current i, innermost last
    let mut s = vec![Q::zero(); k];
    let mut pw = vec![Q::one(); k];
    for i in 1..=n {
        let iq = Q::from_integer(i.into());
        for p in pw.iter_mut().zip(x) {
            *p.0 *= p.1;
        }
        // outer levels first so they see Z(i-1) of the inner level
        for j in 0..k {
            let inner = if j + 1 < k { s[j + 1].clone() } else { Q::one() };
            if inner.is_zero() {
                continue;
            }
            let mut den = Q::one();
            for _ in 0..m[j] {
                den *= &iq;
            }
            let add = &pw[j] * inner / den;
            s[j] += add;
        }
    }
    s.swap_remove(0)
}

/// Z-sum value: exact for finite `n`, the multiple polylogarithm for `n = ∞`.
pub fn zsum(n: Upper, m: &[u32], x: &[Q], rel_tol: f64) -> Result<ZValue, PolylogError> {
    if m.len() != x.len() {
        return Err(PolylogError::Domain("index and scale lengths differ".into()));
    }
    if m.contains(&0) {
        return Err(PolylogError::Domain("indices must be positive".into()));
    }
    match n {
        Upper::Finite(n) => Ok(ZValue::Exact(zsum_exact(n, m, x))),
        Upper::Infinity => {
            let xs: Vec<C64> = x.iter().map(|q| C64::new(to_f64(q), 0.0)).collect();
            Ok(ZValue::Numeric(li_series(m, &xs, rel_tol)?))
        }
    }
}

/// Product of two Z-sums with the same upper limit as a linear combination
/// of Z-sum words (quasi-shuffle with pointwise pairing).
pub fn zsum_product(u: &ZSum, v: &ZSum) -> Result<(Upper, LinComb<ZLetter>), PolylogError> {
    if u.n != v.n {
        return Err(PolylogError::Domain(format!(
            "Z-sum product needs equal upper limits ({:?} vs {:?})",
            u.n, v.n
        )));
    }
    let prod = quasi_shuffle(&u.word, &v.word, &ZPairing).map_err(|e| PolylogError::Domain(e.to_string()))?;
    Ok((u.n, prod))
}
