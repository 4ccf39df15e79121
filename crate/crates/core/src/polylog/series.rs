//! Truncated Laurent series in ε with floating-point coefficients, used to
//! assemble analytic reference values.

/// `Σ_{k=lo}^{hi} c_k ε^k`; everything above `hi` is unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries {
    lo: i32,
    coeffs: Vec<f64>,
}

impl TruncSeries {
    pub fn new(lo: i32, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one known order");
        TruncSeries { lo, coeffs }
    }

    pub fn constant(v: f64, hi: i32) -> Self {
        let mut c = vec![0.0; (hi + 1).max(1) as usize];
        c[0] = v;
        TruncSeries::new(0, c)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> f64 {
        assert!(k <= self.hi(), "order {k} beyond truncation {}", self.hi());
        if k < self.lo {
            0.0
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    pub fn mul(&self, o: &TruncSeries) -> TruncSeries {
        let lo = self.lo + o.lo;
        let hi = (self.hi() + o.lo).min(o.hi() + self.lo);
        let mut c = vec![0.0; (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k < c.len() {
                    c[k] += a * b;
                }
            }
        }
        TruncSeries::new(lo, c)
    }

    /// Reciprocal; the leading coefficient must be nonzero.
    pub fn inv(&self) -> TruncSeries {
        let a0 = self.coeffs[0];
        assert!(a0 != 0.0, "reciprocal of a series with vanishing leading term");
        let n = self.coeffs.len();
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a0;
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.coeffs[j] * b[k - j];
            }
            b[k] = -s / a0;
        }
        TruncSeries::new(-self.lo, b)
    }

    pub fn div(&self, o: &TruncSeries) -> TruncSeries {
        self.mul(&o.inv())
    }

    /// `exp` of a series without negative orders.
    pub fn exp(&self) -> TruncSeries {
        assert!(self.lo >= 0, "exp of a series with poles");
        let hi = self.hi();
        let c0 = self.coeff(0);
        // strip the constant, exponentiate the rest by the power series
        let mut rest = vec![0.0; (hi + 1) as usize];
        for k in 1..=hi {
            rest[k as usize] = self.coeff(k);
        }
        let r = TruncSeries::new(0, rest);
        let mut acc = TruncSeries::constant(1.0, hi);
        let mut power = TruncSeries::constant(1.0, hi);
        let mut fact = 1.0;
        for k in 1..=hi.max(0) {
            power = power.mul(&r);
            fact *= k as f64;
            for (a, p) in acc.coeffs.iter_mut().zip(&power.coeffs) {
                *a += p / fact;
            }
        }
        let e0 = c0.exp();
        TruncSeries::new(0, acc.coeffs.iter().map(|v| v * e0).collect())
    }

    /// Substitutes `ε -> a ε`.
    pub fn scale_arg(&self, a: f64) -> TruncSeries {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, v)| v * a.powi(self.lo + i as i32))
            .collect();
        TruncSeries::new(self.lo, c)
    }

    /// Multiplies by `ε^k`.
    pub fn shift(&self, k: i32) -> TruncSeries {
        TruncSeries::new(self.lo + k, self.coeffs.clone())
    }
}
