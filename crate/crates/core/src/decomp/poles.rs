use std::collections::BTreeMap;

use num_traits::Zero;

use super::{DecompError, SectorIntegrand};
use crate::graphpoly::EpsExponent;
use crate::poly::Poly;
use crate::rational::{factorial, Q};

/// `num(ε) · Π_j P_j^{d_j + shift_j + f_j ε}`, with `num[k]` the coefficient
/// of `ε^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub shifts: Vec<i64>,
    pub num: Vec<Poly>,
}

/// `coeff · Π_k 1/(α_k + β_k ε) · ∫ Π t_i^{a_i + b_i ε} · Σ pieces`.
///
/// Variables that were set to zero keep their slot with exponent zero;
/// the integrand no longer depends on them. Remainder variables introduced
/// by the Taylor step are appended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleTerm {
    pub coeff: Q,
    pub poles: Vec<EpsExponent>,
    pub dim: usize,
    pub var_exps: Vec<EpsExponent>,
    pub polys: Vec<Poly>,
    pub poly_exps: Vec<EpsExponent>,
    pub pieces: Vec<Piece>,
}

impl PoleTerm {
    fn from_sector(s: &SectorIntegrand) -> PoleTerm {
        PoleTerm {
            coeff: s.prefactor.clone(),
            poles: Vec::new(),
            dim: s.dim,
            var_exps: s.monomial.clone(),
            polys: s.factors.iter().map(|f| f.poly.clone()).collect(),
            poly_exps: s.factors.iter().map(|f| f.exp).collect(),
            pieces: vec![Piece {
                shifts: vec![0; s.factors.len()],
                num: vec![Poly::one(s.dim)],
            }],
        }
    }

    /// Lowest ε order the term can reach.
    pub fn min_order(&self) -> i32 {
        -(self.poles.iter().filter(|p| p.a == 0).count() as i32)
    }

    fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }
}

fn merge(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut acc: BTreeMap<Vec<i64>, Vec<Poly>> = BTreeMap::new();
    for p in pieces {
        let slot = acc.entry(p.shifts).or_default();
        for (k, c) in p.num.into_iter().enumerate() {
            if slot.len() <= k {
                slot.push(Poly::zero(c.nvars()));
            }
            slot[k] = &slot[k] + &c;
        }
    }
    acc.into_iter()
        .filter_map(|(shifts, mut num)| {
            while num.last().is_some_and(|p| p.is_zero()) {
                num.pop();
            }
            (!num.is_empty()).then_some(Piece { shifts, num })
        })
        .collect()
}

/// `∂/∂t_i` of `Σ pieces`.
fn derivative(t: &PoleTerm, i: usize) -> Vec<Piece> {
    let dq: Vec<Poly> = t.polys.iter().map(|p| p.derivative(i)).collect();
    let mut out = Vec::new();
    for piece in &t.pieces {
        out.push(Piece {
            shifts: piece.shifts.clone(),
            num: piece.num.iter().map(|n| n.derivative(i)).collect(),
        });
        for (j, d) in dq.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let e = t.poly_exps[j];
            let lead = Q::from_integer((e.a + piece.shifts[j]).into());
            let eps = Q::from_integer(e.b.into());
            let mut num = vec![Poly::zero(t.dim); piece.num.len() + 1];
            for (k, n) in piece.num.iter().enumerate() {
                let nd = n * d;
                num[k] = &num[k] + &nd.scale(&lead);
                num[k + 1] = &num[k + 1] + &nd.scale(&eps);
            }
            let mut shifts = piece.shifts.clone();
            shifts[j] -= 1;
            out.push(Piece { shifts, num });
        }
    }
    merge(out)
}

/// Subtracts the Taylor expansion at `t_i = 0` from every variable whose
/// exponent has integer part `<= -1` (ascending index order) and integrates
/// the subtracted terms. The remainder of depth `q` is written as
/// `t^{bε} (1/(q-1)!) ∫_0^1 du (1-u)^{q-1} ∂^q R(u t)`, with `u` a new
/// variable, so denominators keep their constant terms.
pub fn extract_poles(s: &SectorIntegrand, target_order: i32) -> Result<Vec<PoleTerm>, DecompError> {
    let mut work = vec![PoleTerm::from_sector(s)];
    for i in 0..s.dim {
        let mut next = Vec::with_capacity(work.len());
        for term in work {
            let e = term.var_exps[i];
            if e.a > -1 {
                next.push(term);
                continue;
            }
            if e.b == 0 {
                return Err(DecompError::Divergent(i + 1, e));
            }
            let depth = (-e.a) as u32;
            let mut r = term.clone();
            for p in 0..depth {
                let mut pole = r.clone();
                pole.polys = r.polys.iter().map(|x| x.substitute(i, &Q::zero())).collect();
                pole.pieces = merge(
                    r.pieces
                        .iter()
                        .map(|pc| Piece {
                            shifts: pc.shifts.clone(),
                            num: pc.num.iter().map(|n| n.substitute(i, &Q::zero())).collect(),
                        })
                        .collect(),
                );
                pole.coeff = &pole.coeff / factorial(p);
                pole.poles.push(EpsExponent::new(e.a + p as i64 + 1, e.b));
                pole.var_exps[i] = EpsExponent::ZERO;
                if !pole.is_zero() {
                    next.push(pole);
                }
                r.pieces = derivative(&r, i);
            }
            if r.is_zero() {
                continue;
            }
            let u = r.dim;
            r.dim += 1;
            r.var_exps.push(EpsExponent::ZERO);
            r.var_exps[i] = EpsExponent::new(0, e.b);
            r.polys = r.polys.iter().map(|x| x.push_var().scale_var(i, u)).collect();
            let one_minus_u = (&Poly::one(u + 1) - &Poly::var(u + 1, u)).pow(depth - 1);
            for pc in r.pieces.iter_mut() {
                for n in pc.num.iter_mut() {
                    *n = &n.push_var().scale_var(i, u) * &one_minus_u;
                }
            }
            r.coeff = &r.coeff / factorial(depth - 1);
            next.push(r);
        }
        work = next;
    }
    Ok(work.into_iter().filter(|t| t.min_order() <= target_order).collect())
}

impl PoleTerm {
    /// Exact value of the pole prefactor at a numeric ε (tests and debugging).
    pub fn prefactor_f64(&self, eps: f64) -> f64 {
        let mut v = crate::rational::to_f64(&self.coeff);
        for p in &self.poles {
            v /= p.a as f64 + p.b as f64 * eps;
        }
        v
    }

    /// Integrand value without the pole prefactor at a numeric ε.
    pub fn eval_f64(&self, t: &[f64], eps: f64) -> f64 {
        let mut v = 1.0;
        for (x, e) in t.iter().zip(&self.var_exps) {
            if !e.is_zero() {
                v *= x.powf(e.a as f64 + e.b as f64 * eps);
            }
        }
        let vals: Vec<f64> = self.polys.iter().map(|p| p.eval_f64(t)).collect();
        let mut sum = 0.0;
        for pc in &self.pieces {
            let mut n = 0.0;
            for (k, c) in pc.num.iter().enumerate() {
                n += c.eval_f64(t) * eps.powi(k as i32);
            }
            for (j, val) in vals.iter().enumerate() {
                let e = self.poly_exps[j];
                n *= val.powf((e.a + pc.shifts[j]) as f64 + e.b as f64 * eps);
            }
            sum += n;
        }
        v * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::Factor;
    use crate::rational::q;

    #[test]
    fn simple_pole() {
        // ∫ x^{-1+ε} = 1/ε
        let s = SectorIntegrand::new(vec![EpsExponent::new(-1, 1)], vec![], q(1));
        let t = extract_poles(&s, 0).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].poles, vec![EpsExponent::new(0, 1)]);
        assert_eq!(t[0].coeff, q(1));
    }

    #[test]
    fn single_subtraction() {
        // ∫ x^{-1-ε} (1+x)^{-1}: pole -f(0)/ε plus the subtracted remainder
        let x = Poly::var(1, 0);
        let s = SectorIntegrand::new(
            vec![EpsExponent::new(-1, -1)],
            vec![Factor::new(&Poly::one(1) + &x, EpsExponent::new(-1, 0))],
            q(1),
        );
        let t = extract_poles(&s, 1).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].poles, vec![EpsExponent::new(0, -1)]);
        assert_eq!(t[0].eval_f64(&[0.3], 0.0), 1.0);
        // remainder at ε = 0: ∫_0^1 du -(1+u x)^{-2} = -1/(1+x)
        let v = t[1].eval_f64(&[0.5, 0.25], 0.0);
        assert!((v + 1.0 / (1.125f64).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn unregulated_pole_is_an_error() {
        let s = SectorIntegrand::new(vec![EpsExponent::new(-1, 0)], vec![], q(1));
        assert!(matches!(extract_poles(&s, 0), Err(DecompError::Divergent(1, _))));
    }
}
