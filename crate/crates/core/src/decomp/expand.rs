use std::collections::BTreeMap;

use num_traits::Zero;

use super::{DecompError, FiniteIntegrand, FiniteTerm, PoleTerm};
use crate::poly::Poly;
use crate::rational::{factorial, Q};

/// Laurent coefficients of `coeff · Π 1/(α + β ε)` up to `target`.
fn laurent_prefactor(t: &PoleTerm, target: i32) -> BTreeMap<i32, Q> {
    let lo = t.min_order();
    let len = (target - lo).max(-1) + 1;
    let mut series: BTreeMap<i32, Q> = BTreeMap::new();
    series.insert(0, t.coeff.clone());
    for p in &t.poles {
        let alpha = Q::from_integer(p.a.into());
        let beta = Q::from_integer(p.b.into());
        let factor: Vec<(i32, Q)> = if p.a == 0 {
            vec![(-1, beta.recip())]
        } else {
            let ratio = -(&beta / &alpha);
            let mut c = alpha.recip();
            (0..len)
                .map(|m| {
                    let out = (m, c.clone());
                    c *= &ratio;
                    out
                })
                .collect()
        };
        let mut next: BTreeMap<i32, Q> = BTreeMap::new();
        for (o, c) in &series {
            for (m, f) in &factor {
                let k = o + m;
                // later poles lower the order by at most one each
                if k <= target - lo {
                    *next.entry(k).or_insert_with(Q::zero) += c * f;
                }
            }
        }
        series = next;
    }
    series.retain(|&o, c| o <= target && !c.is_zero());
    series
}

/// All multi-indices of the given length summing to `k`.
fn compositions(len: usize, k: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in compositions(len - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

enum LogSource {
    Var(usize, Q),
    Poly(usize, Q),
}

/// Expands a pole term in ε through `target`, giving one finite integrand
/// per order. `t^{bε}` and `P^{fε}` become exponential series in logarithms;
/// the pole prefactor is expanded exactly.
pub fn expand_eps(term: &PoleTerm, target: i32) -> Result<BTreeMap<i32, FiniteIntegrand>, DecompError> {
    for (i, e) in term.var_exps.iter().enumerate() {
        if e.a < 0 {
            return Err(DecompError::ClassM(format!("x{} still carries a pole", i + 1)));
        }
    }
    let dim = term.dim;
    let np = term.polys.len();
    let mut mono = vec![0u32; dim];
    for (slot, e) in mono.iter_mut().zip(&term.var_exps) {
        *slot = e.a as u32;
    }
    let mono = Poly::monomial(mono, Q::from_integer(1.into()));
    let mut sources = Vec::new();
    for (i, e) in term.var_exps.iter().enumerate() {
        if e.b != 0 {
            sources.push(LogSource::Var(i, Q::from_integer(e.b.into())));
        }
    }
    for (j, e) in term.poly_exps.iter().enumerate() {
        if e.b != 0 {
            sources.push(LogSource::Poly(j, Q::from_integer(e.b.into())));
        }
    }

    let mut per_order: BTreeMap<i32, Vec<FiniteTerm>> = BTreeMap::new();
    for (o, c) in laurent_prefactor(term, target) {
        let budget = (target - o) as u32;
        for piece in &term.pieces {
            let powers: Vec<i64> = (0..np).map(|j| term.poly_exps[j].a + piece.shifts[j]).collect();
            for (g, num) in piece.num.iter().enumerate() {
                let g = g as u32;
                if g > budget || num.is_zero() {
                    continue;
                }
                let base = &(num * &mono).scale(&c);
                for k in 0..=(budget - g) {
                    for kappa in compositions(sources.len(), k) {
                        let mut w = Q::from_integer(1.into());
                        let mut var_logs = vec![0u32; dim];
                        let mut poly_logs = vec![0u32; np];
                        for (src, &kk) in sources.iter().zip(&kappa) {
                            if kk == 0 {
                                continue;
                            }
                            let (lam, slot) = match src {
                                LogSource::Var(i, b) => (b, &mut var_logs[*i]),
                                LogSource::Poly(j, f) => (f, &mut poly_logs[*j]),
                            };
                            *slot = kk;
                            for _ in 0..kk {
                                w *= lam;
                            }
                            w /= factorial(kk);
                        }
                        per_order.entry(o + (g + k) as i32).or_default().push(FiniteTerm {
                            numerator: base.scale(&w),
                            poly_powers: powers.clone(),
                            var_logs,
                            poly_logs,
                        });
                    }
                }
            }
        }
    }
    per_order
        .into_iter()
        .map(|(o, terms)| Ok((o, FiniteIntegrand::new(dim, term.polys.clone(), terms)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{extract_poles, Factor, SectorIntegrand};
    use crate::graphpoly::EpsExponent;
    use crate::rational::q;

    #[test]
    fn pole_times_power() {
        // (1/ε) x^ε
        let t = PoleTerm {
            coeff: q(1),
            poles: vec![EpsExponent::new(0, 1)],
            dim: 1,
            var_exps: vec![EpsExponent::new(0, 1)],
            polys: vec![],
            poly_exps: vec![],
            pieces: vec![crate::decomp::Piece {
                shifts: vec![],
                num: vec![Poly::one(1)],
            }],
        };
        let e = expand_eps(&t, 0).unwrap();
        assert_eq!(e.keys().copied().collect::<Vec<_>>(), vec![-1, 0]);
        assert_eq!(e[&-1].split_constant().0, q(1));
        let x: f64 = 0.3;
        assert!((e[&0].eval_f64(&[x]) - x.ln()).abs() < 1e-15);
    }

    #[test]
    fn power_of_polynomial() {
        let p = &Poly::one(1) + &Poly::var(1, 0);
        let s = SectorIntegrand::new(
            vec![EpsExponent::ZERO],
            vec![Factor::new(p, EpsExponent::new(0, 2))],
            q(1),
        );
        let terms = extract_poles(&s, 1).unwrap();
        let e = expand_eps(&terms[0], 1).unwrap();
        assert!((e[&0].eval_f64(&[0.4]) - 1.0).abs() < 1e-15);
        assert!((e[&1].eval_f64(&[0.4]) - 2.0 * 1.4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bubble_sector() {
        let p = &Poly::one(1) + &Poly::var(1, 0);
        let s = SectorIntegrand::new(
            vec![EpsExponent::new(0, -1)],
            vec![Factor::new(p, EpsExponent::new(-2, 2))],
            q(1),
        );
        let terms = extract_poles(&s, 1).unwrap();
        assert_eq!(terms.len(), 1);
        let e = expand_eps(&terms[0], 1).unwrap();
        let t: f64 = 0.7;
        assert!((e[&0].eval_f64(&[t]) - (1.0 + t).powi(-2)).abs() < 1e-15);
        let o1 = (1.0 + t).powi(-2) * (2.0 * (1.0 + t).ln() - t.ln());
        assert!((e[&1].eval_f64(&[t]) - o1).abs() < 1e-15);
    }

    #[test]
    fn laurent_of_shifted_pole() {
        // 1/(1 - ε) = 1 + ε + ε² ...; 1/(2ε) · that
        let t = PoleTerm {
            coeff: q(1),
            poles: vec![EpsExponent::new(0, 2), EpsExponent::new(1, -1)],
            dim: 0,
            var_exps: vec![],
            polys: vec![],
            poly_exps: vec![],
            pieces: vec![],
        };
        let l = laurent_prefactor(&t, 2);
        assert_eq!(l.len(), 4);
        assert!(l.values().all(|v| *v == crate::rational::qf(1, 2)));
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(3, 2).len(), 6);
        assert_eq!(compositions(0, 0), vec![Vec::<u32>::new()]);
        assert!(compositions(0, 1).is_empty());
    }
}
