use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{positive_constant, DecompError};
use crate::poly::{CompiledPoly, Poly};
use crate::rational::Q;

/// `numerator · Π_j P_j^{poly_powers_j} · Π_i ln^{var_logs_i} t_i · Π_j ln^{poly_logs_j} P_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTerm {
    pub numerator: Poly,
    pub poly_powers: Vec<i64>,
    pub var_logs: Vec<u32>,
    pub poly_logs: Vec<u32>,
}

type TermKey = (Vec<i64>, Vec<u32>, Vec<u32>);

/// Finite integrand over `[0,1]^dim`. Only polynomials with positive
/// constant term can appear, raised to integer powers or under a logarithm,
/// so every value of this type is a rational function times logarithms of
/// rational functions with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteIntegrand {
    dim: usize,
    polys: Vec<Poly>,
    terms: Vec<FiniteTerm>,
}

impl FiniteIntegrand {
    pub fn new(dim: usize, polys: Vec<Poly>, terms: Vec<FiniteTerm>) -> Result<Self, DecompError> {
        for p in &polys {
            if p.nvars() != dim {
                return Err(DecompError::ClassM(format!("polynomial {p} has the wrong arity")));
            }
            if !positive_constant(p) {
                return Err(DecompError::ClassM(format!(
                    "polynomial {p} lacks a positive constant term"
                )));
            }
        }
        for t in &terms {
            if t.numerator.nvars() != dim
                || t.poly_powers.len() != polys.len()
                || t.poly_logs.len() != polys.len()
                || t.var_logs.len() != dim
            {
                return Err(DecompError::ClassM("term shape does not match the integrand".into()));
            }
        }
        let mut acc: BTreeMap<TermKey, Poly> = BTreeMap::new();
        for t in terms {
            let key = (t.poly_powers, t.var_logs, t.poly_logs);
            let slot = acc.entry(key).or_insert_with(|| Poly::zero(dim));
            *slot = &*slot + &t.numerator;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, n)| !n.is_zero())
            .map(|((poly_powers, var_logs, poly_logs), numerator)| FiniteTerm {
                numerator,
                poly_powers,
                var_logs,
                poly_logs,
            })
            .collect();
        Ok(FiniteIntegrand { dim, polys, terms })
    }

    pub fn zero(dim: usize) -> Self {
        FiniteIntegrand {
            dim,
            polys: Vec::new(),
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn terms(&self) -> &[FiniteTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn padded(&self, dim: usize) -> FiniteIntegrand {
        let pad = |p: &Poly| {
            let mut p = p.clone();
            while p.nvars() < dim {
                p = p.push_var();
            }
            p
        };
        FiniteIntegrand {
            dim,
            polys: self.polys.iter().map(pad).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut var_logs = t.var_logs.clone();
                    var_logs.resize(dim, 0);
                    FiniteTerm {
                        numerator: pad(&t.numerator),
                        poly_powers: t.poly_powers.clone(),
                        var_logs,
                        poly_logs: t.poly_logs.clone(),
                    }
                })
                .collect(),
        }
    }

    /// Sum of two integrands; the smaller one is extended by variables it
    /// does not depend on, which integrate to 1.
    pub fn add(&self, other: &FiniteIntegrand) -> FiniteIntegrand {
        let dim = self.dim.max(other.dim);
        let a = self.padded(dim);
        let b = other.padded(dim);
        let mut polys = a.polys.clone();
        let remap: Vec<usize> = b
            .polys
            .iter()
            .map(|p| match polys.iter().position(|x| x == p) {
                Some(k) => k,
                None => {
                    polys.push(p.clone());
                    polys.len() - 1
                }
            })
            .collect();
        let np = polys.len();
        let widen = |t: &FiniteTerm, map: &dyn Fn(usize) -> usize| {
            let mut poly_powers = vec![0; np];
            let mut poly_logs = vec![0; np];
            for (j, (&pw, &lg)) in t.poly_powers.iter().zip(&t.poly_logs).enumerate() {
                poly_powers[map(j)] = pw;
                poly_logs[map(j)] = lg;
            }
            FiniteTerm {
                numerator: t.numerator.clone(),
                poly_powers,
                var_logs: t.var_logs.clone(),
                poly_logs,
            }
        };
        let mut terms: Vec<FiniteTerm> = a.terms.iter().map(|t| widen(t, &|j| j)).collect();
        terms.extend(b.terms.iter().map(|t| widen(t, &|j| remap[j])));
        FiniteIntegrand::new(dim, polys, terms).expect("sum of valid integrands is valid")
    }

    /// Splits off the terms that do not depend on any variable and have a
    /// rational value.
    pub fn split_constant(&self) -> (Q, FiniteIntegrand) {
        let mut exact = Q::zero();
        let mut rest = Vec::new();
        for t in &self.terms {
            match self.constant_value(t) {
                Some(v) => exact += v,
                None => rest.push(t.clone()),
            }
        }
        let f = FiniteIntegrand::new(self.dim, self.polys.clone(), rest).expect("subset of a valid integrand");
        (exact, f)
    }

    fn constant_value(&self, t: &FiniteTerm) -> Option<Q> {
        if !t.numerator.is_constant() || t.var_logs.iter().any(|&k| k > 0) {
            return None;
        }
        let mut v = t.numerator.constant_term();
        for (j, p) in self.polys.iter().enumerate() {
            if t.poly_powers[j] == 0 && t.poly_logs[j] == 0 {
                continue;
            }
            if !p.is_constant() {
                return None;
            }
            let c = p.constant_term();
            if t.poly_logs[j] > 0 {
                if c.is_one() {
                    return Some(Q::zero());
                }
                return None;
            }
            let k = t.poly_powers[j];
            let base = if k < 0 { c.recip() } else { c };
            for _ in 0..k.unsigned_abs() {
                v *= &base;
            }
        }
        Some(v)
    }

    pub fn compile(&self) -> CompiledIntegrand {
        let poly_log_needed: Vec<bool> = (0..self.polys.len())
            .map(|j| self.terms.iter().any(|t| t.poly_logs[j] > 0))
            .collect();
        let var_log_needed: Vec<bool> = (0..self.dim)
            .map(|i| self.terms.iter().any(|t| t.var_logs[i] > 0))
            .collect();
        CompiledIntegrand {
            polys: self.polys.iter().map(|p| p.compile()).collect(),
            poly_log_needed,
            var_log_needed,
            terms: self
                .terms
                .iter()
                .map(|t| CompiledTerm {
                    numerator: t.numerator.compile(),
                    powers: nonzero(&t.poly_powers),
                    var_logs: nonzero(&t.var_logs),
                    poly_logs: nonzero(&t.poly_logs),
                })
                .collect(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.compile().eval(x, &mut Scratch::new(self))
    }
}

fn nonzero<T: Copy + Default + PartialEq + TryInto<i32>>(v: &[T]) -> Vec<(usize, i32)> {
    v.iter()
        .enumerate()
        .filter(|(_, &k)| k != T::default())
        .map(|(j, &k)| (j, k.try_into().ok().expect("power fits in i32")))
        .collect()
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    numerator: CompiledPoly,
    powers: Vec<(usize, i32)>,
    var_logs: Vec<(usize, i32)>,
    poly_logs: Vec<(usize, i32)>,
}

/// Floating-point evaluator of a [`FiniteIntegrand`].
#[derive(Clone, Debug)]
pub struct CompiledIntegrand {
    polys: Vec<CompiledPoly>,
    poly_log_needed: Vec<bool>,
    var_log_needed: Vec<bool>,
    terms: Vec<CompiledTerm>,
}

/// Per-thread buffers for [`CompiledIntegrand::eval`].
pub struct Scratch {
    pv: Vec<f64>,
    plog: Vec<f64>,
    xlog: Vec<f64>,
}

impl Scratch {
    pub fn new(f: &FiniteIntegrand) -> Self {
        Scratch {
            pv: vec![0.0; f.polys.len()],
            plog: vec![0.0; f.polys.len()],
            xlog: vec![0.0; f.dim],
        }
    }
}

impl CompiledIntegrand {
    pub fn scratch(&self) -> Scratch {
        Scratch {
            pv: vec![0.0; self.polys.len()],
            plog: vec![0.0; self.polys.len()],
            xlog: vec![0.0; self.var_log_needed.len()],
        }
    }

    pub fn eval(&self, x: &[f64], s: &mut Scratch) -> f64 {
        for (j, p) in self.polys.iter().enumerate() {
            s.pv[j] = p.eval(x);
            if self.poly_log_needed[j] {
                s.plog[j] = s.pv[j].ln();
            }
        }
        for (i, &need) in self.var_log_needed.iter().enumerate() {
            if need {
                s.xlog[i] = x[i].ln();
            }
        }
        let mut sum = 0.0;
        for t in &self.terms {
            let mut v = t.numerator.eval(x);
            for &(j, k) in &t.powers {
                v *= s.pv[j].powi(k);
            }
            for &(i, k) in &t.var_logs {
                v *= s.xlog[i].powi(k);
            }
            for &(j, k) in &t.poly_logs {
                v *= s.plog[j].powi(k);
            }
            sum += v;
        }
        sum
    }
}
