//! Iterated sector decomposition: simplex integrals are split into primary
//! sectors, blown up until every polynomial factor has a nonzero constant
//! term, stripped of their poles, and expanded in ε into finite integrands.

mod expand;
mod finite;
mod poles;
mod sector;

pub use expand::expand_eps;
pub use finite::{CompiledIntegrand, FiniteIntegrand, FiniteTerm};
pub use poles::{extract_poles, Piece, PoleTerm};
pub use sector::{decompose_step, iterate_decomposition, DEFAULT_CAP};

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graphpoly::{EpsExponent, ParamIntegral};
use crate::hironaka::GameError;
use crate::poly::Poly;
use crate::rational::{format_rational, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompError {
    #[error("malformed integral: {0}")]
    Malformed(String),
    #[error("factor {0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("integrand has degree {0}, expected -{1}")]
    WrongDegree(EpsExponent, usize),
    #[error("factor {0} is not positive inside the domain")]
    NonPositive(String),
    #[error("strategy failure after {steps} blow-ups at sector {sector}; Newton points {newton}")]
    StrategyFailure {
        steps: usize,
        sector: String,
        newton: String,
    },
    #[error("strategy: {0}")]
    Game(#[from] GameError),
    #[error("x{0}^({1}) is not regulated by ε")]
    Divergent(usize, EpsExponent),
    #[error("class-M violation: {0}")]
    ClassM(String),
}

/// A polynomial raised to `a + b ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub poly: Poly,
    pub exp: EpsExponent,
}

impl Factor {
    pub fn new(poly: Poly, exp: EpsExponent) -> Self {
        Factor { poly, exp }
    }
}

/// How positivity of the factors on the open simplex was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    /// Nonzero homogeneous polynomials with nonnegative coefficients.
    Certified,
    /// No sign change found by dense sampling; not a proof.
    Sampled,
}

/// `∫ d^n x δ(1 - Σx) Π x_i^{a_i + b_i ε} Π P_j^{d_j + f_j ε}` over the simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralIntegral {
    pub n: usize,
    pub monomial: Vec<EpsExponent>,
    pub factors: Vec<Factor>,
}

impl GeneralIntegral {
    pub fn new(monomial: Vec<EpsExponent>, factors: Vec<Factor>) -> Result<Self, DecompError> {
        let n = monomial.len();
        if n == 0 {
            return Err(DecompError::Malformed("no integration variables".into()));
        }
        for f in &factors {
            if f.poly.nvars() != n {
                return Err(DecompError::Malformed(format!(
                    "factor {} has {} variables, expected {n}",
                    f.poly,
                    f.poly.nvars()
                )));
            }
            if f.poly.is_zero() {
                return Err(DecompError::Malformed("zero polynomial factor".into()));
            }
        }
        Ok(GeneralIntegral { n, monomial, factors })
    }

    pub fn from_param(p: &ParamIntegral) -> Self {
        GeneralIntegral {
            n: p.n,
            monomial: p.monomial.clone(),
            factors: vec![
                Factor::new(p.u.poly.clone(), p.u_exp),
                Factor::new(p.f.poly.clone(), p.f_exp),
            ],
        }
    }

    /// Degree of the integrand under a common rescaling of all variables,
    /// or `None` if some factor is inhomogeneous.
    pub fn total_degree(&self) -> Option<EpsExponent> {
        let mut d = self.monomial.iter().fold(EpsExponent::ZERO, |acc, e| acc + *e);
        for f in &self.factors {
            let k = f.poly.homogeneous_degree()?;
            d = d + f.exp.scaled(k as i64);
        }
        Some(d)
    }

    pub fn check_positivity(&self) -> Result<Positivity, DecompError> {
        let mut verdict = Positivity::Certified;
        for f in &self.factors {
            let homogeneous = f.poly.homogeneous_degree().is_some();
            if homogeneous && f.poly.has_nonnegative_coefficients() {
                continue;
            }
            verdict = Positivity::Sampled;
            let mut rng = ChaCha8Rng::seed_from_u64(0x51_3D_1E);
            let c = f.poly.compile();
            let mut x = vec![0.0; self.n];
            for _ in 0..4096 {
                let mut s = 0.0;
                for v in x.iter_mut() {
                    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                    *v = -u.ln();
                    s += *v;
                }
                for v in x.iter_mut() {
                    *v /= s;
                }
                if c.eval(&x) <= 0.0 {
                    return Err(DecompError::NonPositive(f.poly.to_string()));
                }
            }
        }
        Ok(verdict)
    }
}

/// Makes every factor homogeneous using `x_1 + ... + x_n = 1` on the simplex,
/// then appends a power of `x_1 + ... + x_n` so that the integrand has
/// degree `-n`. Graph-derived integrals come back unchanged.
pub fn homogenize(j: &GeneralIntegral) -> GeneralIntegral {
    let sum = Poly::linear_sum(j.n);
    let mut factors: Vec<Factor> = j
        .factors
        .iter()
        .map(|f| {
            let top = f.poly.total_degree().unwrap_or(0);
            if f.poly.homogeneous_degree().is_some() {
                return f.clone();
            }
            let mut out = Poly::zero(j.n);
            for (e, c) in f.poly.terms() {
                let d: u32 = e.iter().sum();
                let mono = Poly::monomial(e.clone(), c.clone());
                out = out + &mono * &sum.pow(top - d);
            }
            Factor::new(out, f.exp)
        })
        .collect();
    let mut h = GeneralIntegral {
        n: j.n,
        monomial: j.monomial.clone(),
        factors: factors.clone(),
    };
    let d = h.total_degree().expect("factors are homogeneous now");
    let missing = EpsExponent::new(-(j.n as i64) - d.a, -d.b);
    if !missing.is_zero() {
        factors.push(Factor::new(sum, missing));
        h.factors = factors;
    }
    h
}

/// One change of variables applied on the way to a sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Substitution {
    /// `x_l = 1` on the primary sector where `x_l` is largest (1-based).
    Primary(usize),
    /// `t_i -> t_l t_i` for `i` in `subset`, `i != l` (0-based).
    BlowUp { subset: Vec<usize>, l: usize },
}

/// `prefactor · ∫_{[0,1]^dim} Π t_i^{a_i + b_i ε} Π P_j^{d_j + f_j ε}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorIntegrand {
    pub dim: usize,
    pub monomial: Vec<EpsExponent>,
    pub factors: Vec<Factor>,
    pub prefactor: Q,
    pub trail: Vec<Substitution>,
}

impl SectorIntegrand {
    /// Builds a sector and moves monomial factors of the polynomials into
    /// the monomial exponents.
    pub fn new(monomial: Vec<EpsExponent>, factors: Vec<Factor>, prefactor: Q) -> Self {
        let mut s = SectorIntegrand {
            dim: monomial.len(),
            monomial,
            factors,
            prefactor,
            trail: Vec::new(),
        };
        s.normalize();
        s
    }

    pub(crate) fn normalize(&mut self) {
        let mut kept = Vec::with_capacity(self.factors.len());
        for mut f in std::mem::take(&mut self.factors) {
            let m = f.poly.min_exponents();
            if m.iter().any(|&k| k > 0) {
                for (slot, &k) in self.monomial.iter_mut().zip(&m) {
                    *slot = *slot + f.exp.scaled(k as i64);
                }
                f.poly = f.poly.divide_monomial(&m);
            }
            let trivial = f.exp.is_zero() || (f.poly.is_constant() && f.poly.constant_term().is_one());
            if !trivial {
                kept.push(f);
            }
        }
        self.factors = kept;
    }

    /// Every factor has a nonzero constant term.
    pub fn is_monomialised(&self) -> bool {
        self.factors.iter().all(|f| !f.poly.constant_term().is_zero())
    }

    /// Integrand value at a point of the open cube for a numeric ε.
    pub fn eval_f64(&self, t: &[f64], eps: f64) -> f64 {
        let mut v = crate::rational::to_f64(&self.prefactor);
        for (x, e) in t.iter().zip(&self.monomial) {
            v *= x.powf(e.a as f64 + e.b as f64 * eps);
        }
        for f in &self.factors {
            v *= f.poly.eval_f64(t).powf(f.exp.a as f64 + f.exp.b as f64 * eps);
        }
        v
    }
}

fn exp_string(e: &EpsExponent) -> String {
    e.to_string()
}

impl fmt::Display for SectorIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefactor.is_one() {
            write!(f, "pre={} ", format_rational(&self.prefactor))?;
        }
        let mono: Vec<String> = self.monomial.iter().map(exp_string).collect();
        let facs: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("({})^({})", x.poly, exp_string(&x.exp)))
            .collect();
        write!(f, "mono=[{}] factors=[{}]", mono.join(","), facs.join(" "))
    }
}

/// The `n` primary sectors of a homogeneous integral of degree `-n`.
pub fn primary_sectors(j: &GeneralIntegral) -> Result<Vec<SectorIntegrand>, DecompError> {
    for f in &j.factors {
        if f.poly.homogeneous_degree().is_none() {
            return Err(DecompError::NotHomogeneous(f.poly.to_string()));
        }
    }
    let d = j.total_degree().expect("checked above");
    if d != EpsExponent::new(-(j.n as i64), 0) {
        return Err(DecompError::WrongDegree(d, j.n));
    }
    let one = Q::one();
    Ok((0..j.n)
        .map(|l| {
            let mut mono = j.monomial.clone();
            mono.remove(l);
            let factors = j
                .factors
                .iter()
                .map(|f| Factor::new(f.poly.substitute(l, &one).remove_var(l), f.exp))
                .collect();
            let mut s = SectorIntegrand::new(mono, factors, Q::one());
            s.trail.push(Substitution::Primary(l + 1));
            s
        })
        .collect())
}

pub(crate) fn positive_constant(p: &Poly) -> bool {
    p.constant_term().is_positive()
}
