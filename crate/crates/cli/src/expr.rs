//! Prefix syntax for the `polylog` subcommand.
//!
//! ```text
//! Li(m1,...,mk; x1,...,xk)    multiple polylogarithm
//! G(z1,...,zk; y)             G-function
//! H(m1,...,mk; x)             harmonic polylogarithm
//! S(n,p; x)                   Nielsen polylogarithm
//! Li2(x) / Li2(x; above)      dilogarithm, side needed on the cut x > 1
//! Z(n; m1,...,mk; x1,...,xk)  Z-sum, n an integer or inf, x rational
//! ```
//!
//! Complex arguments use the `a+bi` form.

use feynsec::polylog::{
    g_func, hpl, li2_numeric, li_series, nielsen, zsum, BranchSide, PolylogError, Upper, ZValue, C64, REL_TOL,
};
use feynsec::rational::{format_rational, parse_rational, Q};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Q),
    Numeric { value: C64, error: f64 },
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn split_call(s: &str) -> Result<(&str, Vec<&str>), CliError> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| bad(format!("expected NAME(...), got {s:?}")))?;
    let body = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| bad(format!("missing closing parenthesis in {s:?}")))?;
    Ok((s[..open].trim(), body.split(';').map(str::trim).collect()))
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(|t| f(t.trim())).collect()
}

fn index(s: &str) -> Result<u32, CliError> {
    s.parse().map_err(|_| bad(format!("bad index {s:?}")))
}

fn complex(s: &str) -> Result<C64, CliError> {
    s.parse::<C64>().map_err(|_| bad(format!("bad number {s:?}")))
}

fn rational(s: &str) -> Result<Q, CliError> {
    parse_rational(s).map_err(|e| bad(e.to_string()))
}

fn arity(name: &str, groups: &[&str], n: usize) -> Result<(), CliError> {
    if groups.len() != n {
        return Err(bad(format!(
            "{name} takes {n} ';'-separated groups, got {}",
            groups.len()
        )));
    }
    Ok(())
}

fn single<T: Clone>(name: &str, v: Vec<T>) -> Result<T, CliError> {
    match v.as_slice() {
        [x] => Ok(x.clone()),
        _ => Err(bad(format!("{name} expects a single argument there"))),
    }
}

fn numeric(r: Result<C64, PolylogError>) -> Result<Value, CliError> {
    let value = r?;
    Ok(Value::Numeric {
        value,
        // truncation target of the series; rounding dominates below it
        error: (REL_TOL.max(f64::EPSILON) * value.norm()).max(f64::MIN_POSITIVE),
    })
}

pub fn evaluate(expr: &str) -> Result<Value, CliError> {
    let (name, g) = split_call(expr)?;
    match name {
        "Li" => {
            arity(name, &g, 2)?;
            numeric(li_series(&list(g[0], index)?, &list(g[1], complex)?, REL_TOL))
        }
        "G" => {
            arity(name, &g, 2)?;
            let y = single(name, list(g[1], complex)?)?;
            numeric(g_func(&list(g[0], complex)?, y, REL_TOL))
        }
        "H" => {
            arity(name, &g, 2)?;
            let x = single(name, list(g[1], complex)?)?;
            numeric(hpl(&list(g[0], index)?, x, REL_TOL))
        }
        "S" => {
            arity(name, &g, 2)?;
            let np = list(g[0], index)?;
            let [n, p] = np[..] else {
                return Err(bad("S takes (n,p; x)"));
            };
            let x = single(name, list(g[1], complex)?)?;
            numeric(nielsen(n, p, x, REL_TOL))
        }
        "Li2" => {
            let x = single(name, list(g[0], complex)?)?;
            let side = match g.get(1).copied() {
                None => None,
                Some("above") => Some(BranchSide::Above),
                Some("below") => Some(BranchSide::Below),
                Some(other) => return Err(bad(format!("side must be above or below, got {other:?}"))),
            };
            numeric(li2_numeric(x, side))
        }
        "Z" => {
            arity(name, &g, 3)?;
            let n = match g[0] {
                "inf" => Upper::Infinity,
                s => Upper::Finite(s.parse().map_err(|_| bad(format!("bad upper limit {s:?}")))?),
            };
            match zsum(n, &list(g[1], index)?, &list(g[2], rational)?, REL_TOL)? {
                ZValue::Exact(q) => Ok(Value::Exact(q)),
                ZValue::Numeric(v) => numeric(Ok(v)),
            }
        }
        other => Err(bad(format!("unknown function {other:?}"))),
    }
}

impl Value {
    pub fn text(&self) -> String {
        match self {
            Value::Exact(q) => format!("{} 0.0", format_rational(q)),
            Value::Numeric { value, error } => format!("{:?} {:?} {:?}", value.re, value.im, error),
        }
    }

    pub fn json(&self) -> serde_json::Value {
        match self {
            Value::Exact(q) => serde_json::json!({ "exact": format_rational(q), "error": 0.0 }),
            Value::Numeric { value, error } => serde_json::json!({ "re": value.re, "im": value.im, "error": error }),
        }
    }
}
