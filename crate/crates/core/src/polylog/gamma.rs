use super::series::TruncSeries;
use super::zsum::zsum_exact;
use super::{c, li_series, REL_TOL};
use crate::rational::{q, Q};

/// Euler-Mascheroni constant.
pub fn euler_gamma() -> f64 {
    0.577_215_664_901_532_9
}

/// ζ(k) for k >= 2.
pub fn zeta(k: u32) -> f64 {
    assert!(k >= 2, "zeta({k}) diverges");
    li_series(&[k], &[c(1.0)], REL_TOL)
        .expect("zeta values are inside the convergent region")
        .re
}

/// Coefficients of `Γ(n+ε) / (Γ(1+ε) Γ(n))` through `ε^order`:
/// `1 + ε Z_1(n-1) + ε² Z_{11}(n-1) + ...` with Euler-Zagier sums.
pub fn gamma_expansion(n: u32, order: usize) -> Vec<Q> {
    assert!(n >= 1, "gamma_expansion needs n >= 1");
    (0..=order)
        .map(|k| {
            if k == 0 {
                q(1)
            } else {
                zsum_exact((n - 1) as u64, &vec![1; k], &vec![q(1); k])
            }
        })
        .collect()
}

/// `Γ(1+ε) = exp(-γ ε + Σ_{k>=2} (-1)^k ζ_k ε^k / k)` through `ε^order`.
pub fn gamma1p_series(order: usize) -> TruncSeries {
    let mut arg = vec![0.0; order + 1];
    if order >= 1 {
        arg[1] = -euler_gamma();
    }
    for k in 2..=order {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        arg[k] = sign * zeta(k as u32) / k as f64;
    }
    TruncSeries::new(0, arg).exp()
}
