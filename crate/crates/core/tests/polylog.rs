use feynsec::polylog::{
    g_func, g_func_with, gamma_expansion, hoelder, hpl, li2_numeric, li_direct, li_series, nielsen, zeta, zsum,
    zsum_exact, zsum_product, GPath, PolylogError, Upper, ZSum, ZValue, C64, REL_TOL,
};
use feynsec::rational::{q, qf, Q};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

fn zeta2() -> f64 {
    PI * PI / 6.0
}

/// Complex point away from the real axis.
fn off_axis(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    let re = rng.gen_range(-r..r);
    let mut im: f64 = rng.gen_range(0.05..r);
    if rng.gen_bool(0.5) {
        im = -im;
    }
    C64::new(re, im)
}

fn li2(z: C64) -> C64 {
    li2_numeric(z, None).unwrap()
}

#[test]
fn li2_functional_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let z = off_axis(&mut rng, 3.0);
        let one = c(1.0);
        let lhs = li2(z) + li2(one - z);
        assert!(
            close(lhs, c(zeta2()) - z.ln() * (one - z).ln(), 1e-12),
            "reflection at {z}"
        );
        let lhs = li2(z) + li2(one / z);
        let l = (-z).ln();
        assert!(close(lhs, c(-zeta2()) - 0.5 * l * l, 1e-12), "inversion at {z}");
        let lhs = li2(z) + li2(z / (z - one));
        let l = (one - z).ln();
        assert!(close(lhs, -0.5 * l * l, 1e-12), "Landen at {z}");
        let w = z / (z.norm() + 0.5);
        assert!(close(li2(w) + li2(-w), 0.5 * li2(w * w), 1e-12), "duplication at {w}");
    }
    for k in 1..100 {
        let x = k as f64 / 100.0;
        let lhs = li2(c(x)) + li2(c(1.0 - x));
        assert!(
            close(lhs, c(zeta2() - x.ln() * (1.0 - x).ln()), 1e-12),
            "reflection at {x}"
        );
    }
}

#[test]
fn li2_matches_series_inside_half_disc() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let r = rng.gen_range(0.0..0.5);
        let t = rng.gen_range(0.0..2.0 * PI);
        let z = C64::from_polar(r, t);
        let direct = li_direct(&[2], &[z], REL_TOL).unwrap();
        assert!(
            (li2(z) - direct).norm() <= 1e-14 * direct.norm().max(1e-300) + 1e-300,
            "{z}"
        );
    }
}

/// Admissible letters for `G(·; 1)`: nonzero ones are off the segment (0, 1]
/// and far enough from 0 and 1 for both evaluation routes to converge.
fn letter(rng: &mut ChaCha8Rng, allow_zero: bool) -> C64 {
    if allow_zero && rng.gen_bool(0.25) {
        return c(0.0);
    }
    loop {
        let r = rng.gen_range(1.3..3.0);
        let t = rng.gen_range(0.0..2.0 * PI);
        let z = C64::from_polar(r, t);
        if (c(1.0) - z).norm() > 0.7 {
            return z;
        }
    }
}

fn word(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    let mut w: Vec<C64> = (0..len).map(|_| letter(rng, true)).collect();
    w[0] = letter(rng, false);
    w[len - 1] = letter(rng, false);
    w
}

#[test]
fn hoelder_at_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 1..=3 {
        for _ in 0..20 {
            let z = word(&mut rng, k);
            let (_, rhs) = hoelder(&z, 2.0, REL_TOL).unwrap();
            let direct = g_func_with(&z, c(1.0), REL_TOL, GPath::Direct).unwrap();
            assert!(close(rhs, direct, 1e-10), "{z:?}: {rhs} vs {direct}");
        }
    }
    // G(2; 1) = G(2; 1/2) - G(-1; 1/2) · G(; 1/2)
    let (lhs, rhs) = hoelder(&[c(2.0)], 2.0, REL_TOL).unwrap();
    assert!(close(lhs, c(-2f64.ln()), 1e-14));
    assert!(close(lhs, rhs, 1e-10));
    assert!(matches!(hoelder(&[c(1.0)], 2.0, REL_TOL), Err(PolylogError::Domain(_))));
    assert!(matches!(
        hoelder(&[c(2.0), c(0.0)], 2.0, REL_TOL),
        Err(PolylogError::Domain(_))
    ));
}

#[test]
fn g_derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    for _ in 0..60 {
        let k = rng.gen_range(1..=3);
        let y = rng.gen_range(0.3..0.8);
        let z: Vec<C64> = word(&mut rng, k);
        let g = |y: f64| g_func(&z, c(y), REL_TOL).unwrap();
        let numeric = (g(y + h) - g(y - h)) / (2.0 * h);
        let analytic = g_func(&z[1..], c(y), REL_TOL).unwrap() / (c(y) - z[0]);
        assert!(
            (numeric - analytic).norm() <= 1e-6 * analytic.norm().max(1.0),
            "{z:?} at {y}"
        );
    }
}

#[test]
fn li_and_g_round_trip() {
    let corpus: Vec<(Vec<u32>, Vec<C64>)> = vec![
        (vec![1], vec![c(0.5)]),
        (vec![2], vec![c(-0.6)]),
        (vec![3], vec![C64::new(0.3, 0.4)]),
        (vec![1, 1], vec![c(0.5), c(0.5)]),
        (vec![2, 1], vec![c(-0.7), c(0.9)]),
        (vec![1, 2], vec![C64::new(0.2, -0.5), c(1.0)]),
        (vec![2, 2], vec![c(0.4), c(-1.5)]),
        (vec![1, 1, 1], vec![c(0.3), c(-0.8), c(1.2)]),
        (vec![3, 1], vec![c(0.6), c(1.0)]),
    ];
    for (m, x) in corpus {
        let li = li_series(&m, &x, REL_TOL).unwrap();
        let mut z = Vec::new();
        let mut y = c(1.0);
        for (&mj, xj) in m.iter().zip(&x) {
            y *= xj;
            z.extend(std::iter::repeat_n(c(0.0), mj as usize - 1));
            z.push(c(1.0) / y);
        }
        let sign = if m.len() % 2 == 0 { 1.0 } else { -1.0 };
        let g = g_func_with(&z, c(1.0), REL_TOL, GPath::Hoelder).unwrap() * sign;
        assert!(close(li, g, 1e-8), "{m:?} {x:?}: {li} vs {g}");
    }
}

#[test]
fn g_shuffle_and_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let a = letter(&mut rng, false);
        let b = letter(&mut rng, false);
        let one = c(1.0);
        let lhs = g_func(&[a], one, REL_TOL).unwrap() * g_func(&[b], one, REL_TOL).unwrap();
        let rhs = g_func(&[a, b], one, REL_TOL).unwrap() + g_func(&[b, a], one, REL_TOL).unwrap();
        assert!(close(lhs, rhs, 1e-10), "{a} {b}");

        let z = word(&mut rng, 2);
        let y = c(rng.gen_range(0.4..1.0));
        let s = 2.0;
        let scaled: Vec<C64> = z.iter().map(|v| v * s).collect();
        let g1 = g_func(&z, y, REL_TOL).unwrap();
        let g2 = g_func(&scaled, y * s, REL_TOL).unwrap();
        assert!(close(g1, g2, 1e-12), "{z:?}");
    }
    let y: f64 = 0.37;
    let g00 = g_func(&[c(0.0), c(0.0)], c(y), REL_TOL).unwrap();
    assert!(close(g00, c(y.ln().powi(2) / 2.0), 1e-15));
    assert!(close(g_func(&[c(2.0)], c(1.0), REL_TOL).unwrap(), c(-2f64.ln()), 1e-14));
}

/// Brute-force `Z(n; m; x)` by enumerating `n >= i1 > ... > ik >= 1`.
fn brute(n: u64, m: &[u32], x: &[Q]) -> Q {
    fn go(upper: u64, m: &[u32], x: &[Q]) -> Q {
        if m.is_empty() {
            return Q::one();
        }
        let mut s = Q::zero();
        for i in 1..=upper {
            let mut t = Q::one();
            for _ in 0..i {
                t *= &x[0];
            }
            for _ in 0..m[0] {
                t /= Q::from_integer(i.into());
            }
            s += t * go(i - 1, &m[1..], &x[1..]);
        }
        s
    }
    go(n, m, x)
}

fn random_zsum(rng: &mut ChaCha8Rng, n: u64) -> ZSum {
    let k = rng.gen_range(1..=3);
    let m: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
    let x: Vec<Q> = (0..k)
        .map(|_| qf(rng.gen_range(-3..=3), rng.gen_range(1..=4)))
        .collect();
    ZSum::new(Upper::Finite(n), &m, &x)
}

#[test]
fn zsum_product_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=20u64 {
        for _ in 0..4 {
            let u = random_zsum(&mut rng, n);
            let v = random_zsum(&mut rng, n);
            let (limit, prod) = zsum_product(&u, &v).unwrap();
            assert_eq!(limit, Upper::Finite(n));
            let mut total = Q::zero();
            for (w, coeff) in prod.iter() {
                let m: Vec<u32> = w.letters().iter().map(|l| l.m).collect();
                let x: Vec<Q> = w.letters().iter().map(|l| l.x.clone()).collect();
                let value = if w.len() <= 4 {
                    brute(n, &m, &x)
                } else {
                    zsum_exact(n, &m, &x)
                };
                total += coeff * value;
            }
            let expect = brute(n, &u.indices(), &u.scales()) * brute(n, &v.indices(), &v.scales());
            assert_eq!(total, expect, "n = {n}");
        }
    }
}

#[test]
fn zsum_exact_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 0..=20u64 {
        let z = random_zsum(&mut rng, n);
        assert_eq!(
            zsum_exact(n, &z.indices(), &z.scales()),
            brute(n, &z.indices(), &z.scales())
        );
    }
    assert_eq!(zsum_exact(3, &[1], &[q(1)]), qf(11, 6));
    assert_eq!(zsum_exact(2, &[1, 1], &[q(1), q(1)]), qf(1, 2));
    let inf = zsum(Upper::Infinity, &[2], &[q(1)], REL_TOL).unwrap();
    assert!(close(inf.to_c64(), c(zeta2()), 1e-14));
    assert!(matches!(
        zsum(Upper::Finite(4), &[1], &[q(1)], REL_TOL).unwrap(),
        ZValue::Exact(_)
    ));
    let a = ZSum::new(Upper::Finite(3), &[1], &[q(1)]);
    let b = ZSum::new(Upper::Finite(4), &[1], &[q(1)]);
    assert!(zsum_product(&a, &b).is_err());
}

#[test]
fn gamma_expansion_is_the_rising_product() {
    for n in 1..=8u32 {
        // Π_{j=1}^{n-1} (1 + ε/j) coefficient by coefficient
        let mut poly = vec![Q::one()];
        for j in 1..n {
            let inv = qf(1, j as i64);
            let mut next = vec![Q::zero(); poly.len() + 1];
            for (k, a) in poly.iter().enumerate() {
                next[k] += a;
                next[k + 1] += a * &inv;
            }
            poly = next;
        }
        let got = gamma_expansion(n, 6);
        for (k, g) in got.iter().enumerate() {
            let want = poly.get(k).cloned().unwrap_or_else(Q::zero);
            assert_eq!(*g, want, "n = {n}, order {k}");
        }
    }
    assert_eq!(gamma_expansion(3, 2), vec![q(1), qf(3, 2), qf(1, 2)]);
}

#[test]
fn named_families() {
    let half = c(0.5);
    let s11 = nielsen(1, 1, half, REL_TOL).unwrap();
    assert!(close(s11, li_series(&[2], &[half], REL_TOL).unwrap(), 1e-15));
    let h2 = hpl(&[2], half, REL_TOL).unwrap();
    assert!((h2.re - 0.582_240_526_465_012_5).abs() < 1e-12);
    let h11 = hpl(&[1, 1], half, REL_TOL).unwrap();
    let ln2 = 2f64.ln();
    assert!((h11.re - 0.5 * ln2 * ln2).abs() < 1e-12, "{h11}");
    assert!((li_series(&[1], &[half], REL_TOL).unwrap().re - ln2).abs() < 1e-15);
    assert!((zeta(3) - 1.202_056_903_159_594_2).abs() < 1e-14);
    // Li1(x) Li1(y) = Li11(x, y) + Li11(y, x) + Li2(xy)
    let l1 = li_series(&[1], &[half], REL_TOL).unwrap();
    let l11 = li_series(&[1, 1], &[half, half], REL_TOL).unwrap();
    let l2 = li_series(&[2], &[c(0.25)], REL_TOL).unwrap();
    assert!(close(l1 * l1, 2.0 * l11 + l2, 1e-14));
}
