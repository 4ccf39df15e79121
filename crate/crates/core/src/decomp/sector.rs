use num_traits::Zero;

use super::{positive_constant, DecompError, SectorIntegrand, Substitution};
use crate::graphpoly::EpsExponent;
use crate::hironaka::{apply_move_with, strategy_for_polynomial, Move, Offset, PointSet, Strategy};

/// Blow-up cap per call of [`iterate_decomposition`].
pub const DEFAULT_CAP: usize = 10_000;

/// Sub-sector of `s` where `t_l` is the largest of the variables in `subset`
/// (0-based), after `t_i -> t_l t_i` for the other members.
pub fn decompose_step(s: &SectorIntegrand, subset: &[usize], l: usize) -> SectorIntegrand {
    assert!(subset.contains(&l), "l must lie in S");
    assert!(subset.iter().all(|&i| i < s.dim), "subset index out of range");
    let mut mono = s.monomial.clone();
    let jac = EpsExponent::new(subset.len() as i64 - 1, 0);
    mono[l] = subset
        .iter()
        .filter(|&&i| i != l)
        .fold(mono[l] + jac, |acc, &i| acc + s.monomial[i]);
    let mut out = SectorIntegrand {
        dim: s.dim,
        monomial: mono,
        factors: s
            .factors
            .iter()
            .map(|f| super::Factor::new(f.poly.blow_up(subset, l), f.exp))
            .collect(),
        prefactor: s.prefactor.clone(),
        trail: s.trail.clone(),
    };
    out.trail.push(Substitution::BlowUp {
        subset: subset.to_vec(),
        l,
    });
    out.normalize();
    out
}

/// Blows up until every factor has a nonzero constant term. Factors are
/// treated one after another; children come out in depth-first order with
/// `l` ascending.
pub fn iterate_decomposition(
    s: &SectorIntegrand,
    strategy: Strategy,
    cap: usize,
) -> Result<Vec<SectorIntegrand>, DecompError> {
    let mut stack = vec![s.clone()];
    let mut out = Vec::new();
    let mut steps = 0usize;
    while let Some(cur) = stack.pop() {
        let Some(j) = cur.factors.iter().position(|f| f.poly.constant_term().is_zero()) else {
            if let Some(f) = cur.factors.iter().find(|f| !positive_constant(&f.poly)) {
                return Err(DecompError::NonPositive(f.poly.to_string()));
            }
            out.push(cur);
            continue;
        };
        let p = &cur.factors[j].poly;
        let subset = strategy_for_polynomial(p, strategy)?;
        let parent = PointSet::newton(p)?;
        let mut children = Vec::with_capacity(subset.len());
        for &l in &subset {
            steps += 1;
            if steps > cap {
                return Err(DecompError::StrategyFailure {
                    steps: cap,
                    sector: cur.to_string(),
                    newton: parent.to_string(),
                });
            }
            let child = decompose_step(&cur, &subset, l);
            // factors before j were monomialised and must stay so
            debug_assert!(child.factors.len() >= j);
            debug_assert!(child.factors[..j]
                .iter()
                .zip(&cur.factors[..j])
                .all(|(a, b)| a.poly.constant_term() == b.poly.constant_term()));
            debug_assert!(newton_sound(&parent, &subset, l, p));
            children.push(child);
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(out)
}

/// The substituted polynomial, with its monomial factor removed, has exactly
/// the Newton set the game predicts for the move `(subset, l)`.
fn newton_sound(parent: &PointSet, subset: &[usize], l: usize, p: &crate::poly::Poly) -> bool {
    let mv = Move::new(subset.to_vec(), l).expect("l in S");
    let predicted = apply_move_with(parent, &mv, Offset::Extracted).expect("extracted moves are legal");
    let blown = p.blow_up(subset, l);
    let child = blown.divide_monomial(&blown.min_exponents());
    PointSet::newton(&child).map(|n| n == predicted).unwrap_or(false)
}
