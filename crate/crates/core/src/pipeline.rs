//! Graph in, ε-series out.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{
    expand_eps, extract_poles, homogenize, iterate_decomposition, primary_sectors, DecompError, FiniteIntegrand,
    GeneralIntegral, SectorIntegrand,
};
use crate::graphpoly::{feynman_parametrize, FeynmanGraph, GraphError, Kinematics};
use crate::hironaka::Strategy;
use crate::mcint::{assemble, integrate, Contribution, EpsSeries, MCConfig, McError};
use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error("order {order} is below the floor {floor} for this loop number")]
    OrderFloor { order: i32, floor: i32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub target_order: i32,
    pub strategy: Strategy,
    pub mc: MCConfig,
    pub cap: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub primary_sectors: usize,
    pub final_sectors: usize,
    pub pole_terms: usize,
    pub mc_integrals: usize,
    pub finite_terms: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineResult {
    pub series: EpsSeries,
    pub diagnostics: Diagnostics,
}

/// Finite integrands of one final sector, one per ε order.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorExpansion {
    pub sector: SectorIntegrand,
    pub pole_terms: usize,
    pub orders: BTreeMap<i32, FiniteIntegrand>,
}

/// Parametrize, homogenize, split into primary sectors and resolve each.
/// Output is in primary-sector order, then depth-first blow-up order.
pub fn decompose_graph(
    g: &FeynmanGraph,
    kin: &Kinematics,
    m: i64,
    strategy: Strategy,
    cap: usize,
) -> Result<(usize, Vec<SectorIntegrand>), PipelineError> {
    let p = feynman_parametrize(g, kin, m)?;
    let j = homogenize(&GeneralIntegral::from_param(&p));
    j.check_positivity()?;
    let primaries = primary_sectors(&j)?;
    let resolved: Vec<Vec<SectorIntegrand>> = primaries
        .par_iter()
        .map(|s| iterate_decomposition(s, strategy, cap))
        .collect::<Result<_, _>>()?;
    Ok((primaries.len(), resolved.into_iter().flatten().collect()))
}

/// Pole extraction and ε expansion of every final sector through `target`.
pub fn expand_sectors(sectors: &[SectorIntegrand], target: i32) -> Result<Vec<SectorExpansion>, PipelineError> {
    sectors
        .par_iter()
        .map(|s| {
            let terms = extract_poles(s, target)?;
            let mut orders: BTreeMap<i32, FiniteIntegrand> = BTreeMap::new();
            for t in &terms {
                for (o, f) in expand_eps(t, target)? {
                    let merged = match orders.remove(&o) {
                        Some(prev) => prev.add(&f),
                        None => f,
                    };
                    orders.insert(o, merged);
                }
            }
            Ok(SectorExpansion {
                sector: s.clone(),
                pole_terms: terms.len(),
                orders,
            })
        })
        .collect()
}

fn stream_id(sector: usize, order: i32) -> u64 {
    ((sector as u64) << 16) | (order + (1 << 15)) as u64
}

/// Full evaluation of a graph integral. The caller controls the thread pool
/// (see [`crate::mcint::with_thread_pool`]); results do not depend on it.
pub fn pipeline(
    g: &FeynmanGraph,
    kin: &Kinematics,
    m: i64,
    cfg: &PipelineConfig,
) -> Result<PipelineResult, PipelineError> {
    let floor = -2 * g.loops() as i32;
    if cfg.target_order < floor {
        return Err(PipelineError::OrderFloor {
            order: cfg.target_order,
            floor,
        });
    }
    let (primary, sectors) = decompose_graph(g, kin, m, cfg.strategy, cfg.cap)?;
    let expansions = expand_sectors(&sectors, cfg.target_order)?;

    let mut diagnostics = Diagnostics {
        primary_sectors: primary,
        final_sectors: sectors.len(),
        ..Default::default()
    };
    let mut exact: Vec<(i32, Contribution)> = Vec::new();
    let mut jobs: Vec<(i32, u64, FiniteIntegrand)> = Vec::new();
    for (k, e) in expansions.iter().enumerate() {
        diagnostics.pole_terms += e.pole_terms;
        for (&o, f) in &e.orders {
            if o < floor {
                return Err(PipelineError::OrderFloor { order: o, floor });
            }
            diagnostics.finite_terms += f.terms().len();
            let (c, rest) = f.split_constant();
            if !c.is_zero() {
                exact.push((o, Contribution::Exact(c)));
            }
            if !rest.is_zero() {
                jobs.push((o, stream_id(k, o), rest));
            }
        }
    }
    diagnostics.mc_integrals = jobs.len();
    let estimates: Vec<(i32, Contribution)> = jobs
        .par_iter()
        .map(|(o, id, f)| Ok((*o, Contribution::Estimate(integrate(f, &cfg.mc, *id)?))))
        .collect::<Result<_, McError>>()?;

    let mut items = exact;
    items.extend(estimates);
    let mut series = assemble(&items);
    let lo = series.lowest().unwrap_or(cfg.target_order).min(cfg.target_order);
    series.fill(lo, cfg.target_order);
    Ok(PipelineResult { series, diagnostics })
}

/// Exact value of an expansion when it needs no integration at all.
pub fn exact_value(e: &SectorExpansion, order: i32) -> Option<Q> {
    let f = e.orders.get(&order)?;
    let (c, rest) = f.split_constant();
    rest.is_zero().then_some(c)
}
