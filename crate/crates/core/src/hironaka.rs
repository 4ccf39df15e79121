//! Hironaka's polyhedra game and the subset strategy that drives the
//! iterated sector decomposition.
//!
//! # The pair strategy and its measure
//!
//! For two generators `a`, `b` let `ρ = a - b`, `P = max ρ_i`, `N = -min ρ_i`
//! (both positive when neither point dominates the other) and let `e` count
//! the coordinates where `ρ` attains `P` or `-N`. The pair key is
//! `κ(a, b) = (P + N, e)`. The measure of a position is
//!
//! `μ(M) = (|G|, sorted list of κ over all generator pairs)`
//!
//! compared lexicographically, with `G` the pruned generator set. Pair keys
//! live in `ℕ²` and the list has fixed length for fixed `|G|`, so `μ` is
//! well founded.
//!
//! Player A picks the pair with the smallest key and plays
//! `S = {argmax ρ, argmin ρ}`. Whatever B replies, the replaced coordinate of
//! `ρ` becomes `P - N`, strictly between `-N` and `P`. So `κ` of that pair
//! drops. The move map is monotone, so dominated points stay dominated and
//! `|G|` never grows. Hence `μ` strictly decreases.
//!
//! The argument needs the move to be legal. With the extracted offset
//! ([`Offset::Extracted`], `c = min Σ_{j∈S} m_j`) it always is. That is the
//! offset a blow-up factors out of a polynomial. With the fixed offset
//! `c = 1` a pair can be illegal when some generator vanishes on both of its
//! coordinates. The strategy then searches the legal subsets for one that
//! decreases `μ` against every reply of B. If none exists it reports a
//! strategy failure instead of guessing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::poly::Poly;

pub type Point = Vec<u32>;

/// Default move cap for [`play`].
pub const MOVE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("empty point set")]
    Empty,
    #[error("point {0:?} does not have dimension {1}")]
    Dimension(Point, usize),
    #[error("bad move: {0}")]
    BadMove(String),
    #[error("illegal move: point {point:?} has coordinate sum {sum} on S, below the offset {offset}")]
    IllegalMove { point: Point, sum: u32, offset: u32 },
    #[error("position is already won")]
    AlreadyWon,
    #[error("strategy failure: {0}")]
    StrategyFailure(String),
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
}

/// Finite subset of `ℕⁿ`, kept sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

fn dominates(a: &Point, b: &Point) -> bool {
    // b ∈ a + ℕⁿ
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl PointSet {
    pub fn new(dim: usize, mut points: Vec<Point>) -> Result<Self, GameError> {
        if points.is_empty() {
            return Err(GameError::Empty);
        }
        for p in &points {
            if p.len() != dim {
                return Err(GameError::Dimension(p.clone(), dim));
            }
        }
        points.sort();
        points.dedup();
        Ok(PointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Minimal points: those not dominated by another member.
    pub fn generators(&self) -> PointSet {
        let keep: Vec<Point> = self
            .points
            .iter()
            .filter(|p| !self.points.iter().any(|q| q != *p && dominates(q, p)))
            .cloned()
            .collect();
        PointSet {
            dim: self.dim,
            points: keep,
        }
    }

    /// Subtracts the coordinate-wise minimum.
    pub fn normalized(&self) -> PointSet {
        let mut lo = self.points[0].clone();
        for p in &self.points {
            for (l, &v) in lo.iter_mut().zip(p) {
                *l = (*l).min(v);
            }
        }
        let pts = self
            .points
            .iter()
            .map(|p| p.iter().zip(&lo).map(|(a, b)| a - b).collect())
            .collect();
        PointSet::new(self.dim, pts).expect("nonempty")
    }

    /// Exponent vectors of a polynomial.
    pub fn newton(p: &Poly) -> Result<PointSet, GameError> {
        PointSet::new(p.nvars(), p.exponents().cloned().collect())
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .points
            .iter()
            .map(|p| {
                let c: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                format!("({})", c.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Offset `c` subtracted by a move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Offset {
    /// `c = 1`.
    #[default]
    Unit,
    /// `c = min_{m∈M} Σ_{j∈S} m_j`, the power a blow-up extracts.
    Extracted,
}

/// Player A's subset (0-based, sorted) and player B's pick.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub subset: Vec<usize>,
    pub pick: usize,
}

impl Move {
    pub fn new(mut subset: Vec<usize>, pick: usize) -> Result<Self, GameError> {
        subset.sort_unstable();
        subset.dedup();
        if subset.is_empty() {
            return Err(GameError::BadMove("empty subset".into()));
        }
        if !subset.contains(&pick) {
            return Err(GameError::BadMove(format!("pick {pick} is not in S")));
        }
        Ok(Move { subset, pick })
    }
}

fn check_move(m: &PointSet, mv: &Move) -> Result<(), GameError> {
    if mv.subset.is_empty() || !mv.subset.contains(&mv.pick) {
        return Err(GameError::BadMove("pick must lie in a nonempty S".into()));
    }
    if mv.subset.iter().any(|&j| j >= m.dim) {
        return Err(GameError::BadMove("subset index out of range".into()));
    }
    Ok(())
}

fn offset_for(m: &PointSet, subset: &[usize], offset: Offset) -> u32 {
    match offset {
        Offset::Unit => 1,
        Offset::Extracted => m
            .points
            .iter()
            .map(|p| subset.iter().map(|&j| p[j]).sum::<u32>())
            .min()
            .unwrap_or(0),
    }
}

/// The move with `c = 1`.
pub fn apply_move(m: &PointSet, mv: &Move) -> Result<PointSet, GameError> {
    apply_move_with(m, mv, Offset::Unit)
}

pub fn apply_move_with(m: &PointSet, mv: &Move, offset: Offset) -> Result<PointSet, GameError> {
    check_move(m, mv)?;
    let c = offset_for(m, &mv.subset, offset);
    let mut out = Vec::with_capacity(m.points.len());
    for p in &m.points {
        let sum: u32 = mv.subset.iter().map(|&j| p[j]).sum();
        if sum < c {
            return Err(GameError::IllegalMove {
                point: p.clone(),
                sum,
                offset: c,
            });
        }
        let mut q = p.clone();
        q[mv.pick] = sum - c;
        out.push(q);
    }
    PointSet::new(m.dim, out)
}

pub fn is_legal(m: &PointSet, subset: &[usize], offset: Offset) -> bool {
    let c = offset_for(m, subset, offset);
    m.points.iter().all(|p| subset.iter().map(|&j| p[j]).sum::<u32>() >= c)
}

pub fn is_won(m: &PointSet) -> bool {
    m.generators().points.len() == 1
}

/// Pair key `(P + N, number of extreme coordinates)`.
pub fn pair_key(a: &Point, b: &Point) -> (u32, u32) {
    let rho: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x as i64 - y as i64).collect();
    let p = rho.iter().copied().max().unwrap_or(0);
    let n = -rho.iter().copied().min().unwrap_or(0);
    let e = rho.iter().filter(|&&r| r == p || r == -n).count();
    ((p + n) as u32, e as u32)
}

/// The well-founded measure documented at module level.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Measure {
    pub generators: usize,
    pub pair_keys: Vec<(u32, u32)>,
}

impl Measure {
    pub fn of(m: &PointSet) -> Measure {
        let g = m.generators();
        let mut keys = Vec::new();
        for i in 0..g.points.len() {
            for j in (i + 1)..g.points.len() {
                keys.push(pair_key(&g.points[i], &g.points[j]));
            }
        }
        keys.sort_unstable();
        Measure {
            generators: g.points.len(),
            pair_keys: keys,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k: Vec<String> = self.pair_keys.iter().map(|(s, e)| format!("{s}:{e}")).collect();
        write!(f, "({}; [{}])", self.generators, k.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Two-element subsets driven by [`Measure`].
    #[default]
    PairDiff,
    /// All coordinates whose range over the generators is nontrivial.
    /// Experimental: no termination proof.
    FullSpread,
}

impl FromStr for Strategy {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, GameError> {
        match s {
            "pairdiff" => Ok(Strategy::PairDiff),
            "fullspread" => Ok(Strategy::FullSpread),
            other => Err(GameError::UnknownStrategy(other.to_string())),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::PairDiff => "pairdiff",
            Strategy::FullSpread => "fullspread",
        })
    }
}

/// Closest generator pair and its subset `{argmax ρ, argmin ρ}`.
fn closest_pair_subset(g: &PointSet) -> Vec<usize> {
    let mut best: Option<((u32, u32), usize, usize)> = None;
    for i in 0..g.points.len() {
        for j in (i + 1)..g.points.len() {
            let k = pair_key(&g.points[i], &g.points[j]);
            if best.is_none_or(|(bk, _, _)| k < bk) {
                best = Some((k, i, j));
            }
        }
    }
    let (_, i, j) = best.expect("at least two generators");
    pair_subset(&g.points[i], &g.points[j])
}

fn pair_subset(a: &Point, b: &Point) -> Vec<usize> {
    let rho: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x as i64 - y as i64).collect();
    let mut hi = 0;
    let mut lo = 0;
    for (k, &r) in rho.iter().enumerate() {
        if r > rho[hi] {
            hi = k;
        }
        if r < rho[lo] {
            lo = k;
        }
    }
    let mut s = vec![hi, lo];
    s.sort_unstable();
    s
}

fn decreases_for_every_reply(g: &PointSet, subset: &[usize], offset: Offset, before: &Measure) -> bool {
    subset.iter().all(|&i| {
        let mv = Move {
            subset: subset.to_vec(),
            pick: i,
        };
        match apply_move_with(g, &mv, offset) {
            Ok(next) => Measure::of(&next) < *before,
            Err(_) => false,
        }
    })
}

/// Subset played by A under the `c = 1` rules.
pub fn choose_subset(m: &PointSet, strategy: Strategy) -> Result<Vec<usize>, GameError> {
    choose_subset_with(m, strategy, Offset::Unit)
}

pub fn choose_subset_with(m: &PointSet, strategy: Strategy, offset: Offset) -> Result<Vec<usize>, GameError> {
    let g = m.generators();
    if g.points.len() == 1 {
        return Err(GameError::AlreadyWon);
    }
    match strategy {
        Strategy::PairDiff => {
            let s = closest_pair_subset(&g);
            if is_legal(&g, &s, offset) {
                return Ok(s);
            }
            let before = Measure::of(&g);
            fallback_subset(&g, offset, &before).ok_or_else(|| {
                GameError::StrategyFailure(format!("no legal subset decreases the measure {before} at {g}"))
            })
        }
        Strategy::FullSpread => {
            let s: Vec<usize> = (0..g.dim)
                .filter(|&i| {
                    let lo = g.points.iter().map(|p| p[i]).min();
                    let hi = g.points.iter().map(|p| p[i]).max();
                    lo != hi
                })
                .collect();
            if is_legal(&g, &s, offset) {
                Ok(s)
            } else {
                Ok((0..g.dim).collect())
            }
        }
    }
}

/// Legal subsets in a fixed order: pairs by ascending key of the generator
/// pair they come from, then all subsets by size and index.
fn fallback_subset(g: &PointSet, offset: Offset, before: &Measure) -> Option<Vec<usize>> {
    let mut pairs: Vec<((u32, u32), Vec<usize>)> = Vec::new();
    for i in 0..g.points.len() {
        for j in (i + 1)..g.points.len() {
            pairs.push((
                pair_key(&g.points[i], &g.points[j]),
                pair_subset(&g.points[i], &g.points[j]),
            ));
        }
    }
    pairs.sort();
    let mut candidates: Vec<Vec<usize>> = pairs.into_iter().map(|(_, s)| s).collect();
    let n = g.dim;
    let mut subsets: Vec<Vec<usize>> = (1u32..(1u32 << n))
        .map(|mask| (0..n).filter(|k| mask >> k & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    candidates.extend(subsets);
    candidates
        .into_iter()
        .find(|s| is_legal(g, s, offset) && decreases_for_every_reply(g, s, offset, before))
}

/// Player B's reply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BPolicy {
    /// Uniform choice from a seeded stream.
    Random(u64),
    /// The coordinate of `S` with the largest extent over the generators.
    MaxCoordinate,
    /// The coordinate of `S` with the smallest extent over the generators.
    MinCoordinate,
}

struct BPlayer {
    policy: BPolicy,
    rng: ChaCha8Rng,
}

impl BPlayer {
    fn new(policy: BPolicy) -> Self {
        let seed = match policy {
            BPolicy::Random(s) => s,
            _ => 0,
        };
        BPlayer {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn pick(&mut self, g: &PointSet, subset: &[usize]) -> usize {
        let extent = |i: usize| g.points.iter().map(|p| p[i]).max().unwrap_or(0);
        match self.policy {
            BPolicy::Random(_) => subset[self.rng.gen_range(0..subset.len())],
            BPolicy::MaxCoordinate => *subset
                .iter()
                .min_by(|&&a, &&b| extent(b).cmp(&extent(a)).then(a.cmp(&b)))
                .expect("nonempty subset"),
            BPolicy::MinCoordinate => *subset
                .iter()
                .min_by(|&&a, &&b| extent(a).cmp(&extent(b)).then(a.cmp(&b)))
                .expect("nonempty subset"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    pub offset: Offset,
    pub move_cap: usize,
    /// Apply moves to the pruned generator set only.
    pub prune: bool,
    /// Fail if the measure does not strictly decrease (pairdiff only).
    pub check_measure: bool,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            offset: Offset::Unit,
            move_cap: MOVE_CAP,
            prune: true,
            check_measure: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub mv: Move,
    pub measure_before: Measure,
    pub measure_after: Measure,
    /// Generators after the move.
    pub position: PointSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub start: PointSet,
    pub moves: Vec<MoveRecord>,
}

/// Plays with `c = 1` until A wins.
pub fn play(m: &PointSet, strategy: Strategy, b: BPolicy) -> Result<(usize, Transcript), GameError> {
    play_with(m, strategy, b, &GameConfig::default())
}

pub fn play_with(
    m: &PointSet,
    strategy: Strategy,
    b: BPolicy,
    cfg: &GameConfig,
) -> Result<(usize, Transcript), GameError> {
    let check = cfg.check_measure && strategy == Strategy::PairDiff;
    let chooser = |pos: &PointSet| choose_subset_with(pos, strategy, cfg.offset);
    play_driven(m, &chooser, b, cfg, check)
}

/// Plays with an arbitrary subset rule for A.
pub fn play_custom(
    m: &PointSet,
    choose: &dyn Fn(&PointSet) -> Result<Vec<usize>, GameError>,
    b: BPolicy,
    cfg: &GameConfig,
) -> Result<(usize, Transcript), GameError> {
    play_driven(m, choose, b, cfg, false)
}

fn play_driven(
    m: &PointSet,
    choose: &dyn Fn(&PointSet) -> Result<Vec<usize>, GameError>,
    b: BPolicy,
    cfg: &GameConfig,
    check: bool,
) -> Result<(usize, Transcript), GameError> {
    let mut player = BPlayer::new(b);
    let mut pos = if cfg.prune { m.generators() } else { m.clone() };
    let mut moves = Vec::new();
    while !is_won(&pos) {
        if moves.len() >= cfg.move_cap {
            return Err(GameError::StrategyFailure(format!(
                "move cap {} exceeded at {}",
                cfg.move_cap,
                pos.generators()
            )));
        }
        let subset = choose(&pos)?;
        let g = pos.generators();
        let pick = player.pick(&g, &subset);
        let mv = Move::new(subset, pick)?;
        let before = Measure::of(&pos);
        let mut next = apply_move_with(&pos, &mv, cfg.offset)?;
        if cfg.prune {
            next = next.generators();
        }
        let after = Measure::of(&next);
        if check && after.cmp(&before) != Ordering::Less {
            return Err(GameError::StrategyFailure(format!(
                "measure did not decrease: {before} -> {after} after S={:?}, i={}",
                mv.subset, mv.pick
            )));
        }
        moves.push(MoveRecord {
            mv,
            measure_before: before,
            measure_after: after,
            position: next.generators(),
        });
        pos = next;
    }
    Ok((
        moves.len(),
        Transcript {
            start: m.clone(),
            moves,
        },
    ))
}

/// Subset for the next blow-up of a polynomial that is not yet of the form
/// monomial × (c + P'). Uses the extracted-offset game on its Newton set.
pub fn strategy_for_polynomial(p: &Poly, strategy: Strategy) -> Result<Vec<usize>, GameError> {
    let m = PointSet::newton(p)?.normalized();
    choose_subset_with(&m, strategy, Offset::Extracted)
}
