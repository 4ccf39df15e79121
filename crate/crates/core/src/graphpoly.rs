//! Scalar Feynman graphs, their Symanzik polynomials U and F, and the
//! Feynman-parametrized integrand.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::poly::Poly;
use crate::rational::{format_rational, q, Q};

/// Brute-force enumeration is used up to this many edges.
pub const BRUTE_FORCE_EDGES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("topology error: {0}")]
    Topology(String),
    #[error("kinematics error: {0}")]
    Kinematics(String),
    #[error("invariant s_{{{0}}} = {1} is positive; only the Euclidean region is supported")]
    NonEuclidean(String, String),
    #[error("scaleless integral: F vanishes identically")]
    Scaleless,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: i64,
    pub to: i64,
    pub mass2: Q,
    pub power: u32,
}

impl Edge {
    pub fn new(from: i64, to: i64, mass2: Q, power: u32) -> Self {
        Edge { from, to, mass2, power }
    }

    pub fn massless(from: i64, to: i64) -> Self {
        Edge::new(from, to, q(0), 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    vertices: Vec<i64>,
    edges: Vec<Edge>,
    externals: Vec<(i64, String)>,
}

impl FeynmanGraph {
    /// Vertices are the union of edge endpoints and external attachment points.
    pub fn new(edges: Vec<Edge>, externals: Vec<(i64, String)>) -> Result<Self, GraphError> {
        let mut vs = BTreeSet::new();
        for e in &edges {
            vs.insert(e.from);
            vs.insert(e.to);
        }
        for (v, _) in &externals {
            vs.insert(*v);
        }
        let g = FeynmanGraph {
            vertices: vs.into_iter().collect(),
            edges,
            externals,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::Topology("graph has no internal edges".into()));
        }
        for (j, e) in self.edges.iter().enumerate() {
            if e.power == 0 {
                return Err(GraphError::Topology(format!("edge {} has power 0", j + 1)));
            }
            if e.mass2.is_negative() {
                return Err(GraphError::Topology(format!("edge {} has negative mass²", j + 1)));
            }
        }
        let mut labels = BTreeSet::new();
        for (_, l) in &self.externals {
            if l.is_empty() || l.contains(',') {
                return Err(GraphError::Topology(format!("bad momentum label {l:?}")));
            }
            if !labels.insert(l.clone()) {
                return Err(GraphError::Topology(format!("duplicate momentum label {l:?}")));
            }
        }
        let all: Vec<usize> = (0..self.edges.len()).collect();
        if self.components(&all) != 1 {
            return Err(GraphError::Topology("graph is disconnected".into()));
        }
        if self.loops() < 1 {
            return Err(GraphError::Topology("tree graph: loop number is 0".into()));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[i64] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn externals(&self) -> &[(i64, String)] {
        &self.externals
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn loops(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertices.len())
    }

    pub fn labels(&self) -> Vec<String> {
        let mut l: Vec<String> = self.externals.iter().map(|(_, s)| s.clone()).collect();
        l.sort();
        l
    }

    fn vertex_index(&self, v: i64) -> usize {
        self.vertices.binary_search(&v).expect("vertex of this graph")
    }

    fn union_find(&self, edge_subset: &[usize]) -> Vec<usize> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for &j in edge_subset {
            let e = &self.edges[j];
            let a = find(&mut parent, self.vertex_index(e.from));
            let b = find(&mut parent, self.vertex_index(e.to));
            if a != b {
                parent[a] = b;
            }
        }
        (0..n).map(|i| find(&mut parent, i)).collect()
    }

    fn components(&self, edge_subset: &[usize]) -> usize {
        let roots: BTreeSet<usize> = self.union_find(edge_subset).into_iter().collect();
        roots.len()
    }

    /// Edge subsets forming spanning forests with exactly `k` trees.
    fn forests(&self, k: usize) -> Vec<Vec<usize>> {
        if self.edges.len() <= BRUTE_FORCE_EDGES {
            self.forests_brute(k)
        } else {
            self.forests_deletion_contraction(k)
        }
    }

    fn forests_brute(&self, k: usize) -> Vec<Vec<usize>> {
        let nv = self.vertices.len();
        if k > nv {
            return Vec::new();
        }
        let size = nv - k;
        let ne = self.edges.len();
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << ne) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let subset: Vec<usize> = (0..ne).filter(|j| mask >> j & 1 == 1).collect();
            // |V| - |E| = k with k components forces acyclicity
            if self.components(&subset) == k {
                out.push(subset);
            }
        }
        out
    }

    /// Deletion-contraction over a working copy with contracted vertex labels.
    pub(crate) fn forests_deletion_contraction(&self, k: usize) -> Vec<Vec<usize>> {
        let ends: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| (self.vertex_index(e.from), self.vertex_index(e.to)))
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        dc_recurse(&ends, 0, self.vertices.len(), k, &mut chosen, &mut out);
        for f in out.iter_mut() {
            f.sort_unstable();
        }
        out.sort();
        out
    }
}

/// `ends` holds current (contracted) endpoints; `live` counts current vertices.
fn dc_recurse(
    ends: &[(usize, usize)],
    start: usize,
    live: usize,
    k: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if live < k {
        return;
    }
    // the next non-loop edge
    let next = (start..ends.len()).find(|&j| ends[j].0 != ends[j].1);
    let Some(j) = next else {
        if live == k {
            out.push(chosen.clone());
        }
        return;
    };
    // delete j
    dc_recurse(ends, j + 1, live, k, chosen, out);
    // contract j: relabel its endpoints
    let (a, b) = ends[j];
    let merged: Vec<(usize, usize)> = ends
        .iter()
        .map(|&(u, v)| {
            let f = |x: usize| if x == b { a } else { x };
            (f(u), f(v))
        })
        .collect();
    chosen.push(j);
    dc_recurse(&merged, j + 1, live - 1, k, chosen, out);
    chosen.pop();
}

/// Spanning trees as edge-index sets (0-based).
pub fn one_trees(g: &FeynmanGraph) -> Vec<Vec<usize>> {
    g.forests(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoForest {
    pub edges: Vec<usize>,
    /// Vertex ids of the two trees.
    pub parts: (Vec<i64>, Vec<i64>),
}

pub fn two_forests(g: &FeynmanGraph) -> Vec<TwoForest> {
    g.forests(2)
        .into_iter()
        .map(|edges| {
            let roots = g.union_find(&edges);
            let r0 = roots[0];
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (i, v) in g.vertices.iter().enumerate() {
                if roots[i] == r0 {
                    a.push(*v);
                } else {
                    b.push(*v);
                }
            }
            TwoForest { edges, parts: (a, b) }
        })
        .collect()
}

pub fn chords(g: &FeynmanGraph, edges: &[usize]) -> Vec<usize> {
    (0..g.n_edges()).filter(|j| !edges.contains(j)).collect()
}

/// Kinematic invariants `s_T` keyed by canonical label subsets.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Kinematics {
    labels: Vec<String>,
    values: BTreeMap<Vec<String>, Q>,
}

impl Kinematics {
    /// `labels` is the full set of external momentum labels. Each supplied
    /// subset is canonicalized to the smaller of itself and its complement.
    pub fn new(labels: &[String], supplied: &[(Vec<String>, Q)]) -> Result<Self, GraphError> {
        let mut all: Vec<String> = labels.to_vec();
        all.sort();
        all.dedup();
        let mut values = BTreeMap::new();
        for (set, v) in supplied {
            let mut s = set.clone();
            s.sort();
            s.dedup();
            if s.len() != set.len() {
                return Err(GraphError::Kinematics(format!("repeated label in {set:?}")));
            }
            for l in &s {
                if !all.contains(l) {
                    return Err(GraphError::Kinematics(format!("unknown momentum label {l:?}")));
                }
            }
            if s.is_empty() || s.len() == all.len() {
                return Err(GraphError::Kinematics(
                    "invariants need a nonempty proper subset of the external labels".into(),
                ));
            }
            if v.is_positive() {
                return Err(GraphError::NonEuclidean(s.join(","), format_rational(v)));
            }
            let key = canonical(&all, &s);
            if let Some(old) = values.get(&key) {
                if old != v {
                    return Err(GraphError::Kinematics(format!(
                        "conflicting values for s_{{{}}} and its complement",
                        key.join(",")
                    )));
                }
            }
            values.insert(key, v.clone());
        }
        Ok(Kinematics { labels: all, values })
    }

    pub fn empty(labels: &[String]) -> Self {
        Kinematics::new(labels, &[]).expect("no invariants to validate")
    }

    /// `s_T` for the labels on one side of a cut. Empty and full subsets give 0.
    pub fn value(&self, subset: &[String]) -> Result<Q, GraphError> {
        let mut s = subset.to_vec();
        s.sort();
        if s.is_empty() || s.len() == self.labels.len() {
            return Ok(Q::zero());
        }
        let key = canonical(&self.labels, &s);
        self.values
            .get(&key)
            .cloned()
            .ok_or_else(|| GraphError::Kinematics(format!("missing invariant s_{{{}}}", key.join(","))))
    }
}

fn canonical(all: &[String], s: &[String]) -> Vec<String> {
    let comp: Vec<String> = all.iter().filter(|l| !s.contains(l)).cloned().collect();
    if comp.as_slice() < s {
        comp
    } else {
        s.to_vec()
    }
}

/// Homogeneous polynomial with its recorded degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPolynomial {
    pub poly: Poly,
    pub degree: u32,
}

fn chord_monomial(n: usize, chords: &[usize]) -> Vec<u32> {
    let mut e = vec![0; n];
    for &j in chords {
        e[j] += 1;
    }
    e
}

pub fn polynomial_u(g: &FeynmanGraph) -> GraphPolynomial {
    let n = g.n_edges();
    let mut p = Poly::zero(n);
    for t in one_trees(g) {
        p.add_term(chord_monomial(n, &chords(g, &t)), q(1));
    }
    GraphPolynomial {
        poly: p,
        degree: g.loops() as u32,
    }
}

pub fn polynomial_f(g: &FeynmanGraph, kin: &Kinematics) -> Result<GraphPolynomial, GraphError> {
    let n = g.n_edges();
    let mut f0 = Poly::zero(n);
    for tf in two_forests(g) {
        let side: Vec<String> = g
            .externals
            .iter()
            .filter(|(v, _)| tf.parts.0.contains(v))
            .map(|(_, l)| l.clone())
            .collect();
        let s = kin.value(&side)?;
        if s.is_positive() {
            return Err(GraphError::NonEuclidean(side.join(","), format_rational(&s)));
        }
        f0.add_term(chord_monomial(n, &chords(g, &tf.edges)), -s);
    }
    let u = polynomial_u(g).poly;
    let mut masses = Poly::zero(n);
    for (j, e) in g.edges.iter().enumerate() {
        if !e.mass2.is_zero() {
            masses = &masses + &Poly::var(n, j).scale(&e.mass2);
        }
    }
    let f = &f0 + &(&u * &masses);
    Ok(GraphPolynomial {
        poly: f,
        degree: g.loops() as u32 + 1,
    })
}

/// `a + b ε` with exact integer parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EpsExponent {
    pub a: i64,
    pub b: i64,
}

impl EpsExponent {
    pub const ZERO: EpsExponent = EpsExponent { a: 0, b: 0 };

    pub fn new(a: i64, b: i64) -> Self {
        EpsExponent { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn scaled(&self, k: i64) -> EpsExponent {
        EpsExponent::new(self.a * k, self.b * k)
    }
}

impl std::ops::Add for EpsExponent {
    type Output = EpsExponent;
    fn add(self, o: EpsExponent) -> EpsExponent {
        EpsExponent::new(self.a + o.a, self.b + o.b)
    }
}

impl std::fmt::Display for EpsExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{:+}*eps", self.a, self.b)
    }
}

/// Feynman-parametrized integral in `D = 2m - 2ε` dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamIntegral {
    pub n: usize,
    pub loops: usize,
    pub nu: Vec<u32>,
    pub dim_anchor: i64,
    pub u: GraphPolynomial,
    pub f: GraphPolynomial,
    pub u_exp: EpsExponent,
    pub f_exp: EpsExponent,
    pub monomial: Vec<EpsExponent>,
}

pub fn feynman_parametrize(g: &FeynmanGraph, kin: &Kinematics, m: i64) -> Result<ParamIntegral, GraphError> {
    if m < 1 {
        return Err(GraphError::Kinematics(format!("dimension anchor m = {m} must be >= 1")));
    }
    let u = polynomial_u(g);
    let f = polynomial_f(g, kin)?;
    if f.poly.is_zero() {
        return Err(GraphError::Scaleless);
    }
    let l = g.loops() as i64;
    let nu: Vec<u32> = g.edges.iter().map(|e| e.power).collect();
    let nu_tot: i64 = nu.iter().map(|&v| v as i64).sum();
    Ok(ParamIntegral {
        n: g.n_edges(),
        loops: g.loops(),
        dim_anchor: m,
        u_exp: EpsExponent::new(nu_tot - (l + 1) * m, l + 1),
        f_exp: EpsExponent::new(-nu_tot + l * m, -l),
        monomial: nu.iter().map(|&v| EpsExponent::new(v as i64 - 1, 0)).collect(),
        nu,
        u,
        f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn bubble() -> FeynmanGraph {
        FeynmanGraph::new(
            vec![Edge::massless(1, 2), Edge::massless(1, 2)],
            vec![(1, "p1".into()), (2, "p2".into())],
        )
        .unwrap()
    }

    fn labels(g: &FeynmanGraph) -> Vec<String> {
        g.labels()
    }

    #[test]
    fn bubble_trees_and_forests() {
        let g = bubble();
        assert_eq!(one_trees(&g), vec![vec![0], vec![1]]);
        let tf = two_forests(&g);
        assert_eq!(tf.len(), 1);
        assert!(tf[0].edges.is_empty());
        let kin = Kinematics::new(&labels(&g), &[(vec!["p1".into()], q(-1))]).unwrap();
        assert_eq!(polynomial_u(&g).poly.to_string(), "x1+x2");
        assert_eq!(polynomial_f(&g, &kin).unwrap().poly.to_string(), "x1*x2");
        let p = feynman_parametrize(&g, &kin, 2).unwrap();
        assert_eq!(p.u_exp, EpsExponent::new(-2, 2));
        assert_eq!(p.f_exp, EpsExponent::new(0, -1));
        assert_eq!(p.monomial, vec![EpsExponent::ZERO; 2]);
    }

    #[test]
    fn tadpole() {
        let g = FeynmanGraph::new(vec![Edge::new(1, 1, q(1), 1)], vec![]).unwrap();
        assert_eq!(one_trees(&g), vec![Vec::<usize>::new()]);
        let kin = Kinematics::empty(&[]);
        assert_eq!(polynomial_u(&g).poly.to_string(), "x1");
        assert_eq!(polynomial_f(&g, &kin).unwrap().poly.to_string(), "x1^2");
        let p = feynman_parametrize(&g, &kin, 2).unwrap();
        assert_eq!(p.u_exp, EpsExponent::new(-3, 2));
        assert_eq!(p.f_exp, EpsExponent::new(1, -1));
    }

    #[test]
    fn massless_tadpole_is_scaleless() {
        let g = FeynmanGraph::new(vec![Edge::massless(1, 1)], vec![]).unwrap();
        let kin = Kinematics::empty(&[]);
        assert_eq!(feynman_parametrize(&g, &kin, 2), Err(GraphError::Scaleless));
    }

    #[test]
    fn kinematics_canonicalization() {
        let ls: Vec<String> = ["p1", "p2", "p3"].iter().map(|s| s.to_string()).collect();
        let k = Kinematics::new(
            &ls,
            &[(vec!["p2".into(), "p3".into()], q(-2)), (vec!["p1".into()], q(-2))],
        )
        .unwrap();
        assert_eq!(k.value(&["p3".into(), "p2".into()]).unwrap(), q(-2));
        let bad = Kinematics::new(
            &ls,
            &[(vec!["p2".into(), "p3".into()], q(-2)), (vec!["p1".into()], q(-3))],
        );
        assert!(matches!(bad, Err(GraphError::Kinematics(_))));
        let pos = Kinematics::new(&ls, &[(vec!["p1".into()], q(1))]);
        assert!(matches!(pos, Err(GraphError::NonEuclidean(_, _))));
        assert!(matches!(k.value(&["p2".into()]), Err(GraphError::Kinematics(_))));
        assert_eq!(k.value(&[]).unwrap(), q(0));
    }

    #[test]
    fn disconnected_is_rejected() {
        let r = FeynmanGraph::new(vec![Edge::massless(1, 1), Edge::massless(2, 2)], vec![]);
        assert!(matches!(r, Err(GraphError::Topology(_))));
    }

    #[test]
    fn exponent_display() {
        assert_eq!(EpsExponent::new(-2, 2).to_string(), "-2+2*eps");
        assert_eq!(EpsExponent::new(0, -1).to_string(), "0-1*eps");
    }

    proptest::proptest! {
        #[test]
        fn deletion_contraction_matches_brute_force(
            raw in proptest::collection::vec((0i64..5, 0i64..5), 1..9)
        ) {
            let edges: Vec<Edge> = raw.iter().map(|&(a, b)| Edge::massless(a, b)).collect();
            if let Ok(g) = FeynmanGraph::new(edges, vec![]) {
                for k in 1..=2 {
                    let mut brute = g.forests_brute(k);
                    brute.sort();
                    proptest::prop_assert_eq!(brute, g.forests_deletion_contraction(k));
                }
            }
        }
    }
}
