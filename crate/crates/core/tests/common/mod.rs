#![allow(dead_code)]

use feynsec::graphpoly::{Edge, FeynmanGraph, Kinematics};
use feynsec::rational::q;

pub fn bubble() -> (FeynmanGraph, Kinematics) {
    let g = FeynmanGraph::new(
        vec![Edge::massless(1, 2), Edge::massless(1, 2)],
        vec![(1, "p1".into()), (2, "p2".into())],
    )
    .unwrap();
    let k = Kinematics::new(&g.labels(), &[(vec!["p1".into()], q(-1))]).unwrap();
    (g, k)
}

/// One-mass triangle: p1² = p2² = 0, p3² = -1.
pub fn triangle() -> (FeynmanGraph, Kinematics) {
    let g = FeynmanGraph::new(
        vec![Edge::massless(3, 1), Edge::massless(2, 3), Edge::massless(1, 2)],
        vec![(1, "p1".into()), (2, "p2".into()), (3, "p3".into())],
    )
    .unwrap();
    let k = Kinematics::new(
        &g.labels(),
        &[
            (vec!["p1".into()], q(0)),
            (vec!["p2".into()], q(0)),
            (vec!["p3".into()], q(-1)),
        ],
    )
    .unwrap();
    (g, k)
}

pub fn tadpole() -> (FeynmanGraph, Kinematics) {
    let g = FeynmanGraph::new(vec![Edge::new(1, 1, q(1), 1)], vec![]).unwrap();
    let k = Kinematics::empty(&g.labels());
    (g, k)
}
