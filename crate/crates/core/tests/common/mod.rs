//! Enumerable models shared by the integration and acceptance tests.
#![allow(dead_code)]

use concentrate::models::{Atom, SupportPoint};
use concentrate::{BoundParams, JointModel, Marginal};

pub struct ZooEntry {
    pub name: &'static str,
    pub model: JointModel,
    pub a: f64,
    pub b: f64,
    /// Common moment constant satisfying the hypothesis.
    pub c: f64,
}

impl ZooEntry {
    pub fn params(&self, t: f64) -> BoundParams {
        BoundParams::uniform(self.model.n(), self.a, self.b, self.c, t).unwrap()
    }

    /// `k` evenly spaced deviations covering `[0, t_max]`.
    pub fn t_grid(&self, k: usize) -> Vec<f64> {
        let t_max = self.params(0.0).t_max();
        (0..k).map(|j| t_max * j as f64 / (k - 1) as f64).collect()
    }
}

fn atoms(pairs: &[(f64, f64)]) -> Marginal {
    Marginal::discrete(pairs.iter().map(|&(x, p)| Atom { x, p }).collect()).unwrap()
}

fn entry(name: &'static str, model: JointModel, a: f64, b: f64, c: Option<f64>) -> ZooEntry {
    let c = c.unwrap_or_else(|| model.tightest_common_c(model.n()).unwrap());
    ZooEntry { name, model, a, b, c }
}

/// Small enumerable models, all with n ≤ 4, that satisfy the moment
/// condition for the recorded `c`.
pub fn small_zoo() -> Vec<ZooEntry> {
    vec![
        entry(
            "boolean_iid(0.5), n=4",
            JointModel::boolean_iid(4, 0.5).unwrap(),
            0.0,
            1.0,
            Some(0.5),
        ),
        entry(
            "boolean_iid(0.25), n=3",
            JointModel::boolean_iid(3, 0.25).unwrap(),
            0.0,
            1.0,
            Some(0.25),
        ),
        entry(
            "boolean_iid(0.8), n=1",
            JointModel::boolean_iid(1, 0.8).unwrap(),
            0.0,
            1.0,
            Some(0.8),
        ),
        entry(
            "independent atoms, n=4",
            JointModel::independent(vec![
                Marginal::bernoulli(0.3).unwrap(),
                atoms(&[(0.0, 0.2), (0.5, 0.5), (1.0, 0.3)]),
                atoms(&[(0.25, 0.5), (0.75, 0.5)]),
                Marginal::bernoulli(0.8).unwrap(),
            ])
            .unwrap(),
            0.0,
            1.0,
            None,
        ),
        entry(
            "planted_clique k=2 of 4",
            JointModel::planted_clique(4, &[0, 1], Marginal::bernoulli(0.5).unwrap()).unwrap(),
            0.0,
            1.0,
            None,
        ),
        entry(
            "exchangeable_mixture rho=0.3, n=4",
            JointModel::exchangeable_mixture(4, 0.3, atoms(&[(0.0, 0.4), (0.6, 0.3), (1.0, 0.3)])).unwrap(),
            0.0,
            1.0,
            None,
        ),
        entry(
            "explicit_table, n=3, shifted range",
            JointModel::explicit_table(vec![
                SupportPoint {
                    x: vec![0.0, 1.0, 0.5],
                    p: 0.25,
                },
                SupportPoint {
                    x: vec![1.0, 0.0, 0.5],
                    p: 0.25,
                },
                SupportPoint {
                    x: vec![0.2, 0.2, 1.0],
                    p: 0.3,
                },
                SupportPoint {
                    x: vec![0.9, 0.7, 0.0],
                    p: 0.2,
                },
            ])
            .unwrap(),
            -0.2,
            1.4,
            None,
        ),
    ]
}

/// The small zoo plus larger product-form and dependent models.
pub fn full_zoo() -> Vec<ZooEntry> {
    let mut zoo = small_zoo();
    zoo.push(entry(
        "boolean_iid(0.4), n=10",
        JointModel::boolean_iid(10, 0.4).unwrap(),
        0.0,
        1.0,
        Some(0.4),
    ));
    zoo.push(entry(
        "shared bit p=0.7, n=10",
        JointModel::planted_clique(10, &(0..10).collect::<Vec<_>>(), Marginal::bernoulli(0.7).unwrap()).unwrap(),
        0.0,
        1.0,
        None,
    ));
    zoo
}
