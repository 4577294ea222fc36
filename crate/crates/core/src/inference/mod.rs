//! Move-making inference over pairwise energies with optional label costs.

mod brute;
mod builder;
mod expansion;
mod swap;

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::potentials::FORBIDDEN;

pub use brute::{brute_force, BRUTE_FORCE_LIMIT};
pub use expansion::alpha_expansion;
pub use swap::alpha_beta_swap;

/// One weighted label-distance term: `weights[e] * distance[a][b]` on edge `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseComponent {
    weights: Vec<f64>,
    distance: Vec<f64>,
}

impl PairwiseComponent {
    fn at(&self, num_labels: usize, edge: usize, a: usize, b: usize) -> f64 {
        self.weights[edge] * self.distance[a * num_labels + b]
    }
}

/// A pairwise energy over a fixed graph and label set.
///
/// The pairwise term is a sum of components, each a per-edge nonnegative
/// weight times a symmetric label distance with a zero diagonal. Unaries at or
/// above [`FORBIDDEN`] mark infeasible (node, label) combinations.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyModel {
    num_labels: usize,
    num_nodes: usize,
    unary: Vec<f64>,
    edges: Vec<(usize, usize)>,
    components: Vec<PairwiseComponent>,
    label_costs: Option<Vec<f64>>,
}

impl EnergyModel {
    /// A model with zero unaries and no pairwise components.
    pub fn new(num_labels: usize, num_nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        assert!(num_labels > 0, "empty label set");
        assert!(
            edges.iter().all(|&(i, j)| i < num_nodes && j < num_nodes && i != j),
            "bad edge"
        );
        Self {
            num_labels,
            num_nodes,
            unary: vec![0.0; num_labels * num_nodes],
            edges,
            components: Vec::new(),
            label_costs: None,
        }
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn set_unary(&mut self, node: usize, label: usize, energy: f64) {
        assert!(energy >= 0.0, "unary energies are nonnegative");
        self.unary[node * self.num_labels + label] = energy.min(FORBIDDEN);
    }

    pub fn unary(&self, node: usize, label: usize) -> f64 {
        self.unary[node * self.num_labels + label]
    }

    pub fn feasible(&self, node: usize, label: usize) -> bool {
        self.unary(node, label) < FORBIDDEN
    }

    /// Adds a component with an explicit `num_labels x num_labels` distance (row major).
    pub fn add_component(&mut self, weights: Vec<f64>, distance: Vec<f64>) -> Result<()> {
        let l = self.num_labels;
        if weights.len() != self.edges.len() || distance.len() != l * l {
            return Err(Error::InvalidArgument("pairwise component has the wrong shape".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument("pairwise weights must be nonnegative".into()));
        }
        for a in 0..l {
            if distance[a * l + a] != 0.0 {
                return Err(Error::InvalidArgument(format!("distance({a},{a}) must be 0")));
            }
            for b in 0..l {
                let d = distance[a * l + b];
                if !(d.is_finite() && d >= 0.0) || d != distance[b * l + a] {
                    return Err(Error::InvalidArgument(format!(
                        "distance({a},{b}) must be finite, nonnegative and symmetric"
                    )));
                }
            }
        }
        self.components.push(PairwiseComponent { weights, distance });
        Ok(())
    }

    /// Potts term charging `weights[e]` whenever the classes of the two labels differ.
    pub fn add_class_potts(&mut self, weights: Vec<f64>, classes: &[usize]) -> Result<()> {
        if classes.len() != self.num_labels {
            return Err(Error::InvalidArgument("class map has the wrong length".into()));
        }
        let l = self.num_labels;
        let mut d = vec![0.0; l * l];
        for a in 0..l {
            for b in 0..l {
                if classes[a] != classes[b] {
                    d[a * l + b] = 1.0;
                }
            }
        }
        self.add_component(weights, d)
    }

    /// Plain Potts term over labels.
    pub fn add_potts(&mut self, weights: Vec<f64>) -> Result<()> {
        let classes: Vec<usize> = (0..self.num_labels).collect();
        self.add_class_potts(weights, &classes)
    }

    pub fn pairwise(&self, edge: usize, a: usize, b: usize) -> f64 {
        self.components.iter().map(|c| c.at(self.num_labels, edge, a, b)).sum()
    }

    pub fn set_label_costs(&mut self, costs: Vec<f64>) -> Result<()> {
        if costs.len() != self.num_labels || costs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidArgument(
                "label costs must be one finite nonnegative value per label".into(),
            ));
        }
        self.label_costs = Some(costs);
        Ok(())
    }

    pub fn clear_label_costs(&mut self) {
        self.label_costs = None;
    }

    pub fn label_costs(&self) -> Option<&[f64]> {
        self.label_costs.as_deref()
    }

    pub fn label_cost(&self, label: usize) -> f64 {
        self.label_costs.as_ref().map_or(0.0, |c| c[label])
    }

    /// Checks the triangle inequality for every component's distance.
    pub fn check_metric(&self) -> Result<()> {
        let l = self.num_labels;
        for (k, c) in self.components.iter().enumerate() {
            let d = &c.distance;
            for a in 0..l {
                for b in 0..l {
                    for m in 0..l {
                        if d[a * l + b] > d[a * l + m] + d[m * l + b] + 1e-12 {
                            return Err(Error::NotMetric(format!(
                                "component {k}: d({a},{b}) > d({a},{m}) + d({m},{b})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Σ unary + Σ pairwise + Σ cost of every label in use.
pub fn total_energy(model: &EnergyModel, labels: &[usize]) -> f64 {
    assert_eq!(labels.len(), model.num_nodes, "labeling length mismatch");
    let mut e: f64 = labels.iter().enumerate().map(|(i, &l)| model.unary(i, l)).sum();
    for (k, &(i, j)) in model.edges.iter().enumerate() {
        e += model.pairwise(k, labels[i], labels[j]);
    }
    if let Some(costs) = &model.label_costs {
        let mut used = vec![false; model.num_labels];
        for &l in labels {
            used[l] = true;
        }
        e += costs
            .iter()
            .zip(&used)
            .filter(|(_, u)| **u)
            .map(|(c, _)| c)
            .sum::<f64>();
    }
    e
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Upper bound on full passes over the labels; at least 1.
    pub max_sweeps: usize,
    /// When set, each sweep visits labels in an order shuffled by this seed.
    pub seed: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 10,
            seed: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub labels: Vec<usize>,
    pub energy: f64,
    /// Energy of the initial labeling followed by the energy after each accepted move.
    pub trace: Vec<f64>,
    pub sweeps: usize,
    pub moves: usize,
    /// Whether the last sweep accepted no move.
    pub converged: bool,
    pub elapsed: Duration,
}

/// Per-node feasible unary argmin, lowest label on ties.
pub fn initial_labeling(model: &EnergyModel) -> Result<Vec<usize>> {
    (0..model.num_nodes)
        .map(|i| {
            let mut best: Option<(usize, f64)> = None;
            for l in 0..model.num_labels {
                let u = model.unary(i, l);
                if u < FORBIDDEN && best.is_none_or(|(_, b)| u < b) {
                    best = Some((l, u));
                }
            }
            best.map(|(l, _)| l).ok_or(Error::Infeasible(i))
        })
        .collect()
}

pub(crate) fn label_orders(num_labels: usize, options: &SolveOptions) -> Result<LabelOrder> {
    if options.max_sweeps == 0 {
        return Err(Error::InvalidArgument("max sweeps must be at least 1".into()));
    }
    Ok(LabelOrder {
        labels: (0..num_labels).collect(),
        rng: options.seed.map(ChaCha8Rng::seed_from_u64),
    })
}

pub(crate) struct LabelOrder {
    labels: Vec<usize>,
    rng: Option<ChaCha8Rng>,
}

impl LabelOrder {
    pub(crate) fn next_sweep(&mut self) -> Vec<usize> {
        if let Some(rng) = &mut self.rng {
            self.labels.shuffle(rng);
        }
        self.labels.clone()
    }
}

/// True when `candidate` is a strict improvement over `current` beyond rounding noise.
pub(crate) fn improves(candidate: f64, current: f64) -> bool {
    candidate < current - 1e-10 * current.abs().max(1.0)
}
