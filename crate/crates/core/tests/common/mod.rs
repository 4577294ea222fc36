//! Random instance builders and independent reference computations shared by
//! the integration tests.
#![allow(dead_code)]

use actorseg::inference::EnergyModel;
use actorseg::maxflow::{FlowNetwork, Side};
use actorseg::{Edge, Instance, LabelSpace, Node, Thetas};
use rand::Rng;

/// Random connected-ish graph: a spanning path plus a few extra edges.
pub fn random_edges<R: Rng>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..n / 2 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j && !edges.contains(&(i, j)) && !edges.contains(&(j, i)) {
            edges.push((i, j));
        }
    }
    edges
}

/// `w x h` 4-neighbour lattice, node id `y * w + x`.
pub fn lattice_edges(w: usize, h: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                e.push((i, i + 1));
            }
            if y + 1 < h {
                e.push((i, i + w));
            }
        }
    }
    e
}

/// Random Potts model with optional label costs.
pub fn random_potts<R: Rng>(
    rng: &mut R,
    labels: usize,
    edges: Vec<(usize, usize)>,
    n: usize,
    costs: bool,
) -> EnergyModel {
    let weights: Vec<f64> = edges.iter().map(|_| rng.gen_range(0.0..2.0)).collect();
    let mut m = EnergyModel::new(labels, n, edges);
    for i in 0..n {
        for l in 0..labels {
            m.set_unary(i, l, rng.gen_range(0.0..3.0));
        }
    }
    m.add_potts(weights).unwrap();
    if costs {
        m.set_label_costs((0..labels).map(|_| rng.gen_range(0.0..3.0)).collect())
            .unwrap();
    }
    m
}

/// Scores in (0, 1], occasionally exactly 1.
pub fn random_score<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.1) {
        1.0
    } else {
        rng.gen_range(0.01..1.0)
    }
}

pub fn random_node<R: Rng>(rng: &mut R, space: &LabelSpace) -> Node {
    let mut v = |k: usize| (0..k).map(|_| random_score(rng)).collect::<Vec<_>>();
    Node {
        unary_actor: v(space.num_actors()),
        unary_action: v(space.num_actions()),
        unary_joint: v(space.num_tuples()),
        cond_action: v(space.num_valid()),
        cond_actor: v(space.num_valid()),
        pixels: Default::default(),
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, space: &LabelSpace, n: usize) -> Instance {
    let edges = random_edges(rng, n)
        .into_iter()
        .map(|(i, j)| Edge {
            i,
            j,
            chi2: rng.gen_range(0.0..3.0),
        })
        .collect();
    Instance {
        space: space.clone(),
        nodes: (0..n).map(|_| random_node(rng, space)).collect(),
        edges,
        thetas: Thetas {
            actor: rng.gen_range(0.1..2.0),
            action: rng.gen_range(0.1..2.0),
            joint: rng.gen_range(0.1..2.0),
        },
        video_scores: None,
        gt: None,
        frames: None,
    }
}

/// Two actors, two actions plus "none", three valid tuples: four labels with background.
pub fn small_space() -> LabelSpace {
    LabelSpace::new(
        &["person", "dog"],
        &["walking", "none"],
        &[("person", "walking"), ("person", "none"), ("dog", "walking")],
    )
    .unwrap()
}

/// Capacity of an s-t cut computed from an explicit arc list.
pub struct ArcList {
    pub n: usize,
    pub terminals: Vec<(f64, f64)>,
    pub arcs: Vec<(usize, usize, f64, f64)>,
}

impl ArcList {
    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let cap = |rng: &mut R| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.0..5.0)
            }
        };
        let terminals = (0..n).map(|_| (cap(rng), cap(rng))).collect();
        let mut arcs = Vec::new();
        for _ in 0..rng.gen_range(0..=2 * n) {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                arcs.push((i, j, cap(rng), cap(rng)));
            }
        }
        Self { n, terminals, arcs }
    }

    pub fn network(&self) -> FlowNetwork {
        let mut g = FlowNetwork::new(self.n);
        for (i, &(s, t)) in self.terminals.iter().enumerate() {
            g.add_terminal(i, s, t);
        }
        for &(i, j, c, r) in &self.arcs {
            g.add_edge(i, j, c, r);
        }
        g
    }

    /// `in_source[i]` says whether node `i` is on the source side.
    pub fn cut(&self, in_source: &[bool]) -> f64 {
        let mut c = 0.0;
        for (i, &(s, t)) in self.terminals.iter().enumerate() {
            c += if in_source[i] { t } else { s };
        }
        for &(i, j, cap, rev) in &self.arcs {
            if in_source[i] && !in_source[j] {
                c += cap;
            }
            if in_source[j] && !in_source[i] {
                c += rev;
            }
        }
        c
    }

    /// Minimum over all 2^n cuts.
    pub fn brute_min_cut(&self) -> f64 {
        (0u32..1 << self.n)
            .map(|mask| {
                let sides: Vec<bool> = (0..self.n).map(|i| mask >> i & 1 == 1).collect();
                self.cut(&sides)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn sides_to_bool(sides: &[Side]) -> Vec<bool> {
    sides.iter().map(|s| *s == Side::Source).collect()
}

/// Unnormalized probability of a layered configuration, computed directly from
/// the score products. `x`, `y`, `z` are per-node actor, action and tuple
/// indices; the extra slot `num_actors()` / `num_actions()` is background.
pub fn layered_probability(inst: &Instance, x: &[usize], y: &[usize], z: &[usize]) -> f64 {
    let sp = &inst.space;
    let (bx, by, bz) = (sp.num_actors(), sp.num_actions(), sp.background());
    let mut p = 1.0;
    for (i, node) in inst.nodes.iter().enumerate() {
        let floor = |s: f64| s.max(1e-6);
        let phi = if x[i] == bx { 1.0 } else { floor(node.unary_actor[x[i]]) };
        let psi = if y[i] == by {
            1.0
        } else {
            floor(node.unary_action[y[i]])
        };
        let joint = floor(node.unary_joint[z[i]]);
        let (mu, nu) = if z[i] == bz {
            ((x[i] == bx) as u8 as f64, (y[i] == by) as u8 as f64)
        } else {
            let (zx, zy) = sp.valid_pairs()[z[i]];
            (
                if zx == x[i] { floor(node.cond_action[z[i]]) } else { 0.0 },
                if zy == y[i] { floor(node.cond_actor[z[i]]) } else { 0.0 },
            )
        };
        p *= phi * psi * joint * mu * nu;
    }
    for e in &inst.edges {
        let w = |theta: f64, same: bool| if same { 1.0 } else { (-theta / (1.0 + e.chi2)).exp() };
        p *= w(inst.thetas.actor, x[e.i] == x[e.j])
            * w(inst.thetas.action, y[e.i] == y[e.j])
            * w(inst.thetas.joint, z[e.i] == z[e.j]);
    }
    p
}

/// Redraws every node score uniformly from `[lo, 1)`, which removes exact ties.
pub fn redraw_scores<R: Rng>(rng: &mut R, inst: &mut Instance, lo: f64) {
    for n in &mut inst.nodes {
        for table in [
            &mut n.unary_actor,
            &mut n.unary_action,
            &mut n.unary_joint,
            &mut n.cond_action,
            &mut n.cond_actor,
        ] {
            for s in table.iter_mut() {
                *s = rng.gen_range(lo..1.0);
            }
        }
    }
}
