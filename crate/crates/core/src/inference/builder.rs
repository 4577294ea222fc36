//! Binary move energies as flow networks.
//!
//! Variable `x = 0` keeps a node on the source side, `x = 1` puts it on the
//! sink side. Unary costs of `x = 1` become source links, costs of `x = 0`
//! become sink links, so the cut capacity equals the move energy up to a
//! constant.

use crate::maxflow::{FlowNetwork, Side};

const NO_VAR: u32 = u32::MAX;

#[derive(Default)]
pub(crate) struct MoveBuilder {
    pub(crate) net: FlowNetwork,
    var_of: Vec<u32>,
    nodes: Vec<usize>,
    cost0: Vec<f64>,
    cost1: Vec<f64>,
}

impl MoveBuilder {
    pub(crate) fn reset(&mut self, num_nodes: usize) {
        self.var_of.clear();
        self.var_of.resize(num_nodes, NO_VAR);
        self.nodes.clear();
        self.cost0.clear();
        self.cost1.clear();
    }

    /// Registers `node` as a binary variable.
    pub(crate) fn add_var(&mut self, node: usize, cost0: f64, cost1: f64) {
        self.var_of[node] = self.nodes.len() as u32;
        self.nodes.push(node);
        self.cost0.push(cost0);
        self.cost1.push(cost1);
    }

    pub(crate) fn var(&self, node: usize) -> Option<usize> {
        let v = self.var_of[node];
        (v != NO_VAR).then_some(v as usize)
    }

    pub(crate) fn vars(&self) -> &[usize] {
        &self.nodes
    }

    pub(crate) fn add_unary(&mut self, var: usize, cost0: f64, cost1: f64) {
        self.cost0[var] += cost0;
        self.cost1[var] += cost1;
    }

    /// Starts the network once all variables are known.
    pub(crate) fn begin_network(&mut self) {
        self.net.clear(self.nodes.len());
    }

    /// Adds the pairwise table `E(0,0)=a, E(0,1)=b, E(1,0)=c, E(1,1)=d`.
    /// Requires `a + d <= b + c` up to rounding.
    pub(crate) fn add_pair(&mut self, vi: usize, vj: usize, a: f64, b: f64, c: f64, d: f64) {
        // E = a + (c-a) x_i + (d-c) x_j + (b+c-a-d)(1-x_i) x_j
        self.add_unary(vi, 0.0, c - a);
        self.add_unary(vj, 0.0, d - c);
        self.cost0[vi] += a;
        let w = b + c - a - d;
        debug_assert!(w > -1e-9, "non-submodular pair term {w}");
        if w > 0.0 {
            self.net.add_edge(vi, vj, w, 0.0);
        }
    }

    /// `cost` is charged if any of `vars` takes `x = 0`.
    pub(crate) fn charge_if_any_zero(&mut self, vars: &[usize], cost: f64) {
        if cost <= 0.0 || vars.is_empty() {
            return;
        }
        let y = self.net.add_node();
        self.net.add_terminal(y, 0.0, cost);
        for &v in vars {
            self.net.add_edge(v, y, cost, 0.0);
        }
    }

    /// `cost` is charged if any of `vars` takes `x = 1`.
    pub(crate) fn charge_if_any_one(&mut self, vars: &[usize], cost: f64) {
        if cost <= 0.0 || vars.is_empty() {
            return;
        }
        let z = self.net.add_node();
        self.net.add_terminal(z, cost, 0.0);
        for &v in vars {
            self.net.add_edge(z, v, cost, 0.0);
        }
    }

    /// Solves the cut; returns the variables that ended with `x = 1`.
    pub(crate) fn solve(&mut self) -> Vec<bool> {
        for v in 0..self.nodes.len() {
            let (c0, c1) = (self.cost0[v], self.cost1[v]);
            let m = c0.min(c1);
            self.net.add_terminal(v, c1 - m, c0 - m);
        }
        self.net.max_flow();
        (0..self.nodes.len()).map(|v| self.net.side(v) == Side::Sink).collect()
    }
}
