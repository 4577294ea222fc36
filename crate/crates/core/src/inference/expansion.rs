use std::time::Instant;

use super::builder::MoveBuilder;
use super::{improves, initial_labeling, label_orders, total_energy, EnergyModel, SolveOptions, SolveReport};
use crate::error::Result;

/// Alpha-expansion. Requires a metric pairwise term.
///
/// Label costs are handled exactly inside each move: every label currently in
/// use other than alpha gets an auxiliary node that charges its cost unless all
/// of its nodes switch to alpha, and an unused alpha gets one that charges its
/// cost as soon as any node switches.
pub fn alpha_expansion(model: &EnergyModel, options: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    model.check_metric()?;
    let mut order = label_orders(model.num_labels(), options)?;
    let mut labels = initial_labeling(model)?;
    let mut energy = total_energy(model, &labels);
    let mut trace = vec![energy];
    let mut builder = MoveBuilder::default();
    let mut moves = 0;
    let mut sweeps = 0;
    let mut converged = false;

    while sweeps < options.max_sweeps {
        sweeps += 1;
        let mut accepted = false;
        for alpha in order.next_sweep() {
            let Some(candidate) = expansion_move(model, &labels, alpha, &mut builder) else {
                continue;
            };
            let e = total_energy(model, &candidate);
            if improves(e, energy) {
                labels = candidate;
                energy = e;
                trace.push(e);
                moves += 1;
                accepted = true;
            }
        }
        if !accepted {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        labels,
        energy,
        trace,
        sweeps,
        moves,
        converged,
        elapsed: start.elapsed(),
    })
}

/// Optimal labeling within one alpha-expansion of `labels`, or `None` if no node can move.
pub(crate) fn expansion_move(
    model: &EnergyModel,
    labels: &[usize],
    alpha: usize,
    b: &mut MoveBuilder,
) -> Option<Vec<usize>> {
    let n = model.num_nodes();
    b.reset(n);
    for (i, &l) in labels.iter().enumerate() {
        if l != alpha && model.feasible(i, alpha) {
            b.add_var(i, model.unary(i, l), model.unary(i, alpha));
        }
    }
    if b.vars().is_empty() {
        return None;
    }
    b.begin_network();

    for (k, &(i, j)) in model.edges().iter().enumerate() {
        let (li, lj) = (labels[i], labels[j]);
        match (b.var(i), b.var(j)) {
            (None, None) => {}
            (Some(vi), None) => b.add_unary(vi, model.pairwise(k, li, lj), model.pairwise(k, alpha, lj)),
            (None, Some(vj)) => b.add_unary(vj, model.pairwise(k, li, lj), model.pairwise(k, li, alpha)),
            (Some(vi), Some(vj)) => {
                let a = model.pairwise(k, li, lj);
                let bb = model.pairwise(k, li, alpha);
                let c = model.pairwise(k, alpha, lj);
                b.add_pair(vi, vj, a, bb, c, 0.0);
            }
        }
    }

    if let Some(costs) = model.label_costs() {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); model.num_labels()];
        let mut pinned = vec![false; model.num_labels()];
        for (i, &l) in labels.iter().enumerate() {
            match b.var(i) {
                Some(v) => members[l].push(v),
                None => pinned[l] = true,
            }
        }
        for (l, vars) in members.iter().enumerate() {
            if l != alpha && !pinned[l] {
                b.charge_if_any_zero(vars, costs[l]);
            }
        }
        if !pinned[alpha] {
            let all: Vec<usize> = (0..b.vars().len()).collect();
            b.charge_if_any_one(&all, costs[alpha]);
        }
    }

    let switch = b.solve();
    let mut out = labels.to_vec();
    let mut changed = false;
    for (v, &node) in b.vars().iter().enumerate() {
        if switch[v] {
            out[node] = alpha;
            changed = true;
        }
    }
    changed.then_some(out)
}
