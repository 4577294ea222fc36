use std::time::Instant;

use super::builder::MoveBuilder;
use super::{improves, initial_labeling, label_orders, total_energy, EnergyModel, SolveOptions, SolveReport};
use crate::error::Result;

/// Alpha-beta swap. Only needs a semi-metric pairwise term, which every
/// [`EnergyModel`] component already is.
pub fn alpha_beta_swap(model: &EnergyModel, options: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
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
        let sweep = order.next_sweep();
        for (p, &alpha) in sweep.iter().enumerate() {
            for &beta in &sweep[p + 1..] {
                let Some(candidate) = swap_move(model, &labels, alpha, beta, &mut builder) else {
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

/// Optimal relabeling of the alpha/beta nodes among {alpha, beta}; `x = 0` is alpha.
pub(crate) fn swap_move(
    model: &EnergyModel,
    labels: &[usize],
    alpha: usize,
    beta: usize,
    b: &mut MoveBuilder,
) -> Option<Vec<usize>> {
    b.reset(model.num_nodes());
    let mut pinned_alpha = false;
    let mut pinned_beta = false;
    for (i, &l) in labels.iter().enumerate() {
        if l != alpha && l != beta {
            continue;
        }
        if model.feasible(i, alpha) && model.feasible(i, beta) {
            b.add_var(i, model.unary(i, alpha), model.unary(i, beta));
        } else if l == alpha {
            pinned_alpha = true;
        } else {
            pinned_beta = true;
        }
    }
    if b.vars().is_empty() {
        return None;
    }
    b.begin_network();

    for (k, &(i, j)) in model.edges().iter().enumerate() {
        match (b.var(i), b.var(j)) {
            (None, None) => {}
            (Some(vi), None) => {
                let lj = labels[j];
                b.add_unary(vi, model.pairwise(k, alpha, lj), model.pairwise(k, beta, lj));
            }
            (None, Some(vj)) => {
                let li = labels[i];
                b.add_unary(vj, model.pairwise(k, li, alpha), model.pairwise(k, li, beta));
            }
            (Some(vi), Some(vj)) => {
                let a = model.pairwise(k, alpha, alpha);
                let bb = model.pairwise(k, alpha, beta);
                let c = model.pairwise(k, beta, alpha);
                let d = model.pairwise(k, beta, beta);
                b.add_pair(vi, vj, a, bb, c, d);
            }
        }
    }

    if let Some(costs) = model.label_costs() {
        let all: Vec<usize> = (0..b.vars().len()).collect();
        if !pinned_alpha {
            b.charge_if_any_zero(&all, costs[alpha]);
        }
        if !pinned_beta {
            b.charge_if_any_one(&all, costs[beta]);
        }
    }

    let to_beta = b.solve();
    let mut out = labels.to_vec();
    let mut changed = false;
    for (v, &node) in b.vars().iter().enumerate() {
        let l = if to_beta[v] { beta } else { alpha };
        if out[node] != l {
            out[node] = l;
            changed = true;
        }
    }
    changed.then_some(out)
}
