use super::{total_energy, EnergyModel};
use crate::error::{Error, Result};

/// Largest number of labelings [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

/// Exhaustive minimum of [`total_energy`]; ties go to the lexicographically
/// smallest labeling.
pub fn brute_force(model: &EnergyModel) -> Result<(Vec<usize>, f64)> {
    let n = model.num_nodes();
    let l = model.num_labels();
    let space = (l as f64).powi(n as i32);
    if space > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchSpace { labels: l, nodes: n });
    }
    let mut labels = vec![0usize; n];
    let mut best = labels.clone();
    let mut best_e = total_energy(model, &labels);
    loop {
        // odometer, last node fastest: visits labelings in lexicographic order
        let mut k = n;
        loop {
            if k == 0 {
                return Ok((best, best_e));
            }
            k -= 1;
            labels[k] += 1;
            if labels[k] < l {
                break;
            }
            labels[k] = 0;
        }
        let e = total_energy(model, &labels);
        if e < best_e {
            best_e = e;
            best.copy_from_slice(&labels);
        }
    }
}
