//! Segmentation, recognition and track metrics.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, Labeling, Node, NodeLabel};
use crate::tracks::{Track, TrackSet};

/// Grid cell carrying no ground truth.
pub const UNLABELED: u32 = u32::MAX;
/// Prediction that is not a valid tuple; never matches any class.
pub const INVALID: u32 = u32::MAX - 1;

/// Row-major grid of tuple codes for one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameGrid {
    pub frame: usize,
    pub width: u32,
    pub height: u32,
    pub cells: Vec<u32>,
}

impl FrameGrid {
    pub fn filled(frame: usize, width: u32, height: u32, code: u32) -> Self {
        Self {
            frame,
            width,
            height,
            cells: vec![code; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.cells[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, code: u32) {
        let w = self.width as usize;
        self.cells[y as usize * w + x as usize] = code;
    }

    fn in_bounds(&self, x: u32, y: u32) -> bool {
        x < self.width && y < self.height
    }
}

fn code_of(label: NodeLabel) -> u32 {
    label.tuple().map_or(INVALID, |t| t as u32)
}

fn paint<F: Fn(usize) -> u32>(inst: &Instance, fill: u32, code: F) -> Result<Vec<FrameGrid>> {
    let info = inst
        .frames
        .ok_or_else(|| Error::Evaluation("instance has no frames section".into()))?;
    if !inst.has_pixels() {
        return Err(Error::Evaluation("instance has no pixel masks".into()));
    }
    let mut grids: Vec<FrameGrid> = (0..info.count)
        .map(|f| FrameGrid::filled(f, info.width, info.height, fill))
        .collect();
    for (i, node) in inst.nodes.iter().enumerate() {
        let c = code(i);
        for (&f, pixels) in &node.pixels {
            let grid = grids
                .get_mut(f)
                .ok_or_else(|| Error::Evaluation(format!("node {i} references frame {f}")))?;
            for &(x, y) in pixels {
                if !grid.in_bounds(x, y) {
                    return Err(Error::Evaluation(format!(
                        "node {i} pixel ({x}, {y}) outside frame {f}"
                    )));
                }
                grid.set(x, y, c);
            }
        }
    }
    Ok(grids)
}

/// Paints each node's label onto its pixels; unlisted pixels are background.
pub fn project_labeling(inst: &Instance, labeling: &Labeling) -> Result<Vec<FrameGrid>> {
    if labeling.len() != inst.num_nodes() {
        return Err(Error::Evaluation(format!(
            "labeling has {} entries for {} nodes",
            labeling.len(),
            inst.num_nodes()
        )));
    }
    paint(inst, inst.space.background() as u32, |i| code_of(labeling.labels[i]))
}

/// Paints the node-level ground truth; unlisted pixels and unlabeled nodes
/// stay [`UNLABELED`].
pub fn project_ground_truth(inst: &Instance, gt: &[Option<usize>]) -> Result<Vec<FrameGrid>> {
    if gt.len() != inst.num_nodes() {
        return Err(Error::Evaluation("ground truth length mismatch".into()));
    }
    paint(inst, UNLABELED, |i| gt[i].map_or(UNLABELED, |t| t as u32))
}

/// Node-level ground truth by majority over labeled pixels; ties go to the
/// lower tuple index and nodes without labeled pixels get `None`.
///
/// Pixels on frames absent from `frames` are simply not annotated.
pub fn majority_vote_gt(frames: &[FrameGrid], nodes: &[Node]) -> Result<Vec<Option<usize>>> {
    let by_frame: BTreeMap<usize, &FrameGrid> = frames.iter().map(|g| (g.frame, g)).collect();
    nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
            for (f, pixels) in &node.pixels {
                let Some(grid) = by_frame.get(f) else { continue };
                for &(x, y) in pixels {
                    if !grid.in_bounds(x, y) {
                        return Err(Error::Evaluation(format!(
                            "node {i} pixel ({x}, {y}) outside frame {f}"
                        )));
                    }
                    let c = grid.get(x, y);
                    if c != UNLABELED && c != INVALID {
                        *votes.entry(c).or_default() += 1;
                    }
                }
            }
            // BTreeMap iterates in ascending code order, so keeping only
            // strictly larger counts breaks ties toward the lower index.
            let mut best: Option<(u32, usize)> = None;
            for (c, n) in votes {
                if best.is_none_or(|(_, m)| n > m) {
                    best = Some((c, n));
                }
            }
            Ok(best.map(|(c, _)| c as usize))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassAccuracy {
    /// `(class, accuracy)` for every class with ground-truth pixels, ascending.
    pub per_class: Vec<(usize, f64)>,
    pub mean: f64,
}

/// Average per-class pixel accuracy over frames that carry ground truth.
pub fn per_class_accuracy(pred: &[FrameGrid], gt: &[FrameGrid]) -> Result<ClassAccuracy> {
    let by_frame: BTreeMap<usize, &FrameGrid> = pred.iter().map(|g| (g.frame, g)).collect();
    let mut counts: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for g in gt {
        if g.cells.iter().all(|&c| c == UNLABELED) {
            continue;
        }
        let p = by_frame
            .get(&g.frame)
            .ok_or_else(|| Error::Evaluation(format!("no prediction for frame {}", g.frame)))?;
        if p.cells.len() != g.cells.len() {
            return Err(Error::Evaluation(format!("frame {} size mismatch", g.frame)));
        }
        for (&t, &q) in g.cells.iter().zip(&p.cells) {
            if t == UNLABELED {
                continue;
            }
            let e = counts.entry(t).or_default();
            e.1 += 1;
            if q == t {
                e.0 += 1;
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::Evaluation("ground truth has no labeled pixels".into()));
    }
    let per_class: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(c, (hit, total))| (c as usize, hit as f64 / total as f64))
        .collect();
    let mean = per_class.iter().map(|(_, a)| a).sum::<f64>() / per_class.len() as f64;
    Ok(ClassAccuracy { per_class, mean })
}

/// Per-class accuracy of a labeling against the instance ground truth. Pixel
/// masks are used when present; otherwise every node counts as one cell.
pub fn segmentation_accuracy(inst: &Instance, labeling: &Labeling) -> Result<ClassAccuracy> {
    let gt = inst
        .gt
        .as_ref()
        .ok_or_else(|| Error::Evaluation("instance has no ground truth".into()))?;
    if inst.has_pixels() && inst.frames.is_some() {
        return per_class_accuracy(&project_labeling(inst, labeling)?, &project_ground_truth(inst, gt)?);
    }
    if labeling.len() != gt.len() {
        return Err(Error::Evaluation(format!(
            "labeling has {} nodes, ground truth {}",
            labeling.len(),
            gt.len()
        )));
    }
    let row = |cells: Vec<u32>| FrameGrid {
        frame: 0,
        width: cells.len() as u32,
        height: 1,
        cells,
    };
    let pred = row(labeling.labels.iter().map(|&l| code_of(l)).collect());
    let truth = row(gt.iter().map(|g| g.map_or(UNLABELED, |t| t as u32)).collect());
    per_class_accuracy(&[pred], &[truth])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleLabelAccuracy {
    pub actor: f64,
    pub action: f64,
    pub tuple: f64,
}

/// Video-level accuracy over `(actor, action)` predictions; a tuple counts
/// only when both halves are right.
pub fn single_label_accuracy(pred: &[(usize, usize)], gt: &[(usize, usize)]) -> Result<SingleLabelAccuracy> {
    if pred.len() != gt.len() {
        return Err(Error::Evaluation(format!(
            "{} predictions for {} videos",
            pred.len(),
            gt.len()
        )));
    }
    if gt.is_empty() {
        return Err(Error::Evaluation("no videos".into()));
    }
    let n = gt.len() as f64;
    let frac = |f: fn(&(usize, usize), &(usize, usize)) -> bool| {
        pred.iter().zip(gt).filter(|(p, g)| f(p, g)).count() as f64 / n
    };
    Ok(SingleLabelAccuracy {
        actor: frac(|p, g| p.0 == g.0),
        action: frac(|p, g| p.1 == g.1),
        tuple: frac(|p, g| p == g),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanAveragePrecision {
    /// `None` for classes with no relevant video.
    pub per_class: Vec<Option<f64>>,
    pub map: f64,
}

/// Average precision of one ranking. Equal scores keep input order.
pub fn average_precision(scores: &[f64], relevant: &[bool]) -> Option<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &v) in order.iter().enumerate() {
        if relevant[v] {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    (hits > 0).then(|| sum / hits as f64)
}

/// `scores[v][c]` and `relevance[v][c]` for video `v`, class `c`.
pub fn mean_average_precision(scores: &[Vec<f64>], relevance: &[Vec<bool>]) -> Result<MeanAveragePrecision> {
    if scores.len() != relevance.len() {
        return Err(Error::Evaluation("score and relevance row counts differ".into()));
    }
    let classes = scores.first().map_or(0, Vec::len);
    if scores.iter().any(|r| r.len() != classes) || relevance.iter().any(|r| r.len() != classes) {
        return Err(Error::Evaluation("ragged score or relevance rows".into()));
    }
    let per_class: Vec<Option<f64>> = (0..classes)
        .map(|c| {
            let s: Vec<f64> = scores.iter().map(|r| r[c]).collect();
            let r: Vec<bool> = relevance.iter().map(|r| r[c]).collect();
            average_precision(&s, &r)
        })
        .collect();
    let present: Vec<f64> = per_class.iter().flatten().copied().collect();
    if present.is_empty() {
        return Err(Error::Evaluation("no class has a relevant video".into()));
    }
    let map = present.iter().sum::<f64>() / present.len() as f64;
    Ok(MeanAveragePrecision { per_class, map })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackRecall {
    pub covered: usize,
    pub frames: usize,
    pub recall: f64,
    pub hit: bool,
}

fn covered_frames(grids: &[FrameGrid], track: &Track) -> Result<usize> {
    let by_frame: BTreeMap<usize, &FrameGrid> = grids.iter().map(|g| (g.frame, g)).collect();
    let label = track.label as u32;
    let mut covered = 0;
    for (f, b) in track.frames() {
        let g = by_frame
            .get(&f)
            .ok_or_else(|| Error::Evaluation(format!("track {} needs frame {f}", track.id)))?;
        let hit = (b.y0..=b.y1.min(g.height.saturating_sub(1)))
            .any(|y| (b.x0..=b.x1.min(g.width.saturating_sub(1))).any(|x| g.get(x, y) == label));
        covered += hit as usize;
    }
    Ok(covered)
}

fn passes(covered: usize, frames: usize, sigma: f64) -> bool {
    let r = covered as f64 / frames as f64;
    if sigma == 0.0 {
        covered > 0
    } else {
        r >= sigma - 1e-9
    }
}

/// Fraction of the track's frames whose box holds at least one pixel with the
/// track's label. At `sigma = 0` a hit needs `R > 0`; otherwise `R >= sigma`.
pub fn track_recall(grids: &[FrameGrid], track: &Track, sigma: f64) -> Result<TrackRecall> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::Evaluation(format!("sigma {sigma} outside [0, 1]")));
    }
    let covered = covered_frames(grids, track)?;
    let frames = track.len();
    Ok(TrackRecall {
        covered,
        frames,
        recall: covered as f64 / frames as f64,
        hit: passes(covered, frames, sigma),
    })
}

/// Recall at `sigma = 0.0, 0.1, ..., 1.0`.
pub fn recall_curve(grids: &[FrameGrid], set: &TrackSet) -> Result<[f64; 11]> {
    if set.tracks.is_empty() {
        return Err(Error::Evaluation("track set is empty".into()));
    }
    let coverage = set
        .tracks
        .iter()
        .map(|t| Ok((covered_frames(grids, t)?, t.len())))
        .collect::<Result<Vec<_>>>()?;
    let k = set.tracks.len() as f64;
    let mut curve = [0.0; 11];
    for (step, point) in curve.iter_mut().enumerate() {
        // Integer comparison keeps sigma = 0.3 etc. free of rounding.
        let hits = coverage
            .iter()
            .filter(|&&(c, m)| if step == 0 { c > 0 } else { c * 10 >= step * m })
            .count();
        *point = hits as f64 / k;
    }
    Ok(curve)
}
