//! Synthetic instances with a planted labeling.
//!
//! Nodes are the cells of a `width x height` lattice with 4-neighbour edges.
//! A handful of regions are flood-grown from random seeds, each carrying one
//! tuple, and every score table is the planted indicator blended with uniform
//! noise.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Edge, FrameInfo, Instance, Node, Thetas};
use crate::label_space::LabelSpace;
use crate::tracks::{BoxRect, Track, TrackSet};

/// Smallest score the generator emits.
pub const SYNTH_FLOOR: f64 = 1e-3;
/// Default noise width: draws are `noise * spread * U(0, 1)` before renormalization.
pub const NOISE_SPREAD: f64 = 5.0;
/// Default smoothing strength, the same for all three layers.
pub const SYNTH_THETA: f64 = 0.15;
pub const DEFAULT_REGIONS: usize = 3;
const CHI2_INSIDE: f64 = 0.1;
const CHI2_ACROSS: f64 = 10.0;
const MIN_VIDEO_SCORE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SynthParams {
    pub space: LabelSpace,
    pub width: usize,
    pub height: usize,
    /// Noise level in `[0, 1)`.
    pub noise: f64,
    pub thetas: Thetas,
    pub regions: usize,
    /// Width of the noise draws relative to the planted signal.
    pub spread: f64,
}

impl SynthParams {
    pub fn new(space: LabelSpace, width: usize, height: usize, noise: f64) -> Self {
        Self {
            space,
            width,
            height,
            noise,
            thetas: Thetas {
                actor: SYNTH_THETA,
                action: SYNTH_THETA,
                joint: SYNTH_THETA,
            },
            regions: DEFAULT_REGIONS,
            spread: NOISE_SPREAD,
        }
    }

    fn check(&self) -> Result<()> {
        let cells = self.width * self.height;
        if cells == 0 {
            return Err(Error::InvalidArgument("lattice must have at least one cell".into()));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::InvalidArgument(format!("noise {} outside [0, 1)", self.noise)));
        }
        if self.regions == 0 || self.regions > cells {
            return Err(Error::InvalidArgument(format!(
                "region count {} must be between 1 and the {cells} lattice cells",
                self.regions
            )));
        }
        Ok(())
    }
}

/// Seed cells spread out by best-candidate sampling, which keeps regions
/// from starting next to each other and ending up a cell or two in size.
fn spread_seeds(rng: &mut ChaCha8Rng, w: usize, h: usize, regions: usize) -> Vec<usize> {
    const CANDIDATES: usize = 8;
    let dist = |a: usize, b: usize| (a % w).abs_diff(b % w) + (a / w).abs_diff(b / w);
    let mut seeds: Vec<usize> = Vec::with_capacity(regions);
    while seeds.len() < regions {
        let mut best: Option<(usize, usize)> = None;
        for _ in 0..CANDIDATES {
            let c = rng.gen_range(0..w * h);
            if seeds.contains(&c) {
                continue;
            }
            let d = seeds.iter().map(|&s| dist(s, c)).min().unwrap_or(0);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((c, d));
            }
        }
        if let Some((c, _)) = best {
            seeds.push(c);
        }
    }
    seeds
}

/// Region id per cell, flood-grown from `regions` seeds.
fn grow_regions(rng: &mut ChaCha8Rng, w: usize, h: usize, regions: usize) -> Vec<usize> {
    let n = w * h;
    let mut owner = vec![usize::MAX; n];
    let mut frontier = Vec::new();
    for (r, cell) in spread_seeds(rng, w, h, regions).into_iter().enumerate() {
        owner[cell] = r;
        frontier.push(cell);
    }
    while !frontier.is_empty() {
        let cell = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        let (x, y) = (cell % w, cell / w);
        let mut grow = |c: usize| {
            if owner[c] == usize::MAX {
                owner[c] = owner[cell];
                frontier.push(c);
            }
        };
        if x > 0 {
            grow(cell - 1);
        }
        if x + 1 < w {
            grow(cell + 1);
        }
        if y > 0 {
            grow(cell - w);
        }
        if y + 1 < h {
            grow(cell + w);
        }
    }
    owner
}

/// Distinct tuples while they last, then repeats.
fn region_tuples(rng: &mut ChaCha8Rng, space: &LabelSpace, regions: usize) -> Vec<usize> {
    let l = space.num_tuples();
    let mut out: Vec<usize> = sample(rng, l, regions.min(l)).into_vec();
    while out.len() < regions {
        out.push(rng.gen_range(0..l));
    }
    out
}

fn noisy_table(rng: &mut ChaCha8Rng, len: usize, planted: Option<usize>, noise: f64, spread: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..len)
        .map(|k| {
            let hit = if Some(k) == planted { 1.0 - noise } else { 0.0 };
            hit + noise * spread * rng.gen::<f64>()
        })
        .collect();
    let max = raw.iter().copied().fold(0.0, f64::max);
    raw.into_iter()
        .map(|s| {
            if max > 0.0 {
                SYNTH_FLOOR + (1.0 - SYNTH_FLOOR) * s / max
            } else {
                1.0
            }
        })
        .collect()
}

/// Scores for one node planted with `tuple`.
///
/// The actor, action and conditional tables have no background entry, yet
/// the layered models compare background's lone joint score against products
/// of up to five factors. Each of those tables is therefore drawn with one
/// extra background slot, which is then folded into the joint background
/// score, so background competes on the same footing as any other tuple.
fn planted_node(rng: &mut ChaCha8Rng, space: &LabelSpace, tuple: usize, noise: f64, spread: f64) -> Node {
    let bg = tuple == space.background();
    let actor = if bg { space.num_actors() } else { space.actor_of(tuple) };
    let action = if bg {
        space.num_actions()
    } else {
        space.action_of(tuple)
    };
    let valid = if bg { space.num_valid() } else { tuple };
    let mut unary_actor = noisy_table(rng, space.num_actors() + 1, Some(actor), noise, spread);
    let mut unary_action = noisy_table(rng, space.num_actions() + 1, Some(action), noise, spread);
    let mut unary_joint = noisy_table(rng, space.num_tuples(), Some(tuple), noise, spread);
    let mut cond_action = noisy_table(rng, space.num_valid() + 1, Some(valid), noise, spread);
    let mut cond_actor = noisy_table(rng, space.num_valid() + 1, Some(valid), noise, spread);
    let hidden = [&mut unary_actor, &mut unary_action, &mut cond_action, &mut cond_actor]
        .into_iter()
        .map(|t| t.pop().expect("table has a background slot"))
        .product::<f64>();
    unary_joint[space.background()] *= hidden;
    Node {
        unary_actor,
        unary_action,
        unary_joint,
        cond_action,
        cond_actor,
        pixels: BTreeMap::new(),
    }
}

fn chi2(a: usize, b: usize) -> f64 {
    if a == b {
        CHI2_INSIDE
    } else {
        CHI2_ACROSS
    }
}

fn video_scores(space: &LabelSpace, planted: &[usize]) -> Vec<f64> {
    let mut counts = vec![0usize; space.num_tuples()];
    for &t in planted {
        counts[t] += 1;
    }
    counts
        .into_iter()
        .map(|c| (c as f64 / planted.len() as f64).clamp(MIN_VIDEO_SCORE, 1.0))
        .collect()
}

fn lattice_edges(w: usize, h: usize, offset: usize, planted: &[usize], out: &mut Vec<Edge>) {
    for y in 0..h {
        for x in 0..w {
            let i = offset + y * w + x;
            if x + 1 < w {
                out.push(Edge {
                    i,
                    j: i + 1,
                    chi2: chi2(planted[i], planted[i + 1]),
                });
            }
            if y + 1 < h {
                out.push(Edge {
                    i,
                    j: i + w,
                    chi2: chi2(planted[i], planted[i + w]),
                });
            }
        }
    }
}

/// Generates a single-frame lattice instance; node `y * width + x` covers
/// pixel `(x, y)` of frame 0 and its planted tuple is the ground truth.
pub fn generate_instance(params: &SynthParams, seed: u64) -> Result<Instance> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (params.width, params.height);
    let owner = grow_regions(&mut rng, w, h, params.regions);
    let tuples = region_tuples(&mut rng, &params.space, params.regions);
    let planted: Vec<usize> = owner.iter().map(|&r| tuples[r]).collect();

    let nodes = planted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut node = planted_node(&mut rng, &params.space, t, params.noise, params.spread);
            node.pixels.insert(0, vec![((i % w) as u32, (i / w) as u32)]);
            node
        })
        .collect();
    let mut edges = Vec::new();
    lattice_edges(w, h, 0, &planted, &mut edges);

    Ok(Instance {
        space: params.space.clone(),
        nodes,
        edges,
        thetas: params.thetas,
        video_scores: Some(video_scores(&params.space, &planted)),
        gt: Some(planted.into_iter().map(Some).collect()),
        frames: Some(FrameInfo {
            count: 1,
            width: w as u32,
            height: h as u32,
        }),
    })
}

#[derive(Clone, Debug)]
pub struct LongVideoParams {
    pub base: SynthParams,
    pub frames: usize,
    /// Action switches per actor region.
    pub switches: usize,
}

#[derive(Clone, Debug)]
pub struct LongVideo {
    pub instance: Instance,
    pub tracks: TrackSet,
}

/// Generates a multi-frame video: regions keep their actor for the whole
/// clip while each switches action `switches` times, giving one track per
/// (region, action run). Background regions carry no track.
///
/// Node `f * width * height + y * width + x` is cell `(x, y)` on frame `f`;
/// temporal edges join the same cell on consecutive frames.
pub fn generate_long_video(params: &LongVideoParams, seed: u64) -> Result<LongVideo> {
    let base = &params.base;
    base.check()?;
    if params.frames == 0 {
        return Err(Error::InvalidArgument("frame count must be positive".into()));
    }
    if params.switches >= params.frames {
        return Err(Error::InvalidArgument(format!(
            "{} switches do not fit in {} frames",
            params.switches, params.frames
        )));
    }
    let space = &base.space;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (base.width, base.height);
    let cells = w * h;
    let owner = grow_regions(&mut rng, w, h, base.regions);
    let start_tuples = region_tuples(&mut rng, space, base.regions);

    // Per region: the tuple on every frame.
    let mut schedule: Vec<Vec<usize>> = Vec::with_capacity(base.regions);
    for &t0 in &start_tuples {
        let mut per_frame = vec![t0; params.frames];
        if t0 != space.background() {
            let actor = space.actor_of(t0);
            let options: Vec<usize> = space.tuples_with_actor(actor).collect();
            if options.len() < 2 && params.switches > 0 {
                return Err(Error::InvalidArgument(format!(
                    "actor '{}' has a single valid action and cannot switch",
                    space.actor_name(actor)
                )));
            }
            let mut at: Vec<usize> = sample(&mut rng, params.frames - 1, params.switches)
                .into_iter()
                .map(|k| k + 1)
                .collect();
            at.sort_unstable();
            let mut current = t0;
            let mut next_switch = at.iter().peekable();
            for (f, slot) in per_frame.iter_mut().enumerate() {
                if next_switch.peek() == Some(&&f) {
                    next_switch.next();
                    let others: Vec<usize> = options.iter().copied().filter(|&t| t != current).collect();
                    current = others[rng.gen_range(0..others.len())];
                }
                *slot = current;
            }
        }
        schedule.push(per_frame);
    }

    let planted: Vec<usize> = (0..params.frames)
        .flat_map(|f| owner.iter().map(|&r| schedule[r][f]).collect::<Vec<_>>())
        .collect();
    let nodes = planted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut node = planted_node(&mut rng, space, t, base.noise, base.spread);
            let c = i % cells;
            node.pixels.insert(i / cells, vec![((c % w) as u32, (c / w) as u32)]);
            node
        })
        .collect();
    let mut edges = Vec::new();
    for f in 0..params.frames {
        lattice_edges(w, h, f * cells, &planted, &mut edges);
        if f + 1 < params.frames {
            for c in 0..cells {
                let (i, j) = (f * cells + c, (f + 1) * cells + c);
                edges.push(Edge {
                    i,
                    j,
                    chi2: chi2(planted[i], planted[j]),
                });
            }
        }
    }

    let mut tracks = Vec::new();
    for (r, per_frame) in schedule.iter().enumerate() {
        if per_frame[0] == space.background() {
            continue;
        }
        let mut bbox = BoxRect {
            x0: u32::MAX,
            y0: u32::MAX,
            x1: 0,
            y1: 0,
        };
        for (c, _) in owner.iter().enumerate().filter(|(_, &o)| o == r) {
            let (x, y) = ((c % w) as u32, (c / w) as u32);
            bbox = BoxRect {
                x0: bbox.x0.min(x),
                y0: bbox.y0.min(y),
                x1: bbox.x1.max(x),
                y1: bbox.y1.max(y),
            };
        }
        let mut start = 0;
        for f in 1..=params.frames {
            if f == params.frames || per_frame[f] != per_frame[start] {
                tracks.push(Track {
                    id: tracks.len() + 1,
                    label: per_frame[start],
                    start,
                    finish: f - 1,
                    boxes: vec![bbox; f - start],
                });
                start = f;
            }
        }
    }

    let instance = Instance {
        space: space.clone(),
        nodes,
        edges,
        thetas: base.thetas,
        video_scores: Some(video_scores(space, &planted)),
        gt: Some(planted.into_iter().map(Some).collect()),
        frames: Some(FrameInfo {
            count: params.frames,
            width: w as u32,
            height: h as u32,
        }),
    };
    let tracks = TrackSet {
        frame_count: params.frames,
        width: w as u32,
        height: h as u32,
        tracks,
    };
    Ok(LongVideo { instance, tracks })
}
