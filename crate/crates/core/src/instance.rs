//! The supervoxel graph with its per-node score tables.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::label_space::LabelSpace;

/// Per-node classifier scores, all in (0, 1].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Node {
    /// One score per actor.
    pub unary_actor: Vec<f64>,
    /// One score per action.
    pub unary_action: Vec<f64>,
    /// One score per valid tuple, background last.
    pub unary_joint: Vec<f64>,
    /// Action-given-actor scores, one per valid tuple.
    pub cond_action: Vec<f64>,
    /// Actor-given-action scores, one per valid tuple.
    pub cond_actor: Vec<f64>,
    /// Pixel membership keyed by frame; `(x, y)` zero-based.
    pub pixels: BTreeMap<usize, Vec<(u32, u32)>>,
}

impl Node {
    /// A node whose every score is 1.
    pub fn uniform(space: &LabelSpace) -> Self {
        Self {
            unary_actor: vec![1.0; space.num_actors()],
            unary_action: vec![1.0; space.num_actions()],
            unary_joint: vec![1.0; space.num_tuples()],
            cond_action: vec![1.0; space.num_valid()],
            cond_actor: vec![1.0; space.num_valid()],
            pixels: BTreeMap::new(),
        }
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.values().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    /// Feature-histogram distance between the two nodes.
    pub chi2: f64,
}

/// Potts contrast parameters, one per layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thetas {
    pub actor: f64,
    pub action: f64,
    pub joint: f64,
}

impl Default for Thetas {
    fn default() -> Self {
        Self {
            actor: 1.0,
            action: 1.0,
            joint: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameInfo {
    pub count: usize,
    pub width: u32,
    pub height: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub space: LabelSpace,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub thetas: Thetas,
    /// Video-level score per tuple, background last.
    pub video_scores: Option<Vec<f64>>,
    /// Ground-truth tuple per node; `None` entries are unlabeled.
    pub gt: Option<Vec<Option<usize>>>,
    pub frames: Option<FrameInfo>,
}

pub(crate) fn check_score(s: f64) -> bool {
    s.is_finite() && s > 0.0 && s <= 1.0
}

impl Instance {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let sp = &self.space;
        let bad = |m: String| Err(Error::InvalidArgument(m));
        for t in [self.thetas.actor, self.thetas.action, self.thetas.joint] {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("theta {t} must be positive"));
            }
        }
        for (id, n) in self.nodes.iter().enumerate() {
            let tables: [(&str, &[f64], usize); 5] = [
                ("unary_actor", &n.unary_actor, sp.num_actors()),
                ("unary_action", &n.unary_action, sp.num_actions()),
                ("unary_joint", &n.unary_joint, sp.num_tuples()),
                ("cond_action", &n.cond_action, sp.num_valid()),
                ("cond_actor", &n.cond_actor, sp.num_valid()),
            ];
            for (name, v, len) in tables {
                if v.len() != len {
                    return bad(format!("node {id}: {name} has {} entries, expected {len}", v.len()));
                }
                if let Some(s) = v.iter().find(|s| !check_score(**s)) {
                    return bad(format!("node {id}: {name} score {s} out of range (0,1]"));
                }
            }
            if !n.pixels.is_empty() {
                let Some(f) = self.frames else {
                    return bad(format!("node {id}: pixels given without a frames section"));
                };
                for (&frame, px) in &n.pixels {
                    if frame >= f.count {
                        return bad(format!("node {id}: frame {frame} out of range"));
                    }
                    if let Some(p) = px.iter().find(|p| p.0 >= f.width || p.1 >= f.height) {
                        return bad(format!("node {id}: pixel {p:?} outside the frame"));
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.i >= self.nodes.len() || e.j >= self.nodes.len() {
                return bad(format!("edge {}-{} references a missing node", e.i, e.j));
            }
            if e.i == e.j {
                return bad(format!("self loop on node {}", e.i));
            }
            if !(e.chi2.is_finite() && e.chi2 >= 0.0) {
                return bad(format!("edge {}-{}: chi2 {} must be nonnegative", e.i, e.j, e.chi2));
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return bad(format!("duplicate edge {}-{}", e.i, e.j));
            }
        }
        if let Some(v) = &self.video_scores {
            if v.len() != sp.num_tuples() {
                return bad(format!(
                    "videoscores has {} entries, expected {}",
                    v.len(),
                    sp.num_tuples()
                ));
            }
            if let Some(s) = v.iter().find(|s| !check_score(**s)) {
                return bad(format!("video score {s} out of range (0,1]"));
            }
        }
        if let Some(gt) = &self.gt {
            if gt.len() != self.nodes.len() {
                return bad("ground truth length does not match node count".into());
            }
            if gt.iter().flatten().any(|&t| t >= sp.num_tuples()) {
                return bad("ground truth tuple out of range".into());
            }
        }
        Ok(())
    }

    /// Symmetric neighbor lists derived from the edge list.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    pub fn has_pixels(&self) -> bool {
        self.frames.is_some() && self.nodes.iter().any(|n| !n.pixels.is_empty())
    }
}

/// A node's assigned label.
///
/// Naive Bayes fields pick actor and action independently and may produce a
/// pair outside the valid set; such pairs are kept as [`NodeLabel::Pair`] with
/// marginal indices, where `num_actors()` / `num_actions()` denote background.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    Tuple(usize),
    Pair { actor: usize, action: usize },
}

impl NodeLabel {
    /// Normalizes a marginal pair: valid pairs and background become tuples.
    pub fn from_pair(space: &LabelSpace, actor: usize, action: usize) -> Self {
        match space.tuple_of(actor, action) {
            Some(t) => NodeLabel::Tuple(t),
            None => NodeLabel::Pair { actor, action },
        }
    }

    pub fn tuple(self) -> Option<usize> {
        match self {
            NodeLabel::Tuple(t) => Some(t),
            NodeLabel::Pair { .. } => None,
        }
    }

    pub fn actor(self, space: &LabelSpace) -> usize {
        match self {
            NodeLabel::Tuple(t) => space.actor_of(t),
            NodeLabel::Pair { actor, .. } => actor,
        }
    }

    pub fn action(self, space: &LabelSpace) -> usize {
        match self {
            NodeLabel::Tuple(t) => space.action_of(t),
            NodeLabel::Pair { action, .. } => action,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub labels: Vec<NodeLabel>,
}

impl Labeling {
    pub fn from_tuples(tuples: &[usize]) -> Self {
        Self {
            labels: tuples.iter().map(|&t| NodeLabel::Tuple(t)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Tuple indices, or `None` if any node carries an invalid pair.
    pub fn tuples(&self) -> Option<Vec<usize>> {
        self.labels.iter().map(|l| l.tuple()).collect()
    }
}
