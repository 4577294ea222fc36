//! s-t max-flow / min-cut on sparse graphs.
//!
//! Augmenting paths are found with two search trees, one rooted at each
//! terminal, which persist between augmentations: after each augmentation only
//! the nodes cut off from their tree (orphans) are re-attached or freed. This is
//! the dual-tree scheme that dominates on grid-like vision graphs.
//!
//! Capacities are real valued; residuals at or below [`SATURATION_TOL`] are
//! treated as saturated.

use std::collections::VecDeque;

pub const SATURATION_TOL: f64 = 1e-12;

const NIL: u32 = u32::MAX;
// parent markers; anything smaller is an arc index
const FREE: u32 = u32::MAX;
const TERMINAL: u32 = u32::MAX - 1;
const ORPHAN: u32 = u32::MAX - 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Source,
    Sink,
}

/// A flow network with terminal links per node and paired directed arcs.
///
/// The scratch buffers survive [`FlowNetwork::clear`], so one network can be
/// rebuilt for every move of a multi-label solve without reallocating.
#[derive(Clone, Debug, Default)]
pub struct FlowNetwork {
    source_cap: Vec<f64>,
    sink_cap: Vec<f64>,
    first: Vec<u32>,
    head: Vec<u32>,
    next: Vec<u32>,
    cap: Vec<f64>,

    tr_cap: Vec<f64>,
    r_cap: Vec<f64>,
    parent: Vec<u32>,
    in_sink: Vec<bool>,
    ts: Vec<u64>,
    dist: Vec<u32>,
    active: Vec<bool>,
    queue: VecDeque<u32>,
    orphans: VecDeque<u32>,
    time: u64,
    flow: f64,
    solved: bool,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        let mut g = Self::default();
        g.clear(nodes);
        g
    }

    /// Empties the network and resizes it to `nodes` isolated nodes.
    pub fn clear(&mut self, nodes: usize) {
        self.source_cap.clear();
        self.source_cap.resize(nodes, 0.0);
        self.sink_cap.clear();
        self.sink_cap.resize(nodes, 0.0);
        self.first.clear();
        self.first.resize(nodes, NIL);
        self.head.clear();
        self.next.clear();
        self.cap.clear();
        self.flow = 0.0;
        self.solved = false;
    }

    pub fn num_nodes(&self) -> usize {
        self.first.len()
    }

    pub fn num_edges(&self) -> usize {
        self.head.len() / 2
    }

    pub fn add_node(&mut self) -> usize {
        self.source_cap.push(0.0);
        self.sink_cap.push(0.0);
        self.first.push(NIL);
        self.solved = false;
        self.first.len() - 1
    }

    /// Adds to the source->`i` and `i`->sink capacities.
    pub fn add_terminal(&mut self, i: usize, source: f64, sink: f64) {
        debug_assert!(source >= 0.0 && sink >= 0.0, "negative terminal capacity");
        self.source_cap[i] += source;
        self.sink_cap[i] += sink;
        self.solved = false;
    }

    /// Adds the arc pair `i`->`j` (capacity `cap`) and `j`->`i` (`rev_cap`).
    pub fn add_edge(&mut self, i: usize, j: usize, cap: f64, rev_cap: f64) {
        debug_assert!(i != j, "self loop");
        debug_assert!(cap >= 0.0 && rev_cap >= 0.0, "negative arc capacity");
        let a = self.head.len() as u32;
        self.head.push(j as u32);
        self.next.push(self.first[i]);
        self.cap.push(cap);
        self.first[i] = a;
        self.head.push(i as u32);
        self.next.push(self.first[j]);
        self.cap.push(rev_cap);
        self.first[j] = a + 1;
        self.solved = false;
    }

    /// Computes the maximum flow; afterwards [`Self::side`] reports the minimum cut.
    pub fn max_flow(&mut self) -> f64 {
        self.init();
        let mut current: Option<u32> = None;
        loop {
            let i = match current.take() {
                Some(i) => {
                    self.active[i as usize] = false;
                    if self.parent[i as usize] == FREE {
                        None
                    } else {
                        Some(i)
                    }
                }
                None => None,
            };
            let i = match i.or_else(|| self.next_active()) {
                Some(i) => i,
                None => break,
            };
            let middle = self.grow(i);
            self.time += 1;
            if middle != NIL {
                self.active[i as usize] = true;
                current = Some(i);
                self.augment(middle);
                self.adopt();
            }
        }
        self.solved = true;
        self.flow
    }

    pub fn flow_value(&self) -> f64 {
        self.flow
    }

    /// Cut side of node `i`; nodes not reachable from the source are on the sink side.
    pub fn side(&self, i: usize) -> Side {
        assert!(self.solved, "max_flow has not been run");
        if self.parent[i] != FREE && !self.in_sink[i] {
            Side::Source
        } else {
            Side::Sink
        }
    }

    pub fn cut(&self) -> Vec<Side> {
        (0..self.num_nodes()).map(|i| self.side(i)).collect()
    }

    /// Capacity of the cut described by `sides`, from the original capacities.
    pub fn cut_capacity(&self, sides: &[Side]) -> f64 {
        let mut c = 0.0;
        for (i, s) in sides.iter().enumerate() {
            c += match s {
                Side::Source => self.sink_cap[i],
                Side::Sink => self.source_cap[i],
            };
        }
        for a in 0..self.head.len() {
            let from = self.head[a ^ 1] as usize;
            let to = self.head[a] as usize;
            if sides[from] == Side::Source && sides[to] == Side::Sink {
                c += self.cap[a];
            }
        }
        c
    }

    /// Net flow on edge `k` (in insertion order), positive in the `i`->`j` direction.
    pub fn edge_flow(&self, k: usize) -> f64 {
        assert!(self.solved, "max_flow has not been run");
        self.cap[2 * k] - self.r_cap[2 * k]
    }

    pub fn edge_endpoints(&self, k: usize) -> (usize, usize) {
        (self.head[2 * k + 1] as usize, self.head[2 * k] as usize)
    }

    /// Flow on (source->`i`, `i`->sink).
    pub fn terminal_flow(&self, i: usize) -> (f64, f64) {
        assert!(self.solved, "max_flow has not been run");
        let (s, t) = (self.source_cap[i], self.sink_cap[i]);
        let through = s.min(t);
        let initial = s - t;
        if initial >= 0.0 {
            (through + (initial - self.tr_cap[i]), through)
        } else {
            (through, through + (self.tr_cap[i] - initial))
        }
    }

    fn init(&mut self) {
        let n = self.num_nodes();
        self.r_cap.clear();
        self.r_cap.extend_from_slice(&self.cap);
        self.tr_cap.clear();
        self.parent.clear();
        self.parent.resize(n, FREE);
        self.in_sink.clear();
        self.in_sink.resize(n, false);
        self.ts.clear();
        self.ts.resize(n, 0);
        self.dist.clear();
        self.dist.resize(n, 0);
        self.active.clear();
        self.active.resize(n, false);
        self.queue.clear();
        self.orphans.clear();
        self.time = 0;
        self.flow = 0.0;
        for i in 0..n {
            let (s, t) = (self.source_cap[i], self.sink_cap[i]);
            self.flow += s.min(t);
            let tr = s - t;
            self.tr_cap.push(tr);
            if tr > SATURATION_TOL {
                self.parent[i] = TERMINAL;
                self.dist[i] = 1;
                self.set_active(i as u32);
            } else if tr < -SATURATION_TOL {
                self.parent[i] = TERMINAL;
                self.in_sink[i] = true;
                self.dist[i] = 1;
                self.set_active(i as u32);
            }
        }
    }

    fn set_active(&mut self, i: u32) {
        if !self.active[i as usize] {
            self.active[i as usize] = true;
            self.queue.push_back(i);
        }
    }

    fn next_active(&mut self) -> Option<u32> {
        while let Some(i) = self.queue.pop_front() {
            self.active[i as usize] = false;
            if self.parent[i as usize] != FREE {
                return Some(i);
            }
        }
        None
    }

    /// Expands the tree containing `i`; returns the arc joining the two trees
    /// (oriented source tree -> sink tree) or `NIL`.
    fn grow(&mut self, i: u32) -> u32 {
        let iu = i as usize;
        let sink_tree = self.in_sink[iu];
        let mut a = self.first[iu];
        while a != NIL {
            let au = a as usize;
            let residual = if sink_tree { self.r_cap[au ^ 1] } else { self.r_cap[au] };
            if residual > SATURATION_TOL {
                let j = self.head[au];
                let ju = j as usize;
                if self.parent[ju] == FREE {
                    self.in_sink[ju] = sink_tree;
                    self.parent[ju] = a ^ 1;
                    self.ts[ju] = self.ts[iu];
                    self.dist[ju] = self.dist[iu] + 1;
                    self.set_active(j);
                } else if self.in_sink[ju] != sink_tree {
                    return if sink_tree { a ^ 1 } else { a };
                } else if self.ts[ju] <= self.ts[iu] && self.dist[ju] > self.dist[iu] {
                    // shorten j's path to its terminal
                    self.parent[ju] = a ^ 1;
                    self.ts[ju] = self.ts[iu];
                    self.dist[ju] = self.dist[iu] + 1;
                }
            }
            a = self.next[au];
        }
        NIL
    }

    fn augment(&mut self, middle: u32) {
        let mu = middle as usize;
        let mut bottleneck = self.r_cap[mu];

        let mut i = self.head[mu ^ 1] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            bottleneck = bottleneck.min(self.r_cap[a as usize ^ 1]);
            i = self.head[a as usize] as usize;
        }
        bottleneck = bottleneck.min(self.tr_cap[i]);

        let mut i = self.head[mu] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            bottleneck = bottleneck.min(self.r_cap[a as usize]);
            i = self.head[a as usize] as usize;
        }
        bottleneck = bottleneck.min(-self.tr_cap[i]);

        self.r_cap[mu ^ 1] += bottleneck;
        self.r_cap[mu] -= bottleneck;

        let mut i = self.head[mu ^ 1] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let au = a as usize;
            self.r_cap[au] += bottleneck;
            self.r_cap[au ^ 1] -= bottleneck;
            if self.r_cap[au ^ 1] <= SATURATION_TOL {
                self.parent[i] = ORPHAN;
                self.orphans.push_front(i as u32);
            }
            i = self.head[au] as usize;
        }
        self.tr_cap[i] -= bottleneck;
        if self.tr_cap[i] <= SATURATION_TOL {
            self.parent[i] = ORPHAN;
            self.orphans.push_front(i as u32);
        }

        let mut i = self.head[mu] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let au = a as usize;
            self.r_cap[au ^ 1] += bottleneck;
            self.r_cap[au] -= bottleneck;
            if self.r_cap[au] <= SATURATION_TOL {
                self.parent[i] = ORPHAN;
                self.orphans.push_front(i as u32);
            }
            i = self.head[au] as usize;
        }
        self.tr_cap[i] += bottleneck;
        if self.tr_cap[i] >= -SATURATION_TOL {
            self.parent[i] = ORPHAN;
            self.orphans.push_front(i as u32);
        }

        self.flow += bottleneck;
    }

    fn adopt(&mut self) {
        while let Some(i) = self.orphans.pop_front() {
            self.process_orphan(i as usize);
        }
    }

    /// Residual capacity usable by a tree edge between `i` and its neighbor
    /// through arc `a0` (leaving `i`).
    fn tree_residual(&self, sink_tree: bool, a0: usize) -> f64 {
        if sink_tree {
            self.r_cap[a0]
        } else {
            self.r_cap[a0 ^ 1]
        }
    }

    fn process_orphan(&mut self, i: usize) {
        let sink_tree = self.in_sink[i];
        let mut best = NIL;
        let mut d_min = u32::MAX;

        let mut a0 = self.first[i];
        while a0 != NIL {
            let a0u = a0 as usize;
            if self.tree_residual(sink_tree, a0u) > SATURATION_TOL {
                let start = self.head[a0u] as usize;
                if self.in_sink[start] == sink_tree && self.parent[start] != FREE {
                    // walk to the root to check that start still originates from a terminal
                    let mut j = start;
                    let mut d: u32 = 0;
                    let reachable = loop {
                        if self.ts[j] == self.time {
                            d += self.dist[j];
                            break true;
                        }
                        let a = self.parent[j];
                        d += 1;
                        if a == TERMINAL {
                            self.ts[j] = self.time;
                            self.dist[j] = 1;
                            break true;
                        }
                        if a == ORPHAN {
                            break false;
                        }
                        j = self.head[a as usize] as usize;
                    };
                    if reachable {
                        if d < d_min {
                            best = a0;
                            d_min = d;
                        }
                        let mut j = start;
                        while self.ts[j] != self.time {
                            self.ts[j] = self.time;
                            self.dist[j] = d;
                            d -= 1;
                            j = self.head[self.parent[j] as usize] as usize;
                        }
                    }
                }
            }
            a0 = self.next[a0u];
        }

        if best != NIL {
            self.parent[i] = best;
            self.ts[i] = self.time;
            self.dist[i] = d_min + 1;
            return;
        }

        self.parent[i] = FREE;
        let mut a0 = self.first[i];
        while a0 != NIL {
            let a0u = a0 as usize;
            let j = self.head[a0u] as usize;
            let pj = self.parent[j];
            if self.in_sink[j] == sink_tree && pj != FREE {
                if self.tree_residual(sink_tree, a0u) > SATURATION_TOL {
                    self.set_active(j as u32);
                }
                if pj != TERMINAL && pj != ORPHAN && self.head[pj as usize] as usize == i {
                    self.parent[j] = ORPHAN;
                    self.orphans.push_back(j as u32);
                }
            }
            a0 = self.next[a0u];
        }
    }
}
