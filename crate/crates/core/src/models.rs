//! Energy-model builders for the segmentation models and the video-level
//! recognition scores that drive label costs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::inference::{alpha_beta_swap, alpha_expansion, brute_force, EnergyModel, SolveOptions, SolveReport};
use crate::instance::{Instance, Labeling, NodeLabel};
use crate::label_space::LabelSpace;
use crate::potentials::{
    action_energy, actor_energy, joint_unary, label_cost, potts_energy, score_to_energy, FORBIDDEN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    NaiveBayes,
    JointProduct,
    Conditional,
    Bilayer,
    Trilayer,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::NaiveBayes,
        ModelKind::JointProduct,
        ModelKind::Conditional,
        ModelKind::Bilayer,
        ModelKind::Trilayer,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "nb",
            ModelKind::JointProduct => "jps",
            ModelKind::Conditional => "cond",
            ModelKind::Bilayer => "bilayer",
            ModelKind::Trilayer => "trilayer",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model '{s}'")))
    }
}

fn edge_list(inst: &Instance) -> Vec<(usize, usize)> {
    inst.edges.iter().map(|e| (e.i, e.j)).collect()
}

fn potts_weights(inst: &Instance, theta: f64) -> Vec<f64> {
    inst.edges.iter().map(|e| potts_energy(e.chi2, theta)).collect()
}

/// The two independent fields of the naive Bayes model.
#[derive(Clone, Debug)]
pub struct NaiveBayesFields {
    /// Labels: actors, then background.
    pub actor: EnergyModel,
    /// Labels: actions, then background.
    pub action: EnergyModel,
}

/// Actor field alone; background takes its score from the joint table.
pub fn build_actor_field(inst: &Instance) -> EnergyModel {
    let sp = &inst.space;
    let mut m = EnergyModel::new(sp.num_actors() + 1, inst.num_nodes(), edge_list(inst));
    for (i, n) in inst.nodes.iter().enumerate() {
        for a in 0..sp.num_actors() {
            m.set_unary(i, a, actor_energy(n, a));
        }
        m.set_unary(i, sp.num_actors(), score_to_energy(n.unary_joint[sp.background()]));
    }
    m.add_potts(potts_weights(inst, inst.thetas.actor))
        .expect("weights match the edge list");
    m
}

pub fn build_naive_bayes(inst: &Instance) -> NaiveBayesFields {
    let sp = &inst.space;
    let mut action = EnergyModel::new(sp.num_actions() + 1, inst.num_nodes(), edge_list(inst));
    for (i, n) in inst.nodes.iter().enumerate() {
        for y in 0..sp.num_actions() {
            action.set_unary(i, y, action_energy(n, y));
        }
        action.set_unary(i, sp.num_actions(), score_to_energy(n.unary_joint[sp.background()]));
    }
    action
        .add_potts(potts_weights(inst, inst.thetas.action))
        .expect("weights match the edge list");
    NaiveBayesFields {
        actor: build_actor_field(inst),
        action,
    }
}

/// Single field over tuples with joint scores and a joint Potts term.
pub fn build_joint_product(inst: &Instance) -> EnergyModel {
    let l = inst.space.num_tuples();
    let mut m = EnergyModel::new(l, inst.num_nodes(), edge_list(inst));
    for (i, n) in inst.nodes.iter().enumerate() {
        for t in 0..l {
            m.set_unary(i, t, score_to_energy(n.unary_joint[t]));
        }
    }
    m.add_potts(potts_weights(inst, inst.thetas.joint))
        .expect("weights match the edge list");
    m
}

fn actor_classes(sp: &LabelSpace) -> Vec<usize> {
    (0..sp.num_tuples()).map(|t| sp.actor_of(t)).collect()
}

fn action_classes(sp: &LabelSpace) -> Vec<usize> {
    (0..sp.num_tuples()).map(|t| sp.action_of(t)).collect()
}

/// Collapsed bilayer field: actor + action + joint unaries, actor and action
/// Potts terms only.
pub fn build_bilayer(inst: &Instance) -> EnergyModel {
    let sp = &inst.space;
    let l = sp.num_tuples();
    let mut m = EnergyModel::new(l, inst.num_nodes(), edge_list(inst));
    for (i, n) in inst.nodes.iter().enumerate() {
        for t in 0..l {
            let mut e = score_to_energy(n.unary_joint[t]);
            if t != sp.background() {
                e += actor_energy(n, sp.actor_of(t)) + action_energy(n, sp.action_of(t));
            }
            m.set_unary(i, t, e);
        }
    }
    m.add_class_potts(potts_weights(inst, inst.thetas.actor), &actor_classes(sp))
        .expect("weights match the edge list");
    m.add_class_potts(potts_weights(inst, inst.thetas.action), &action_classes(sp))
        .expect("weights match the edge list");
    m
}

/// Collapsed trilayer field.
pub fn build_trilayer(inst: &Instance) -> EnergyModel {
    let sp = &inst.space;
    let l = sp.num_tuples();
    let mut m = EnergyModel::new(l, inst.num_nodes(), edge_list(inst));
    for (i, n) in inst.nodes.iter().enumerate() {
        for t in 0..l {
            m.set_unary(i, t, joint_unary(sp, n, t));
        }
    }
    m.add_potts(potts_weights(inst, inst.thetas.joint))
        .expect("weights match the edge list");
    m.add_class_potts(potts_weights(inst, inst.thetas.actor), &actor_classes(sp))
        .expect("weights match the edge list");
    m.add_class_potts(potts_weights(inst, inst.thetas.action), &action_classes(sp))
        .expect("weights match the edge list");
    m
}

/// Second stage of the conditional model: an action field whose unaries are
/// the action-given-actor scores for each node's inferred actor.
///
/// Labels are actions plus a background slot; actions invalid for the node's
/// actor are forbidden, and background nodes can only take the background slot.
pub fn build_conditional_stage(inst: &Instance, actors: &[usize]) -> EnergyModel {
    let sp = &inst.space;
    let bg = sp.num_actions();
    let mut m = EnergyModel::new(bg + 1, inst.num_nodes(), edge_list(inst));
    for (i, n) in inst.nodes.iter().enumerate() {
        let x = actors[i];
        for y in 0..=bg {
            let e = if x == sp.num_actors() {
                if y == bg {
                    0.0
                } else {
                    FORBIDDEN
                }
            } else if y == bg {
                FORBIDDEN
            } else {
                match sp.tuple_of(x, y) {
                    Some(t) => score_to_energy(n.cond_action[t]),
                    None => FORBIDDEN,
                }
            };
            m.set_unary(i, y, e);
        }
    }
    m.add_potts(potts_weights(inst, inst.thetas.action))
        .expect("weights match the edge list");
    m
}

/// `-ln` of each tuple's video score.
pub fn tuple_label_costs(scores: &[f64]) -> Vec<f64> {
    scores.iter().map(|&s| label_cost(s)).collect()
}

/// Actor-field costs: for each actor the best score among its tuples; the
/// background slot takes the background score.
pub fn actor_label_costs(space: &LabelSpace, scores: &[f64]) -> Vec<f64> {
    (0..=space.num_actors())
        .map(|a| {
            let best = (0..space.num_tuples())
                .filter(|&t| space.actor_of(t) == a)
                .map(|t| scores[t])
                .fold(0.0, f64::max);
            label_cost(best)
        })
        .collect()
}

/// Action-field costs, marginalized like [`actor_label_costs`].
pub fn action_label_costs(space: &LabelSpace, scores: &[f64]) -> Vec<f64> {
    (0..=space.num_actions())
        .map(|y| {
            let best = (0..space.num_tuples())
                .filter(|&t| space.action_of(t) == y)
                .map(|t| scores[t])
                .fold(0.0, f64::max);
            label_cost(best)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecognitionKind {
    NaiveBayes,
    JointProduct,
    Trilayer,
}

impl FromStr for RecognitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(RecognitionKind::NaiveBayes),
            "jps" => Ok(RecognitionKind::JointProduct),
            "trilayer" => Ok(RecognitionKind::Trilayer),
            _ => Err(Error::InvalidArgument(format!("unknown recognition model '{s}'"))),
        }
    }
}

pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Video-level tuple scores from the mean node scores.
///
/// `nb` multiplies the actor and action means, `jps` uses the joint mean and
/// `trilayer` mixes them as `lambda * nb + (1 - lambda) * jps`. The background
/// entry of `nb` is the mean joint background score.
pub fn video_recognition(inst: &Instance, kind: RecognitionKind, lambda: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} outside [0, 1]")));
    }
    if inst.nodes.is_empty() {
        return Err(Error::InvalidArgument("instance has no nodes".into()));
    }
    let sp = &inst.space;
    let n = inst.num_nodes() as f64;
    let mean = |f: &dyn Fn(&crate::instance::Node) -> &[f64], len: usize| -> Vec<f64> {
        let mut acc = vec![0.0; len];
        for node in &inst.nodes {
            for (a, s) in acc.iter_mut().zip(f(node)) {
                *a += s;
            }
        }
        acc.into_iter().map(|v| v / n).collect()
    };
    let actor = mean(&|n| &n.unary_actor, sp.num_actors());
    let action = mean(&|n| &n.unary_action, sp.num_actions());
    let joint = mean(&|n| &n.unary_joint, sp.num_tuples());
    let nb: Vec<f64> = (0..sp.num_tuples())
        .map(|t| {
            if t == sp.background() {
                joint[t]
            } else {
                actor[sp.actor_of(t)] * action[sp.action_of(t)]
            }
        })
        .collect();
    Ok(match kind {
        RecognitionKind::NaiveBayes => nb,
        RecognitionKind::JointProduct => joint,
        RecognitionKind::Trilayer => nb
            .iter()
            .zip(&joint)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect(),
    })
}

/// Scores used for label costs: the instance's own video scores when present,
/// otherwise trilayer recognition from node means.
pub fn label_cost_scores(inst: &Instance, lambda: f64) -> Result<Vec<f64>> {
    match &inst.video_scores {
        Some(v) => Ok(v.clone()),
        None => video_recognition(inst, RecognitionKind::Trilayer, lambda),
    }
}

/// Which optimizer runs each field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Expansion,
    Swap,
    /// Exhaustive enumeration (small instances only).
    BruteForce,
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expansion" => Ok(Solver::Expansion),
            "swap" => Ok(Solver::Swap),
            "brute" => Ok(Solver::BruteForce),
            _ => Err(Error::InvalidArgument(format!("unknown solver '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SegmentOptions {
    pub model: ModelKind,
    pub label_costs: bool,
    pub lambda: f64,
    pub solver: Solver,
    pub solve: SolveOptions,
}

impl SegmentOptions {
    pub fn new(model: ModelKind) -> Self {
        Self {
            model,
            label_costs: false,
            lambda: DEFAULT_LAMBDA,
            solver: Solver::Expansion,
            solve: SolveOptions::default(),
        }
    }
}

/// One optimized field.
#[derive(Clone, Debug)]
pub struct Stage {
    pub name: &'static str,
    pub model: EnergyModel,
    pub labels: Vec<usize>,
    pub energy: f64,
    pub report: Option<SolveReport>,
}

#[derive(Clone, Debug)]
pub struct Segmentation {
    pub labeling: Labeling,
    pub stages: Vec<Stage>,
}

impl Segmentation {
    pub fn energy(&self) -> f64 {
        self.stages.iter().map(|s| s.energy).sum()
    }
}

fn run_stage(name: &'static str, model: EnergyModel, options: &SegmentOptions) -> Result<Stage> {
    let (labels, energy, report) = match options.solver {
        Solver::Expansion => {
            let r = alpha_expansion(&model, &options.solve)?;
            (r.labels.clone(), r.energy, Some(r))
        }
        Solver::Swap => {
            let r = alpha_beta_swap(&model, &options.solve)?;
            (r.labels.clone(), r.energy, Some(r))
        }
        Solver::BruteForce => {
            let (l, e) = brute_force(&model)?;
            (l, e, None)
        }
    };
    Ok(Stage {
        name,
        model,
        labels,
        energy,
        report,
    })
}

/// Builds the requested model (with label costs if asked) and optimizes it.
pub fn segment(inst: &Instance, options: &SegmentOptions) -> Result<Segmentation> {
    let sp = &inst.space;
    let scores = if options.label_costs {
        Some(label_cost_scores(inst, options.lambda)?)
    } else {
        None
    };
    let with_costs = |mut m: EnergyModel, costs: Option<Vec<f64>>| -> Result<EnergyModel> {
        if let Some(c) = costs {
            m.set_label_costs(c)?;
        }
        Ok(m)
    };
    match options.model {
        ModelKind::NaiveBayes => {
            let fields = build_naive_bayes(inst);
            let actor = with_costs(fields.actor, scores.as_ref().map(|s| actor_label_costs(sp, s)))?;
            let action = with_costs(fields.action, scores.as_ref().map(|s| action_label_costs(sp, s)))?;
            let actor = run_stage("actor", actor, options)?;
            let action = run_stage("action", action, options)?;
            let labels = actor
                .labels
                .iter()
                .zip(&action.labels)
                .map(|(&x, &y)| NodeLabel::from_pair(sp, x, y))
                .collect();
            Ok(Segmentation {
                labeling: Labeling { labels },
                stages: vec![actor, action],
            })
        }
        ModelKind::Conditional => {
            let actor = with_costs(
                build_actor_field(inst),
                scores.as_ref().map(|s| actor_label_costs(sp, s)),
            )?;
            let actor = run_stage("actor", actor, options)?;
            let action = with_costs(
                build_conditional_stage(inst, &actor.labels),
                scores.as_ref().map(|s| action_label_costs(sp, s)),
            )?;
            let action = run_stage("action", action, options)?;
            let labels = actor
                .labels
                .iter()
                .zip(&action.labels)
                .map(|(&x, &y)| NodeLabel::from_pair(sp, x, y))
                .collect();
            Ok(Segmentation {
                labeling: Labeling { labels },
                stages: vec![actor, action],
            })
        }
        kind => {
            let model = match kind {
                ModelKind::JointProduct => build_joint_product(inst),
                ModelKind::Bilayer => build_bilayer(inst),
                _ => build_trilayer(inst),
            };
            let model = with_costs(model, scores.as_ref().map(|s| tuple_label_costs(s)))?;
            let stage = run_stage("tuple", model, options)?;
            Ok(Segmentation {
                labeling: Labeling::from_tuples(&stage.labels),
                stages: vec![stage],
            })
        }
    }
}
