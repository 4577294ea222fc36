//! Actor, action and actor-action tuple label universes.
//!
//! Tuples are indexed in the order their pairs were declared; the background
//! tuple is appended last. Background owns its own slot in both marginal
//! spaces: actor index `num_actors()` and action index `num_actions()`.

use crate::error::{Error, Result};

/// Name of the background actor; the background tuple is written `background none`.
pub const BACKGROUND: &str = "background";
/// The mandatory catch-all action.
pub const NONE_ACTION: &str = "none";

pub const A2D_ACTORS: [&str; 7] = ["adult", "baby", "ball", "bird", "car", "cat", "dog"];
pub const A2D_ACTIONS: [&str; 9] = [
    "climbing", "crawling", "eating", "flying", "jumping", "rolling", "running", "walking", "none",
];

const A2D_VALID: [(&str, &[&str]); 7] = [
    (
        "adult",
        &[
            "climbing", "crawling", "eating", "jumping", "rolling", "running", "walking", "none",
        ],
    ),
    ("baby", &["climbing", "crawling", "rolling", "walking", "none"]),
    ("ball", &["flying", "jumping", "rolling", "none"]),
    (
        "bird",
        &["climbing", "eating", "flying", "jumping", "rolling", "walking", "none"],
    ),
    ("car", &["flying", "jumping", "rolling", "running", "none"]),
    (
        "cat",
        &["climbing", "eating", "jumping", "rolling", "running", "walking", "none"],
    ),
    (
        "dog",
        &["crawling", "eating", "jumping", "rolling", "running", "walking", "none"],
    ),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSpace {
    actors: Vec<String>,
    actions: Vec<String>,
    valid: Vec<(usize, usize)>,
    /// Dense `actor * num_actions + action` -> tuple index.
    pair_to_tuple: Vec<Option<usize>>,
    none: usize,
}

impl LabelSpace {
    /// Builds a space from names; `valid_pairs` are (actor, action) names.
    pub fn new<S: AsRef<str>>(actors: &[S], actions: &[S], valid_pairs: &[(S, S)]) -> Result<Self> {
        let actors: Vec<String> = actors.iter().map(|s| s.as_ref().to_string()).collect();
        let actions: Vec<String> = actions.iter().map(|s| s.as_ref().to_string()).collect();
        check_names("actor", &actors)?;
        check_names("action", &actions)?;
        if actors.iter().any(|a| a == BACKGROUND) {
            return Err(Error::LabelSpace(format!("actor name '{BACKGROUND}' is reserved")));
        }
        if actions.iter().any(|a| a == BACKGROUND) {
            return Err(Error::LabelSpace(format!("action name '{BACKGROUND}' is reserved")));
        }
        let mut pairs = Vec::with_capacity(valid_pairs.len());
        for (a, y) in valid_pairs {
            let (a, y) = (a.as_ref(), y.as_ref());
            let ai = actors
                .iter()
                .position(|n| n == a)
                .ok_or_else(|| Error::LabelSpace(format!("valid pair {a}-{y}: unknown actor '{a}'")))?;
            let yi = actions
                .iter()
                .position(|n| n == y)
                .ok_or_else(|| Error::LabelSpace(format!("valid pair {a}-{y}: unknown action '{y}'")))?;
            pairs.push((ai, yi));
        }
        Self::from_indices(actors, actions, pairs)
    }

    pub fn from_indices(actors: Vec<String>, actions: Vec<String>, valid: Vec<(usize, usize)>) -> Result<Self> {
        check_names("actor", &actors)?;
        check_names("action", &actions)?;
        let none = actions
            .iter()
            .position(|a| a == NONE_ACTION)
            .ok_or_else(|| Error::LabelSpace(format!("action list must contain '{NONE_ACTION}'")))?;
        if valid.is_empty() {
            return Err(Error::LabelSpace("at least one valid pair is required".into()));
        }
        let mut pair_to_tuple = vec![None; actors.len() * actions.len()];
        for (t, &(a, y)) in valid.iter().enumerate() {
            if a >= actors.len() || y >= actions.len() {
                return Err(Error::LabelSpace(format!("valid pair ({a}, {y}) out of range")));
            }
            let slot = &mut pair_to_tuple[a * actions.len() + y];
            if slot.is_some() {
                return Err(Error::LabelSpace(format!(
                    "duplicate valid pair {}-{}",
                    actors[a], actions[y]
                )));
            }
            *slot = Some(t);
        }
        Ok(Self {
            actors,
            actions,
            valid,
            pair_to_tuple,
            none,
        })
    }

    /// The 7-actor, 9-action space with its 43 valid tuples.
    pub fn a2d() -> Self {
        let pairs: Vec<(&str, &str)> = A2D_VALID
            .iter()
            .flat_map(|(a, ys)| ys.iter().map(move |y| (*a, *y)))
            .collect();
        Self::new(&A2D_ACTORS, &A2D_ACTIONS, &pairs).expect("canonical space is well formed")
    }

    /// A small space (3 valid tuples + background) for exhaustive checks.
    pub fn mini() -> Self {
        Self::new(
            &["adult", "dog"],
            &["walking", "none"],
            &[("adult", "walking"), ("adult", "none"), ("dog", "walking")],
        )
        .expect("mini space is well formed")
    }

    pub fn actors(&self) -> &[String] {
        &self.actors
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn valid_pairs(&self) -> &[(usize, usize)] {
        &self.valid
    }

    pub fn num_actors(&self) -> usize {
        self.actors.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_valid(&self) -> usize {
        self.valid.len()
    }

    /// Valid tuples plus background.
    pub fn num_tuples(&self) -> usize {
        self.valid.len() + 1
    }

    pub fn background(&self) -> usize {
        self.valid.len()
    }

    pub fn none_action(&self) -> usize {
        self.none
    }

    pub fn actor_index(&self, name: &str) -> Option<usize> {
        self.actors.iter().position(|a| a == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// Tuple index for a pair of names. `background none` names the background tuple.
    pub fn tuple_index(&self, actor: &str, action: &str) -> Result<usize> {
        if actor == BACKGROUND && action == NONE_ACTION {
            return Ok(self.background());
        }
        let invalid = || Error::InvalidTuple {
            actor: actor.to_string(),
            action: action.to_string(),
        };
        let a = self.actor_index(actor).ok_or_else(invalid)?;
        let y = self.action_index(action).ok_or_else(invalid)?;
        self.tuple_of(a, y).ok_or_else(invalid)
    }

    /// Tuple index for in-range actor/action indices, `None` when the pair is not valid.
    /// The background slots (`num_actors()`, `none_action()` or `num_actions()`) map to background.
    pub fn tuple_of(&self, actor: usize, action: usize) -> Option<usize> {
        if actor == self.actors.len() {
            return (action == self.none || action == self.actions.len()).then_some(self.background());
        }
        if actor > self.actors.len() || action >= self.actions.len() {
            return None;
        }
        self.pair_to_tuple[actor * self.actions.len() + action]
    }

    pub fn is_valid_tuple(&self, actor: usize, action: usize) -> bool {
        self.tuple_of(actor, action).is_some()
    }

    /// Actor component; background maps to `num_actors()`.
    pub fn actor_of(&self, tuple: usize) -> usize {
        self.valid.get(tuple).map_or(self.actors.len(), |p| p.0)
    }

    /// Action component; background maps to `num_actions()`.
    pub fn action_of(&self, tuple: usize) -> usize {
        self.valid.get(tuple).map_or(self.actions.len(), |p| p.1)
    }

    /// Actor name, with `background` for the extra slot.
    pub fn actor_name(&self, actor: usize) -> &str {
        self.actors.get(actor).map_or(BACKGROUND, String::as_str)
    }

    /// Action name, with `background` for the extra slot.
    pub fn action_name(&self, action: usize) -> &str {
        self.actions.get(action).map_or(BACKGROUND, String::as_str)
    }

    /// `(actor, action)` names as written in files; background is `background none`.
    pub fn tuple_names(&self, tuple: usize) -> (&str, &str) {
        match self.valid.get(tuple) {
            Some(&(a, y)) => (&self.actors[a], &self.actions[y]),
            None => (BACKGROUND, NONE_ACTION),
        }
    }

    /// Display name used in CSV output: `adult-climbing`, or `background`.
    pub fn tuple_name(&self, tuple: usize) -> String {
        match self.valid.get(tuple) {
            Some(&(a, y)) => format!("{}-{}", self.actors[a], self.actions[y]),
            None => BACKGROUND.to_string(),
        }
    }

    /// Tuples whose actor is `actor`, in tuple order.
    pub fn tuples_with_actor(&self, actor: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_tuples()).filter(move |&t| self.actor_of(t) == actor)
    }

    pub fn tuples_with_action(&self, action: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_tuples()).filter(move |&t| self.action_of(t) == action)
    }
}

fn check_names(kind: &str, names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::LabelSpace(format!("{kind} list is empty")));
    }
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || n.chars().any(char::is_whitespace) || n == "-" {
            return Err(Error::LabelSpace(format!("bad {kind} name '{n}'")));
        }
        if names[..i].contains(n) {
            return Err(Error::LabelSpace(format!("duplicate {kind} name '{n}'")));
        }
    }
    Ok(())
}
