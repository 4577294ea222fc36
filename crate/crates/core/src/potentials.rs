//! Score-to-energy conversion and the potential functions of the layered models.
//!
//! Everything here works in the energy domain: a probability-domain factor `p`
//! becomes `-ln p`, products become sums, and zero-probability configurations
//! become [`FORBIDDEN`].

use crate::instance::{Edge, Node, Thetas};
use crate::label_space::LabelSpace;

/// Scores are floored here before taking logs.
pub const SCORE_FLOOR: f64 = 1e-6;

/// Energy of a structurally impossible configuration.
pub const FORBIDDEN: f64 = 1e9;

pub fn score_to_energy(score: f64) -> f64 {
    -score.max(SCORE_FLOOR).ln()
}

pub fn is_forbidden(energy: f64) -> bool {
    energy >= FORBIDDEN
}

/// Contrast-sensitive Potts factor in the probability domain.
pub fn potts_weight(chi2: f64, theta: f64, same_label: bool) -> f64 {
    if same_label {
        1.0
    } else {
        (-theta / (1.0 + chi2)).exp()
    }
}

/// `-ln` of the Potts factor for two differing labels.
pub fn potts_energy(chi2: f64, theta: f64) -> f64 {
    theta / (1.0 + chi2)
}

/// Actor-to-tuple link: finite only when `actor` is the tuple's actor.
pub fn conditional_link(space: &LabelSpace, node: &Node, actor: usize, tuple: usize) -> f64 {
    if space.actor_of(tuple) != actor {
        return FORBIDDEN;
    }
    match node.cond_action.get(tuple) {
        Some(&s) => score_to_energy(s),
        // background carries no conditional score
        None => 0.0,
    }
}

/// Action-to-tuple link, the symmetric counterpart of [`conditional_link`].
pub fn conditional_link_action(space: &LabelSpace, node: &Node, action: usize, tuple: usize) -> f64 {
    if space.action_of(tuple) != action {
        return FORBIDDEN;
    }
    match node.cond_actor.get(tuple) {
        Some(&s) => score_to_energy(s),
        None => 0.0,
    }
}

/// Actor marginal energy; the background slot has no actor score.
pub fn actor_energy(node: &Node, actor: usize) -> f64 {
    node.unary_actor.get(actor).map_or(0.0, |&s| score_to_energy(s))
}

pub fn action_energy(node: &Node, action: usize) -> f64 {
    node.unary_action.get(action).map_or(0.0, |&s| score_to_energy(s))
}

/// Collapsed trilayer unary: joint, both conditional links and both marginals,
/// all induced by `tuple`. Background uses its joint score alone.
pub fn joint_unary(space: &LabelSpace, node: &Node, tuple: usize) -> f64 {
    let joint = score_to_energy(node.unary_joint[tuple]);
    if tuple == space.background() {
        return joint;
    }
    let (x, y) = (space.actor_of(tuple), space.action_of(tuple));
    joint
        + conditional_link(space, node, x, tuple)
        + actor_energy(node, x)
        + conditional_link_action(space, node, y, tuple)
        + action_energy(node, y)
}

/// Collapsed trilayer pairwise energy between two tuples on an edge.
pub fn joint_pairwise(space: &LabelSpace, thetas: &Thetas, edge: &Edge, a: usize, b: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut e = potts_energy(edge.chi2, thetas.joint);
    if space.actor_of(a) != space.actor_of(b) {
        e += potts_energy(edge.chi2, thetas.actor);
    }
    if space.action_of(a) != space.action_of(b) {
        e += potts_energy(edge.chi2, thetas.action);
    }
    e
}

/// Cost charged once when a label with this video score is used.
pub fn label_cost(video_score: f64) -> f64 {
    score_to_energy(video_score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn score_energy_examples() {
        assert_eq!(score_to_energy(1.0), 0.0);
        assert!((score_to_energy(0.5) - LN_2).abs() < 1e-12);
        assert_eq!(score_to_energy(1e-9), -(1e-6f64).ln());
        assert_eq!(label_cost(1.0), 0.0);
        assert!((label_cost(0.5) - LN_2).abs() < 1e-12);
    }

    #[test]
    fn potts_examples() {
        assert_eq!(potts_weight(3.0, 2.0, true), 1.0);
        assert!((potts_weight(0.0, LN2, false) - 0.5).abs() < 1e-12);
        let w = potts_weight(1e6, 1.0, false);
        assert!((0.999..1.0).contains(&w));
    }

    fn node_with(space: &LabelSpace, s: f64) -> Node {
        let mut n = Node::uniform(space);
        for v in [
            &mut n.unary_actor,
            &mut n.unary_action,
            &mut n.unary_joint,
            &mut n.cond_action,
            &mut n.cond_actor,
        ] {
            v.iter_mut().for_each(|x| *x = s);
        }
        n
    }

    #[test]
    fn conditional_link_examples() {
        let space = LabelSpace::mini();
        let one = node_with(&space, 1.0);
        let half = node_with(&space, 0.5);
        let t = 0;
        let x = space.actor_of(t);
        assert_eq!(conditional_link(&space, &one, x, t), 0.0);
        assert!(is_forbidden(conditional_link(&space, &one, x + 1, t)));
        assert!((conditional_link(&space, &half, x, t) - LN_2).abs() < 1e-12);
        assert!(is_forbidden(conditional_link_action(
            &space,
            &one,
            space.action_of(t) + 1,
            t
        )));
    }

    #[test]
    fn joint_unary_examples() {
        let space = LabelSpace::mini();
        assert_eq!(joint_unary(&space, &node_with(&space, 1.0), 1), 0.0);
        let e = joint_unary(&space, &node_with(&space, 0.5), 1);
        assert!((e - 3.465736).abs() < 1e-6, "{e}");
    }

    #[test]
    fn joint_pairwise_examples() {
        let space = LabelSpace::mini();
        let th = Thetas {
            actor: 0.7,
            action: LN2,
            joint: LN2,
        };
        let e = Edge { i: 0, j: 1, chi2: 0.0 };
        assert_eq!(joint_pairwise(&space, &th, &e, 2, 2), 0.0);
        // adult-walking vs adult-none: same actor, different action
        let v = joint_pairwise(&space, &th, &e, 0, 1);
        assert!((v - 2.0 * LN_2).abs() < 1e-12);
        // adult-none vs dog-walking: both differ
        let both = joint_pairwise(&space, &th, &e, 1, 2);
        assert!(both >= v);
    }

    proptest! {
        #[test]
        fn potts_monotonicity(chi2 in 0.0f64..50.0, theta in 0.01f64..10.0, d in 0.01f64..5.0) {
            let w = potts_weight(chi2, theta, false);
            prop_assert!(w > 0.0 && w <= 1.0);
            prop_assert!(potts_weight(chi2, theta + d, false) < w);
            prop_assert!(potts_weight(chi2 + d, theta, false) > w);
        }

        #[test]
        fn joint_pairwise_is_a_metric(
            chi2 in 0.0f64..20.0,
            ta in 0.001f64..5.0, ty in 0.001f64..5.0, tj in 0.001f64..5.0,
            a in 0usize..44, b in 0usize..44, c in 0usize..44,
        ) {
            let space = LabelSpace::a2d();
            let th = Thetas { actor: ta, action: ty, joint: tj };
            let e = Edge { i: 0, j: 1, chi2 };
            let d = |p, q| joint_pairwise(&space, &th, &e, p, q);
            prop_assert!(d(a, b) >= 0.0);
            prop_assert_eq!(d(a, b) == 0.0, a == b);
            prop_assert_eq!(d(a, b), d(b, a));
            prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
        }

        #[test]
        fn joint_unary_matches_probability_product(
            seed in proptest::collection::vec(0.01f64..=1.0, 5),
            t in 0usize..43,
        ) {
            let space = LabelSpace::a2d();
            let mut node = Node::uniform(&space);
            let (x, y) = (space.actor_of(t), space.action_of(t));
            node.unary_joint[t] = seed[0];
            node.cond_action[t] = seed[1];
            node.unary_actor[x] = seed[2];
            node.cond_actor[t] = seed[3];
            node.unary_action[y] = seed[4];
            let product: f64 = seed.iter().product();
            prop_assert!((joint_unary(&space, &node, t) + product.ln()).abs() < 1e-9);
        }
    }
}
