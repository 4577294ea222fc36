mod common;

use actorseg::evaluation::single_label_accuracy;
use actorseg::inference::{brute_force, total_energy};
use actorseg::models::*;
use actorseg::potentials::{is_forbidden, label_cost};
use actorseg::synth::{generate_instance, SynthParams};
use actorseg::{Instance, LabelSpace, NodeLabel, Thetas};
use common::{random_instance, redraw_scores, small_space};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn argmin(f: impl Fn(usize) -> f64, n: usize) -> usize {
    (0..n).min_by(|&a, &b| f(a).total_cmp(&f(b))).unwrap()
}

fn oracle(inst: &Instance, model: ModelKind, costs: bool) -> Segmentation {
    let mut o = SegmentOptions::new(model);
    o.solver = Solver::BruteForce;
    o.label_costs = costs;
    segment(inst, &o).unwrap()
}

#[test]
fn naive_bayes_without_smoothing_is_per_node_argmin() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut inst = random_instance(&mut rng, &LabelSpace::a2d(), 12);
    redraw_scores(&mut rng, &mut inst, 0.01);
    inst.thetas = Thetas {
        actor: 1e-9,
        action: 1e-9,
        joint: 1e-9,
    };
    let fields = build_naive_bayes(&inst);
    let seg = segment(&inst, &SegmentOptions::new(ModelKind::NaiveBayes)).unwrap();
    for (i, label) in seg.labeling.labels.iter().enumerate() {
        let a = argmin(|l| fields.actor.unary(i, l), fields.actor.num_labels());
        let y = argmin(|l| fields.action.unary(i, l), fields.action.num_labels());
        assert_eq!(*label, NodeLabel::from_pair(&inst.space, a, y));
    }
}

#[test]
fn naive_bayes_can_emit_invalid_pairs() {
    let space = LabelSpace::a2d();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut inst = random_instance(&mut rng, &space, 1);
    let node = &mut inst.nodes[0];
    node.unary_actor.fill(0.01);
    node.unary_action.fill(0.01);
    node.unary_actor[space.actor_index("adult").unwrap()] = 1.0;
    node.unary_action[space.action_index("flying").unwrap()] = 1.0;
    node.unary_joint[space.background()] = 0.001;
    let seg = segment(&inst, &SegmentOptions::new(ModelKind::NaiveBayes)).unwrap();
    let label = seg.labeling.labels[0];
    assert_eq!(label.tuple(), None);
    assert_eq!(space.actor_name(label.actor(&space)), "adult");
    assert_eq!(space.action_name(label.action(&space)), "flying");
}

#[test]
fn naive_bayes_tuple_accuracy_is_bounded_by_either_half() {
    for seed in 0..5 {
        let inst = generate_instance(&SynthParams::new(LabelSpace::a2d(), 6, 6, 0.4), seed).unwrap();
        let seg = segment(&inst, &SegmentOptions::new(ModelKind::NaiveBayes)).unwrap();
        let sp = &inst.space;
        let pred: Vec<(usize, usize)> = seg
            .labeling
            .labels
            .iter()
            .map(|l| (l.actor(sp), l.action(sp)))
            .collect();
        let gt: Vec<(usize, usize)> = inst
            .gt
            .as_ref()
            .unwrap()
            .iter()
            .map(|t| (sp.actor_of(t.unwrap()), sp.action_of(t.unwrap())))
            .collect();
        let acc = single_label_accuracy(&pred, &gt).unwrap();
        assert!(acc.tuple <= acc.actor.min(acc.action));
    }
}

#[test]
fn binary_joint_product_matches_oracle() {
    let space = LabelSpace::new(&["person"], &["none"], &[("person", "none")]).unwrap();
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=10);
        let inst = random_instance(&mut rng, &space, n);
        let seg = segment(&inst, &SegmentOptions::new(ModelKind::JointProduct)).unwrap();
        let best = oracle(&inst, ModelKind::JointProduct, false);
        assert!((seg.energy() - best.energy()).abs() < 1e-9, "seed {seed}");
    }
}

#[test]
fn tiny_models_stay_within_the_expansion_bound() {
    let space = small_space();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let inst = random_instance(&mut rng, &space, n);
        for kind in [ModelKind::JointProduct, ModelKind::Bilayer, ModelKind::Trilayer] {
            let seg = segment(&inst, &SegmentOptions::new(kind)).unwrap();
            let best = oracle(&inst, kind, false).energy();
            assert!(seg.energy() >= best - 1e-9 && seg.energy() <= 2.0 * best + 1e-9);
        }
    }
}

#[test]
fn conditional_stage_two_only_uses_valid_actions() {
    let space = LabelSpace::a2d();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = random_instance(&mut rng, &space, 15);
    let seg = segment(&inst, &SegmentOptions::new(ModelKind::Conditional)).unwrap();
    let actors = &seg.stages[0].labels;
    for (i, l) in seg.labeling.labels.iter().enumerate() {
        let t = l.tuple().expect("conditional output is always a valid tuple");
        assert_eq!(space.actor_of(t), actors[i]);
    }
}

#[test]
fn conditional_matches_a_staged_oracle() {
    let space = small_space();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let inst = random_instance(&mut rng, &space, n);
        let staged = oracle(&inst, ModelKind::Conditional, false);
        // stage one by hand, then stage two built on its result
        let (actors, e1) = brute_force(&build_actor_field(&inst)).unwrap();
        let (actions, e2) = brute_force(&build_conditional_stage(&inst, &actors)).unwrap();
        assert_eq!(staged.stages[0].labels, actors);
        assert_eq!(staged.stages[1].labels, actions);
        assert!((staged.energy() - e1 - e2).abs() < 1e-12);
        // the solver agrees with the oracle stage by stage on binary actor fields
        let seg = segment(&inst, &SegmentOptions::new(ModelKind::Conditional)).unwrap();
        for s in &seg.stages {
            let (_, best) = brute_force(&s.model).unwrap();
            assert!(s.energy <= 2.0 * best + 1e-9);
        }
    }
}

#[test]
fn bilayer_unary_ranking_is_the_probability_product() {
    let space = small_space();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inst = random_instance(&mut rng, &space, 1);
    let m = build_bilayer(&inst);
    let node = &inst.nodes[0];
    let prob = |t: usize| {
        if t == space.background() {
            node.unary_joint[t]
        } else {
            node.unary_actor[space.actor_of(t)] * node.unary_action[space.action_of(t)] * node.unary_joint[t]
        }
    };
    for a in 0..space.num_tuples() {
        for b in 0..space.num_tuples() {
            let by_energy = m.unary(0, a) < m.unary(0, b) - 1e-12;
            let by_prob = prob(a) > prob(b) * (1.0 + 1e-12);
            assert_eq!(by_energy, by_prob, "tuples {a} {b}");
        }
    }
}

/// Joint and conditional tables all 1 except a weak background.
fn degenerate(inst: &mut Instance) {
    let bg = inst.space.background();
    for n in &mut inst.nodes {
        n.unary_joint.fill(1.0);
        n.unary_joint[bg] = 0.05;
        n.cond_action.fill(1.0);
        n.cond_actor.fill(1.0);
    }
}

#[test]
fn degenerate_tables_nest_the_models() {
    let space = LabelSpace::a2d();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut inst = random_instance(&mut rng, &space, 6);
    degenerate(&mut inst);
    let nb = build_naive_bayes(&inst);
    let bi = build_bilayer(&inst);
    let tri = build_trilayer(&inst);
    let jps_potts = {
        let mut flat = inst.clone();
        for n in &mut flat.nodes {
            n.unary_joint.fill(1.0);
        }
        build_joint_product(&flat)
    };
    for i in 0..inst.num_nodes() {
        for t in 0..space.num_tuples() {
            assert!((tri.unary(i, t) - bi.unary(i, t)).abs() < 1e-12);
            if t != space.background() {
                let split = nb.actor.unary(i, space.actor_of(t)) + nb.action.unary(i, space.action_of(t));
                assert!((bi.unary(i, t) - split).abs() < 1e-12);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let l: Vec<usize> = (0..inst.num_nodes())
            .map(|_| rng.gen_range(0..space.num_tuples()))
            .collect();
        let expected = total_energy(&bi, &l) + total_energy(&jps_potts, &l);
        assert!((total_energy(&tri, &l) - expected).abs() < 1e-9);
    }
}

#[test]
fn degenerate_bilayer_agrees_with_naive_bayes_per_node() {
    let space = LabelSpace::a2d();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut inst = random_instance(&mut rng, &space, 40);
    redraw_scores(&mut rng, &mut inst, 0.01);
    degenerate(&mut inst);
    inst.thetas = Thetas {
        actor: 1e-9,
        action: 1e-9,
        joint: 1e-9,
    };
    let nb = segment(&inst, &SegmentOptions::new(ModelKind::NaiveBayes)).unwrap();
    let bi = segment(&inst, &SegmentOptions::new(ModelKind::Bilayer)).unwrap();
    let mut agreed = 0;
    for (a, b) in nb.labeling.labels.iter().zip(&bi.labeling.labels) {
        if let Some(t) = a.tuple() {
            if t != space.background() {
                assert_eq!(Some(t), b.tuple());
                agreed += 1;
            }
        }
    }
    assert!(agreed > 0);
}

#[test]
fn recognition_on_one_hot_scores() {
    let space = LabelSpace::a2d();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut inst = random_instance(&mut rng, &space, 1);
    let node = &mut inst.nodes[0];
    let (dog, eating) = (space.actor_index("dog").unwrap(), space.action_index("eating").unwrap());
    node.unary_actor.fill(1e-9);
    node.unary_action.fill(1e-9);
    node.unary_actor[dog] = 1.0;
    node.unary_action[eating] = 1.0;
    let nb = video_recognition(&inst, RecognitionKind::NaiveBayes, 0.5).unwrap();
    let target = space.tuple_index("dog", "eating").unwrap();
    for (t, s) in nb.iter().enumerate() {
        if t == target {
            assert_eq!(*s, 1.0);
        } else if t != space.background() {
            assert!(*s < 1e-8);
        }
    }
}

#[test]
fn recognition_hand_combination() {
    // one actor, three actions -> three valid tuples plus background
    let space = LabelSpace::new(
        &["cat"],
        &["eating", "jumping", "none"],
        &[("cat", "eating"), ("cat", "jumping"), ("cat", "none")],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut inst = random_instance(&mut rng, &space, 2);
    for n in &mut inst.nodes {
        n.unary_actor = vec![0.8];
    }
    inst.nodes[0].unary_action = vec![0.9, 0.2, 0.1];
    inst.nodes[1].unary_action = vec![0.5, 0.4, 0.3];
    inst.nodes[0].unary_joint = vec![0.1, 0.6, 0.5, 0.2];
    inst.nodes[1].unary_joint = vec![0.3, 0.8, 0.1, 0.4];
    let tri = video_recognition(&inst, RecognitionKind::Trilayer, 0.25).unwrap();
    // nb = 0.8 * mean actions = (0.56, 0.24, 0.16), jps = (0.2, 0.7, 0.3), bg 0.3
    let expected = [
        0.25 * 0.56 + 0.75 * 0.2,
        0.25 * 0.24 + 0.75 * 0.7,
        0.25 * 0.16 + 0.75 * 0.3,
        0.3,
    ];
    for (a, b) in tri.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| tri[b].total_cmp(&tri[a]));
    assert_eq!(order, vec![1, 0, 2]);
}

proptest! {
    #[test]
    fn trilayer_recognition_is_monotone(seed in any::<u64>(), node in 0usize..3, k in 0usize..9, bump in 0.0f64..0.5) {
        let space = LabelSpace::a2d();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, &space, 3);
        let base = video_recognition(&inst, RecognitionKind::Trilayer, 0.5).unwrap();
        let mut raised = inst.clone();
        let s = &mut raised.nodes[node].unary_action[k];
        *s = (*s + bump).min(1.0);
        let after = video_recognition(&raised, RecognitionKind::Trilayer, 0.5).unwrap();
        for (a, b) in base.iter().zip(&after) {
            prop_assert!(b >= a);
            prop_assert!(b.is_finite() && *b > 0.0);
        }
    }
}

#[test]
fn unit_scores_leave_solutions_unchanged() {
    let space = small_space();
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = random_instance(&mut rng, &space, 5);
        inst.video_scores = Some(vec![1.0; space.num_tuples()]);
        for kind in ModelKind::ALL {
            let mut o = SegmentOptions::new(kind);
            let plain = segment(&inst, &o).unwrap();
            o.label_costs = true;
            let costed = segment(&inst, &o).unwrap();
            assert_eq!(plain.labeling, costed.labeling);
        }
    }
}

#[test]
fn a_near_zero_video_score_evicts_its_label() {
    let space = small_space();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = random_instance(&mut rng, &space, 5);
        // keeps every unary gap well below the cost of the banned label
        redraw_scores(&mut rng, &mut inst, 0.1);
        let banned = rng.gen_range(0..space.num_tuples());
        let mut scores = vec![1.0; space.num_tuples()];
        scores[banned] = (-20.0f64).exp();
        inst.video_scores = Some(scores);
        let seg = oracle(&inst, ModelKind::Trilayer, true);
        assert!(seg.labeling.labels.iter().all(|l| l.tuple() != Some(banned)));
        let solved = {
            let mut o = SegmentOptions::new(ModelKind::Trilayer);
            o.label_costs = true;
            segment(&inst, &o).unwrap()
        };
        assert!(solved.labeling.labels.iter().all(|l| l.tuple() != Some(banned)));
    }
}

#[test]
fn marginal_costs_take_the_best_tuple() {
    let space = small_space();
    // tuples: person-walking, person-none, dog-walking, background
    let scores = [0.2, 0.5, 0.9, 0.3];
    let actor = actor_label_costs(&space, &scores);
    let action = action_label_costs(&space, &scores);
    assert_eq!(actor, vec![label_cost(0.5), label_cost(0.9), label_cost(0.3)]);
    assert_eq!(action, vec![label_cost(0.9), label_cost(0.5), label_cost(0.3)]);
    assert_eq!(tuple_label_costs(&scores)[2], label_cost(0.9));
}

#[test]
fn label_costs_fall_back_to_recognition() {
    let space = small_space();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let inst = random_instance(&mut rng, &space, 4);
    let scores = label_cost_scores(&inst, 0.5).unwrap();
    assert_eq!(
        scores,
        video_recognition(&inst, RecognitionKind::Trilayer, 0.5).unwrap()
    );
    let mut with = inst.clone();
    with.video_scores = Some(vec![0.5; 4]);
    assert_eq!(label_cost_scores(&with, 0.5).unwrap(), vec![0.5; 4]);
}

#[test]
fn conditional_background_nodes_stay_background() {
    let space = small_space();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inst = random_instance(&mut rng, &space, 3);
    let actors = vec![space.num_actors(), 0, 1];
    let m = build_conditional_stage(&inst, &actors);
    assert!(!is_forbidden(m.unary(0, space.num_actions())));
    assert!(is_forbidden(m.unary(0, 0)));
    // dog has only "walking"
    let walking = space.action_index("walking").unwrap();
    for y in 0..=space.num_actions() {
        assert_eq!(m.feasible(2, y), y == walking);
    }
}
