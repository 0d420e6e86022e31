mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use waldcheck::quiver::{is_acyclic, is_left_rooted, rooted_sequence, subquiver, Quiver};

use common::{kahn_acyclic, quiver_from_pairs, stages_by_definition};

fn set(vs: &[u32]) -> BTreeSet<u32> {
    vs.iter().copied().collect()
}

#[test]
fn chain_stages() {
    let seq = rooted_sequence(&Quiver::chain(3));
    assert_eq!(seq.stages, vec![set(&[]), set(&[1]), set(&[1, 2]), set(&[1, 2, 3])]);
    assert_eq!(seq.zeta(), 3);
    assert_eq!(seq.new_vertices(2), vec![3]);
    assert!(seq.new_vertices(3).is_empty());
}

#[test]
fn first_stage_is_the_sources() {
    let q = quiver_from_pairs(5, &[(1, 2), (3, 2), (2, 4), (4, 4)]);
    let seq = rooted_sequence(&q);
    assert_eq!(seq.stage(1), Some(&set(&[1, 3, 5])));
    assert_eq!(seq.last(), &set(&[1, 2, 3, 5]));
    assert!(!is_left_rooted(&q));
}

#[test]
fn a_loop_stays_outside() {
    let q = quiver_from_pairs(1, &[(1, 1)]);
    let seq = rooted_sequence(&q);
    assert_eq!(seq.stages, vec![set(&[])]);
    assert!(!is_left_rooted(&q) && !is_acyclic(&q));
}

#[test]
fn small_examples() {
    assert!(is_left_rooted(&Quiver::fork()));
    assert!(is_left_rooted(&Quiver::single_vertex()));
    let cycle = quiver_from_pairs(3, &[(1, 2), (2, 3), (3, 1)]);
    assert!(!is_left_rooted(&cycle));
    assert_eq!(rooted_sequence(&cycle).zeta(), 0);
    let empty = Quiver::new([], []).unwrap();
    assert!(is_left_rooted(&empty) && is_acyclic(&empty));
    assert_eq!(rooted_sequence(&empty).zeta(), 0);
    // parallel arrows do not delay a vertex
    let double = quiver_from_pairs(2, &[(1, 2), (1, 2)]);
    assert_eq!(rooted_sequence(&double).zeta(), 2);
}

#[test]
fn subquiver_examples() {
    let fork = Quiver::fork();
    let q1 = subquiver(&fork, 1).unwrap();
    assert_eq!(q1.vertices(), &[1, 2]);
    assert!(q1.arrows().is_empty());
    assert_eq!(subquiver(&fork, 2).unwrap(), fork);
    assert!(subquiver(&fork, 0).unwrap().is_empty());
    let q = quiver_from_pairs(3, &[(1, 2), (2, 3), (1, 3)]);
    let q2 = subquiver(&q, 2).unwrap();
    assert_eq!(q2.vertices(), &[1, 2]);
    assert_eq!(q2.arrows().len(), 1);
    assert!(subquiver(&q, 4).is_err());
}

fn random_quiver(rng: &mut StdRng) -> Quiver {
    let n = rng.gen_range(0..=8u32);
    let m = if n == 0 { 0 } else { rng.gen_range(0..=2 * n) };
    let pairs: Vec<(u32, u32)> = (0..m).map(|_| (rng.gen_range(1..=n), rng.gen_range(1..=n))).collect();
    quiver_from_pairs(n, &pairs)
}

#[test]
fn random_quivers_match_the_oracles() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut rooted = 0;
    for _ in 0..1000 {
        let q = random_quiver(&mut rng);
        let seq = rooted_sequence(&q);
        assert_eq!(seq.stages, stages_by_definition(&q), "{q:?}");
        assert_eq!(is_acyclic(&q), kahn_acyclic(&q), "{q:?}");
        assert_eq!(is_left_rooted(&q), kahn_acyclic(&q), "{q:?}");
        rooted += usize::from(is_left_rooted(&q));
    }
    // both outcomes occur
    assert!(rooted > 100 && rooted < 900, "{rooted}");
}

fn arbitrary_quiver() -> impl Strategy<Value = Quiver> {
    (1u32..=7).prop_flat_map(|n| {
        prop::collection::vec((1..=n, 1..=n), 0..=(2 * n as usize)).prop_map(move |pairs| quiver_from_pairs(n, &pairs))
    })
}

proptest! {
    #[test]
    fn stages_increase_strictly(q in arbitrary_quiver()) {
        let seq = rooted_sequence(&q);
        prop_assert!(seq.stages[0].is_empty());
        for w in seq.stages.windows(2) {
            prop_assert!(w[0].is_subset(&w[1]) && w[0] != w[1]);
        }
        prop_assert!(seq.zeta() <= q.vertices().len());
    }

    #[test]
    fn arrows_into_a_stage_start_one_stage_earlier(q in arbitrary_quiver()) {
        let seq = rooted_sequence(&q);
        for mu in 1..=seq.zeta() {
            for &i in seq.stage(mu).unwrap() {
                for a in q.incoming(i) {
                    prop_assert!(seq.stage(mu - 1).unwrap().contains(&a.source));
                }
            }
        }
    }

    #[test]
    fn chains_are_rooted_one_vertex_at_a_time(n in 0u32..12) {
        let seq = rooted_sequence(&Quiver::chain(n));
        prop_assert_eq!(seq.zeta(), n as usize);
        for mu in 0..seq.zeta() {
            prop_assert_eq!(seq.new_vertices(mu), vec![mu as u32 + 1]);
        }
    }

    #[test]
    fn subquivers_are_full_on_their_stage(q in arbitrary_quiver(), mu in 0usize..8) {
        let seq = rooted_sequence(&q);
        if let Ok(sub) = subquiver(&q, mu) {
            let stage = seq.stage(mu).unwrap();
            prop_assert_eq!(sub.vertices().iter().copied().collect::<BTreeSet<_>>(), stage.clone());
            let expected = q.arrows().iter().filter(|a| stage.contains(&a.source) && stage.contains(&a.target)).count();
            prop_assert_eq!(sub.arrows().len(), expected);
        } else {
            prop_assert!(mu > seq.zeta());
        }
    }
}
