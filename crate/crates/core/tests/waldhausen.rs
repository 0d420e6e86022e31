mod common;

use proptest::prelude::*;
use waldcheck::ambient::{Ambient, Model};
use waldcheck::backends::{pset_category, vect_category, PointedSets};
use waldcheck::classes::MorphismClass;
use waldcheck::fincat;
use waldcheck::waldhausen::{
    comor_structure, coslice_cof_structure, mor_structure, recheck_witness, slice_structure, verify_waldhausen,
    verify_waldhausen_with, Axiom, AxiomStatus, Square, Verdict, VerifyOptions, WaldhausenStructure, Witness,
};
use waldcheck::MorId;

use common::pm;

fn failed(report: &waldcheck::waldhausen::AxiomReport) -> Vec<Axiom> {
    report.failures().map(|(a, _)| a).collect()
}

#[test]
fn all_morphisms_as_weak_equivalences_pass() {
    let p = pset_category(3);
    let all = MorphismClass::all(p.category().clone());
    let s = p.structure.with_classes(p.structure.cof.clone(), all);
    assert_eq!(verify_waldhausen(&s, u64::MAX).verdict(), Verdict::Pass);
}

#[test]
fn missing_identity_fails_c1_with_a_witness() {
    let p = pset_category(3);
    let one = p.concrete.obj_id(&1).unwrap();
    let id = p.category().identity(one);
    let s = p.structure.with_classes(p.structure.cof.with(id, false), p.structure.we.clone());
    let report = verify_waldhausen(&s, u64::MAX);
    assert_eq!(report.verdict(), Verdict::Fail);
    match report.status(Axiom::C1) {
        AxiomStatus::Failed { witness: w @ Witness::Isomorphism(m), .. } => {
            assert_eq!(*m, id);
            assert!(recheck_witness(&s, Axiom::C1, w));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn structures_with_defects_fail_with_recheckable_witnesses() {
    let p = pset_category(2);
    let cat = p.category();
    let (cof, we) = (&p.structure.cof, &p.structure.we);
    let swap = p.id_of(&pm(2, 2, &[2, 1])).unwrap();
    let point = p.id_of(&pm(0, 1, &[])).unwrap();
    let inj = p.id_of(&pm(1, 2, &[1])).unwrap();
    let fold = p.id_of(&pm(2, 1, &[1, 1])).unwrap();
    let defects: Vec<(&str, WaldhausenStructure)> = vec![
        ("iso outside W", p.structure.with_classes(cof.clone(), we.with(swap, false))),
        ("initial map outside C", p.structure.with_classes(cof.with(point, false), we.clone())),
        ("swap outside C", p.structure.with_classes(cof.with(swap, false), we.clone())),
        ("initial identity outside W", p.structure.with_classes(cof.clone(), we.with(cat.identity(fincat::find_initial(cat).unwrap()), false))),
        ("W too big", p.structure.with_classes(cof.clone(), we.with(inj, true))),
        ("fold in C", p.structure.with_classes(cof.with(fold, true), we.clone())),
    ];
    for (name, s) in defects {
        let report = verify_waldhausen(&s, u64::MAX);
        assert_eq!(report.verdict(), Verdict::Fail, "{name}");
        for (axiom, w) in report.failures() {
            assert!(recheck_witness(&s, axiom, w), "{name}: {axiom:?} {w:?}");
        }
    }
}

#[test]
fn zero_budget_is_inconclusive() {
    let p = pset_category(2);
    let report = verify_waldhausen(&p.structure, 0);
    assert_eq!(report.verdict(), Verdict::Inconclusive);
}

#[test]
fn truncated_pushouts_are_counted_not_failed() {
    let p = pset_category(3);
    let report = verify_waldhausen(&p.structure, u64::MAX);
    match report.status(Axiom::C3) {
        AxiomStatus::Verified { beyond_bound, instances } => assert!(*beyond_bound > 0 && *instances > 0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn arrow_category() {
    let p = pset_category(2);
    let m = mor_structure(&p).unwrap();
    let inner = PointedSets;
    // identity square on 0 → 0
    let z = pm(0, 0, &[]);
    let idsq = m.id_of(&Square { from: z.clone(), to: z.clone(), dom: z.clone(), cod: z }).unwrap();
    assert!(m.structure.is_cofibration(idsq) && m.structure.is_weak_equivalence(idsq));
    // u injective, a not injective
    let from = pm(1, 1, &[1]);
    let to = pm(1, 1, &[0]);
    let sq = Square { from: from.clone(), to: to.clone(), dom: pm(1, 1, &[1]), cod: pm(1, 1, &[0]) };
    assert_eq!(inner.compose(&sq.cod, &from), inner.compose(&to, &sq.dom));
    let id = m.id_of(&sq).unwrap();
    assert!(!m.structure.is_cofibration(id));
    for s in m.category().morphisms() {
        let sq = m.concrete.morphism(s);
        let both = |f: &dyn Fn(&waldcheck::backends::PointedMap) -> bool| f(&sq.dom) && f(&sq.cod);
        assert_eq!(m.structure.is_cofibration(s), both(&|f| f.is_injective()));
        assert_eq!(m.structure.is_weak_equivalence(s), both(&|f| f.is_bijective()));
    }
    assert_eq!(verify_waldhausen(&m.structure, u64::MAX).verdict(), Verdict::Pass);
}

#[test]
fn cofibration_arrow_category() {
    let p = pset_category(2);
    let c = comor_structure(&p).unwrap();
    let amb = PointedSets;
    let e1 = pm(1, 2, &[1]);
    let idsq = Square { from: e1.clone(), to: e1.clone(), dom: pm(1, 1, &[1]), cod: waldcheck::backends::PointedMap::identity(2) };
    assert!(c.structure.is_cofibration(c.id_of(&idsq).unwrap()));
    // u = id and f = g: h is a
    let f = pm(0, 1, &[]);
    for a in [pm(1, 2, &[2]), pm(1, 1, &[1])] {
        let g = amb.compose(&a, &f);
        let sq = Square { from: f.clone(), to: g, dom: pm(0, 0, &[]), cod: a.clone() };
        let (_, h) = c.ambient().induced_map(&sq).unwrap();
        assert_eq!(h, a);
        assert!(c.structure.is_cofibration(c.id_of(&sq).unwrap()));
    }
    // h is the only map out of the pushout restricting to (cod, to)
    for s in c.concrete.morphisms() {
        let (po, h) = c.ambient().induced_map(s).unwrap();
        let through: Vec<_> = amb
            .hom(&po.apex, &amb.target(&s.to))
            .into_iter()
            .filter(|k| amb.compose(k, &po.leg_from_b) == s.cod && amb.compose(k, &po.leg_from_c) == s.to)
            .collect();
        assert_eq!(through, vec![h.clone()]);
        let id = c.id_of(s).unwrap();
        assert_eq!(c.structure.is_cofibration(id), s.dom.is_injective() && h.is_injective());
        assert_eq!(c.structure.is_weak_equivalence(id), s.dom.is_bijective() && h.is_bijective());
    }
    assert_eq!(verify_waldhausen(&c.structure, u64::MAX).verdict(), Verdict::Pass);
}

fn same_classification<A: Ambient, B: Ambient>(e: &Model<A>, other: &Model<B>, map: impl Fn(&A::Mor) -> B::Mor) {
    assert_eq!(e.category().num_objects(), other.category().num_objects());
    assert_eq!(e.category().num_morphisms(), other.category().num_morphisms());
    for m in e.category().morphisms() {
        let n = other.id_of(&map(e.concrete.morphism(m))).unwrap();
        assert_eq!(e.structure.is_cofibration(m), other.structure.is_cofibration(n));
        assert_eq!(e.structure.is_weak_equivalence(m), other.structure.is_weak_equivalence(n));
    }
}

#[test]
fn slices() {
    let p = pset_category(3);
    let amb = PointedSets;
    let zero = p.concrete.obj_id(&0).unwrap();
    // 0 is also terminal, so E/0 is E
    let s0 = slice_structure(&p, zero).unwrap();
    let to_zero = |n: usize| pm(n, 0, &vec![0; n]);
    same_classification(&p, &s0, |f| waldcheck::waldhausen::SliceMor {
        from: to_zero(f.src()),
        to: to_zero(f.tgt()),
        map: f.clone(),
    });
    let one = p.concrete.obj_id(&1).unwrap();
    let s1 = slice_structure(&p, one).unwrap();
    for m in s1.category().morphisms() {
        let f = &s1.concrete.morphism(m).map;
        if f.is_bijective() {
            assert!(s1.structure.is_cofibration(m) && s1.structure.is_weak_equivalence(m));
        }
    }
    assert_eq!(verify_waldhausen(&s1.structure, u64::MAX).verdict(), Verdict::Pass);

    // coslice under 0 is E itself
    let c0 = coslice_cof_structure(&p, zero).unwrap();
    same_classification(&p, &c0, |f| waldcheck::waldhausen::SliceMor {
        from: amb.initial_map(&amb.source(f)),
        to: amb.initial_map(&amb.target(f)),
        map: f.clone(),
    });
    assert_eq!(*c0.concrete.object(c0.structure.initial), pm(0, 0, &[]));
    let c1 = coslice_cof_structure(&p, one).unwrap();
    assert!(c1.concrete.objects().iter().all(|f| f.is_injective()));
    assert_eq!(verify_waldhausen(&c1.structure, u64::MAX).verdict(), Verdict::Pass);
}

#[test]
fn slice_over_the_initial_object_of_vector_spaces() {
    let v = vect_category(2, 2).unwrap();
    let amb = v.ambient().clone();
    let c0 = coslice_cof_structure(&v, v.concrete.obj_id(&0).unwrap()).unwrap();
    same_classification(&v, &c0, |f| waldcheck::waldhausen::SliceMor {
        from: amb.initial_map(&amb.source(f)),
        to: amb.initial_map(&amb.target(f)),
        map: f.clone(),
    });
}

#[test]
fn skeletal_and_literal_gluing_sweeps_agree() {
    let p1 = pset_category(1);
    let m = mor_structure(&p1).unwrap();
    let p2 = pset_category(2);
    let inj = p2.structure.cof.clone();
    let structures = [
        ("pset2", p2.structure.clone()),
        ("mor(pset1)", m.structure.clone()),
        ("comor(pset1)", comor_structure(&p1).unwrap().structure),
        ("pset2, W = C", p2.structure.with_classes(inj.clone(), inj)),
    ];
    for (name, s) in structures {
        let skeletal = verify_waldhausen_with(&s, &VerifyOptions::default());
        let literal = verify_waldhausen_with(&s, &VerifyOptions { skeletal_w2: false, ..VerifyOptions::default() });
        assert_eq!(skeletal.verdict(), literal.verdict(), "{name}");
        assert_eq!(failed(&skeletal), failed(&literal), "{name}");
        assert!(!literal.w2_skeletal);
    }
}

#[test]
fn audited_pushouts_are_universal() {
    let p = pset_category(3);
    let opts = VerifyOptions { audit_pushouts: true, ..VerifyOptions::default() };
    assert_eq!(verify_waldhausen_with(&p.structure, &opts).verdict(), Verdict::Pass);
    let m = mor_structure(&pset_category(1)).unwrap();
    assert_eq!(verify_waldhausen_with(&m.structure, &opts).verdict(), Verdict::Pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Random classes on `PSet≤2`: every reported failure is confirmed in
    /// isolation, and a pass agrees with the literal sweep.
    #[test]
    fn witnesses_are_recheckable(cof in prop::collection::vec(any::<bool>(), 23), we in prop::collection::vec(any::<bool>(), 23)) {
        let p = pset_category(2);
        let cat = p.category().clone();
        let s = p.structure.with_classes(
            MorphismClass::from_mask(cat.clone(), cof).unwrap(),
            MorphismClass::from_mask(cat, we).unwrap(),
        );
        let report = verify_waldhausen(&s, u64::MAX);
        for (axiom, w) in report.failures() {
            prop_assert!(recheck_witness(&s, axiom, w));
        }
        let literal = verify_waldhausen_with(&s, &VerifyOptions { skeletal_w2: false, ..VerifyOptions::default() });
        prop_assert_eq!(report.verdict(), literal.verdict());
    }
}

#[test]
fn unused_ids_are_rejected() {
    let p = pset_category(1);
    assert!(MorphismClass::from_ids(p.category().clone(), [MorId(99)]).is_err());
}
