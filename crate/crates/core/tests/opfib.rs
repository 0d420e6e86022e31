mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use waldcheck::ambient::{Ambient, Model};
use waldcheck::backends::{pset_category, PointedSets};
use waldcheck::fincat::Functor;
use waldcheck::opfib::{
    check_waldhausen_opfib, codomain_opfib, domain_opfib, total_structure, FiberFamily, ModelOpfibration,
    OpfibCheckOptions,
};
use waldcheck::waldhausen::{
    coslice_cof_structure, slice_structure, verify_waldhausen, Axiom, CoMorCat, MorCat, SliceMor, Square, Verdict,
};
use waldcheck::{FinCategory, MorId};

use common::is_invertible;

type Codomain = ModelOpfibration<MorCat<PointedSets>, PointedSets>;
type Domain = ModelOpfibration<CoMorCat<PointedSets>, PointedSets>;

fn codomain(n: usize) -> Codomain {
    codomain_opfib(&pset_category(n)).unwrap()
}

fn domain(n: usize, excess: usize) -> Domain {
    domain_opfib(&pset_category(n), excess).unwrap()
}

/// Straight from the definition: every `g: X → Z` and `v` with
/// `v∘p(f) = p(g)` factor as `h∘f` with `p(h) = v` for exactly one `h`.
fn cocartesian_by_definition(p: &Functor, f: MorId) -> bool {
    let (t, b): (&FinCategory, &FinCategory) = (&p.source, &p.target);
    let (x, y) = (t.source(f), t.target(f));
    t.morphisms().filter(|&g| t.source(g) == x).all(|g| {
        let z = t.target(g);
        b.hom(p.obj(y), p.obj(z)).iter().filter(|&&v| b.compose(v, p.mor(f)) == p.mor(g)).all(|&v| {
            t.hom(y, z).iter().filter(|&&h| p.mor(h) == v && t.compose(h, f) == g).count() == 1
        })
    })
}

#[test]
fn identities_and_chosen_lifts_are_cocartesian() {
    let op = codomain(2);
    let t = op.data.total();
    for x in t.objects() {
        assert!(op.data.is_cocartesian(t.identity(x)));
    }
    for (_, lift) in op.data.entries() {
        assert!(op.data.is_cocartesian(lift.lifting));
    }
    let op = domain(2, 1);
    for (_, lift) in op.data.entries() {
        assert!(op.data.is_cocartesian(lift.lifting));
    }
}

#[test]
fn cocartesian_agrees_with_the_definition() {
    let op = codomain(1);
    for f in op.data.total().morphisms() {
        assert_eq!(op.data.is_cocartesian(f), cocartesian_by_definition(op.data.functor(), f));
    }
    let op = domain(1, 1);
    for f in op.data.total().morphisms() {
        assert_eq!(op.data.is_cocartesian(f), cocartesian_by_definition(op.data.functor(), f));
    }
}

#[test]
fn codomain_squares_are_cocartesian_when_the_top_is_invertible() {
    let op = codomain(2);
    let e = pset_category(2);
    for f in op.data.total().morphisms() {
        let s = op.total.concrete.morphism(f);
        let top = e.id_of(&s.dom).unwrap();
        assert_eq!(op.data.is_cocartesian(f), is_invertible(e.category(), top), "{s:?}");
    }
}

#[test]
fn domain_squares_are_cocartesian_when_the_induced_map_is_invertible() {
    let op = domain(1, 1);
    let amb = op.total.ambient().clone();
    for f in op.data.total().morphisms() {
        let s = op.total.concrete.morphism(f);
        let (_, h) = amb.induced_map(s).unwrap();
        assert_eq!(op.data.is_cocartesian(f), h.is_bijective(), "{s:?}");
    }
}

#[test]
fn codomain_fibers_are_slices() {
    let e = pset_category(2);
    let op = codomain(2);
    let fibers = op.fibers().unwrap();
    for a in e.category().objects() {
        let fib = fibers.fiber(a);
        let slice = slice_structure(&e, a).unwrap();
        assert_eq!(fib.category.num_objects(), slice.category().num_objects());
        assert_eq!(fib.category.num_morphisms(), slice.category().num_morphisms());
        let s = fibers.structure(a);
        for m in fib.category.morphisms() {
            let sq = op.total.concrete.morphism(fib.total_mor(m));
            assert!(sq.cod == PointedSets.identity(&sq.cod.src()));
            let n = slice.id_of(&SliceMor { from: sq.from.clone(), to: sq.to.clone(), map: sq.dom.clone() }).unwrap();
            assert_eq!(s.is_cofibration(m), slice.structure.is_cofibration(n));
            assert_eq!(s.is_weak_equivalence(m), slice.structure.is_weak_equivalence(n));
        }
    }
}

#[test]
fn domain_fibers_are_coslices() {
    let op = domain(1, 1);
    let fibers = op.fibers().unwrap();
    for a in op.base.category().objects() {
        let rank = *op.base.concrete.object(a);
        // the fiber over A reaches rank(A) + excess
        let e = pset_category(rank + 1);
        let coslice = coslice_cof_structure(&e, e.concrete.obj_id(&rank).unwrap()).unwrap();
        let fib = fibers.fiber(a);
        assert_eq!(fib.category.num_objects(), coslice.category().num_objects());
        assert_eq!(fib.category.num_morphisms(), coslice.category().num_morphisms());
        let s = fibers.structure(a);
        for m in fib.category.morphisms() {
            let sq = op.total.concrete.morphism(fib.total_mor(m));
            let n = coslice.id_of(&SliceMor { from: sq.from.clone(), to: sq.to.clone(), map: sq.cod.clone() }).unwrap();
            assert_eq!(s.is_cofibration(m), coslice.structure.is_cofibration(n));
            assert_eq!(s.is_weak_equivalence(m), coslice.structure.is_weak_equivalence(n));
        }
    }
}

#[test]
fn factoring_a_chosen_lift_leaves_an_identity() {
    let op = codomain(2);
    let t = op.data.total();
    for (_, lift) in op.data.entries() {
        let parts = op.data.factor(lift.lifting).unwrap();
        assert_eq!(parts.lifting, lift.lifting);
        assert!(t.is_identity(parts.fiber_part));
    }
}

#[test]
fn fiber_parts_of_codomain_and_domain_squares() {
    let op = codomain(2);
    let amb = PointedSets;
    for f in op.data.total().morphisms() {
        let s = op.total.concrete.morphism(f);
        let parts = op.data.factor(f).unwrap();
        let fp = op.total.concrete.morphism(parts.fiber_part);
        assert_eq!(fp.dom, s.dom);
        assert_eq!(fp.cod, amb.identity(&s.cod.tgt()));
    }
    let op = domain(1, 1);
    let comor = op.total.ambient().clone();
    for f in op.data.total().morphisms() {
        let s = op.total.concrete.morphism(f);
        let parts = op.data.factor(f).unwrap();
        let fp = op.total.concrete.morphism(parts.fiber_part);
        assert_eq!(fp.dom, amb.identity(&s.dom.tgt()));
        // the fiber part is h, up to the chosen pushout object
        let (_, h) = comor.induced_map(s).unwrap();
        assert_eq!(fp.cod.is_bijective(), h.is_bijective());
        assert_eq!(fp.cod.is_injective(), h.is_injective());
    }
}

#[test]
fn reindexing_along_identities_is_the_identity() {
    let op = codomain(2);
    let b = op.data.base();
    for a in b.objects() {
        let r = op.data.reindex(b.identity(a)).unwrap();
        let fib = op.data.fiber(a);
        for x in fib.category.objects() {
            assert_eq!(r.functor.obj(x), x);
        }
        for m in fib.category.morphisms() {
            assert_eq!(r.functor.mor(m), m);
        }
    }
}

#[test]
fn codomain_reindexing_postcomposes() {
    let op = codomain(2);
    let amb = PointedSets;
    let b = op.data.base();
    for u in b.morphisms() {
        let r = op.data.reindex(u).unwrap();
        let (src, dst) = (op.data.fiber(b.source(u)), op.data.fiber(b.target(u)));
        let um = op.base.concrete.morphism(u);
        for x in src.category.objects() {
            let f = op.total.concrete.object(src.total_obj(x));
            assert_eq!(op.total.concrete.object(dst.total_obj(r.functor.obj(x))), &amb.compose(um, f));
        }
        for m in src.category.morphisms() {
            let s = op.total.concrete.morphism(src.total_mor(m));
            let image = op.total.concrete.morphism(dst.total_mor(r.functor.mor(m)));
            assert_eq!(image.dom, s.dom);
            assert_eq!(image.cod, amb.identity(&um.tgt()));
        }
    }
}

#[test]
fn domain_reindexing_pushes_out() {
    let op = domain(1, 1);
    let amb = PointedSets;
    let b = op.data.base();
    for u in b.morphisms() {
        let r = op.data.reindex(u).unwrap();
        let (src, dst) = (op.data.fiber(b.source(u)), op.data.fiber(b.target(u)));
        let um = op.base.concrete.morphism(u);
        for m in src.category.morphisms() {
            let s = op.total.concrete.morphism(src.total_mor(m));
            let image = op.total.concrete.morphism(dst.total_mor(r.functor.mor(m)));
            assert_eq!(image.dom, amb.identity(&um.tgt()));
            // g' restricts to g along the pushout legs
            let lx = op.total.concrete.morphism(op.data.lift(u, src.total_obj(src.category.source(m))).lifting);
            let ly = op.total.concrete.morphism(op.data.lift(u, src.total_obj(src.category.target(m))).lifting);
            assert_eq!(amb.compose(&image.cod, &lx.cod), amb.compose(&ly.cod, &s.cod));
        }
    }
}

#[test]
fn codomain_and_domain_opfibrations_are_waldhausen() {
    let op = codomain(2);
    let fibers = op.fibers().unwrap();
    let report = check_waldhausen_opfib(&op.data, &fibers, &OpfibCheckOptions::default());
    assert!(report.passed(), "{}", report.render_text(&op.data));
    assert_eq!(report.cocartesian_checked, op.data.entries().len());

    let op = domain(2, 1);
    let fibers = op.fibers().unwrap();
    let report = check_waldhausen_opfib(&op.data, &fibers, &OpfibCheckOptions::default());
    assert!(report.passed(), "{}", report.render_text(&op.data));
}

#[test]
fn a_corrupted_fiber_is_named() {
    let op = codomain(2);
    let t = op.data.total();
    let x = t.objects().nth(5).unwrap();
    let id = t.identity(x);
    let s = &op.total.structure;
    let broken = s.with_classes(s.cof.with(id, false), s.we.clone());
    let fibers = FiberFamily::derive(&op.data, &broken).unwrap();
    let report = check_waldhausen_opfib(&op.data, &fibers, &OpfibCheckOptions::default());
    assert!(!report.passed());
    let failed: Vec<_> = report.failed_fibers().collect();
    assert_eq!(failed.len(), 1);
    let (a, r) = failed[0];
    assert_eq!(*a, op.data.functor().obj(x));
    assert!(r.failures().any(|(axiom, _)| axiom == Axiom::C1));
    assert!(report.render_text(&op.data).contains("C1 fails"));
}

#[test]
fn cleavage_sources_restrict_the_sweep() {
    let op = codomain(2);
    let fibers = op.fibers().unwrap();
    let x = op.data.total().objects().next().unwrap();
    let opts = OpfibCheckOptions { cleavage_sources: Some(HashSet::from([x])), ..OpfibCheckOptions::default() };
    let report = check_waldhausen_opfib(&op.data, &fibers, &opts);
    assert_eq!(report.cocartesian_checked, op.base.category().outgoing(op.data.functor().obj(x)).len());
}

#[test]
fn total_structures_recover_the_arrow_categories() {
    let op = codomain(2);
    let ts = op.total_structure().unwrap();
    assert!(op.disagreements(&ts).is_empty());
    let t = op.data.total();
    for x in t.objects() {
        let id = t.identity(x);
        assert!(ts.structure.is_cofibration(id) && ts.structure.is_weak_equivalence(id));
    }
    assert_eq!(verify_waldhausen(&ts.structure, u64::MAX).verdict(), Verdict::Pass);

    let op = domain(1, 1);
    let ts = op.total_structure().unwrap();
    assert!(op.disagreements(&ts).is_empty());
    assert_eq!(verify_waldhausen(&ts.structure, u64::MAX).verdict(), Verdict::Pass);
}

#[test]
fn the_total_initial_object_lies_over_the_base_initial_object() {
    let op = codomain(1);
    let fibers = op.fibers().unwrap();
    let base = &op.base.structure;
    let ts = total_structure(&op.data, base, &fibers).unwrap();
    let i = ts.structure.initial;
    assert_eq!(op.data.functor().obj(i), base.initial);
    assert_eq!(op.total.concrete.object(i), &PointedSets.identity(&0));
}

#[test]
fn perturbed_cleavages_classify_alike() {
    let op = codomain(2);
    let fibers = op.fibers().unwrap();
    let base = &op.base.structure;
    let reference = total_structure(&op.data, base, &fibers).unwrap();
    let mut seen = vec![op.data.entries()];
    for variant in 1..=3 {
        let data = std::sync::Arc::new(op.data.perturbed(variant).unwrap());
        let entries = data.entries();
        for (_, lift) in &entries {
            assert!(data.is_cocartesian(lift.lifting));
        }
        assert!(!seen.contains(&entries), "variant {variant} repeats a cleavage");
        seen.push(entries);
        let ts = total_structure(&data, base, &fibers).unwrap();
        assert_eq!(ts.structure.cof, reference.structure.cof);
        assert_eq!(ts.structure.we, reference.structure.we);
    }
}

#[test]
fn coherence_isomorphisms_exist() {
    let op = codomain(2);
    let (t, b) = (op.data.total(), op.data.base());
    for u in b.morphisms() {
        for &v in b.outgoing(b.target(u)) {
            for &x in op.data.objects_over(b.source(u)) {
                let sigma = op.data.coherence(u, v, x).unwrap();
                assert!(is_invertible(t, sigma));
                assert!(op.data.is_vertical(sigma));
            }
        }
    }
}

#[test]
fn total_classes_compose() {
    let op = codomain(2);
    let ts = op.total_structure().unwrap();
    assert_eq!(ts.structure.cof.composition_failure(), None);
    assert_eq!(ts.structure.we.composition_failure(), None);
}

struct Fixture {
    op: Codomain,
    e: Model<PointedSets>,
    total: waldcheck::opfib::TotalStructure,
}

thread_local! {
    static FIXTURE: Fixture = {
        let op = codomain(2);
        let total = op.total_structure().unwrap();
        Fixture { op, e: pset_category(2), total }
    };
}

fn pick_morphism(fx: &Fixture, pick: prop::sample::Index) -> MorId {
    MorId(pick.index(fx.op.data.total().num_morphisms()) as u32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorizations_are_unique(pick in any::<prop::sample::Index>()) {
        FIXTURE.with(|fx| {
            let (op, f) = (&fx.op, pick_morphism(fx, pick));
            let t = op.data.total();
            let parts = op.data.factor(f).unwrap();
            prop_assert_eq!(t.compose(parts.fiber_part, parts.lifting), f);
            prop_assert!(op.data.is_vertical(parts.fiber_part));
            let through = op
                .data
                .vertical_hom(t.target(parts.lifting), t.target(f))
                .iter()
                .filter(|&&m| t.compose(m, parts.lifting) == f)
                .count();
            prop_assert_eq!(through, 1);
            Ok(())
        })?;
    }

    #[test]
    fn invertible_morphisms_have_invertible_fiber_parts(pick in any::<prop::sample::Index>()) {
        FIXTURE.with(|fx| {
            let (t, f) = (fx.op.data.total(), pick_morphism(fx, pick));
            if is_invertible(t, f) {
                prop_assert!(is_invertible(t, fx.op.data.factor(f).unwrap().fiber_part));
            }
            Ok(())
        })?;
    }

    #[test]
    fn perturbation_keeps_the_fiber_parts_classified(variant in 1usize..6, pick in any::<prop::sample::Index>()) {
        FIXTURE.with(|fx| {
            let op = &fx.op;
            let data = op.data.perturbed(variant).unwrap();
            let f = pick_morphism(fx, pick);
            let (a, b) = (op.data.factor(f).unwrap(), data.factor(f).unwrap());
            let s = &op.total.structure;
            prop_assert_eq!(s.is_cofibration(a.fiber_part), s.is_cofibration(b.fiber_part));
            prop_assert_eq!(s.is_weak_equivalence(a.fiber_part), s.is_weak_equivalence(b.fiber_part));
            Ok(())
        })?;
    }

    #[test]
    fn square_classes_are_componentwise(pick in any::<prop::sample::Index>()) {
        FIXTURE.with(|fx| {
            let (e, ts, f) = (&fx.e, &fx.total, pick_morphism(fx, pick));
            let s: &Square<_> = fx.op.total.concrete.morphism(f);
            let (a, u) = (e.id_of(&s.dom).unwrap(), e.id_of(&s.cod).unwrap());
            prop_assert_eq!(ts.structure.is_cofibration(f), e.structure.is_cofibration(a) && e.structure.is_cofibration(u));
            prop_assert_eq!(
                ts.structure.is_weak_equivalence(f),
                e.structure.is_weak_equivalence(a) && e.structure.is_weak_equivalence(u)
            );
            Ok(())
        })?;
    }
}
