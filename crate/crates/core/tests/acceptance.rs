//! The acceptance criteria, one line each. Runs without the libtest harness
//! so the report reads top to bottom; exits nonzero when any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use waldcheck::ambient::{Ambient, AmbientCertifier, Factorizing, Model};
use waldcheck::backends::{pset_category, vect_category, PointedSets};
use waldcheck::classes::{is_wfs_certified, llp_class, rlp_class};
use waldcheck::fincat;
use waldcheck::opfib::{codomain_opfib, domain_opfib, total_structure};
use waldcheck::quiver::{is_left_rooted, rooted_sequence, Quiver};
use waldcheck::repcat::{fiber_iso, reedy_objects, rep_waldhausen, restriction_opfib, RepCat, RepOptions};
use waldcheck::waldhausen::{comor_structure, mor_structure, verify_waldhausen, Verdict};
use waldcheck::MorId;

use common::{is_universal_cocone, is_universal_coproduct, kahn_acyclic, quiver_from_pairs};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn surjections_wfs<A: Factorizing>(e: &Model<A>, surjective: impl Fn(&A::Mor) -> bool) -> bool {
    let cof = e.concrete.cofibrations();
    let surj = e.concrete.class(surjective);
    is_wfs_certified(&cof, &surj, Some(&AmbientCertifier::new(e.concrete.clone()))).holds()
}

fn backend_soundness() -> Outcome {
    let p = pset_category(3);
    let v = vect_category(2, 2).unwrap();
    let f2 = v.ambient().clone();
    ensure!(verify_waldhausen(&p.structure, u64::MAX).verdict() == Verdict::Pass, "pset_category(3) fails the axioms");
    ensure!(verify_waldhausen(&v.structure, u64::MAX).verdict() == Verdict::Pass, "vect_category(2, 2) fails the axioms");
    ensure!(surjections_wfs(&p, |f| f.is_surjective()), "(injections, surjections) is not a WFS on pset_category(3)");
    ensure!(surjections_wfs(&v, |f| f2.is_surjective(f)), "(injections, surjections) is not a WFS on vect_category(2, 2)");
    Ok(format!("{} + {} morphisms verified, both WFS", p.category().num_morphisms(), v.category().num_morphisms()))
}

fn codomain_total() -> Outcome {
    let e = pset_category(2);
    let op = codomain_opfib(&e).map_err(|e| e.to_string())?;
    let ts = op.total_structure().map_err(|e| e.to_string())?;
    let mor = mor_structure(&e).map_err(|e| e.to_string())?;
    ensure!(op.disagreements(&ts).is_empty(), "{} morphisms classified differently", op.disagreements(&ts).len());
    for (k, s) in mor.concrete.morphisms().iter().enumerate() {
        let m = op.total.id_of(s).ok_or("a square of Mor(E) is missing from the total category")?;
        let k = MorId(k as u32);
        ensure!(ts.structure.is_cofibration(m) == mor.structure.is_cofibration(k), "cofibration mismatch at {s:?}");
        ensure!(ts.structure.is_weak_equivalence(m) == mor.structure.is_weak_equivalence(k), "weak equivalence mismatch at {s:?}");
    }
    Ok(format!("{} morphisms of Mor(E) agree", mor.category().num_morphisms()))
}

fn domain_total() -> Outcome {
    let e = pset_category(2);
    let op = domain_opfib(&e, 2).map_err(|e| e.to_string())?;
    let ts = op.total_structure().map_err(|e| e.to_string())?;
    let comor = comor_structure(&e).map_err(|e| e.to_string())?;
    let dis = op.disagreements(&ts);
    ensure!(dis.is_empty(), "{} morphisms of the window classified differently", dis.len());
    for (k, s) in comor.concrete.morphisms().iter().enumerate() {
        let m = op.total.id_of(s).ok_or("a square of coMor(E) is missing from the total category")?;
        let k = MorId(k as u32);
        ensure!(ts.structure.is_cofibration(m) == comor.structure.is_cofibration(k), "cofibration mismatch at {s:?}");
        ensure!(ts.structure.is_weak_equivalence(m) == comor.structure.is_weak_equivalence(k), "weak equivalence mismatch at {s:?}");
    }
    let verdict = verify_waldhausen(&ts.structure, u64::MAX).verdict();
    ensure!(verdict == Verdict::Pass, "the total structure is not Waldhausen: {verdict:?}");
    Ok(format!(
        "{} morphisms of coMor(E) agree, {} in the window, total structure verified",
        comor.category().num_morphisms(),
        op.total.category().num_morphisms()
    ))
}

fn test_quivers() -> [(&'static str, Quiver); 3] {
    [("single vertex", Quiver::single_vertex()), ("chain", Quiver::chain(2)), ("fork", Quiver::fork())]
}

fn representations() -> Outcome {
    let e = pset_category(2);
    let mut parts = Vec::new();
    for (name, q) in test_quivers() {
        let r = rep_waldhausen(&q, &e, &RepOptions::default()).map_err(|e| e.to_string())?;
        ensure!(r.report.verdict() == Verdict::Pass, "{name}: {:?}", r.report.verdict());
        for s in &r.stages {
            ensure!(s.opfib.passed(), "{name}: stage {} is not a Waldhausen opfibration", s.mu);
            ensure!(s.disagreements.is_empty(), "{name}: stage {} has {} disagreements", s.mu, s.disagreements.len());
        }
        let checked: usize = r.stages.iter().map(|s| s.total_morphisms).sum();
        parts.push(format!("{name} {} morphisms, {checked} staged", r.model.category().num_morphisms()));
    }
    Ok(parts.join("; "))
}

/// Injective pointed maps `a → b`.
fn injections(a: usize, b: usize) -> usize {
    (b + 1 - a..=b).product()
}

fn fiber_isomorphism() -> Outcome {
    let e = pset_category(2);
    let excess = 2;
    let ro = restriction_opfib(&Quiver::chain(2), 1, &e, excess).map_err(|e| e.to_string())?;
    let fibers = ro.op.fibers().map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for a in ro.op.base.category().objects() {
        let r = fiber_iso(&ro, &fibers, a).map_err(|e| e.to_string())?;
        ensure!(r.holds(), "fiber over {a}: {r:?}");
        let l = ro.op.base.concrete.object(a).on_vertices[0];
        let range = l..=l + excess;
        let objects: usize = range.clone().map(|b| injections(l, b)).sum();
        let morphisms: usize = range
            .clone()
            .flat_map(|b| range.clone().map(move |c| injections(l, b) * injections(l, c) * (c + 1).pow((b - l) as u32)))
            .sum();
        ensure!(
            (r.fiber_objects, r.fiber_morphisms) == (objects, morphisms),
            "fiber over {a} has {}/{}, expected {objects}/{morphisms}",
            r.fiber_objects,
            r.fiber_morphisms
        );
        counts.push(format!("{}/{}", r.fiber_objects, r.fiber_morphisms));
    }
    Ok(format!("fibers {}", counts.join(", ")))
}

fn componentwise<A: Ambient>(amb: Arc<A>, window: &[A::Obj], invertible: impl Fn(&A::Mor) -> bool) -> Result<usize, String> {
    let mut n = 0;
    for (name, q) in test_quivers() {
        let objects = reedy_objects(&amb, &q, window).map_err(|e| e.to_string())?;
        let m = Model::new(Arc::new(RepCat::new(amb.clone(), q)), objects).map_err(|e| e.to_string())?;
        for (k, f) in m.concrete.morphisms().iter().enumerate() {
            let we = m.structure.is_weak_equivalence(MorId(k as u32));
            ensure!(we == f.components.iter().all(&invertible), "{name}: {f:?}");
        }
        n += m.category().num_morphisms();
    }
    Ok(n)
}

fn pointed_weak_equivalences() -> Outcome {
    let p = pset_category(2);
    let a = componentwise(p.ambient().clone(), p.concrete.objects(), |f| f.is_bijective())?;
    let v = vect_category(2, 1).unwrap();
    let f2 = v.ambient().clone();
    let b = componentwise(f2.clone(), v.concrete.objects(), move |f| f2.is_invertible(f))?;
    Ok(format!("{a} pointed-set and {b} vector-space morphisms"))
}

fn rooted_sequences() -> Outcome {
    for n in 0..=10u32 {
        let seq = rooted_sequence(&Quiver::chain(n));
        ensure!(seq.zeta() == n as usize, "chain {n}: zeta {}", seq.zeta());
        for k in 0..=n {
            ensure!(seq.stage(k as usize).unwrap().iter().copied().eq(1..=k), "chain {n}: V_{k}");
        }
    }
    let cycles = [
        quiver_from_pairs(1, &[(1, 1)]),
        quiver_from_pairs(2, &[(1, 2), (2, 1)]),
        quiver_from_pairs(4, &[(1, 2), (2, 3), (3, 4), (4, 2)]),
    ];
    ensure!(cycles.iter().all(|q| !is_left_rooted(q)), "a quiver with a cycle is reported left rooted");
    let mut rng = StdRng::seed_from_u64(2024);
    let mut acyclic = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8u32);
        let m = rng.gen_range(0..=2 * n);
        let pairs: Vec<(u32, u32)> = (0..m).map(|_| (rng.gen_range(1..=n), rng.gen_range(1..=n))).collect();
        let q = quiver_from_pairs(n, &pairs);
        ensure!(is_left_rooted(&q) == kahn_acyclic(&q), "disagreement on {q:?}");
        acyclic += usize::from(kahn_acyclic(&q));
    }
    Ok(format!("1000 random quivers, {acyclic} acyclic"))
}

fn cleavage_independence() -> Outcome {
    let e = pset_category(2);
    let op = domain_opfib(&e, 2).map_err(|e| e.to_string())?;
    let fibers = op.fibers().map_err(|e| e.to_string())?;
    let reference = total_structure(&op.data, &e.structure, &fibers).map_err(|e| e.to_string())?;
    let mut cleavages = vec![op.data.entries()];
    for variant in 1..=3 {
        let data = Arc::new(op.data.perturbed(variant).map_err(|e| e.to_string())?);
        let entries = data.entries();
        ensure!(entries.iter().all(|(_, l)| data.is_cocartesian(l.lifting)), "variant {variant} has a lift that is not cocartesian");
        ensure!(!cleavages.contains(&entries), "variant {variant} repeats an earlier cleavage");
        cleavages.push(entries);
        let ts = total_structure(&data, &e.structure, &fibers).map_err(|e| e.to_string())?;
        ensure!(ts.structure.cof == reference.structure.cof, "variant {variant} changes the cofibrations");
        ensure!(ts.structure.we == reference.structure.we, "variant {variant} changes the weak equivalences");
    }
    Ok("4 distinct cleavages, identical classes".into())
}

fn oracle_sweeps() -> Outcome {
    let mut pushouts = 0;
    let p = pset_category(2);
    let cat = p.category();
    for f in cat.morphisms() {
        for &g in cat.outgoing(cat.source(f)) {
            if let Some(po) = fincat::pushout(cat, f, g) {
                ensure!(is_universal_cocone(cat, f, g, po.leg_from_b, po.leg_from_c), "pushout of {f}, {g}");
                pushouts += 1;
            }
            let recipe = p.ambient().pushout(p.concrete.morphism(f), p.concrete.morphism(g));
            if let Some(po) = recipe {
                let ids = (p.id_of(&po.leg_from_b), p.id_of(&po.leg_from_c));
                if let (Some(b), Some(c)) = ids {
                    ensure!(is_universal_cocone(cat, f, g, b, c), "recipe pushout of {f}, {g}");
                    pushouts += 1;
                }
            }
        }
    }
    let mut coproducts = 0;
    let v = vect_category(2, 2).unwrap();
    for e in [pset_category(3).category().clone(), v.category().clone()] {
        for x in e.objects() {
            for y in e.objects() {
                if let Some(cp) = fincat::coproduct(&e, &[x, y]) {
                    ensure!(is_universal_coproduct(&e, &[x, y], &cp.injections), "coproduct of {x}, {y}");
                    coproducts += 1;
                }
            }
        }
    }
    let op = codomain_opfib(&p).map_err(|e| e.to_string())?;
    let t = op.data.total();
    for f in t.morphisms() {
        let parts = op.data.factor(f).map_err(|e| e.to_string())?;
        ensure!(t.compose(parts.fiber_part, parts.lifting) == f, "f != f_▷∘λ at {f}");
        let through =
            op.data.vertical_hom(t.target(parts.lifting), t.target(f)).iter().filter(|&&m| t.compose(m, parts.lifting) == f).count();
        ensure!(through == 1, "{through} fiber parts for {f}");
    }
    let llp = llp_class(&rlp_class(&p.structure.cof));
    let mut phis = 0;
    for q in [Quiver::chain(2), Quiver::fork(), Quiver::chain(3)] {
        let rc = RepCat::new(Arc::new(PointedSets), q.clone());
        for x in reedy_objects(&Arc::new(PointedSets), &q, p.concrete.objects()).map_err(|e| e.to_string())? {
            for i in 0..x.on_vertices.len() {
                let phi = rc.latching(&x, i).map_err(|e| e.to_string())?.phi.clone();
                ensure!(phi.is_injective(), "φ_{i} of {x:?} is not a cofibration");
                if let Some(id) = p.id_of(&phi) {
                    ensure!(llp.contains(id), "φ_{i} of {x:?} does not lift against the right class");
                    phis += 1;
                }
            }
        }
    }
    Ok(format!(
        "{pushouts} pushouts, {coproducts} coproducts, {} factorizations, {phis} latching maps",
        t.num_morphisms()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("backend soundness", backend_soundness),
        ("codomain opfibration total structure", codomain_total),
        ("domain opfibration total structure", domain_total),
        ("representation categories", representations),
        ("fiber isomorphism", fiber_isomorphism),
        ("pointed weak equivalences", pointed_weak_equivalences),
        ("rooted sequences", rooted_sequences),
        ("cleavage independence", cleavage_independence),
        ("oracle invariants", oracle_sweeps),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: pass ({name}; {detail}; {secs:.1}s)", n + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}; {reason}; {secs:.1}s)", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
