//! The bundled example documents under `fixtures/`, generated from the
//! library so that they stay in sync with it.

use std::sync::Arc;

use waldcheck::backends::{pset_category, FpVect, Matrix, PointedMap, PointedSets};
use waldcheck::classes::MorphismClass;
use waldcheck::opfib::codomain_opfib;
use waldcheck::quiver::Quiver;
use waldcheck::repcat::{RepMorphism, Representation};
use waldcheck::Result;

use crate::format::{self, CategoryDoc, OpfibrationDoc};

fn pmap(src: usize, tgt: usize, table: &[u8]) -> PointedMap {
    PointedMap::new(src, tgt, table.to_vec()).expect("valid pointed map")
}

fn matrix(rows: usize, cols: usize, data: &[u8]) -> Matrix {
    Matrix::new(rows, cols, data.to_vec()).expect("valid matrix")
}

/// `(file name, contents)` for every fixture.
pub fn generate() -> Result<Vec<(&'static str, String)>> {
    let mut out = Vec::new();

    let pset3 = pset_category(3);
    out.push(("pset3.cat", CategoryDoc::from_structure("pset3", Some("pset:3".into()), &pset3.structure).to_document().emit()));

    // The swap of {1, 2} is an isomorphism left out of the cofibrations.
    let pset2 = pset_category(2);
    let swap = pset2.concrete.mor_id(&pmap(2, 2, &[2, 1])).expect("in the window");
    let cat = pset2.category().clone();
    let cof = pset2.structure.cof.with(swap, false);
    let broken = pset2.structure.with_classes(cof, pset2.structure.we.clone());
    out.push(("broken-c1.cat", CategoryDoc::from_structure("broken-c1", Some("pset:2".into()), &broken).to_document().emit()));

    let mut starved = CategoryDoc::from_structure("starved", Some("pset:2".into()), &pset2.structure);
    starved.budget = Some(0);
    out.push(("starved.cat", starved.to_document().emit()));

    let inj = MorphismClass::from_predicate(cat.clone(), |m| pset2.concrete.morphism(m).is_injective());
    let surj = MorphismClass::from_predicate(cat, |m| pset2.concrete.morphism(m).is_surjective());
    out.push(("pset2-injections.cls", format::class_document("injections", &inj).emit()));
    out.push(("pset2-surjections.cls", format::class_document("surjections", &surj).emit()));

    let quivers = [
        ("single.qv", "single", Quiver::single_vertex()),
        ("chain2.qv", "chain2", Quiver::chain(2)),
        ("chain3.qv", "chain3", Quiver::chain(3)),
        ("fork.qv", "fork", Quiver::fork()),
        ("cycle3.qv", "cycle3", Quiver::new([1, 2, 3], [(1, 1, 2), (2, 2, 3), (3, 3, 1)])?),
        ("empty.qv", "empty", Quiver::default()),
    ];
    for (file, name, q) in &quivers {
        out.push((file, format::quiver_document(name, q).emit()));
    }

    let amb = PointedSets;
    let chain = Quiver::chain(2);
    let x = Arc::new(Representation { on_vertices: vec![1usize, 2], on_arrows: vec![pmap(1, 2, &[1])] });
    out.push(("chain2-x.rep", format::representation_document("x", "pset:2", &chain, &x, &amb).emit()));
    let id = RepMorphism {
        source: x.clone(),
        target: x.clone(),
        components: vec![PointedMap::identity(1), PointedMap::identity(2)],
    };
    out.push(("identity.mor", format::morphism_document("identity", "pset:2", &chain, &id, &amb).emit()));
    let twisted = RepMorphism {
        source: x.clone(),
        target: x,
        components: vec![PointedMap::identity(1), pmap(2, 2, &[2, 1])],
    };
    out.push(("non-natural.mor", format::morphism_document("non-natural", "pset:2", &chain, &twisted, &amb).emit()));

    // X = (F_2 → F_2^2 by e1), Y = (F_2^2 = F_2^2), f = (e1, id).
    let f2 = FpVect::new(2)?;
    let e1 = matrix(2, 1, &[1, 0]);
    let vx = Arc::new(Representation { on_vertices: vec![1usize, 2], on_arrows: vec![e1.clone()] });
    let vy = Arc::new(Representation { on_vertices: vec![2usize, 2], on_arrows: vec![Matrix::identity(2)] });
    let a2 = RepMorphism { source: vx, target: vy, components: vec![e1, Matrix::identity(2)] };
    out.push(("a2-vect.mor", format::morphism_document("a2-vect", "vect:2:2", &chain, &a2, &f2).emit()));

    out.push(("codomain-pset1.opf", corrupted_codomain(false)?));
    out.push(("corrupted-cleavage.opf", corrupted_codomain(true)?));
    Ok(out)
}

/// The codomain opfibration over pointed sets of size at most 1, optionally
/// with its first replaceable lift swapped for a non-cocartesian one.
fn corrupted_codomain(corrupt: bool) -> Result<String> {
    let e = pset_category(1);
    let op = codomain_opfib(&e)?;
    let mut data = (*op.data).clone();
    let name = if corrupt {
        let base = data.base().clone();
        let (key, bad) = data
            .entries()
            .into_iter()
            .filter(|((u, _), _)| !base.is_identity(*u))
            .find_map(|((u, x), _)| format::non_cocartesian_lift(&data, u, x).map(|m| ((u, x), m)))
            .expect("some lift can be replaced");
        let mut cleavage = data.cleavage().clone();
        let target = data.total().target(bad);
        cleavage.insert(key, waldcheck::opfib::Lift { target, lifting: bad });
        data = data.with_cleavage(cleavage)?;
        "corrupted-cleavage"
    } else {
        "codomain-pset1"
    };
    let mut doc = OpfibrationDoc::from_data(name, &data, &op.total.structure, &op.base.structure);
    doc.bounds = Some("pset:1".into());
    doc.builtin = Some("codomain".into());
    Ok(doc.to_document().emit())
}
