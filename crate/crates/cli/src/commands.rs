use std::path::Path;
use std::sync::Arc;

use serde_json::json;
use waldcheck::ambient::{AmbientCertifier, Factorizing, Graded, Model};
use waldcheck::backends::{pset_category, vect_category, Backend, MorphismCodec};
use waldcheck::classes::{self, ClassMismatch, FactorizationCertifier, Factorization, MorphismClass, WfsVerdict};
use waldcheck::fincat;
use waldcheck::opfib::{
    check_waldhausen_opfib, codomain_opfib, domain_opfib, total_structure, FiberFamily, OpfibCheckOptions,
    OpfibrationData,
};
use waldcheck::quiver::{self, Quiver};
use waldcheck::repcat::{fiber_iso, rep_waldhausen, restriction_opfib, RepCat, RepOptions};
use waldcheck::waldhausen::{describe_witness, verify_waldhausen, AxiomReport, AxiomStatus, Verdict, WaldhausenStructure};
use waldcheck::{FinCategory, MorId, ObjId, ParseError};

use crate::format::{self, CategoryDoc, OpfibrationDoc};
use crate::{parse_error, read_document, Builtin, Cli, CliError, CliResult, Command, Output, QuiverAction};
use crate::{EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS};

pub(crate) fn execute(cli: &Cli, out: &mut Output) -> CliResult<i32> {
    let budget = cli.budget.unwrap_or(u64::MAX);
    match &cli.command {
        Command::VerifyWaldhausen { input } => verify(cli, input.as_deref(), budget, out),
        Command::CheckWfs { input, right } => check_wfs(cli, input.as_deref(), right.as_deref(), out),
        Command::Quiver { input, action } => quiver_cmd(input, *action, out),
        Command::RepClassify { quiver, morphism } => {
            let q = load_quiver(quiver)?;
            let doc = read_document(morphism)?;
            let backend = resolve_backend(cli, doc.bounds(), morphism)?;
            dispatch(backend, Classify { q, doc, path: morphism, out })
        }
        Command::RepVerify { quiver, no_replay } => {
            let q = load_quiver(quiver)?;
            let backend = resolve_backend(cli, None, quiver)?;
            dispatch(backend, RepVerify { q, opts: RepOptions { budget, replay: !no_replay }, out })
        }
        Command::Total { input, builtin, variant, excess, table } => match (input, builtin) {
            (Some(path), None) => total_from_document(path, budget, *table, out),
            (None, Some(kind)) => {
                let backend = resolve_backend(cli, None, Path::new("<builtin>"))?;
                dispatch(backend, TotalBuiltin { kind: *kind, variant: *variant, excess: *excess, table: *table, budget, out })
            }
            _ => Err(CliError::Usage("total takes either an opfibration document or --builtin".into())),
        },
        Command::FiberIso { quiver, stage, excess } => {
            let q = load_quiver(quiver)?;
            let backend = resolve_backend(cli, None, quiver)?;
            dispatch(backend, FiberIsoTask { q, mu: *stage, excess: *excess, out })
        }
    }
}

/// Work that needs a concrete backend type.
trait Task {
    type Out;
    fn run<A: MorphismCodec + Graded + Factorizing>(self, e: &Model<A>, backend: Backend) -> CliResult<Self::Out>;
}

fn dispatch<T: Task>(backend: Backend, task: T) -> CliResult<T::Out> {
    match backend {
        Backend::PSet { n_max } => task.run(&pset_category(n_max), backend),
        Backend::Vect { p, d_max } => task.run(&vect_category(p, d_max)?, backend),
    }
}

fn resolve_backend(cli: &Cli, bounds: Option<&str>, path: &Path) -> CliResult<Backend> {
    if let Some(b) = cli.backend {
        return Ok(b);
    }
    match bounds {
        Some(text) => text.parse().map_err(|e: waldcheck::Error| parse_error(path, ParseError::new(1, 1, e.to_string()))),
        None => Err(CliError::Usage("--backend is required".into())),
    }
}

fn load_quiver(path: &Path) -> CliResult<Quiver> {
    let doc = read_document(path)?;
    format::parse_quiver(&doc).map_err(|e| parse_error(path, e))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn axiom_records(report: &AxiomReport, cat: &FinCategory, scope: &str, out: &mut Output) {
    for e in &report.entries {
        let mut r = json!({
            "record": "axiom",
            "scope": scope,
            "axiom": e.axiom.name(),
            "status": e.status.label(),
            "instances": e.status.instances(),
        });
        match &e.status {
            AxiomStatus::Verified { beyond_bound, .. } | AxiomStatus::Inconclusive { beyond_bound, .. } => {
                r["beyond_bound"] = json!(beyond_bound);
            }
            AxiomStatus::Failed { witness, .. } => r["witness"] = json!(describe_witness(cat, witness)),
        }
        out.record(r);
    }
    out.record(json!({ "record": "verdict", "scope": scope, "verdict": verdict_name(report.verdict()) }));
}

struct Loaded {
    name: String,
    structure: WaldhausenStructure,
    budget_cap: Option<u64>,
    certifier: Option<Box<dyn FactorizationCertifier>>,
}

/// The window of a backend, with the classes of a document that tabulates
/// it, or the backend's own classes.
struct FromBackend<'a> {
    doc: Option<&'a CategoryDoc>,
}

impl Task for FromBackend<'_> {
    type Out = Loaded;

    fn run<A: MorphismCodec + Graded + Factorizing>(self, e: &Model<A>, backend: Backend) -> CliResult<Loaded> {
        let certifier: Option<Box<dyn FactorizationCertifier>> = Some(Box::new(AmbientCertifier::new(e.concrete.clone())));
        let Some(doc) = self.doc else {
            return Ok(Loaded { name: backend.to_string(), structure: e.structure.clone(), budget_cap: None, certifier });
        };
        let expected = CategoryDoc::from_structure(&doc.name, doc.bounds.clone(), &e.structure);
        if let Some(diff) = first_difference(&expected, doc) {
            return Err(CliError::Data(format!("the tables do not match the {backend} window: {diff}")));
        }
        let (cof, we) = doc.classes(e.category())?;
        Ok(Loaded { name: doc.name.clone(), structure: e.structure.with_classes(cof, we), budget_cap: doc.budget, certifier })
    }
}

fn first_difference(want: &CategoryDoc, got: &CategoryDoc) -> Option<String> {
    if want.objects.len() != got.objects.len() {
        return Some(format!("{} objects instead of {}", got.objects.len(), want.objects.len()));
    }
    if let Some(i) = (0..want.objects.len()).find(|&i| want.objects[i] != got.objects[i]) {
        return Some(format!("object {i} differs"));
    }
    if want.morphisms.len() != got.morphisms.len() {
        return Some(format!("{} morphisms instead of {}", got.morphisms.len(), want.morphisms.len()));
    }
    if let Some(i) = (0..want.morphisms.len()).find(|&i| want.morphisms[i] != got.morphisms[i]) {
        return Some(format!("morphism {i} differs"));
    }
    let mut listed = got.compose.clone();
    listed.sort_unstable();
    if listed != want.compose {
        let bad = want.compose.iter().zip(&listed).find(|(a, b)| a != b).map(|(a, _)| *a).or(want.compose.last().copied());
        return Some(match bad {
            Some((g, f, h)) => format!("composite {g}∘{f} should be {h}"),
            None => "COMPOSE should be empty".into(),
        });
    }
    None
}

fn load_structure(cli: &Cli, input: Option<&Path>) -> CliResult<Loaded> {
    let Some(path) = input else {
        let backend = cli.backend.ok_or_else(|| CliError::Usage("give a category document or --backend".into()))?;
        return dispatch(backend, FromBackend { doc: None });
    };
    let doc = read_document(path)?;
    let cd = CategoryDoc::from_document(&doc).map_err(|e| parse_error(path, e))?;
    if let Some(bounds) = &cd.bounds {
        let line = doc.header.iter().position(|(k, _)| k == "bounds").map_or(1, |i| i + 1);
        let backend: Backend =
            bounds.parse().map_err(|e: waldcheck::Error| parse_error(path, ParseError::new(line, 1, e.to_string())))?;
        return dispatch(backend, FromBackend { doc: Some(&cd) });
    }
    let cat = Arc::new(cd.category()?);
    let (cof, we) = cd.classes(&cat)?;
    if cat.num_objects() == 0 {
        return Err(CliError::Data("the category has no objects".into()));
    }
    // A category without an initial object still gets a report: the initial
    // axiom fails on object 0.
    let initial = fincat::find_initial(&cat).unwrap_or(ObjId(0));
    let structure = WaldhausenStructure::new(cat, cof, we, initial)?;
    Ok(Loaded { name: cd.name, structure, budget_cap: cd.budget, certifier: None })
}

fn verify(cli: &Cli, input: Option<&Path>, budget: u64, out: &mut Output) -> CliResult<i32> {
    let l = load_structure(cli, input)?;
    let budget = l.budget_cap.map_or(budget, |cap| cap.min(budget));
    let cat = l.structure.category.clone();
    let report = verify_waldhausen(&l.structure, budget);
    out.line(format!("category {}: {} objects, {} morphisms", l.name, cat.num_objects(), cat.num_morphisms()));
    out.text(&report.render_text(&cat));
    axiom_records(&report, &cat, &l.name, out);
    Ok(verdict_code(report.verdict()))
}

fn describe_mismatch(cat: &FinCategory, m: &ClassMismatch) -> String {
    match m {
        ClassMismatch::MissingLift { morphism, square } => format!(
            "#{} {} has no lift in the square l=#{} r=#{}",
            morphism.0,
            cat.morphism_label(*morphism),
            square.l.0,
            square.r.0
        ),
        ClassMismatch::Unexpected { morphism } => {
            format!("#{} {} has the lifting property but is outside the class", morphism.0, cat.morphism_label(*morphism))
        }
    }
}

fn check_wfs(cli: &Cli, input: Option<&Path>, right: Option<&Path>, out: &mut Output) -> CliResult<i32> {
    let l = load_structure(cli, input)?;
    let cat = l.structure.category.clone();
    let c = l.structure.cof.clone();
    let f = match right {
        Some(path) => {
            let doc = read_document(path)?;
            let ids = format::parse_class(&doc).map_err(|e| parse_error(path, e))?;
            MorphismClass::from_ids(cat.clone(), ids.into_iter().map(MorId))?
        }
        None => classes::rlp_class(&c),
    };
    let report = classes::is_wfs_certified(&c, &f, l.certifier.as_deref());
    let in_bound = report.factorizations.iter().filter(|(_, x)| matches!(x, Factorization::InBound { .. })).count();
    let certified = report.certified_count();
    let unresolved: Vec<MorId> = report.unresolved().collect();
    out.line(format!("category {}: {} morphisms", l.name, cat.num_morphisms()));
    out.line(format!("left class: {} morphisms, right class: {} morphisms", c.len(), f.len()));
    out.line(format!("right class equals C^□: {}", yes(report.right_mismatches.is_empty())));
    for m in report.right_mismatches.iter().take(5) {
        out.line(format!("  {}", describe_mismatch(&cat, m)));
    }
    out.line(format!("left class equals ^□F: {}", yes(report.left_mismatches.is_empty())));
    for m in report.left_mismatches.iter().take(5) {
        out.line(format!("  {}", describe_mismatch(&cat, m)));
    }
    out.line(format!(
        "factorizations: {in_bound} in bound, {certified} certified beyond the bound, {} unresolved",
        unresolved.len()
    ));
    for m in unresolved.iter().take(5) {
        out.line(format!("  #{} {}", m.0, cat.morphism_label(*m)));
    }
    let (verdict, code) = match report.verdict {
        WfsVerdict::Holds => ("holds", EXIT_PASS),
        WfsVerdict::Fails => ("fails", EXIT_FAIL),
        WfsVerdict::InconclusiveAtBound => ("inconclusive", EXIT_INCONCLUSIVE),
    };
    out.line(format!("verdict: {verdict}"));
    out.record(json!({
        "record": "wfs",
        "category": l.name,
        "left": c.len(),
        "right": f.len(),
        "right_mismatches": report.right_mismatches.len(),
        "left_mismatches": report.left_mismatches.len(),
        "factorizations_in_bound": in_bound,
        "factorizations_certified": certified,
        "unresolved": unresolved.iter().map(|m| m.0).collect::<Vec<_>>(),
        "verdict": verdict,
    }));
    Ok(code)
}

fn vertex_set(vs: &std::collections::BTreeSet<u32>) -> String {
    let parts: Vec<String> = vs.iter().map(u32::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn quiver_cmd(path: &Path, action: QuiverAction, out: &mut Output) -> CliResult<i32> {
    let doc = read_document(path)?;
    let q = format::parse_quiver(&doc).map_err(|e| parse_error(path, e))?;
    match action {
        QuiverAction::RootedSeq => {
            let seq = quiver::rooted_sequence(&q);
            for (mu, stage) in seq.stages.iter().enumerate().skip(1) {
                out.line(format!("V_{mu} = {}", vertex_set(stage)));
                out.record(json!({ "record": "stage", "mu": mu, "vertices": stage }));
            }
            out.line(format!("zeta = {}", seq.zeta()));
            out.record(json!({ "record": "rooted_sequence", "zeta": seq.zeta(), "left_rooted": quiver::is_left_rooted(&q) }));
        }
        QuiverAction::IsLeftRooted => {
            let b = quiver::is_left_rooted(&q);
            out.line(b.to_string());
            out.record(json!({ "record": "left_rooted", "quiver": doc.name(), "value": b }));
        }
        QuiverAction::Subquiver { mu } => {
            let sub = quiver::subquiver(&q, mu)?;
            let name = format!("{}-{mu}", doc.name());
            out.text(&format::quiver_document(&name, &sub).emit());
            out.record(json!({
                "record": "subquiver",
                "mu": mu,
                "vertices": sub.vertices(),
                "arrows": sub.arrows().iter().map(|a| [a.id, a.source, a.target]).collect::<Vec<_>>(),
            }));
        }
    }
    Ok(EXIT_PASS)
}

struct Classify<'a> {
    q: Quiver,
    doc: crate::Document,
    path: &'a Path,
    out: &'a mut Output,
}

impl Task for Classify<'_> {
    type Out = i32;

    fn run<A: MorphismCodec + Graded + Factorizing>(self, e: &Model<A>, backend: Backend) -> CliResult<i32> {
        let amb = e.ambient().clone();
        let parts = format::parse_morphism(&self.doc, &self.q, &*amb).map_err(|err| parse_error(self.path, err))?;
        for x in parts.source.on_vertices.iter().chain(&parts.target.on_vertices) {
            if e.concrete.obj_id(x).is_none() {
                return Err(CliError::Data(format!("object {} is outside the {backend} window", amb.describe_object(x))));
            }
        }
        let cat = RepCat::new(amb.clone(), self.q.clone());
        let f = parts.build(&cat)?;
        let out = self.out;
        for (i, v) in self.q.vertices().iter().enumerate() {
            let rho = cat.rho(&f, i)?;
            let (c, w) = (amb.is_cofibration(&rho.rho), amb.is_weak_equivalence(&rho.rho));
            out.line(format!(
                "vertex {v}: rho = {} cofibration: {} weak equivalence: {}",
                amb.describe_morphism(&rho.rho),
                yes(c),
                yes(w)
            ));
            out.record(json!({
                "record": "rho",
                "vertex": v,
                "rho": amb.encode(&rho.rho),
                "cofibration": c,
                "weak_equivalence": w,
            }));
        }
        let k = cat.classify(&f)?;
        let componentwise = f.components.iter().all(|m| amb.is_weak_equivalence(m));
        out.line(format!("cofibration: {}", yes(k.cofibration)));
        out.line(format!("weak equivalence: {}", yes(k.weak_equivalence)));
        out.line(format!("components invertible: {}", yes(componentwise)));
        out.record(json!({
            "record": "classification",
            "name": self.doc.name(),
            "cofibration": k.cofibration,
            "weak_equivalence": k.weak_equivalence,
            "components_invertible": componentwise,
        }));
        Ok(EXIT_PASS)
    }
}

struct RepVerify<'a> {
    q: Quiver,
    opts: RepOptions,
    out: &'a mut Output,
}

impl Task for RepVerify<'_> {
    type Out = i32;

    fn run<A: MorphismCodec + Graded + Factorizing>(self, e: &Model<A>, backend: Backend) -> CliResult<i32> {
        let rw = rep_waldhausen(&self.q, e, &self.opts)?;
        let cat = rw.model.category().clone();
        let out = self.out;
        out.line(format!(
            "Rep(Q, coE) over {backend}: {} objects, {} morphisms",
            cat.num_objects(),
            cat.num_morphisms()
        ));
        out.text(&rw.report.render_text(&cat));
        axiom_records(&rw.report, &cat, "rep", out);
        for s in &rw.stages {
            out.line(format!(
                "stage {}: new vertices {:?}, total {} objects / {} morphisms ({} at the bound), opfibration {}, disagreements {}",
                s.mu,
                s.new_vertices,
                s.total_objects,
                s.total_morphisms,
                s.core_objects,
                if s.opfib.passed() { "pass" } else { "fail" },
                s.disagreements.len()
            ));
            out.record(json!({
                "record": "stage",
                "mu": s.mu,
                "new_vertices": s.new_vertices,
                "total_objects": s.total_objects,
                "total_morphisms": s.total_morphisms,
                "core_objects": s.core_objects,
                "opfibration": s.opfib.passed(),
                "disagreements": s.disagreements.len(),
            }));
        }
        let stages_ok = rw.stages.iter().all(|s| s.passed());
        let code = if !stages_ok { EXIT_FAIL } else { verdict_code(rw.report.verdict()) };
        out.line(format!("result: {}", if code == EXIT_PASS { "pass" } else if code == EXIT_FAIL { "fail" } else { "inconclusive" }));
        Ok(code)
    }
}

struct Analysis {
    opfibration_ok: bool,
    /// Morphisms whose total-structure class differs from the reference.
    disagreements: Vec<MorId>,
    report: Option<AxiomReport>,
}

impl Analysis {
    fn code(&self) -> i32 {
        match &self.report {
            _ if !self.opfibration_ok || !self.disagreements.is_empty() => EXIT_FAIL,
            Some(r) => verdict_code(r.verdict()),
            None => EXIT_FAIL,
        }
    }
}

/// Checks the opfibration, computes the total structure and compares it with
/// `reference`, a structure on the same total category.
fn analyse(
    op: &Arc<OpfibrationData>,
    reference: &WaldhausenStructure,
    base: &WaldhausenStructure,
    budget: u64,
    table: bool,
    out: &mut Output,
) -> CliResult<Analysis> {
    let t = op.total().clone();
    let fibers = Arc::new(FiberFamily::derive(op, reference)?);
    let check = check_waldhausen_opfib(op, &fibers, &OpfibCheckOptions { budget, ..OpfibCheckOptions::default() });
    out.text(&check.render_text(op));
    for ((u, x), fail) in &check.cocartesian_failures {
        out.record(json!({
            "record": "cocartesian_failure",
            "base_morphism": u.0,
            "object": x.0,
            "lifting": op.lift(*u, *x).lifting.0,
            "through": fail.g.0,
            "factorizations": fail.factorizations,
        }));
    }
    out.record(json!({
        "record": "opfibration",
        "cleavage_entries": check.cocartesian_checked,
        "not_cocartesian": check.cocartesian_failures.len(),
        "fibers_failed": check.failed_fibers().count(),
        "reindexing_failed": check.reindexing.iter().filter(|(_, f)| !f.is_empty()).count(),
        "passed": check.passed(),
    }));
    if !check.cocartesian_failures.is_empty() {
        out.line("total structure: not computed, the cleavage is not cocartesian");
        return Ok(Analysis { opfibration_ok: false, disagreements: Vec::new(), report: None });
    }
    let ts = total_structure(op, base, &fibers)?;
    let disagreements: Vec<MorId> = t
        .morphisms()
        .filter(|&m| {
            ts.structure.is_cofibration(m) != reference.is_cofibration(m)
                || ts.structure.is_weak_equivalence(m) != reference.is_weak_equivalence(m)
        })
        .collect();
    let (cof, we) = (ts.structure.cof.len(), ts.structure.we.len());
    out.line(format!("total classification: {} morphisms, {cof} cofibrations, {we} weak equivalences", t.num_morphisms()));
    for m in t.morphisms() {
        let (c, w) = (ts.structure.is_cofibration(m), ts.structure.is_weak_equivalence(m));
        if table {
            out.line(format!("  #{} {} C:{} W:{}", m.0, t.morphism_label(m), yes(c), yes(w)));
        }
        out.record(json!({ "record": "class", "morphism": m.0, "label": t.morphism_label(m), "cofibration": c, "weak_equivalence": w }));
    }
    for m in disagreements.iter().take(5) {
        out.line(format!("  differs at #{} {}", m.0, t.morphism_label(*m)));
    }
    let report = verify_waldhausen(&ts.structure, budget);
    out.line("total structure axioms:");
    out.text(&report.render_text(&t));
    axiom_records(&report, &t, "total", out);
    Ok(Analysis { opfibration_ok: check.passed(), disagreements, report: Some(report) })
}

fn total_from_document(path: &Path, budget: u64, table: bool, out: &mut Output) -> CliResult<i32> {
    let doc = read_document(path)?;
    let od = OpfibrationDoc::from_document(&doc).map_err(|e| parse_error(path, e))?;
    let (total, base, op) = match (&od.bounds, &od.builtin) {
        (None, None) => od.build()?,
        (Some(bounds), Some(builtin)) => {
            let backend: Backend =
                bounds.parse().map_err(|e: waldcheck::Error| parse_error(path, ParseError::new(1, 1, e.to_string())))?;
            let kind = match builtin.as_str() {
                "codomain" => Builtin::Codomain,
                "domain" => Builtin::Domain,
                other => return Err(parse_error(path, ParseError::new(1, 1, format!("unknown builtin '{other}'")))),
            };
            dispatch(backend, OverBackend { od: &od, kind })?
        }
        _ => return Err(parse_error(path, ParseError::new(1, 1, "'bounds' and 'builtin' go together"))),
    };
    let op = Arc::new(op);
    out.line(format!(
        "opfibration {}: total {} objects / {} morphisms over base {} objects / {} morphisms",
        od.name,
        total.category.num_objects(),
        total.category.num_morphisms(),
        base.category.num_objects(),
        base.category.num_morphisms()
    ));
    let a = analyse(&op, &total, &base, budget, table, out)?;
    if a.report.is_some() {
        let same = a.disagreements.is_empty();
        out.line(format!("identical with the document classes: {}", yes(same)));
        out.record(json!({ "record": "comparison", "reference": "document", "identical": same }));
    }
    Ok(a.code())
}

/// The builtin opfibration over a backend with the classes and cleavage of
/// a document that tabulates it.
struct OverBackend<'a> {
    od: &'a OpfibrationDoc,
    kind: Builtin,
}

fn builtin_opfib<A: Graded>(
    e: &Model<A>,
    kind: Builtin,
    excess: Option<usize>,
) -> CliResult<(Arc<OpfibrationData>, WaldhausenStructure, WaldhausenStructure)> {
    Ok(match kind {
        Builtin::Codomain => {
            let op = codomain_opfib(e)?;
            (op.data.clone(), op.total.structure.clone(), op.base.structure.clone())
        }
        Builtin::Domain => {
            let amb = e.ambient();
            let bound = e.concrete.objects().iter().map(|x| amb.rank(x)).max().unwrap_or(0);
            let op = domain_opfib(e, excess.unwrap_or(bound))?;
            (op.data.clone(), op.total.structure.clone(), op.base.structure.clone())
        }
    })
}

impl Task for OverBackend<'_> {
    type Out = (WaldhausenStructure, WaldhausenStructure, OpfibrationData);

    fn run<A: MorphismCodec + Graded + Factorizing>(self, e: &Model<A>, backend: Backend) -> CliResult<Self::Out> {
        let (data, total, base) = builtin_opfib(e, self.kind, None)?;
        let od = self.od;
        let want = OpfibrationDoc::from_data(&od.name, &data, &total, &base);
        let mismatch = |what: &str, diff: String| CliError::Data(format!("the {what} tables do not match the builtin over {backend}: {diff}"));
        if let Some(diff) = first_difference(&want.total, &od.total) {
            return Err(mismatch("total", diff));
        }
        if let Some(diff) = first_difference(&want.base, &od.base) {
            return Err(mismatch("base", diff));
        }
        if want.p_objects != od.p_objects || want.p_morphisms != od.p_morphisms {
            return Err(mismatch("functor", "P_OBJECTS or P_MORPHISMS differ".into()));
        }
        let (tc, tw) = od.total.classes(&total.category)?;
        let (bc, bw) = od.base.classes(&base.category)?;
        let data = data.with_cleavage(od.cleavage_map(&total.category, &base.category)?)?;
        Ok((total.with_classes(tc, tw), base.with_classes(bc, bw), data))
    }
}

struct TotalBuiltin<'a> {
    kind: Builtin,
    variant: usize,
    excess: Option<usize>,
    table: bool,
    budget: u64,
    out: &'a mut Output,
}

impl Task for TotalBuiltin<'_> {
    type Out = i32;

    fn run<A: MorphismCodec + Graded + Factorizing>(self, e: &Model<A>, backend: Backend) -> CliResult<i32> {
        let (data, reference, base) = builtin_opfib(e, self.kind, self.excess)?;
        let reference_name = match self.kind {
            Builtin::Codomain => "mor_structure",
            Builtin::Domain => "comor_structure",
        };
        let data = if self.variant == 0 { data } else { Arc::new(data.perturbed(self.variant)?) };
        let out = self.out;
        let kind = match self.kind {
            Builtin::Codomain => "codomain",
            Builtin::Domain => "domain",
        };
        out.line(format!(
            "{kind} opfibration over {backend}: total {} objects / {} morphisms, cleavage variant {}",
            data.total().num_objects(),
            data.total().num_morphisms(),
            self.variant
        ));
        let a = analyse(&data, &reference, &base, self.budget, self.table, out)?;
        if a.report.is_some() {
            let same = a.disagreements.is_empty();
            out.line(format!("identical: {}", yes(same)));
            out.record(json!({ "record": "comparison", "reference": reference_name, "identical": same }));
        }
        Ok(a.code())
    }
}

struct FiberIsoTask<'a> {
    q: Quiver,
    mu: usize,
    excess: Option<usize>,
    out: &'a mut Output,
}

impl Task for FiberIsoTask<'_> {
    type Out = i32;

    fn run<A: MorphismCodec + Graded + Factorizing>(self, e: &Model<A>, backend: Backend) -> CliResult<i32> {
        if !quiver::is_left_rooted(&self.q) {
            return Err(waldcheck::Error::NotLeftRooted.into());
        }
        let amb = e.ambient();
        let bound = e.concrete.objects().iter().map(|x| amb.rank(x)).max().unwrap_or(0);
        let ro = restriction_opfib(&self.q, self.mu, e, self.excess.unwrap_or(bound))?;
        let fibers = ro.op.fibers()?;
        let base = ro.op.base.category().clone();
        let out = self.out;
        out.line(format!(
            "stage {} over {backend}: new vertices {:?}, {} base objects, excess {}",
            self.mu,
            ro.stage.new_vertices(),
            base.num_objects(),
            ro.excess
        ));
        let mut all = true;
        for a in base.objects() {
            let r = fiber_iso(&ro, &fibers, a)?;
            all &= r.holds();
            out.line(format!(
                "base {}: fiber {} objects / {} morphisms, product {} objects / {} morphisms, bijective {}, structure preserved {}",
                base.object_label(a),
                r.fiber_objects,
                r.fiber_morphisms,
                r.product_objects,
                r.product_morphisms,
                yes(r.objects_bijective && r.morphisms_bijective && r.functorial),
                yes(r.cofibrations_match && r.weak_equivalences_match)
            ));
            out.record(json!({
                "record": "fiber_iso",
                "base_object": base.object_label(a),
                "fiber_objects": r.fiber_objects,
                "fiber_morphisms": r.fiber_morphisms,
                "product_objects": r.product_objects,
                "product_morphisms": r.product_morphisms,
                "objects_bijective": r.objects_bijective,
                "morphisms_bijective": r.morphisms_bijective,
                "functorial": r.functorial,
                "cofibrations_match": r.cofibrations_match,
                "weak_equivalences_match": r.weak_equivalences_match,
            }));
        }
        out.line(format!("isomorphism: {}", yes(all)));
        Ok(if all { EXIT_PASS } else { EXIT_FAIL })
    }
}
