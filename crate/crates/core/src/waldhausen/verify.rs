use std::collections::HashMap;
use std::fmt::Write as _;

use super::{EnumerativePushouts, PushoutOutcome, PushoutProvider, WaldhausenStructure};
use crate::fincat::{self, FinCategory, MorId, ObjId, PushoutResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Initial,
    CofComposition,
    WeComposition,
    C1,
    C2,
    C3,
    W1,
    W2,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Initial,
        Axiom::CofComposition,
        Axiom::WeComposition,
        Axiom::C1,
        Axiom::C2,
        Axiom::C3,
        Axiom::W1,
        Axiom::W2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Initial => "initial",
            Axiom::CofComposition => "C-composition",
            Axiom::WeComposition => "W-composition",
            Axiom::C1 => "C1",
            Axiom::C2 => "C2",
            Axiom::C3 => "C3",
            Axiom::W1 => "W1",
            Axiom::W2 => "W2",
        }
    }
}

/// The gluing diagram `C ← A ↣ B` mapped by `(i, j, k)` to `C' ← A' ↣ B'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingWitness {
    pub first: PushoutResult,
    pub second: PushoutResult,
    pub j: MorId,
    pub k: MorId,
    pub i: MorId,
    /// The induced map between apexes, when one exists.
    pub induced: Option<MorId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `object` does not have exactly one map to `to`.
    NotInitial { object: ObjId, to: ObjId },
    /// `second∘first` leaves the class although both maps are in it.
    Composite { first: MorId, second: MorId },
    /// An isomorphism outside the class.
    Isomorphism(MorId),
    /// The map out of the initial object is not a cofibration.
    InitialMap(MorId),
    PushoutMissing { cofibration: MorId, along: MorId },
    /// The leg opposite the cofibration is not a cofibration.
    LegNotCofibration(PushoutResult),
    /// The provider returned a cocone that is not universal.
    NotUniversal(PushoutResult),
    Gluing(Box<GluingWitness>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomStatus {
    Verified { instances: u64, beyond_bound: u64 },
    Failed { instances: u64, witness: Witness },
    /// The enumeration budget ran out before the sweep finished.
    Inconclusive { instances: u64, beyond_bound: u64 },
}

impl AxiomStatus {
    pub fn instances(&self) -> u64 {
        match self {
            AxiomStatus::Verified { instances, .. }
            | AxiomStatus::Failed { instances, .. }
            | AxiomStatus::Inconclusive { instances, .. } => *instances,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AxiomStatus::Verified { .. } => "pass",
            AxiomStatus::Failed { .. } => "fail",
            AxiomStatus::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomEntry {
    pub axiom: Axiom,
    pub status: AxiomStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub entries: Vec<AxiomEntry>,
    pub budget: u64,
    /// Instances examined across all axioms.
    pub used: u64,
    /// (W2) ran over isomorphism-class representatives only.
    pub w2_skeletal: bool,
}

impl AxiomReport {
    pub fn verdict(&self) -> Verdict {
        if self.entries.iter().any(|e| matches!(e.status, AxiomStatus::Failed { .. })) {
            Verdict::Fail
        } else if self.entries.iter().any(|e| matches!(e.status, AxiomStatus::Inconclusive { .. })) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    pub fn status(&self, axiom: Axiom) -> &AxiomStatus {
        &self.entries.iter().find(|e| e.axiom == axiom).expect("every axiom is reported").status
    }

    pub fn failures(&self) -> impl Iterator<Item = (Axiom, &Witness)> {
        self.entries.iter().filter_map(|e| match &e.status {
            AxiomStatus::Failed { witness, .. } => Some((e.axiom, witness)),
            _ => None,
        })
    }

    pub fn render_text(&self, cat: &FinCategory) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = write!(out, "{:<14} {:<12}", e.axiom.name(), e.status.label());
            match &e.status {
                AxiomStatus::Verified { instances, beyond_bound } | AxiomStatus::Inconclusive { instances, beyond_bound } => {
                    let _ = write!(out, " instances={instances}");
                    if *beyond_bound > 0 {
                        let _ = write!(out, " beyond-bound={beyond_bound}");
                    }
                    if e.axiom == Axiom::W2 && self.w2_skeletal {
                        out.push_str(" (up to isomorphism)");
                    }
                }
                AxiomStatus::Failed { instances, witness } => {
                    let _ = write!(out, " instances={instances} witness: {}", describe_witness(cat, witness));
                }
            }
            out.push('\n');
        }
        let verdict = match self.verdict() {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        let _ = writeln!(out, "verdict: {verdict}");
        out
    }
}

pub fn describe_witness(cat: &FinCategory, w: &Witness) -> String {
    let m = |id: MorId| format!("#{} {}", id.0, cat.morphism_label(id));
    match w {
        Witness::NotInitial { object, to } => format!(
            "object {} has {} maps to object {}",
            object,
            cat.hom(*object, *to).len(),
            to
        ),
        Witness::Composite { first, second } => format!("composite of {} then {}", m(*first), m(*second)),
        Witness::Isomorphism(f) => format!("isomorphism {} is missing", m(*f)),
        Witness::InitialMap(f) => format!("initial map {} is not a cofibration", m(*f)),
        Witness::PushoutMissing { cofibration, along } => {
            format!("no pushout of cofibration {} along {}", m(*cofibration), m(*along))
        }
        Witness::LegNotCofibration(p) => format!(
            "pushout of {} along {} has leg {} outside C",
            m(p.span.0),
            m(p.span.1),
            m(p.leg_from_c)
        ),
        Witness::NotUniversal(p) => format!(
            "cocone ({}, {}) on span ({}, {}) is not universal",
            m(p.leg_from_b),
            m(p.leg_from_c),
            m(p.span.0),
            m(p.span.1)
        ),
        Witness::Gluing(g) => match g.induced {
            Some(e) => format!(
                "span ({}, {}) → ({}, {}) via j={} k={} i={} induces {} outside W",
                m(g.first.span.0),
                m(g.first.span.1),
                m(g.second.span.0),
                m(g.second.span.1),
                g.j.0,
                g.k.0,
                g.i.0,
                m(e)
            ),
            None => format!(
                "span ({}, {}) → ({}, {}) via j={} k={} i={} has no induced map",
                m(g.first.span.0),
                m(g.first.span.1),
                m(g.second.span.0),
                m(g.second.span.1),
                g.j.0,
                g.k.0,
                g.i.0
            ),
        },
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Cap on (C3) spans and on (W2) diagrams, each.
    pub budget: u64,
    /// Re-check every pushout the provider returns with the enumeration oracle.
    pub audit_pushouts: bool,
    /// Enumerate (W2) diagrams only among the least object of each
    /// isomorphism class. Any diagram is isomorphic to such a one, and the
    /// two induced maps differ by isomorphisms on either side, so this is
    /// complete once both classes contain the isomorphisms and are closed
    /// under composition. The reduction is skipped when any of those four
    /// checks fails.
    pub skeletal_w2: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: u64::MAX, audit_pushouts: false, skeletal_w2: true }
    }
}

pub fn verify_waldhausen(e: &WaldhausenStructure, budget: u64) -> AxiomReport {
    verify_waldhausen_with(e, &VerifyOptions { budget, ..VerifyOptions::default() })
}

struct Sweep<'a> {
    e: &'a WaldhausenStructure,
    opts: &'a VerifyOptions,
    memo: HashMap<(MorId, MorId), PushoutOutcome>,
}

impl Sweep<'_> {
    fn pushout(&mut self, f: MorId, g: MorId) -> PushoutOutcome {
        if let Some(p) = self.memo.get(&(f, g)) {
            return p.clone();
        }
        let p = self.e.pushout(f, g);
        self.memo.insert((f, g), p.clone());
        p
    }
}

pub fn verify_waldhausen_with(e: &WaldhausenStructure, opts: &VerifyOptions) -> AxiomReport {
    let cat = &*e.category;
    let isos = fincat::isomorphism_mask(cat);
    let mut sweep = Sweep { e, opts, memo: HashMap::new() };
    let mut entries = Vec::with_capacity(8);
    entries.push(AxiomEntry { axiom: Axiom::Initial, status: check_initial(e) });
    entries.push(AxiomEntry { axiom: Axiom::CofComposition, status: check_composition(cat, &e.cof) });
    entries.push(AxiomEntry { axiom: Axiom::WeComposition, status: check_composition(cat, &e.we) });
    entries.push(AxiomEntry { axiom: Axiom::C1, status: check_isos(&isos, &e.cof) });
    entries.push(AxiomEntry { axiom: Axiom::C2, status: check_initial_maps(e) });
    entries.push(AxiomEntry { axiom: Axiom::C3, status: check_c3(&mut sweep) });
    entries.push(AxiomEntry { axiom: Axiom::W1, status: check_isos(&isos, &e.we) });
    let closed = entries
        .iter()
        .filter(|x| matches!(x.axiom, Axiom::CofComposition | Axiom::WeComposition | Axiom::C1 | Axiom::W1))
        .all(|x| matches!(x.status, AxiomStatus::Verified { .. }));
    let reps = (opts.skeletal_w2 && closed).then(|| fincat::class_representatives(cat, &isos));
    entries.push(AxiomEntry { axiom: Axiom::W2, status: check_w2(&mut sweep, reps.as_deref()) });
    let used = entries.iter().map(|x| x.status.instances()).sum();
    AxiomReport { entries, budget: opts.budget, used, w2_skeletal: reps.is_some() }
}

fn check_initial(e: &WaldhausenStructure) -> AxiomStatus {
    let cat = &*e.category;
    let mut instances = 0;
    for x in cat.objects() {
        instances += 1;
        if cat.hom(e.initial, x).len() != 1 {
            return AxiomStatus::Failed { instances, witness: Witness::NotInitial { object: e.initial, to: x } };
        }
    }
    AxiomStatus::Verified { instances, beyond_bound: 0 }
}

fn check_composition(cat: &FinCategory, class: &crate::classes::MorphismClass) -> AxiomStatus {
    let mut instances = 0;
    for f in class.iter() {
        for &g in cat.outgoing(cat.target(f)) {
            if !class.contains(g) {
                continue;
            }
            instances += 1;
            if !class.contains(cat.compose(g, f)) {
                return AxiomStatus::Failed { instances, witness: Witness::Composite { first: f, second: g } };
            }
        }
    }
    AxiomStatus::Verified { instances, beyond_bound: 0 }
}

fn check_isos(isos: &[bool], class: &crate::classes::MorphismClass) -> AxiomStatus {
    let mut instances = 0;
    for (i, &iso) in isos.iter().enumerate() {
        if !iso {
            continue;
        }
        instances += 1;
        let f = fincat::mor(i);
        if !class.contains(f) {
            return AxiomStatus::Failed { instances, witness: Witness::Isomorphism(f) };
        }
    }
    AxiomStatus::Verified { instances, beyond_bound: 0 }
}

fn check_initial_maps(e: &WaldhausenStructure) -> AxiomStatus {
    let cat = &*e.category;
    let mut instances = 0;
    for x in cat.objects() {
        let maps = cat.hom(e.initial, x);
        if maps.len() != 1 {
            continue;
        }
        instances += 1;
        if !e.cof.contains(maps[0]) {
            return AxiomStatus::Failed { instances, witness: Witness::InitialMap(maps[0]) };
        }
    }
    AxiomStatus::Verified { instances, beyond_bound: 0 }
}

fn check_c3(sweep: &mut Sweep<'_>) -> AxiomStatus {
    let e = sweep.e;
    let cat = &*e.category;
    let (mut instances, mut beyond_bound) = (0u64, 0u64);
    for f in e.cof.iter() {
        for &g in cat.outgoing(cat.source(f)) {
            if instances >= sweep.opts.budget {
                return AxiomStatus::Inconclusive { instances, beyond_bound };
            }
            instances += 1;
            match sweep.pushout(f, g) {
                PushoutOutcome::Found(p) => {
                    if sweep.opts.audit_pushouts && !fincat::is_pushout_result(cat, &p) {
                        return AxiomStatus::Failed { instances, witness: Witness::NotUniversal(p) };
                    }
                    if !e.cof.contains(p.leg_from_c) {
                        return AxiomStatus::Failed { instances, witness: Witness::LegNotCofibration(p) };
                    }
                }
                PushoutOutcome::BeyondBound => beyond_bound += 1,
                PushoutOutcome::Absent => {
                    return AxiomStatus::Failed {
                        instances,
                        witness: Witness::PushoutMissing { cofibration: f, along: g },
                    }
                }
            }
        }
    }
    AxiomStatus::Verified { instances, beyond_bound }
}

fn check_w2(sweep: &mut Sweep<'_>, reps: Option<&[bool]>) -> AxiomStatus {
    let e = sweep.e;
    let cat = &*e.category;
    if e.we.is_everything() {
        return AxiomStatus::Verified { instances: 0, beyond_bound: 0 };
    }
    let keep = |o: ObjId| reps.map_or(true, |r| r[o.index()]);
    let w_out: Vec<Vec<MorId>> = cat
        .objects()
        .map(|o| cat.outgoing(o).iter().copied().filter(|&m| e.we.contains(m) && keep(cat.target(m))).collect())
        .collect();
    // For j: A → A', the maps out of A' grouped by their composite with j.
    let mut groups: HashMap<MorId, HashMap<MorId, Vec<MorId>>> = HashMap::new();
    let (mut instances, mut beyond_bound) = (0u64, 0u64);
    let cofs: Vec<MorId> = e.cof.iter().filter(|&f| keep(cat.source(f)) && keep(cat.target(f))).collect();
    for &f in &cofs {
        let a = cat.source(f);
        for &g in cat.outgoing(a) {
            if !keep(cat.target(g)) {
                continue;
            }
            let first = match sweep.pushout(f, g) {
                PushoutOutcome::Found(p) => p,
                _ => {
                    beyond_bound += 1;
                    continue;
                }
            };
            let (b, c) = (cat.target(f), cat.target(g));
            for &j in &w_out[a.index()] {
                let grouped: &HashMap<MorId, Vec<MorId>> = groups.entry(j).or_insert_with(|| {
                    let mut m: HashMap<MorId, Vec<MorId>> = HashMap::new();
                    for &x in cat.outgoing(cat.target(j)) {
                        m.entry(cat.compose(x, j)).or_default().push(x);
                    }
                    m
                });
                for &k in &w_out[b.index()] {
                    let fs: Vec<MorId> = match grouped.get(&cat.compose(k, f)) {
                        Some(v) => v.iter().copied().filter(|&x| e.cof.contains(x)).collect(),
                        None => continue,
                    };
                    if fs.is_empty() {
                        continue;
                    }
                    for &i in &w_out[c.index()] {
                        let gs = match grouped.get(&cat.compose(i, g)) {
                            Some(v) => v,
                            None => continue,
                        };
                        for &f2 in &fs {
                            for &g2 in gs {
                                if instances >= sweep.opts.budget {
                                    return AxiomStatus::Inconclusive { instances, beyond_bound };
                                }
                                instances += 1;
                                let second = match sweep.pushout(f2, g2) {
                                    PushoutOutcome::Found(p) => p,
                                    _ => {
                                        beyond_bound += 1;
                                        continue;
                                    }
                                };
                                let want_b = cat.compose(second.leg_from_b, k);
                                let want_c = cat.compose(second.leg_from_c, i);
                                let induced = e.pushouts.copair(cat, &first, want_b, want_c);
                                if induced.map_or(true, |h| !e.we.contains(h)) {
                                    let witness = GluingWitness { first: first.clone(), second, j, k, i, induced };
                                    return AxiomStatus::Failed { instances, witness: Witness::Gluing(Box::new(witness)) };
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    AxiomStatus::Verified { instances, beyond_bound }
}

/// Re-checks a failure witness against the structure using only the category
/// table, the classes and the enumeration oracle. True when the witness still
/// demonstrates the failure.
pub fn recheck_witness(e: &WaldhausenStructure, axiom: Axiom, w: &Witness) -> bool {
    let cat = &*e.category;
    match (axiom, w) {
        (Axiom::Initial, Witness::NotInitial { object, to }) => cat.hom(*object, *to).len() != 1,
        (Axiom::CofComposition, Witness::Composite { first, second }) => {
            e.cof.contains(*first) && e.cof.contains(*second) && !e.cof.contains(cat.compose(*second, *first))
        }
        (Axiom::WeComposition, Witness::Composite { first, second }) => {
            e.we.contains(*first) && e.we.contains(*second) && !e.we.contains(cat.compose(*second, *first))
        }
        (Axiom::C1, Witness::Isomorphism(f)) => fincat::is_iso(cat, *f) && !e.cof.contains(*f),
        (Axiom::W1, Witness::Isomorphism(f)) => fincat::is_iso(cat, *f) && !e.we.contains(*f),
        (Axiom::C2, Witness::InitialMap(f)) => cat.source(*f) == e.initial && !e.cof.contains(*f),
        (Axiom::C3, Witness::PushoutMissing { cofibration, along }) => {
            e.cof.contains(*cofibration)
                && matches!(EnumerativePushouts.pushout(cat, *cofibration, *along), PushoutOutcome::Absent)
        }
        (Axiom::C3, Witness::LegNotCofibration(p)) => {
            e.cof.contains(p.span.0) && fincat::is_pushout_result(cat, p) && !e.cof.contains(p.leg_from_c)
        }
        (Axiom::C3, Witness::NotUniversal(p)) => !fincat::is_pushout_result(cat, p),
        (Axiom::W2, Witness::Gluing(g)) => {
            let (f, gg) = g.first.span;
            let (f2, g2) = g.second.span;
            let shape = e.cof.contains(f)
                && e.cof.contains(f2)
                && [g.i, g.j, g.k].iter().all(|&x| e.we.contains(x))
                && cat.try_compose(f2, g.j) == cat.try_compose(g.k, f)
                && cat.try_compose(g2, g.j) == cat.try_compose(g.i, gg)
                && fincat::is_pushout_result(cat, &g.first)
                && fincat::is_pushout_result(cat, &g.second);
            if !shape {
                return false;
            }
            let want_b = cat.compose(g.second.leg_from_b, g.k);
            let want_c = cat.compose(g.second.leg_from_c, g.i);
            let found = fincat::mediating_morphisms(cat, g.first.apex, g.second.apex, &[(g.first.leg_from_b, want_b), (g.first.leg_from_c, want_c)]);
            match g.induced {
                Some(h) => found == vec![h] && !e.we.contains(h),
                None => found.is_empty(),
            }
        }
        _ => false,
    }
}
