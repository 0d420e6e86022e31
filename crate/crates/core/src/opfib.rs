//! Grothendieck opfibrations between finite categories, given by a functor and
//! an explicit cleavage, and the Waldhausen structure they induce on the total
//! category.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::ambient::{Ambient, Graded, Model};
use crate::error::{Error, Result};
use crate::fincat::{self, FinCategory, Functor, FunctorViolation, MorId, ObjId, PushoutResult};
use crate::waldhausen::{
    verify_waldhausen_with, AxiomReport, CoMorCat, MorCat, PushoutOutcome, PushoutProvider, Square, VerifyOptions,
    WaldhausenStructure,
};

/// A chosen cocartesian lift `λ_{u,X}: X → u_!(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lift {
    pub target: ObjId,
    pub lifting: MorId,
}

/// A functor `p: T → B` with a cleavage `(u, X) ↦ (u_!(X), λ_{u,X})`.
#[derive(Clone)]
pub struct OpfibrationData {
    p: Functor,
    cleavage: HashMap<(MorId, ObjId), Lift>,
    over: Arc<Vec<Vec<ObjId>>>,
    vertical: Arc<HashMap<(ObjId, ObjId), Vec<MorId>>>,
}

impl fmt::Debug for OpfibrationData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpfibrationData")
            .field("total", &self.total())
            .field("base", &self.base())
            .field("cleavage_entries", &self.cleavage.len())
            .finish()
    }
}

impl OpfibrationData {
    /// Checks that every entry lies over its base morphism and that the
    /// cleavage covers every `(u, X)` with `p(X) = source(u)`.
    pub fn new(p: Functor, cleavage: HashMap<(MorId, ObjId), Lift>) -> Result<Self> {
        let (t, b) = (&*p.source, &*p.target);
        let mut over = vec![Vec::new(); b.num_objects()];
        for x in t.objects() {
            over[p.obj(x).index()].push(x);
        }
        let mut vertical: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        for m in t.morphisms() {
            if b.is_identity(p.mor(m)) {
                vertical.entry((t.source(m), t.target(m))).or_default().push(m);
            }
        }
        let op = OpfibrationData { p, cleavage: HashMap::new(), over: Arc::new(over), vertical: Arc::new(vertical) };
        op.with_cleavage(cleavage)
    }

    /// The same functor with another cleavage.
    pub fn with_cleavage(&self, cleavage: HashMap<(MorId, ObjId), Lift>) -> Result<Self> {
        let (t, b) = (self.total(), self.base());
        for (&(u, x), lift) in &cleavage {
            if t.source(lift.lifting) != x || t.target(lift.lifting) != lift.target {
                return Err(Error::Cleavage(format!(
                    "entry ({}, {}) has lifting {} with the wrong endpoints",
                    b.morphism_label(u),
                    t.object_label(x),
                    t.morphism_label(lift.lifting)
                )));
            }
            if self.p.mor(lift.lifting) != u {
                return Err(Error::Cleavage(format!(
                    "lifting {} does not lie over {}",
                    t.morphism_label(lift.lifting),
                    b.morphism_label(u)
                )));
            }
        }
        for u in b.morphisms() {
            for &x in &self.over[b.source(u).index()] {
                if !cleavage.contains_key(&(u, x)) {
                    return Err(Error::Cleavage(format!(
                        "no lift of {} at {}",
                        b.morphism_label(u),
                        t.object_label(x)
                    )));
                }
            }
        }
        Ok(OpfibrationData { cleavage, ..self.clone() })
    }

    pub fn functor(&self) -> &Functor {
        &self.p
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        &self.p.source
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.p.target
    }

    pub fn lift(&self, u: MorId, x: ObjId) -> Lift {
        self.cleavage[&(u, x)]
    }

    pub fn cleavage(&self) -> &HashMap<(MorId, ObjId), Lift> {
        &self.cleavage
    }

    /// Cleavage entries sorted by `(u, X)`.
    pub fn entries(&self) -> Vec<((MorId, ObjId), Lift)> {
        let mut v: Vec<_> = self.cleavage.iter().map(|(&k, &l)| (k, l)).collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }

    pub fn objects_over(&self, a: ObjId) -> &[ObjId] {
        &self.over[a.index()]
    }

    /// Morphisms `x → y` over an identity.
    pub fn vertical_hom(&self, x: ObjId, y: ObjId) -> &[MorId] {
        self.vertical.get(&(x, y)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_vertical(&self, m: MorId) -> bool {
        self.base().is_identity(self.p.mor(m))
    }

    /// Vertical isomorphisms of `y`, in id order.
    pub fn vertical_automorphisms(&self, y: ObjId) -> Vec<MorId> {
        let t = self.total();
        let hom = self.vertical_hom(y, y);
        let id = t.identity(y);
        hom.iter()
            .copied()
            .filter(|&m| hom.iter().any(|&n| t.compose(n, m) == id && t.compose(m, n) == id))
            .collect()
    }

    pub fn is_cocartesian(&self, f: MorId) -> bool {
        is_cocartesian(&self.p, f)
    }

    /// The vertical `m` with `m∘lifting = f`, if there is exactly one.
    fn through(&self, lifting: MorId, f: MorId) -> Result<MorId> {
        let t = self.total();
        let found: Vec<MorId> = self
            .vertical_hom(t.target(lifting), t.target(f))
            .iter()
            .copied()
            .filter(|&m| t.compose(m, lifting) == f)
            .collect();
        match found.as_slice() {
            [m] => Ok(*m),
            [] => Err(Error::Invariant(format!(
                "{} does not factor through {}",
                t.morphism_label(f),
                t.morphism_label(lifting)
            ))),
            _ => Err(Error::Invariant(format!(
                "{} factors through {} in {} ways",
                t.morphism_label(f),
                t.morphism_label(lifting),
                found.len()
            ))),
        }
    }

    /// `f = f_▷ ∘ λ_{p(f), source(f)}`.
    pub fn factor(&self, f: MorId) -> Result<FactoredMorphism> {
        let t = self.total();
        let u = self.p.mor(f);
        let lifting = self.lift(u, t.source(f)).lifting;
        let fiber_part = self.through(lifting, f)?;
        Ok(FactoredMorphism { morphism: f, base: u, lifting, fiber_part })
    }

    pub fn factor_all(&self) -> Result<Vec<FactoredMorphism>> {
        self.total().morphisms().map(|f| self.factor(f)).collect()
    }

    pub fn fiber(&self, a: ObjId) -> Fiber {
        let objects = self.objects_over(a).to_vec();
        let mut morphisms = Vec::new();
        for &x in &objects {
            for &y in &objects {
                morphisms.extend_from_slice(self.vertical_hom(x, y));
            }
        }
        Fiber::build(self.total().clone(), a, objects, morphisms)
    }

    /// `u_!: T_A → T_B`, with `k ↦ (λ_{u,X'}∘k)_▷`.
    pub fn reindex(&self, u: MorId) -> Result<Reindexing> {
        let b = self.base();
        let source = self.fiber(b.source(u));
        let target = self.fiber(b.target(u));
        self.reindex_between(u, &source, &target)
    }

    pub fn reindex_between(&self, u: MorId, source: &Fiber, target: &Fiber) -> Result<Reindexing> {
        let t = self.total();
        let mut object_map = Vec::with_capacity(source.objects.len());
        for &x in &source.objects {
            let y = self.lift(u, x).target;
            object_map.push(target.local_obj(y).ok_or_else(|| Error::Cleavage("lift leaves the target fiber".into()))?);
        }
        let mut morphism_map = Vec::with_capacity(source.morphisms.len());
        for &k in &source.morphisms {
            let (x, x2) = (t.source(k), t.target(k));
            let lam = self.lift(u, x).lifting;
            let lam2 = self.lift(u, x2).lifting;
            let image = self.through(lam, t.compose(lam2, k))?;
            morphism_map.push(target.local_mor(image).expect("vertical morphism lies in its fiber"));
        }
        let functor = Functor::new(source.category.clone(), target.category.clone(), object_map, morphism_map)?;
        Ok(Reindexing { base: u, functor })
    }

    /// Lifts composed with a vertical automorphism of their target, chosen
    /// per entry by a hash of the entry index and `variant`; variant 0 is
    /// this cleavage.
    pub fn perturbed(&self, variant: usize) -> Result<OpfibrationData> {
        if variant == 0 {
            return Ok(self.clone());
        }
        let t = self.total();
        let mut cleavage = HashMap::with_capacity(self.cleavage.len());
        let mut autos: HashMap<ObjId, Vec<MorId>> = HashMap::new();
        for (j, (key, lift)) in self.entries().into_iter().enumerate() {
            let choices = autos.entry(lift.target).or_insert_with(|| self.vertical_automorphisms(lift.target));
            let sigma = choices[(mix(j as u64, variant as u64) % choices.len() as u64) as usize];
            cleavage.insert(key, Lift { target: lift.target, lifting: t.compose(sigma, lift.lifting) });
        }
        self.with_cleavage(cleavage)
    }

    /// The unique vertical `σ` with `σ∘λ_{v∘u,X} = λ_{v,u_!X}∘λ_{u,X}`, which
    /// must be an isomorphism; the composite lift must also be cocartesian.
    pub fn coherence(&self, u: MorId, v: MorId, x: ObjId) -> Result<MorId> {
        let (t, b) = (self.total(), self.base());
        let first = self.lift(u, x);
        let composite = t.compose(self.lift(v, first.target).lifting, first.lifting);
        if !self.is_cocartesian(composite) {
            return Err(Error::Invariant(format!("{} is not cocartesian", t.morphism_label(composite))));
        }
        let direct = self.lift(b.compose(v, u), x).lifting;
        let sigma = self.through(direct, composite)?;
        let back = self.through(composite, direct)?;
        let ok = t.compose(back, sigma) == t.identity(t.source(sigma))
            && t.compose(sigma, back) == t.identity(t.target(sigma));
        if ok {
            Ok(sigma)
        } else {
            Err(Error::Invariant("comparison of composite lifts is not invertible".into()))
        }
    }
}

/// First failure of the cocartesian property of `f` through the object `via`:
/// `g` over `v∘p(f)` with `factorizations` lifts of `v` instead of one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocartesianFailure {
    pub morphism: MorId,
    pub via: ObjId,
    pub g: MorId,
    pub v: MorId,
    pub factorizations: usize,
}

pub fn is_cocartesian(p: &Functor, f: MorId) -> bool {
    cocartesian_failure(p, f).is_none()
}

/// For cocartesian `f`, `h ↦ (p(h), h∘f)` is a bijection from `T(Y, Z)` onto
/// pairs `(v, g)` with `v∘p(f) = p(g)`; injectivity is the cancellation
/// `g∘f = g'∘f ∧ p(g) = p(g') ⇒ g = g'`.
pub fn cocartesian_failure(p: &Functor, f: MorId) -> Option<CocartesianFailure> {
    let (t, b) = (&*p.source, &*p.target);
    let (x, y) = (t.source(f), t.target(f));
    let u = p.mor(f);
    let mut by_composite: HashMap<MorId, Vec<MorId>> = HashMap::new();
    let mut realised: HashMap<(MorId, MorId), usize> = HashMap::new();
    for z in t.objects() {
        by_composite.clear();
        for &v in b.hom(b.target(u), p.obj(z)) {
            by_composite.entry(b.compose(v, u)).or_default().push(v);
        }
        realised.clear();
        for &h in t.hom(y, z) {
            *realised.entry((p.mor(h), t.compose(h, f))).or_default() += 1;
        }
        for &g in t.hom(x, z) {
            let Some(vs) = by_composite.get(&p.mor(g)) else { continue };
            for &v in vs {
                let n = realised.get(&(v, g)).copied().unwrap_or(0);
                if n != 1 {
                    return Some(CocartesianFailure { morphism: f, via: z, g, v, factorizations: n });
                }
            }
        }
    }
    None
}

// splitmix64 finalizer
fn mix(j: u64, variant: u64) -> u64 {
    let mut z = j.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ variant.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `f = fiber_part ∘ lifting` with `lifting = λ_{base, source(f)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactoredMorphism {
    pub morphism: MorId,
    pub base: MorId,
    pub lifting: MorId,
    pub fiber_part: MorId,
}

/// The fiber over a base object, with its inclusion into the total category.
pub struct Fiber {
    pub base_object: ObjId,
    pub category: Arc<FinCategory>,
    pub objects: Vec<ObjId>,
    pub morphisms: Vec<MorId>,
    obj_index: HashMap<ObjId, ObjId>,
    mor_index: HashMap<MorId, MorId>,
}

impl fmt::Debug for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fiber").field("base_object", &self.base_object).field("category", &self.category).finish()
    }
}

impl Fiber {
    fn build(total: Arc<FinCategory>, base_object: ObjId, objects: Vec<ObjId>, morphisms: Vec<MorId>) -> Fiber {
        let obj_index: HashMap<ObjId, ObjId> = objects.iter().enumerate().map(|(i, &x)| (x, fincat::obj(i))).collect();
        let mor_index: HashMap<MorId, MorId> =
            morphisms.iter().enumerate().map(|(i, &m)| (m, fincat::mor(i))).collect();
        let labels = objects.iter().map(|&x| total.object_label(x).to_string()).collect();
        let identities = objects.iter().map(|&x| mor_index[&total.identity(x)]).collect();
        let ends: Vec<(ObjId, ObjId)> =
            morphisms.iter().map(|&m| (obj_index[&total.source(m)], obj_index[&total.target(m)])).collect();
        let category = FinCategory::from_table(labels, identities, &ends, |g, f| {
            mor_index.get(&total.compose(morphisms[g.index()], morphisms[f.index()])).copied()
        })
        .expect("a fiber is a subcategory");
        let names = morphisms.clone();
        let t = total.clone();
        let category = category.with_labeler(Arc::new(move |m| t.morphism_label(names[m.index()])));
        Fiber { base_object, category: Arc::new(category), objects, morphisms, obj_index, mor_index }
    }

    pub fn local_obj(&self, x: ObjId) -> Option<ObjId> {
        self.obj_index.get(&x).copied()
    }

    pub fn local_mor(&self, m: MorId) -> Option<MorId> {
        self.mor_index.get(&m).copied()
    }

    pub fn total_obj(&self, x: ObjId) -> ObjId {
        self.objects[x.index()]
    }

    pub fn total_mor(&self, m: MorId) -> MorId {
        self.morphisms[m.index()]
    }
}

/// The fiber of any functor: objects over `a`, morphisms over `id_a`.
pub fn fiber(p: &Functor, a: ObjId) -> Fiber {
    let (t, b) = (&p.source, &*p.target);
    let objects: Vec<ObjId> = t.objects().filter(|&x| p.obj(x) == a).collect();
    let morphisms: Vec<MorId> = t.morphisms().filter(|&m| p.obj(t.source(m)) == a && b.is_identity(p.mor(m))).collect();
    Fiber::build(t.clone(), a, objects, morphisms)
}

pub struct Reindexing {
    pub base: MorId,
    pub functor: Functor,
}

/// Fiber pushouts taken from the total category when they land in the fiber,
/// by enumeration in the fiber otherwise.
struct RestrictedPushouts {
    fiber: Arc<Fiber>,
    total: WaldhausenStructure,
}

impl PushoutProvider for RestrictedPushouts {
    fn pushout(&self, cat: &FinCategory, f: MorId, g: MorId) -> PushoutOutcome {
        let fib = &self.fiber;
        match self.total.pushout(fib.total_mor(f), fib.total_mor(g)) {
            PushoutOutcome::Found(po) => {
                let local = (fib.local_obj(po.apex), fib.local_mor(po.leg_from_b), fib.local_mor(po.leg_from_c));
                if let (Some(apex), Some(leg_from_b), Some(leg_from_c)) = local {
                    return PushoutOutcome::Found(PushoutResult { span: (f, g), apex, leg_from_b, leg_from_c });
                }
            }
            PushoutOutcome::BeyondBound => return PushoutOutcome::BeyondBound,
            PushoutOutcome::Absent => {}
        }
        match fincat::pushout(cat, f, g) {
            Some(po) => PushoutOutcome::Found(po),
            None => PushoutOutcome::Absent,
        }
    }

    fn describe(&self) -> String {
        format!("restriction of {}", self.total.pushouts.describe())
    }
}

/// A Waldhausen structure on every fiber, indexed by base object.
pub struct FiberFamily {
    pub fibers: Vec<Arc<Fiber>>,
    pub structures: Vec<WaldhausenStructure>,
}

impl FiberFamily {
    /// Fiber classes restricted from a structure on the total category; the
    /// initial object of each fiber is found by enumeration.
    pub fn derive(op: &OpfibrationData, total: &WaldhausenStructure) -> Result<FiberFamily> {
        let mut fibers = Vec::new();
        let mut structures = Vec::new();
        for a in op.base().objects() {
            let fib = Arc::new(op.fiber(a));
            let cat = fib.category.clone();
            let initial = fincat::find_initial(&cat).ok_or_else(|| {
                Error::Boundary(format!("the fiber over {} has no initial object", op.base().object_label(a)))
            })?;
            let cof = crate::classes::MorphismClass::from_predicate(cat.clone(), |m| total.is_cofibration(fib.total_mor(m)));
            let we =
                crate::classes::MorphismClass::from_predicate(cat.clone(), |m| total.is_weak_equivalence(fib.total_mor(m)));
            let provider = Arc::new(RestrictedPushouts { fiber: fib.clone(), total: total.clone() });
            structures.push(WaldhausenStructure::new(cat, cof, we, initial)?.with_pushouts(provider));
            fibers.push(fib);
        }
        Ok(FiberFamily { fibers, structures })
    }

    pub fn fiber(&self, a: ObjId) -> &Fiber {
        &self.fibers[a.index()]
    }

    pub fn structure(&self, a: ObjId) -> &WaldhausenStructure {
        &self.structures[a.index()]
    }

    fn local(&self, a: ObjId, m: MorId) -> MorId {
        self.fibers[a.index()].local_mor(m).expect("vertical morphism lies in its fiber")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReindexFailure {
    /// The cleavage does not determine the functor.
    Undefined(String),
    Functor(FunctorViolation),
    InitialNotPreserved,
    Cofibration(MorId),
    WeakEquivalence(MorId),
    /// The image of the pushout of the span `(f, g)` is not a pushout.
    Pushout { f: MorId, g: MorId },
}

#[derive(Clone, Debug)]
pub struct OpfibReport {
    pub cocartesian_checked: usize,
    pub cocartesian_failures: Vec<((MorId, ObjId), CocartesianFailure)>,
    pub fibers: Vec<(ObjId, AxiomReport)>,
    pub reindexing: Vec<(MorId, Vec<ReindexFailure>)>,
    pub pushout_squares_checked: u64,
    pub exhausted: bool,
}

impl OpfibReport {
    pub fn passed(&self) -> bool {
        self.cocartesian_failures.is_empty()
            && self.fibers.iter().all(|(_, r)| r.passed())
            && self.reindexing.iter().all(|(_, f)| f.is_empty())
    }

    pub fn failed_fibers(&self) -> impl Iterator<Item = &(ObjId, AxiomReport)> {
        self.fibers.iter().filter(|(_, r)| !r.passed())
    }

    pub fn render_text(&self, op: &OpfibrationData) -> String {
        let (t, b) = (op.total(), op.base());
        let mut out = format!(
            "cleavage: {} entries checked, {} not cocartesian\n",
            self.cocartesian_checked,
            self.cocartesian_failures.len()
        );
        for ((u, x), fail) in &self.cocartesian_failures {
            out.push_str(&format!(
                "  lift of {} at {} is not cocartesian: {} over {} factors {} times\n",
                b.morphism_label(*u),
                t.object_label(*x),
                t.morphism_label(fail.g),
                b.morphism_label(fail.v),
                fail.factorizations
            ));
        }
        for (a, r) in &self.fibers {
            out.push_str(&format!("fiber over {}: {:?}\n", b.object_label(*a), r.verdict()));
            for (axiom, _) in r.failures() {
                out.push_str(&format!("  {} fails\n", axiom.name()));
            }
        }
        let bad: Vec<_> = self.reindexing.iter().filter(|(_, f)| !f.is_empty()).collect();
        out.push_str(&format!(
            "reindexing: {} functors, {} not exact, {} pushout squares checked{}\n",
            self.reindexing.len(),
            bad.len(),
            self.pushout_squares_checked,
            if self.exhausted { " (budget exhausted)" } else { "" }
        ));
        for (u, fails) in bad {
            out.push_str(&format!("  {}: {:?}\n", b.morphism_label(*u), fails));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct OpfibCheckOptions {
    /// Budget per fiber sweep and for the pushout-square checks.
    pub budget: u64,
    /// Restrict the cocartesian sweep to lifts out of these objects.
    pub cleavage_sources: Option<HashSet<ObjId>>,
    /// Check pushout preservation and (W2) only on spans between
    /// isomorphism-class representatives; both properties are invariant
    /// under isomorphism of spans.
    pub skeletal: bool,
}

impl Default for OpfibCheckOptions {
    fn default() -> Self {
        OpfibCheckOptions { budget: u64::MAX, cleavage_sources: None, skeletal: true }
    }
}

/// Every lift is cocartesian, every fiber is a Waldhausen category and every
/// reindexing functor is exact.
pub fn check_waldhausen_opfib(op: &OpfibrationData, fibers: &FiberFamily, opts: &OpfibCheckOptions) -> OpfibReport {
    let b = op.base();
    let mut cocartesian_checked = 0;
    let mut cocartesian_failures = Vec::new();
    for ((u, x), lift) in op.entries() {
        if opts.cleavage_sources.as_ref().is_some_and(|s| !s.contains(&x)) {
            continue;
        }
        cocartesian_checked += 1;
        if let Some(fail) = cocartesian_failure(op.functor(), lift.lifting) {
            cocartesian_failures.push(((u, x), fail));
        }
    }
    let verify_opts = VerifyOptions { budget: opts.budget, skeletal_w2: opts.skeletal, ..VerifyOptions::default() };
    let fiber_reports = b.objects().map(|a| (a, verify_waldhausen_with(fibers.structure(a), &verify_opts))).collect();
    let reps: Vec<Vec<bool>> = b
        .objects()
        .map(|a| {
            let c = &*fibers.structure(a).category;
            if opts.skeletal {
                fincat::class_representatives(c, &fincat::isomorphism_mask(c))
            } else {
                vec![true; c.num_objects()]
            }
        })
        .collect();
    let mut reindexing = Vec::new();
    let mut squares = 0u64;
    let mut exhausted = false;
    for u in b.morphisms() {
        let (a, a2) = (b.source(u), b.target(u));
        let (src, dst) = (fibers.structure(a), fibers.structure(a2));
        let mut fails = Vec::new();
        let r = match op.reindex_between(u, fibers.fiber(a), fibers.fiber(a2)) {
            Ok(r) => r,
            Err(e) => {
                fails.push(ReindexFailure::Undefined(e.to_string()));
                reindexing.push((u, fails));
                continue;
            }
        };
        let f = &r.functor;
        fails.extend(f.violations().into_iter().map(ReindexFailure::Functor));
        if !fincat::is_initial(&dst.category, f.obj(src.initial)) {
            fails.push(ReindexFailure::InitialNotPreserved);
        }
        for k in src.category.morphisms() {
            if src.is_cofibration(k) && !dst.is_cofibration(f.mor(k)) {
                fails.push(ReindexFailure::Cofibration(fibers.fiber(a).total_mor(k)));
            }
            if src.is_weak_equivalence(k) && !dst.is_weak_equivalence(f.mor(k)) {
                fails.push(ReindexFailure::WeakEquivalence(fibers.fiber(a).total_mor(k)));
            }
        }
        let sc = &*src.category;
        let keep = |x: ObjId| reps[a.index()][x.index()];
        'spans: for c in src.cof.iter().filter(|&c| keep(sc.source(c)) && keep(sc.target(c))) {
            for &g in sc.outgoing(sc.source(c)).iter().filter(|&&g| keep(sc.target(g))) {
                if squares >= opts.budget {
                    exhausted = true;
                    break 'spans;
                }
                if let PushoutOutcome::Found(po) = src.pushout(c, g) {
                    squares += 1;
                    let ok = fincat::is_pushout(
                        &dst.category,
                        f.mor(c),
                        f.mor(g),
                        f.obj(po.apex),
                        f.mor(po.leg_from_b),
                        f.mor(po.leg_from_c),
                    );
                    if !ok {
                        let fib = fibers.fiber(a);
                        fails.push(ReindexFailure::Pushout { f: fib.total_mor(c), g: fib.total_mor(g) });
                    }
                }
            }
        }
        reindexing.push((u, fails));
    }
    OpfibReport {
        cocartesian_checked,
        cocartesian_failures,
        fibers: fiber_reports,
        reindexing,
        pushout_squares_checked: squares,
        exhausted,
    }
}

/// Pushouts in the total category assembled from a base pushout and a fiber
/// pushout.
struct StagedPushouts {
    op: Arc<OpfibrationData>,
    base: WaldhausenStructure,
    fibers: Arc<FiberFamily>,
    parts: Arc<Vec<FactoredMorphism>>,
}

impl StagedPushouts {
    fn build(&self, f: MorId, g: MorId) -> Result<PushoutOutcome> {
        let op = &*self.op;
        let t = op.total();
        let (pf, pg) = (self.parts[f.index()], self.parts[g.index()]);
        // base pushout of (u, v)
        let bpo = match self.base.pushout(pf.base, pg.base) {
            PushoutOutcome::Found(p) => p,
            other => return Ok(other),
        };
        let (ubar, vbar) = (bpo.leg_from_b, bpo.leg_from_c);
        // S1 = ū_! u_! X and S2 = v̄_! v_! X, both over the same base map
        let ux = t.target(pf.lifting);
        let vx = t.target(pg.lifting);
        let l1 = op.lift(ubar, ux);
        let l2 = op.lift(vbar, vx);
        let lam1 = t.compose(l1.lifting, pf.lifting);
        let lam2 = t.compose(l2.lifting, pg.lifting);
        let psi = op.through(lam1, lam2)?;
        // push the fiber parts forward
        let y = t.target(f);
        let z = t.target(g);
        let ly = op.lift(ubar, y);
        let lz = op.lift(vbar, z);
        let fpush = op.through(l1.lifting, t.compose(ly.lifting, pf.fiber_part))?;
        let gpush = op.through(l2.lifting, t.compose(lz.lifting, pg.fiber_part))?;
        let d = bpo.apex;
        let fib = &self.fibers;
        let left = fib.local(d, fpush);
        let right = fib.local(d, t.compose(gpush, psi));
        let fpo = match fib.structure(d).pushout(left, right) {
            PushoutOutcome::Found(p) => p,
            other => return Ok(other),
        };
        let fiber = fib.fiber(d);
        let a = fiber.total_mor(fpo.leg_from_b);
        let b = fiber.total_mor(fpo.leg_from_c);
        Ok(PushoutOutcome::Found(PushoutResult {
            span: (f, g),
            apex: fiber.total_obj(fpo.apex),
            leg_from_b: t.compose(a, ly.lifting),
            leg_from_c: t.compose(b, lz.lifting),
        }))
    }
}

impl PushoutProvider for StagedPushouts {
    fn pushout(&self, _cat: &FinCategory, f: MorId, g: MorId) -> PushoutOutcome {
        self.build(f, g).unwrap_or(PushoutOutcome::Absent)
    }

    fn describe(&self) -> String {
        "staged base/fiber pushouts".into()
    }
}

pub struct TotalStructure {
    pub structure: WaldhausenStructure,
    pub parts: Arc<Vec<FactoredMorphism>>,
}

/// The structure on the total category: `f` is a cofibration (weak
/// equivalence) when `p(f)` is one in the base and `f_▷` is one in its fiber.
pub fn total_structure(
    op: &Arc<OpfibrationData>,
    base: &WaldhausenStructure,
    fibers: &Arc<FiberFamily>,
) -> Result<TotalStructure> {
    let t = op.total().clone();
    let parts = Arc::new(op.factor_all()?);
    let classify = |pred_base: &dyn Fn(MorId) -> bool, pred_fiber: &dyn Fn(&WaldhausenStructure, MorId) -> bool| {
        parts
            .iter()
            .map(|fm| {
                let d = t.target(fm.fiber_part);
                let a = op.functor().obj(d);
                pred_base(fm.base) && pred_fiber(fibers.structure(a), fibers.local(a, fm.fiber_part))
            })
            .collect::<Vec<bool>>()
    };
    let cof = classify(&|u| base.is_cofibration(u), &|s, m| s.is_cofibration(m));
    let we = classify(&|u| base.is_weak_equivalence(u), &|s, m| s.is_weak_equivalence(m));
    let bottom = fibers.fiber(base.initial);
    let initial = bottom.total_obj(fibers.structure(base.initial).initial);
    if !fincat::is_initial(&t, initial) {
        return Err(Error::Invariant(format!(
            "the initial object {} of the fiber over the base initial object is not initial",
            t.object_label(initial)
        )));
    }
    let provider = Arc::new(StagedPushouts { op: op.clone(), base: base.clone(), fibers: fibers.clone(), parts: parts.clone() });
    let structure = WaldhausenStructure::new(
        t.clone(),
        crate::classes::MorphismClass::from_mask(t.clone(), cof)?,
        crate::classes::MorphismClass::from_mask(t.clone(), we)?,
        initial,
    )?
    .with_pushouts(provider);
    Ok(TotalStructure { structure, parts })
}

/// An opfibration between materialized windows of two ambients.
pub struct ModelOpfibration<T: Ambient, B: Ambient> {
    pub total: Model<T>,
    pub base: Model<B>,
    pub data: Arc<OpfibrationData>,
}

impl<T: Ambient, B: Ambient> ModelOpfibration<T, B> {
    /// Builds `p` and the cleavage from ambient-level functions; every value
    /// must land in the windows.
    pub fn from_fns(
        total: Model<T>,
        base: Model<B>,
        p_obj: impl Fn(&T::Obj) -> B::Obj,
        p_mor: impl Fn(&T::Mor) -> B::Mor,
        lift: impl Fn(&B::Mor, &T::Obj) -> T::Mor,
    ) -> Result<Self> {
        let (tc, bc) = (&total.concrete, &base.concrete);
        let outside = |what: String| Error::Boundary(format!("{what} is outside the window"));
        let object_map = tc
            .objects()
            .iter()
            .map(|x| {
                let px = p_obj(x);
                bc.obj_id(&px).ok_or_else(|| outside(base.ambient().describe_object(&px)))
            })
            .collect::<Result<Vec<_>>>()?;
        let morphism_map = tc
            .morphisms()
            .iter()
            .map(|m| {
                let pm = p_mor(m);
                bc.mor_id(&pm).ok_or_else(|| outside(base.ambient().describe_morphism(&pm)))
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Functor::new(total.category().clone(), base.category().clone(), object_map, morphism_map)?;
        let mut cleavage = HashMap::new();
        let tcat = total.category();
        for x in tcat.objects() {
            let a = p.obj(x);
            for &u in base.category().outgoing(a) {
                let l = lift(bc.morphism(u), tc.object(x));
                let lifting = tc.mor_id(&l).ok_or_else(|| outside(total.ambient().describe_morphism(&l)))?;
                cleavage.insert((u, x), Lift { target: tcat.target(lifting), lifting });
            }
        }
        let data = Arc::new(OpfibrationData::new(p, cleavage)?);
        Ok(ModelOpfibration { total, base, data })
    }

    pub fn fibers(&self) -> Result<Arc<FiberFamily>> {
        Ok(Arc::new(FiberFamily::derive(&self.data, &self.total.structure)?))
    }

    pub fn total_structure(&self) -> Result<TotalStructure> {
        total_structure(&self.data, &self.base.structure, &self.fibers()?)
    }

    /// Total morphisms whose total-structure class differs from the class
    /// the total ambient assigns directly, as `(morphism, cofibration,
    /// weak equivalence)` disagreements.
    pub fn disagreements(&self, total: &TotalStructure) -> Vec<MorId> {
        let direct = &self.total.structure;
        self.total
            .category()
            .morphisms()
            .filter(|&m| {
                direct.is_cofibration(m) != total.structure.is_cofibration(m)
                    || direct.is_weak_equivalence(m) != total.structure.is_weak_equivalence(m)
            })
            .collect()
    }
}

/// The codomain functor `Mor(E) → E`, lifting `u` at `f` to `(id, u)`.
pub fn codomain_opfib<A: Ambient>(e: &Model<A>) -> Result<ModelOpfibration<MorCat<A>, A>> {
    let total = crate::waldhausen::mor_structure(e)?;
    let amb = e.ambient().clone();
    let a1 = amb.clone();
    ModelOpfibration::from_fns(
        total,
        e.clone(),
        move |f| a1.target(f),
        |s: &Square<A::Mor>| s.cod.clone(),
        move |u, f| Square { from: f.clone(), to: amb.compose(u, f), dom: amb.identity(&amb.source(f)), cod: u.clone() },
    )
}

/// The domain functor on cofibrations `A ↣ X` with `A` in the window of `e`
/// and `rank X - rank A ≤ max_excess`, lifting `u: A → B` to the pushout
/// square onto `B ↣ B ⊔_A X`.
pub fn domain_opfib<A: Graded>(e: &Model<A>, max_excess: usize) -> Result<ModelOpfibration<CoMorCat<A>, A>> {
    let amb = e.ambient().clone();
    let mut objects = Vec::new();
    for a in e.concrete.objects() {
        let r = amb.rank(a);
        for excess in 0..=max_excess {
            for x in amb.objects_of_rank(r + excess) {
                objects.extend(amb.hom(a, &x).into_iter().filter(|f| amb.is_cofibration(f)));
            }
        }
    }
    let total = Model::new(Arc::new(CoMorCat::new(amb.clone())), objects)?;
    let a1 = amb.clone();
    ModelOpfibration::from_fns(
        total,
        e.clone(),
        move |f| a1.source(f),
        |s: &Square<A::Mor>| s.dom.clone(),
        move |u, f| {
            let po = amb.pushout(f, u).expect("pushouts along cofibrations exist in the ambient");
            Square { from: f.clone(), to: po.leg_from_c, dom: u.clone(), cod: po.leg_from_b }
        },
    )
}
