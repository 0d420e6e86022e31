use std::collections::HashSet;
use std::sync::Arc;

use crate::ambient::{Ambient, AmbientCertifier, AmbientCoproduct, Factorizing, Graded, Model};
use crate::classes;
use crate::error::{Error, Result};
use crate::fincat::{Functor, MorId, ObjId};
use crate::opfib::{check_waldhausen_opfib, total_structure, FiberFamily, ModelOpfibration, OpfibCheckOptions, OpfibReport};
use crate::quiver::{self, Quiver, Vertex};
use crate::waldhausen::{verify_waldhausen, AxiomReport, CosliceCof, SliceMor};

use super::{cartesian, Product, Rep, RepCat, RepMor, RepMorphism, Representation};

/// The inclusion `Q_μ ⊆ Q_{μ+1}` of consecutive stage subquivers, with the
/// representation categories on both.
pub struct Stage<A: Ambient> {
    pub mu: usize,
    pub lower: Arc<RepCat<A>>,
    pub upper: Arc<RepCat<A>>,
    /// Upper vertex index of each lower vertex.
    old: Vec<usize>,
    /// Upper vertex indices of `V_{μ+1} ∖ V_μ`.
    new: Vec<usize>,
    /// Upper arrow index of each lower arrow.
    old_arrows: Vec<usize>,
    /// Lower vertex index of each upper vertex, if old.
    lower_index: Vec<Option<usize>>,
}

impl<A: Ambient> Stage<A> {
    /// For `μ = ζ` the sequence is stationary and there are no new vertices.
    pub fn new(inner: Arc<A>, q: &Quiver, mu: usize) -> Result<Self> {
        let seq = quiver::rooted_sequence(q);
        if mu > seq.zeta() {
            return Err(Error::StageOutOfRange { stage: mu, zeta: seq.zeta() });
        }
        let lower_q = q.spanned(&seq.stages[mu]);
        let upper_q = q.spanned(&seq.stages[(mu + 1).min(seq.zeta())]);
        let lower_index: Vec<Option<usize>> =
            upper_q.vertices().iter().map(|v| lower_q.vertices().binary_search(v).ok()).collect();
        let old = lower_q.vertices().iter().map(|v| upper_q.vertices().binary_search(v).expect("nested")).collect();
        let new = (0..upper_q.vertices().len()).filter(|&i| lower_index[i].is_none()).collect();
        let old_arrows = lower_q
            .arrows()
            .iter()
            .map(|a| upper_q.arrows().iter().position(|b| b.id == a.id).expect("nested"))
            .collect();
        Ok(Stage {
            mu,
            lower: Arc::new(RepCat::new(inner.clone(), lower_q)),
            upper: Arc::new(RepCat::new(inner, upper_q)),
            old,
            new,
            old_arrows,
            lower_index,
        })
    }

    fn inner(&self) -> &A {
        self.upper.inner()
    }

    pub fn new_vertices(&self) -> Vec<Vertex> {
        self.new.iter().map(|&i| self.upper.quiver().vertices()[i]).collect()
    }

    /// `ι_μ^*`.
    pub fn restrict(&self, x: &Rep<A>) -> Rep<A> {
        Representation {
            on_vertices: self.old.iter().map(|&i| x.on_vertices[i].clone()).collect(),
            on_arrows: self.old_arrows.iter().map(|&k| x.on_arrows[k].clone()).collect(),
        }
    }

    pub fn restrict_mor(&self, f: &RepMor<A>) -> RepMor<A> {
        RepMorphism {
            source: Arc::new(self.restrict(&f.source)),
            target: Arc::new(self.restrict(&f.target)),
            components: self.old.iter().map(|&i| f.components[i].clone()).collect(),
        }
    }

    /// `L_i(A)` for the new vertex `self.new[n]`, from the lower values.
    fn latching_of(&self, a: &Rep<A>, n: usize) -> Result<AmbientCoproduct<A::Obj, A::Mor>> {
        let objs: Vec<A::Obj> = self
            .upper
            .incoming(self.new[n])
            .iter()
            .map(|&k| a.on_vertices[self.lower_of(self.upper.arrow_ends(k).0)].clone())
            .collect();
        self.inner().coproduct(&objs).ok_or_else(|| Error::Boundary("latching coproduct does not exist".into()))
    }

    fn lower_of(&self, upper_vertex: usize) -> usize {
        self.lower_index[upper_vertex].expect("arrows into a new vertex start at an old vertex")
    }

    /// `L_i(u)` for the new vertex `self.new[n]`.
    fn latching_map_of(&self, u: &RepMor<A>, n: usize) -> Result<A::Mor> {
        let a = self.inner();
        let from = self.latching_of(&u.source, n)?;
        let to = self.latching_of(&u.target, n)?;
        let arrows = self.upper.incoming(self.new[n]);
        if arrows.is_empty() {
            return Ok(a.identity(&from.apex));
        }
        let legs: Vec<A::Mor> = arrows
            .iter()
            .zip(&to.injections)
            .map(|(&k, inj)| a.compose(inj, &u.components[self.lower_of(self.upper.arrow_ends(k).0)]))
            .collect();
        a.copair_coproduct(&from, &legs).ok_or_else(|| Error::Boundary("induced latching map does not exist".into()))
    }

    /// `{φ_i^X}` over the new vertices.
    pub fn family(&self, x: &Rep<A>) -> Result<Vec<A::Mor>> {
        self.new.iter().map(|&i| Ok(self.upper.latching(x, i)?.phi.clone())).collect()
    }

    /// The extension of `a` with `X_i` the target of `φ_i` and
    /// `X_β = φ_{t(β)}∘ι_β` on the arrows into new vertices.
    pub fn rep_from_family(&self, a: &Rep<A>, family: &[A::Mor]) -> Result<Rep<A>> {
        let amb = self.inner();
        if family.len() != self.new.len() {
            return Err(Error::Invalid(format!("{} maps given for {} new vertices", family.len(), self.new.len())));
        }
        let n_up = self.upper.quiver().vertices().len();
        let mut on_vertices: Vec<Option<A::Obj>> = vec![None; n_up];
        for (l, &u) in self.old.iter().enumerate() {
            on_vertices[u] = Some(a.on_vertices[l].clone());
        }
        let mut on_arrows: Vec<Option<A::Mor>> = vec![None; self.upper.quiver().arrows().len()];
        for (l, &k) in self.old_arrows.iter().enumerate() {
            on_arrows[k] = Some(a.on_arrows[l].clone());
        }
        for (n, phi) in family.iter().enumerate() {
            let cp = self.latching_of(a, n)?;
            let v = self.upper.quiver().vertices()[self.new[n]];
            if amb.source(phi) != cp.apex {
                return Err(Error::Invalid(format!("the map at vertex {v} does not start at the latching object")));
            }
            if !amb.is_cofibration(phi) {
                return Err(Error::Invalid(format!("the map at vertex {v} is not a cofibration")));
            }
            on_vertices[self.new[n]] = Some(amb.target(phi));
            for (&k, inj) in self.upper.incoming(self.new[n]).iter().zip(&cp.injections) {
                on_arrows[k] = Some(amb.compose(phi, inj));
            }
        }
        let x = Representation {
            on_vertices: on_vertices.into_iter().collect::<Option<_>>().expect("every vertex assigned"),
            on_arrows: on_arrows.into_iter().collect::<Option<_>>().expect("every arrow assigned"),
        };
        self.upper.check_representation(&x)?;
        Ok(x)
    }

    /// Every extension of `a` whose new objects are drawn from
    /// `targets(L_i(A))`, in lexicographic order of the families.
    pub fn extensions(&self, a: &Rep<A>, targets: &dyn Fn(&A::Obj) -> Vec<A::Obj>) -> Result<Vec<Rep<A>>> {
        let amb = self.inner();
        let mut choices = Vec::with_capacity(self.new.len());
        for n in 0..self.new.len() {
            let l = self.latching_of(a, n)?.apex;
            let phis: Vec<A::Mor> = targets(&l)
                .iter()
                .flat_map(|x| amb.hom(&l, x))
                .filter(|m| amb.is_cofibration(m))
                .collect();
            choices.push(phis);
        }
        cartesian(&choices).iter().map(|family| self.rep_from_family(a, family)).collect()
    }

    /// The cocartesian lift of `u: A → B` at `X`: at each new vertex the
    /// pushout of `φ_i^X` along `L_i(u)`; components `u_j` on old vertices
    /// and the pushout legs `θ_i` on new ones.
    pub fn lift(&self, u: &RepMor<A>, x: &Rep<A>) -> Result<RepMor<A>> {
        let amb = self.inner();
        let mut family = Vec::with_capacity(self.new.len());
        let mut thetas = Vec::with_capacity(self.new.len());
        for (n, &i) in self.new.iter().enumerate() {
            let phi = self.upper.latching(x, i)?.phi.clone();
            let lu = self.latching_map_of(u, n)?;
            let po = amb
                .pushout(&phi, &lu)
                .ok_or_else(|| Error::Boundary("pushout of a latching map does not exist".into()))?;
            thetas.push(po.leg_from_b);
            family.push(po.leg_from_c);
        }
        let target = self.rep_from_family(&u.target, &family)?;
        let mut components: Vec<Option<A::Mor>> = vec![None; self.upper.quiver().vertices().len()];
        for (l, &up) in self.old.iter().enumerate() {
            components[up] = Some(u.components[l].clone());
        }
        for (n, theta) in thetas.into_iter().enumerate() {
            components[self.new[n]] = Some(theta);
        }
        let components = components.into_iter().collect::<Option<Vec<_>>>().expect("every vertex assigned");
        self.upper.morphism(Arc::new(x.clone()), Arc::new(target), components)
    }
}

/// Objects of `Rep(Q, coE)` with every component in `window`, built stage
/// by stage from families of latching maps.
pub fn reedy_objects<A: Ambient>(inner: &Arc<A>, q: &Quiver, window: &[A::Obj]) -> Result<Vec<Rep<A>>> {
    if !quiver::is_left_rooted(q) {
        return Err(Error::NotLeftRooted);
    }
    let zeta = quiver::rooted_sequence(q).zeta();
    let mut reps = vec![Representation { on_vertices: vec![], on_arrows: vec![] }];
    let targets = |_: &A::Obj| window.to_vec();
    for mu in 0..zeta {
        let stage = Stage::new(inner.clone(), q, mu)?;
        let mut next = Vec::new();
        for a in &reps {
            next.extend(stage.extensions(a, &targets)?);
        }
        reps = next;
    }
    Ok(reps)
}

/// New objects of rank at most `excess` above their latching object.
fn excess_targets<A: Graded>(amb: &A, excess: usize) -> impl Fn(&A::Obj) -> Vec<A::Obj> + '_ {
    move |l: &A::Obj| {
        let r = amb.rank(l);
        (r..=r + excess).flat_map(|k| amb.objects_of_rank(k)).collect()
    }
}

/// The restriction `ι_μ^*: Rep(Q_{μ+1}, coE) → Rep(Q_μ, coE)` between
/// windows: the base holds the restrictions of representations at the
/// bound, the total every extension of a base object whose new objects
/// exceed their latching objects by at most `excess` in rank. Pushouts along
/// cofibrations preserve that excess, so the window is closed under the
/// cleavage.
pub struct RestrictionOpfib<A: Graded> {
    pub stage: Arc<Stage<A>>,
    pub op: ModelOpfibration<RepCat<A>, RepCat<A>>,
    /// Total objects with every component in the window of the backend.
    pub core: Vec<ObjId>,
    pub excess: usize,
}

pub fn restriction_opfib<A: Graded>(q: &Quiver, mu: usize, e: &Model<A>, excess: usize) -> Result<RestrictionOpfib<A>> {
    let amb = e.ambient().clone();
    let window = e.concrete.objects().to_vec();
    let stage = Arc::new(Stage::new(amb.clone(), q, mu)?);
    let upper_q = stage.upper.quiver().clone();
    let core_reps = reedy_objects(&amb, &upper_q, &window)?;
    let mut seen = HashSet::new();
    let base_objects: Vec<Rep<A>> =
        core_reps.iter().map(|x| stage.restrict(x)).filter(|a| seen.insert(a.clone())).collect();
    let targets = excess_targets(&*amb, excess);
    let mut total_objects = Vec::new();
    for a in &base_objects {
        total_objects.extend(stage.extensions(a, &targets)?);
    }
    let base = Model::new(stage.lower.clone(), base_objects)?;
    let total = Model::new(stage.upper.clone(), total_objects)?;
    let core = core_reps
        .iter()
        .map(|x| total.concrete.obj_id(x).ok_or_else(|| Error::Boundary("a representation at the bound exceeds the excess".into())))
        .collect::<Result<Vec<_>>>()?;
    let (s1, s2, s3) = (stage.clone(), stage.clone(), stage.clone());
    let op = ModelOpfibration::from_fns(
        total,
        base,
        move |x| s1.restrict(x),
        move |f| s2.restrict_mor(f),
        move |u, x| s3.lift(u, x).expect("latching pushouts exist over the backend"),
    )?;
    Ok(RestrictionOpfib { stage, op, core, excess })
}

/// The functor `X ↦ {φ_i^X}`, `f ↦ {f_i}` from the fiber over a base
/// object to the product of the coslice categories of cofibrations out of
/// its latching objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberIsoReport {
    pub base_object: ObjId,
    pub new_vertices: usize,
    pub fiber_objects: usize,
    pub fiber_morphisms: usize,
    pub product_objects: usize,
    pub product_morphisms: usize,
    pub objects_bijective: bool,
    pub morphisms_bijective: bool,
    pub functorial: bool,
    pub cofibrations_match: bool,
    pub weak_equivalences_match: bool,
}

impl FiberIsoReport {
    pub fn holds(&self) -> bool {
        self.objects_bijective
            && self.morphisms_bijective
            && self.functorial
            && self.cofibrations_match
            && self.weak_equivalences_match
    }
}

pub fn fiber_iso<A: Graded>(ro: &RestrictionOpfib<A>, fibers: &FiberFamily, a: ObjId) -> Result<FiberIsoReport> {
    let stage = &ro.stage;
    let amb = stage.upper.inner().clone();
    let base_rep = ro.op.base.concrete.object(a).clone();
    let mut factors = Vec::with_capacity(stage.new.len());
    let mut choices = Vec::with_capacity(stage.new.len());
    let targets = excess_targets(&*amb, ro.excess);
    for n in 0..stage.new.len() {
        let l = stage.latching_of(&base_rep, n)?.apex;
        let objs: Vec<A::Mor> =
            targets(&l).iter().flat_map(|x| amb.hom(&l, x)).filter(|m| amb.is_cofibration(m)).collect();
        choices.push(objs);
        factors.push(CosliceCof { inner: amb.clone(), base: l });
    }
    let product = Model::new(Arc::new(Product::new(factors)), cartesian(&choices))?;
    let fiber = fibers.fiber(a);
    let structure = fibers.structure(a);
    let total = &ro.op.total.concrete;
    let pc = &product.concrete;
    let mut object_map = Vec::with_capacity(fiber.objects.len());
    for &x in &fiber.objects {
        let image = stage.family(total.object(x))?;
        object_map.push(pc.obj_id(&image));
    }
    let objects_hit: HashSet<ObjId> = object_map.iter().flatten().copied().collect();
    let objects_bijective = object_map.iter().all(Option::is_some)
        && objects_hit.len() == object_map.len()
        && objects_hit.len() == pc.objects().len();
    let mut morphism_map = Vec::with_capacity(fiber.morphisms.len());
    for &m in &fiber.morphisms {
        let f = total.morphism(m);
        let from = stage.family(&f.source)?;
        let to = stage.family(&f.target)?;
        let image: Vec<SliceMor<A::Mor>> = stage
            .new
            .iter()
            .enumerate()
            .map(|(n, &i)| SliceMor { from: from[n].clone(), to: to[n].clone(), map: f.components[i].clone() })
            .collect();
        morphism_map.push(pc.mor_id(&image));
    }
    let morphisms_hit: HashSet<MorId> = morphism_map.iter().flatten().copied().collect();
    let morphisms_bijective = morphism_map.iter().all(Option::is_some)
        && morphisms_hit.len() == morphism_map.len()
        && morphisms_hit.len() == pc.morphisms().len();
    let mut report = FiberIsoReport {
        base_object: a,
        new_vertices: stage.new.len(),
        fiber_objects: fiber.objects.len(),
        fiber_morphisms: fiber.morphisms.len(),
        product_objects: pc.objects().len(),
        product_morphisms: pc.morphisms().len(),
        objects_bijective,
        morphisms_bijective,
        functorial: false,
        cofibrations_match: false,
        weak_equivalences_match: false,
    };
    if !(objects_bijective && morphisms_bijective) {
        return Ok(report);
    }
    let object_map: Vec<ObjId> = object_map.into_iter().flatten().collect();
    let morphism_map: Vec<MorId> = morphism_map.into_iter().flatten().collect();
    let functor = Functor::new(fiber.category.clone(), product.category().clone(), object_map, morphism_map);
    report.functorial = functor.as_ref().is_ok_and(|f| f.violations().is_empty());
    if let Ok(functor) = functor {
        let local = fiber.category.morphisms();
        let ps = &product.structure;
        let pairs: Vec<(MorId, MorId)> = local.map(|m| (m, functor.mor(m))).collect();
        report.cofibrations_match = pairs.iter().all(|&(m, p)| structure.is_cofibration(m) == ps.is_cofibration(p));
        report.weak_equivalences_match =
            pairs.iter().all(|&(m, p)| structure.is_weak_equivalence(m) == ps.is_weak_equivalence(p));
    }
    Ok(report)
}

#[derive(Debug)]
pub struct StageReport {
    pub mu: usize,
    pub new_vertices: Vec<Vertex>,
    pub total_objects: usize,
    pub total_morphisms: usize,
    pub core_objects: usize,
    pub opfib: OpfibReport,
    /// Total morphisms classified differently by the staged total structure
    /// and by `ρ` directly.
    pub disagreements: Vec<MorId>,
}

impl StageReport {
    pub fn passed(&self) -> bool {
        self.opfib.passed() && self.disagreements.is_empty()
    }
}

pub struct RepWaldhausen<A: Graded> {
    pub model: Model<RepCat<A>>,
    pub report: AxiomReport,
    pub stages: Vec<StageReport>,
}

impl<A: Graded> RepWaldhausen<A> {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.stages.iter().all(StageReport::passed)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RepOptions {
    pub budget: u64,
    /// Replay the induction over the stages of the rooted sequence.
    pub replay: bool,
}

impl Default for RepOptions {
    fn default() -> Self {
        RepOptions { budget: u64::MAX, replay: true }
    }
}

/// Materializes `Rep(Q, coE)` over the window of `e`, classifies it by `ρ`,
/// verifies the axioms and, when asked, replays the stagewise induction:
/// every restriction is checked as a Waldhausen opfibration and its total
/// structure compared with the direct classification.
pub fn rep_waldhausen<A: Graded + Factorizing>(q: &Quiver, e: &Model<A>, opts: &RepOptions) -> Result<RepWaldhausen<A>> {
    if !quiver::is_left_rooted(q) {
        return Err(Error::NotLeftRooted);
    }
    let certifier = AmbientCertifier::new(e.concrete.clone());
    let cof = &e.structure.cof;
    if !classes::is_wfs_certified(cof, &classes::rlp_class(cof), Some(&certifier)).holds() {
        return Err(Error::Invalid("the cofibrations and their right class do not form a weak factorization system".into()));
    }
    let amb = e.ambient().clone();
    let objects = reedy_objects(&amb, q, e.concrete.objects())?;
    let model = Model::new(Arc::new(RepCat::new(amb.clone(), q.clone())), objects)?;
    let report = verify_waldhausen(&model.structure, opts.budget);
    let mut stages = Vec::new();
    if opts.replay {
        let excess = e.concrete.objects().iter().map(|x| amb.rank(x)).max().unwrap_or(0);
        for mu in 0..quiver::rooted_sequence(q).zeta() {
            let ro = restriction_opfib(q, mu, e, excess)?;
            let fibers = ro.op.fibers()?;
            let check = OpfibCheckOptions {
                budget: opts.budget,
                cleavage_sources: Some(ro.core.iter().copied().collect()),
                ..OpfibCheckOptions::default()
            };
            let opfib = check_waldhausen_opfib(&ro.op.data, &fibers, &check);
            let ts = total_structure(&ro.op.data, &ro.op.base.structure, &fibers)?;
            let disagreements = ro.op.disagreements(&ts);
            let cat = ro.op.total.category();
            stages.push(StageReport {
                mu,
                new_vertices: ro.stage.new_vertices(),
                total_objects: cat.num_objects(),
                total_morphisms: cat.num_morphisms(),
                core_objects: ro.core.len(),
                opfib,
                disagreements,
            });
        }
    }
    Ok(RepWaldhausen { model, report, stages })
}
