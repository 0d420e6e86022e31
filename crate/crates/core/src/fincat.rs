//! Explicit finite categories, functors between them, and colimits found by
//! exhaustive enumeration of cocones.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorId(pub u32);

impl ObjId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl MorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for MorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn obj(i: usize) -> ObjId {
    ObjId(u32::try_from(i).expect("object index exceeds u32"))
}

pub(crate) fn mor(i: usize) -> MorId {
    MorId(u32::try_from(i).expect("morphism index exceeds u32"))
}

/// `compose(g, f)` returns `g∘f`.
pub type ComposeFn = dyn Fn(MorId, MorId) -> Option<MorId> + Send + Sync;
pub type LabelFn = dyn Fn(MorId) -> String + Send + Sync;

const MISSING: u32 = u32::MAX;

enum Composition {
    /// `table[f][out_pos[g]] = g∘f`, raw (possibly out of range) ids.
    Table(Vec<Vec<u32>>),
    Lazy(Arc<ComposeFn>),
}

enum MorphismLabels {
    Plain,
    Stored(Vec<String>),
    Derived(Arc<LabelFn>),
}

pub struct FinCategory {
    object_labels: Vec<String>,
    identities: Vec<MorId>,
    sources: Vec<ObjId>,
    targets: Vec<ObjId>,
    labels: MorphismLabels,
    hom: Vec<Vec<MorId>>,
    outgoing: Vec<Vec<MorId>>,
    incoming: Vec<Vec<MorId>>,
    out_pos: Vec<u32>,
    composition: Composition,
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.num_objects())
            .field("morphisms", &self.num_morphisms())
            .finish()
    }
}

impl FinCategory {
    fn skeleton(
        object_labels: Vec<String>,
        identities: Vec<MorId>,
        morphisms: &[(ObjId, ObjId)],
    ) -> Result<Self> {
        let n = object_labels.len();
        if identities.len() != n {
            return Err(Error::Malformed(format!(
                "{} objects but {} identities",
                n,
                identities.len()
            )));
        }
        let mut sources = Vec::with_capacity(morphisms.len());
        let mut targets = Vec::with_capacity(morphisms.len());
        let mut hom = vec![Vec::new(); n * n];
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        let mut out_pos = Vec::with_capacity(morphisms.len());
        for (i, &(s, t)) in morphisms.iter().enumerate() {
            if s.index() >= n || t.index() >= n {
                return Err(Error::Malformed(format!("morphism {i} has an endpoint outside the object list")));
            }
            sources.push(s);
            targets.push(t);
            hom[s.index() * n + t.index()].push(mor(i));
            out_pos.push(outgoing[s.index()].len() as u32);
            outgoing[s.index()].push(mor(i));
            incoming[t.index()].push(mor(i));
        }
        for (o, id) in identities.iter().enumerate() {
            if id.index() >= morphisms.len() {
                return Err(Error::Malformed(format!("identity of object {o} is not a morphism")));
            }
            if sources[id.index()] != obj(o) || targets[id.index()] != obj(o) {
                return Err(Error::Malformed(format!("identity of object {o} is not an endomorphism of it")));
            }
        }
        Ok(FinCategory {
            object_labels,
            identities,
            sources,
            targets,
            labels: MorphismLabels::Plain,
            hom,
            outgoing,
            incoming,
            out_pos,
            composition: Composition::Table(Vec::new()),
        })
    }

    /// Builds a category with a stored composition table. `compose(g, f)` is
    /// queried once per composable pair; `None` leaves the entry missing.
    pub fn from_table(
        object_labels: Vec<String>,
        identities: Vec<MorId>,
        morphisms: &[(ObjId, ObjId)],
        mut compose: impl FnMut(MorId, MorId) -> Option<MorId>,
    ) -> Result<Self> {
        let mut cat = Self::skeleton(object_labels, identities, morphisms)?;
        let mut table = Vec::with_capacity(morphisms.len());
        for f in 0..morphisms.len() {
            let t = cat.targets[f];
            let row: Vec<u32> = cat.outgoing[t.index()]
                .iter()
                .map(|&g| compose(g, mor(f)).map_or(MISSING, |h| h.0))
                .collect();
            table.push(row);
        }
        cat.composition = Composition::Table(table);
        Ok(cat)
    }

    /// Builds a category whose composition is computed on demand.
    pub fn with_lazy_composition(
        object_labels: Vec<String>,
        identities: Vec<MorId>,
        morphisms: &[(ObjId, ObjId)],
        compose: Arc<ComposeFn>,
    ) -> Result<Self> {
        let mut cat = Self::skeleton(object_labels, identities, morphisms)?;
        cat.composition = Composition::Lazy(compose);
        Ok(cat)
    }

    pub fn with_morphism_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_morphisms() {
            return Err(Error::Malformed("label count differs from morphism count".into()));
        }
        self.labels = MorphismLabels::Stored(labels);
        Ok(self)
    }

    pub fn with_labeler(mut self, labeler: Arc<LabelFn>) -> Self {
        self.labels = MorphismLabels::Derived(labeler);
        self
    }

    pub fn num_objects(&self) -> usize {
        self.object_labels.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.sources.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.num_objects()).map(obj)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> + '_ {
        (0..self.num_morphisms()).map(mor)
    }

    pub fn object_label(&self, o: ObjId) -> &str {
        &self.object_labels[o.index()]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.object_labels
    }

    pub fn morphism_label(&self, m: MorId) -> String {
        match &self.labels {
            MorphismLabels::Plain => format!("m{}", m.0),
            MorphismLabels::Stored(v) => v[m.index()].clone(),
            MorphismLabels::Derived(f) => f(m),
        }
    }

    pub fn has_stored_labels(&self) -> bool {
        matches!(self.labels, MorphismLabels::Stored(_))
    }

    pub fn source(&self, m: MorId) -> ObjId {
        self.sources[m.index()]
    }

    pub fn target(&self, m: MorId) -> ObjId {
        self.targets[m.index()]
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identities[o.index()]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identities[self.source(m).index()] == m
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        &self.hom[a.index() * self.num_objects() + b.index()]
    }

    pub fn outgoing(&self, a: ObjId) -> &[MorId] {
        &self.outgoing[a.index()]
    }

    pub fn incoming(&self, b: ObjId) -> &[MorId] {
        &self.incoming[b.index()]
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.composition, Composition::Lazy(_))
    }

    fn raw_compose(&self, g: MorId, f: MorId) -> Option<u32> {
        if self.targets[f.index()] != self.sources[g.index()] {
            return None;
        }
        match &self.composition {
            Composition::Table(t) => {
                let v = t[f.index()][self.out_pos[g.index()] as usize];
                (v != MISSING).then_some(v)
            }
            Composition::Lazy(c) => c(g, f).map(|h| h.0),
        }
    }

    /// `g∘f` when defined and recorded.
    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.raw_compose(g, f)
            .filter(|&v| (v as usize) < self.num_morphisms())
            .map(MorId)
    }

    /// `g∘f`. Panics when the pair is not composable or the table has a hole;
    /// only call on validated categories.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.try_compose(g, f)
            .unwrap_or_else(|| panic!("composite {}∘{} is undefined", g.0, f.0))
    }

    pub fn compose_all(&self, chain: &[MorId]) -> MorId {
        let mut it = chain.iter().rev();
        let first = *it.next().expect("empty composition chain");
        it.fold(first, |acc, &g| self.compose(g, acc))
    }

    pub fn composable_pairs(&self) -> u64 {
        self.objects()
            .map(|o| self.incoming(o).len() as u64 * self.outgoing(o).len() as u64)
            .sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Composable pairs `(g, f)` with no recorded composite.
    pub missing: Vec<(MorId, MorId)>,
    /// Pairs whose recorded composite is not in the morphism list.
    pub out_of_range: Vec<(MorId, MorId)>,
    /// Pairs `(g, f)` whose composite has the wrong source or target.
    pub wrong_endpoints: Vec<(MorId, MorId)>,
    /// Morphisms `f` for which an identity fails to be neutral.
    pub identity_violations: Vec<MorId>,
    /// Triples `(h, g, f)` with `h∘(g∘f) != (h∘g)∘f`.
    pub associativity: Vec<(MorId, MorId, MorId)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing.is_empty()
            && self.out_of_range.is_empty()
            && self.wrong_endpoints.is_empty()
            && self.identity_violations.is_empty()
            && self.associativity.is_empty()
    }
}

pub fn validate_category(cat: &FinCategory) -> ValidationReport {
    let mut report = ValidationReport::default();
    for f in cat.morphisms() {
        for &g in cat.outgoing(cat.target(f)) {
            match cat.raw_compose(g, f) {
                None => report.missing.push((g, f)),
                Some(v) if v as usize >= cat.num_morphisms() => report.out_of_range.push((g, f)),
                Some(v) => {
                    let h = MorId(v);
                    if cat.source(h) != cat.source(f) || cat.target(h) != cat.target(g) {
                        report.wrong_endpoints.push((g, f));
                    }
                }
            }
        }
    }
    for f in cat.morphisms() {
        let left = cat.try_compose(cat.identity(cat.target(f)), f);
        let right = cat.try_compose(f, cat.identity(cat.source(f)));
        if left != Some(f) || right != Some(f) {
            report.identity_violations.push(f);
        }
    }
    if !report.missing.is_empty() || !report.out_of_range.is_empty() || !report.wrong_endpoints.is_empty() {
        return report;
    }
    for f in cat.morphisms() {
        for &g in cat.outgoing(cat.target(f)) {
            let gf = cat.compose(g, f);
            for &h in cat.outgoing(cat.target(g)) {
                let hg = cat.compose(h, g);
                if cat.compose(h, gf) != cat.compose(hg, f) {
                    report.associativity.push((h, g, f));
                }
            }
        }
    }
    report
}

pub fn is_initial(cat: &FinCategory, o: ObjId) -> bool {
    cat.objects().all(|x| cat.hom(o, x).len() == 1)
}

pub fn find_initial(cat: &FinCategory) -> Option<ObjId> {
    cat.objects().find(|&o| is_initial(cat, o))
}

pub fn is_terminal(cat: &FinCategory, o: ObjId) -> bool {
    cat.objects().all(|x| cat.hom(x, o).len() == 1)
}

/// The unique morphism out of an initial object.
pub fn initial_map(cat: &FinCategory, initial: ObjId, x: ObjId) -> MorId {
    cat.hom(initial, x)[0]
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PushoutResult {
    /// The span `(f: A → B, g: A → C)`.
    pub span: (MorId, MorId),
    pub apex: ObjId,
    pub leg_from_b: MorId,
    pub leg_from_c: MorId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coproduct {
    pub summands: Vec<ObjId>,
    pub apex: ObjId,
    pub injections: Vec<MorId>,
}

/// For every object `Q`, the number of cocones `(b, c)` under the span with
/// vertex `Q`.
pub fn cocone_counts(cat: &FinCategory, f: MorId, g: MorId) -> Vec<usize> {
    let b = cat.target(f);
    let c = cat.target(g);
    let mut by_composite: HashMap<MorId, usize> = HashMap::new();
    cat.objects()
        .map(|q| {
            by_composite.clear();
            for &bq in cat.hom(b, q) {
                *by_composite.entry(cat.compose(bq, f)).or_default() += 1;
            }
            cat.hom(c, q)
                .iter()
                .map(|&cq| by_composite.get(&cat.compose(cq, g)).copied().unwrap_or(0))
                .sum()
        })
        .collect()
}

/// True when `h ↦ (h∘legs[0], h∘legs[1], ...)` is injective on every hom-set
/// out of `apex`, checking `apex` itself first.
fn legs_jointly_monic(cat: &FinCategory, apex: ObjId, legs: &[MorId]) -> bool {
    let order = std::iter::once(apex).chain(cat.objects().filter(|&q| q != apex));
    let mut seen: HashMap<Vec<MorId>, ()> = HashMap::new();
    for q in order {
        seen.clear();
        for &h in cat.hom(apex, q) {
            let key: Vec<MorId> = legs.iter().map(|&l| cat.compose(h, l)).collect();
            if seen.insert(key, ()).is_some() {
                return false;
            }
        }
    }
    true
}

fn counts_match(cat: &FinCategory, p: ObjId, counts: &[usize]) -> bool {
    cat.objects().all(|q| cat.hom(p, q).len() == counts[q.index()])
}

/// Pushout of the span `(f, g)` by cocone enumeration; the lowest apex and then
/// the lowest pair of legs win.
pub fn pushout(cat: &FinCategory, f: MorId, g: MorId) -> Option<PushoutResult> {
    assert_eq!(cat.source(f), cat.source(g), "pushout needs a span");
    let counts = cocone_counts(cat, f, g);
    let (b, c) = (cat.target(f), cat.target(g));
    for p in cat.objects() {
        if !counts_match(cat, p, &counts) {
            continue;
        }
        for &lb in cat.hom(b, p) {
            let lbf = cat.compose(lb, f);
            for &lc in cat.hom(c, p) {
                if cat.compose(lc, g) == lbf && legs_jointly_monic(cat, p, &[lb, lc]) {
                    return Some(PushoutResult { span: (f, g), apex: p, leg_from_b: lb, leg_from_c: lc });
                }
            }
        }
    }
    None
}

/// Independent universality check for a proposed pushout square.
pub fn is_pushout(cat: &FinCategory, f: MorId, g: MorId, apex: ObjId, leg_from_b: MorId, leg_from_c: MorId) -> bool {
    if cat.source(f) != cat.source(g)
        || cat.source(leg_from_b) != cat.target(f)
        || cat.source(leg_from_c) != cat.target(g)
        || cat.target(leg_from_b) != apex
        || cat.target(leg_from_c) != apex
        || cat.compose(leg_from_b, f) != cat.compose(leg_from_c, g)
    {
        return false;
    }
    let counts = cocone_counts(cat, f, g);
    counts_match(cat, apex, &counts) && legs_jointly_monic(cat, apex, &[leg_from_b, leg_from_c])
}

pub fn is_pushout_result(cat: &FinCategory, po: &PushoutResult) -> bool {
    is_pushout(cat, po.span.0, po.span.1, po.apex, po.leg_from_b, po.leg_from_c)
}

/// Odometer step over `idx[k] < choices[k].len()`; false once exhausted.
fn advance(idx: &mut [usize], choices: &[&[MorId]]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < choices[k].len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn product_counts(cat: &FinCategory, objs: &[ObjId]) -> Vec<usize> {
    cat.objects()
        .map(|q| objs.iter().map(|&o| cat.hom(o, q).len()).product())
        .collect()
}

/// Coproduct by enumeration; the empty list gives the initial object.
pub fn coproduct(cat: &FinCategory, objs: &[ObjId]) -> Option<Coproduct> {
    if objs.is_empty() {
        return find_initial(cat).map(|apex| Coproduct { summands: vec![], apex, injections: vec![] });
    }
    let counts = product_counts(cat, objs);
    for p in cat.objects() {
        if !counts_match(cat, p, &counts) {
            continue;
        }
        let choices: Vec<&[MorId]> = objs.iter().map(|&o| cat.hom(o, p)).collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; objs.len()];
        loop {
            let legs: Vec<MorId> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            if legs_jointly_monic(cat, p, &legs) {
                return Some(Coproduct { summands: objs.to_vec(), apex: p, injections: legs });
            }
            if !advance(&mut idx, &choices) {
                break;
            }
        }
    }
    None
}

pub fn is_coproduct(cat: &FinCategory, objs: &[ObjId], apex: ObjId, injections: &[MorId]) -> bool {
    if objs.len() != injections.len() {
        return false;
    }
    if objs.is_empty() {
        return is_initial(cat, apex);
    }
    for (&o, &i) in objs.iter().zip(injections) {
        if cat.source(i) != o || cat.target(i) != apex {
            return false;
        }
    }
    counts_match(cat, apex, &product_counts(cat, objs)) && legs_jointly_monic(cat, apex, injections)
}

pub fn inverse(cat: &FinCategory, f: MorId) -> Option<MorId> {
    let (a, b) = (cat.source(f), cat.target(f));
    cat.hom(b, a).iter().copied().find(|&g| {
        cat.compose(g, f) == cat.identity(a) && cat.compose(f, g) == cat.identity(b)
    })
}

pub fn is_iso(cat: &FinCategory, f: MorId) -> bool {
    inverse(cat, f).is_some()
}

pub fn isomorphism_mask(cat: &FinCategory) -> Vec<bool> {
    cat.morphisms().map(|f| is_iso(cat, f)).collect()
}

/// True for the least object of each isomorphism class, given the mask from
/// [`isomorphism_mask`].
pub fn class_representatives(cat: &FinCategory, isos: &[bool]) -> Vec<bool> {
    let mut keep = vec![true; cat.num_objects()];
    for (i, &iso) in isos.iter().enumerate() {
        let f = mor(i);
        if iso && cat.source(f) < cat.target(f) {
            keep[cat.target(f).index()] = false;
        }
    }
    keep
}

/// All `h: from → to` with `h∘leg = want` for every constraint `(leg, want)`.
pub fn mediating_morphisms(cat: &FinCategory, from: ObjId, to: ObjId, constraints: &[(MorId, MorId)]) -> Vec<MorId> {
    cat.hom(from, to)
        .iter()
        .copied()
        .filter(|&h| constraints.iter().all(|&(leg, want)| cat.compose(h, leg) == want))
        .collect()
}

/// The unique map out of a pushout apex determined by a cocone `(b, c)`.
pub fn copair(cat: &FinCategory, po: &PushoutResult, b: MorId, c: MorId) -> Option<MorId> {
    let to = cat.target(b);
    let found = mediating_morphisms(cat, po.apex, to, &[(po.leg_from_b, b), (po.leg_from_c, c)]);
    (found.len() == 1).then(|| found[0])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorViolation {
    Endpoints(MorId),
    Identity(ObjId),
    Composite { g: MorId, f: MorId },
}

#[derive(Clone)]
pub struct Functor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub object_map: Vec<ObjId>,
    pub morphism_map: Vec<MorId>,
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Functor")
            .field("source", &self.source)
            .field("target", &self.target)
            .finish()
    }
}

impl Functor {
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        morphism_map: Vec<MorId>,
    ) -> Result<Self> {
        if object_map.len() != source.num_objects() || morphism_map.len() != source.num_morphisms() {
            return Err(Error::Malformed("functor maps do not cover the source category".into()));
        }
        if object_map.iter().any(|o| o.index() >= target.num_objects())
            || morphism_map.iter().any(|m| m.index() >= target.num_morphisms())
        {
            return Err(Error::Malformed("functor maps leave the target category".into()));
        }
        Ok(Functor { source, target, object_map, morphism_map })
    }

    pub fn identity_on(cat: Arc<FinCategory>) -> Self {
        let object_map = cat.objects().collect();
        let morphism_map = cat.morphisms().collect();
        Functor { source: cat.clone(), target: cat, object_map, morphism_map }
    }

    pub fn obj(&self, o: ObjId) -> ObjId {
        self.object_map[o.index()]
    }

    pub fn mor(&self, m: MorId) -> MorId {
        self.morphism_map[m.index()]
    }

    /// Every failure of functoriality, by full enumeration of composable pairs.
    pub fn violations(&self) -> Vec<FunctorViolation> {
        let (s, t) = (&*self.source, &*self.target);
        let mut out = Vec::new();
        for m in s.morphisms() {
            let fm = self.mor(m);
            if t.source(fm) != self.obj(s.source(m)) || t.target(fm) != self.obj(s.target(m)) {
                out.push(FunctorViolation::Endpoints(m));
            }
        }
        for o in s.objects() {
            if self.mor(s.identity(o)) != t.identity(self.obj(o)) {
                out.push(FunctorViolation::Identity(o));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for f in s.morphisms() {
            for &g in s.outgoing(s.target(f)) {
                if t.try_compose(self.mor(g), self.mor(f)) != Some(self.mor(s.compose(g, f))) {
                    out.push(FunctorViolation::Composite { g, f });
                }
            }
        }
        out
    }
}
