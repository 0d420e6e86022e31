//! Categories given by data and algorithms rather than tables, and their
//! materialization as finite categories over a chosen set of objects.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use crate::classes::{FactorizationCertifier, MorphismClass};
use crate::error::{Error, Result};
use crate::fincat::{self, FinCategory, MorId, ObjId, PushoutResult};
use crate::waldhausen::{PushoutOutcome, PushoutProvider, WaldhausenStructure};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmbientPushout<O, M> {
    pub apex: O,
    pub leg_from_b: M,
    pub leg_from_c: M,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmbientCoproduct<O, M> {
    pub apex: O,
    pub injections: Vec<M>,
}

pub trait Ambient: Send + Sync + 'static {
    type Obj: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static;
    type Mor: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static;

    fn name(&self) -> String;
    fn source(&self, f: &Self::Mor) -> Self::Obj;
    fn target(&self, f: &Self::Mor) -> Self::Obj;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    /// `g∘f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor;
    /// Every morphism `a → b`, in a fixed order.
    fn hom(&self, a: &Self::Obj, b: &Self::Obj) -> Vec<Self::Mor>;

    /// Membership test for data that merely has the right type.
    fn is_object(&self, _x: &Self::Obj) -> bool {
        true
    }

    fn initial(&self) -> Self::Obj;

    fn initial_map(&self, x: &Self::Obj) -> Self::Mor {
        self.hom(&self.initial(), x).into_iter().next().expect("initial object has a map to every object")
    }

    fn coproduct(&self, objs: &[Self::Obj]) -> Option<AmbientCoproduct<Self::Obj, Self::Mor>>;

    /// Pushout of `(f: A → B, g: A → C)`; `None` when the recipe does not
    /// apply to the span.
    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Option<AmbientPushout<Self::Obj, Self::Mor>>;

    /// The map out of a pushout apex induced by a cocone `(b, c)`.
    fn copair(&self, po: &AmbientPushout<Self::Obj, Self::Mor>, b: &Self::Mor, c: &Self::Mor) -> Option<Self::Mor> {
        let to = self.target(b);
        self.hom(&po.apex, &to)
            .into_iter()
            .find(|h| self.compose(h, &po.leg_from_b) == *b && self.compose(h, &po.leg_from_c) == *c)
    }

    fn copair_coproduct(&self, cp: &AmbientCoproduct<Self::Obj, Self::Mor>, legs: &[Self::Mor]) -> Option<Self::Mor> {
        let to = match legs.first() {
            Some(l) => self.target(l),
            None => return None,
        };
        self.hom(&cp.apex, &to)
            .into_iter()
            .find(|h| cp.injections.iter().zip(legs).all(|(i, l)| self.compose(h, i) == *l))
    }

    fn is_cofibration(&self, f: &Self::Mor) -> bool;
    fn is_weak_equivalence(&self, f: &Self::Mor) -> bool;

    fn describe_object(&self, x: &Self::Obj) -> String {
        format!("{x:?}")
    }

    fn describe_morphism(&self, f: &Self::Mor) -> String {
        format!("{f:?}")
    }
}

/// Ambients whose objects are skeletal and sized.
pub trait Graded: Ambient {
    fn rank(&self, x: &Self::Obj) -> usize;
    fn objects_of_rank(&self, r: usize) -> Vec<Self::Obj>;

    fn objects_up_to(&self, bound: usize) -> Vec<Self::Obj> {
        (0..=bound).flat_map(|r| self.objects_of_rank(r)).collect()
    }
}

/// Ambients with an explicit (cofibration, right class) factorization.
pub trait Factorizing: Ambient {
    fn in_right_class(&self, f: &Self::Mor) -> bool;
    /// `(c, r)` with `r∘c = f`.
    fn factor(&self, f: &Self::Mor) -> (Self::Mor, Self::Mor);
}

/// Composition tables are stored when there are at most this many composable
/// pairs; larger categories compose through the ambient on demand.
pub const TABLE_LIMIT: u64 = 8_000_000;

struct Data<A: Ambient> {
    ambient: Arc<A>,
    objects: Vec<A::Obj>,
    morphisms: Vec<A::Mor>,
    obj_index: HashMap<A::Obj, ObjId>,
    mor_index: HashMap<A::Mor, MorId>,
}

impl<A: Ambient> Data<A> {
    fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        let h = self.ambient.compose(&self.morphisms[g.index()], &self.morphisms[f.index()]);
        self.mor_index.get(&h).copied()
    }
}

/// A full subcategory of an ambient on finitely many objects.
pub struct Concrete<A: Ambient> {
    data: Arc<Data<A>>,
    category: Arc<FinCategory>,
}

impl<A: Ambient> Concrete<A> {
    pub fn materialize(ambient: Arc<A>, objects: Vec<A::Obj>) -> Result<Self> {
        Self::materialize_with(ambient, objects, TABLE_LIMIT)
    }

    pub fn materialize_with(ambient: Arc<A>, objects: Vec<A::Obj>, table_limit: u64) -> Result<Self> {
        let mut obj_index = HashMap::with_capacity(objects.len());
        for (i, x) in objects.iter().enumerate() {
            if !ambient.is_object(x) {
                return Err(Error::NotAnObject(format!("{} in {}", ambient.describe_object(x), ambient.name())));
            }
            if obj_index.insert(x.clone(), fincat::obj(i)).is_some() {
                return Err(Error::Malformed(format!("object {} listed twice", ambient.describe_object(x))));
            }
        }
        let mut morphisms = Vec::new();
        let mut ends = Vec::new();
        let mut mor_index = HashMap::new();
        for (i, a) in objects.iter().enumerate() {
            for (j, b) in objects.iter().enumerate() {
                for m in ambient.hom(a, b) {
                    let id = fincat::mor(morphisms.len());
                    if mor_index.insert(m.clone(), id).is_some() {
                        return Err(Error::Malformed(format!("hom enumeration repeats {}", ambient.describe_morphism(&m))));
                    }
                    morphisms.push(m);
                    ends.push((fincat::obj(i), fincat::obj(j)));
                }
            }
        }
        let identities = objects
            .iter()
            .map(|x| {
                mor_index
                    .get(&ambient.identity(x))
                    .copied()
                    .ok_or_else(|| Error::Malformed(format!("identity of {} not enumerated", ambient.describe_object(x))))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<String> = objects.iter().map(|x| ambient.describe_object(x)).collect();
        let data = Arc::new(Data { ambient, objects, morphisms, obj_index, mor_index });
        let mut pairs = 0u64;
        {
            let n = data.objects.len();
            let mut inc = vec![0u64; n];
            let mut out = vec![0u64; n];
            for &(s, t) in &ends {
                out[s.index()] += 1;
                inc[t.index()] += 1;
            }
            for k in 0..n {
                pairs += inc[k] * out[k];
            }
        }
        let category = if pairs <= table_limit {
            let d = data.clone();
            FinCategory::from_table(labels, identities, &ends, move |g, f| d.compose(g, f))?
        } else {
            let d = data.clone();
            FinCategory::with_lazy_composition(labels, identities, &ends, Arc::new(move |g, f| d.compose(g, f)))?
        };
        let d = data.clone();
        let category = category.with_labeler(Arc::new(move |m| d.ambient.describe_morphism(&d.morphisms[m.index()])));
        Ok(Concrete { data, category: Arc::new(category) })
    }

    pub fn ambient(&self) -> &Arc<A> {
        &self.data.ambient
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    pub fn objects(&self) -> &[A::Obj] {
        &self.data.objects
    }

    pub fn morphisms(&self) -> &[A::Mor] {
        &self.data.morphisms
    }

    pub fn object(&self, o: ObjId) -> &A::Obj {
        &self.data.objects[o.index()]
    }

    pub fn morphism(&self, m: MorId) -> &A::Mor {
        &self.data.morphisms[m.index()]
    }

    pub fn obj_id(&self, x: &A::Obj) -> Option<ObjId> {
        self.data.obj_index.get(x).copied()
    }

    pub fn mor_id(&self, m: &A::Mor) -> Option<MorId> {
        self.data.mor_index.get(m).copied()
    }

    pub fn class(&self, mut pred: impl FnMut(&A::Mor) -> bool) -> MorphismClass {
        MorphismClass::from_predicate(self.category.clone(), |m| pred(self.morphism(m)))
    }

    pub fn cofibrations(&self) -> MorphismClass {
        let amb = self.ambient().clone();
        self.class(|m| amb.is_cofibration(m))
    }

    pub fn weak_equivalences(&self) -> MorphismClass {
        let amb = self.ambient().clone();
        self.class(|m| amb.is_weak_equivalence(m))
    }
}

/// Pushouts computed by the ambient recipe and looked up in the window.
pub struct AmbientPushouts<A: Ambient> {
    concrete: Arc<Concrete<A>>,
}

impl<A: Ambient> AmbientPushouts<A> {
    pub fn new(concrete: Arc<Concrete<A>>) -> Self {
        AmbientPushouts { concrete }
    }
}

impl<A: Ambient> PushoutProvider for AmbientPushouts<A> {
    fn pushout(&self, cat: &FinCategory, f: MorId, g: MorId) -> PushoutOutcome {
        let c = &self.concrete;
        let amb = c.ambient();
        match amb.pushout(c.morphism(f), c.morphism(g)) {
            Some(po) => match c.obj_id(&po.apex) {
                Some(apex) => {
                    let legs = (c.mor_id(&po.leg_from_b), c.mor_id(&po.leg_from_c));
                    match legs {
                        (Some(leg_from_b), Some(leg_from_c)) => {
                            PushoutOutcome::Found(PushoutResult { span: (f, g), apex, leg_from_b, leg_from_c })
                        }
                        _ => PushoutOutcome::BeyondBound,
                    }
                }
                None => PushoutOutcome::BeyondBound,
            },
            None => crate::waldhausen::EnumerativePushouts.pushout(cat, f, g),
        }
    }

    fn copair(&self, cat: &FinCategory, po: &PushoutResult, b: MorId, c: MorId) -> Option<MorId> {
        let con = &self.concrete;
        let amb = con.ambient();
        let apo = AmbientPushout {
            apex: con.object(po.apex).clone(),
            leg_from_b: con.morphism(po.leg_from_b).clone(),
            leg_from_c: con.morphism(po.leg_from_c).clone(),
        };
        match amb.copair(&apo, con.morphism(b), con.morphism(c)) {
            Some(h) => con.mor_id(&h),
            None => fincat::copair(cat, po, b, c),
        }
    }

    fn describe(&self) -> String {
        format!("{} recipe", self.concrete.ambient().name())
    }
}

/// A materialized window of an ambient together with its Waldhausen structure.
pub struct Model<A: Ambient> {
    pub concrete: Arc<Concrete<A>>,
    pub structure: WaldhausenStructure,
}

impl<A: Ambient> Clone for Model<A> {
    fn clone(&self) -> Self {
        Model { concrete: self.concrete.clone(), structure: self.structure.clone() }
    }
}

impl<A: Ambient> Model<A> {
    pub fn new(ambient: Arc<A>, objects: Vec<A::Obj>) -> Result<Self> {
        Self::from_concrete(Arc::new(Concrete::materialize(ambient, objects)?))
    }

    pub fn from_concrete(concrete: Arc<Concrete<A>>) -> Result<Self> {
        let amb = concrete.ambient();
        let initial = concrete
            .obj_id(&amb.initial())
            .ok_or_else(|| Error::Boundary(format!("initial object of {} is outside the window", amb.name())))?;
        let structure = WaldhausenStructure::new(
            concrete.category().clone(),
            concrete.cofibrations(),
            concrete.weak_equivalences(),
            initial,
        )?
        .with_pushouts(Arc::new(AmbientPushouts::new(concrete.clone())));
        Ok(Model { concrete, structure })
    }

    pub fn ambient(&self) -> &Arc<A> {
        self.concrete.ambient()
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        self.concrete.category()
    }

    pub fn id_of(&self, m: &A::Mor) -> Option<MorId> {
        self.concrete.mor_id(m)
    }
}

/// Certificates from the ambient factorization `r∘c`, checked on the data.
pub struct AmbientCertifier<A: Factorizing> {
    concrete: Arc<Concrete<A>>,
}

impl<A: Factorizing> AmbientCertifier<A> {
    pub fn new(concrete: Arc<Concrete<A>>) -> Self {
        AmbientCertifier { concrete }
    }
}

impl<A: Factorizing> FactorizationCertifier for AmbientCertifier<A> {
    fn agrees_with(&self, c: &MorphismClass, f: &MorphismClass) -> bool {
        let con = &self.concrete;
        let amb = con.ambient();
        c.category().num_morphisms() == con.morphisms().len()
            && con.category().morphisms().all(|m| {
                let data = con.morphism(m);
                c.contains(m) == amb.is_cofibration(data) && f.contains(m) == amb.in_right_class(data)
            })
    }

    fn certify(&self, alpha: MorId) -> Option<String> {
        let amb = self.concrete.ambient();
        let data = self.concrete.morphism(alpha);
        let (c, r) = amb.factor(data);
        let ok = amb.compose(&r, &c) == *data && amb.is_cofibration(&c) && amb.in_right_class(&r);
        ok.then(|| {
            format!(
                "{} = {} ∘ {} through {}",
                amb.describe_morphism(data),
                amb.describe_morphism(&r),
                amb.describe_morphism(&c),
                amb.describe_object(&amb.target(&c))
            )
        })
    }
}
