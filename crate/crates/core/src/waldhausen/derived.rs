use std::sync::Arc;

use crate::ambient::{Ambient, AmbientCoproduct, AmbientPushout, Model};
use crate::error::Result;
use crate::fincat::ObjId;

/// A commuting square from `from` to `to`: `to∘dom = cod∘from`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square<M> {
    pub from: M,
    pub to: M,
    pub dom: M,
    pub cod: M,
}

/// The arrow category: objects are morphisms, morphisms commuting squares
/// `(dom, cod)`, classified componentwise.
pub struct MorCat<A: Ambient> {
    pub inner: Arc<A>,
}

impl<A: Ambient> MorCat<A> {
    pub fn new(inner: Arc<A>) -> Self {
        MorCat { inner }
    }

    pub fn square(&self, from: &A::Mor, to: &A::Mor, dom: A::Mor, cod: A::Mor) -> Square<A::Mor> {
        Square { from: from.clone(), to: to.clone(), dom, cod }
    }

    fn squares(&self, f: &A::Mor, g: &A::Mor) -> Vec<Square<A::Mor>> {
        let a = &*self.inner;
        let bottoms = a.hom(&a.target(f), &a.target(g));
        let mut by_composite: std::collections::HashMap<A::Mor, Vec<usize>> = std::collections::HashMap::new();
        for (i, u) in bottoms.iter().enumerate() {
            by_composite.entry(a.compose(u, f)).or_default().push(i);
        }
        let mut out = Vec::new();
        for top in a.hom(&a.source(f), &a.source(g)) {
            if let Some(list) = by_composite.get(&a.compose(g, &top)) {
                for &i in list {
                    out.push(self.square(f, g, top.clone(), bottoms[i].clone()));
                }
            }
        }
        out
    }

    fn square_pushout(&self, s1: &Square<A::Mor>, s2: &Square<A::Mor>) -> Option<AmbientPushout<A::Mor, Square<A::Mor>>> {
        let a = &*self.inner;
        let top = a.pushout(&s1.dom, &s2.dom)?;
        let bottom = a.pushout(&s1.cod, &s2.cod)?;
        let apex = a.copair(&top, &a.compose(&bottom.leg_from_b, &s1.to), &a.compose(&bottom.leg_from_c, &s2.to))?;
        Some(AmbientPushout {
            leg_from_b: self.square(&s1.to, &apex, top.leg_from_b.clone(), bottom.leg_from_b.clone()),
            leg_from_c: self.square(&s2.to, &apex, top.leg_from_c.clone(), bottom.leg_from_c.clone()),
            apex,
        })
    }
}

impl<A: Ambient> Ambient for MorCat<A> {
    type Obj = A::Mor;
    type Mor = Square<A::Mor>;

    fn name(&self) -> String {
        format!("Mor({})", self.inner.name())
    }

    fn source(&self, f: &Self::Mor) -> Self::Obj {
        f.from.clone()
    }

    fn target(&self, f: &Self::Mor) -> Self::Obj {
        f.to.clone()
    }

    fn identity(&self, x: &Self::Obj) -> Self::Mor {
        let a = &*self.inner;
        self.square(x, x, a.identity(&a.source(x)), a.identity(&a.target(x)))
    }

    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor {
        let a = &*self.inner;
        self.square(&f.from, &g.to, a.compose(&g.dom, &f.dom), a.compose(&g.cod, &f.cod))
    }

    fn hom(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor> {
        self.squares(x, y)
    }

    fn initial(&self) -> Self::Obj {
        self.inner.identity(&self.inner.initial())
    }

    fn initial_map(&self, x: &Self::Obj) -> Self::Mor {
        let a = &*self.inner;
        self.square(&self.initial(), x, a.initial_map(&a.source(x)), a.initial_map(&a.target(x)))
    }

    fn coproduct(&self, objs: &[Self::Obj]) -> Option<AmbientCoproduct<Self::Obj, Self::Mor>> {
        let a = &*self.inner;
        let srcs: Vec<A::Obj> = objs.iter().map(|f| a.source(f)).collect();
        let tgts: Vec<A::Obj> = objs.iter().map(|f| a.target(f)).collect();
        let top = a.coproduct(&srcs)?;
        let bottom = a.coproduct(&tgts)?;
        let apex = if objs.is_empty() {
            self.initial()
        } else {
            let legs: Vec<A::Mor> = objs.iter().zip(&bottom.injections).map(|(f, inj)| a.compose(inj, f)).collect();
            a.copair_coproduct(&top, &legs)?
        };
        let injections = objs
            .iter()
            .zip(top.injections.iter().zip(&bottom.injections))
            .map(|(f, (t, b))| self.square(f, &apex, t.clone(), b.clone()))
            .collect();
        Some(AmbientCoproduct { apex, injections })
    }

    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Option<AmbientPushout<Self::Obj, Self::Mor>> {
        self.square_pushout(f, g)
    }

    fn copair(&self, po: &AmbientPushout<Self::Obj, Self::Mor>, b: &Self::Mor, c: &Self::Mor) -> Option<Self::Mor> {
        let a = &*self.inner;
        let top = AmbientPushout {
            apex: a.source(&po.apex),
            leg_from_b: po.leg_from_b.dom.clone(),
            leg_from_c: po.leg_from_c.dom.clone(),
        };
        let bottom = AmbientPushout {
            apex: a.target(&po.apex),
            leg_from_b: po.leg_from_b.cod.clone(),
            leg_from_c: po.leg_from_c.cod.clone(),
        };
        let dom = a.copair(&top, &b.dom, &c.dom)?;
        let cod = a.copair(&bottom, &b.cod, &c.cod)?;
        Some(self.square(&po.apex, &b.to, dom, cod))
    }

    fn is_cofibration(&self, f: &Self::Mor) -> bool {
        self.inner.is_cofibration(&f.dom) && self.inner.is_cofibration(&f.cod)
    }

    fn is_weak_equivalence(&self, f: &Self::Mor) -> bool {
        self.inner.is_weak_equivalence(&f.dom) && self.inner.is_weak_equivalence(&f.cod)
    }

    fn describe_object(&self, x: &Self::Obj) -> String {
        self.inner.describe_morphism(x)
    }

    fn describe_morphism(&self, f: &Self::Mor) -> String {
        format!("({}, {})", self.inner.describe_morphism(&f.dom), self.inner.describe_morphism(&f.cod))
    }
}

/// The full subcategory of the arrow category on cofibrations. A square
/// `(u, a): (f: A ↣ X) → (g: B ↣ Y)` is classified by `u` and the map
/// `h: B ⊔_A X → Y` it induces.
pub struct CoMorCat<A: Ambient> {
    pub arrows: MorCat<A>,
}

impl<A: Ambient> CoMorCat<A> {
    pub fn new(inner: Arc<A>) -> Self {
        CoMorCat { arrows: MorCat::new(inner) }
    }

    pub fn inner(&self) -> &Arc<A> {
        &self.arrows.inner
    }

    /// The map `h: B ⊔_A X → Y` induced by a square, with the pushout of
    /// `(f, u)` it is computed from.
    pub fn induced_map(&self, s: &Square<A::Mor>) -> Option<(AmbientPushout<A::Obj, A::Mor>, A::Mor)> {
        let a = &**self.inner();
        let po = a.pushout(&s.from, &s.dom)?;
        let h = a.copair(&po, &s.cod, &s.to)?;
        Some((po, h))
    }

    fn classify(&self, s: &Square<A::Mor>, pred: impl Fn(&A::Mor) -> bool) -> bool {
        if !pred(&s.dom) {
            return false;
        }
        let (_, h) = self
            .induced_map(s)
            .expect("pushouts along cofibrations exist in the ambient");
        pred(&h)
    }
}

impl<A: Ambient> Ambient for CoMorCat<A> {
    type Obj = A::Mor;
    type Mor = Square<A::Mor>;

    fn name(&self) -> String {
        format!("coMor({})", self.inner().name())
    }

    fn source(&self, f: &Self::Mor) -> Self::Obj {
        f.from.clone()
    }

    fn target(&self, f: &Self::Mor) -> Self::Obj {
        f.to.clone()
    }

    fn identity(&self, x: &Self::Obj) -> Self::Mor {
        self.arrows.identity(x)
    }

    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor {
        self.arrows.compose(g, f)
    }

    fn hom(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor> {
        self.arrows.hom(x, y)
    }

    fn is_object(&self, x: &Self::Obj) -> bool {
        self.inner().is_cofibration(x)
    }

    fn initial(&self) -> Self::Obj {
        self.arrows.initial()
    }

    fn initial_map(&self, x: &Self::Obj) -> Self::Mor {
        self.arrows.initial_map(x)
    }

    fn coproduct(&self, objs: &[Self::Obj]) -> Option<AmbientCoproduct<Self::Obj, Self::Mor>> {
        self.arrows.coproduct(objs).filter(|c| self.is_object(&c.apex))
    }

    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Option<AmbientPushout<Self::Obj, Self::Mor>> {
        self.arrows.pushout(f, g).filter(|p| self.is_object(&p.apex))
    }

    fn copair(&self, po: &AmbientPushout<Self::Obj, Self::Mor>, b: &Self::Mor, c: &Self::Mor) -> Option<Self::Mor> {
        self.arrows.copair(po, b, c)
    }

    fn is_cofibration(&self, f: &Self::Mor) -> bool {
        let a = self.inner().clone();
        self.classify(f, |m| a.is_cofibration(m))
    }

    fn is_weak_equivalence(&self, f: &Self::Mor) -> bool {
        let a = self.inner().clone();
        self.classify(f, |m| a.is_weak_equivalence(m))
    }

    fn describe_object(&self, x: &Self::Obj) -> String {
        self.arrows.describe_object(x)
    }

    fn describe_morphism(&self, f: &Self::Mor) -> String {
        self.arrows.describe_morphism(f)
    }
}

/// A morphism of a slice or coslice: `map` from the structure map `from` to
/// the structure map `to`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SliceMor<M> {
    pub from: M,
    pub to: M,
    pub map: M,
}

/// The overcategory `E/A`.
pub struct Slice<A: Ambient> {
    pub inner: Arc<A>,
    pub base: A::Obj,
}

impl<A: Ambient> Ambient for Slice<A> {
    type Obj = A::Mor;
    type Mor = SliceMor<A::Mor>;

    fn name(&self) -> String {
        format!("{}/{}", self.inner.name(), self.inner.describe_object(&self.base))
    }

    fn source(&self, f: &Self::Mor) -> Self::Obj {
        f.from.clone()
    }

    fn target(&self, f: &Self::Mor) -> Self::Obj {
        f.to.clone()
    }

    fn identity(&self, x: &Self::Obj) -> Self::Mor {
        SliceMor { from: x.clone(), to: x.clone(), map: self.inner.identity(&self.inner.source(x)) }
    }

    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor {
        SliceMor { from: f.from.clone(), to: g.to.clone(), map: self.inner.compose(&g.map, &f.map) }
    }

    fn hom(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor> {
        let a = &*self.inner;
        a.hom(&a.source(x), &a.source(y))
            .into_iter()
            .filter(|m| a.compose(y, m) == *x)
            .map(|map| SliceMor { from: x.clone(), to: y.clone(), map })
            .collect()
    }

    fn is_object(&self, x: &Self::Obj) -> bool {
        self.inner.target(x) == self.base
    }

    fn initial(&self) -> Self::Obj {
        self.inner.initial_map(&self.base)
    }

    fn initial_map(&self, x: &Self::Obj) -> Self::Mor {
        let a = &*self.inner;
        SliceMor { from: self.initial(), to: x.clone(), map: a.initial_map(&a.source(x)) }
    }

    fn coproduct(&self, objs: &[Self::Obj]) -> Option<AmbientCoproduct<Self::Obj, Self::Mor>> {
        let a = &*self.inner;
        let srcs: Vec<A::Obj> = objs.iter().map(|x| a.source(x)).collect();
        let cp = a.coproduct(&srcs)?;
        let apex = if objs.is_empty() { self.initial() } else { a.copair_coproduct(&cp, objs)? };
        let injections = objs
            .iter()
            .zip(&cp.injections)
            .map(|(x, i)| SliceMor { from: x.clone(), to: apex.clone(), map: i.clone() })
            .collect();
        Some(AmbientCoproduct { apex, injections })
    }

    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Option<AmbientPushout<Self::Obj, Self::Mor>> {
        let a = &*self.inner;
        let po = a.pushout(&f.map, &g.map)?;
        let apex = a.copair(&po, &f.to, &g.to)?;
        Some(AmbientPushout {
            leg_from_b: SliceMor { from: f.to.clone(), to: apex.clone(), map: po.leg_from_b },
            leg_from_c: SliceMor { from: g.to.clone(), to: apex.clone(), map: po.leg_from_c },
            apex,
        })
    }

    fn copair(&self, po: &AmbientPushout<Self::Obj, Self::Mor>, b: &Self::Mor, c: &Self::Mor) -> Option<Self::Mor> {
        let a = &*self.inner;
        let under = AmbientPushout {
            apex: a.source(&po.apex),
            leg_from_b: po.leg_from_b.map.clone(),
            leg_from_c: po.leg_from_c.map.clone(),
        };
        let map = a.copair(&under, &b.map, &c.map)?;
        Some(SliceMor { from: po.apex.clone(), to: b.to.clone(), map })
    }

    fn is_cofibration(&self, f: &Self::Mor) -> bool {
        self.inner.is_cofibration(&f.map)
    }

    fn is_weak_equivalence(&self, f: &Self::Mor) -> bool {
        self.inner.is_weak_equivalence(&f.map)
    }

    fn describe_object(&self, x: &Self::Obj) -> String {
        self.inner.describe_morphism(x)
    }

    fn describe_morphism(&self, f: &Self::Mor) -> String {
        self.inner.describe_morphism(&f.map)
    }
}

/// The full subcategory of the undercategory `A/E` on cofibrations `A ↣ X`.
pub struct CosliceCof<A: Ambient> {
    pub inner: Arc<A>,
    pub base: A::Obj,
}

impl<A: Ambient> Ambient for CosliceCof<A> {
    type Obj = A::Mor;
    type Mor = SliceMor<A::Mor>;

    fn name(&self) -> String {
        format!("{}/{}", self.inner.describe_object(&self.base), self.inner.name())
    }

    fn source(&self, f: &Self::Mor) -> Self::Obj {
        f.from.clone()
    }

    fn target(&self, f: &Self::Mor) -> Self::Obj {
        f.to.clone()
    }

    fn identity(&self, x: &Self::Obj) -> Self::Mor {
        SliceMor { from: x.clone(), to: x.clone(), map: self.inner.identity(&self.inner.target(x)) }
    }

    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor {
        SliceMor { from: f.from.clone(), to: g.to.clone(), map: self.inner.compose(&g.map, &f.map) }
    }

    fn hom(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor> {
        let a = &*self.inner;
        a.hom(&a.target(x), &a.target(y))
            .into_iter()
            .filter(|m| a.compose(m, x) == *y)
            .map(|map| SliceMor { from: x.clone(), to: y.clone(), map })
            .collect()
    }

    fn is_object(&self, x: &Self::Obj) -> bool {
        self.inner.source(x) == self.base && self.inner.is_cofibration(x)
    }

    fn initial(&self) -> Self::Obj {
        self.inner.identity(&self.base)
    }

    fn initial_map(&self, x: &Self::Obj) -> Self::Mor {
        SliceMor { from: self.initial(), to: x.clone(), map: x.clone() }
    }

    fn coproduct(&self, objs: &[Self::Obj]) -> Option<AmbientCoproduct<Self::Obj, Self::Mor>> {
        if objs.is_empty() {
            return Some(AmbientCoproduct { apex: self.initial(), injections: vec![] });
        }
        None
    }

    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Option<AmbientPushout<Self::Obj, Self::Mor>> {
        let a = &*self.inner;
        let po = a.pushout(&f.map, &g.map)?;
        let apex = a.compose(&po.leg_from_b, &f.to);
        if !self.is_object(&apex) {
            return None;
        }
        Some(AmbientPushout {
            leg_from_b: SliceMor { from: f.to.clone(), to: apex.clone(), map: po.leg_from_b },
            leg_from_c: SliceMor { from: g.to.clone(), to: apex.clone(), map: po.leg_from_c },
            apex,
        })
    }

    fn copair(&self, po: &AmbientPushout<Self::Obj, Self::Mor>, b: &Self::Mor, c: &Self::Mor) -> Option<Self::Mor> {
        let a = &*self.inner;
        let under = AmbientPushout {
            apex: a.target(&po.apex),
            leg_from_b: po.leg_from_b.map.clone(),
            leg_from_c: po.leg_from_c.map.clone(),
        };
        let map = a.copair(&under, &b.map, &c.map)?;
        Some(SliceMor { from: po.apex.clone(), to: b.to.clone(), map })
    }

    fn is_cofibration(&self, f: &Self::Mor) -> bool {
        self.inner.is_cofibration(&f.map)
    }

    fn is_weak_equivalence(&self, f: &Self::Mor) -> bool {
        self.inner.is_weak_equivalence(&f.map)
    }

    fn describe_object(&self, x: &Self::Obj) -> String {
        self.inner.describe_morphism(x)
    }

    fn describe_morphism(&self, f: &Self::Mor) -> String {
        self.inner.describe_morphism(&f.map)
    }
}

/// `Mor(E)` over every morphism of the window of `e`.
pub fn mor_structure<A: Ambient>(e: &Model<A>) -> Result<Model<MorCat<A>>> {
    let objects = e.concrete.morphisms().to_vec();
    Model::new(Arc::new(MorCat::new(e.ambient().clone())), objects)
}

/// `coMor(E)` over every cofibration of the window of `e`.
pub fn comor_structure<A: Ambient>(e: &Model<A>) -> Result<Model<CoMorCat<A>>> {
    let amb = e.ambient();
    let objects = e.concrete.morphisms().iter().filter(|m| amb.is_cofibration(m)).cloned().collect();
    Model::new(Arc::new(CoMorCat::new(amb.clone())), objects)
}

pub fn slice_structure<A: Ambient>(e: &Model<A>, a: ObjId) -> Result<Model<Slice<A>>> {
    let amb = e.ambient();
    let base = e.concrete.object(a).clone();
    let objects = e.concrete.morphisms().iter().filter(|m| amb.target(m) == base).cloned().collect();
    Model::new(Arc::new(Slice { inner: amb.clone(), base }), objects)
}

pub fn coslice_cof_structure<A: Ambient>(e: &Model<A>, a: ObjId) -> Result<Model<CosliceCof<A>>> {
    let amb = e.ambient();
    let base = e.concrete.object(a).clone();
    let objects = e
        .concrete
        .morphisms()
        .iter()
        .filter(|m| amb.source(m) == base && amb.is_cofibration(m))
        .cloned()
        .collect();
    Model::new(Arc::new(CosliceCof { inner: amb.clone(), base }), objects)
}
