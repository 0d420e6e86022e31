//! Representations of a quiver in the cofibrations of an ambient, with
//! latching objects and the maps `ρ_i` that classify their morphisms.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::ambient::{Ambient, AmbientCoproduct, AmbientPushout};
use crate::error::{Error, Result};
use crate::quiver::{ArrowId, Quiver, Vertex};

mod product;
mod stage;

pub use product::Product;
pub use stage::{
    fiber_iso, reedy_objects, rep_waldhausen, restriction_opfib, FiberIsoReport, RepOptions, RepWaldhausen,
    RestrictionOpfib, Stage, StageReport,
};

/// `on_vertices` follows the sorted vertex list of the quiver, `on_arrows`
/// the arrows in id order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Representation<O, M> {
    pub on_vertices: Vec<O>,
    pub on_arrows: Vec<M>,
}

impl<O: fmt::Debug, M: fmt::Debug> fmt::Debug for Representation<O, M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rep{:?}{:?}", self.on_vertices, self.on_arrows)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepMorphism<O, M> {
    pub source: Arc<Representation<O, M>>,
    pub target: Arc<Representation<O, M>>,
    pub components: Vec<M>,
}

impl<O: fmt::Debug, M: fmt::Debug> fmt::Debug for RepMorphism<O, M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepMor{:?}", self.components)
    }
}

pub type Rep<A> = Representation<<A as Ambient>::Obj, <A as Ambient>::Mor>;
pub type RepMor<A> = RepMorphism<<A as Ambient>::Obj, <A as Ambient>::Mor>;

/// `L_i(X)` as a coproduct over the arrows into `i`, and `φ_i^X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatchingData<O, M> {
    pub vertex: Vertex,
    /// Arrows into the vertex, in the order of the coproduct injections.
    pub arrows: Vec<ArrowId>,
    pub coproduct: AmbientCoproduct<O, M>,
    pub phi: M,
}

/// The pushout `X_i ⊔_{L_i(X)} L_i(Y)` of `(φ_i^X, L_i(f))` and the
/// induced `ρ_i` to `Y_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoData<O, M> {
    pub vertex: Vertex,
    pub latching_map: M,
    pub pushout: AmbientPushout<O, M>,
    pub rho: M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Classification {
    pub cofibration: bool,
    pub weak_equivalence: bool,
}

type LatchingCache<A> = HashMap<(Rep<A>, usize), Arc<LatchingData<<A as Ambient>::Obj, <A as Ambient>::Mor>>>;

/// `Rep(Q, coE)`: diagrams with every arrow a cofibration. By default only
/// those with every `φ_i` a cofibration are objects; [`RepCat::literal`]
/// admits all of them.
pub struct RepCat<A: Ambient> {
    inner: Arc<A>,
    quiver: Quiver,
    reedy: bool,
    apex_twist: usize,
    /// Arrow indices into each vertex index, by arrow id.
    incoming: Vec<Vec<usize>>,
    ends: Vec<(usize, usize)>,
    /// Arrows checked once vertex index `k` has been assigned in `hom`.
    closing: Vec<Vec<usize>>,
    latching: Mutex<LatchingCache<A>>,
}

impl<A: Ambient> fmt::Debug for RepCat<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepCat").field("quiver", &self.quiver).field("reedy", &self.reedy).finish()
    }
}

impl<A: Ambient> RepCat<A> {
    pub fn new(inner: Arc<A>, quiver: Quiver) -> Self {
        Self::build(inner, quiver, true)
    }

    pub fn literal(inner: Arc<A>, quiver: Quiver) -> Self {
        Self::build(inner, quiver, false)
    }

    fn build(inner: Arc<A>, quiver: Quiver, reedy: bool) -> Self {
        let index = |v: Vertex| quiver.vertices().binary_search(&v).expect("arrow endpoints are vertices");
        let n = quiver.vertices().len();
        let ends: Vec<(usize, usize)> = quiver.arrows().iter().map(|a| (index(a.source), index(a.target))).collect();
        let mut incoming = vec![Vec::new(); n];
        let mut closing = vec![Vec::new(); n];
        for (k, &(s, t)) in ends.iter().enumerate() {
            incoming[t].push(k);
            closing[s.max(t)].push(k);
        }
        RepCat { inner, quiver, reedy, apex_twist: 0, incoming, ends, closing, latching: Mutex::new(HashMap::new()) }
    }

    /// Compose every pushout used by `ρ_i` with the `n`-th automorphism of
    /// its apex, a different choice of representative.
    pub fn with_apex_twist(mut self, n: usize) -> Self {
        self.apex_twist = n;
        self
    }

    pub fn inner(&self) -> &Arc<A> {
        &self.inner
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn is_reedy(&self) -> bool {
        self.reedy
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.quiver.vertices().binary_search(&v).ok()
    }

    pub fn arrow_index(&self, id: ArrowId) -> Option<usize> {
        self.quiver.arrows().iter().position(|a| a.id == id)
    }

    /// Arrow indices into vertex index `i`, in id order.
    pub fn incoming(&self, i: usize) -> &[usize] {
        &self.incoming[i]
    }

    pub fn arrow_ends(&self, k: usize) -> (usize, usize) {
        self.ends[k]
    }

    /// Checks shape, that arrows are cofibrations and, for Reedy
    /// categories, that every `φ_i` is one.
    pub fn check_representation(&self, x: &Rep<A>) -> Result<()> {
        let a = &*self.inner;
        if x.on_vertices.len() != self.quiver.vertices().len() || x.on_arrows.len() != self.quiver.arrows().len() {
            return Err(Error::Invalid("representation does not match the quiver".into()));
        }
        if let Some(o) = x.on_vertices.iter().find(|o| !a.is_object(o)) {
            return Err(Error::NotAnObject(a.describe_object(o)));
        }
        for (k, (arrow, m)) in self.quiver.arrows().iter().zip(&x.on_arrows).enumerate() {
            let (s, t) = self.ends[k];
            if a.source(m) != x.on_vertices[s] || a.target(m) != x.on_vertices[t] {
                return Err(Error::Invalid(format!("arrow {} has the wrong endpoints", arrow.id)));
            }
            if !a.is_cofibration(m) {
                return Err(Error::NotAnObject(format!("arrow {} is not a cofibration", arrow.id)));
            }
        }
        if self.reedy {
            for i in 0..x.on_vertices.len() {
                let l = self.latching(x, i)?;
                if !a.is_cofibration(&l.phi) {
                    return Err(Error::NotAnObject(format!(
                        "latching map at vertex {} is not a cofibration",
                        self.quiver.vertices()[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// A morphism of representations, checked for naturality.
    pub fn morphism(&self, source: Arc<Rep<A>>, target: Arc<Rep<A>>, components: Vec<A::Mor>) -> Result<RepMor<A>> {
        let a = &*self.inner;
        if components.len() != source.on_vertices.len() {
            return Err(Error::Invalid("one component per vertex is required".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if a.source(c) != source.on_vertices[i] || a.target(c) != target.on_vertices[i] {
                return Err(Error::Invalid(format!(
                    "component at vertex {} has the wrong endpoints",
                    self.quiver.vertices()[i]
                )));
            }
        }
        for (k, arrow) in self.quiver.arrows().iter().enumerate() {
            let (s, t) = self.ends[k];
            if a.compose(&components[t], &source.on_arrows[k]) != a.compose(&target.on_arrows[k], &components[s]) {
                return Err(Error::Naturality { arrow: arrow.id });
            }
        }
        Ok(RepMorphism { source, target, components })
    }

    fn latching_coproduct(&self, objs: &[A::Obj]) -> Result<AmbientCoproduct<A::Obj, A::Mor>> {
        self.inner
            .coproduct(objs)
            .ok_or_else(|| Error::Boundary("latching coproduct does not exist".into()))
    }

    /// `L_i(X)` and `φ_i^X` at vertex index `i`, cached per representation.
    pub fn latching(&self, x: &Rep<A>, i: usize) -> Result<Arc<LatchingData<A::Obj, A::Mor>>> {
        let key = (x.clone(), i);
        if let Some(l) = self.latching.lock().expect("latching cache").get(&key) {
            return Ok(l.clone());
        }
        let a = &*self.inner;
        let arrows: Vec<usize> = self.incoming[i].clone();
        let objs: Vec<A::Obj> = arrows.iter().map(|&k| x.on_vertices[self.ends[k].0].clone()).collect();
        let coproduct = self.latching_coproduct(&objs)?;
        let phi = if arrows.is_empty() {
            a.initial_map(&x.on_vertices[i])
        } else {
            let legs: Vec<A::Mor> = arrows.iter().map(|&k| x.on_arrows[k].clone()).collect();
            a.copair_coproduct(&coproduct, &legs)
                .ok_or_else(|| Error::Boundary("latching map does not exist".into()))?
        };
        let data = Arc::new(LatchingData {
            vertex: self.quiver.vertices()[i],
            arrows: arrows.iter().map(|&k| self.quiver.arrows()[k].id).collect(),
            coproduct,
            phi,
        });
        self.latching.lock().expect("latching cache").insert(key, data.clone());
        Ok(data)
    }

    /// `L_i(f): L_i(X) → L_i(Y)`.
    pub fn latching_map(&self, f: &RepMor<A>, i: usize) -> Result<A::Mor> {
        let a = &*self.inner;
        let lx = self.latching(&f.source, i)?;
        let ly = self.latching(&f.target, i)?;
        if self.incoming[i].is_empty() {
            return Ok(a.identity(&lx.coproduct.apex));
        }
        let legs: Vec<A::Mor> = self.incoming[i]
            .iter()
            .zip(&ly.coproduct.injections)
            .map(|(&k, inj)| a.compose(inj, &f.components[self.ends[k].0]))
            .collect();
        a.copair_coproduct(&lx.coproduct, &legs)
            .ok_or_else(|| Error::Boundary("induced latching map does not exist".into()))
    }

    fn twisted(&self, po: AmbientPushout<A::Obj, A::Mor>) -> AmbientPushout<A::Obj, A::Mor> {
        if self.apex_twist == 0 {
            return po;
        }
        let a = &*self.inner;
        let id = a.identity(&po.apex);
        let autos: Vec<A::Mor> = a
            .hom(&po.apex, &po.apex)
            .into_iter()
            .filter(|s| a.hom(&po.apex, &po.apex).iter().any(|t| a.compose(t, s) == id && a.compose(s, t) == id))
            .collect();
        let sigma = &autos[self.apex_twist % autos.len()];
        AmbientPushout {
            leg_from_b: a.compose(sigma, &po.leg_from_b),
            leg_from_c: a.compose(sigma, &po.leg_from_c),
            apex: po.apex,
        }
    }

    /// `ρ_i: X_i ⊔_{L_i(X)} L_i(Y) → Y_i`, the map with `ρ_i∘θ_i = f_i` and
    /// `ρ_i` on the latching leg equal to `φ_i^Y`.
    pub fn rho(&self, f: &RepMor<A>, i: usize) -> Result<RhoData<A::Obj, A::Mor>> {
        let a = &*self.inner;
        let lx = self.latching(&f.source, i)?;
        let ly = self.latching(&f.target, i)?;
        let latching_map = self.latching_map(f, i)?;
        let pushout = a
            .pushout(&lx.phi, &latching_map)
            .ok_or_else(|| Error::Boundary("pushout of the latching maps does not exist".into()))?;
        let pushout = self.twisted(pushout);
        let rho = a
            .copair(&pushout, &f.components[i], &ly.phi)
            .ok_or_else(|| Error::Invariant("the square defining ρ does not commute".into()))?;
        Ok(RhoData { vertex: self.quiver.vertices()[i], latching_map, pushout, rho })
    }

    pub fn classify(&self, f: &RepMor<A>) -> Result<Classification> {
        let a = &*self.inner;
        let mut c = Classification { cofibration: true, weak_equivalence: true };
        for i in 0..f.components.len() {
            let r = self.rho(f, i)?.rho;
            c.cofibration &= a.is_cofibration(&r);
            c.weak_equivalence &= a.is_weak_equivalence(&r);
        }
        Ok(c)
    }

    fn classified(&self, f: &RepMor<A>) -> Classification {
        self.classify(f).expect("ρ is defined for representations over a backend with all pushouts and coproducts")
    }
}

impl<A: Ambient> Ambient for RepCat<A> {
    type Obj = Rep<A>;
    type Mor = RepMor<A>;

    fn name(&self) -> String {
        let vs: Vec<String> = self.quiver.vertices().iter().map(u32::to_string).collect();
        format!("Rep(Q[{}], co{})", vs.join(","), self.inner.name())
    }

    fn source(&self, f: &Self::Mor) -> Self::Obj {
        (*f.source).clone()
    }

    fn target(&self, f: &Self::Mor) -> Self::Obj {
        (*f.target).clone()
    }

    fn identity(&self, x: &Self::Obj) -> Self::Mor {
        let x = Arc::new(x.clone());
        let components = x.on_vertices.iter().map(|o| self.inner.identity(o)).collect();
        RepMorphism { source: x.clone(), target: x, components }
    }

    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor {
        let components = g.components.iter().zip(&f.components).map(|(gi, fi)| self.inner.compose(gi, fi)).collect();
        RepMorphism { source: f.source.clone(), target: g.target.clone(), components }
    }

    /// Natural transformations, by backtracking over the vertices.
    fn hom(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor> {
        let a = &*self.inner;
        let n = x.on_vertices.len();
        let candidates: Vec<Vec<A::Mor>> = (0..n).map(|i| a.hom(&x.on_vertices[i], &y.on_vertices[i])).collect();
        let (xs, ys) = (Arc::new(x.clone()), Arc::new(y.clone()));
        let mut out = Vec::new();
        let mut chosen: Vec<usize> = Vec::with_capacity(n);
        let natural = |chosen: &[usize]| {
            self.closing[chosen.len() - 1].iter().all(|&arrow| {
                let (s, t) = self.ends[arrow];
                let (fs, ft) = (&candidates[s][chosen[s]], &candidates[t][chosen[t]]);
                a.compose(ft, &x.on_arrows[arrow]) == a.compose(&y.on_arrows[arrow], fs)
            })
        };
        if n == 0 {
            return vec![RepMorphism { source: xs, target: ys, components: vec![] }];
        }
        let mut next = vec![0usize; n];
        loop {
            let k = chosen.len();
            if next[k] < candidates[k].len() {
                chosen.push(next[k]);
                next[k] += 1;
                if !natural(&chosen) {
                    chosen.pop();
                    continue;
                }
                if chosen.len() == n {
                    let components = chosen.iter().enumerate().map(|(i, &c)| candidates[i][c].clone()).collect();
                    out.push(RepMorphism { source: xs.clone(), target: ys.clone(), components });
                    chosen.pop();
                } else {
                    next[k + 1] = 0;
                }
            } else if chosen.pop().is_none() {
                return out;
            }
        }
    }

    fn is_object(&self, x: &Self::Obj) -> bool {
        self.check_representation(x).is_ok()
    }

    /// The zero functor.
    fn initial(&self) -> Self::Obj {
        let zero = self.inner.initial();
        Representation {
            on_vertices: vec![zero.clone(); self.quiver.vertices().len()],
            on_arrows: vec![self.inner.identity(&zero); self.quiver.arrows().len()],
        }
    }

    fn initial_map(&self, x: &Self::Obj) -> Self::Mor {
        let components = x.on_vertices.iter().map(|o| self.inner.initial_map(o)).collect();
        RepMorphism { source: Arc::new(self.initial()), target: Arc::new(x.clone()), components }
    }

    fn coproduct(&self, objs: &[Self::Obj]) -> Option<AmbientCoproduct<Self::Obj, Self::Mor>> {
        let a = &*self.inner;
        if objs.is_empty() {
            return Some(AmbientCoproduct { apex: self.initial(), injections: vec![] });
        }
        let n = self.quiver.vertices().len();
        let parts: Vec<AmbientCoproduct<A::Obj, A::Mor>> = (0..n)
            .map(|i| a.coproduct(&objs.iter().map(|x| x.on_vertices[i].clone()).collect::<Vec<_>>()))
            .collect::<Option<_>>()?;
        let on_arrows = (0..self.ends.len())
            .map(|k| {
                let (s, t) = self.ends[k];
                let legs: Vec<A::Mor> =
                    objs.iter().zip(&parts[t].injections).map(|(x, inj)| a.compose(inj, &x.on_arrows[k])).collect();
                a.copair_coproduct(&parts[s], &legs)
            })
            .collect::<Option<Vec<_>>>()?;
        let apex = Representation { on_vertices: parts.iter().map(|p| p.apex.clone()).collect(), on_arrows };
        if !self.is_object(&apex) {
            return None;
        }
        let apex_arc = Arc::new(apex.clone());
        let injections = objs
            .iter()
            .enumerate()
            .map(|(j, x)| RepMorphism {
                source: Arc::new(x.clone()),
                target: apex_arc.clone(),
                components: parts.iter().map(|p| p.injections[j].clone()).collect(),
            })
            .collect();
        Some(AmbientCoproduct { apex, injections })
    }

    /// Componentwise, kept only when the apex is an object.
    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Option<AmbientPushout<Self::Obj, Self::Mor>> {
        let a = &*self.inner;
        let n = f.components.len();
        let parts: Vec<AmbientPushout<A::Obj, A::Mor>> =
            (0..n).map(|i| a.pushout(&f.components[i], &g.components[i])).collect::<Option<_>>()?;
        let on_arrows = (0..self.ends.len())
            .map(|k| {
                let (s, t) = self.ends[k];
                let b = a.compose(&parts[t].leg_from_b, &f.target.on_arrows[k]);
                let c = a.compose(&parts[t].leg_from_c, &g.target.on_arrows[k]);
                a.copair(&parts[s], &b, &c)
            })
            .collect::<Option<Vec<_>>>()?;
        let apex = Representation { on_vertices: parts.iter().map(|p| p.apex.clone()).collect(), on_arrows };
        if !self.is_object(&apex) {
            return None;
        }
        let apex_arc = Arc::new(apex.clone());
        Some(AmbientPushout {
            leg_from_b: RepMorphism {
                source: f.target.clone(),
                target: apex_arc.clone(),
                components: parts.iter().map(|p| p.leg_from_b.clone()).collect(),
            },
            leg_from_c: RepMorphism {
                source: g.target.clone(),
                target: apex_arc,
                components: parts.iter().map(|p| p.leg_from_c.clone()).collect(),
            },
            apex,
        })
    }

    fn copair(&self, po: &AmbientPushout<Self::Obj, Self::Mor>, b: &Self::Mor, c: &Self::Mor) -> Option<Self::Mor> {
        let a = &*self.inner;
        let components = (0..b.components.len())
            .map(|i| {
                let part = AmbientPushout {
                    apex: po.apex.on_vertices[i].clone(),
                    leg_from_b: po.leg_from_b.components[i].clone(),
                    leg_from_c: po.leg_from_c.components[i].clone(),
                };
                a.copair(&part, &b.components[i], &c.components[i])
            })
            .collect::<Option<Vec<_>>>()?;
        Some(RepMorphism { source: Arc::new(po.apex.clone()), target: b.target.clone(), components })
    }

    fn copair_coproduct(&self, cp: &AmbientCoproduct<Self::Obj, Self::Mor>, legs: &[Self::Mor]) -> Option<Self::Mor> {
        let a = &*self.inner;
        let target = legs.first()?.target.clone();
        let components = (0..target.on_vertices.len())
            .map(|i| {
                let part = AmbientCoproduct {
                    apex: cp.apex.on_vertices[i].clone(),
                    injections: cp.injections.iter().map(|inj| inj.components[i].clone()).collect(),
                };
                let leg_parts: Vec<A::Mor> = legs.iter().map(|l| l.components[i].clone()).collect();
                a.copair_coproduct(&part, &leg_parts)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(RepMorphism { source: Arc::new(cp.apex.clone()), target, components })
    }

    fn is_cofibration(&self, f: &Self::Mor) -> bool {
        self.classified(f).cofibration
    }

    fn is_weak_equivalence(&self, f: &Self::Mor) -> bool {
        self.classified(f).weak_equivalence
    }

    fn describe_object(&self, x: &Self::Obj) -> String {
        let a = &*self.inner;
        let vs: Vec<String> = self
            .quiver
            .vertices()
            .iter()
            .zip(&x.on_vertices)
            .map(|(v, o)| format!("{v}:{}", a.describe_object(o)))
            .collect();
        let arrows: Vec<String> = self
            .quiver
            .arrows()
            .iter()
            .zip(&x.on_arrows)
            .map(|(arrow, m)| format!("{}:{}", arrow.id, a.describe_morphism(m)))
            .collect();
        if arrows.is_empty() {
            format!("({})", vs.join(", "))
        } else {
            format!("({} | {})", vs.join(", "), arrows.join(", "))
        }
    }

    fn describe_morphism(&self, f: &Self::Mor) -> String {
        let a = &*self.inner;
        let parts: Vec<String> = self
            .quiver
            .vertices()
            .iter()
            .zip(&f.components)
            .map(|(v, m)| format!("{v}:{}", a.describe_morphism(m)))
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// Every diagram over `window` with cofibrations on the arrows, ignoring
/// the latching condition.
pub fn literal_objects<A: Ambient>(cat: &RepCat<A>, window: &[A::Obj]) -> Vec<Rep<A>> {
    let a = &**cat.inner();
    let n = cat.quiver().vertices().len();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    let total = window.len().pow(n as u32);
    for _ in 0..total {
        let on_vertices: Vec<A::Obj> = assignment.iter().map(|&i| window[i].clone()).collect();
        let choices: Vec<Vec<A::Mor>> = (0..cat.quiver().arrows().len())
            .map(|k| {
                let (s, t) = cat.arrow_ends(k);
                a.hom(&on_vertices[s], &on_vertices[t]).into_iter().filter(|m| a.is_cofibration(m)).collect()
            })
            .collect();
        for on_arrows in cartesian(&choices) {
            out.push(Representation { on_vertices: on_vertices.clone(), on_arrows });
        }
        for k in (0..n).rev() {
            assignment[k] += 1;
            if assignment[k] < window.len() {
                break;
            }
            assignment[k] = 0;
        }
    }
    out
}

/// All tuples choosing one element from each list, first list slowest.
pub(crate) fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::with_capacity(lists.len())];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{FpVect, Matrix, PointedMap, PointedSets};

    fn pm(src: usize, tgt: usize, table: &[u8]) -> PointedMap {
        PointedMap::new(src, tgt, table.to_vec()).unwrap()
    }

    #[test]
    fn source_vertex_latching_is_initial() {
        let cat = RepCat::new(Arc::new(PointedSets), Quiver::chain(2));
        let x = Representation { on_vertices: vec![1, 2], on_arrows: vec![pm(1, 2, &[2])] };
        let l1 = cat.latching(&x, 0).unwrap();
        assert_eq!(l1.coproduct.apex, 0);
        assert_eq!(l1.phi, pm(0, 1, &[]));
        let l2 = cat.latching(&x, 1).unwrap();
        assert_eq!(l2.coproduct.apex, 1);
        assert_eq!(l2.phi, x.on_arrows[0]);
    }

    #[test]
    fn double_arrow_latching_over_f2() {
        let f2 = Arc::new(FpVect::new(2).unwrap());
        let q = Quiver::new([1, 2], [(1, 1, 2), (2, 1, 2)]).unwrap();
        let cat = RepCat::new(f2, q);
        let a1 = Matrix::new(2, 1, vec![1, 0]).unwrap();
        let a2 = Matrix::new(2, 1, vec![0, 1]).unwrap();
        let x = Representation { on_vertices: vec![1, 2], on_arrows: vec![a1, a2] };
        let l = cat.latching(&x, 1).unwrap();
        assert_eq!(l.coproduct.apex, 2);
        assert_eq!(l.phi, Matrix::identity(2));
        assert_eq!(l.arrows, vec![1, 2]);
    }

    #[test]
    fn hom_is_natural_transformations() {
        let cat = RepCat::new(Arc::new(PointedSets), Quiver::chain(2));
        let x = Representation { on_vertices: vec![1, 1], on_arrows: vec![pm(1, 1, &[1])] };
        // (f1, f2) with f2∘id = id∘f1: the two constant-or-identity pairs.
        assert_eq!(cat.hom(&x, &x).len(), 2);
        let empty = RepCat::new(Arc::new(PointedSets), Quiver::default());
        let e = empty.initial();
        assert_eq!(empty.hom(&e, &e).len(), 1);
    }

    #[test]
    fn naturality_error_names_arrow() {
        let cat = RepCat::new(Arc::new(PointedSets), Quiver::chain(2));
        let x = Arc::new(Representation { on_vertices: vec![1, 1], on_arrows: vec![pm(1, 1, &[1])] });
        let err = cat.morphism(x.clone(), x, vec![pm(1, 1, &[1]), pm(1, 1, &[0])]).unwrap_err();
        assert!(matches!(err, Error::Naturality { arrow: 1 }));
    }

    #[test]
    fn cartesian_order() {
        let out = cartesian(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(out, vec![vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]);
        assert_eq!(cartesian::<u8>(&[]), vec![Vec::<u8>::new()]);
    }
}
