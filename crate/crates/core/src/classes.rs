//! Morphism classes, lifting properties and weak factorization systems.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{self, FinCategory, MorId, ObjId};

#[derive(Clone)]
pub struct MorphismClass {
    category: Arc<FinCategory>,
    members: Vec<bool>,
}

impl fmt::Debug for MorphismClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|m| m.0)).finish()
    }
}

impl PartialEq for MorphismClass {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for MorphismClass {}

impl MorphismClass {
    pub fn from_predicate(category: Arc<FinCategory>, mut pred: impl FnMut(MorId) -> bool) -> Self {
        let members = category.morphisms().map(&mut pred).collect();
        MorphismClass { category, members }
    }

    pub fn from_ids(category: Arc<FinCategory>, ids: impl IntoIterator<Item = MorId>) -> Result<Self> {
        let mut members = vec![false; category.num_morphisms()];
        for m in ids {
            let slot = members
                .get_mut(m.index())
                .ok_or_else(|| Error::Invalid(format!("morphism {m} is not in the category")))?;
            *slot = true;
        }
        Ok(MorphismClass { category, members })
    }

    pub fn from_mask(category: Arc<FinCategory>, members: Vec<bool>) -> Result<Self> {
        if members.len() != category.num_morphisms() {
            return Err(Error::Invalid("class mask length differs from morphism count".into()));
        }
        Ok(MorphismClass { category, members })
    }

    pub fn all(category: Arc<FinCategory>) -> Self {
        let members = vec![true; category.num_morphisms()];
        MorphismClass { category, members }
    }

    pub fn empty(category: Arc<FinCategory>) -> Self {
        let members = vec![false; category.num_morphisms()];
        MorphismClass { category, members }
    }

    pub fn isomorphisms(category: Arc<FinCategory>) -> Self {
        let members = fincat::isomorphism_mask(&category);
        MorphismClass { category, members }
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    pub fn contains(&self, m: MorId) -> bool {
        self.members[m.index()]
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_everything(&self) -> bool {
        self.members.iter().all(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = MorId> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| fincat::mor(i))
    }

    pub fn is_subset(&self, other: &MorphismClass) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn intersection(&self, other: &MorphismClass) -> MorphismClass {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn union(&self, other: &MorphismClass) -> MorphismClass {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &MorphismClass) -> MorphismClass {
        self.zip_with(other, |a, b| a && !b)
    }

    fn zip_with(&self, other: &MorphismClass, op: impl Fn(bool, bool) -> bool) -> MorphismClass {
        let members = self.members.iter().zip(&other.members).map(|(&a, &b)| op(a, b)).collect();
        MorphismClass { category: self.category.clone(), members }
    }

    pub fn with(&self, m: MorId, present: bool) -> MorphismClass {
        let mut out = self.clone();
        out.members[m.index()] = present;
        out
    }

    /// First pair `(f, g)` of members with `g∘f` outside the class.
    pub fn composition_failure(&self) -> Option<(MorId, MorId)> {
        let cat = &*self.category;
        for f in self.iter() {
            for &g in cat.outgoing(cat.target(f)) {
                if self.contains(g) && !self.contains(cat.compose(g, f)) {
                    return Some((f, g));
                }
            }
        }
        None
    }

    /// First pair `(f, g)` violating 2-out-of-3 for the composite `g∘f`.
    pub fn two_out_of_three_failure(&self) -> Option<(MorId, MorId)> {
        let cat = &*self.category;
        for f in cat.morphisms() {
            for &g in cat.outgoing(cat.target(f)) {
                let count = [self.contains(f), self.contains(g), self.contains(cat.compose(g, f))]
                    .iter()
                    .filter(|&&b| b)
                    .count();
                if count == 2 {
                    return Some((f, g));
                }
            }
        }
        None
    }
}

/// A commuting square `r∘f = g∘l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LiftingSquare {
    pub l: MorId,
    pub r: MorId,
    pub f: MorId,
    pub g: MorId,
}

impl LiftingSquare {
    pub fn new(cat: &FinCategory, l: MorId, r: MorId, f: MorId, g: MorId) -> Result<Self> {
        let shape_ok = cat.source(f) == cat.source(l)
            && cat.target(f) == cat.source(r)
            && cat.source(g) == cat.target(l)
            && cat.target(g) == cat.target(r);
        if !shape_ok || cat.compose(r, f) != cat.compose(g, l) {
            return Err(Error::NonCommutingSquare(format!("l={l}, r={r}, f={f}, g={g}")));
        }
        Ok(LiftingSquare { l, r, f, g })
    }
}

pub fn find_lift(cat: &FinCategory, sq: &LiftingSquare) -> Option<MorId> {
    cat.hom(cat.target(sq.l), cat.source(sq.r))
        .iter()
        .copied()
        .find(|&t| cat.compose(t, sq.l) == sq.f && cat.compose(sq.r, t) == sq.g)
}

/// Lifting check for the pair `(l, r)`: every square has a lift iff the set of
/// pairs realised as `(t∘l, r∘t)` is as large as the set of squares.
fn lifting_defect(cat: &FinCategory, l: MorId, r: MorId, want_witness: bool) -> Option<Option<LiftingSquare>> {
    let (a, b) = (cat.source(l), cat.target(l));
    let (c, d) = (cat.source(r), cat.target(r));
    let mut by_gl: HashMap<MorId, Vec<MorId>> = HashMap::new();
    for &g in cat.hom(b, d) {
        by_gl.entry(cat.compose(g, l)).or_default().push(g);
    }
    let squares: usize = cat
        .hom(a, c)
        .iter()
        .map(|&f| by_gl.get(&cat.compose(r, f)).map_or(0, Vec::len))
        .sum();
    let realised: HashSet<(MorId, MorId)> =
        cat.hom(b, c).iter().map(|&t| (cat.compose(t, l), cat.compose(r, t))).collect();
    if realised.len() == squares {
        return None;
    }
    if !want_witness {
        return Some(None);
    }
    for &f in cat.hom(a, c) {
        if let Some(gs) = by_gl.get(&cat.compose(r, f)) {
            for &g in gs {
                if !realised.contains(&(f, g)) {
                    return Some(Some(LiftingSquare { l, r, f, g }));
                }
            }
        }
    }
    unreachable!("square count exceeded realised lifts without a missing square")
}

pub fn has_lifting_property(cat: &FinCategory, l: MorId, r: MorId) -> bool {
    lifting_defect(cat, l, r, false).is_none()
}

/// A square with no diagonal filler, if one exists.
pub fn non_lifting_square(cat: &FinCategory, l: MorId, r: MorId) -> Option<LiftingSquare> {
    lifting_defect(cat, l, r, true).flatten()
}

pub fn rlp_class(c: &MorphismClass) -> MorphismClass {
    let cat = c.category().clone();
    let left: Vec<MorId> = c.iter().collect();
    MorphismClass::from_predicate(cat.clone(), |r| left.iter().all(|&l| has_lifting_property(&cat, l, r)))
}

pub fn llp_class(f: &MorphismClass) -> MorphismClass {
    let cat = f.category().clone();
    let right: Vec<MorId> = f.iter().collect();
    MorphismClass::from_predicate(cat.clone(), |l| right.iter().all(|&r| has_lifting_property(&cat, l, r)))
}

/// Out-of-bound evidence that a morphism factors as (left class, right class).
pub trait FactorizationCertifier {
    /// True when this certifier's classes are exactly `c` and `f` on the
    /// materialized category, so its certificates apply.
    fn agrees_with(&self, c: &MorphismClass, f: &MorphismClass) -> bool;
    /// Description of a checked factorization of `alpha` through an object
    /// outside the truncation.
    fn certify(&self, alpha: MorId) -> Option<String>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassMismatch {
    /// In the expected class but missing the lifting property; the square has
    /// no lift.
    MissingLift { morphism: MorId, square: LiftingSquare },
    /// Has the lifting property but is outside the expected class.
    Unexpected { morphism: MorId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factorization {
    InBound { middle: ObjId, left: MorId, right: MorId },
    CertifiedBeyondBound(String),
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WfsVerdict {
    Holds,
    Fails,
    InconclusiveAtBound,
}

#[derive(Clone, Debug)]
pub struct WfsReport {
    /// Members of `C^□ Δ F`.
    pub right_mismatches: Vec<ClassMismatch>,
    /// Members of `^□F Δ C`.
    pub left_mismatches: Vec<ClassMismatch>,
    pub factorizations: Vec<(MorId, Factorization)>,
    pub verdict: WfsVerdict,
}

impl WfsReport {
    pub fn holds(&self) -> bool {
        self.verdict == WfsVerdict::Holds
    }

    pub fn unresolved(&self) -> impl Iterator<Item = MorId> + '_ {
        self.factorizations
            .iter()
            .filter(|(_, f)| *f == Factorization::Unresolved)
            .map(|(m, _)| *m)
    }

    pub fn certified_count(&self) -> usize {
        self.factorizations
            .iter()
            .filter(|(_, f)| matches!(f, Factorization::CertifiedBeyondBound(_)))
            .count()
    }
}

fn right_mismatches(c: &MorphismClass, f: &MorphismClass) -> Vec<ClassMismatch> {
    let cat = c.category();
    let rlp = rlp_class(c);
    let mut out = Vec::new();
    for m in cat.morphisms() {
        match (f.contains(m), rlp.contains(m)) {
            (true, false) => {
                let square = c
                    .iter()
                    .find_map(|l| non_lifting_square(cat, l, m))
                    .expect("a morphism outside C^□ fails some square");
                out.push(ClassMismatch::MissingLift { morphism: m, square });
            }
            (false, true) => out.push(ClassMismatch::Unexpected { morphism: m }),
            _ => {}
        }
    }
    out
}

fn left_mismatches(c: &MorphismClass, f: &MorphismClass) -> Vec<ClassMismatch> {
    let cat = c.category();
    let llp = llp_class(f);
    let mut out = Vec::new();
    for m in cat.morphisms() {
        match (c.contains(m), llp.contains(m)) {
            (true, false) => {
                let square = f
                    .iter()
                    .find_map(|r| non_lifting_square(cat, m, r))
                    .expect("a morphism outside ^□F fails some square");
                out.push(ClassMismatch::MissingLift { morphism: m, square });
            }
            (false, true) => out.push(ClassMismatch::Unexpected { morphism: m }),
            _ => {}
        }
    }
    out
}

fn factor_in_bound(c: &MorphismClass, f: &MorphismClass, alpha: MorId) -> Option<(ObjId, MorId, MorId)> {
    let cat = c.category();
    let (a, z) = (cat.source(alpha), cat.target(alpha));
    for y in cat.objects() {
        for &left in cat.hom(a, y) {
            if !c.contains(left) {
                continue;
            }
            for &right in cat.hom(y, z) {
                if f.contains(right) && cat.compose(right, left) == alpha {
                    return Some((y, left, right));
                }
            }
        }
    }
    None
}

pub fn is_wfs(c: &MorphismClass, f: &MorphismClass) -> WfsReport {
    is_wfs_certified(c, f, None)
}

/// Full weak factorization system check. Morphisms whose factorization needs
/// an object beyond the truncation are resolved by `certifier` when it agrees
/// with the classes, and otherwise stay unresolved.
pub fn is_wfs_certified(c: &MorphismClass, f: &MorphismClass, certifier: Option<&dyn FactorizationCertifier>) -> WfsReport {
    let cat = c.category();
    let right_mismatches = right_mismatches(c, f);
    let left_mismatches = left_mismatches(c, f);
    let certifier = certifier.filter(|cert| cert.agrees_with(c, f));
    let factorizations: Vec<(MorId, Factorization)> = cat
        .morphisms()
        .map(|alpha| {
            let fac = match factor_in_bound(c, f, alpha) {
                Some((middle, left, right)) => Factorization::InBound { middle, left, right },
                None => match certifier.and_then(|cert| cert.certify(alpha)) {
                    Some(note) => Factorization::CertifiedBeyondBound(note),
                    None => Factorization::Unresolved,
                },
            };
            (alpha, fac)
        })
        .collect();
    let verdict = if !right_mismatches.is_empty() || !left_mismatches.is_empty() {
        WfsVerdict::Fails
    } else if factorizations.iter().any(|(_, fac)| *fac == Factorization::Unresolved) {
        WfsVerdict::InconclusiveAtBound
    } else {
        WfsVerdict::Holds
    };
    WfsReport { right_mismatches, left_mismatches, factorizations, verdict }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderObject {
    pub apex: ObjId,
    pub coproduct: fincat::Coproduct,
    /// `e0 ⊔ e1: X ⊔ X → apex`.
    pub inclusion: MorId,
    /// `δ: apex → X`.
    pub retraction: MorId,
}

/// Factors the fold map `X ⊔ X → X` as a member of `c` followed by a member of
/// `f`, choosing the lowest apex and maps.
pub fn cylinder_object(c: &MorphismClass, f: &MorphismClass, x: ObjId) -> Option<CylinderObject> {
    let cat = c.category();
    let coproduct = fincat::coproduct(cat, &[x, x])?;
    let id = cat.identity(x);
    let fold = fincat::mediating_morphisms(cat, coproduct.apex, x, &[(coproduct.injections[0], id), (coproduct.injections[1], id)]);
    let fold = *fold.first()?;
    let (apex, inclusion, retraction) = factor_in_bound(c, f, fold)?;
    Some(CylinderObject { apex, coproduct, inclusion, retraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{mor, obj};

    #[test]
    fn one_object_category_isos_all_is_wfs() {
        let cat = Arc::new(
            FinCategory::from_table(vec!["*".into()], vec![mor(0)], &[(obj(0), obj(0))], |_, _| Some(mor(0))).unwrap(),
        );
        let isos = MorphismClass::isomorphisms(cat.clone());
        let all = MorphismClass::all(cat);
        assert!(is_wfs(&isos, &all).holds());
        assert_eq!(rlp_class(&isos), all);
    }

    #[test]
    fn class_ids_must_exist() {
        let cat = Arc::new(
            FinCategory::from_table(vec!["*".into()], vec![mor(0)], &[(obj(0), obj(0))], |_, _| Some(mor(0))).unwrap(),
        );
        assert!(MorphismClass::from_ids(cat, [mor(3)]).is_err());
    }
}
