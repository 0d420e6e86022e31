//! Waldhausen structures, the exhaustive axiom verifier, the construction from
//! a weak factorization system, and the derived structures on arrow, slice and
//! coslice categories.

mod derived;
mod verify;

use std::sync::Arc;

pub use derived::{
    comor_structure, coslice_cof_structure, mor_structure, slice_structure, CoMorCat, CosliceCof, MorCat, Slice,
    SliceMor, Square,
};
pub use verify::{
    describe_witness, recheck_witness, verify_waldhausen, verify_waldhausen_with, Axiom, AxiomEntry, AxiomReport, AxiomStatus,
    GluingWitness, Verdict, VerifyOptions, Witness,
};

use crate::classes::{self, FactorizationCertifier, MorphismClass, WfsReport};
use crate::error::{Error, Result};
use crate::fincat::{self, FinCategory, MorId, ObjId, PushoutResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PushoutOutcome {
    Found(PushoutResult),
    /// The apex exists in the unbounded category but not in the window.
    BeyondBound,
    Absent,
}

impl PushoutOutcome {
    pub fn found(&self) -> Option<&PushoutResult> {
        match self {
            PushoutOutcome::Found(p) => Some(p),
            _ => None,
        }
    }
}

/// Source of pushouts for a structure: enumeration, an ambient recipe, or a
/// staged construction.
pub trait PushoutProvider: Send + Sync {
    fn pushout(&self, cat: &FinCategory, f: MorId, g: MorId) -> PushoutOutcome;

    /// The map out of `po.apex` induced by the cocone `(b, c)`.
    fn copair(&self, cat: &FinCategory, po: &PushoutResult, b: MorId, c: MorId) -> Option<MorId> {
        fincat::copair(cat, po, b, c)
    }

    fn describe(&self) -> String;
}

pub struct EnumerativePushouts;

impl PushoutProvider for EnumerativePushouts {
    fn pushout(&self, cat: &FinCategory, f: MorId, g: MorId) -> PushoutOutcome {
        match fincat::pushout(cat, f, g) {
            Some(p) => PushoutOutcome::Found(p),
            None => PushoutOutcome::Absent,
        }
    }

    fn describe(&self) -> String {
        "enumeration".into()
    }
}

#[derive(Clone)]
pub struct WaldhausenStructure {
    pub category: Arc<FinCategory>,
    pub cof: MorphismClass,
    pub we: MorphismClass,
    pub initial: ObjId,
    pub pushouts: Arc<dyn PushoutProvider>,
}

impl std::fmt::Debug for WaldhausenStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WaldhausenStructure")
            .field("category", &self.category)
            .field("cofibrations", &self.cof.len())
            .field("weak_equivalences", &self.we.len())
            .field("initial", &self.initial)
            .finish()
    }
}

impl WaldhausenStructure {
    pub fn new(category: Arc<FinCategory>, cof: MorphismClass, we: MorphismClass, initial: ObjId) -> Result<Self> {
        if !Arc::ptr_eq(cof.category(), &category) && cof.mask().len() != category.num_morphisms() {
            return Err(Error::Invalid("cofibration class belongs to another category".into()));
        }
        if !Arc::ptr_eq(we.category(), &category) && we.mask().len() != category.num_morphisms() {
            return Err(Error::Invalid("weak-equivalence class belongs to another category".into()));
        }
        if initial.index() >= category.num_objects() {
            return Err(Error::Invalid(format!("initial object {initial} is not an object")));
        }
        Ok(WaldhausenStructure { category, cof, we, initial, pushouts: Arc::new(EnumerativePushouts) })
    }

    pub fn with_pushouts(mut self, pushouts: Arc<dyn PushoutProvider>) -> Self {
        self.pushouts = pushouts;
        self
    }

    pub fn with_classes(&self, cof: MorphismClass, we: MorphismClass) -> Self {
        WaldhausenStructure { cof, we, ..self.clone() }
    }

    pub fn pushout(&self, f: MorId, g: MorId) -> PushoutOutcome {
        self.pushouts.pushout(&self.category, f, g)
    }

    pub fn initial_map(&self, x: ObjId) -> MorId {
        fincat::initial_map(&self.category, self.initial, x)
    }

    pub fn is_cofibration(&self, m: MorId) -> bool {
        self.cof.contains(m)
    }

    pub fn is_weak_equivalence(&self, m: MorId) -> bool {
        self.we.contains(m)
    }
}

/// The hypothesis of the WFS-to-Waldhausen construction that failed, with a
/// witness. Hypotheses are numbered 1-4; a missing initial object is 0.
#[derive(Clone, Debug)]
pub enum HypothesisFailure {
    NoInitialObject,
    NotWeakFactorizationSystem(Box<WfsReport>),
    RightClassNotWeak { morphism: MorId },
    IsoNotWeak { morphism: MorId },
    TwoOutOfThree { first: MorId, second: MorId },
    AcyclicPushoutLeg { cofibration: MorId, along: MorId, pushout: Option<PushoutResult> },
    InitialMapNotCofibration { object: ObjId },
}

impl HypothesisFailure {
    pub fn hypothesis(&self) -> u8 {
        match self {
            HypothesisFailure::NoInitialObject => 0,
            HypothesisFailure::NotWeakFactorizationSystem(_) | HypothesisFailure::RightClassNotWeak { .. } => 1,
            HypothesisFailure::IsoNotWeak { .. } | HypothesisFailure::TwoOutOfThree { .. } => 2,
            HypothesisFailure::AcyclicPushoutLeg { .. } => 3,
            HypothesisFailure::InitialMapNotCofibration { .. } => 4,
        }
    }
}

impl std::fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HypothesisFailure::NoInitialObject => write!(f, "no initial object"),
            HypothesisFailure::NotWeakFactorizationSystem(r) => {
                write!(f, "(C, C^□) is not a weak factorization system: {:?}", r.verdict)
            }
            HypothesisFailure::RightClassNotWeak { morphism } => {
                write!(f, "morphism {morphism} has the right lifting property but is not a weak equivalence")
            }
            HypothesisFailure::IsoNotWeak { morphism } => write!(f, "isomorphism {morphism} is not a weak equivalence"),
            HypothesisFailure::TwoOutOfThree { first, second } => {
                write!(f, "2-out-of-3 fails for {second}∘{first}")
            }
            HypothesisFailure::AcyclicPushoutLeg { cofibration, along, .. } => {
                write!(f, "pushout of acyclic cofibration {cofibration} along {along} is not acyclic")
            }
            HypothesisFailure::InitialMapNotCofibration { object } => {
                write!(f, "the map from the initial object to {object} is not a cofibration")
            }
        }
    }
}

/// Checks the four hypotheses under which a weak factorization system
/// `(C, C^□)` and a class `W` form a Waldhausen structure, and returns that
/// structure.
pub fn wfs_to_waldhausen(
    cof: &MorphismClass,
    we: &MorphismClass,
    pushouts: Arc<dyn PushoutProvider>,
    certifier: Option<&dyn FactorizationCertifier>,
) -> std::result::Result<WaldhausenStructure, HypothesisFailure> {
    let cat = cof.category().clone();
    let initial = fincat::find_initial(&cat).ok_or(HypothesisFailure::NoInitialObject)?;
    let rlp = classes::rlp_class(cof);
    let wfs = classes::is_wfs_certified(cof, &rlp, certifier);
    if !wfs.holds() {
        return Err(HypothesisFailure::NotWeakFactorizationSystem(Box::new(wfs)));
    }
    if let Some(morphism) = rlp.difference(we).iter().next() {
        return Err(HypothesisFailure::RightClassNotWeak { morphism });
    }
    if let Some(morphism) = MorphismClass::isomorphisms(cat.clone()).difference(we).iter().next() {
        return Err(HypothesisFailure::IsoNotWeak { morphism });
    }
    if let Some((first, second)) = we.two_out_of_three_failure() {
        return Err(HypothesisFailure::TwoOutOfThree { first, second });
    }
    let acyclic = cof.intersection(we);
    for f in acyclic.iter() {
        for &g in cat.outgoing(cat.source(f)) {
            match pushouts.pushout(&cat, f, g) {
                PushoutOutcome::Found(p) if acyclic.contains(p.leg_from_c) => {}
                PushoutOutcome::BeyondBound => {}
                PushoutOutcome::Found(p) => {
                    return Err(HypothesisFailure::AcyclicPushoutLeg { cofibration: f, along: g, pushout: Some(p) })
                }
                PushoutOutcome::Absent => {
                    return Err(HypothesisFailure::AcyclicPushoutLeg { cofibration: f, along: g, pushout: None })
                }
            }
        }
    }
    for x in cat.objects() {
        if !cof.contains(fincat::initial_map(&cat, initial, x)) {
            return Err(HypothesisFailure::InitialMapNotCofibration { object: x });
        }
    }
    let structure = WaldhausenStructure::new(cat, cof.clone(), we.clone(), initial)
        .expect("classes come from the same category")
        .with_pushouts(pushouts);
    Ok(structure)
}
