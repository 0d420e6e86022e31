//! Concrete ambients: truncated pointed finite sets and truncated vector
//! spaces over a prime field.

mod codec;
pub mod pset;
pub mod vect;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use pset::{PointedMap, PointedSets};
pub use vect::{FpVect, Matrix};

use crate::ambient::{Ambient, Graded, Model};
use crate::error::{Error, ParseError, Result};

/// Text encodings of objects and morphisms.
pub trait MorphismCodec: Ambient {
    fn encode(&self, f: &Self::Mor) -> String;
    fn decode(&self, text: &str) -> std::result::Result<Self::Mor, ParseError>;
    fn encode_object(&self, x: &Self::Obj) -> String;
    fn decode_object(&self, text: &str) -> std::result::Result<Self::Obj, ParseError>;
}

/// Objects of both backends are sizes.
pub(crate) fn decode_size(text: &str) -> std::result::Result<usize, ParseError> {
    let t = text.trim();
    t.parse().map_err(|_| ParseError::new(1, 1, format!("'{t}' is not an object size")))
}

pub fn encode_morphism<A: MorphismCodec>(backend: &A, f: &A::Mor) -> String {
    backend.encode(f)
}

pub fn decode_morphism<A: MorphismCodec>(backend: &A, text: &str) -> std::result::Result<A::Mor, ParseError> {
    backend.decode(text)
}

/// Pointed sets `{*}, {*, 1}, …, {*, 1..n_max}` with all pointed maps.
pub fn pset_category(n_max: usize) -> Model<PointedSets> {
    let amb = Arc::new(PointedSets);
    let objects = amb.objects_up_to(n_max);
    Model::new(amb, objects).expect("pointed-set windows are well formed")
}

/// `F_p^0, …, F_p^d_max` with all matrices.
pub fn vect_category(p: u64, d_max: usize) -> Result<Model<FpVect>> {
    let amb = Arc::new(FpVect::new(p)?);
    let objects = amb.objects_up_to(d_max);
    Model::new(amb, objects)
}

/// A backend selector as written on the command line: `pset:n` or
/// `vect:p:d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    PSet { n_max: usize },
    Vect { p: u64, d_max: usize },
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<u64> {
            t.parse::<u64>().map_err(|_| Error::Invalid(format!("'{t}' is not a number in backend '{s}'")))
        };
        match parts.as_slice() {
            ["pset", n] => Ok(Backend::PSet { n_max: num(n)? as usize }),
            ["vect", p, d] => {
                let p = num(p)?;
                if !vect::is_prime(p) {
                    return Err(Error::Invalid(format!("{p} is not prime")));
                }
                Ok(Backend::Vect { p, d_max: num(d)? as usize })
            }
            _ => Err(Error::Invalid(format!("unknown backend '{s}' (expected pset:n or vect:p:d)"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::PSet { n_max } => write!(f, "pset:{n_max}"),
            Backend::Vect { p, d_max } => write!(f, "vect:{p}:{d_max}"),
        }
    }
}
