//! Finite Waldhausen categories, checked by exhaustive enumeration.
//!
//! Categories are materialized as explicit finite tables ([`fincat`]), either
//! directly or as finite windows of an [`ambient`] category such as pointed
//! finite sets or vector spaces over `F_p` ([`backends`]). On top of those sit
//! morphism classes and lifting problems ([`classes`]), the Waldhausen axiom
//! verifier and derived structures ([`waldhausen`]), opfibrations with their
//! total structures ([`opfib`]), and representations of left rooted quivers
//! ([`quiver`], [`repcat`]).

pub mod ambient;
pub mod backends;
pub mod classes;
pub mod error;
pub mod fincat;
pub mod opfib;
pub mod quiver;
pub mod repcat;
pub mod waldhausen;

pub use error::{Error, ParseError, Result};
pub use fincat::{FinCategory, Functor, MorId, ObjId, PushoutResult};
