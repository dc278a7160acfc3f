//! Normal forms of Hopf contractions, their holomorphic vector fields, and
//! numerical evaluation of the Futaki invariant over an equivariant volume.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod futaki;
pub mod fields;
pub mod io;
pub mod linalg;
pub mod normal_form;
pub mod poly;
pub mod resonance;
pub mod sampling;
pub mod volume;

pub use error::{Error, Result};
pub use fields::PolyVectorField;
pub use normal_form::{Eigenvalues, MonomialTerm, NormalFormMap};
pub use volume::EquivariantVolume;
