//! Exact computer algebra for star products on the cotangent bundle of a
//! Lie group given by structure constants.
//!
//! The crate implements, fully exactly in the deformation parameter ħ:
//!
//! * the symmetric algebra Sym(𝔤)⊗ℂ with its R′-seminorm family ([`sym`]),
//! * PBW normal ordering and the Lie algebra star product ⋆_𝔤 ([`pbw`]),
//! * representative functions on the group with certified Lie-Taylor
//!   seminorms ([`repfun`]),
//! * the observable algebra Pol(T*G) with the standard-ordered, κ-ordered
//!   and Weyl star products, Laplacian and Neumaier operators and the
//!   standard-ordered quantization map ([`observable`]),
//! * a randomized verification harness for the continuity estimates
//!   ([`estimates`]),
//! * JSON interchange formats for all element types ([`io`]).

pub mod arith;
pub mod error;
pub mod estimates;
pub mod io;
pub mod leibniz;
pub mod lie;
pub mod linalg;
pub mod observable;
pub mod pbw;
pub mod repfun;
pub mod sym;

pub use error::LiestarError;
