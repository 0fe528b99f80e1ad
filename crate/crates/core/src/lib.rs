//! Exact multi-tiling certification, Riesz bases of characters, and
//! near-critical sampling sets on elemental locally compact abelian groups
//! G = ℝ^d × ℤ^m × 𝕋^ℓ × F.
//!
//! All group coordinates, interval endpoints, and measures are exact
//! rationals; floating point enters only when characters are finally
//! evaluated and singular values computed.

pub mod error;
pub mod group;
pub mod rat;
pub mod region;
pub mod approx;
pub mod json;
pub mod lift;
pub mod oracle;
pub mod riesz;
pub mod spectrum;
pub mod tiling;

pub use error::{Error, Result};
pub use group::{
    dual_signature, dyadic_cube, dyadic_lattice, haar_measure, pairing, pairing_phase,
    GroupElement, GroupSignature, Lattice,
};
pub use rat::{format_rat, parse_rat, Rat};
pub use region::{Cell, Region};
