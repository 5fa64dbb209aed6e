//! Numerical core for PSL(2,C) holonomy degeneration: Mobius algebra,
//! surface-group representations, character-variety path lifting, flat
//! geometry of quadratic differentials, exact cylinder holonomy, and the
//! certified degeneration scenarios.

pub mod charvar;
pub mod cp1;
pub mod degeneration;
pub mod epstein;
pub mod flatgeom;
pub mod h3;
pub mod linalg;
pub mod mobius;
pub mod rng;
pub mod surface_rep;

pub use cp1::{Complex, CP1};
pub use mobius::{AxisResult, GeodesicH3, MobiusClass, MobiusError, MobiusMap};
