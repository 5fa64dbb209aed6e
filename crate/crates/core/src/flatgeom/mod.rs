//! Flat geometry of meromorphic quadratic differentials with poles of order
//! at most two: polygon-gluing surfaces, periods, residues, cone angles,
//! cylinder moduli, injectivity radius, cusp classification, and grafting.

pub mod cylinder;
pub mod injectivity;
pub mod polygon;

pub use cylinder::{
    canonical_sign, classify_cusp, composite_modulus_bounds, cylinder_csv_header,
    cylinder_csv_row, graft_period, Cylinder, EndClass, EndDescriptor, ExpandingCylinder,
    FlatCylinder, PoleModel,
};
pub use injectivity::{injectivity_radius_at, unfold_isometries, upper_injectivity_radius};
pub use polygon::{ConePoint, EdgePairing, FlatError, PairingKind, PolygonSurface, UnfoldIso};
