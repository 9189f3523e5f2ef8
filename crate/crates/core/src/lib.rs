//! Numerical laboratory for Witten-deformed Laplacians on one-dimensional
//! geometries: deformation profiles, finite-difference operators, spectral
//! solvers, zeta-regularized determinants, analytic torsion, heat traces,
//! and an exact finite-dimensional cochain-complex engine.

pub mod deformation;
pub mod error;
pub mod experiments;
pub mod findim_torsion;
pub mod operator1d;
pub mod spectral;
pub mod torsion_zeta;

pub use deformation::{DeformationProfile, ProfileKind, WittenPotentialPair};
pub use error::Error;
pub use experiments::{ExperimentReport, ReportRow, Verdict, YModel};
pub use findim_torsion::{
    ComparisonMaps, DiscreteGeometry, DiscreteWittenComplex, MetrizedComplex,
    SmallSpectrumProjector,
};
pub use operator1d::{
    BoundaryCondition, BoundarySpec, DegreeBoundaryMap, DiscreteOperator, GeometricBc,
};
pub use spectral::{LogDet, LogDetMethod, SpectrumResult};
pub use torsion_zeta::{HeatTraceSeries, TorsionValue, ZetaSplit};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
