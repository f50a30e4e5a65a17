//! Proper scoring rules generated by convex entropies on finite measure spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`measure`]: measure spaces, cone and dual vectors, densities and the pairing.
//! * [`entropy`]: the entropy catalog, subgradient oracles and composite entropies.
//! * [`scoring`]: the entropy-to-score construction and randomized propriety / Euler checks.
//! * [`bregman`]: Bregman divergences, affine scores, rebasing and symmetry classification.
//! * [`geometry`]: polyhedral domains, quasi-interior tests and subdifferential probes.
//! * [`hyvarinen`]: the Hyvärinen score on a periodic grid.
//! * [`cli`]: command implementations for the `propscore` binary.

pub mod bregman;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod hyvarinen;
pub mod measure;
pub mod sampling;
pub mod scoring;

pub use bregman::{bregman_divergence, symmetry_defect, DivergenceReport, SymmetryClass};
pub use entropy::{catalog_entropy, CompositeEntropySpec, Entropy, ScalarFunction};
pub use error::{Error, Result};
pub use geometry::ConvexDomainSpec;
pub use hyvarinen::{fisher_entropy, hyvarinen_divergence, hyvarinen_score, GridDensity, PeriodicGrid};
pub use measure::{normalize, pair, total_mass, ConeVector, Density, DualVector, MeasureSpace};
pub use scoring::{expected_score, make_psr, score_divergence, verify_euler, verify_propriety, ScoringRule};
