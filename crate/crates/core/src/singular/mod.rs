//! Singular points of projective hypersurfaces and the invariants of their
//! germs.

mod germ;
mod search;
mod upoly;

pub use germ::{
    analyze_germ, detect_weights, germ_at, milnor_number, milnor_orlik, GermData, Normalization, Weights,
    MILNOR_LIMIT,
};
pub use search::{is_isolated, singular_points, Isolation, ProjectivePoint, SearchOptions, SingularSearch};
