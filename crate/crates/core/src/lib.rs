//! Random iterated function systems: attractors, dimensions, box counts and
//! measure bounds.
//!
//! A [`Rifs`] is a list of deterministic systems on a shared ambient box. A
//! sequence [`OmegaSeq`] picks the system used at each construction level,
//! and [`cylinder_cover`] builds the level-`k` approximation of the attractor
//! `F_ω` together with a Hausdorff-distance certificate.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default); see [`Exec`].

pub mod boxcount;
pub mod carpet;
pub mod dimension;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod hausdorff;
pub mod measure;
pub mod model;
pub mod omega;
pub mod roots;

pub use boxcount::{count_boxes, count_points, estimate_box_dims, BoxDimEstimate, BoxDimOptions};
pub use carpet::CarpetSpec;
pub use dimension::{
    bedford_mcmullen_dimension, carpet_dimension_curve, check_growth_conditions, check_uosc_grid,
    extremal_ss_bounds, minimize_carpet_dimension, random_carpet_dimension,
    randomized_similarity_dimension, similarity_dimension,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use geometry::{AmbientBox, Bbox, ClosedForm, ContractionMap, Point, Side};
pub use hausdorff::hausdorff_distance;
pub use measure::{
    check_msc_grid, cylinder_mass, doubling_constants, hausdorff_upper_bound, mdp_bounds,
    packing_lower_bound, CylinderMeasure, Gauge,
};
pub use model::{
    attractor_points, continuity_probe, cylinder_cover, cylinder_cover_with, CoverOptions,
    CoverSeed, CylinderCover, DeterministicIfs, Rifs,
};
pub use omega::{omega_distance, splice, BernoulliSampler, OmegaSeq, Weights};
