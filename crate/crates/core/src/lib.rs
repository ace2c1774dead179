//! Discrete maximal operators on uniform grids.
//!
//! The crate evaluates the Hardy-Littlewood maximal function (global and
//! local to a domain) and the bilinear maximal function
//! `M(f, g)(x) = sup_R avg_{B_R} |f(x - alpha y) g(x - y)| dy` on sampled data,
//! together with the discrete Sobolev calculus needed to check pointwise
//! gradient bounds, the derivative formula at good radii, and the behaviour of
//! these operators along weakly or pointwise convergent sequences.
//!
//! ```
//! use hlmax_core::{hl_maximal, Profile, RadiusGrid, UniformGrid};
//!
//! let grid = UniformGrid::interval(-4.0, 4.0, 0.01).unwrap();
//! let chi = Profile::indicator(0.0, 1.0).sample(&grid).unwrap();
//! let radii = RadiusGrid::spanning(&grid, false).unwrap();
//! let m = hl_maximal(&chi, &radii).unwrap();
//! let x = grid.locate(&[2.0]).unwrap();
//! assert!((m.value(x) - 1.0 / 3.0).abs() < 0.01);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod io;
pub mod maximal;
pub mod prefix;
pub mod profile;
pub mod radius;
pub mod sobolev;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{build_grid, interpolate, sample, SampledFunction, UniformGrid};
pub use maximal::{
    ball_average, ball_averages, ball_measure, bilinear_average, bilinear_maximal, bilinear_maximal_with,
    bilinear_signed_average, distance_to_complement, good_radii, hl_maximal, hl_maximal_naive, hl_maximal_with,
    hl_values, hl_values_at, holder_envelope, local_maximal, local_maximal_with, AveragingPath, MaximalField,
    DEFAULT_GOOD_RADII_TOL,
};
pub use prefix::{prefix_table, PrefixTable};
pub use profile::Profile;
pub use radius::RadiusGrid;
pub use sobolev::{
    diff_quotient, dilate, gradient, hausdorff_distance, inner_product, lp_norm, set_distance, sobolev_norm, translate,
    LebesgueExponent, VectorField,
};
pub use verify::{ConvergenceReport, InequalityReport};
