//! Geometry of curves, surfaces, tubes and bands in the round 3-sphere.
//!
//! The crate is organized bottom-up:
//!
//! - [`sphere`], [`vec4`], [`quadrature`]: points, geodesics, ball volumes,
//!   stereographic projection, periodic trapezoidal and Gauss–Legendre rules.
//! - [`immersions`]: parametrized curves and surfaces, curvature frames and
//!   the area, Willmore and Gauss–Bonnet integrals.
//! - [`tubes`]: focal radius, tube volumes and the tube inequality chain.
//! - [`links`]: set distance, linking numbers, convexity probes and the
//!   maximin search over linked loops.
//! - [`bands`]: tube bands and their width by shortest paths.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod error;
pub mod immersions;
pub mod links;
pub mod quadrature;
pub mod sphere;
pub mod tubes;
pub mod vec4;

pub use error::{Error, Result};
pub use quadrature::QuadratureGrid;
pub use sphere::{SpherePoint, TangentVector};
