//! Analytical Galerkin double surface integrals of the Laplace kernel
//! `G(x, y) = 1/|x - y|` over pairs of flat triangles.
//!
//! Four integrals are provided for every pair of positively oriented
//! triangles `S_x` (source) and `S_y` (receiver):
//!
//! * `L  = ∫∫ G dS_x dS_y` (single layer)
//! * `M  = ∫∫ n_x·∇_x G dS_x dS_y` (double layer)
//! * `L' = ∫∫ ∇_y G dS_x dS_y` (gradient of the single layer, a vector)
//! * `M' = ∫∫ n_y·∇_y (n_x·∇_x G) dS_x dS_y` (hypersingular)
//!
//! The kernel carries no `1/(4π)` factor.
//!
//! The 4D integral over the product of two standard triangles is reduced
//! face by face with the divergence theorem down to weighted endpoint
//! evaluations of closed-form primitive boundary functions (PBFs).
//!
//! ```
//! use glq_core::{geometry::Triangle, potentials::galerkin_all, Config, Vec3};
//!
//! let s3 = 3f64.sqrt();
//! let tx = Triangle::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.5, s3 / 2.0, 0.0))?;
//! let ty = Triangle::new(
//!     Vec3::new(1.0, 0.0, 1.0),
//!     Vec3::new(0.0, 0.0, 1.0),
//!     Vec3::new(0.5, 0.0, 1.0 + s3 / 2.0),
//! )?;
//! let out = galerkin_all(&tx, &ty, &Config::default())?;
//! assert!((out.l - 0.139757030669707).abs() < 1e-12);
//! # Ok::<(), glq_core::Error>(())
//! ```

pub mod geometry;
pub mod oracle;
pub mod pbf;
pub mod potentials;
pub mod projection;
pub mod reduction;

mod config;
mod error;
mod quadrature;
mod sum;

pub use config::{Config, GsOrder};
pub use error::{Error, Result};
pub use sum::CompensatedSum;

/// 3D vector type used throughout.
pub type Vec3 = nalgebra::Vector3<f64>;
