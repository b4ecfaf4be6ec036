//! Fractional mean curvature flow of closed planar curves.
//!
//! The moving boundary is written as a normal graph `x + h(x) nu(x)` over a
//! smooth reference curve. The crate evaluates the nonlocal curvature and the
//! Jacobi linearization on that curve, assembles the exact nonlinear
//! remainders, evolves `h` by a fixed-point implicit scheme and checks the
//! quantitative estimates of the theory numerically.

pub mod config;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod nonlocal;
pub mod norms;
pub mod pde;
pub mod quadrature;
pub mod rhs;
pub mod special;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

/// Points and vectors in the plane.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Rotates a tangent vector a quarter turn clockwise, mapping the tangent of
/// a counter-clockwise curve to its outward normal.
#[inline]
pub fn rot(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}
