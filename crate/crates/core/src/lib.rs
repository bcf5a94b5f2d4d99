//! Affine λ-equidistants of closed regular planar curves.
//!
//! The crate pairs parallel tangents of a generic closed curve, glues the
//! paired arcs into maximal branches (the glueing schemes) and traces every
//! branch of the λ-equidistant, the Wigner caustic (λ = ½) and the Centre
//! Symmetry Set. The `theorems` module turns the structural results about
//! these objects into executable checks.
//!
//! Everything here is `no_std` with `alloc`; IO lives in the companion crate.
#![no_std]
#![forbid(unsafe_code)]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

pub mod curve;
pub mod equidistant;
pub mod fixtures;
pub mod geom;
pub mod gluing;
pub mod parallelism;
pub mod roots;
pub mod settings;
pub mod theorems;

pub use curve::{Curve, CurveError, FourierCurve, Jet};
pub use equidistant::{Branch, CurveAnalysis, EquidistantError};
pub use geom::Vec2;
pub use gluing::{GlueingScheme, LambdaClass};
pub use settings::{Settings, Tolerances};
