//! Geometry engine for embodied graffiti drawing.
//!
//! A 6-DoF device pose stream is turned into stroke centerlines through a
//! virtual nib, cleaned up, optionally pinned to a scanned wall plane, and
//! tessellated into triangle meshes (flat ribbons on the wall, tubes in free
//! space, gravity drips for the drip mop). Strokes are collected into an
//! [`artwork::Artwork`] that serializes to the compact GSTB binary format.

pub mod artwork;
pub mod brush;
pub mod canvas;
pub mod centerline;
pub mod config;
pub mod drip;
pub mod error;
pub mod export;
pub mod mesh;
pub mod pipeline;
pub mod pose;
pub mod rng;

pub use artwork::{Artwork, ArtworkError, PlacementTransform, Stroke};
pub use brush::{BrushParams, SprayFootprint};
pub use canvas::{CanvasPlane, DrawMode};
pub use centerline::Centerline;
pub use drip::DripSeed;
pub use error::{EngineError, LogError};
pub use mesh::TriangleMesh;
pub use pose::{NibOffset, PoseSample, Tool};

pub use nalgebra::Vector3;
