//! Planar least gradient problems on convex domains, solved constructively:
//! solution level lines are straight chords determined by the boundary data,
//! assembled into nested superlevel sets. The dual free-material-design side
//! (a divergence-free flux with prescribed normal trace) is derived from the
//! same level family by rotating the gradient measure, and everything is
//! cross-checked against a discrete total-variation minimizer.
//!
//! Module map:
//! - [`geometry`]: convex boundaries, arcs, chords, distance-to-arc structure
//! - [`data`]: boundary data, level preimages, tangential derivative measures
//! - [`swz`]: chord-built level families on strictly convex domains with a
//!   free boundary arc
//! - [`rect`]: the rectangle solver and its explicit continuity modulus
//! - [`fmd`]: flux measures, Gauss-Green pairings, potential reconstruction
//! - [`tv`]: raster grids, discrete TV, and the primal-dual minimizer used
//!   as an independent oracle

pub mod data;
pub mod fmd;
pub mod geometry;
pub mod rect;
pub mod swz;
pub mod tv;
