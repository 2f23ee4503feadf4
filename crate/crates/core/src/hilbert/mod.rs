//! Truncated Hilbert-cube geometry: points, the weighted product metric,
//! shifts, clouds and Hausdorff distance.

mod cloud;
mod hausdorff;
mod point;

pub use cloud::{Cloud, CloudMeta, TrancheInfo};
pub use hausdorff::{directed_hausdorff, hausdorff, hausdorff_brute, PointIndex};
pub use point::{product_metric, HPoint, COORD_TOL};
pub(crate) use point::metric_slices;

/// Deepest coordinate kept by default; the dropped tail is worth at most 2^-D.
pub const DEFAULT_DIM: usize = 12;
