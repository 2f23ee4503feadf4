//! Sampled Mahavier-type products: the orbit continua `A_n`, `A` and the
//! tent-relation products `X_n`, their fibers and tranche bases.

mod bases;
mod orbit;
mod product;

pub use bases::{
    degenerate_fraction, profile_bases, hitting_time, longest_gap, predicted_gap, rational_to_f64, slab_boxes,
    slab_diameter, slab_hit, tent_image, tranche_bases, tranche_bases_with,
};
pub use orbit::{orbit, OrbitOptions, OrbitParams};
pub use product::{build_x_n, build_xhat, ProductBuilder, ProductOptions};

use crate::error::{domain, Error, Result};
use crate::hilbert::Cloud;

/// Samples with first coordinate within `delta` of `y`.
pub fn fiber(cloud: &Cloud<f64>, y: f64, delta: f64) -> Result<Cloud<f64>> {
    if !(delta >= 0.0) {
        return domain("delta must be nonnegative");
    }
    cloud
        .filter(|_, p| (p[0] - y).abs() <= delta)
        .map(|c| c.with_label(format!("fiber({}, {y})", cloud.label())))
        .map_err(|_| Error::Range(format!("no samples over {y} at width {delta}")))
}
