//! One-dimensional maps: the two oscillating maps, their extrema and
//! truncations, lap inversion, and the tent family.

mod extrema;
mod maps;
mod tent;

pub use extrema::{depth_extrema, find_extrema, truncated_f, ExtremaTable};
pub(crate) use extrema::truncated_unchecked;
pub use maps::{depth_f, lap_invert, warsaw_f, Map1D};
pub(crate) use maps::{depth_f_unchecked, invert_monotone};
pub use tent::{tent_index, tent_relation, tent_relation_tol, tent_value, TentFamily, DEFAULT_FLOOR};
