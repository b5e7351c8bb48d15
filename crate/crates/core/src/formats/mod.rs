//! Reading inputs and writing results.

pub mod attributes;
pub mod geojson;
pub mod svg;
pub mod tables;

pub use attributes::{read_attribute_csv, Dataset};
pub use geojson::{join_geojson, JoinOutcome, LocationRecord};
pub use svg::{render_lattice_svg, Palette, Rgb};
