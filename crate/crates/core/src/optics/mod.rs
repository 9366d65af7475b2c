//! Polarized scalar wave optics of the two-slit apparatus on a 1-D grid.

pub mod aperture;
pub mod config;
pub mod detect;
pub mod field;
pub mod fringes;
pub mod lens;
pub mod pipeline;
pub mod propagate;
pub mod wires;

pub use aperture::make_aperture_field;
pub use config::{Analyzer, ExperimentConfig, OpenSlits, WireSetting};
pub use detect::{detect, DetectionSummary, LensVisibility, D_A, D_B};
pub use field::{Grid, Plane, PolarizedField, PowerLedger, Projection};
pub use fringes::{find_dark_fringes, fringe_visibility, minimum_to_maximum_offsets};
pub use lens::apply_thin_lens;
pub use pipeline::{resolve_wires, run_experiment, ExperimentRun};
pub use propagate::{propagate, propagate_to};
pub use wires::{apply_wire_mask, WireSpec};
