//! Sweeps, the reordering oracle, reports and text rendering.

pub mod oracle;
pub mod render;
pub mod report;
pub mod sweep;

pub use oracle::{brute_force_min_width, Constraints, DEFAULT_BUDGET};
pub use render::render_profile;
pub use report::{report_emit, Format};
pub use sweep::{sweep_verify, SweepRow, SweepSpec, SweepSummary};
