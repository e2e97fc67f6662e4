//! Covering a simplex over a polytope face by sweeping apex paths.

pub mod fan;
pub mod instance;
pub mod map;
pub mod paths;
pub mod retraction;
pub mod robust;
pub mod smooth;

pub use instance::ApexInstance;
pub use map::{boundary_degree, Conclusions, CoverMap, SweepOptions};
pub use paths::{build_apex_paths, check_conditions, ApexPaths};
pub use retraction::{radial_retraction, RadialRetraction};
pub use smooth::{smooth_paths, smooth_within_radius, RadiusSmoothing, Smoothed};
pub use robust::{robustness_radius, Robustness, RobustnessOptions};
pub use fan::{fan_cover, fan_cover_complex, FanCover, FanMap, FanOptions};
