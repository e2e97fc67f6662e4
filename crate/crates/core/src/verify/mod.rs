//! Sampled certification: containment, coverage, winding numbers, jet
//! agreement and sign profiles.

pub mod containment;
pub mod coverage;
pub mod jets;
pub mod report;
pub mod signs;
pub mod winding;

pub use containment::{check_containment, check_points};
pub use coverage::{check_coverage, check_coverage_points, circle_targets, coverage_gaps, CoverageOptions, ImageNet};
pub use jets::{jet_equal, JetComparison};
pub use report::VerificationReport;
pub use signs::{sign_profile, vanishing_order, Sign, SignInterval};
pub use winding::winding_number;
