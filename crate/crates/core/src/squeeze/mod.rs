//! Maps from the compact models onto the closed unit ball, and the
//! stereographic covers.

pub mod radial;
pub mod sandwich;
pub mod stereo;

pub use radial::{radial_poly, ExponentRule, RadialSqueeze};
pub use sandwich::{
    certify_squeeze, cube_to_ball, cylinder_to_ball, prism_to_ball, sandwich_squeeze,
    simplex_to_ball, BallMap, ProfileAttempt, SandwichCertificate,
};
pub use stereo::{ball_double_cover, circle_cover, complex_square, stereographic_inverse};
