use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real field underlying the complex matrices: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Default comparison tolerance.
    fn default_epsilon() -> Self;
    /// Threshold below which a residual counts as zero when deciding ranks.
    fn rank_tolerance() -> Self;
    /// Eigenvalues closer than this are merged into one eigenspace.
    fn eigen_gap() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }
}

impl Scalar for f64 {
    fn default_epsilon() -> Self {
        1e-9
    }
    fn rank_tolerance() -> Self {
        1e-7
    }
    fn eigen_gap() -> Self {
        1e-6
    }
}

impl Scalar for f32 {
    fn default_epsilon() -> Self {
        1e-4
    }
    fn rank_tolerance() -> Self {
        1e-3
    }
    fn eigen_gap() -> Self {
        1e-3
    }
}
