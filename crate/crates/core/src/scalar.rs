use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};
use serde::Serialize;

/// Floating-point type the evaluation metrics are computed in.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + Default + Send + Sync + Serialize + 'static
{
    fn from_count(count: usize) -> Self {
        Self::from_usize(count).expect("counts are representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
