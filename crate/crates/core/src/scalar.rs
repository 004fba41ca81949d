//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the crate is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded) in `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert to the scalar type")
    }

    /// Widens to `f64` for reporting; NaN if the conversion is impossible.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count must convert to the scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Pairwise (cascade) summation. The reduction tree depends only on the length,
/// so results are bitwise reproducible for a given input order.
pub fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        let mut acc = T::zero();
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Three-way sign with a tolerance band around zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    /// Classifies `value`, treating `|value| <= band` as zero.
    pub fn classify<T: Scalar>(value: T, band: T) -> Self {
        if value.abs() <= band {
            Sign::Zero
        } else if value > T::zero() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "-" => Some(Sign::Negative),
            "0" => Some(Sign::Zero),
            "+" => Some(Sign::Positive),
            _ => None,
        }
    }
}

impl Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}
