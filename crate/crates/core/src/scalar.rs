//! Coefficient types the models and samplers are generic over.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A numeric coefficient type usable in QUBO and Ising models.
///
/// Integers give exact energies, which is what the compiler emits. Floats are
/// accepted for models imported from elsewhere, and rationals back the Ising
/// transform where halves and quarters appear.
pub trait Scalar:
    Copy
    + Num
    + Signed
    + PartialOrd
    + AddAssign
    + SubAssign
    + MulAssign
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy view used for Metropolis acceptance probabilities.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Copy
        + Num
        + Signed
        + PartialOrd
        + AddAssign
        + SubAssign
        + MulAssign
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Scalars where division by two and four is exact.
///
/// The Ising transform needs these; running it over plain integers would
/// silently truncate.
pub trait Field: Scalar {}

impl Field for f32 {}
impl Field for f64 {}
impl Field for Ratio<i64> {}
impl Field for Ratio<i128> {}

/// Promotes a small integer constant into any scalar.
pub(crate) fn lift<T: Scalar>(value: i64) -> T {
    T::from_i64(value).expect("integer constant representable in scalar type")
}
