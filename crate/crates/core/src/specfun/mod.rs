//! Complex error function and integer-order Bessel functions of the first
//! kind.

mod bessel;
mod faddeeva;

pub use bessel::{bessel_j, bessel_j_asymptotic, bessel_j_orders};
pub use faddeeva::{erfc_complex, erfcx_complex, faddeeva};
