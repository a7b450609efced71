//! Decibel conversions used at the configuration boundary.

use crate::scalar::Scalar;

/// `10^(db / 10)`.
pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Scalar>(linear: T) -> T {
    T::lit(10.0) * linear.log10()
}

/// Power in mW from dBm.
pub fn dbm_to_mw<T: Scalar>(dbm: T) -> T {
    db_to_linear(dbm)
}
