//! Fixtures shared by the benchmarks.

use kdiam_core::seq::parse;
use kdiam_core::{Config, ExponentSequence, KotheMatrix, Resolution};

pub fn config(n: u64, kmax: u32) -> Config {
    Config::default().with_resolution(Resolution::new(n, kmax))
}

/// `Lambda_1(alpha)` when `finite`, `Lambda_inf(alpha)` otherwise.
pub fn power_series(alpha: &str, finite: bool, n: u64) -> KotheMatrix {
    let a = ExponentSequence::new(parse(alpha).expect("valid exponent"), 2 * n + 2)
        .expect("valid exponent");
    if finite {
        KotheMatrix::power_series_finite(a)
    } else {
        KotheMatrix::power_series_infinite(a)
    }
}
