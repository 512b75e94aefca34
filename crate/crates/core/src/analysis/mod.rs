//! Signal traces, factor detectors and assembly of the prime factorization.

mod detect;
mod factorize;
mod trace;

pub use detect::{
    detect_line_origin, detect_peaks, detect_unit_modulus, detect_zeros, DetectorConfig, FactorReport,
    ReadoutRule, Trial, Verdict,
};
pub use factorize::{assemble_factorization, default_candidates, divisors, gcd, is_prime, PrimePower};
pub use trace::{scan, scan_parallel, sample_grid, Scheme, SignalModel, SignalTrace, TraceSample};
