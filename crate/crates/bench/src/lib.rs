//! Shared inputs for the benchmarks.

use capax_core::published;
use capax_core::RationalMapPF;

/// The reference maps, labelled by example number.
pub fn reference_maps() -> Vec<(String, RationalMapPF)> {
    published::EXAMPLES
        .iter()
        .map(|e| (format!("example{}", e.id), e.map()))
        .collect()
}
