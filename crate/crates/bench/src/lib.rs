//! Fixed inputs shared by the benchmarks.

use unires::channels::random::random_density;
use unires::DensityOperator;

/// A reproducible full-rank pair of the given dimension.
pub fn state_pair(dim: usize) -> (DensityOperator, DensityOperator) {
    let rho = random_density(dim, dim, 1).expect("valid rank");
    let sigma = random_density(dim, dim, 2).expect("valid rank");
    (rho, sigma)
}
