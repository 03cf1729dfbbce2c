//! Seeded random ensembles: Haar unitaries, Wishart density operators,
//! stochastic matrices and Kraus sets.
//!
//! Every generator has an `rng`-taking form for composing draws inside one
//! trial and a `seed`-taking form for one-shot use. All draws use
//! `ChaCha8Rng`, so output is reproducible across platforms.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{KrausSet, StochasticMatrix};
use crate::error::{Error, Result};
use crate::spectral::{
    CMatrix, DensityOperator, HermitianOperator, SortedSpectrum, UnitaryOperator,
};

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Decorrelated seed for trial `index` of a campaign seeded with `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Entries with independent standard normal real and imaginary parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im)
    })
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryOperator {
    let g = complex_gaussian(rng, dim, dim);
    let (q, r) = g.qr().unpack();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex::new(1.0, 0.0)
        };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    UnitaryOperator::from_unchecked(u)
}

pub fn random_haar_unitary(dim: usize, seed: u64) -> Result<UnitaryOperator> {
    if dim == 0 {
        return Err(Error::EmptyOperator);
    }
    Ok(haar_unitary(&mut rng_from_seed(seed), dim))
}

/// Gaussian Hermitian matrix `(G + G^dag) / 2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let g = complex_gaussian(rng, dim, dim);
    HermitianOperator::from_symmetrized(g)
}

/// Normalized Wishart state `G G^dag / Tr[G G^dag]` with `G` of size
/// `dim x rank`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityOperator> {
    if dim == 0 {
        return Err(Error::EmptyOperator);
    }
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={dim}"
        )));
    }
    let g = complex_gaussian(rng, dim, rank);
    let w = &g * g.adjoint();
    DensityOperator::normalized(HermitianOperator::from_symmetrized(w))
}

pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    density(&mut rng_from_seed(seed), dim, rank)
}

/// Column-normalized absolute Gaussians.
pub fn stochastic<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> Result<StochasticMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyOperator);
    }
    let mut t = DMatrix::<f64>::from_fn(rows, cols, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        x.abs()
    });
    for mut col in t.column_iter_mut() {
        let s: f64 = col.sum();
        col /= s;
    }
    StochasticMatrix::new(t)
}

pub fn random_stochastic(rows: usize, cols: usize, seed: u64) -> Result<StochasticMatrix> {
    stochastic(&mut rng_from_seed(seed), rows, cols)
}

/// `count` Kraus operators `out_dim x in_dim` cut from the first `in_dim`
/// columns of a Haar unitary of size `max(out_dim * count, in_dim)`.
pub fn kraus<R: Rng + ?Sized>(
    rng: &mut R,
    in_dim: usize,
    out_dim: usize,
    count: usize,
) -> Result<KrausSet> {
    if in_dim == 0 || out_dim == 0 || count == 0 {
        return Err(Error::EmptyOperator);
    }
    if out_dim * count < in_dim {
        return Err(Error::InvalidArgument(format!(
            "{count} operators of {out_dim} rows cannot form an isometry on {in_dim} inputs"
        )));
    }
    let big = haar_unitary(rng, out_dim * count);
    let iso = big.matrix().columns(0, in_dim);
    let ops = (0..count)
        .map(|i| iso.rows(i * out_dim, out_dim).into_owned())
        .collect();
    KrausSet::new(ops)
}

/// Uniform draw from the probability simplex (Dirichlet(1, ..., 1)).
pub fn simplex<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / s).collect()
}

/// Sorted probability vector drawn uniformly from the simplex.
pub fn probability_spectrum<R: Rng + ?Sized>(rng: &mut R, len: usize) -> SortedSpectrum {
    SortedSpectrum::from_unsorted(simplex(rng, len)).expect("finite draws")
}

/// Uniform permutation of `0..len`.
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..len).collect();
    p.shuffle(rng);
    p
}
