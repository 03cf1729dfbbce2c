//! Hermitian and density operators, their spectral decompositions, and the
//! algebra of unitary equivalence classes.
//!
//! Two Hermitian operators are equivalent when one is a unitary conjugation of
//! the other. A class is identified with its eigenvalues in non-descending
//! order ([`SortedSpectrum`]); [`sorted_spectrum`] is that identification, and
//! [`class_add`] / [`class_scale`] carry the class operations over to sorted
//! vectors. The witness that equal spectra mean equal classes is
//! [`aligning_unitary`].

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Per-entry tolerance on `A - A^dag` accepted before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed trace deviation of a density operator.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as rounding noise.
pub const CLAMP_TOL: f64 = 1e-12;
/// Max entry of `U^dag U - I` accepted for unitaries and orthonormal bases.
pub const UNITARY_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

// Relative gap below which eigenvalues are grouped as degenerate when
// canonicalizing eigenvectors.
const DEGENERACY_TOL: f64 = 1e-12;
// Entries smaller than this do not fix a column's phase.
const PHASE_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// `U diag(values) U^dag`.
pub(crate) fn spectral_sum(vectors: &CMatrix, values: &[f64]) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    &scaled * vectors.adjoint()
}

/// `(M + M^dag) / 2`.
pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entry of `|M^dag M - I|`.
pub(crate) fn orthonormality_defect(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - c(target)).norm());
        }
    }
    worst
}

#[cfg(test)]
pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Real part of `Tr[A B]` without forming the product.
pub(crate) fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity entrywise at [`HERMITIAN_TOL`] and stores the
    /// symmetrized matrix. The error names the worst offending entry.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyOperator);
        }
        let mut worst = (0, 0, 0.0f64);
        for i in 0..rows {
            for j in i..cols {
                let z = entries[(i, j)];
                let w = entries[(j, i)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
                let dev = (z - w.conj()).norm();
                if dev > worst.2 {
                    worst = (i, j, dev);
                }
            }
        }
        if worst.2 > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                row: worst.0,
                col: worst.1,
                deviation: worst.2,
            });
        }
        Ok(Self {
            entries: symmetrize(&entries),
        })
    }

    /// Symmetrizes without validation; for products that are Hermitian up to
    /// rounding by construction.
    pub(crate) fn from_symmetrized(entries: CMatrix) -> Self {
        Self {
            entries: symmetrize(&entries),
        }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = c(x);
            }
        }
        Self::new(m)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyOperator);
        }
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| c(x)),
        ));
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    /// `V diag(values) V^dag` for a basis with orthonormal columns.
    pub fn from_spectral(values: &[f64], basis: &CMatrix) -> Result<Self> {
        if basis.nrows() != basis.ncols() || basis.ncols() != values.len() {
            return Err(Error::DimensionMismatch {
                left: basis.ncols(),
                right: values.len(),
            });
        }
        let defect = orthonormality_defect(basis);
        if defect > UNITARY_TOL {
            return Err(Error::NonOrthonormalBasis(defect));
        }
        Ok(Self::from_symmetrized(spectral_sum(basis, values)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// `U A U^dag`.
    pub fn conjugate(&self, u: &UnitaryOperator) -> Result<Self> {
        check_dims(self.dim(), u.dim())?;
        Ok(Self::from_symmetrized(u.conjugate_matrix(&self.entries)))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            entries: self.entries.scale(k),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries - &other.entries,
        })
    }

    /// `exp(i s A)`, unitary for any real `s`.
    pub fn exp_i(&self, s: f64) -> UnitaryOperator {
        let eig = eigendecompose(self);
        let mut scaled = eig.vectors.clone();
        for (j, &v) in eig.values.iter().enumerate() {
            let phase = Complex::from_polar(1.0, s * v);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= phase;
            }
        }
        UnitaryOperator {
            entries: &scaled * eig.vectors.adjoint(),
        }
    }
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Eigenvalues in non-descending order with matching orthonormal columns.
///
/// Within a degenerate eigenspace columns are ordered by the row index of
/// their largest-magnitude entry, and every column has its first
/// non-negligible entry rotated onto the positive real axis.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn reconstruct(&self) -> CMatrix {
        spectral_sum(&self.vectors, &self.values)
    }

    /// `V diag(f(values)) V^dag`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        spectral_sum(&self.vectors, &mapped)
    }

    pub fn vector(&self, i: usize) -> nalgebra::DVector<C64> {
        self.vectors.column(i).into_owned()
    }
}

fn argmax_abs(col: nalgebra::DVectorView<'_, C64>) -> usize {
    let mut best = (0, -1.0);
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best.1 + PHASE_TOL {
            best = (i, m);
        }
    }
    best.0
}

pub(crate) fn canonicalize(values: &[f64], vectors: &CMatrix) -> EigenDecomposition {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();

    let scale = sorted.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted[end] - sorted[start] <= DEGENERACY_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by_key(|&col| argmax_abs(vectors.column(col)));
        }
        start = end;
    }

    let mut out = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = vectors.column(src);
        let phase = col
            .iter()
            .find(|z| z.norm() > PHASE_TOL)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(c(1.0));
        for i in 0..n {
            out[(i, dst)] = col[i] * phase;
        }
    }
    EigenDecomposition {
        values: sorted,
        vectors: out,
    }
}

/// Spectral decomposition with deterministic tie-breaking.
pub fn eigendecompose(a: &HermitianOperator) -> EigenDecomposition {
    let eig = SymmetricEigen::new(a.entries.clone());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    canonicalize(&values, &eig.eigenvectors)
}

/// The class representative `f([A])`: eigenvalues in non-descending order.
pub fn sorted_spectrum(a: &HermitianOperator) -> SortedSpectrum {
    SortedSpectrum {
        values: eigendecompose(a).values,
    }
}

/// Singular values of an arbitrary complex matrix, non-descending.
pub fn singular_values(x: &CMatrix) -> Vec<f64> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = x.singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Real vector in non-descending order; the canonical image of an
/// equivalence class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct SortedSpectrum {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    values: Vec<f64>,
}

impl TryFrom<SpectrumJson> for SortedSpectrum {
    type Error = Error;
    fn try_from(j: SpectrumJson) -> Result<Self> {
        SortedSpectrum::new(j.values)
    }
}

impl From<SortedSpectrum> for SpectrumJson {
    fn from(s: SortedSpectrum) -> Self {
        SpectrumJson { values: s.values }
    }
}

impl SortedSpectrum {
    /// Rejects input that is not already non-descending.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Unsorted(i));
        }
        Ok(Self { values })
    }

    /// Sorts arbitrary finite input: `x -> x^up`.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `sum_i p_i^2`.
    pub fn purity(&self) -> f64 {
        self.values.iter().map(|p| p * p).sum()
    }

    /// Checks entries in `[0, 1]` and unit sum, each within `tol`.
    pub fn require_probability(&self, tol: f64) -> Result<()> {
        if let Some(v) = self.values.iter().find(|&&v| v < -tol || v > 1.0 + tol) {
            return Err(Error::NotProbability(format!("entry {v} outside [0, 1]")));
        }
        let s = self.sum();
        if (s - 1.0).abs() > tol {
            return Err(Error::NotProbability(format!("sum is {s}")));
        }
        Ok(())
    }
}

/// `f([A] + [B]) = a^up + b^up`; the sum of sorted vectors is sorted.
pub fn class_add(a: &SortedSpectrum, b: &SortedSpectrum) -> Result<SortedSpectrum> {
    check_dims(a.len(), b.len())?;
    Ok(SortedSpectrum {
        values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(),
    })
}

/// `f(k[A]) = k a^up` for `k >= 0`.
pub fn class_scale(k: f64, a: &SortedSpectrum) -> Result<SortedSpectrum> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::NegativeScale(k));
    }
    Ok(SortedSpectrum {
        values: a.values.iter().map(|x| k * x).collect(),
    })
}

/// `W = sum' |b_i><a_i|`: maps the i-th sorted eigenvector of `a` onto the
/// i-th sorted eigenvector of `b`. `W a W^dag` has `a`'s spectrum in `b`'s
/// eigenbasis.
pub fn aligning_unitary(a: &HermitianOperator, b: &HermitianOperator) -> Result<UnitaryOperator> {
    check_dims(a.dim(), b.dim())?;
    let ea = eigendecompose(a);
    let eb = eigendecompose(b);
    Ok(aligning_from_bases(&ea.vectors, &eb.vectors))
}

pub(crate) fn aligning_from_bases(from: &CMatrix, to: &CMatrix) -> UnitaryOperator {
    UnitaryOperator {
        entries: to * from.adjoint(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    entries: CMatrix,
}

impl UnitaryOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyOperator);
        }
        let defect = orthonormality_defect(&entries);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    /// `U M U^dag`.
    pub fn conjugate_matrix(&self, m: &CMatrix) -> CMatrix {
        &self.entries * m * self.entries.adjoint()
    }

    pub fn unitarity_defect(&self) -> f64 {
        orthonormality_defect(&self.entries)
    }
}

/// Positive semidefinite, unit-trace Hermitian operator. The eigendecomposition
/// is computed once at construction; negative rounding noise is clamped to 0
/// and the spectrum renormalized.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    op: HermitianOperator,
    eig: EigenDecomposition,
}

impl PartialEq for DensityOperator {
    fn eq(&self, other: &Self) -> bool {
        self.op == other.op
    }
}

fn clamp_spectrum(values: &mut [f64]) {
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = values.iter().sum();
    if s > 0.0 {
        for v in values.iter_mut() {
            *v /= s;
        }
    }
}

impl DensityOperator {
    /// Strict constructor: trace within [`TRACE_TOL`], eigenvalues at least
    /// `-CLAMP_TOL`.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let mut eig = eigendecompose(&op);
        let min = eig.values[0];
        if min < -CLAMP_TOL {
            return Err(Error::NotPositive(min));
        }
        clamp_spectrum(&mut eig.values);
        Ok(Self { op, eig })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    /// Projects a Hermitian operator with positive trace onto the state
    /// space: divides by the trace and clamps negative eigenvalues (at most
    /// `1e-6` after normalization). Used for integrator output.
    pub fn normalized(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(tr > 0.0) {
            return Err(Error::InvalidTrace(tr));
        }
        let op = op.scale(1.0 / tr);
        let mut eig = eigendecompose(&op);
        let min = eig.values[0];
        if min < -1e-6 {
            return Err(Error::NotPositive(min));
        }
        if min < 0.0 {
            clamp_spectrum(&mut eig.values);
            let op = HermitianOperator::from_symmetrized(eig.reconstruct());
            return Ok(Self { op, eig });
        }
        clamp_spectrum(&mut eig.values);
        Ok(Self { op, eig })
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::diagonal(probabilities)?)
    }

    /// `|psi><psi|` for a nonzero vector (normalized here).
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v = v.unscale(norm);
        Self::new(HermitianOperator::from_symmetrized(&v * v.adjoint()))
    }

    /// `sum_i p_i |v_i><v_i|` for orthonormal columns `v_i`.
    pub fn from_spectral(probabilities: &[f64], basis: &CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::from_spectral(probabilities, basis)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = vec![1.0 / dim as f64; dim];
        Self::diagonal(&p).expect("maximally mixed state is valid")
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// Clamped probability spectrum `p^up`.
    pub fn spectrum(&self) -> SortedSpectrum {
        SortedSpectrum {
            values: self.eig.values.clone(),
        }
    }

    pub fn purity(&self) -> f64 {
        self.eig.values.iter().map(|p| p * p).sum()
    }

    /// Matrix function on the clamped spectrum.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        self.eig.apply(f)
    }

    pub fn sqrt(&self) -> CMatrix {
        self.eig.apply(f64::sqrt)
    }

    /// `Re Tr[X rho]`.
    pub fn expectation(&self, x: &CMatrix) -> f64 {
        trace_product_re(x, self.matrix())
    }

    /// `U rho U^dag`, reusing the decomposition (`U V` diagonalizes it).
    pub fn conjugate(&self, u: &UnitaryOperator) -> Result<Self> {
        check_dims(self.dim(), u.dim())?;
        let vectors = u.matrix() * &self.eig.vectors;
        let op = HermitianOperator::from_symmetrized(spectral_sum(&vectors, &self.eig.values));
        let eig = canonicalize(&self.eig.values, &vectors);
        Ok(Self { op, eig })
    }

    /// `sum' p_i |v_i><v_i|`: the class of `spectrum` realized in the
    /// orthonormal columns of `basis`.
    pub fn in_basis(spectrum: &SortedSpectrum, basis: &CMatrix) -> Result<Self> {
        Self::from_spectral(spectrum.values(), basis)
    }
}

impl TryFrom<HermitianOperator> for DensityOperator {
    type Error = Error;
    fn try_from(op: HermitianOperator) -> Result<Self> {
        Self::new(op)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.op.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let op = HermitianOperator::deserialize(d)?;
        DensityOperator::new(op).map_err(serde::de::Error::custom)
    }
}

/// Wire form of a square operator: `{"dim": n, "re": [[..]], "im": [[..]]}`.
/// `im` may be omitted for real operators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let re = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { dim: n, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        let im = (!self.im.is_empty()).then_some(&self.im);
        let (m, _) = matrix_from_parts(n, n, &self.re, im)?;
        Ok(m)
    }
}

/// Builds a rows x cols matrix from row-major real/imaginary parts; `im` may
/// be omitted for real matrices. Returns whether any imaginary part was
/// nonzero.
pub(crate) fn matrix_from_parts(
    rows: usize,
    cols: usize,
    re: &[Vec<f64>],
    im: Option<&Vec<Vec<f64>>>,
) -> Result<(CMatrix, bool)> {
    let bad = |what: &str| Error::InvalidArgument(format!("{what} does not match {rows}x{cols}"));
    if re.len() != rows || re.iter().any(|r| r.len() != cols) {
        return Err(bad("re"));
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(bad("im"));
        }
    }
    let mut m = CMatrix::zeros(rows, cols);
    let mut complex = false;
    for i in 0..rows {
        for j in 0..cols {
            let y = im.map(|im| im[i][j]).unwrap_or(0.0);
            complex |= y != 0.0;
            m[(i, j)] = Complex::new(re[i][j], y);
        }
    }
    Ok((m, complex))
}

impl TryFrom<OperatorJson> for HermitianOperator {
    type Error = Error;
    fn try_from(j: OperatorJson) -> Result<Self> {
        HermitianOperator::new(j.to_matrix()?)
    }
}

impl From<HermitianOperator> for OperatorJson {
    fn from(op: HermitianOperator) -> Self {
        OperatorJson::from_matrix(&op.entries)
    }
}
