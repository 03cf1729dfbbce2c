//! Stochastic maps on sorted spectra, their Kraus lift, and CPTP channels.
//!
//! Stochastic matrices are column-stochastic: `sum_i T[i][j] = 1` for every
//! column `j`, so `T` maps probability vectors to probability vectors.

pub mod random;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    c, check_dims, matrix_from_parts, orthonormality_defect, CMatrix, DensityOperator,
    HermitianOperator, SortedSpectrum, UNITARY_TOL,
};

/// Column-sum tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Completeness tolerance for `sum K^dag K = I`.
pub const KRAUS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct StochasticMatrix {
    entries: DMatrix<f64>,
}

impl StochasticMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::EmptyOperator);
        }
        if let Some(x) = entries.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::NotStochastic(format!(
                "entry {x} is not a nonnegative real"
            )));
        }
        for (j, col) in entries.column_iter().enumerate() {
            let s: f64 = col.sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic(format!("column {j} sums to {s}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(r, cols, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    /// Every entry `1 / rows`.
    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self {
            entries: DMatrix::from_element(rows, cols, 1.0 / rows as f64),
        }
    }

    /// Sends input index `j` to output index `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        Self::new(DMatrix::from_fn(
            n,
            n,
            |i, j| if perm[j] == i { 1.0 } else { 0.0 },
        ))
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }
}

/// The induced map on classes: `p^up -> (T p^up)^up`.
pub fn apply_stochastic(t: &StochasticMatrix, p: &SortedSpectrum) -> Result<SortedSpectrum> {
    check_dims(t.cols(), p.len())?;
    let out: Vec<f64> = (0..t.rows())
        .map(|i| (0..t.cols()).map(|j| t.get(i, j) * p.values()[j]).sum())
        .collect();
    SortedSpectrum::from_unsorted(out)
}

/// Operators `K_i` (all `rows x cols`) with `sum_i K_i^dag K_i = I`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "KrausJson", into = "KrausJson")]
pub struct KrausSet {
    operators: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyOperator)?;
        let shape = first.shape();
        if let Some(bad) = operators.iter().find(|k| k.shape() != shape) {
            return Err(Error::DimensionMismatch {
                left: shape.0 * shape.1,
                right: bad.nrows() * bad.ncols(),
            });
        }
        let set = Self { operators };
        let defect = set.completeness_defect();
        if defect > KRAUS_TOL {
            return Err(Error::IncompleteKraus(defect));
        }
        Ok(set)
    }

    pub fn unitary(u: &crate::spectral::UnitaryOperator) -> Self {
        Self {
            operators: vec![u.matrix().clone()],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![CMatrix::identity(dim, dim)],
        }
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.operators[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.operators[0].nrows()
    }

    /// Max entry of `|sum K^dag K - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.input_dim();
        let mut sum = CMatrix::zeros(n, n);
        for k in &self.operators {
            sum += k.adjoint() * k;
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((sum[(i, j)] - c(target)).norm());
            }
        }
        worst
    }

    /// `sum_i K_i X K_i^dag` without renormalization.
    pub fn apply_matrix(&self, x: &CMatrix) -> Result<CMatrix> {
        check_dims(self.input_dim(), x.nrows())?;
        let m = self.output_dim();
        let mut out = CMatrix::zeros(m, m);
        for k in &self.operators {
            out += k * x * k.adjoint();
        }
        Ok(out)
    }
}

/// `rho -> sum_i K_i rho K_i^dag`. The output is clamped onto the state space,
/// which only absorbs rounding since the set is complete.
pub fn apply_cptp(kraus: &KrausSet, rho: &DensityOperator) -> Result<DensityOperator> {
    let out = kraus.apply_matrix(rho.matrix())?;
    DensityOperator::normalized(HermitianOperator::from_symmetrized(out))
}

/// CPTP lift of a stochastic matrix: `K_ij = sqrt(T_ij) |r_i><p_j|` with
/// `|p_j>` the columns of `in_basis` and `|r_i>` the columns of `out_basis`.
///
/// On `sum'_j p_j |p_j><p_j|` it yields `sum_i (T p)_i |r_i><r_i|`. One
/// operator per nonzero entry of `T`; a single operator per output row would
/// not be complete unless `T` is a permutation.
pub fn kraus_from_stochastic(
    t: &StochasticMatrix,
    in_basis: &CMatrix,
    out_basis: &CMatrix,
) -> Result<KrausSet> {
    if in_basis.nrows() != in_basis.ncols() || in_basis.ncols() != t.cols() {
        return Err(Error::DimensionMismatch {
            left: t.cols(),
            right: in_basis.ncols(),
        });
    }
    if out_basis.nrows() != out_basis.ncols() || out_basis.ncols() != t.rows() {
        return Err(Error::DimensionMismatch {
            left: t.rows(),
            right: out_basis.ncols(),
        });
    }
    for basis in [in_basis, out_basis] {
        let defect = orthonormality_defect(basis);
        if defect > UNITARY_TOL {
            return Err(Error::NonOrthonormalBasis(defect));
        }
    }
    let mut ops = Vec::new();
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            let w = t.get(i, j);
            if w > 0.0 {
                let k = out_basis.column(i) * in_basis.column(j).adjoint();
                ops.push(k.scale(w.sqrt()));
            }
        }
    }
    KrausSet::new(ops)
}

/// Wire form of a rectangular matrix. `im` is omitted for real matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_complex(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        Self {
            rows,
            cols,
            re: (0..rows)
                .map(|i| (0..cols).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: Some(
                (0..rows)
                    .map(|i| (0..cols).map(|j| m[(i, j)].im).collect())
                    .collect(),
            ),
        }
    }

    pub fn to_complex(&self) -> Result<CMatrix> {
        Ok(matrix_from_parts(self.rows, self.cols, &self.re, self.im.as_ref())?.0)
    }
}

impl TryFrom<MatrixJson> for StochasticMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        let (m, complex) = matrix_from_parts(j.rows, j.cols, &j.re, j.im.as_ref())?;
        if complex {
            return Err(Error::NotStochastic("imaginary entries".into()));
        }
        StochasticMatrix::new(m.map(|z| z.re))
    }
}

impl From<StochasticMatrix> for MatrixJson {
    fn from(t: StochasticMatrix) -> Self {
        let (rows, cols) = t.entries.shape();
        MatrixJson {
            rows,
            cols,
            re: (0..rows)
                .map(|i| (0..cols).map(|j| t.entries[(i, j)]).collect())
                .collect(),
            im: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct KrausJson {
    operators: Vec<MatrixJson>,
}

impl TryFrom<KrausJson> for KrausSet {
    type Error = Error;
    fn try_from(j: KrausJson) -> Result<Self> {
        let ops = j
            .operators
            .iter()
            .map(MatrixJson::to_complex)
            .collect::<Result<Vec<_>>>()?;
        KrausSet::new(ops)
    }
}

impl From<KrausSet> for KrausJson {
    fn from(k: KrausSet) -> Self {
        KrausJson {
            operators: k.operators.iter().map(MatrixJson::from_complex).collect(),
        }
    }
}
