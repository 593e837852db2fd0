//! Dense complex linear-algebra substrate shared by all other modules.
//!
//! Everything here works on explicit dense matrices. The Hilbert-space
//! dimension is capped at [`DIM_CAP`] (superoperators at `DIM_CAP^2`), which
//! comfortably covers the code spaces this crate targets while keeping the
//! spectral routines exact and simple.

mod expm;
mod spectral;

pub use expm::expm;
pub use spectral::{
    eig, null_space, reduced_resolvent, spectral_projector, SpectralDecomposition,
};

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type CVector = Array1<Complex64>;

/// Hard cap on the Hilbert-space dimension for dense storage.
pub const DIM_CAP: usize = 64;

/// Dense complex matrix with validated (finite) entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    data: Array2<Complex64>,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl CMatrix {
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        for ((i, j), v) in data.indexed_iter() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        Ok(CMatrix { data })
    }

    /// Construct without the finiteness scan; for internal arithmetic whose
    /// inputs were already validated.
    pub(crate) fn from_array(data: Array2<Complex64>) -> Self {
        CMatrix { data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn identity(n: usize) -> Self {
        CMatrix {
            data: Array2::eye(n),
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Array2::zeros((r, c));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimMismatch {
                    context: "row length",
                    got: row.len(),
                    expected: c,
                });
            }
            for (j, v) in row.iter().enumerate() {
                data[[i, j]] = *v;
            }
        }
        CMatrix::new(data)
    }

    /// |ket><bra|
    pub fn outer(ket: &CVector, bra: &CVector) -> Self {
        let n = ket.len();
        let m = bra.len();
        let mut data = Array2::zeros((n, m));
        for i in 0..n {
            for j in 0..m {
                data[[i, j]] = ket[i] * bra[j].conj();
            }
        }
        CMatrix { data }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<Complex64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[[i, j]] = v;
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let mut out = Array2::zeros((self.cols(), self.rows()));
        for ((i, j), v) in self.data.indexed_iter() {
            out[[j, i]] = v.conj();
        }
        CMatrix { data: out }
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            data: self.data.mapv(|v| v.conj()),
        }
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix {
            data: self.data.t().to_owned(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            data: self.data.mapv(|v| v * s),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            data: self.data.dot(&other.data),
        }
    }

    pub fn matvec(&self, v: &CVector) -> CVector {
        self.data.dot(v)
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data + &other.data,
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data - &other.data,
        }
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (ra, ca) = (self.rows(), self.cols());
        let (rb, cb) = (other.rows(), other.cols());
        let mut out = Array2::zeros((ra * rb, ca * cb));
        for ((i, j), a) in self.data.indexed_iter() {
            for ((k, l), b) in other.data.indexed_iter() {
                out[[i * rb + k, j * cb + l]] = a * b;
            }
        }
        CMatrix { data: out }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.cols() {
            let s: f64 = self.data.column(j).iter().map(|v| v.norm()).sum();
            best = best.max(s);
        }
        best
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.sub(&self.dagger()).max_abs() <= tol
    }
}

impl std::ops::Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::add(self, rhs)
    }
}

impl std::ops::Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::sub(self, rhs)
    }
}

impl std::ops::Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Largest singular value; 0 for an empty matrix.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let (_, s, _) = a
        .data()
        .svd(false, false)
        .expect("SVD failed on finite input");
    s.iter().cloned().fold(0.0, f64::max)
}

/// Sum of singular values (trace norm).
pub fn nuclear_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let (_, s, _) = a
        .data()
        .svd(false, false)
        .expect("SVD failed on finite input");
    s.iter().sum()
}

/// Column-stacking vectorization: vec(rho)[i + n*j] = rho[i, j].
pub fn vec_op(rho: &CMatrix) -> CVector {
    let n = rho.rows();
    let m = rho.cols();
    let mut out = Array1::zeros(n * m);
    for j in 0..m {
        for i in 0..n {
            out[i + n * j] = rho.get(i, j);
        }
    }
    out
}

/// Inverse of [`vec_op`] for a square operator on an `n`-dimensional space.
pub fn unvec_op(v: &CVector, n: usize) -> Result<CMatrix> {
    if v.len() != n * n {
        return Err(Error::DimMismatch {
            context: "unvec length",
            got: v.len(),
            expected: n * n,
        });
    }
    let mut out = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            out[[i, j]] = v[i + n * j];
        }
    }
    Ok(CMatrix::from_array(out))
}

/// Classical Gram-Schmidt in list order, with a second orthogonalization
/// pass. Vectors whose residual after projection falls below `drop_tol` are
/// dropped; kept indices are reported.
pub fn gram_schmidt(vectors: &[CVector], drop_tol: f64) -> (Vec<CVector>, Vec<usize>) {
    let mut basis: Vec<CVector> = Vec::new();
    let mut kept = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        // two passes of projection for 1e-12-level orthonormality
        for _ in 0..2 {
            for b in &basis {
                let ov: Complex64 = b.iter().zip(w.iter()).map(|(x, y)| x.conj() * y).sum();
                w = &w - &b.mapv(|x| x * ov);
            }
        }
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < drop_tol {
            continue;
        }
        basis.push(w.mapv(|x| x / cr(norm)));
        kept.push(idx);
    }
    (basis, kept)
}

pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vector_norm(a: &CVector) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Projector sum |b><b| over a basis list.
pub fn projector_onto(basis: &[CVector], dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for b in basis {
        p = p.add(&CMatrix::outer(b, b));
    }
    p
}

/// Certified bounds on the induced superoperator norm
/// `sup_{||X|| = 1} ||Y(X)||` (spectral norm on operators).
///
/// The lower bound evaluates `Y` on matrix units and seeded random unitaries;
/// the upper bound is `sqrt(base_dim) * sigma_max(Y)`, from
/// `||X|| <= ||X||_F <= sqrt(n) ||X||`.
pub fn superop_norm_bound(y: &CMatrix, base_dim: usize, seed: u64) -> Result<(f64, f64)> {
    let d2 = base_dim * base_dim;
    if y.rows() != d2 || y.cols() != d2 {
        return Err(Error::DimMismatch {
            context: "superoperator side",
            got: y.rows(),
            expected: d2,
        });
    }
    let upper = (base_dim as f64).sqrt() * spectral_norm(y);
    let mut lower = 0.0f64;
    let mut probe = |x: &CMatrix| -> Result<()> {
        let nx = spectral_norm(x);
        if nx < 1e-14 {
            return Ok(());
        }
        let out = unvec_op(&y.matvec(&vec_op(x)), base_dim)?;
        lower = lower.max(spectral_norm(&out) / nx);
        Ok(())
    };
    for i in 0..base_dim {
        for j in 0..base_dim {
            let mut e = CMatrix::zeros(base_dim, base_dim);
            e.set(i, j, cr(1.0));
            probe(&e)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16 {
        probe(&random_unitary(base_dim, &mut rng))?;
    }
    Ok((lower, upper.max(lower)))
}

/// Haar-ish unitary from QR of a Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(n);
    for _ in 0..n {
        let v: CVector = Array1::from_iter(
            (0..n).map(|_| c(rng.sample(rand_distr_standard()), rng.sample(rand_distr_standard()))),
        );
        cols.push(v);
    }
    let (ortho, _) = gram_schmidt(&cols, 1e-12);
    // overwhelmingly n vectors survive; regenerate degenerate draws
    if ortho.len() < n {
        return random_unitary(n, rng);
    }
    let mut u = Array2::zeros((n, n));
    for (j, col) in ortho.iter().enumerate() {
        for i in 0..n {
            u[[i, j]] = col[i];
        }
    }
    CMatrix::from_array(u)
}

fn rand_distr_standard() -> rand::distributions::Uniform<f64> {
    rand::distributions::Uniform::new(-1.0, 1.0)
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    let d = rand_distr_standard();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = c(rng.sample(d), rng.sample(d));
        }
    }
    CMatrix::from_array(out)
}

/// Random density matrix (Hermitian, PSD, unit trace).
pub fn random_density(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = random_matrix(n, rng);
    let rho = g.matmul(&g.dagger());
    let tr = rho.trace();
    rho.scale(cr(1.0 / tr.re))
}

pub fn check_square(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

pub fn check_dim_cap(dim: usize) -> Result<()> {
    if dim > DIM_CAP {
        return Err(Error::DimensionCap { dim, cap: DIM_CAP });
    }
    Ok(())
}
