//! Eigendecompositions, spectral projectors and the reduced resolvent.

use super::{check_square, cr, CMatrix, CVector};
use crate::error::{Error, Result};
use ndarray_linalg::{Eig, Inverse, SVD};
use num_complex::Complex64;

/// Eigendecomposition A = V diag(lambda) V^{-1}. Rows of `left` are the
/// normalized left eigenvectors w^dagger with w^dagger v = 1.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub right: CMatrix,
    pub left: CMatrix,
}

impl SpectralDecomposition {
    /// || A - V diag(lambda) V^{-1} ||_max, the diagonalizability witness.
    pub fn reconstruction_error(&self, a: &CMatrix) -> f64 {
        self.reconstruct().sub(a).max_abs()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut lam = CMatrix::zeros(n, n);
        for (i, l) in self.eigenvalues.iter().enumerate() {
            lam.set(i, i, *l);
        }
        self.right.matmul(&lam).matmul(&self.left)
    }

    /// Projector onto the eigenspaces selected by `indices`.
    pub fn projector(&self, indices: &[usize]) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut sel = CMatrix::zeros(n, n);
        for &i in indices {
            sel.set(i, i, cr(1.0));
        }
        self.right.matmul(&sel).matmul(&self.left)
    }
}

pub fn eig(a: &CMatrix) -> Result<SpectralDecomposition> {
    check_square(a)?;
    let (vals, vecs) = a.data().eig()?;
    let right = CMatrix::from_array(vecs);
    let left = CMatrix::from_array(right.data().inv()?);
    Ok(SpectralDecomposition {
        eigenvalues: vals.to_vec(),
        right,
        left,
    })
}

/// Orthonormal basis of the numerical right null space: right singular
/// vectors whose singular value falls below `tol`.
pub fn null_space(a: &CMatrix, tol: f64) -> Result<Vec<CVector>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    let (_, s, vt) = a.data().svd(false, true)?;
    let vt = vt.expect("requested V^T");
    let mut basis = Vec::new();
    for (j, &sv) in s.iter().enumerate() {
        if sv < tol {
            basis.push(vt.row(j).mapv(|x| x.conj()));
        }
    }
    // columns of V beyond rank(s) (wide matrices) are exact kernel directions
    for j in s.len()..vt.nrows() {
        basis.push(vt.row(j).mapv(|x| x.conj()));
    }
    Ok(basis)
}

fn default_gap_tol(a: &CMatrix) -> f64 {
    1e-8 * super::spectral_norm(a).max(1.0)
}

/// Spectral (generally non-orthogonal) projector onto the eigenvalue cluster
/// selected by `cluster`. Falls back to long-time propagation `lim e^{tA}`
/// when the cluster sits at zero, the rest of the spectrum is strictly
/// decaying, and the eigenbasis is numerically defective.
pub fn spectral_projector(
    a: &CMatrix,
    cluster: &dyn Fn(Complex64) -> bool,
    gap_tol: Option<f64>,
) -> Result<CMatrix> {
    check_square(a)?;
    let gap_tol = gap_tol.unwrap_or_else(|| default_gap_tol(a));
    let (vals, vecs) = a.data().eig()?;
    let vals: Vec<Complex64> = vals.to_vec();
    let inside: Vec<usize> = (0..vals.len()).filter(|&i| cluster(vals[i])).collect();
    let outside: Vec<usize> = (0..vals.len()).filter(|&i| !cluster(vals[i])).collect();
    for &i in &inside {
        for &j in &outside {
            let sep = (vals[i] - vals[j]).norm();
            if sep < gap_tol {
                return Err(Error::ClusterNotSeparated(format!(
                    "eigenvalues {} (in cluster) and {} (outside) are {sep:.3e} apart, below gap_tol {gap_tol:.3e}",
                    vals[i], vals[j]
                )));
            }
        }
    }
    let recon_tol = 1e-8 * super::spectral_norm(a).max(1.0);
    let mut recon = f64::INFINITY;
    if let Ok(vinv) = vecs.inv() {
        let dec = SpectralDecomposition {
            eigenvalues: vals.clone(),
            right: CMatrix::from_array(vecs),
            left: CMatrix::from_array(vinv),
        };
        recon = dec.reconstruction_error(a);
        if recon <= recon_tol {
            return Ok(dec.projector(&inside));
        }
    }
    // defective case: only the zero cluster of a decaying generator is
    // recoverable, via P = lim e^{tA}
    let zero_cluster = inside.iter().all(|&i| vals[i].norm() <= gap_tol.max(1e-10));
    let decaying = outside.iter().all(|&i| vals[i].re < -gap_tol);
    if zero_cluster && decaying {
        let slowest = outside
            .iter()
            .map(|&i| -vals[i].re)
            .fold(f64::INFINITY, f64::min);
        let t = 50.0 / slowest;
        return super::expm(&a.scale(cr(t)));
    }
    Err(Error::Defective(format!(
        "eigendecomposition reconstruction error {recon:.3e} exceeds {recon_tol:.3e}"
    )))
}

/// Reduced resolvent S of A with respect to the spectral projector P onto
/// the eigenvalue cluster near zero: S A = A S = 1 - P and P S = S P = 0.
/// This is not the Moore-Penrose pseudo-inverse for non-normal A.
pub fn reduced_resolvent(a: &CMatrix, p: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    if p.rows() != a.rows() || p.cols() != a.cols() {
        return Err(Error::DimMismatch {
            context: "projector side",
            got: p.rows(),
            expected: a.rows(),
        });
    }
    let n = a.rows();
    let k = p.trace().re.round() as i64;
    if k < 0 || k as usize > n {
        return Err(Error::InvalidInput(format!(
            "projector trace {} is not a valid cluster size",
            p.trace().re
        )));
    }
    let k = k as usize;
    let dec = eig(a)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        dec.eigenvalues[i]
            .norm()
            .partial_cmp(&dec.eigenvalues[j].norm())
            .unwrap()
    });
    let cluster: Vec<usize> = order[..k].to_vec();
    let complement: Vec<usize> = order[k..].to_vec();
    for &i in &complement {
        if dec.eigenvalues[i].norm() < 1e-12 * super::spectral_norm(a).max(1.0) {
            return Err(Error::SingularComplement(format!(
                "eigenvalue {} outside the zero cluster is numerically singular",
                dec.eigenvalues[i]
            )));
        }
    }
    let mut inv = CMatrix::zeros(n, n);
    for &i in &complement {
        inv.set(i, i, cr(1.0) / dec.eigenvalues[i]);
    }
    let _ = &cluster; // zero block by construction
    let s = dec.right.matmul(&inv).matmul(&dec.left);
    let q = CMatrix::identity(n).sub(p);
    let check = s.matmul(a).sub(&q).max_abs();
    let tol = 1e-7 * super::spectral_norm(a).max(1.0);
    if check > tol {
        return Err(Error::SingularComplement(format!(
            "defining equation S A = 1 - P violated by {check:.3e}"
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, spectral_norm, CMatrix};

    #[test]
    fn null_space_identity_empty() {
        assert!(null_space(&CMatrix::identity(3), 1e-10).unwrap().is_empty());
    }

    #[test]
    fn null_space_diag() {
        let a = CMatrix::from_rows(&[vec![cr(0.0), cr(0.0)], vec![cr(0.0), cr(1.0)]]).unwrap();
        let basis = null_space(&a, 1e-10).unwrap();
        assert_eq!(basis.len(), 1);
        assert!((basis[0][0].norm() - 1.0).abs() < 1e-12);
        assert!(basis[0][1].norm() < 1e-12);
    }

    #[test]
    fn null_space_dissipator_superop() {
        // D(|0><1|) on 2 dims: kernel is spanned by vec(|0><0|).
        // Oracle: eigendecomposition of the explicit 4x4 superoperator.
        let f = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]]).unwrap();
        let sup = crate::lindblad::dissipator_superop(&f, 1.0);
        let basis = null_space(&sup, 1e-10).unwrap();
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        // vec(|0><0|) has support only on index 0
        assert!((v[0].norm() - 1.0).abs() < 1e-10);
        for i in 1..4 {
            assert!(v[i].norm() < 1e-10);
        }
        let dec = eig(&sup).unwrap();
        let zero_count = dec
            .eigenvalues
            .iter()
            .filter(|l| l.norm() < 1e-10)
            .count();
        assert_eq!(zero_count, 1);
    }

    #[test]
    fn projector_diag_cluster() {
        let a = CMatrix::from_rows(&[vec![cr(0.0), cr(0.0)], vec![cr(0.0), cr(5.0)]]).unwrap();
        let p = spectral_projector(&a, &|l| l.norm() < 1.0, None).unwrap();
        assert!(p.get(0, 0).re - 1.0 < 1e-12);
        assert!(p.get(1, 1).norm() < 1e-12);
    }

    #[test]
    fn projector_all_eigenvalues_is_identity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = crate::numerics::random_matrix(5, &mut rng);
        let p = spectral_projector(&a, &|_| true, None).unwrap();
        assert!(p.sub(&CMatrix::identity(5)).max_abs() < 1e-9);
    }

    #[test]
    fn projector_non_normal_two_by_two() {
        // A = [[0,1],[0,3]], cluster {0}: left/right eigenvector formula gives
        // P = [[1, -1/3], [0, 0]]
        let a = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(3.0)]]).unwrap();
        let p = spectral_projector(&a, &|l| l.norm() < 1.0, None).unwrap();
        assert!((p.get(0, 0) - cr(1.0)).norm() < 1e-12);
        assert!((p.get(0, 1) - cr(-1.0 / 3.0)).norm() < 1e-12);
        assert!(p.get(1, 0).norm() < 1e-12);
        assert!(p.get(1, 1).norm() < 1e-12);
        // idempotent and commuting
        assert!(p.matmul(&p).sub(&p).max_abs() < 1e-12);
        assert!(a.matmul(&p).sub(&p.matmul(&a)).max_abs() < 1e-12);
    }

    #[test]
    fn projector_rejects_unseparated_cluster() {
        let a = CMatrix::from_rows(&[vec![cr(0.0), cr(0.0)], vec![cr(0.0), cr(1e-12)]]).unwrap();
        let r = spectral_projector(&a, &|l| l.norm() < 5e-13, None);
        assert!(matches!(r, Err(Error::ClusterNotSeparated(_))));
    }

    #[test]
    fn reduced_resolvent_diagonal() {
        let a = CMatrix::from_rows(&[vec![cr(0.0), cr(0.0)], vec![cr(0.0), cr(-2.0)]]).unwrap();
        let p = CMatrix::from_rows(&[vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(0.0)]]).unwrap();
        let s = reduced_resolvent(&a, &p).unwrap();
        assert!(s.get(0, 0).norm() < 1e-12);
        assert!((s.get(1, 1) - cr(-0.5)).norm() < 1e-12);
    }

    #[test]
    fn reduced_resolvent_invertible_is_inverse() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = crate::numerics::random_matrix(4, &mut rng)
            .add(&CMatrix::identity(4).scale(cr(5.0)));
        let s = reduced_resolvent(&a, &CMatrix::zeros(4, 4)).unwrap();
        assert!(s.matmul(&a).sub(&CMatrix::identity(4)).max_abs() < 1e-9);
    }

    #[test]
    fn reduced_resolvent_non_normal() {
        // Oracle: the defining equations checked by direct multiplication.
        let a = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(3.0)]]).unwrap();
        let p = spectral_projector(&a, &|l| l.norm() < 1.0, None).unwrap();
        let s = reduced_resolvent(&a, &p).unwrap();
        let q = CMatrix::identity(2).sub(&p);
        assert!(s.matmul(&a).sub(&q).max_abs() < 1e-12);
        assert!(a.matmul(&s).sub(&q).max_abs() < 1e-12);
        assert!(p.matmul(&s).max_abs() < 1e-12);
        assert!(s.matmul(&p).max_abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let a = crate::numerics::random_matrix(6, &mut rng);
        let dec = eig(&a).unwrap();
        assert!(dec.reconstruction_error(&a) < 1e-10 * spectral_norm(&a).max(1.0));
    }

    #[test]
    fn fallback_handles_defective_zero_cluster() {
        // Jordan block at -1 plus an exact zero eigenvalue; eigendecomposition
        // is defective but lim e^{tA} recovers the projector onto ker A.
        let a = CMatrix::from_rows(&[
            vec![cr(0.0), cr(0.0), cr(0.0)],
            vec![cr(0.0), cr(-1.0), cr(1.0)],
            vec![cr(0.0), cr(0.0), cr(-1.0)],
        ])
        .unwrap();
        let p = spectral_projector(&a, &|l| l.norm() < 1e-6, None).unwrap();
        assert!((p.get(0, 0) - cr(1.0)).norm() < 1e-8);
        assert!(p.matmul(&p).sub(&p).max_abs() < 1e-8);
        let _ = c(0.0, 0.0);
    }
}
