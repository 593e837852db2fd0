//! Construction of the engineered jump operators: corrective jumps that pump
//! corrupted states back into the code space, and preventive jumps that empty
//! the residual space into the corrupted code space.

use crate::codes::CorruptedStructure;
use crate::error::{Error, Result};
use crate::numerics::{
    null_space, projector_onto, spectral_norm, vector_norm, CMatrix, CVector,
};

/// How the preventive targets |Phi_p> are chosen.
#[derive(Debug, Clone)]
pub enum PhiPolicy {
    /// Phi_p = |W_0> for every p; always admissible.
    FirstCodeword,
    /// User-supplied targets, one per residual direction; each must lie in
    /// S_ccs.
    Explicit(Vec<CVector>),
    /// No preventive jumps at all (the ablation configuration).
    Zero,
}

#[derive(Debug, Clone)]
pub struct EngineeredDissipation {
    /// m-1 corrective jumps F_eng,i = sum_mu |W_mu><W_mu;i|.
    pub corrective: Vec<CMatrix>,
    /// preventive jumps |Phi_p><phi_p|.
    pub preventive: Vec<CMatrix>,
    /// the chosen |Phi_p> states (empty under [`PhiPolicy::Zero`]).
    pub phi_targets: Vec<CVector>,
}

impl EngineeredDissipation {
    /// Total engineered jump count L = n - m(d-1) - 1 when prevention is on.
    pub fn total(&self) -> usize {
        self.corrective.len() + self.preventive.len()
    }

    pub fn all_jumps(&self) -> Vec<&CMatrix> {
        self.corrective.iter().chain(self.preventive.iter()).collect()
    }
}

const PHI_MEMBERSHIP_TOL: f64 = 1e-8;

pub fn synthesize(cs: &CorruptedStructure, policy: &PhiPolicy) -> Result<EngineeredDissipation> {
    let n = cs.ambient_dim();
    let d = cs.code.dim();
    let mut corrective = Vec::with_capacity(cs.m - 1);
    for i in 0..cs.m - 1 {
        let mut f = CMatrix::zeros(n, n);
        for mu in 0..d {
            f = f.add(&CMatrix::outer(
                &cs.code.codewords()[mu],
                &cs.error_basis[mu][i],
            ));
        }
        corrective.push(f);
    }
    let residual_count = cs.residual_basis.len();
    let phi_targets: Vec<CVector> = match policy {
        PhiPolicy::Zero => Vec::new(),
        PhiPolicy::FirstCodeword => (0..residual_count)
            .map(|_| cs.code.codewords()[0].clone())
            .collect(),
        PhiPolicy::Explicit(targets) => {
            if targets.len() != residual_count {
                return Err(Error::InvalidPhi(format!(
                    "expected {residual_count} preventive targets, got {}",
                    targets.len()
                )));
            }
            let p_ccs = cs.ccs_projector();
            for (p, phi) in targets.iter().enumerate() {
                if phi.len() != n {
                    return Err(Error::DimMismatch {
                        context: "preventive target length",
                        got: phi.len(),
                        expected: n,
                    });
                }
                let norm = vector_norm(phi);
                if norm < 1e-12 {
                    return Err(Error::InvalidPhi(format!("target {p} has zero norm")));
                }
                let leak = vector_norm(&(phi - &p_ccs.matvec(phi))) / norm;
                if leak > PHI_MEMBERSHIP_TOL {
                    return Err(Error::InvalidPhi(format!(
                        "target {p} leaves S_ccs by {leak:.3e}"
                    )));
                }
            }
            targets.clone()
        }
    };
    let preventive: Vec<CMatrix> = phi_targets
        .iter()
        .zip(cs.residual_basis.iter())
        .map(|(phi, residual)| CMatrix::outer(phi, residual))
        .collect();
    Ok(EngineeredDissipation {
        corrective,
        preventive,
        phi_targets,
    })
}

/// Admissibility report for a (possibly user-supplied) preventive jump set.
#[derive(Debug, Clone)]
pub struct PreventiveReport {
    /// per-jump residual of the image condition im(F) inside S_ccs
    pub image_residuals: Vec<f64>,
    pub image_ok: bool,
    /// subspace distance between ker(sum F^dag F) and S_ccs
    pub kernel_residual: f64,
    pub kernel_ok: bool,
}

impl PreventiveReport {
    pub fn passed(&self) -> bool {
        self.image_ok && self.kernel_ok
    }
}

/// Checks the two admissibility conditions on preventive jumps:
/// (a) im(F_i) inside S_ccs, and (b) ker(sum_i F_i^dag F_i) = S_ccs.
pub fn validate_preventive(
    cs: &CorruptedStructure,
    jumps: &[CMatrix],
    tol: f64,
) -> Result<PreventiveReport> {
    let n = cs.ambient_dim();
    let p_ccs = cs.ccs_projector();
    let complement = CMatrix::identity(n).sub(&p_ccs);
    let mut image_residuals = Vec::with_capacity(jumps.len());
    for f in jumps {
        if f.rows() != n || f.cols() != n {
            return Err(Error::DimMismatch {
                context: "preventive jump dimension",
                got: f.rows(),
                expected: n,
            });
        }
        image_residuals.push(spectral_norm(&complement.matmul(f)));
    }
    let image_ok = image_residuals.iter().all(|&r| r <= tol);
    let mut total = CMatrix::zeros(n, n);
    for f in jumps {
        total = total.add(&f.dagger().matmul(f));
    }
    // kernel tolerance scaled by the operator size so tiny rates still count
    let kernel_tol = (tol * spectral_norm(&total)).max(tol);
    let kernel = null_space(&total, kernel_tol)?;
    let p_kernel = projector_onto(&kernel, n);
    let kernel_residual = spectral_norm(&p_kernel.sub(&p_ccs));
    Ok(PreventiveReport {
        image_residuals,
        image_ok,
        kernel_residual,
        kernel_ok: kernel_residual <= tol.max(1e-8),
    })
}
