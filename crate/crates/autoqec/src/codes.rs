//! Code spaces, intrinsic error sets, the Knill-Laflamme check and the
//! corrupted-code-space construction.

use crate::error::{Error, Result};
use crate::numerics::{
    check_dim_cap, cr, gram_schmidt, inner, projector_onto, spectral_norm, CMatrix, CVector,
};
use ndarray::Array1;

/// Orthonormal codewords |W_mu> embedded in an n-dimensional space.
#[derive(Debug, Clone)]
pub struct CodeSpace {
    ambient_dim: usize,
    codewords: Vec<CVector>,
}

pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Default absolute tolerance on the Knill-Laflamme residual.
pub const KL_DEFAULT_TOL: f64 = 1e-8;

impl CodeSpace {
    pub fn new(ambient_dim: usize, codewords: Vec<CVector>) -> Result<Self> {
        check_dim_cap(ambient_dim)?;
        let mut residual = 0.0f64;
        for (i, w) in codewords.iter().enumerate() {
            if w.len() != ambient_dim {
                return Err(Error::DimMismatch {
                    context: "codeword length",
                    got: w.len(),
                    expected: ambient_dim,
                });
            }
            for (j, v) in codewords.iter().enumerate() {
                let expected = if i == j { cr(1.0) } else { cr(0.0) };
                residual = residual.max((inner(w, v) - expected).norm());
            }
        }
        if residual > ORTHONORMALITY_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(CodeSpace {
            ambient_dim,
            codewords,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Code dimension d.
    pub fn dim(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[CVector] {
        &self.codewords
    }

    /// Pi_C = sum_mu |W_mu><W_mu|
    pub fn projector(&self) -> CMatrix {
        projector_onto(&self.codewords, self.ambient_dim)
    }
}

/// Intrinsic jump operators F_k; the identity element of the error set is
/// implicit.
#[derive(Debug, Clone)]
pub struct ErrorSet {
    jumps: Vec<CMatrix>,
}

impl ErrorSet {
    pub fn new(jumps: Vec<CMatrix>) -> Result<Self> {
        for f in &jumps {
            if !f.is_square() {
                return Err(Error::NonSquare {
                    rows: f.rows(),
                    cols: f.cols(),
                });
            }
            if f.rows() != jumps[0].rows() {
                return Err(Error::DimMismatch {
                    context: "jump operator dimension",
                    got: f.rows(),
                    expected: jumps[0].rows(),
                });
            }
        }
        Ok(ErrorSet { jumps })
    }

    pub fn jumps(&self) -> &[CMatrix] {
        &self.jumps
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// gamma = sum_k ||F_k||^2, the intrinsic dissipation strength.
    pub fn gamma(&self) -> f64 {
        self.jumps.iter().map(|f| spectral_norm(f).powi(2)).sum()
    }
}

/// Result of the Knill-Laflamme check: Pi_C E_l'^dag E_l Pi_C = c_{l'l} Pi_C.
#[derive(Debug, Clone)]
pub struct KLReport {
    pub satisfied: bool,
    /// (N+1)x(N+1), indices over the error set {1, F_1, ..., F_N}.
    pub c: CMatrix,
    /// max_{l',l} || Pi E_l'^dag E_l Pi - c_{l'l} Pi || (spectral norm).
    pub residual: f64,
}

fn apply_to_vector(f: &CMatrix, v: &CVector) -> CVector {
    f.matvec(v)
}

pub fn check_knill_laflamme(code: &CodeSpace, errors: &ErrorSet, tol: f64) -> Result<KLReport> {
    let n = code.ambient_dim();
    for f in errors.jumps() {
        if f.rows() != n {
            return Err(Error::DimMismatch {
                context: "error operator dimension",
                got: f.rows(),
                expected: n,
            });
        }
    }
    let d = code.dim();
    // images E_l |W_mu> for E = {1, F_1..F_N}
    let mut images: Vec<Vec<CVector>> = Vec::with_capacity(errors.len() + 1);
    images.push(code.codewords().to_vec());
    for f in errors.jumps() {
        images.push(code.codewords().iter().map(|w| apply_to_vector(f, w)).collect());
    }
    let ne = images.len();
    let mut c = CMatrix::zeros(ne, ne);
    let mut residual = 0.0f64;
    for lp in 0..ne {
        for l in 0..ne {
            // G_{mu nu} = <W_mu| E_l'^dag E_l |W_nu>
            let mut g = CMatrix::zeros(d, d);
            for mu in 0..d {
                for nu in 0..d {
                    g.set(mu, nu, inner(&images[lp][mu], &images[l][nu]));
                }
            }
            let mean_diag = g.trace() / cr(d as f64);
            c.set(lp, l, mean_diag);
            let dev = g.sub(&CMatrix::identity(d).scale(mean_diag));
            residual = residual.max(spectral_norm(&dev));
        }
    }
    Ok(KLReport {
        satisfied: residual <= tol,
        c,
        residual,
    })
}

/// Per-codeword orthonormal bases {|W_mu>, |W_mu;i>}, the residual basis
/// |phi_p>, and the mu-independent overlap table <W;i|F_k|W>.
#[derive(Debug, Clone)]
pub struct CorruptedStructure {
    pub code: CodeSpace,
    /// error_basis[mu][i-1] = |W_mu;i>, i = 1..m-1
    pub error_basis: Vec<Vec<CVector>>,
    /// dimension m of each corrupted subspace S_mu
    pub m: usize,
    /// orthonormal basis of H - S_ccs
    pub residual_basis: Vec<CVector>,
    /// overlap_table[(i-1, k)] = <W_mu;i|F_k|W_mu> (the same for every mu)
    pub overlap_table: CMatrix,
}

impl CorruptedStructure {
    pub fn ambient_dim(&self) -> usize {
        self.code.ambient_dim()
    }

    /// Full basis of S_mu: {|W_mu>, |W_mu;1>, ..., |W_mu;m-1>}.
    pub fn s_mu_basis(&self, mu: usize) -> Vec<CVector> {
        let mut basis = vec![self.code.codewords()[mu].clone()];
        basis.extend(self.error_basis[mu].iter().cloned());
        basis
    }

    pub fn s_mu_projector(&self, mu: usize) -> CMatrix {
        projector_onto(&self.s_mu_basis(mu), self.ambient_dim())
    }

    /// Projector onto the corrupted code space S_ccs.
    pub fn ccs_projector(&self) -> CMatrix {
        let mut p = CMatrix::zeros(self.ambient_dim(), self.ambient_dim());
        for mu in 0..self.code.dim() {
            p = p.add(&self.s_mu_projector(mu));
        }
        p
    }
}

const MU_INDEPENDENCE_TOL: f64 = 1e-8;

pub fn build_corrupted_structure(
    code: &CodeSpace,
    errors: &ErrorSet,
    drop_tol: f64,
) -> Result<CorruptedStructure> {
    let n = code.ambient_dim();
    let d = code.dim();
    let mut error_basis: Vec<Vec<CVector>> = Vec::with_capacity(d);
    let mut kept_pattern: Option<Vec<usize>> = None;
    for mu in 0..d {
        let w = &code.codewords()[mu];
        // Gram-Schmidt {F_1|W>, ..., F_N|W>} against |W_mu> in list order
        let mut list = vec![w.clone()];
        list.extend(errors.jumps().iter().map(|f| apply_to_vector(f, w)));
        let (basis, kept) = gram_schmidt(&list, drop_tol);
        debug_assert_eq!(kept.first(), Some(&0));
        let kept_tail: Vec<usize> = kept[1..].iter().map(|&i| i - 1).collect();
        match &kept_pattern {
            None => kept_pattern = Some(kept_tail),
            Some(expected) => {
                if *expected != kept_tail {
                    return Err(Error::InconsistentDependency {
                        mu,
                        expected: expected.clone(),
                        got: kept_tail,
                    });
                }
            }
        }
        error_basis.push(basis[1..].to_vec());
    }
    let m = error_basis[0].len() + 1;
    // residual basis: orthonormalize the standard basis against S_ccs
    let mut ccs_vectors: Vec<CVector> = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for mu in 0..d {
        ccs_vectors.push(code.codewords()[mu].clone());
        ccs_vectors.extend(error_basis[mu].iter().cloned());
    }
    let mut completion = ccs_vectors.clone();
    for idx in 0..n {
        let mut e: CVector = Array1::zeros(n);
        e[idx] = cr(1.0);
        completion.push(e);
    }
    let (full_basis, _) = gram_schmidt(&completion, 1e-8);
    let residual_basis: Vec<CVector> = full_basis[ccs_vectors.len()..].to_vec();
    debug_assert_eq!(residual_basis.len(), n - m * d);

    // overlap table, verified mu-independent
    let nk = errors.len();
    let mut overlap_table = CMatrix::zeros(m.saturating_sub(1), nk);
    let mut deviation = 0.0f64;
    #[allow(clippy::needless_range_loop)]
    for mu in 0..d {
        for i in 0..m - 1 {
            for k in 0..nk {
                let ov = inner(
                    &error_basis[mu][i],
                    &apply_to_vector(&errors.jumps()[k], &code.codewords()[mu]),
                );
                if mu == 0 {
                    overlap_table.set(i, k, ov);
                } else {
                    deviation = deviation.max((ov - overlap_table.get(i, k)).norm());
                }
            }
        }
    }
    if deviation > MU_INDEPENDENCE_TOL {
        return Err(Error::MuDependentOverlap { deviation });
    }
    Ok(CorruptedStructure {
        code: code.clone(),
        error_basis,
        m,
        residual_basis,
        overlap_table,
    })
}

/// Names of the codes shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinCode {
    /// 3-bit repetition code against single bit flips.
    Repetition3Bitflip,
    /// Binomial code {(|0>+|4>)/sqrt(2), |2>} against photon loss.
    Binomial042Loss,
    /// Uncorrected physical qubit {|0>, |1>} with photon loss (baseline).
    PhysicalQubitLoss,
}

impl std::str::FromStr for BuiltinCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repetition3_bitflip" => Ok(BuiltinCode::Repetition3Bitflip),
            "binomial_04_2_loss" => Ok(BuiltinCode::Binomial042Loss),
            "physical_qubit_loss" => Ok(BuiltinCode::PhysicalQubitLoss),
            other => Err(Error::UnknownBuiltin(other.to_string())),
        }
    }
}

impl BuiltinCode {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinCode::Repetition3Bitflip => "repetition3_bitflip",
            BuiltinCode::Binomial042Loss => "binomial_04_2_loss",
            BuiltinCode::PhysicalQubitLoss => "physical_qubit_loss",
        }
    }
}

pub fn basis_vector(dim: usize, idx: usize) -> CVector {
    let mut v: CVector = Array1::zeros(dim);
    v[idx] = cr(1.0);
    v
}

/// Truncated annihilation operator on `dim` levels.
pub fn annihilation(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        a.set(k - 1, k, cr((k as f64).sqrt()));
    }
    a
}

fn pauli_x() -> CMatrix {
    CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]]).unwrap()
}

/// X on qubit `k` (0-based) of a 3-qubit register, e.g. X_0 = X (x) I (x) I.
fn x_on_qubit(k: usize) -> CMatrix {
    let factors: Vec<CMatrix> = (0..3)
        .map(|q| if q == k { pauli_x() } else { CMatrix::identity(2) })
        .collect();
    factors[0].kron(&factors[1]).kron(&factors[2])
}

pub fn builtin_code(name: BuiltinCode) -> (CodeSpace, ErrorSet) {
    match name {
        BuiltinCode::Repetition3Bitflip => {
            let code = CodeSpace::new(8, vec![basis_vector(8, 0), basis_vector(8, 7)])
                .expect("builtin repetition code");
            let errors =
                ErrorSet::new((0..3).map(x_on_qubit).collect()).expect("builtin bit flips");
            (code, errors)
        }
        BuiltinCode::Binomial042Loss => {
            let s = cr(1.0 / 2.0f64.sqrt());
            let mut w0: CVector = Array1::zeros(5);
            w0[0] = s;
            w0[4] = s;
            let code =
                CodeSpace::new(5, vec![w0, basis_vector(5, 2)]).expect("builtin binomial code");
            let errors = ErrorSet::new(vec![annihilation(5)]).expect("builtin loss");
            (code, errors)
        }
        BuiltinCode::PhysicalQubitLoss => {
            let code = CodeSpace::new(2, vec![basis_vector(2, 0), basis_vector(2, 1)])
                .expect("builtin physical qubit");
            let errors = ErrorSet::new(vec![annihilation(2)]).expect("builtin loss");
            (code, errors)
        }
    }
}
