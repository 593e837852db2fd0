//! Master-equation assembly, dense superoperator construction, propagation
//! and steady states.
//!
//! Vectorization is column-stacking throughout: `vec(A rho B) =
//! (B^T kron A) vec(rho)`. A unit test pins this convention.

use crate::codes::{CodeSpace, ErrorSet};
use crate::error::{Error, Result};
use crate::numerics::{
    check_dim_cap, cr, expm, null_space, unvec_op, vec_op, CMatrix,
};
use ndarray_linalg::Eigh;
use num_complex::Complex64;
use std::sync::OnceLock;

/// D(A) rho = A rho A^dag - (1/2){A^dag A, rho}
pub fn dissipator_apply(a: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    if a.rows() != rho.rows() || a.cols() != rho.cols() || !a.is_square() {
        return Err(Error::DimMismatch {
            context: "dissipator operands",
            got: rho.rows(),
            expected: a.rows(),
        });
    }
    let ad = a.dagger();
    let ada = ad.matmul(a);
    let jump = a.matmul(rho).matmul(&ad);
    let anti = ada.matmul(rho).add(&rho.matmul(&ada)).scale(cr(0.5));
    Ok(jump.sub(&anti))
}

/// Superoperator matrix of `rate * D(F)` in the column-stacking convention.
pub fn dissipator_superop(f: &CMatrix, rate: f64) -> CMatrix {
    let n = f.rows();
    let ftf = f.dagger().matmul(f);
    let eye = CMatrix::identity(n);
    let jump = f.conj().kron(f);
    let anti = eye
        .kron(&ftf)
        .add(&ftf.transpose().kron(&eye))
        .scale(cr(0.5));
    jump.sub(&anti).scale(cr(rate))
}

/// Superoperator matrix of `-i[H, .]`.
pub fn hamiltonian_superop(h: &CMatrix) -> CMatrix {
    let n = h.rows();
    let eye = CMatrix::identity(n);
    eye.kron(h)
        .sub(&h.transpose().kron(&eye))
        .scale(Complex64::new(0.0, -1.0))
}

/// Hamiltonian plus a rated jump list; the dense superoperator matrix is
/// built lazily and cached.
#[derive(Debug)]
pub struct Lindbladian {
    dim: usize,
    hamiltonian: Option<CMatrix>,
    jumps: Vec<(CMatrix, f64)>,
    superop: OnceLock<CMatrix>,
}

impl Lindbladian {
    pub fn new(
        dim: usize,
        hamiltonian: Option<CMatrix>,
        jumps: Vec<(CMatrix, f64)>,
    ) -> Result<Self> {
        check_dim_cap(dim)?;
        if let Some(h) = &hamiltonian {
            if h.rows() != dim || !h.is_square() {
                return Err(Error::DimMismatch {
                    context: "hamiltonian dimension",
                    got: h.rows(),
                    expected: dim,
                });
            }
            if !h.is_hermitian(1e-10) {
                return Err(Error::InvalidInput("hamiltonian is not Hermitian".into()));
            }
        }
        for (f, rate) in &jumps {
            if f.rows() != dim || !f.is_square() {
                return Err(Error::DimMismatch {
                    context: "jump dimension",
                    got: f.rows(),
                    expected: dim,
                });
            }
            if *rate < 0.0 {
                return Err(Error::NegativeRate(*rate));
            }
        }
        Ok(Lindbladian {
            dim,
            hamiltonian,
            jumps,
            superop: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[(CMatrix, f64)] {
        &self.jumps
    }

    pub fn hamiltonian(&self) -> Option<&CMatrix> {
        self.hamiltonian.as_ref()
    }

    pub fn superop(&self) -> &CMatrix {
        self.superop.get_or_init(|| {
            let n = self.dim;
            let mut sup = CMatrix::zeros(n * n, n * n);
            if let Some(h) = &self.hamiltonian {
                sup = sup.add(&hamiltonian_superop(h));
            }
            for (f, rate) in &self.jumps {
                sup = sup.add(&dissipator_superop(f, *rate));
            }
            sup
        })
    }

    /// Direct action L[rho] without going through the superoperator matrix.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        if let Some(h) = &self.hamiltonian {
            let comm = h.matmul(rho).sub(&rho.matmul(h));
            out = out.add(&comm.scale(Complex64::new(0.0, -1.0)));
        }
        for (f, rate) in &self.jumps {
            out = out.add(&dissipator_apply(f, rho)?.scale(cr(*rate)));
        }
        Ok(out)
    }
}

/// Full AutoQEC master equation: engineered jumps at rate `M * gamma`,
/// intrinsic jumps at rate `gamma`. A system Hamiltonian is cancelled by
/// H_eng = -H_sys unless `keep_hamiltonian` asks for the imperfect variant.
pub fn assemble_autoqec(
    errors: &ErrorSet,
    eng: &crate::synthesis::EngineeredDissipation,
    strength: f64,
    gamma: f64,
    h_sys: Option<CMatrix>,
    keep_hamiltonian: bool,
) -> Result<Lindbladian> {
    let dim = if let Some(f) = eng.corrective.first() {
        f.rows()
    } else if let Some(f) = errors.jumps().first() {
        f.rows()
    } else {
        return Err(Error::InvalidInput("no operators to assemble".into()));
    };
    let mut jumps = Vec::new();
    for f in eng.all_jumps() {
        jumps.push((f.clone(), strength * gamma));
    }
    for f in errors.jumps() {
        jumps.push((f.clone(), gamma));
    }
    let hamiltonian = if keep_hamiltonian { h_sys } else { None };
    Lindbladian::new(dim, hamiltonian, jumps)
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    /// max |tr rho(t) - 1| over the grid
    pub max_trace_drift: f64,
    /// most negative eigenvalue seen (positivity is a diagnostic, not a hard
    /// error)
    pub min_eigenvalue: f64,
}

pub const DENSITY_TOL: f64 = 1e-9;

pub fn check_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NonSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    if !rho.is_hermitian(1e-9) {
        return Err(Error::NotDensityMatrix("not Hermitian".into()));
    }
    if (rho.trace().re - 1.0).abs() > 1e-9 || rho.trace().im.abs() > 1e-9 {
        return Err(Error::NotDensityMatrix(format!(
            "trace {} is not 1",
            rho.trace()
        )));
    }
    let min = min_hermitian_eigenvalue(rho);
    if min < -1e-9 {
        return Err(Error::NotDensityMatrix(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

pub fn min_hermitian_eigenvalue(rho: &CMatrix) -> f64 {
    let herm = rho.add(&rho.dagger()).scale(cr(0.5));
    let (vals, _) = herm
        .data()
        .eigh(ndarray_linalg::UPLO::Lower)
        .expect("eigh on Hermitian matrix");
    vals.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn is_uniform_grid(times: &[f64]) -> Option<f64> {
    if times.len() < 3 {
        return None;
    }
    let dt = times[1] - times[0];
    let scale = times.last().unwrap().abs().max(1.0);
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-12 * scale {
            return None;
        }
    }
    Some(dt)
}

/// rho(t) = unvec(e^{t L} vec(rho0)) on the given ascending time grid.
pub fn evolve(lind: &Lindbladian, rho0: &CMatrix, times: &[f64]) -> Result<EvolutionResult> {
    if rho0.rows() != lind.dim() {
        return Err(Error::DimMismatch {
            context: "initial state dimension",
            got: rho0.rows(),
            expected: lind.dim(),
        });
    }
    check_density(rho0)?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| t < 0.0) {
        return Err(Error::InvalidInput(
            "time grid must be ascending and nonnegative".into(),
        ));
    }
    let n = lind.dim();
    let sup = lind.superop();
    let v0 = vec_op(rho0);
    let mut states = Vec::with_capacity(times.len());
    if let Some(dt) = is_uniform_grid(times) {
        // one short-step exponential, then repeated application
        let step = expm(&sup.scale(cr(dt)))?;
        let mut v = if times[0] == 0.0 {
            v0.clone()
        } else {
            expm(&sup.scale(cr(times[0])))?.matvec(&v0)
        };
        for (i, _) in times.iter().enumerate() {
            if i > 0 {
                v = step.matvec(&v);
            }
            states.push(unvec_op(&v, n)?);
        }
    } else {
        for &t in times {
            let v = if t == 0.0 {
                v0.clone()
            } else {
                expm(&sup.scale(cr(t)))?.matvec(&v0)
            };
            states.push(unvec_op(&v, n)?);
        }
    }
    let mut max_trace_drift = 0.0f64;
    let mut min_eigenvalue = f64::INFINITY;
    for rho in &states {
        max_trace_drift = max_trace_drift.max((rho.trace() - cr(1.0)).norm());
        min_eigenvalue = min_eigenvalue.min(min_hermitian_eigenvalue(rho));
    }
    Ok(EvolutionResult {
        times: times.to_vec(),
        states,
        max_trace_drift,
        min_eigenvalue,
    })
}

/// Kernel of the superoperator, returned as (unnormalized) operators.
pub fn steady_states(lind: &Lindbladian, tol: f64) -> Result<Vec<CMatrix>> {
    let basis = null_space(lind.superop(), tol)?;
    basis.iter().map(|v| unvec_op(v, lind.dim())).collect()
}

/// The L0 / L1 / L2 split of the full AutoQEC Lindbladian:
/// L0 = M gamma sum_i D(F_eng,i), L1 = gamma sum_k D(f_k) with f_k = F_k Pi_C,
/// L2 = gamma sum_k (D(F_k) - D(f_k)).
#[derive(Debug, Clone)]
pub struct DecomposedLindbladian {
    pub l0: CMatrix,
    pub l1: CMatrix,
    pub l2: CMatrix,
    pub strength: f64,
    pub gamma: f64,
    pub dim: usize,
}

impl DecomposedLindbladian {
    /// Full superoperator L = L0 + L1 + L2.
    pub fn full(&self) -> CMatrix {
        self.l0.add(&self.l1).add(&self.l2)
    }

    /// Rescaled L_e = sum_i D(F_eng,i) + (1/M) sum_k D(f_k), the unperturbed
    /// generator of the 1/M perturbation series.
    pub fn le_rescaled(&self) -> CMatrix {
        self.l0
            .add(&self.l1)
            .scale(cr(1.0 / (self.strength * self.gamma)))
    }

    /// Rescaled engineered part sum_i D(F_eng,i).
    pub fn l0_rescaled(&self) -> CMatrix {
        self.l0.scale(cr(1.0 / (self.strength * self.gamma)))
    }
}

pub fn decompose(
    code: &CodeSpace,
    errors: &ErrorSet,
    eng: &crate::synthesis::EngineeredDissipation,
    strength: f64,
    gamma: f64,
) -> Result<DecomposedLindbladian> {
    let n = code.ambient_dim();
    let pc = code.projector();
    let mut l0 = CMatrix::zeros(n * n, n * n);
    for f in eng.all_jumps() {
        l0 = l0.add(&dissipator_superop(f, strength * gamma));
    }
    let mut l1 = CMatrix::zeros(n * n, n * n);
    let mut l2 = CMatrix::zeros(n * n, n * n);
    for f in errors.jumps() {
        if f.rows() != n {
            return Err(Error::DimMismatch {
                context: "intrinsic jump dimension",
                got: f.rows(),
                expected: n,
            });
        }
        let fk = f.matmul(&pc);
        l1 = l1.add(&dissipator_superop(&fk, gamma));
        // D(F) - D(f), assembled from the two dissipators' bilinear terms
        l2 = l2.add(&dissipator_superop(f, gamma).sub(&dissipator_superop(&fk, gamma)));
    }
    Ok(DecomposedLindbladian {
        l0,
        l1,
        l2,
        strength,
        gamma,
        dim: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{basis_vector, build_corrupted_structure, builtin_code, BuiltinCode};
    use crate::numerics::{random_density, random_matrix, spectral_norm, CVector};
    use crate::synthesis::{synthesize, PhiPolicy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dissipator_hand_example() {
        // A = |0><1|, rho = |1><1|  ->  |0><0| - |1><1|
        let a = CMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 1));
        let rho = CMatrix::outer(&basis_vector(2, 1), &basis_vector(2, 1));
        let out = dissipator_apply(&a, &rho).unwrap();
        assert!((out.get(0, 0) - cr(1.0)).norm() < 1e-14);
        assert!((out.get(1, 1) - cr(-1.0)).norm() < 1e-14);
    }

    #[test]
    fn dissipator_zero_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = random_matrix(3, &mut rng);
        let out = dissipator_apply(&a, &CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn dissipator_unitary_jump() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = crate::numerics::random_unitary(3, &mut rng);
        let rho = random_density(3, &mut rng);
        let out = dissipator_apply(&u, &rho).unwrap();
        let expected = u.matmul(&rho).matmul(&u.dagger()).sub(&rho);
        assert!(out.sub(&expected).max_abs() < 1e-12);
    }

    #[test]
    fn empty_lindbladian_superop_is_zero() {
        let lind = Lindbladian::new(2, None, vec![]).unwrap();
        assert_eq!(lind.superop().max_abs(), 0.0);
    }

    #[test]
    fn single_decay_superop_eigenvalues() {
        // D(|0><1|) rate 1 on 2 dims has eigenvalues {0, -1/2, -1/2, -1}
        let f = CMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 1));
        let lind = Lindbladian::new(2, None, vec![(f, 1.0)]).unwrap();
        let dec = crate::numerics::eig(lind.superop()).unwrap();
        let mut re: Vec<f64> = dec.eigenvalues.iter().map(|l| l.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-1.0, -0.5, -0.5, 0.0];
        for (got, want) in re.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn superop_matches_direct_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h0 = random_matrix(3, &mut rng);
        let h = h0.add(&h0.dagger()).scale(cr(0.5));
        let f1 = random_matrix(3, &mut rng);
        let f2 = random_matrix(3, &mut rng);
        let lind = Lindbladian::new(3, Some(h), vec![(f1, 0.7), (f2, 1.3)]).unwrap();
        let rho = random_density(3, &mut rng);
        let via_superop = unvec_op(&lind.superop().matvec(&vec_op(&rho)), 3).unwrap();
        let direct = lind.apply(&rho).unwrap();
        assert!(via_superop.sub(&direct).max_abs() < 1e-12);
    }

    #[test]
    fn superop_preserves_trace() {
        // (vec I)^dag L = 0
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h0 = random_matrix(3, &mut rng);
        let h = h0.add(&h0.dagger()).scale(cr(0.5));
        let f = random_matrix(3, &mut rng);
        let lind = Lindbladian::new(3, Some(h), vec![(f, 2.0)]).unwrap();
        let id_vec = vec_op(&CMatrix::identity(3));
        let l = lind.superop();
        for j in 0..9 {
            let s: Complex64 = (0..9).map(|i| id_vec[i].conj() * l.get(i, j)).sum();
            assert!(s.norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_negative_rate() {
        let f = CMatrix::identity(2);
        assert!(Lindbladian::new(2, None, vec![(f, -1.0)]).is_err());
    }

    #[test]
    fn evolve_at_time_zero_returns_input() {
        let f = CMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 1));
        let lind = Lindbladian::new(2, None, vec![(f, 1.0)]).unwrap();
        let rho = CMatrix::outer(&basis_vector(2, 1), &basis_vector(2, 1));
        let result = evolve(&lind, &rho, &[0.0]).unwrap();
        assert!(result.states[0].sub(&rho).max_abs() < 1e-14);
    }

    #[test]
    fn amplitude_damping_population() {
        // pure loss D(a) at rate g: population of |1> decays as e^{-g t}
        let g = 0.8;
        let a = crate::codes::annihilation(2);
        let lind = Lindbladian::new(2, None, vec![(a, g)]).unwrap();
        let rho = CMatrix::outer(&basis_vector(2, 1), &basis_vector(2, 1));
        let times: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let result = evolve(&lind, &rho, &times).unwrap();
        for (t, rho_t) in times.iter().zip(result.states.iter()) {
            let pop = rho_t.get(1, 1).re;
            assert!(
                (pop - (-g * t).exp()).abs() < 1e-10,
                "t={t}: {pop} vs {}",
                (-g * t).exp()
            );
        }
        assert!(result.max_trace_drift < 1e-9);
    }

    #[test]
    fn code_space_dark_without_intrinsic_noise() {
        let (code, errors) = builtin_code(BuiltinCode::Binomial042Loss);
        let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
        let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
        let lind = assemble_autoqec(
            &ErrorSet::new(vec![]).unwrap(),
            &eng,
            100.0,
            1.0,
            None,
            false,
        )
        .unwrap();
        let rho = CMatrix::outer(&code.codewords()[0], &code.codewords()[0]);
        let result = evolve(&lind, &rho, &[0.0, 1.0, 5.0]).unwrap();
        for rho_t in &result.states {
            assert!(rho_t.sub(&rho).max_abs() < 1e-9);
        }
    }

    #[test]
    fn evolution_keeps_density_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_matrix(3, &mut rng);
        let lind = Lindbladian::new(3, None, vec![(f, 1.0)]).unwrap();
        let rho = random_density(3, &mut rng);
        let times: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let result = evolve(&lind, &rho, &times).unwrap();
        assert!(result.max_trace_drift < 1e-9);
        assert!(result.min_eigenvalue > -1e-8);
        for rho_t in &result.states {
            assert!(rho_t.sub(&rho_t.dagger()).max_abs() < 1e-9);
        }
    }

    #[test]
    fn semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let f = random_matrix(3, &mut rng);
        let lind = Lindbladian::new(3, None, vec![(f, 0.5)]).unwrap();
        let rho = random_density(3, &mut rng);
        let r1 = evolve(&lind, &rho, &[0.7]).unwrap();
        let r2 = evolve(&lind, &r1.states[0], &[0.9]).unwrap();
        let direct = evolve(&lind, &rho, &[1.6]).unwrap();
        assert!(r2.states[0].sub(&direct.states[0]).max_abs() < 1e-8);
    }

    #[test]
    fn steady_state_of_single_decay() {
        let f = CMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 1));
        let lind = Lindbladian::new(2, None, vec![(f, 1.0)]).unwrap();
        let kernel = steady_states(&lind, 1e-10).unwrap();
        assert_eq!(kernel.len(), 1);
        let op = &kernel[0];
        assert!((op.get(0, 0).norm() - 1.0).abs() < 1e-10);
        assert!(op.get(1, 1).norm() < 1e-10);
    }

    #[test]
    fn zero_lindbladian_kernel_is_everything() {
        let lind = Lindbladian::new(2, None, vec![]).unwrap();
        assert_eq!(steady_states(&lind, 1e-10).unwrap().len(), 4);
    }

    #[test]
    fn repetition_le_kernel_dimension_is_d_squared() {
        // engineered + f_k parts support d steady states plus d^2 - d
        // stationary phase relations
        let (code, errors) = builtin_code(BuiltinCode::Repetition3Bitflip);
        let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
        let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
        let dec = decompose(&code, &errors, &eng, 1.0, 1.0).unwrap();
        let le = dec.le_rescaled();
        let kernel = null_space(&le, 1e-8).unwrap();
        assert_eq!(kernel.len(), 4);
    }

    #[test]
    fn decompose_sums_to_full_lindbladian() {
        let (code, errors) = builtin_code(BuiltinCode::Binomial042Loss);
        let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
        let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
        let strength = 40.0;
        let dec = decompose(&code, &errors, &eng, strength, 1.0).unwrap();
        let full = assemble_autoqec(&errors, &eng, strength, 1.0, None, false).unwrap();
        assert!(dec.full().sub(full.superop()).max_abs() < 1e-10);
        // action agrees on random states
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let rho = random_density(5, &mut rng);
            let via_parts = unvec_op(&dec.full().matvec(&vec_op(&rho)), 5).unwrap();
            let direct = full.apply(&rho).unwrap();
            assert!(via_parts.sub(&direct).max_abs() < 1e-11);
        }
    }

    #[test]
    fn decompose_f_restricted_action() {
        // f = a Pi_C: f|W_0> = sqrt(2)|3>, f|phi_1> = 0
        let (code, errors) = builtin_code(BuiltinCode::Binomial042Loss);
        let pc = code.projector();
        let f = errors.jumps()[0].matmul(&pc);
        let img = f.matvec(&code.codewords()[0]);
        assert!((img[3].norm() - 2.0f64.sqrt()).abs() < 1e-12);
        let s = cr(1.0 / 2.0f64.sqrt());
        let mut phi: CVector = ndarray::Array1::zeros(5);
        phi[0] = s;
        phi[4] = -s;
        let img = f.matvec(&phi);
        assert!(img.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn decompose_empty_error_set() {
        let (code, errors) = builtin_code(BuiltinCode::Binomial042Loss);
        let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
        let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
        let dec = decompose(&code, &ErrorSet::new(vec![]).unwrap(), &eng, 10.0, 1.0).unwrap();
        assert_eq!(dec.l1.max_abs(), 0.0);
        assert_eq!(dec.l2.max_abs(), 0.0);
    }

    #[test]
    fn collecting_subspace_conditions() {
        // every F in {f_k, F_eng} maps S_mu into itself, and the no-jump sum
        // does not couple S_mu to its complement
        for name in [BuiltinCode::Repetition3Bitflip, BuiltinCode::Binomial042Loss] {
            let (code, errors) = builtin_code(name);
            let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
            let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
            let pc = code.projector();
            let mut family: Vec<CMatrix> =
                errors.jumps().iter().map(|f| f.matmul(&pc)).collect();
            family.extend(eng.all_jumps().into_iter().cloned());
            let n = code.ambient_dim();
            let mut no_jump = CMatrix::zeros(n, n);
            for f in &family {
                no_jump = no_jump.add(&f.dagger().matmul(f));
            }
            for mu in 0..code.dim() {
                let p = cs.s_mu_projector(mu);
                let q = CMatrix::identity(n).sub(&p);
                for f in &family {
                    let res = f.matmul(&p).sub(&p.matmul(f).matmul(&p));
                    assert!(spectral_norm(&res) < 1e-10);
                }
                let res = p.matmul(&no_jump).matmul(&q);
                assert!(spectral_norm(&res) < 1e-10);
            }
        }
    }
}
