//! Error metrics, fidelity curves, strength-scaling fits, noiseless-subsystem
//! structure, perturbative projector bounds, and the measurement-based
//! recovery cycle used for comparison.

use crate::codes::{basis_vector, CodeSpace, CorruptedStructure, ErrorSet};
use crate::error::{Error, Result};
use crate::lindblad::{
    assemble_autoqec, check_density, dissipator_superop, evolve, DecomposedLindbladian,
    Lindbladian,
};
use crate::numerics::{
    c, cr, eig, expm, inner, null_space, reduced_resolvent, spectral_norm, spectral_projector,
    superop_norm_bound, unvec_op, vec_op, CMatrix, CVector,
};
use crate::synthesis::EngineeredDissipation;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// The six logical states used for fidelity averaging: poles and equator of
/// the logical Bloch sphere.
#[derive(Debug, Clone)]
pub struct CardinalSet {
    states: Vec<CVector>,
}

impl CardinalSet {
    pub fn new(code: &CodeSpace) -> Result<Self> {
        if code.dim() != 2 {
            return Err(Error::InvalidInput(format!(
                "cardinal states are defined for logical qubits, got logical dimension {}",
                code.dim()
            )));
        }
        let w0 = &code.codewords()[0];
        let w1 = &code.codewords()[1];
        let s = cr(1.0 / 2.0f64.sqrt());
        let states = vec![
            w0.clone(),
            w1.clone(),
            (w0 + w1).mapv(|v| v * s),
            (w0 - w1).mapv(|v| v * s),
            (w0 + &w1.mapv(|v| v * c(0.0, 1.0))).mapv(|v| v * s),
            (w0 - &w1.mapv(|v| v * c(0.0, 1.0))).mapv(|v| v * s),
        ];
        Ok(CardinalSet { states })
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }
}

/// Deviation of the evolved state from the initial code state,
/// `|| e^{TL} rho_C - rho_C ||` in spectral norm.
pub fn epsilon_error(
    lind: &Lindbladian,
    code: &CodeSpace,
    rho_c: &CMatrix,
    t: f64,
) -> Result<f64> {
    let pc = code.projector();
    let projected = pc.matmul(rho_c).matmul(&pc);
    let residual = projected.sub(rho_c).max_abs();
    if residual > 1e-10 {
        return Err(Error::NotInCodeSpace { residual });
    }
    check_density(rho_c)?;
    let result = evolve(lind, rho_c, &[t])?;
    Ok(spectral_norm(&result.states[0].sub(rho_c)))
}

/// Mean cardinal-state fidelity <psi| rho(t) |psi> on the given time grid.
pub fn average_fidelity(
    lind: &Lindbladian,
    code: &CodeSpace,
    times: &[f64],
) -> Result<Vec<f64>> {
    let cardinal = CardinalSet::new(code)?;
    let mut sums = vec![0.0; times.len()];
    for psi in cardinal.states() {
        let rho0 = CMatrix::outer(psi, psi);
        let result = evolve(lind, &rho0, times)?;
        for (k, rho_t) in result.states.iter().enumerate() {
            let projected = rho_t.matvec(psi);
            sums[k] += inner(psi, &projected).re;
        }
    }
    Ok(sums.iter().map(|s| s / 6.0).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub m_values: Vec<f64>,
    /// worst-case cardinal-state error at each strength
    pub epsilons: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// rms residual of the log-log fit
    pub fit_residual: f64,
    /// number of points in the asymptotic tail actually fitted
    pub points_used: usize,
}

/// Log-log fit of the worst-case cardinal error against the engineered
/// strength. Points with error above 0.1 are outside the asymptotic regime
/// and are dropped before fitting.
pub fn scaling_fit(
    code: &CodeSpace,
    errors: &ErrorSet,
    eng: &EngineeredDissipation,
    t: f64,
    m_list: &[f64],
    gamma: f64,
) -> Result<ScalingReport> {
    if m_list.len() < 4 {
        return Err(Error::InvalidInput(
            "need at least 4 strength values for a scaling fit".into(),
        ));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) || m_list[0] <= 0.0 {
        return Err(Error::InvalidInput(
            "strength values must be positive and strictly increasing".into(),
        ));
    }
    if m_list.last().unwrap() / m_list[0] < 10.0 {
        return Err(Error::InvalidInput(
            "strength values must span at least one decade".into(),
        ));
    }
    let cardinal = CardinalSet::new(code)?;
    let epsilons: Vec<f64> = m_list
        .par_iter()
        .map(|&m| -> Result<f64> {
            let lind = assemble_autoqec(errors, eng, m, gamma, None, false)?;
            let mut worst = 0.0f64;
            for psi in cardinal.states() {
                let rho0 = CMatrix::outer(psi, psi);
                worst = worst.max(epsilon_error(&lind, code, &rho0, t)?);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let pts: Vec<(f64, f64)> = m_list
        .iter()
        .zip(epsilons.iter())
        .filter(|(_, &e)| e > 1e-12 && e <= 0.1)
        .map(|(&m, &e)| (m.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::NothingToFit("all errors below threshold or outside the fit window".into()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let fit_residual = (pts
        .iter()
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ScalingReport {
        m_values: m_list.to_vec(),
        epsilons,
        slope,
        intercept,
        fit_residual,
        points_used: pts.len(),
    })
}

/// Unitary swapping the S_0 block onto the S_mu block (basis vector by basis
/// vector), acting as identity on residual directions and on every other
/// S_nu.
pub fn intertwiner(cs: &CorruptedStructure, mu: usize) -> Result<CMatrix> {
    let d = cs.code.dim();
    if mu >= d {
        return Err(Error::IndexOutOfRange { index: mu, limit: d });
    }
    let n = cs.ambient_dim();
    let mut u = CMatrix::zeros(n, n);
    let b0 = cs.s_mu_basis(0);
    let bm = cs.s_mu_basis(mu);
    for (v0, vm) in b0.iter().zip(bm.iter()) {
        u = u.add(&CMatrix::outer(vm, v0));
        if mu != 0 {
            u = u.add(&CMatrix::outer(v0, vm));
        }
    }
    for nu in 0..d {
        if nu == 0 || nu == mu {
            continue;
        }
        for v in cs.s_mu_basis(nu) {
            u = u.add(&CMatrix::outer(&v, &v));
        }
    }
    for phi in &cs.residual_basis {
        u = u.add(&CMatrix::outer(phi, phi));
    }
    Ok(u)
}

/// Residual || L_e[Omega_st] || for Omega_st = sum_{mu,nu} omega_{mu,nu}
/// U_mu rho_{0,st} U_nu^dag, where rho_{0,st} is the steady state of L_e
/// restricted to S_0. A small residual certifies the noiseless-subsystem
/// structure.
pub fn noiseless_subsystem_check(
    cs: &CorruptedStructure,
    eng: &EngineeredDissipation,
    errors: &ErrorSet,
    omega: &CMatrix,
) -> Result<f64> {
    let d = cs.code.dim();
    if omega.rows() != d {
        return Err(Error::DimMismatch {
            context: "logical density matrix dimension",
            got: omega.rows(),
            expected: d,
        });
    }
    check_density(omega)?;
    let n = cs.ambient_dim();
    let pc = cs.code.projector();
    let mut family: Vec<CMatrix> = errors.jumps().iter().map(|f| f.matmul(&pc)).collect();
    family.extend(eng.all_jumps().into_iter().cloned());
    let mut le = CMatrix::zeros(n * n, n * n);
    for f in &family {
        le = le.add(&dissipator_superop(f, 1.0));
    }

    // restrict L_e to operators on S_0 (exact: S_0 is invariant)
    let b0 = cs.s_mu_basis(0);
    let m = b0.len();
    let mut restricted = CMatrix::zeros(m * m, m * m);
    for k in 0..m {
        for l in 0..m {
            let rho = CMatrix::outer(&b0[k], &b0[l]);
            let image = unvec_op(&le.matvec(&vec_op(&rho)), n)?;
            for i in 0..m {
                for j in 0..m {
                    let val = inner(&b0[i], &image.matvec(&b0[j]));
                    restricted.set(i + m * j, k + m * l, val);
                }
            }
        }
    }
    let kernel = null_space(&restricted, 1e-10)?;
    if kernel.len() != 1 {
        return Err(Error::NonUniqueSteadyState(kernel.len()));
    }
    let mut rho0 = unvec_op(&kernel[0], m)?;
    rho0 = rho0.add(&rho0.dagger()).scale(cr(0.5));
    let tr = rho0.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::NonUniqueSteadyState(0));
    }
    rho0 = rho0.scale(cr(1.0) / tr);
    // embed into the full space
    let mut rho0_full = CMatrix::zeros(n, n);
    for i in 0..m {
        for j in 0..m {
            rho0_full = rho0_full.add(&CMatrix::outer(&b0[i], &b0[j]).scale(rho0.get(i, j)));
        }
    }

    let intertwiners: Vec<CMatrix> = (0..d).map(|mu| intertwiner(cs, mu)).collect::<Result<_>>()?;
    let mut omega_st = CMatrix::zeros(n, n);
    for mu in 0..d {
        for nu in 0..d {
            let term = intertwiners[mu]
                .matmul(&rho0_full)
                .matmul(&intertwiners[nu].dagger());
            omega_st = omega_st.add(&term.scale(omega.get(mu, nu)));
        }
    }
    let image = unvec_op(&le.matvec(&vec_op(&omega_st)), n)?;
    Ok(spectral_norm(&image))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// norm interval for P_e - P_C
    pub projector_distance: (f64, f64),
    /// norm interval for P_e L2 P_e
    pub pe_l2_pe: (f64, f64),
    /// || P_C L2 P_C ||, expected to vanish identically
    pub pc_l2_pc: f64,
    /// smallest nonzero decay rate of the rescaled L_e
    pub spectral_gap: f64,
    /// norm interval for the reduced resolvent of the rescaled L_e
    pub tau: (f64, f64),
}

const ZERO_CLUSTER_TOL: f64 = 1e-6;

/// Projector and resolvent bounds controlling the strength expansion:
/// P_C from the engineered part alone, P_e from the full rescaled L_e,
/// L2 the leakage part that is invisible from the code space.
pub fn perturbation_bounds(decomp: &DecomposedLindbladian, seed: u64) -> Result<BoundReport> {
    if decomp.strength <= 0.0 {
        return Err(Error::InvalidInput(
            "engineered strength must be positive".into(),
        ));
    }
    let dim = decomp.dim;
    let l0r = decomp.l0_rescaled();
    let ler = decomp.le_rescaled();
    let in_zero = |z: Complex64| z.norm() < ZERO_CLUSTER_TOL;
    let p_c = spectral_projector(&l0r, &in_zero, None)?;
    let p_e = spectral_projector(&ler, &in_zero, None)?;
    let pc_l2_pc = spectral_norm(&p_c.matmul(&decomp.l2).matmul(&p_c));
    let projector_distance = superop_norm_bound(&p_e.sub(&p_c), dim, seed)?;
    let pe_l2_pe = superop_norm_bound(&p_e.matmul(&decomp.l2).matmul(&p_e), dim, seed)?;
    let dec = eig(&ler)?;
    let spectral_gap = dec
        .eigenvalues
        .iter()
        .filter(|z| z.norm() >= ZERO_CLUSTER_TOL)
        .map(|z| z.re.abs())
        .fold(f64::INFINITY, f64::min);
    let s = reduced_resolvent(&ler, &p_e)?;
    let tau = superop_norm_bound(&s, dim, seed)?;
    Ok(BoundReport {
        projector_distance,
        pe_l2_pe,
        pc_l2_pc,
        spectral_gap,
        tau,
    })
}

/// One cycle of parity-measurement recovery for the 5-level loss code:
/// free decay for the waiting time, parity measurement, then the corrective
/// (odd outcome) or coherence-undoing (even outcome) unitary.
/// Returns (U1, U2, cycle superoperator).
pub fn measurement_based_recovery(
    code: &CodeSpace,
    gamma_dt: f64,
) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let (reference, _) = crate::codes::builtin_code(crate::codes::BuiltinCode::Binomial042Loss);
    if code.ambient_dim() != 5 || code.dim() != 2 {
        return Err(Error::InvalidInput(
            "measurement-based recovery is defined for the 5-level loss code".into(),
        ));
    }
    for (a, b) in code.codewords().iter().zip(reference.codewords().iter()) {
        if (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max) > 1e-12 {
            return Err(Error::InvalidInput(
                "measurement-based recovery is defined for the 5-level loss code".into(),
            ));
        }
    }
    if !(0.0..1.0).contains(&gamma_dt) {
        return Err(Error::InvalidInput(format!(
            "waiting angle {gamma_dt} outside [0, 1)"
        )));
    }
    let s = cr(1.0 / 2.0f64.sqrt());
    let e: Vec<CVector> = (0..5).map(|i| basis_vector(5, i)).collect();
    let w0: CVector = (&e[0] + &e[4]).mapv(|v| v * s);
    let phi1: CVector = (&e[0] - &e[4]).mapv(|v| v * s);

    let u1 = CMatrix::outer(&w0, &e[3])
        .add(&CMatrix::outer(&e[3], &w0))
        .add(&CMatrix::outer(&e[2], &e[1]))
        .add(&CMatrix::outer(&e[1], &e[2]))
        .add(&CMatrix::outer(&phi1, &phi1));

    let (cos, sin) = (cr(gamma_dt.cos()), cr(gamma_dt.sin()));
    let u2 = CMatrix::outer(&w0, &w0)
        .add(&CMatrix::outer(&phi1, &phi1))
        .scale(cos)
        .add(
            &CMatrix::outer(&w0, &phi1)
                .sub(&CMatrix::outer(&phi1, &w0))
                .scale(sin),
        )
        .add(&CMatrix::outer(&e[1], &e[1]))
        .add(&CMatrix::outer(&e[3], &e[3]))
        .add(&CMatrix::outer(&e[2], &e[2]));

    let p_odd = CMatrix::outer(&e[1], &e[1]).add(&CMatrix::outer(&e[3], &e[3]));
    let p_even = CMatrix::identity(5).sub(&p_odd);
    let k_odd = u1.matmul(&p_odd);
    let k_even = u2.matmul(&p_even);
    let measure = k_odd
        .conj()
        .kron(&k_odd)
        .add(&k_even.conj().kron(&k_even));
    let decay = expm(&dissipator_superop(&crate::codes::annihilation(5), gamma_dt))?;
    let channel = measure.matmul(&decay);
    Ok((u1, u2, channel))
}

/// Apply a vectorized channel/generator image to a density matrix.
pub fn apply_superop(superop: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    unvec_op(&superop.matvec(&vec_op(rho)), rho.rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_corrupted_structure, builtin_code, BuiltinCode};
    use crate::lindblad::decompose;
    use crate::numerics::{random_density, vector_norm};
    use crate::synthesis::{synthesize, PhiPolicy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binomial_system() -> (CodeSpace, ErrorSet, EngineeredDissipation, CorruptedStructure) {
        let (code, errors) = builtin_code(BuiltinCode::Binomial042Loss);
        let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
        let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
        (code, errors, eng, cs)
    }

    #[test]
    fn cardinal_states_unit_norm_and_count() {
        let (code, _) = builtin_code(BuiltinCode::Binomial042Loss);
        let set = CardinalSet::new(&code).unwrap();
        assert_eq!(set.states().len(), 6);
        for psi in set.states() {
            assert!((vector_norm(psi) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cardinal_needs_logical_qubit() {
        let code = CodeSpace::new(3, vec![basis_vector(3, 0)]).unwrap();
        assert!(CardinalSet::new(&code).is_err());
    }

    #[test]
    fn epsilon_zero_at_time_zero() {
        let (code, errors, eng, _) = binomial_system();
        let lind = assemble_autoqec(&errors, &eng, 10.0, 1.0, None, false).unwrap();
        let rho = CMatrix::outer(&code.codewords()[0], &code.codewords()[0]);
        assert!(epsilon_error(&lind, &code, &rho, 0.0).unwrap() < 1e-14);
    }

    #[test]
    fn epsilon_dark_code_space_without_noise() {
        let (code, _, eng, _) = binomial_system();
        let empty = ErrorSet::new(vec![]).unwrap();
        let lind = assemble_autoqec(&empty, &eng, 100.0, 1.0, None, false).unwrap();
        let rho = CMatrix::outer(&code.codewords()[1], &code.codewords()[1]);
        for t in [0.5, 3.0, 10.0] {
            assert!(epsilon_error(&lind, &code, &rho, t).unwrap() < 1e-9);
        }
    }

    #[test]
    fn epsilon_rejects_states_outside_code_space() {
        let (code, errors, eng, _) = binomial_system();
        let lind = assemble_autoqec(&errors, &eng, 10.0, 1.0, None, false).unwrap();
        let rho = CMatrix::outer(&basis_vector(5, 1), &basis_vector(5, 1));
        assert!(matches!(
            epsilon_error(&lind, &code, &rho, 1.0),
            Err(Error::NotInCodeSpace { .. })
        ));
    }

    #[test]
    fn epsilon_halves_when_strength_doubles() {
        let (code, errors, eng, _) = binomial_system();
        let rho = CMatrix::outer(&code.codewords()[0], &code.codewords()[0]);
        let t = 0.5;
        let eps100 = {
            let lind = assemble_autoqec(&errors, &eng, 100.0, 1.0, None, false).unwrap();
            epsilon_error(&lind, &code, &rho, t).unwrap()
        };
        let eps200 = {
            let lind = assemble_autoqec(&errors, &eng, 200.0, 1.0, None, false).unwrap();
            epsilon_error(&lind, &code, &rho, t).unwrap()
        };
        let ratio = eps100 / eps200;
        assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn epsilon_nondecreasing_in_time() {
        let (code, errors, eng, _) = binomial_system();
        let lind = assemble_autoqec(&errors, &eng, 50.0, 1.0, None, false).unwrap();
        let rho = CMatrix::outer(&code.codewords()[0], &code.codewords()[0]);
        let mut last = 0.0;
        for i in 0..10 {
            let eps = epsilon_error(&lind, &code, &rho, 0.3 * i as f64).unwrap();
            assert!(eps >= last - 1e-9, "dip at step {i}: {eps} < {last}");
            last = eps;
        }
    }

    #[test]
    fn average_fidelity_starts_at_one() {
        let (code, errors, eng, _) = binomial_system();
        let lind = assemble_autoqec(&errors, &eng, 10.0, 1.0, None, false).unwrap();
        let curve = average_fidelity(&lind, &code, &[0.0, 0.5]).unwrap();
        assert!((curve[0] - 1.0).abs() < 1e-12);
        assert!(curve[1] < 1.0);
    }

    #[test]
    fn physical_qubit_matches_closed_form() {
        // amplitude damping: Kraus K0 = diag(1, eta), K1 = sqrt(p)|0><1|,
        // eta = e^{-gamma t / 2}; averaging over the six cardinal states gives
        // [1 + eta^2 + 4((1+eta)^2/4 + p/4)] / 6
        let (code, errors) = builtin_code(BuiltinCode::PhysicalQubitLoss);
        let lind = Lindbladian::new(2, None, vec![(errors.jumps()[0].clone(), 1.0)]).unwrap();
        let times: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let curve = average_fidelity(&lind, &code, &times).unwrap();
        for (t, f) in times.iter().zip(curve.iter()) {
            let eta = (-t / 2.0).exp();
            let p = 1.0 - eta * eta;
            let expected = (1.0 + eta * eta + 4.0 * ((1.0 + eta).powi(2) / 4.0 + p / 4.0)) / 6.0;
            assert!((f - expected).abs() < 1e-9, "t={t}: {f} vs {expected}");
        }
        // monotone nonincreasing
        for w in curve.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn protected_curve_beats_physical_qubit() {
        let (code, errors, eng, _) = binomial_system();
        let lind = assemble_autoqec(&errors, &eng, 1000.0, 1.0, None, false).unwrap();
        let times: Vec<f64> = (0..26).map(|i| i as f64 * 0.2).collect();
        let curve = average_fidelity(&lind, &code, &times).unwrap();
        let (qubit_code, qubit_errors) = builtin_code(BuiltinCode::PhysicalQubitLoss);
        let baseline_lind =
            Lindbladian::new(2, None, vec![(qubit_errors.jumps()[0].clone(), 1.0)]).unwrap();
        let baseline = average_fidelity(&baseline_lind, &qubit_code, &times).unwrap();
        for (i, t) in times.iter().enumerate() {
            if *t >= 0.2 {
                assert!(curve[i] > baseline[i], "t={t}: {} <= {}", curve[i], baseline[i]);
            }
        }
    }

    #[test]
    fn scaling_slope_near_minus_one() {
        let (code, errors, eng, _) = binomial_system();
        let report = scaling_fit(
            &code,
            &errors,
            &eng,
            1.0,
            &[50.0, 100.0, 200.0, 400.0, 800.0],
            1.0,
        )
        .unwrap();
        assert!(
            (-1.15..=-0.85).contains(&report.slope),
            "slope {}",
            report.slope
        );
        assert!(report.points_used >= 4);
    }

    #[test]
    fn scaling_without_noise_has_nothing_to_fit() {
        let (code, errors, eng, _) = binomial_system();
        let result = scaling_fit(
            &code,
            &errors,
            &eng,
            1.0,
            &[50.0, 100.0, 200.0, 400.0, 800.0],
            0.0,
        );
        assert!(matches!(result, Err(Error::NothingToFit(_))));
    }

    #[test]
    fn scaling_rejects_narrow_grids() {
        let (code, errors, eng, _) = binomial_system();
        assert!(scaling_fit(&code, &errors, &eng, 1.0, &[50.0, 60.0, 70.0, 80.0], 1.0).is_err());
        assert!(scaling_fit(&code, &errors, &eng, 1.0, &[50.0, 100.0, 800.0], 1.0).is_err());
    }

    #[test]
    fn intertwiner_zero_is_identity() {
        let (_, _, _, cs) = binomial_system();
        let u0 = intertwiner(&cs, 0).unwrap();
        assert!(u0.sub(&CMatrix::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn intertwiner_is_self_inverse_unitary() {
        let (_, _, _, cs) = binomial_system();
        let u = intertwiner(&cs, 1).unwrap();
        assert!(u.matmul(&u).sub(&CMatrix::identity(5)).max_abs() < 1e-12);
        assert!(u.matmul(&u.dagger()).sub(&CMatrix::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn intertwiner_swaps_binomial_codewords() {
        let (code, _, _, cs) = binomial_system();
        let u = intertwiner(&cs, 1).unwrap();
        // W0 <-> W1 = |2>, |3> <-> |1>, fixes (|0> - |4>)/sqrt(2)
        let w0 = &code.codewords()[0];
        let w1 = &code.codewords()[1];
        assert!(vector_norm(&(&u.matvec(w0) - w1)) < 1e-12);
        assert!(vector_norm(&(&u.matvec(w1) - w0)) < 1e-12);
        let im3 = u.matvec(&basis_vector(5, 3));
        assert!((im3[1].norm() - 1.0).abs() < 1e-12);
        let s = cr(1.0 / 2.0f64.sqrt());
        let phi1: CVector = (&basis_vector(5, 0) - &basis_vector(5, 4)).mapv(|v| v * s);
        assert!(vector_norm(&(&u.matvec(&phi1) - &phi1)) < 1e-12);
    }

    #[test]
    fn intertwiner_commutes_with_restricted_and_corrective_jumps() {
        for name in [BuiltinCode::Repetition3Bitflip, BuiltinCode::Binomial042Loss] {
            let (code, errors) = builtin_code(name);
            let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
            let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
            let pc = code.projector();
            let mut family: Vec<CMatrix> =
                errors.jumps().iter().map(|f| f.matmul(&pc)).collect();
            family.extend(eng.corrective.iter().cloned());
            for mu in 0..code.dim() {
                let u = intertwiner(&cs, mu).unwrap();
                for f in &family {
                    let comm = u.matmul(f).sub(&f.matmul(&u));
                    assert!(spectral_norm(&comm) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn intertwiner_index_out_of_range() {
        let (_, _, _, cs) = binomial_system();
        assert!(intertwiner(&cs, 2).is_err());
    }

    #[test]
    fn noiseless_subsystem_basis_state() {
        let (_, errors, eng, cs) = binomial_system();
        let omega = CMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 0));
        let res = noiseless_subsystem_check(&cs, &eng, &errors, &omega).unwrap();
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn noiseless_subsystem_random_logical_states() {
        let (_, errors, eng, cs) = binomial_system();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let omega = random_density(2, &mut rng);
            let res = noiseless_subsystem_check(&cs, &eng, &errors, &omega).unwrap();
            assert!(res < 1e-8, "residual {res}");
        }
    }

    #[test]
    fn noiseless_subsystem_check_is_discriminating() {
        // add an off-structure piece by hand and verify the residual jumps
        let (_, errors, eng, cs) = binomial_system();
        let n = cs.ambient_dim();
        let pc = cs.code.projector();
        let mut family: Vec<CMatrix> = errors.jumps().iter().map(|f| f.matmul(&pc)).collect();
        family.extend(eng.all_jumps().into_iter().cloned());
        let mut le = CMatrix::zeros(n * n, n * n);
        for f in &family {
            le = le.add(&dissipator_superop(f, 1.0));
        }
        // a state with support on the residual direction is not stationary
        let s = cr(1.0 / 2.0f64.sqrt());
        let phi1: CVector = (&basis_vector(5, 0) - &basis_vector(5, 4)).mapv(|v| v * s);
        let perturbation = CMatrix::outer(&phi1, &phi1);
        let image = apply_superop(&le, &perturbation.scale(cr(0.01))).unwrap();
        assert!(spectral_norm(&image) > 1e-4);
    }

    #[test]
    fn repetition_noiseless_subsystem() {
        let (code, errors) = builtin_code(BuiltinCode::Repetition3Bitflip);
        let cs = build_corrupted_structure(&code, &errors, 1e-8).unwrap();
        let eng = synthesize(&cs, &PhiPolicy::FirstCodeword).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let omega = random_density(2, &mut rng);
        let res = noiseless_subsystem_check(&cs, &eng, &errors, &omega).unwrap();
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn bound_report_code_block_of_l2_vanishes() {
        let (code, errors, eng, _) = binomial_system();
        let decomp = decompose(&code, &errors, &eng, 100.0, 1.0).unwrap();
        let report = perturbation_bounds(&decomp, 0).unwrap();
        assert!(report.pc_l2_pc <= 1e-10, "{}", report.pc_l2_pc);
        assert!(report.spectral_gap > 0.0);
        assert!(report.tau.0 <= report.tau.1);
        assert!(report.projector_distance.0 <= report.projector_distance.1);
    }

    #[test]
    fn bound_report_halving_with_strength() {
        let (code, errors, eng, _) = binomial_system();
        let r200 =
            perturbation_bounds(&decompose(&code, &errors, &eng, 200.0, 1.0).unwrap(), 0).unwrap();
        let r400 =
            perturbation_bounds(&decompose(&code, &errors, &eng, 400.0, 1.0).unwrap(), 0).unwrap();
        assert!(
            r400.projector_distance.1 <= 0.55 * r200.projector_distance.1,
            "{} vs {}",
            r400.projector_distance.1,
            r200.projector_distance.1
        );
        assert!(
            r400.pe_l2_pe.1 <= 0.55 * r200.pe_l2_pe.1,
            "{} vs {}",
            r400.pe_l2_pe.1,
            r200.pe_l2_pe.1
        );
    }

    #[test]
    fn tau_stable_across_strength_decade() {
        let (code, errors, eng, _) = binomial_system();
        let r100 =
            perturbation_bounds(&decompose(&code, &errors, &eng, 100.0, 1.0).unwrap(), 0).unwrap();
        let r1000 =
            perturbation_bounds(&decompose(&code, &errors, &eng, 1000.0, 1.0).unwrap(), 0)
                .unwrap();
        let rel = (r100.tau.1 - r1000.tau.1).abs() / r100.tau.1;
        assert!(rel < 0.2, "relative change {rel}");
    }

    #[test]
    fn recovery_unitaries_are_unitary() {
        let (code, _) = builtin_code(BuiltinCode::Binomial042Loss);
        let (u1, u2, _) = measurement_based_recovery(&code, 0.01).unwrap();
        for u in [&u1, &u2] {
            let res = u.dagger().matmul(u).sub(&CMatrix::identity(5));
            assert!(spectral_norm(&res) <= 1e-10);
        }
    }

    #[test]
    fn recovery_cycle_second_order_residual() {
        let (code, _) = builtin_code(BuiltinCode::Binomial042Loss);
        let (_, _, channel) = measurement_based_recovery(&code, 0.01).unwrap();
        let w0 = &code.codewords()[0];
        let rho = CMatrix::outer(w0, w0);
        let out = apply_superop(&channel, &rho).unwrap();
        let fidelity = inner(w0, &out.matvec(w0)).re;
        assert!(1.0 - fidelity <= 5e-4, "infidelity {}", 1.0 - fidelity);
    }

    #[test]
    fn recovery_cycle_identity_at_zero_wait() {
        let (code, _) = builtin_code(BuiltinCode::Binomial042Loss);
        let (_, _, channel) = measurement_based_recovery(&code, 0.0).unwrap();
        for w in code.codewords() {
            let rho = CMatrix::outer(w, w);
            let out = apply_superop(&channel, &rho).unwrap();
            assert!(out.sub(&rho).max_abs() < 1e-12);
        }
    }

    #[test]
    fn recovery_rejects_other_codes() {
        let (code, _) = builtin_code(BuiltinCode::PhysicalQubitLoss);
        assert!(measurement_based_recovery(&code, 0.01).is_err());
    }
}
