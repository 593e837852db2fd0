//! Ancilla-based realization of engineered dissipation: one fast-decaying
//! two-level ancilla per engineered jump, coupled by an excitation-swap
//! Hamiltonian. Adiabatic elimination of the ancillas reproduces each
//! engineered dissipator at rate 4 lambda^2 / kappa.
//!
//! Tensor order is fixed as system (x) ancilla_1 (x) ... (x) ancilla_L, with
//! the ancilla ground state as basis vector 0.

use crate::codes::{basis_vector, ErrorSet};
use crate::error::{Error, Result};
use crate::lindblad::{evolve, Lindbladian};
use crate::numerics::{check_dim_cap, cr, nuclear_norm, CMatrix};
use crate::synthesis::EngineeredDissipation;
use num_complex::Complex64;

/// Decay rate and coupling for each ancilla, plus the engineered jump it
/// implements.
#[derive(Debug, Clone)]
pub struct AncillaRealization {
    pub system_dim: usize,
    /// (kappa_i, lambda_i) per ancilla
    pub ancillas: Vec<(f64, f64)>,
    pub coupling_targets: Vec<CMatrix>,
}

impl AncillaRealization {
    pub fn new(ancillas: Vec<(f64, f64)>, coupling_targets: Vec<CMatrix>) -> Result<Self> {
        if ancillas.len() != coupling_targets.len() {
            return Err(Error::DimMismatch {
                context: "one (kappa, lambda) pair per coupling target",
                got: ancillas.len(),
                expected: coupling_targets.len(),
            });
        }
        if coupling_targets.is_empty() {
            return Err(Error::InvalidInput("no coupling targets".into()));
        }
        for &(kappa, lambda) in &ancillas {
            if kappa <= 0.0 || lambda < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "need kappa > 0 and lambda >= 0, got kappa={kappa}, lambda={lambda}"
                )));
            }
        }
        let system_dim = coupling_targets[0].rows();
        for f in &coupling_targets {
            if f.rows() != system_dim || !f.is_square() {
                return Err(Error::DimMismatch {
                    context: "coupling target dimension",
                    got: f.rows(),
                    expected: system_dim,
                });
            }
        }
        check_dim_cap(system_dim << ancillas.len())?;
        Ok(AncillaRealization {
            system_dim,
            ancillas,
            coupling_targets,
        })
    }

    pub fn from_engineered(
        eng: &EngineeredDissipation,
        kappas: &[f64],
        lambdas: &[f64],
    ) -> Result<Self> {
        let targets: Vec<CMatrix> = eng.all_jumps().into_iter().cloned().collect();
        if kappas.len() != targets.len() || lambdas.len() != targets.len() {
            return Err(Error::DimMismatch {
                context: "rates per engineered jump",
                got: kappas.len().min(lambdas.len()),
                expected: targets.len(),
            });
        }
        AncillaRealization::new(
            kappas.iter().cloned().zip(lambdas.iter().cloned()).collect(),
            targets,
        )
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancillas.len()
    }

    pub fn full_dim(&self) -> usize {
        self.system_dim << self.ancillas.len()
    }

    /// Operator acting on ancilla i only, identity elsewhere (and on the
    /// system).
    fn on_ancilla(&self, i: usize, op: &CMatrix) -> CMatrix {
        let mut out = CMatrix::identity(self.system_dim);
        for k in 0..self.ancillas.len() {
            if k == i {
                out = out.kron(op);
            } else {
                out = out.kron(&CMatrix::identity(2));
            }
        }
        out
    }

    fn on_system(&self, op: &CMatrix) -> CMatrix {
        op.kron(&CMatrix::identity(1 << self.ancillas.len()))
    }
}

fn sigma_minus() -> CMatrix {
    CMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 1))
}

/// Full system + ancilla master equation: ancilla decays kappa_i
/// D(|g_i><e_i|), intrinsic jumps at rate gamma, and the excitation-swap
/// coupling H = sum_i lambda_i (F_i (x) |e_i><g_i| + h.c.).
pub fn build_full_model(
    realization: &AncillaRealization,
    intrinsic: &ErrorSet,
    gamma: f64,
) -> Result<Lindbladian> {
    let n_full = realization.full_dim();
    check_dim_cap(n_full)?;
    let sm = sigma_minus();
    let sp = sm.dagger();
    let mut h = CMatrix::zeros(n_full, n_full);
    let mut jumps: Vec<(CMatrix, f64)> = Vec::new();
    for (i, &(kappa, lambda)) in realization.ancillas.iter().enumerate() {
        jumps.push((realization.on_ancilla(i, &sm), kappa));
        let f_sys = realization.on_system(&realization.coupling_targets[i]);
        let raise = realization.on_ancilla(i, &sp);
        let term = f_sys.matmul(&raise).scale(cr(lambda));
        h = h.add(&term).add(&term.dagger());
    }
    for f in intrinsic.jumps() {
        if f.rows() != realization.system_dim {
            return Err(Error::DimMismatch {
                context: "intrinsic jump dimension",
                got: f.rows(),
                expected: realization.system_dim,
            });
        }
        jumps.push((realization.on_system(f), gamma));
    }
    Lindbladian::new(n_full, Some(h), jumps)
}

/// Effective engineered rate after adiabatic elimination of one ancilla.
pub fn effective_rate(lambda: f64, kappa: f64) -> f64 {
    4.0 * lambda * lambda / kappa
}

/// Dimensionless engineered strength 4 lambda^2 / (kappa gamma). The
/// prefactor 4 comes from the effective-rate formula; this is an estimate,
/// not a bound.
pub fn m_estimate(lambda: f64, kappa: f64, gamma: f64) -> f64 {
    effective_rate(lambda, kappa) / gamma
}

/// rho_sys = tr_anc(rho_full) for the fixed system(x)ancillas tensor order.
pub fn partial_trace_ancillas(rho_full: &CMatrix, system_dim: usize) -> Result<CMatrix> {
    let n_full = rho_full.rows();
    if !rho_full.is_square() || !n_full.is_multiple_of(system_dim) {
        return Err(Error::DimMismatch {
            context: "full-space density matrix dimension",
            got: n_full,
            expected: system_dim,
        });
    }
    let anc_dim = n_full / system_dim;
    let mut out = CMatrix::zeros(system_dim, system_dim);
    for i in 0..system_dim {
        for j in 0..system_dim {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..anc_dim {
                s += rho_full.get(i * anc_dim + a, j * anc_dim + a);
            }
            out.set(i, j, s);
        }
    }
    Ok(out)
}

/// Total excited-state population over all ancillas.
pub fn ancilla_excitation(rho_full: &CMatrix, realization: &AncillaRealization) -> f64 {
    let sm = sigma_minus();
    let number = sm.dagger().matmul(&sm);
    let mut total = 0.0;
    for i in 0..realization.ancilla_count() {
        let op = realization.on_ancilla(i, &number);
        total += op.matmul(rho_full).trace().re;
    }
    total
}

#[derive(Debug, Clone)]
pub struct AdiabaticComparison {
    pub times: Vec<f64>,
    /// trace distance between effective and reduced full-model states
    pub distances: Vec<f64>,
    pub max_distance: f64,
    /// peak total ancilla excited-state population (adiabaticity witness)
    pub max_excitation: f64,
}

/// Evolve the full model from rho0 (x) |g...g> and the effective Lindbladian
/// (rates 4 lambda_i^2 / kappa_i) from rho0, and compare the reduced states.
pub fn adiabatic_comparison(
    realization: &AncillaRealization,
    intrinsic: &ErrorSet,
    gamma: f64,
    rho0: &CMatrix,
    times: &[f64],
) -> Result<AdiabaticComparison> {
    if rho0.rows() != realization.system_dim {
        return Err(Error::DimMismatch {
            context: "system state dimension",
            got: rho0.rows(),
            expected: realization.system_dim,
        });
    }
    let anc_dim = 1 << realization.ancilla_count();
    let ground = CMatrix::outer(&basis_vector(anc_dim, 0), &basis_vector(anc_dim, 0));
    let rho0_full = rho0.kron(&ground);

    let full = build_full_model(realization, intrinsic, gamma)?;
    let full_result = evolve(&full, &rho0_full, times)?;

    let mut jumps: Vec<(CMatrix, f64)> = realization
        .ancillas
        .iter()
        .zip(realization.coupling_targets.iter())
        .map(|(&(kappa, lambda), f)| (f.clone(), effective_rate(lambda, kappa)))
        .collect();
    for f in intrinsic.jumps() {
        jumps.push((f.clone(), gamma));
    }
    let effective = Lindbladian::new(realization.system_dim, None, jumps)?;
    let eff_result = evolve(&effective, rho0, times)?;

    let mut distances = Vec::with_capacity(times.len());
    let mut max_excitation = 0.0f64;
    for (rho_full, rho_eff) in full_result.states.iter().zip(eff_result.states.iter()) {
        let reduced = partial_trace_ancillas(rho_full, realization.system_dim)?;
        distances.push(0.5 * nuclear_norm(&reduced.sub(rho_eff)));
        max_excitation = max_excitation.max(ancilla_excitation(rho_full, realization));
    }
    let max_distance = distances.iter().cloned().fold(0.0, f64::max);
    Ok(AdiabaticComparison {
        times: times.to_vec(),
        distances,
        max_distance,
        max_excitation,
    })
}

/// One labeled quanta-exchange term of the coupling Hamiltonian (stated
/// without its Hermitian conjugate).
#[derive(Debug, Clone)]
pub struct ExchangeTerm {
    pub label: &'static str,
    /// which coupling Hamiltonian the term belongs to (1 = corrective,
    /// 2 = preventive)
    pub hamiltonian: usize,
    /// total quanta exchanged (photons +/- ancilla excitation)
    pub quanta: u32,
    pub coefficient: Complex64,
    /// full-space operator (system (x) two ancillas), h.c. not included
    pub operator: CMatrix,
}

/// The 5-level loss code with preventive target |2>: decomposition of the
/// two coupling Hamiltonians into selective quanta-exchange terms.
pub fn binomial_hardware_terms() -> Vec<ExchangeTerm> {
    let e: Vec<_> = (0..5).map(|i| basis_vector(5, i)).collect();
    let sp = sigma_minus().dagger();
    let anc = |i: usize| -> (CMatrix, CMatrix) {
        if i == 0 {
            (sp.clone(), CMatrix::identity(2))
        } else {
            (CMatrix::identity(2), sp.clone())
        }
    };
    let embed = |sys: CMatrix, ham: usize| -> CMatrix {
        let (a1, a2) = anc(ham - 1);
        sys.kron(&a1).kron(&a2)
    };
    let s = cr(1.0 / 2.0f64.sqrt());
    vec![
        ExchangeTerm {
            label: "|4><3| x raise_1",
            hamiltonian: 1,
            quanta: 2,
            coefficient: s,
            operator: embed(CMatrix::outer(&e[4], &e[3]).scale(s), 1),
        },
        ExchangeTerm {
            label: "|2><1| x raise_1",
            hamiltonian: 1,
            quanta: 2,
            coefficient: cr(1.0),
            operator: embed(CMatrix::outer(&e[2], &e[1]), 1),
        },
        ExchangeTerm {
            label: "|0><3| x raise_1",
            hamiltonian: 1,
            quanta: 4,
            coefficient: s,
            operator: embed(CMatrix::outer(&e[0], &e[3]).scale(s), 1),
        },
        ExchangeTerm {
            label: "|2><0| x raise_2",
            hamiltonian: 2,
            quanta: 3,
            coefficient: s,
            operator: embed(CMatrix::outer(&e[2], &e[0]).scale(s), 2),
        },
        ExchangeTerm {
            label: "|2><4| x raise_2",
            hamiltonian: 2,
            quanta: 3,
            coefficient: -s,
            operator: embed(CMatrix::outer(&e[2], &e[4]).scale(-s), 2),
        },
    ]
}
