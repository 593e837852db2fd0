//! Command-line front end. Subcommands: check | synthesize | fig2 | scaling
//! | bounds | ancilla. Exit codes: 0 success, 1 analytic failure (condition
//! violated, slope out of band), 2 usage or input error.

use crate::analysis::{average_fidelity, perturbation_bounds, scaling_fit};
use crate::codes::{
    basis_vector, build_corrupted_structure, builtin_code, check_knill_laflamme, BuiltinCode,
    CodeSpace, ErrorSet,
};
use crate::error::{Error, Result};
use crate::io::{
    matrix_from_pairs, matrix_to_pairs, write_csv, write_json, CodeSource, ErrorSource, JumpFile,
    Metadata, OperatorFile, RunConfig, TimeGrid,
};
use crate::lindblad::{assemble_autoqec, decompose, Lindbladian};
use crate::physical::{adiabatic_comparison, m_estimate, AncillaRealization};
use crate::synthesis::{synthesize, EngineeredDissipation, PhiPolicy};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "autoqec",
    version,
    about = "Engineered-dissipation synthesis and simulation for autonomously protected logical qudits"
)]
struct Cli {
    /// JSON run configuration (defaults target the builtin 5-level loss code)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory for CSV/JSON artifacts
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed for norm-bound probes
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads for parameter sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// tolerance override, e.g. --tol-override kl=1e-9 (repeatable)
    #[arg(long = "tol-override", global = true, value_parser = parse_tol)]
    tol_override: Vec<(String, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the Knill-Laflamme condition for the configured code
    Check,
    /// Synthesize engineered jump operators and write them to a file
    Synthesize,
    /// Reproduce the fidelity-curve figure (three preventive-target panels)
    Fig2,
    /// Fit the error-vs-strength scaling exponent
    Scaling,
    /// Compute projector and resolvent bounds across strengths
    Bounds,
    /// Compare the ancilla-based hardware model with the effective dynamics
    Ancilla,
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = value
        .parse()
        .map_err(|e| format!("bad tolerance value `{value}`: {e}"))?;
    Ok((key.to_string(), v))
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidInput(_)
        | Error::UnknownBuiltin(_)
        | Error::InvalidPhi(_)
        | Error::DimensionCap { .. } => 2,
        _ => 1,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        // ignore failure when a global pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::builtin(BuiltinCode::Binomial042Loss.name()),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = Some(out.to_string_lossy().into_owned());
    }
    for (k, v) in &cli.tol_override {
        config.tolerances.insert(k.clone(), *v);
    }
    config.validate()?;
    match cli.command {
        Command::Check => cmd_check(&config),
        Command::Synthesize => cmd_synthesize(&config),
        Command::Fig2 => cmd_fig2(&config),
        Command::Scaling => cmd_scaling(&config),
        Command::Bounds => cmd_bounds(&config),
        Command::Ancilla => cmd_ancilla(&config),
    }
}

fn out_path(config: &RunConfig, name: &str) -> Option<PathBuf> {
    config.out_dir.as_ref().map(|d| Path::new(d).join(name))
}

fn load_system(config: &RunConfig) -> Result<(CodeSpace, ErrorSet)> {
    let (code, builtin_errors) = match &config.code {
        CodeSource::Builtin(name) => {
            let builtin = BuiltinCode::from_str(name)?;
            let (code, errors) = builtin_code(builtin);
            (code, Some(errors))
        }
        CodeSource::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: crate::io::CodeFile = serde_json::from_str(&text)?;
            (file.into_code()?, None)
        }
    };
    let errors = match &config.errors {
        ErrorSource::Builtin => builtin_errors.ok_or_else(|| {
            Error::Config("builtin error set requested for a file-based code".into())
        })?,
        ErrorSource::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: OperatorFile = serde_json::from_str(&text)?;
            let jumps = file
                .operators
                .iter()
                .map(matrix_from_pairs)
                .collect::<Result<Vec<_>>>()?;
            ErrorSet::new(jumps)?
        }
    };
    Ok((code, errors))
}

fn synthesize_from_config(
    config: &RunConfig,
) -> Result<(CodeSpace, ErrorSet, EngineeredDissipation, usize)> {
    let (code, errors) = load_system(config)?;
    let report = check_knill_laflamme(&code, &errors, config.tolerance("kl"))?;
    if !report.satisfied {
        return Err(Error::KnillLaflammeFailed {
            residual: report.residual,
        });
    }
    let cs = build_corrupted_structure(&code, &errors, config.tolerance("gram_schmidt_drop"))?;
    let eng = synthesize(&cs, &config.phi_policy.into_policy())?;
    Ok((code, errors, eng, cs.m))
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckOutput {
    metadata: Metadata,
    satisfied: bool,
    residual: f64,
    c_matrix: crate::io::PairMatrix,
    gamma_total: f64,
}

fn cmd_check(config: &RunConfig) -> Result<i32> {
    let (code, errors) = load_system(config)?;
    let report = check_knill_laflamme(&code, &errors, config.tolerance("kl"))?;
    let output = CheckOutput {
        metadata: config.metadata(),
        satisfied: report.satisfied,
        residual: report.residual,
        c_matrix: matrix_to_pairs(&report.c),
        gamma_total: errors.gamma(),
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    if let Some(path) = out_path(config, "check.json") {
        write_json(&path, &output)?;
    }
    Ok(if report.satisfied { 0 } else { 1 })
}

fn cmd_synthesize(config: &RunConfig) -> Result<i32> {
    let (_, _, eng, m) = synthesize_from_config(config)?;
    let file = JumpFile::from_engineered(&eng, m, config.metadata());
    println!("{}", serde_json::to_string_pretty(&file)?);
    if let Some(path) = out_path(config, "jumps.json") {
        write_json(&path, &file)?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Fig2Summary {
    metadata: Metadata,
    m_values: Vec<f64>,
    /// panel (a): max over strengths of fidelity - baseline at gamma t = 2
    ablation_advantage_at_2: f64,
    /// smallest strength whose curve dominates the baseline on
    /// gamma t in [0.5, 3] with prevention on; null if none
    break_even_m: Option<f64>,
    /// max |panel(b) - panel(c)| over the grid at the largest strength
    phi_choice_disagreement: f64,
}

fn physical_qubit_baseline(times: &[f64]) -> Result<Vec<f64>> {
    let (code, errors) = builtin_code(BuiltinCode::PhysicalQubitLoss);
    let lind = Lindbladian::new(2, None, vec![(errors.jumps()[0].clone(), 1.0)])?;
    average_fidelity(&lind, &code, times)
}

fn panel_curves(
    code: &CodeSpace,
    errors: &ErrorSet,
    eng: &EngineeredDissipation,
    m_values: &[f64],
    gamma: f64,
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    m_values
        .par_iter()
        .map(|&m| {
            let lind = assemble_autoqec(errors, eng, m, gamma, None, false)?;
            average_fidelity(&lind, code, times)
        })
        .collect()
}

fn require_binomial(config: &RunConfig) -> Result<()> {
    match &config.code {
        CodeSource::Builtin(name) if name == BuiltinCode::Binomial042Loss.name() => Ok(()),
        _ => Err(Error::Config(
            "this command is defined for the builtin binomial_04_2_loss code".into(),
        )),
    }
}

fn cmd_fig2(config: &RunConfig) -> Result<i32> {
    require_binomial(config)?;
    let (code, errors) = load_system(config)?;
    let cs = build_corrupted_structure(&code, &errors, config.tolerance("gram_schmidt_drop"))?;
    let times = config.time_grid.times()?;
    let baseline = physical_qubit_baseline(&times)?;

    let policies: Vec<(&str, PhiPolicy)> = vec![
        ("a", PhiPolicy::Zero),
        ("b", PhiPolicy::FirstCodeword),
        ("c", PhiPolicy::Explicit(vec![basis_vector(code.ambient_dim(), 2)])),
    ];
    let mut panels = Vec::new();
    for (label, policy) in &policies {
        let eng = synthesize(&cs, policy)?;
        let curves = panel_curves(&code, &errors, &eng, &config.m_values, config.gamma, &times)?;
        panels.push((*label, curves));
    }

    // panel (a) advantage over the baseline at gamma t = 2
    let idx2 = times
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - 2.0).abs().partial_cmp(&(b.1 - 2.0).abs()).unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let ablation_advantage_at_2 = panels[0]
        .1
        .iter()
        .map(|curve| curve[idx2] - baseline[idx2])
        .fold(f64::NEG_INFINITY, f64::max);

    // break-even strength with prevention on (panel b)
    let window: Vec<usize> = times
        .iter()
        .enumerate()
        .filter(|(_, &t)| (0.5..=3.0).contains(&t))
        .map(|(i, _)| i)
        .collect();
    let break_even_m = config
        .m_values
        .iter()
        .zip(panels[1].1.iter())
        .find(|(_, curve)| window.iter().all(|&i| curve[i] >= baseline[i]))
        .map(|(&m, _)| m);

    // preventive-target independence at the largest strength
    let last = config.m_values.len() - 1;
    let phi_choice_disagreement = panels[1].1[last]
        .iter()
        .zip(panels[2].1[last].iter())
        .map(|(b, c)| (b - c).abs())
        .fold(0.0, f64::max);

    let summary = Fig2Summary {
        metadata: config.metadata(),
        m_values: config.m_values.clone(),
        ablation_advantage_at_2,
        break_even_m,
        phi_choice_disagreement,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);

    if config.out_dir.is_some() {
        let mut header = vec!["gamma_t".to_string(), "baseline".to_string()];
        header.extend(config.m_values.iter().map(|m| format!("M={m}")));
        for (label, curves) in &panels {
            let rows: Vec<Vec<f64>> = times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let mut row = vec![t, baseline[i]];
                    row.extend(curves.iter().map(|c| c[i]));
                    row
                })
                .collect();
            let path = out_path(config, &format!("fig2_{label}.csv")).unwrap();
            write_csv(&path, &config.metadata(), &header, &rows)?;
        }
        write_json(&out_path(config, "fig2_summary.json").unwrap(), &summary)?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ScalingOutput {
    metadata: Metadata,
    report: crate::analysis::ScalingReport,
    slope_band: (f64, f64),
    in_band: bool,
}

fn cmd_scaling(config: &RunConfig) -> Result<i32> {
    let (code, errors, eng, _) = synthesize_from_config(config)?;
    let report = scaling_fit(
        &code,
        &errors,
        &eng,
        config.scaling_time,
        &config.scaling_m_values,
        config.gamma,
    )?;
    let (lo, hi) = config.slope_band;
    let in_band = (lo..=hi).contains(&report.slope);
    let output = ScalingOutput {
        metadata: config.metadata(),
        report,
        slope_band: config.slope_band,
        in_band,
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    if let Some(path) = out_path(config, "scaling.json") {
        write_json(&path, &output)?;
    }
    Ok(if in_band { 0 } else { 1 })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct BoundsEntry {
    m: f64,
    report: crate::analysis::BoundReport,
}

#[derive(Serialize)]
struct BoundsOutput {
    metadata: Metadata,
    entries: Vec<BoundsEntry>,
    /// upper-bound ratios between consecutive strengths:
    /// (m_prev, m_next, projector_ratio, leakage_ratio)
    halving_ratios: Vec<(f64, f64, f64, f64)>,
    /// relative spread of the tau upper bound across all strengths
    tau_relative_spread: f64,
}

fn cmd_bounds(config: &RunConfig) -> Result<i32> {
    let (code, errors, eng, _) = synthesize_from_config(config)?;
    let entries: Vec<BoundsEntry> = config
        .bounds_m_values
        .par_iter()
        .map(|&m| -> Result<BoundsEntry> {
            let decomp = decompose(&code, &errors, &eng, m, config.gamma)?;
            let report = perturbation_bounds(&decomp, config.seed)?;
            Ok(BoundsEntry { m, report })
        })
        .collect::<Result<_>>()?;
    let halving_ratios: Vec<(f64, f64, f64, f64)> = entries
        .windows(2)
        .map(|w| {
            (
                w[0].m,
                w[1].m,
                w[1].report.projector_distance.1 / w[0].report.projector_distance.1,
                w[1].report.pe_l2_pe.1 / w[0].report.pe_l2_pe.1,
            )
        })
        .collect();
    let tau_hi = entries
        .iter()
        .map(|e| e.report.tau.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let tau_lo = entries
        .iter()
        .map(|e| e.report.tau.1)
        .fold(f64::INFINITY, f64::min);
    let output = BoundsOutput {
        metadata: config.metadata(),
        entries,
        halving_ratios,
        tau_relative_spread: (tau_hi - tau_lo) / tau_lo,
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    if let Some(path) = out_path(config, "bounds.json") {
        write_json(&path, &output)?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AncillaOutput {
    metadata: Metadata,
    /// lambda/kappa ratios, fixed effective rate 4 lambda^2 / kappa = 1
    ratios: Vec<f64>,
    max_distances: Vec<f64>,
    max_excitations: Vec<f64>,
    monotone: bool,
    /// strength estimates for the two quoted experimental parameter sets
    m_estimate_examples: Vec<f64>,
}

fn cmd_ancilla(config: &RunConfig) -> Result<i32> {
    require_binomial(config)?;
    let (code, errors, eng, _) = synthesize_from_config(config)?;
    let rho0 = crate::numerics::CMatrix::outer(&code.codewords()[0], &code.codewords()[0]);
    // fixed horizon gamma T = 1 for the weak-coupling comparison
    let times = TimeGrid {
        start: 0.0,
        stop: 1.0,
        points: 21,
    }
    .times()?;
    let count = eng.total();
    let runs: Vec<crate::physical::AdiabaticComparison> = config
        .ancilla_ratios
        .par_iter()
        .map(|&ratio| {
            let lambda = 1.0 / (4.0 * ratio);
            let kappa = 1.0 / (4.0 * ratio * ratio);
            let real =
                AncillaRealization::from_engineered(&eng, &vec![kappa; count], &vec![lambda; count])?;
            adiabatic_comparison(&real, &errors, config.gamma, &rho0, &times)
        })
        .collect::<Result<_>>()?;
    let max_distances: Vec<f64> = runs.iter().map(|r| r.max_distance).collect();
    let monotone = max_distances.windows(2).all(|w| w[1] < w[0]);
    let output = AncillaOutput {
        metadata: config.metadata(),
        ratios: config.ancilla_ratios.clone(),
        max_distances: max_distances.clone(),
        max_excitations: runs.iter().map(|r| r.max_excitation).collect(),
        monotone,
        m_estimate_examples: vec![
            m_estimate(0.7, 40.0, 0.05),
            m_estimate(0.9, 3.0, 0.01),
        ],
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    if config.out_dir.is_some() {
        let mut header = vec!["gamma_t".to_string()];
        header.extend(config.ancilla_ratios.iter().map(|r| format!("ratio={r}")));
        let rows: Vec<Vec<f64>> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut row = vec![t];
                row.extend(runs.iter().map(|r| r.distances[i]));
                row
            })
            .collect();
        write_csv(
            &out_path(config, "ancilla_distance.csv").unwrap(),
            &config.metadata(),
            &header,
            &rows,
        )?;
        write_json(&out_path(config, "ancilla_summary.json").unwrap(), &output)?;
    }
    Ok(0)
}
