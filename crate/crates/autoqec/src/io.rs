//! File formats: JSON for configs, operators, and reports (complex entries
//! as [re, im] pairs) and RFC-4180-style CSV for curves. Every output embeds
//! the config hash, seed, tolerance set, and tool version so runs are
//! reproducible byte for byte.

use crate::codes::CodeSpace;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector};
use crate::synthesis::EngineeredDissipation;
use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// complex / matrix <-> JSON-friendly shapes

pub type PairVec = Vec<[f64; 2]>;
pub type PairMatrix = Vec<Vec<[f64; 2]>>;

pub fn vector_to_pairs(v: &CVector) -> PairVec {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_pairs(pairs: &[[f64; 2]]) -> CVector {
    Array1::from_iter(pairs.iter().map(|p| Complex64::new(p[0], p[1])))
}

/// Row-major nested lists of [re, im].
pub fn matrix_to_pairs(m: &CMatrix) -> PairMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| {
            let z = m.get(i, j);
            [z.re, z.im]
        }).collect())
        .collect()
}

pub fn matrix_from_pairs(rows: &PairMatrix) -> Result<CMatrix> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("empty matrix in file".into()));
    }
    let cols = rows[0].len();
    let mut m = CMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidInput(format!(
                "ragged matrix in file: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, p) in row.iter().enumerate() {
            m.set(i, j, Complex64::new(p[0], p[1]));
        }
    }
    if m.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry in file".into()));
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// code / operator files

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub ambient_dim: usize,
    pub codewords: Vec<PairVec>,
}

impl CodeFile {
    pub fn from_code(code: &CodeSpace) -> Self {
        CodeFile {
            ambient_dim: code.ambient_dim(),
            codewords: code.codewords().iter().map(vector_to_pairs).collect(),
        }
    }

    pub fn into_code(&self) -> Result<CodeSpace> {
        let codewords = self.codewords.iter().map(|v| vector_from_pairs(v)).collect();
        CodeSpace::new(self.ambient_dim, codewords)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub operators: Vec<PairMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpFile {
    pub metadata: Metadata,
    /// dimension of each corrupted subspace
    pub m: usize,
    /// number of engineered jumps (corrective + preventive)
    pub total_jumps: usize,
    pub corrective: Vec<PairMatrix>,
    pub preventive: Vec<PairMatrix>,
    pub phi_targets: Vec<PairVec>,
}

impl JumpFile {
    pub fn from_engineered(eng: &EngineeredDissipation, m: usize, metadata: Metadata) -> Self {
        JumpFile {
            metadata,
            m,
            total_jumps: eng.total(),
            corrective: eng.corrective.iter().map(matrix_to_pairs).collect(),
            preventive: eng.preventive.iter().map(matrix_to_pairs).collect(),
            phi_targets: eng.phi_targets.iter().map(vector_to_pairs).collect(),
        }
    }

    pub fn into_engineered(&self) -> Result<EngineeredDissipation> {
        Ok(EngineeredDissipation {
            corrective: self
                .corrective
                .iter()
                .map(matrix_from_pairs)
                .collect::<Result<_>>()?,
            preventive: self
                .preventive
                .iter()
                .map(matrix_from_pairs)
                .collect::<Result<_>>()?,
            phi_targets: self.phi_targets.iter().map(|v| vector_from_pairs(v)).collect(),
        })
    }
}

// ---------------------------------------------------------------------------
// run configuration

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeSource {
    Builtin(String),
    File(String),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorSource {
    /// the intrinsic error set bundled with a builtin code
    #[default]
    Builtin,
    File(String),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiPolicyConfig {
    #[default]
    FirstCodeword,
    Zero,
    Explicit(Vec<PairVec>),
}

impl PhiPolicyConfig {
    pub fn into_policy(&self) -> crate::synthesis::PhiPolicy {
        match self {
            PhiPolicyConfig::FirstCodeword => crate::synthesis::PhiPolicy::FirstCodeword,
            PhiPolicyConfig::Zero => crate::synthesis::PhiPolicy::Zero,
            PhiPolicyConfig::Explicit(vs) => crate::synthesis::PhiPolicy::Explicit(
                vs.iter().map(|v| vector_from_pairs(v)).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>> {
        if self.points < 2 || self.stop <= self.start || self.start < 0.0 {
            return Err(Error::Config(format!(
                "bad time grid: start {}, stop {}, points {}",
                self.start, self.stop, self.points
            )));
        }
        let dt = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.start + dt * i as f64).collect())
    }
}

fn default_gamma() -> f64 {
    1.0
}

fn default_m_values() -> Vec<f64> {
    vec![1.0, 3.0, 10.0, 30.0, 100.0, 1000.0]
}

fn default_scaling_m_values() -> Vec<f64> {
    vec![50.0, 100.0, 200.0, 400.0, 800.0]
}

fn default_bounds_m_values() -> Vec<f64> {
    vec![100.0, 200.0, 400.0, 1000.0]
}

fn default_time_grid() -> TimeGrid {
    TimeGrid {
        start: 0.0,
        stop: 5.0,
        points: 101,
    }
}

fn default_ancilla_ratios() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.025]
}

fn default_slope_band() -> (f64, f64) {
    (-1.15, -0.85)
}

pub fn default_tolerances() -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    t.insert("kl".into(), 1e-8);
    t.insert("gram_schmidt_drop".into(), 1e-8);
    t.insert("steady_state".into(), 1e-10);
    t.insert("adiabatic_distance".into(), 0.05);
    t
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub code: CodeSource,
    #[serde(default = "ErrorSource::default")]
    pub errors: ErrorSource,
    #[serde(default = "PhiPolicyConfig::default")]
    pub phi_policy: PhiPolicyConfig,
    /// strengths for fidelity sweeps
    #[serde(default = "default_m_values")]
    pub m_values: Vec<f64>,
    /// strengths for the scaling fit
    #[serde(default = "default_scaling_m_values")]
    pub scaling_m_values: Vec<f64>,
    /// strengths for projector bounds
    #[serde(default = "default_bounds_m_values")]
    pub bounds_m_values: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_time_grid")]
    pub time_grid: TimeGrid,
    /// scaling-fit evaluation time (gamma T)
    #[serde(default = "default_scaling_time")]
    pub scaling_time: f64,
    /// lambda/kappa ratios for the ancilla comparison, at fixed
    /// 4 lambda^2 / kappa = 1
    #[serde(default = "default_ancilla_ratios")]
    pub ancilla_ratios: Vec<f64>,
    #[serde(default = "default_slope_band")]
    pub slope_band: (f64, f64),
    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerances")]
    pub tolerances: BTreeMap<String, f64>,
}

fn default_scaling_time() -> f64 {
    1.0
}

impl RunConfig {
    pub fn builtin(name: &str) -> Self {
        RunConfig {
            code: CodeSource::Builtin(name.into()),
            errors: ErrorSource::Builtin,
            phi_policy: PhiPolicyConfig::FirstCodeword,
            m_values: default_m_values(),
            scaling_m_values: default_scaling_m_values(),
            bounds_m_values: default_bounds_m_values(),
            gamma: default_gamma(),
            time_grid: default_time_grid(),
            scaling_time: default_scaling_time(),
            ancilla_ratios: default_ancilla_ratios(),
            slope_band: default_slope_band(),
            out_dir: None,
            seed: 0,
            tolerances: default_tolerances(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma < 0.0 {
            return Err(Error::Config(format!("negative gamma {}", self.gamma)));
        }
        if self.m_values.iter().any(|&m| m < 0.0) {
            return Err(Error::Config("negative strength value".into()));
        }
        self.time_grid.times()?;
        if let CodeSource::File(path) = &self.code {
            if !Path::new(path).exists() {
                return Err(Error::Config(format!("code file `{path}` does not exist")));
            }
        }
        if let ErrorSource::File(path) = &self.errors {
            if !Path::new(path).exists() {
                return Err(Error::Config(format!("error file `{path}` does not exist")));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialized config; embedded in every output.
    /// The output directory is excluded so the hash identifies the
    /// computation, not where its results land.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out_dir = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        hex_string(&hasher.finalize())
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances
            .get(key)
            .copied()
            .unwrap_or_else(|| *default_tolerances().get(key).unwrap_or(&1e-8))
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            config_hash: self.hash(),
            seed: self.seed,
            tolerances: self.tolerances.clone(),
            version: TOOL_VERSION.into(),
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// output metadata and CSV

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
}

impl Metadata {
    fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# config_hash = {}", self.config_hash),
            format!("# seed = {}", self.seed),
            format!("# version = {}", self.version),
        ];
        for (k, v) in &self.tolerances {
            lines.push(format!("# tol.{k} = {v}"));
        }
        lines
    }
}

/// CSV with '#'-prefixed metadata lines, '.' decimals, '\n' line endings.
/// Float formatting uses Rust's shortest round-trip representation, so a
/// given run is byte-reproducible.
pub fn write_csv(
    path: &Path,
    metadata: &Metadata,
    header: &[String],
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut text = String::new();
    for line in metadata.comment_lines() {
        text.push_str(&line);
        text.push('\n');
    }
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidInput(format!(
                "CSV row has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Write via a temporary file and rename, so failed runs never leave partial
/// outputs behind.
fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
