//! Report envelope, typed result payloads and schema validation.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use sftnorm::compressor::{BlockEntropyBound, CodeSummary, CompressionReport, EmpiricalChain, RecoderParams};
use sftnorm::normality::NormalityReport;
use sftnorm::occurrences::OccurrenceReport;
use sftnorm::sampling::PRNG_ID;
use sftnorm::transducer::KraftAudit;

use crate::Failure;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope<R> {
    pub report: String,
    pub format_version: u32,
    pub tool_version: String,
    pub prng: String,
    pub config: Value,
    pub result: R,
}

impl<R: Serialize> Envelope<R> {
    pub fn new(report: &str, config: Value, result: R) -> Self {
        Self {
            report: report.to_string(),
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            prng: PRNG_ID.to_string(),
            config,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String, Failure> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Failure::internal("report", e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyResult {
    pub symbols: usize,
    pub lambda: f64,
    pub entropy: f64,
    pub irreducible: bool,
    pub period: u64,
    pub aperiodic: bool,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParryAudit {
    pub max_length: usize,
    pub row_sum_error: f64,
    pub stationarity_error: f64,
    /// `|Σ_{w∈B_ℓ} μ(w) − 1|` for `ℓ = 1..=max_length`.
    pub block_mass_error: Vec<f64>,
    pub entropy_error: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParryResult {
    pub lambda: f64,
    pub entropy: f64,
    pub pi: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub audit: ParryAudit,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksResult {
    pub length: usize,
    /// Exact decimal count.
    pub count: String,
    pub blocks: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateResult {
    pub mode: String,
    pub length: usize,
    pub seed: u64,
    pub symbol_counts: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalityResult {
    pub agree: bool,
    pub report: NormalityReport,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub input_length: usize,
    pub output: String,
    pub output_length: usize,
    pub end_state: String,
    pub final_hits: usize,
    pub visited: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub first: String,
    pub second: String,
    pub output: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectivityResult {
    pub depth: usize,
    pub words: u64,
    pub complete: u64,
    pub injective: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineSummary {
    pub states: usize,
    pub transitions: usize,
    pub max_output_length: usize,
    pub deterministic: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoderMeasurement {
    pub input_length: usize,
    pub output_length: usize,
    pub blocks: usize,
    pub dropped: usize,
    pub ratio: f64,
    /// Whether the output is a block of the target shift.
    pub valid_in_target: bool,
    pub roundtrip: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoderResult {
    pub params: RecoderParams,
    /// `h(X)/h(Y) + ε`.
    pub bound: f64,
    pub transducer: Option<MachineSummary>,
    pub measurement: Option<RecoderMeasurement>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSummary {
    pub m: usize,
    pub length: usize,
    pub symbol_counts: Vec<u64>,
    pub pair_counts: Vec<Vec<u64>>,
    pub pi_hat: Vec<f64>,
    #[serde(rename = "P_hat")]
    pub p_hat: Vec<Vec<f64>>,
    pub entropy: f64,
}

impl ChainSummary {
    pub fn new(c: &EmpiricalChain) -> Self {
        Self {
            m: c.m,
            length: c.length,
            symbol_counts: c.symbol_counts.clone(),
            pair_counts: c.pair_counts.clone(),
            pi_hat: c.pi_hat(),
            p_hat: c.p_hat(),
            entropy: c.entropy(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressResult {
    pub block_length: usize,
    pub code_length: usize,
    pub compression: CompressionReport,
    pub code: CodeSummary,
    pub chain: ChainSummary,
    pub transducer: MachineSummary,
    pub encoded_bits: usize,
    pub roundtrip: bool,
    pub kraft_audit: Option<KraftAudit>,
    pub block_entropy_bound: Option<BlockEntropyBound>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateResult {
    pub block_length: usize,
    pub dropped: usize,
    pub chain_entropy: f64,
    pub y_entropy: f64,
    pub gap: f64,
    pub chain: ChainSummary,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateResult {
    pub file: String,
    pub report: String,
    pub valid: bool,
}

/// Exact round trip of `v` through `T`.
fn roundtrips<T: Serialize + DeserializeOwned>(v: &Value) -> Result<(), String> {
    let typed: T = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    let back = serde_json::to_value(&typed).map_err(|e| e.to_string())?;
    if &back == v {
        Ok(())
    } else {
        Err("result does not survive a serialization round trip".into())
    }
}

/// Checks the envelope and the result schema of a report; returns its kind.
pub fn validate(text: &str) -> Result<String, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("not JSON: {e}"))?;
    let env: Envelope<Value> = serde_json::from_value(v).map_err(|e| format!("bad envelope: {e}"))?;
    if env.format_version != FORMAT_VERSION {
        return Err(format!("unsupported format_version {}", env.format_version));
    }
    if !env.config.is_object() {
        return Err("config must be an object".into());
    }
    let r = &env.result;
    match env.report.as_str() {
        "entropy" => roundtrips::<EntropyResult>(r),
        "parry" => roundtrips::<ParryResult>(r),
        "blocks" => roundtrips::<BlocksResult>(r),
        "generate" => roundtrips::<GenerateResult>(r),
        "occ" => roundtrips::<OccurrenceReport>(r),
        "normality" => roundtrips::<NormalityResult>(r),
        "run" => roundtrips::<RunReport>(r),
        "injectivity" => roundtrips::<InjectivityResult>(r),
        "kraft-audit" => roundtrips::<KraftAudit>(r),
        "recoder" => roundtrips::<RecoderResult>(r),
        "compress" => roundtrips::<CompressResult>(r),
        "certificate" => roundtrips::<CertificateResult>(r),
        "validate-report" => roundtrips::<ValidateResult>(r),
        other => Err(format!("unknown report kind {other:?}")),
    }
    .map_err(|e| format!("{} result: {e}", env.report))?;
    Ok(env.report)
}
