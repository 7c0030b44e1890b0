//! TOML file formats for channels, dilations, and normal forms, plus the
//! machine-readable reports the CLI prints.
//!
//! Matrices are stored as nested row-major arrays in the ordering declared by
//! the file's `ordering` field and converted to the blocked internal basis on
//! load. For dilation files the ordering applies per subsystem (system block,
//! then environment block). Floats are written in shortest round-trip decimal
//! form, so emitted files re-parse bit-identically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dilation::PassiveDilation;
use crate::error::{Error, Result};
use crate::gaussian::GaussianChannel;
use crate::normal_form::NormalForm;
use crate::numerics::{max_abs, residual, RealMatrix, Tolerance};
use crate::symplectic::{reorder, reorder_split, ModeOrdering, OrthogonalSymplectic};

fn matrix_to_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Shortest decimal that round-trips to the same f64; `{:?}` always keeps a
/// decimal point or exponent, which TOML floats require.
fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

fn push_matrix(out: &mut String, key: &str, rows: &[Vec<f64>]) {
    if rows.is_empty() {
        out.push_str(key);
        out.push_str(" = []\n");
        return;
    }
    out.push_str(key);
    out.push_str(" = [\n");
    for row in rows {
        out.push_str("  [");
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&fmt_float(*v));
        }
        out.push_str("],\n");
    }
    out.push_str("]\n");
}

fn push_float_list(out: &mut String, key: &str, values: &[f64]) {
    out.push_str(key);
    out.push_str(" = [");
    for (j, v) in values.iter().enumerate() {
        if j > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_float(*v));
    }
    out.push_str("]\n");
}

fn push_metadata(out: &mut String, metadata: &Option<BTreeMap<String, String>>) {
    if let Some(map) = metadata {
        out.push_str("\n[metadata]\n");
        for (k, v) in map {
            out.push_str(&format!(
                "{} = {}\n",
                toml::Value::String(k.clone()),
                toml::Value::String(v.clone())
            ));
        }
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], dim_rows: usize, dim_cols: usize) -> Result<RealMatrix> {
    if rows.len() != dim_rows || rows.iter().any(|r| r.len() != dim_cols) {
        return Err(Error::Parse(format!(
            "matrix shape mismatch: expected {dim_rows}x{dim_cols}"
        )));
    }
    let mut m = RealMatrix::zeros(dim_rows, dim_cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Parse("matrix entries must be finite".into()));
            }
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// On-disk form of a Gaussian channel `(X, Y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub n: usize,
    pub ordering: ModeOrdering,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BTreeMap<String, String>>,
}

impl ChannelFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ChannelFile =
            toml::from_str(text).map_err(|e| Error::Parse(format!("channel file: {e}")))?;
        file.validate_shapes()?;
        Ok(file)
    }

    fn validate_shapes(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        let dim = 2 * self.n;
        let x = rows_to_matrix(&self.x, dim, dim)?;
        let y = rows_to_matrix(&self.y, dim, dim)?;
        let _ = x;
        let sym = residual(&y, &y.transpose());
        if sym > Tolerance::default().threshold_at_least_unit(max_abs(&y)) {
            return Err(Error::Parse(format!(
                "Y is not symmetric (residual {sym:.3e})"
            )));
        }
        Ok(())
    }

    /// Converts to a CP-validated channel in blocked ordering.
    pub fn to_channel(&self, tol: &Tolerance) -> Result<GaussianChannel> {
        let dim = 2 * self.n;
        let x = reorder(
            &rows_to_matrix(&self.x, dim, dim)?,
            self.ordering,
            ModeOrdering::Blocked,
        )?;
        let y = reorder(
            &rows_to_matrix(&self.y, dim, dim)?,
            self.ordering,
            ModeOrdering::Blocked,
        )?;
        GaussianChannel::new(x, y, tol)
    }

    /// Snapshot of a blocked-ordering channel in the requested file ordering.
    pub fn from_channel(
        channel: &GaussianChannel,
        ordering: ModeOrdering,
        metadata: Option<BTreeMap<String, String>>,
    ) -> Result<Self> {
        let x = reorder(channel.x(), ModeOrdering::Blocked, ordering)?;
        let y = reorder(channel.y(), ModeOrdering::Blocked, ordering)?;
        Ok(ChannelFile {
            n: channel.modes(),
            ordering,
            x: matrix_to_rows(&x),
            y: matrix_to_rows(&y),
            metadata,
        })
    }

    /// Canonical emission: scalar header, then one matrix row per line.
    pub fn to_toml(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("ordering = \"{}\"\n", self.ordering));
        push_matrix(&mut out, "X", &self.x);
        push_matrix(&mut out, "Y", &self.y);
        push_metadata(&mut out, &self.metadata);
        Ok(out)
    }
}

/// On-disk form of a passive dilation `(S, γ_E)` with the system/environment
/// split `(n, l)`. `S` keeps the split layout; `ordering` applies inside each
/// subsystem block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationFile {
    pub n: usize,
    pub l: usize,
    pub ordering: ModeOrdering,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
    #[serde(rename = "gamma_E")]
    pub gamma_e: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BTreeMap<String, String>>,
}

impl DilationFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: DilationFile =
            toml::from_str(text).map_err(|e| Error::Parse(format!("dilation file: {e}")))?;
        let dim = 2 * (file.n + file.l);
        rows_to_matrix(&file.s, dim, dim)?;
        rows_to_matrix(&file.gamma_e, 2 * file.l, 2 * file.l)?;
        Ok(file)
    }

    /// Converts to an (unverified) dilation candidate in blocked ordering.
    pub fn to_dilation(&self) -> Result<PassiveDilation> {
        let dim = 2 * (self.n + self.l);
        let s = reorder_split(
            &rows_to_matrix(&self.s, dim, dim)?,
            self.n,
            self.l,
            self.ordering,
            ModeOrdering::Blocked,
        )?;
        let gamma_e = if self.l > 0 {
            reorder(
                &rows_to_matrix(&self.gamma_e, 2 * self.l, 2 * self.l)?,
                self.ordering,
                ModeOrdering::Blocked,
            )?
        } else {
            RealMatrix::zeros(0, 0)
        };
        PassiveDilation::from_parts(self.n, self.l, s, gamma_e)
    }

    pub fn from_dilation(
        dilation: &PassiveDilation,
        ordering: ModeOrdering,
        metadata: Option<BTreeMap<String, String>>,
    ) -> Result<Self> {
        let s = reorder_split(
            dilation.s(),
            dilation.sys_modes(),
            dilation.env_modes(),
            ModeOrdering::Blocked,
            ordering,
        )?;
        let gamma_e = if dilation.env_modes() > 0 {
            reorder(dilation.gamma_env(), ModeOrdering::Blocked, ordering)?
        } else {
            RealMatrix::zeros(0, 0)
        };
        Ok(DilationFile {
            n: dilation.sys_modes(),
            l: dilation.env_modes(),
            ordering,
            s: matrix_to_rows(&s),
            gamma_e: matrix_to_rows(&gamma_e),
            metadata,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("l = {}\n", self.l));
        out.push_str(&format!("ordering = \"{}\"\n", self.ordering));
        push_matrix(&mut out, "S", &self.s);
        push_matrix(&mut out, "gamma_E", &self.gamma_e);
        push_metadata(&mut out, &self.metadata);
        Ok(out)
    }
}

/// On-disk form of a beamsplitter normal form `(G, F, λ, γ̃_E)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormFile {
    pub n: usize,
    pub ordering: ModeOrdering,
    pub lambda: Vec<f64>,
    #[serde(rename = "G")]
    pub g: Vec<Vec<f64>>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
    #[serde(rename = "gamma_env")]
    pub gamma_env: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BTreeMap<String, String>>,
}

impl NormalFormFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: NormalFormFile =
            toml::from_str(text).map_err(|e| Error::Parse(format!("normal form file: {e}")))?;
        let dim = 2 * file.n;
        rows_to_matrix(&file.g, dim, dim)?;
        rows_to_matrix(&file.f, dim, dim)?;
        rows_to_matrix(&file.gamma_env, dim, dim)?;
        if file.lambda.len() != file.n {
            return Err(Error::Parse("lambda length must equal n".into()));
        }
        Ok(file)
    }

    pub fn to_normal_form(&self, tol: &Tolerance) -> Result<NormalForm> {
        let dim = 2 * self.n;
        let g = reorder(
            &rows_to_matrix(&self.g, dim, dim)?,
            self.ordering,
            ModeOrdering::Blocked,
        )?;
        let f = reorder(
            &rows_to_matrix(&self.f, dim, dim)?,
            self.ordering,
            ModeOrdering::Blocked,
        )?;
        let gamma = reorder(
            &rows_to_matrix(&self.gamma_env, dim, dim)?,
            self.ordering,
            ModeOrdering::Blocked,
        )?;
        NormalForm::from_parts(
            OrthogonalSymplectic::new(g, self.n, 0, tol)?,
            OrthogonalSymplectic::new(f, self.n, 0, tol)?,
            self.lambda.clone(),
            gamma,
            tol,
        )
    }

    pub fn from_normal_form(
        nf: &NormalForm,
        ordering: ModeOrdering,
        metadata: Option<BTreeMap<String, String>>,
    ) -> Result<Self> {
        let g = reorder(nf.g().matrix(), ModeOrdering::Blocked, ordering)?;
        let f = reorder(nf.f().matrix(), ModeOrdering::Blocked, ordering)?;
        let gamma = reorder(nf.gamma_env(), ModeOrdering::Blocked, ordering)?;
        Ok(NormalFormFile {
            n: nf.modes(),
            ordering,
            lambda: nf.lambdas().to_vec(),
            g: matrix_to_rows(&g),
            f: matrix_to_rows(&f),
            gamma_env: matrix_to_rows(&gamma),
            metadata,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("ordering = \"{}\"\n", self.ordering));
        push_float_list(&mut out, "lambda", &self.lambda);
        push_matrix(&mut out, "G", &self.g);
        push_matrix(&mut out, "F", &self.f);
        push_matrix(&mut out, "gamma_env", &self.gamma_env);
        push_metadata(&mut out, &self.metadata);
        Ok(out)
    }
}

/// `sha256:<hex>` digest used to tie reports to their input files.
pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("sha256:{:x}", hasher.finalize())
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceReport {
    pub rel: f64,
    pub abs: f64,
}

impl From<&Tolerance> for ToleranceReport {
    fn from(t: &Tolerance) -> Self {
        ToleranceReport {
            rel: t.rel,
            abs: t.abs,
        }
    }
}

/// Report of `check`: dilatability verdicts with their residuals.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub command: String,
    pub input_digest: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queried_modes: Option<usize>,
    pub dilatable: bool,
    pub min_modes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_modes: Option<usize>,
    pub tolerance: ToleranceReport,
    pub verdicts: CheckVerdicts,
    pub residuals: CheckResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckVerdicts {
    pub psd_ok: bool,
    pub commutes_ok: bool,
    pub kernel_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResiduals {
    pub sigma_hat_min_eigenvalue: f64,
    pub commutator_norm: f64,
    pub rank_sigma_hat: usize,
    pub rank_y: usize,
    pub kernel_residual_y: f64,
    pub kernel_residual_sigma_hat: f64,
}

/// Report of `dilate`: defining-equation residuals of the emitted dilation.
#[derive(Debug, Clone, Serialize)]
pub struct DilateReport {
    pub command: String,
    pub input_digest: String,
    pub n: usize,
    pub l: usize,
    pub out: String,
    pub tolerance: ToleranceReport,
    pub verdicts: VerifyVerdicts,
    pub residuals: VerifyResiduals,
}

/// Report of `verify` (also embedded in `dilate`).
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: String,
    pub input_digest: String,
    pub dilation_digest: String,
    pub n: usize,
    pub l: usize,
    pub tolerance: ToleranceReport,
    pub verdicts: VerifyVerdicts,
    pub residuals: VerifyResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyVerdicts {
    pub valid: bool,
    pub membership_ok: bool,
    pub environment_state_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyResiduals {
    pub symplectic_equation: f64,
    pub orthogonal_equation: f64,
    pub noise_equation: f64,
    pub s1_deviation: f64,
    pub orthogonality: f64,
    pub symplecticity: f64,
    pub env_min_eigenvalue: f64,
    pub action: f64,
}

impl VerifyResiduals {
    pub fn from_verification(v: &crate::dilation::DilationVerification) -> Self {
        VerifyResiduals {
            symplectic_equation: v.symplectic_equation_residual,
            orthogonal_equation: v.orthogonal_equation_residual,
            noise_equation: v.noise_equation_residual,
            s1_deviation: v.s1_residual,
            orthogonality: v.membership.orthogonality_residual,
            symplecticity: v.membership.symplecticity_residual,
            env_min_eigenvalue: v.env_min_eigenvalue,
            action: v.action_residual,
        }
    }
}

/// Report of `normal-form`.
#[derive(Debug, Clone, Serialize)]
pub struct NormalFormReport {
    pub command: String,
    pub input_digest: String,
    pub n: usize,
    pub out: String,
    pub lambda: Vec<f64>,
    pub reconstruction_residual: f64,
    pub reconstruction_ok: bool,
    pub tolerance: ToleranceReport,
}

/// Report of `random`.
#[derive(Debug, Clone, Serialize)]
pub struct RandomReport {
    pub command: String,
    pub n: usize,
    pub l: usize,
    pub passive_env: bool,
    pub seed: u64,
    pub channel_out: String,
    pub dilation_out: String,
    pub channel_digest: String,
    pub dilation_digest: String,
    pub tolerance: ToleranceReport,
}

pub fn report_to_toml<T: Serialize>(report: &T) -> Result<String> {
    toml::to_string(report).map_err(|e| Error::Parse(format!("serialize report: {e}")))
}
