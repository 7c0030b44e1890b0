//! Command-line front end.
//!
//! Exit codes across all subcommands: 0 = affirmative verdict, 1 = negative
//! verdict, 2 = parse/validation error. Reports go to standard output as
//! TOML; diagnostics go to standard error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::dilation::{
    check_dilatable, construct_dilation, minimal_modes, random_dilatable_channel, verify_dilation,
};
use crate::error::{Error, Result};
use crate::io::{
    digest, report_to_toml, ChannelFile, CheckReport, CheckResiduals, CheckVerdicts, DilateReport,
    DilationFile, NormalFormFile, NormalFormReport, RandomReport, ToleranceReport, VerifyReport,
    VerifyResiduals, VerifyVerdicts,
};
use crate::normal_form::{compute_normal_form, reconstruction_residual};
use crate::numerics::Tolerance;
use crate::symplectic::ModeOrdering;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrderingArg {
    Blocked,
    Interleaved,
}

impl From<OrderingArg> for ModeOrdering {
    fn from(value: OrderingArg) -> Self {
        match value {
            OrderingArg::Blocked => ModeOrdering::Blocked,
            OrderingArg::Interleaved => ModeOrdering::Interleaved,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gdil",
    version,
    about = "Passive dilations and beamsplitter normal forms of Gaussian quantum channels"
)]
pub struct Cli {
    /// Override the relative tolerance (absolute part keeps its default).
    #[arg(long, global = true, value_name = "REL")]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a channel admits a passive dilation.
    Check {
        /// Channel file (TOML).
        channel: PathBuf,
        /// Environment mode count to test; omit to test existence for any l.
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Construct a passive dilation and write it to a file.
    Dilate {
        channel: PathBuf,
        /// Environment mode count; defaults to the minimal ½·rank(Y).
        #[arg(long)]
        modes: Option<usize>,
        /// Output path for the dilation file.
        #[arg(long)]
        out: PathBuf,
        /// Quadrature ordering used in emitted files.
        #[arg(long, value_enum, default_value_t = OrderingArg::Blocked)]
        ordering: OrderingArg,
    },
    /// Factor a channel as passive ∘ beamsplitter-additive ∘ passive.
    NormalForm {
        channel: PathBuf,
        /// Output path for the normal-form file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderingArg::Blocked)]
        ordering: OrderingArg,
    },
    /// Verify a dilation file against a channel file.
    Verify {
        channel: PathBuf,
        dilation: PathBuf,
    },
    /// Emit a seeded random dilatable channel with its ground-truth dilation.
    Random {
        /// System modes.
        #[arg(long)]
        n: usize,
        /// Environment modes.
        #[arg(long)]
        l: usize,
        /// Draw a passive (thermal-like) environment state.
        #[arg(long)]
        passive_env: bool,
        /// RNG seed; mandatory so emitted files are reproducible.
        #[arg(long)]
        seed: u64,
        /// Output prefix; writes <out>.channel.toml and <out>.dilation.toml.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderingArg::Blocked)]
        ordering: OrderingArg,
    },
}

fn tolerance_of(cli_tol: Option<f64>) -> Tolerance {
    let mut tol = Tolerance::default();
    if let Some(rel) = cli_tol {
        tol.rel = rel;
    }
    tol
}

fn read(path: &Path) -> Result<(String, String)> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))?;
    Ok((text, digest(&bytes)))
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NotDilatable(_) | Error::NotMinimal(_) => EXIT_NEGATIVE,
        _ => EXIT_ERROR,
    }
}

/// Runs one CLI invocation; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let tol = tolerance_of(cli.tol);
    let outcome = match &cli.command {
        Command::Check { channel, modes } => cmd_check(channel, *modes, &tol),
        Command::Dilate {
            channel,
            modes,
            out,
            ordering,
        } => cmd_dilate(channel, *modes, out, (*ordering).into(), &tol),
        Command::NormalForm {
            channel,
            out,
            ordering,
        } => cmd_normal_form(channel, out, (*ordering).into(), &tol),
        Command::Verify { channel, dilation } => cmd_verify(channel, dilation, &tol),
        Command::Random {
            n,
            l,
            passive_env,
            seed,
            out,
            ordering,
        } => cmd_random(*n, *l, *passive_env, *seed, out, (*ordering).into(), &tol),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn cmd_check(channel_path: &Path, modes: Option<usize>, tol: &Tolerance) -> Result<i32> {
    let (text, input_digest) = read(channel_path)?;
    let file = ChannelFile::parse(&text)?;
    let channel = file.to_channel(tol)?;
    let report = check_dilatable(&channel, modes, tol)?;
    let minimal = if report.conditions_hold() {
        Some(minimal_modes(&channel, tol)?)
    } else {
        None
    };
    let out = CheckReport {
        command: "check".into(),
        input_digest,
        n: channel.modes(),
        queried_modes: modes,
        dilatable: report.overall,
        min_modes: report.min_modes,
        minimal_modes: minimal,
        tolerance: ToleranceReport::from(tol),
        verdicts: CheckVerdicts {
            psd_ok: report.psd_ok,
            commutes_ok: report.commutes_ok,
            kernel_ok: report.kernel_ok,
        },
        residuals: CheckResiduals {
            sigma_hat_min_eigenvalue: report.sigma_hat_min_eigenvalue,
            commutator_norm: report.commutator_norm,
            rank_sigma_hat: report.rank_sigma_hat,
            rank_y: report.rank_y,
            kernel_residual_y: report.kernel_residual_y,
            kernel_residual_sigma_hat: report.kernel_residual_sigma_hat,
        },
    };
    println!("{}", report_to_toml(&out)?);
    Ok(if report.overall { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_dilate(
    channel_path: &Path,
    modes: Option<usize>,
    out_path: &Path,
    ordering: ModeOrdering,
    tol: &Tolerance,
) -> Result<i32> {
    let (text, input_digest) = read(channel_path)?;
    let file = ChannelFile::parse(&text)?;
    let channel = file.to_channel(tol)?;
    let env_modes = match modes {
        Some(l) => l,
        None => minimal_modes(&channel, tol)?,
    };
    let dilation = construct_dilation(&channel, env_modes, tol)?;
    let verification = verify_dilation(&channel, &dilation, tol)?;

    let out_file = DilationFile::from_dilation(&dilation, ordering, None)?;
    std::fs::write(out_path, out_file.to_toml()?)?;

    let report = DilateReport {
        command: "dilate".into(),
        input_digest,
        n: dilation.sys_modes(),
        l: dilation.env_modes(),
        out: out_path.display().to_string(),
        tolerance: ToleranceReport::from(tol),
        verdicts: VerifyVerdicts {
            valid: verification.is_valid,
            membership_ok: verification.membership.is_member,
            environment_state_ok: verification.env_min_eigenvalue
                >= -tol.threshold_at_least_unit(1.0),
        },
        residuals: VerifyResiduals::from_verification(&verification),
    };
    println!("{}", report_to_toml(&report)?);
    Ok(if verification.is_valid {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_normal_form(
    channel_path: &Path,
    out_path: &Path,
    ordering: ModeOrdering,
    tol: &Tolerance,
) -> Result<i32> {
    let (text, input_digest) = read(channel_path)?;
    let file = ChannelFile::parse(&text)?;
    let channel = file.to_channel(tol)?;
    let nf = compute_normal_form(&channel, tol)?;
    let residual = reconstruction_residual(&channel, &nf, tol)?;

    let out_file = NormalFormFile::from_normal_form(&nf, ordering, None)?;
    std::fs::write(out_path, out_file.to_toml()?)?;

    let scale = crate::numerics::max_abs(channel.x())
        .max(crate::numerics::max_abs(channel.y()))
        .max(1.0);
    let ok = residual <= tol.threshold(scale).max(1e-8);
    let report = NormalFormReport {
        command: "normal-form".into(),
        input_digest,
        n: channel.modes(),
        out: out_path.display().to_string(),
        lambda: nf.lambdas().to_vec(),
        reconstruction_residual: residual,
        reconstruction_ok: ok,
        tolerance: ToleranceReport::from(tol),
    };
    println!("{}", report_to_toml(&report)?);
    Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_verify(channel_path: &Path, dilation_path: &Path, tol: &Tolerance) -> Result<i32> {
    let (channel_text, input_digest) = read(channel_path)?;
    let (dilation_text, dilation_digest) = read(dilation_path)?;
    let channel = ChannelFile::parse(&channel_text)?.to_channel(tol)?;
    let dilation = DilationFile::parse(&dilation_text)?.to_dilation()?;
    let verification = verify_dilation(&channel, &dilation, tol)?;

    let report = VerifyReport {
        command: "verify".into(),
        input_digest,
        dilation_digest,
        n: dilation.sys_modes(),
        l: dilation.env_modes(),
        tolerance: ToleranceReport::from(tol),
        verdicts: VerifyVerdicts {
            valid: verification.is_valid,
            membership_ok: verification.membership.is_member,
            environment_state_ok: verification.env_min_eigenvalue
                >= -tol.threshold_at_least_unit(1.0),
        },
        residuals: VerifyResiduals::from_verification(&verification),
    };
    println!("{}", report_to_toml(&report)?);
    Ok(if verification.is_valid {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_random(
    n: usize,
    l: usize,
    passive_env: bool,
    seed: u64,
    out_prefix: &Path,
    ordering: ModeOrdering,
    tol: &Tolerance,
) -> Result<i32> {
    if n == 0 || l == 0 {
        return Err(Error::Parse("--n and --l must be positive".into()));
    }
    let (channel, dilation) = random_dilatable_channel(n, l, passive_env, seed);

    let mut metadata = std::collections::BTreeMap::new();
    metadata.insert("seed".to_string(), seed.to_string());
    metadata.insert("passive_env".to_string(), passive_env.to_string());

    let channel_out = out_prefix.with_extension("channel.toml");
    let dilation_out = out_prefix.with_extension("dilation.toml");
    let channel_text =
        ChannelFile::from_channel(&channel, ordering, Some(metadata.clone()))?.to_toml()?;
    let dilation_text =
        DilationFile::from_dilation(&dilation, ordering, Some(metadata))?.to_toml()?;
    std::fs::write(&channel_out, &channel_text)?;
    std::fs::write(&dilation_out, &dilation_text)?;

    let report = RandomReport {
        command: "random".into(),
        n,
        l,
        passive_env,
        seed,
        channel_out: channel_out.display().to_string(),
        dilation_out: dilation_out.display().to_string(),
        channel_digest: digest(channel_text.as_bytes()),
        dilation_digest: digest(dilation_text.as_bytes()),
        tolerance: ToleranceReport::from(tol),
    };
    println!("{}", report_to_toml(&report)?);
    Ok(EXIT_OK)
}
