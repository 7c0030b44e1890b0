//! End-to-end tests of the `gdil` binary: exit codes, report contents, file
//! handling, and ordering conversions.

use std::path::PathBuf;
use std::process::Command;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, contents).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> (i32, String, String) {
        let out = Command::new(env!("CARGO_BIN_EXE_gdil"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .unwrap();
        (
            out.status.code().unwrap(),
            String::from_utf8_lossy(&out.stdout).to_string(),
            String::from_utf8_lossy(&out.stderr).to_string(),
        )
    }
}

fn example2_text() -> String {
    let r = 0.5f64.sqrt();
    format!("n = 1\nordering = \"blocked\"\nX = [[{r:?}, 0.0], [0.0, {r:?}]]\nY = [[0.5, 0.0], [0.0, 0.5]]\n")
}

fn grep_float(stdout: &str, key: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("missing key {key} in:\n{stdout}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn check_reports_verdicts_with_residuals() {
    let ws = Workspace::new();
    ws.write(
        "classical.toml",
        "n = 1\nordering = \"blocked\"\nX = [[1.0, 0.0], [0.0, 1.0]]\nY = [[1.0, 0.0], [0.0, 1.0]]\n",
    );
    let (code, stdout, _) = ws.run(&["check", "classical.toml"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("dilatable = false"));
    assert!(stdout.contains("kernel_ok = false"));
    // Every verdict is justified by a residual in the same report.
    assert!(stdout.contains("kernel_residual_y"));
    assert!(stdout.contains("commutator_norm"));
    assert!(stdout.contains("input_digest = \"sha256:"));
}

#[test]
fn check_rejects_non_cp_channel_as_validation_error() {
    let ws = Workspace::new();
    ws.write(
        "amplifier.toml",
        "n = 1\nordering = \"blocked\"\nX = [[2.0, 0.0], [0.0, 2.0]]\nY = [[0.0, 0.0], [0.0, 0.0]]\n",
    );
    let (code, _, stderr) = ws.run(&["check", "amplifier.toml"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"));
}

#[test]
fn check_missing_file_is_error() {
    let ws = Workspace::new();
    let (code, _, _) = ws.run(&["check", "nope.toml"]);
    assert_eq!(code, 2);
}

#[test]
fn dilate_writes_expected_minimal_dilation() {
    let ws = Workspace::new();
    ws.write("ex2.toml", &example2_text());
    let (code, stdout, _) = ws.run(&["dilate", "ex2.toml", "--out", "ex2.dilation.toml"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("valid = true"));
    // Defaults to the minimal l = ½·rank Y = 1.
    assert!(stdout.contains("l = 1"));

    let dilation = std::fs::read_to_string(ws.path("ex2.dilation.toml")).unwrap();
    let parsed = gdil::io::DilationFile::parse(&dilation).unwrap();
    let dil = parsed.to_dilation().unwrap();
    let r = 0.5f64.sqrt();
    // s₂ = √0.5·I₂ and γ_E = I₂ up to round-off.
    for i in 0..2 {
        assert!((dil.s2()[(i, i)] - r).abs() <= 1e-9);
        assert!((dil.gamma_env()[(i, i)] - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn verify_flags_tampered_environment_with_residual() {
    let ws = Workspace::new();
    ws.write("ex2.toml", &example2_text());
    let (code, _, _) = ws.run(&["dilate", "ex2.toml", "--out", "dil.toml"]);
    assert_eq!(code, 0);

    // Perturb one diagonal entry of gamma_E by 1e-2.
    let text = std::fs::read_to_string(ws.path("dil.toml")).unwrap();
    let mut file = gdil::io::DilationFile::parse(&text).unwrap();
    file.gamma_e[0][0] += 1e-2;
    std::fs::write(ws.path("dil.toml"), file.to_toml().unwrap()).unwrap();

    let (code, stdout, _) = ws.run(&["verify", "ex2.toml", "dil.toml"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("valid = false"));
    let noise = grep_float(&stdout, "noise_equation");
    // Residual ≈ tamper × ‖s₂‖² = 1e-2 × 0.5.
    assert!((noise - 5e-3).abs() < 1e-6, "noise residual {noise}");
}

#[test]
fn verify_dimension_mismatch_is_error() {
    let ws = Workspace::new();
    ws.write("ex2.toml", &example2_text());
    let (code, _, _) = ws.run(&["random", "--n", "2", "--l", "1", "--seed", "3", "--out", "two"]);
    assert_eq!(code, 0);
    let (code, _, stderr) = ws.run(&["verify", "ex2.toml", "two.dilation.toml"]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn normal_form_reports_lambda_and_residual() {
    let ws = Workspace::new();
    ws.write("ex2.toml", &example2_text());
    let (code, stdout, _) = ws.run(&["normal-form", "ex2.toml", "--out", "nf.toml"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("reconstruction_ok = true"));
    let residual = grep_float(&stdout, "reconstruction_residual");
    assert!(residual <= 1e-8);
    let lambda_line = stdout
        .lines()
        .find(|l| l.starts_with("lambda = "))
        .unwrap();
    assert!(lambda_line.contains("0.5"), "{lambda_line}");

    // The written file reloads into a valid normal form.
    let text = std::fs::read_to_string(ws.path("nf.toml")).unwrap();
    let file = gdil::io::NormalFormFile::parse(&text).unwrap();
    let nf = file.to_normal_form(&gdil::Tolerance::default()).unwrap();
    assert!((nf.lambdas()[0] - 0.5).abs() <= 1e-9);
}

#[test]
fn normal_form_rejects_non_dilatable() {
    let ws = Workspace::new();
    ws.write(
        "classical.toml",
        "n = 1\nordering = \"blocked\"\nX = [[1.0, 0.0], [0.0, 1.0]]\nY = [[1.0, 0.0], [0.0, 1.0]]\n",
    );
    let (code, _, stderr) = ws.run(&["normal-form", "classical.toml", "--out", "nf.toml"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("kernel_ok"));
    assert!(!ws.path("nf.toml").exists());
}

#[test]
fn random_emits_interleaved_files_that_verify() {
    let ws = Workspace::new();
    let (code, _, _) = ws.run(&[
        "random",
        "--n",
        "2",
        "--l",
        "2",
        "--seed",
        "11",
        "--passive-env",
        "--out",
        "gen",
        "--ordering",
        "interleaved",
    ]);
    assert_eq!(code, 0);
    let channel_text = std::fs::read_to_string(ws.path("gen.channel.toml")).unwrap();
    assert!(channel_text.contains("ordering = \"interleaved\""));
    let (code, _, _) = ws.run(&["verify", "gen.channel.toml", "gen.dilation.toml"]);
    assert_eq!(code, 0);

    // The passive-environment flag shows up as [Y, σ] = 0 in check.
    let (code, stdout, _) = ws.run(&["check", "gen.channel.toml"]);
    assert_eq!(code, 0);
    let comm = grep_float(&stdout, "commutator_norm");
    assert!(comm <= 1e-9);
}

#[test]
fn tolerance_flag_changes_the_verdict() {
    let ws = Workspace::new();
    // A channel that is dilatable only up to a loose tolerance: X slightly
    // off from √0.5·I so [X, σ] ≠ 0 at the 1e-5 level.
    let r = 0.5f64.sqrt();
    ws.write(
        "near.toml",
        &format!(
            "n = 1\nordering = \"blocked\"\nX = [[{:?}, 0.00001], [-0.00001, {:?}]]\nY = [[0.5, 0.0], [0.0, 0.5]]\n",
            r + 1e-5,
            r - 1e-5
        ),
    );
    let (code, _, _) = ws.run(&["check", "near.toml", "--modes", "1"]);
    assert_eq!(code, 1);
    let (code, _, _) = ws.run(&["check", "near.toml", "--modes", "1", "--tol", "0.001"]);
    assert_eq!(code, 0);
}

#[test]
fn interleaved_channel_file_loads_like_blocked() {
    let ws = Workspace::new();
    // The λ = 0.5 additive channel written in both orderings must agree.
    ws.write("blocked.toml", &example2_text());
    let r = 0.5f64.sqrt();
    ws.write(
        "interleaved.toml",
        &format!("n = 1\nordering = \"interleaved\"\nX = [[{r:?}, 0.0], [0.0, {r:?}]]\nY = [[0.5, 0.0], [0.0, 0.5]]\n"),
    );
    let (_, blocked_out, _) = ws.run(&["check", "blocked.toml"]);
    let (_, interleaved_out, _) = ws.run(&["check", "interleaved.toml"]);
    let strip_digest = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("input_digest"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip_digest(&blocked_out), strip_digest(&interleaved_out));
}

#[test]
fn dilation_file_round_trips_through_parser() {
    let ws = Workspace::new();
    let (code, _, _) = ws.run(&["random", "--n", "1", "--l", "2", "--seed", "21", "--out", "g"]);
    assert_eq!(code, 0);
    for name in ["g.channel.toml", "g.dilation.toml"] {
        let bytes = std::fs::read(ws.path(name)).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        let re_emitted = if name.ends_with("channel.toml") {
            gdil::io::ChannelFile::parse(&text).unwrap().to_toml().unwrap()
        } else {
            gdil::io::DilationFile::parse(&text).unwrap().to_toml().unwrap()
        };
        assert_eq!(re_emitted.as_bytes(), bytes.as_slice(), "{name}");
    }
}
