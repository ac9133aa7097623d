#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub raw_stdout: Vec<u8>,
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_jordan-geo")
}

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(name)
}

pub fn corpus_str(name: &str) -> String {
    corpus(name).display().to_string()
}

pub fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(bin());
    cmd.args(args).env_remove("JORDAN_GEO_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        raw_stdout: out.stdout,
    }
}

pub fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

/// Every file of the malformed corpus.
pub fn malformed_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus("malformed"))
        .expect("corpus exists")
        .map(|e| e.expect("entry").path())
        .collect();
    files.sort();
    files
}

/// `(args, expected exit code)` for inputs that are well formed but mathematically refused,
/// or that misuse flags.
pub fn exit_code_cases() -> Vec<(Vec<String>, i32)> {
    let c = corpus_str;
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        (s(&["spectral", &c("valid/e12.json")]), 1),
        (s(&["spectral", &c("valid/zero_2x2.json")]), 1),
        (s(&["spectral", &c("valid/rectangular_2x3.json")]), 2),
        (
            s(&["geodesic", &c("valid/e11.json"), &c("valid/e11.json")]),
            1,
        ),
        (
            s(&[
                "geodesic",
                &c("valid/e11.json"),
                &c("valid/diag_2_5_0.json"),
            ]),
            2,
        ),
        (
            s(&[
                "connect",
                &c("valid/diag_2_5_0.json"),
                &c("valid/diag_2_3_0.json"),
            ]),
            1,
        ),
        (
            s(&["connect", &c("valid/e11.json"), &c("valid/diag_2_5_0.json")]),
            1,
        ),
        (
            s(&[
                "fiber",
                &c("valid/e11.json"),
                &c("valid/e12_plus_e21.json"),
                "--t-list",
                "0",
            ]),
            1,
        ),
        (s(&["peirce", &c("valid/diag_2_5_0.json")]), 1),
        (
            s(&["tangent", &c("valid/e11.json"), "--u", &c("valid/e11.json")]),
            1,
        ),
        (s(&["tangent", &c("valid/e12.json")]), 1),
        (s(&["random", "--component", "2:3", "--dim", "2"]), 2),
        (s(&["random", "--component", "0:1", "--dim", "2"]), 2),
        (s(&["random", "--component", "2:1,2:1", "--dim", "2"]), 2),
        (s(&["random", "--component", "two:1", "--dim", "2"]), 2),
        (s(&["random", "--dim", "2"]), 2),
        (s(&["verify", "--suite", "bogus"]), 2),
        (s(&["verify", "--dim", "0"]), 2),
        (s(&["verify", "--trials", "-3"]), 2),
        (s(&["--tol", "-1", "verify", "--trials", "0"]), 2),
        (s(&["--tol", "nan", "verify", "--trials", "0"]), 2),
        (
            s(&[
                "geodesic",
                &c("valid/e11.json"),
                &c("valid/e12_plus_e21.json"),
                "--steps",
                "0",
            ]),
            2,
        ),
        (
            s(&["spectral", &c("valid/e11.json"), "--mode", "banach"]),
            2,
        ),
        (s(&["spectral", &c("missing.json")]), 2),
        (s(&["spectral"]), 2),
        (s(&["bogus"]), 2),
        (s(&[]), 2),
        (s(&["spectral", &c("valid/diag_2_2_5_0.json")]), 0),
        (s(&["verify", "--trials", "0"]), 0),
    ]
}
