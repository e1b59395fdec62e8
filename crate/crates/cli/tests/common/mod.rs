#![allow(dead_code)]

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_fda-secrecy");

pub struct Run {
    pub output: Output,
    pub out: PathBuf,
}

impl Run {
    pub fn code(&self) -> i32 {
        self.output.status.code().unwrap_or(-1)
    }

    pub fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }

    pub fn ok(self) -> Self {
        assert_eq!(self.code(), 0, "run failed: {}", self.stderr());
        self
    }
}

/// Writes `config` into `dir` and runs one subcommand against it.
pub fn run(dir: &Path, subcommand: &str, config: &str, out_name: &str, extra: &[&str]) -> Run {
    let cfg = dir.join(format!("{out_name}.cfg"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join(format!("{out_name}.csv"));
    let output = Command::new(BIN)
        .arg(subcommand)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    Run { output, out }
}

/// Header plus rows keyed by column name.
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<HashMap<String, String>>,
}

impl Csv {
    pub fn f(&self, i: usize, col: &str) -> f64 {
        self.rows[i][col].parse().unwrap_or_else(|_| panic!("column {col} row {i} is not a number"))
    }

    pub fn s(&self, i: usize, col: &str) -> &str {
        &self.rows[i][col]
    }
}

pub fn read_csv(path: &Path) -> Csv {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let rows =
        r.records().map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect()).collect();
    Csv { header, rows }
}
