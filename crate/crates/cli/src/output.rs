use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// `printf("%.9g")`: 9 significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-4, 1e9)`.
pub fn fmt_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV table held in memory until every value is known to be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy)]
pub enum Cell<'a> {
    Num(f64),
    Int(u64),
    Text(&'a str),
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, cells: &[Cell<'_>]) -> CliResult<()> {
        assert_eq!(cells.len(), self.header.len(), "row width must match the header");
        let mut row = Vec::with_capacity(cells.len());
        for (cell, name) in cells.iter().zip(&self.header) {
            row.push(match *cell {
                Cell::Num(v) if !v.is_finite() => {
                    return Err(CliError::Runtime(format!("non-finite value {v} in column `{name}`")));
                }
                Cell::Num(v) => fmt_g9(v),
                Cell::Int(v) => v.to_string(),
                Cell::Text(s) => s.to_string(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn meta_path(out: &Path) -> PathBuf {
    out.with_extension("meta")
}

/// `<stem>_<suffix>.csv` next to `out`.
pub fn sibling_csv(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

pub fn write_meta(out: &Path, config_bytes: &[u8], seed: u64, subcommand: &str) -> CliResult<()> {
    let body = format!(
        "config_sha256={}\nseed={seed}\nversion={}\nsubcommand={subcommand}\n",
        sha256_hex(config_bytes),
        env!("CARGO_PKG_VERSION"),
    );
    fs::write(meta_path(out), body)?;
    Ok(())
}
