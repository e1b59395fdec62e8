//! Flat `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment, unknown and repeated keys are
//! rejected. Every value is checked against the type that owns it before any
//! computation starts, and errors name the offending key.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use fda_core::arraymodel::{ArrayConfig, Location};
use fda_core::beamform::LinkParams;
use fda_core::freqalloc::{AllocationKind, AllocationScheme};
use fda_core::powalloc::{AlphaObjective, AlphaSearchSpec};
use fda_core::secrecy::EveRegion;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    EscSweep,
    Heatmap,
    AlphaSweep,
    Asymptotic,
    MgfCompare,
    OptimizeAlpha,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::EscSweep,
        Experiment::Heatmap,
        Experiment::AlphaSweep,
        Experiment::Asymptotic,
        Experiment::MgfCompare,
        Experiment::OptimizeAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::EscSweep => "esc-sweep",
            Experiment::Heatmap => "heatmap",
            Experiment::AlphaSweep => "alpha-sweep",
            Experiment::Asymptotic => "asymptotic",
            Experiment::MgfCompare => "mgf-compare",
            Experiment::OptimizeAlpha => "optimize-alpha",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

pub const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "n_elements",
    "carrier_hz",
    "increment_hz",
    "spacing_m",
    "wave_speed",
    "scheme",
    "M",
    "alpha",
    "mu_b_db",
    "beta",
    "bob_theta_deg",
    "bob_range_m",
    "eve_theta_deg",
    "eve_range_m",
    "region_theta_deg",
    "region_range_m",
    "grid_theta",
    "grid_range",
    "trials",
    "seed",
    "mu_b_db_min",
    "mu_b_db_max",
    "mu_b_db_step",
    "mu_b_db_list",
    "schemes",
    "alpha_step",
    "n_list",
    "theta_min_deg",
    "theta_max_deg",
    "theta_points",
    "range_min_m",
    "range_max_m",
    "range_points",
    "objective",
    "refine",
    "refine_tol",
];

/// Splits the text into key/value pairs.
pub fn parse_pairs(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}` on line {line_no}")));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("key `{key}` set twice (line {line_no})")));
        }
    }
    Ok(map)
}

/// Fully validated settings for one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub experiment: Experiment,
    pub cfg: ArrayConfig,
    pub scheme: AllocationScheme,
    pub bandwidth: f64,
    pub params: LinkParams,
    pub mu_b_db: f64,
    pub bob: Location,
    pub eve: Location,
    pub region: EveRegion,
    pub trials: usize,
    pub seed: u64,
    pub mu_b_db_grid: Vec<f64>,
    pub mu_b_db_list: Vec<f64>,
    pub schemes: Vec<AllocationScheme>,
    pub alpha_step: f64,
    pub n_list: Vec<usize>,
    pub heat_theta_deg: Vec<f64>,
    pub heat_range_m: Vec<f64>,
    pub search: AlphaSearchSpec,
}

struct Lookup<'a> {
    map: &'a BTreeMap<String, String>,
}

fn bad(key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {msg}"))
}

impl Lookup<'_> {
    fn raw<'b>(&'b self, key: &str, default: &'b str) -> &'b str {
        self.map.get(key).map(String::as_str).unwrap_or(default)
    }

    fn parse<T: FromStr>(&self, key: &str, default: &str) -> CliResult<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key, default);
        raw.parse::<T>().map_err(|e| bad(key, format!("cannot parse `{raw}`: {e}")))
    }

    fn finite(&self, key: &str, default: &str) -> CliResult<f64> {
        let v: f64 = self.parse(key, default)?;
        if !v.is_finite() {
            return Err(bad(key, "must be finite"));
        }
        Ok(v)
    }

    fn list<T: FromStr>(&self, key: &str, default: &str) -> CliResult<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key, default);
        let items = raw
            .split(',')
            .map(|s| s.trim().parse::<T>().map_err(|e| bad(key, format!("cannot parse `{}`: {e}", s.trim()))))
            .collect::<CliResult<Vec<T>>>()?;
        if items.is_empty() {
            return Err(bad(key, "list is empty"));
        }
        Ok(items)
    }

    fn intervals(&self, key: &str, default: &str) -> CliResult<Vec<(f64, f64)>> {
        self.raw(key, default)
            .split(',')
            .map(|part| {
                let (lo, hi) =
                    part.split_once(':').ok_or_else(|| bad(key, format!("expected `lo:hi`, got `{}`", part.trim())))?;
                let lo: f64 = lo.trim().parse().map_err(|e| bad(key, e))?;
                let hi: f64 = hi.trim().parse().map_err(|e| bad(key, e))?;
                Ok((lo, hi))
            })
            .collect()
    }
}

fn scheme_of(kind: AllocationKind, m: f64, key: &str) -> CliResult<AllocationScheme> {
    match kind {
        AllocationKind::Pa => Ok(AllocationScheme::pa()),
        AllocationKind::Lfda => Ok(AllocationScheme::lfda()),
        AllocationKind::RfdaCont => AllocationScheme::rfda_cont(m).map_err(|e| bad("M", e)),
        AllocationKind::RfdaDisc => {
            if m.fract() != 0.0 || m < 1.0 || m > u32::MAX as f64 {
                return Err(bad("M", format!("{key} needs a positive integer M, got {m}")));
            }
            AllocationScheme::rfda_disc(m as u32).map_err(|e| bad("M", e))
        }
    }
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

impl Settings {
    /// Parses `text` for `experiment`. `seed_override` takes precedence over
    /// the file's `seed`.
    pub fn from_text(experiment: Experiment, text: &str, seed_override: Option<u64>) -> CliResult<Self> {
        let map = parse_pairs(text)?;
        let k = Lookup { map: &map };

        if let Some(named) = map.get("experiment") {
            let named: Experiment = named.parse().map_err(|e| bad("experiment", e))?;
            if named != experiment {
                return Err(bad("experiment", format!("file is for `{named}` but `{experiment}` was requested")));
            }
        }

        let n_default = match experiment {
            Experiment::MgfCompare | Experiment::OptimizeAlpha => "16",
            _ => "32",
        };
        let n: usize = k.parse("n_elements", n_default)?;
        let mut cfg = ArrayConfig::new(n, k.finite("carrier_hz", "1e9")?, k.finite("increment_hz", "3e6")?)
            .map_err(|e| bad("n_elements/carrier_hz/increment_hz", e))?;
        if map.contains_key("wave_speed") {
            cfg = cfg.with_wave_speed(k.finite("wave_speed", "")?).map_err(|e| bad("wave_speed", e))?;
        }
        if map.contains_key("spacing_m") {
            cfg = cfg.with_spacing(k.finite("spacing_m", "")?).map_err(|e| bad("spacing_m", e))?;
        }

        let bandwidth = k.finite("M", "10")?;
        let kind: AllocationKind = k.parse("scheme", "rfda-cont")?;
        let scheme = scheme_of(kind, bandwidth, "scheme")?;
        let schemes = k
            .list::<AllocationKind>("schemes", "pa,lfda,rfda-cont")?
            .into_iter()
            .map(|kind| scheme_of(kind, bandwidth, "schemes"))
            .collect::<CliResult<Vec<_>>>()?;

        let mu_b_db = k.finite("mu_b_db", "15")?;
        let params = LinkParams::from_db(k.finite("alpha", "0.5")?, mu_b_db, k.finite("beta", "1")?)
            .map_err(|e| bad("alpha/mu_b_db/beta", e))?;

        let bob = Location::from_degrees(k.finite("bob_theta_deg", "45")?, k.finite("bob_range_m", "120")?)
            .map_err(|e| bad("bob_theta_deg/bob_range_m", e))?;
        let eve = Location::from_degrees(k.finite("eve_theta_deg", "45")?, k.finite("eve_range_m", "239")?)
            .map_err(|e| bad("eve_theta_deg/eve_range_m", e))?;

        let region = EveRegion::new(
            k.intervals("region_theta_deg", "0:44,46:180")?,
            k.intervals("region_range_m", "0:119,121:250")?,
            k.parse("grid_theta", "90")?,
            k.parse("grid_range", "125")?,
        )
        .map_err(|e| bad("region_theta_deg/region_range_m/grid_theta/grid_range", e))?;
        if region.contains(&bob) {
            return Err(bad("region_theta_deg/region_range_m", "the Eve region must exclude Bob's location"));
        }

        let trials: usize = k.parse("trials", "10000")?;
        if trials == 0 {
            return Err(bad("trials", "must be >= 1"));
        }
        let seed = match seed_override {
            Some(s) => s,
            None => k.parse("seed", "1")?,
        };

        let lo = k.finite("mu_b_db_min", "0")?;
        let hi = k.finite("mu_b_db_max", "20")?;
        let step = k.finite("mu_b_db_step", "1")?;
        if step.is_nan() || step <= 0.0 || hi < lo {
            return Err(bad("mu_b_db_min/mu_b_db_max/mu_b_db_step", "need step > 0 and max >= min"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        let mu_b_db_grid: Vec<f64> = (0..count).map(|i| lo + i as f64 * step).collect();
        let mu_b_db_list = k.list::<f64>("mu_b_db_list", "0,5,10,15,20")?;
        if mu_b_db_list.iter().chain(&mu_b_db_grid).any(|v| !v.is_finite()) {
            return Err(bad("mu_b_db_list", "values must be finite"));
        }

        let step_default = if experiment == Experiment::MgfCompare { "0.05" } else { "0.01" };
        let alpha_step = k.finite("alpha_step", step_default)?;
        let n_default = match experiment {
            Experiment::Asymptotic => "8,16,32,64,128,256,512,1024",
            _ => "16,64,256",
        };
        let n_list = k.list::<usize>("n_list", n_default)?;
        for &n in &n_list {
            cfg.with_elements(n).map_err(|e| bad("n_list", e))?;
        }

        let theta_points: usize = k.parse("theta_points", "181")?;
        let range_points: usize = k.parse("range_points", "250")?;
        if theta_points == 0 || range_points == 0 {
            return Err(bad("theta_points/range_points", "must be >= 1"));
        }
        let heat_theta_deg = linspace(k.finite("theta_min_deg", "0")?, k.finite("theta_max_deg", "180")?, theta_points);
        let heat_range_m = linspace(k.finite("range_min_m", "1")?, k.finite("range_max_m", "250")?, range_points);
        if heat_theta_deg.iter().any(|t| !(0.0..=180.0).contains(t)) {
            return Err(bad("theta_min_deg/theta_max_deg", "angles must lie in [0, 180]"));
        }
        if heat_range_m.iter().any(|r| *r < 0.0) {
            return Err(bad("range_min_m/range_max_m", "ranges must be >= 0"));
        }

        let objective: AlphaObjective = k.parse("objective", "avg_esc_lb")?;
        let search = AlphaSearchSpec {
            objective,
            grid_step: alpha_step,
            refine: k.parse("refine", "true")?,
            refine_tol: k.finite("refine_tol", "1e-4")?,
        };
        search.validate().map_err(|e| bad("alpha_step/refine_tol", e))?;

        Ok(Self {
            experiment,
            cfg,
            scheme,
            bandwidth,
            params,
            mu_b_db,
            bob,
            eve,
            region,
            trials,
            seed,
            mu_b_db_grid,
            mu_b_db_list,
            schemes,
            alpha_step,
            n_list,
            heat_theta_deg,
            heat_range_m,
            search,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        Settings::from_text(Experiment::EscSweep, text, None).unwrap_err().to_string()
    }

    #[test]
    fn defaults_describe_the_reference_setup() {
        let s = Settings::from_text(Experiment::EscSweep, "", None).unwrap();
        assert_eq!(s.cfg.n_elements(), 32);
        assert_eq!(s.cfg.carrier_hz(), 1e9);
        assert_eq!(s.cfg.increment_hz(), 3e6);
        assert!((s.cfg.spacing_m() - s.cfg.wave_speed() / 2e9).abs() < 1e-15);
        assert_eq!((s.bob.theta_deg(), s.bob.range_m()), (45.0, 120.0));
        assert_eq!(s.params.beta(), 1.0);
        assert_eq!(s.mu_b_db_grid.len(), 21);
        assert_eq!(s.schemes.len(), 3);
        assert_eq!(s.trials, 10_000);
        let mgf = Settings::from_text(Experiment::MgfCompare, "", None).unwrap();
        assert_eq!(mgf.cfg.n_elements(), 16);
        assert_eq!(mgf.alpha_step, 0.05);
    }

    #[test]
    fn comments_whitespace_and_override() {
        let s = Settings::from_text(Experiment::Asymptotic, "# header\n  trials = 50 # inline\n\nseed=9\n", Some(4))
            .unwrap();
        assert_eq!(s.trials, 50);
        assert_eq!(s.seed, 4);
        assert_eq!(s.n_list.last(), Some(&1024));
    }

    #[test]
    fn rejections_name_the_key() {
        assert!(err("bogus = 1").contains("`bogus`"));
        assert!(err("trials = 0").contains("`trials`"));
        assert!(err("trials = 5\ntrials = 6").contains("`trials`"));
        assert!(err("alpha = 1.5").contains("alpha"));
        assert!(err("scheme = rfda-disc\nM = 2.5").contains("`M`"));
        assert!(err("objective = best").contains("avg_esc_mc"));
        assert!(err("experiment = heatmap").contains("`experiment`"));
        assert!(err("region_theta_deg = 0:180\nregion_range_m = 0:250").contains("exclude Bob"));
        assert!(err("n_list = 16,1").contains("`n_list`"));
        assert!(err("alpha_step = 0.7").contains("alpha_step"));
        assert!(err("no equals sign").contains("line 1"));
    }
}
