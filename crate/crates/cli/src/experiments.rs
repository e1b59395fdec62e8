//! One runner per subcommand. Each returns the tables to write; nothing
//! here touches the filesystem.

use fda_core::arraymodel::{cross_correlation, Location};
use fda_core::beamform::LinkParams;
use fda_core::freqalloc::{draw_allocation, AllocationKind, AllocationScheme, FrequencyAllocation};
use fda_core::par::Exec;
use fda_core::powalloc::{alpha_grid, optimize_alpha, region_curve, AlphaObjective};
use fda_core::secrecy::{
    average_over_region_many, closed_forms, esc_asymptotic, mean_rho_sq, offsets, sample_eve_channel, RegionMetric,
    RegionSetup, SecrecyReport,
};
use fda_core::stream::{Purpose, StreamFamily};

use crate::config::{Experiment, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

pub const ESC_SWEEP_COLUMNS: &[&str] =
    &["mu_b_db", "scheme", "esc_bits", "esc_stderr", "c_lb_bits", "c_asym_bits", "esc_clamped_bits"];
pub const HEATMAP_COLUMNS: &[&str] = &["theta_deg", "range_m", "scheme", "corr_abs"];
pub const ALPHA_SWEEP_COLUMNS: &[&str] = &["alpha", "N", "avg_esc_mc", "avg_esc_mc_stderr", "avg_esc_lb"];
pub const ASYMPTOTIC_COLUMNS: &[&str] = &["N", "esc_mc", "esc_stderr", "esc_asym"];
pub const MGF_COLUMNS: &[&str] = &["alpha", "mu_b_db", "kind", "avg_esc", "avg_esc_stderr"];
pub const OPTIMUM_COLUMNS: &[&str] = &["objective", "alpha_star", "value_bits"];
pub const CURVE_COLUMNS: &[&str] = &["alpha", "value_bits", "stderr_bits"];

/// Tables produced by one run: the main output plus suffixed siblings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub main: Table,
    pub extra: Vec<(&'static str, Table)>,
}

impl RunOutput {
    fn single(main: Table) -> Self {
        Self { main, extra: Vec::new() }
    }
}

pub fn run(s: &Settings) -> CliResult<RunOutput> {
    match s.experiment {
        Experiment::EscSweep => esc_sweep(s),
        Experiment::Heatmap => heatmap(s),
        Experiment::AlphaSweep => alpha_sweep(s),
        Experiment::Asymptotic => asymptotic(s),
        Experiment::MgfCompare => mgf_compare(s),
        Experiment::OptimizeAlpha => optimize(s),
    }
}

fn require_mgf(s: &Settings) -> CliResult<()> {
    if s.scheme.kind() == AllocationKind::Lfda {
        return Err(CliError::Config(format!(
            "`scheme`: {} needs a scheme with a moment generating function (pa, rfda-cont, rfda-disc)",
            s.experiment
        )));
    }
    Ok(())
}

fn with_mu(s: &Settings, mu_b_db: f64) -> CliResult<LinkParams> {
    Ok(LinkParams::from_db(s.params.alpha(), mu_b_db, s.params.beta())?)
}

fn esc_sweep(s: &Settings) -> CliResult<RunOutput> {
    let mut t = Table::new(ESC_SWEEP_COLUMNS);
    for scheme in &s.schemes {
        let samples = sample_eve_channel(
            &s.eve,
            &s.bob,
            &s.cfg,
            scheme,
            s.trials,
            StreamFamily::new(s.seed),
            0,
            Exec::default(),
        )?;
        for &db in &s.mu_b_db_grid {
            let params = with_mu(s, db)?;
            let closed = closed_forms(&s.eve, &s.bob, &s.cfg, scheme, &params)?;
            let r = SecrecyReport::from_samples(&samples, &params, closed);
            t.push(&[
                Cell::Num(db),
                Cell::Text(scheme.kind().name()),
                Cell::Num(r.esc),
                Cell::Num(r.esc_stderr),
                Cell::Num(r.c_lb),
                Cell::Num(r.c_asym),
                Cell::Num(r.esc_clamped),
            ])?;
        }
    }
    Ok(RunOutput::single(t))
}

enum HeatSource {
    Realization(FrequencyAllocation),
    RootMean(AllocationScheme),
}

fn heatmap(s: &Settings) -> CliResult<RunOutput> {
    let n = s.cfg.n_elements();
    let streams = StreamFamily::new(s.seed);
    let mut sources: Vec<(String, HeatSource)> = Vec::new();
    for scheme in &s.schemes {
        let alloc = draw_allocation(scheme, n, &mut streams.rng(Purpose::Allocation, 0, 0))?;
        let name = scheme.kind().name();
        sources.push((name.to_string(), HeatSource::Realization(alloc)));
        if scheme.is_random() {
            sources.push((format!("{name}-rms"), HeatSource::RootMean(*scheme)));
        }
    }
    let mut t = Table::new(HEATMAP_COLUMNS);
    for (label, source) in &sources {
        let rows = Exec::default().map_indexed(s.heat_theta_deg.len(), |i| -> CliResult<Vec<(f64, f64, f64)>> {
            let theta = s.heat_theta_deg[i];
            s.heat_range_m
                .iter()
                .map(|&range| {
                    let loc = Location::from_degrees(theta, range)?;
                    let v = match source {
                        HeatSource::Realization(a) => cross_correlation(&loc, &s.bob, &s.cfg, a)?.norm(),
                        HeatSource::RootMean(scheme) => mean_rho_sq(offsets(&loc, &s.bob, &s.cfg), scheme, n)?.sqrt(),
                    };
                    Ok((theta, range, v))
                })
                .collect()
        });
        for row in rows {
            for (theta, range, v) in row? {
                t.push(&[Cell::Num(theta), Cell::Num(range), Cell::Text(label), Cell::Num(v)])?;
            }
        }
    }
    Ok(RunOutput::single(t))
}

fn region_setup(s: &Settings, n: usize, scheme: AllocationScheme) -> CliResult<RegionSetup<'_>> {
    Ok(RegionSetup {
        region: &s.region,
        loc_b: s.bob,
        cfg: s.cfg.with_elements(n)?,
        scheme,
        trials: s.trials,
        seed: s.seed,
    })
}

fn alpha_sweep(s: &Settings) -> CliResult<RunOutput> {
    require_mgf(s)?;
    let alphas = alpha_grid(s.alpha_step);
    let mut t = Table::new(ALPHA_SWEEP_COLUMNS);
    for &n in &s.n_list {
        let setup = region_setup(s, n, s.scheme)?;
        let mc = region_curve(AlphaObjective::AvgEscMc, &setup, &s.params, &alphas, Exec::default())?;
        let lb = region_curve(AlphaObjective::AvgEscLb, &setup, &s.params, &alphas, Exec::default())?;
        for (m, l) in mc.iter().zip(&lb) {
            t.push(&[
                Cell::Num(m.alpha),
                Cell::Int(n as u64),
                Cell::Num(m.value),
                Cell::Num(m.stderr),
                Cell::Num(l.value),
            ])?;
        }
    }
    Ok(RunOutput::single(t))
}

fn asymptotic(s: &Settings) -> CliResult<RunOutput> {
    require_mgf(s)?;
    let mut t = Table::new(ASYMPTOTIC_COLUMNS);
    for &n in &s.n_list {
        let cfg = s.cfg.with_elements(n)?;
        let samples = sample_eve_channel(
            &s.eve,
            &s.bob,
            &cfg,
            &s.scheme,
            s.trials,
            StreamFamily::new(s.seed),
            0,
            Exec::default(),
        )?;
        let est = samples.estimate(&s.params);
        let asym = esc_asymptotic(&s.eve, &s.bob, &cfg, &s.scheme, &s.params)?;
        t.push(&[Cell::Int(n as u64), Cell::Num(est.esc), Cell::Num(est.esc_stderr), Cell::Num(asym)])?;
    }
    Ok(RunOutput::single(t))
}

fn mgf_compare(s: &Settings) -> CliResult<RunOutput> {
    let alphas = alpha_grid(s.alpha_step);
    let mut grid = Vec::with_capacity(alphas.len() * s.mu_b_db_list.len());
    for &db in &s.mu_b_db_list {
        for &a in &alphas {
            grid.push((db, LinkParams::from_db(a, db, s.params.beta())?));
        }
    }
    let params: Vec<LinkParams> = grid.iter().map(|&(_, p)| p).collect();
    let disc_m = s.bandwidth;
    if disc_m.fract() != 0.0 || disc_m < 1.0 {
        return Err(CliError::Config(format!("`M`: the discrete allocation needs a positive integer M, got {disc_m}")));
    }
    let kinds =
        [("cont", AllocationScheme::rfda_cont(s.bandwidth)?), ("disc", AllocationScheme::rfda_disc(disc_m as u32)?)];
    let mut t = Table::new(MGF_COLUMNS);
    for (label, scheme) in kinds {
        let setup = region_setup(s, s.cfg.n_elements(), scheme)?;
        let avgs = average_over_region_many(RegionMetric::EscMc, &setup, &params, Exec::default())?;
        for ((db, p), avg) in grid.iter().zip(&avgs) {
            t.push(&[
                Cell::Num(p.alpha()),
                Cell::Num(*db),
                Cell::Text(label),
                Cell::Num(avg.value),
                Cell::Num(avg.stderr),
            ])?;
        }
    }
    Ok(RunOutput::single(t))
}

fn optimize(s: &Settings) -> CliResult<RunOutput> {
    if s.search.objective == AlphaObjective::AvgEscLb {
        require_mgf(s)?;
    }
    let setup = region_setup(s, s.cfg.n_elements(), s.scheme)?;
    let opt = optimize_alpha(&s.search, &setup, &s.params)?;
    let mut main = Table::new(OPTIMUM_COLUMNS);
    main.push(&[Cell::Text(s.search.objective.name()), Cell::Num(opt.alpha_star), Cell::Num(opt.value)])?;
    let mut curve = Table::new(CURVE_COLUMNS);
    for c in &opt.curve {
        curve.push(&[Cell::Num(c.alpha), Cell::Num(c.value), Cell::Num(c.stderr)])?;
    }
    Ok(RunOutput { main, extra: vec![("curve", curve)] })
}
