//! Secrecy capacity of the AN-aided link: Monte Carlo ergodic secrecy,
//! the closed-form lower bound and its large-array limit, the
//! phased-array and linear-FDA benchmarks, and averages over a region of
//! candidate eavesdropper positions.
//!
//! The closed forms all reduce to one expression in the mean squared
//! correlation `e = E|h_E^H h_B|²`:
//!
//! ```text
//! C(e) = log2(1 + αμ) - log2(1 + αμ e / ((1-α) μ η (1-e) + β)),   η = 1/(N-1)
//! ```
//!
//! with `e` taken from the exact second moment (lower bound), from the
//! squared first moment (asymptotic), or from the deterministic correlation
//! of the PA / LFDA arrays.

use num_complex::Complex64;

use crate::arraymodel::{steering_vector, ArrayConfig, Location, PhaseMode};
use crate::beamform::{make_artificial_noise, sinr_from_gains, snr_bob, LinkParams};
use crate::error::{invalid, Error, Result};
use crate::freqalloc::{dirichlet_kernel, draw_allocation, mgf_on_imaginary_axis, AllocationKind, AllocationScheme};
use crate::par::Exec;
use crate::stream::{Purpose, StreamFamily};

/// Below this distance from 1, `e` is treated as exactly 1 by the rational
/// form of the bound.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// `log2(1 + γ)` in bits.
pub fn shannon_capacity(gamma: f64) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(invalid(format!("SNR must be >= 0, got {gamma}")));
    }
    Ok(gamma.ln_1p() / std::f64::consts::LN_2)
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Dimensionless angle (`q`) and range (`p`) offsets of Eve from Bob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetPair {
    pub q: f64,
    pub p: f64,
}

pub fn offsets(loc_e: &Location, loc_b: &Location, cfg: &ArrayConfig) -> OffsetPair {
    let c = cfg.wave_speed();
    let q = cfg.carrier_hz() * cfg.spacing_m() * (loc_e.theta_rad().cos() - loc_b.theta_rad().cos()) / c;
    let p = cfg.increment_hz() * (loc_e.range_m() - loc_b.range_m()) / c;
    OffsetPair { q, p }
}

/// `η = 1 / tr[(I - h h^H)²] = 1/(N-1)`: the projector onto the null space
/// of a unit vector is idempotent with rank `N-1`.
pub fn projector_trace_eta(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("eta needs N >= 2, got {n}")));
    }
    Ok(1.0 / (n as f64 - 1.0))
}

fn clamp_unit(e: f64) -> f64 {
    if (-DEGENERATE_EPS..0.0).contains(&e) {
        0.0
    } else if e > 1.0 && e <= 1.0 + DEGENERATE_EPS {
        1.0
    } else {
        e
    }
}

fn require_mgf(scheme: &AllocationScheme, op: &'static str) -> Result<()> {
    if scheme.kind() == AllocationKind::Lfda {
        return Err(Error::UnsupportedScheme { op, scheme: "lfda" });
    }
    Ok(())
}

/// `E_k[|ρ|²] = (N(1-Φ²) + S_N²(q) Φ²) / N²` for i.i.d. `k_n`.
pub fn mean_rho_sq(op: OffsetPair, scheme: &AllocationScheme, n: usize) -> Result<f64> {
    require_mgf(scheme, "mean_rho_sq")?;
    let nf = n as f64;
    let phi_sq = mgf_on_imaginary_axis(scheme, op.p)?.powi(2);
    let s_sq = dirichlet_kernel(op.q, n).powi(2);
    Ok(clamp_unit((nf * (1.0 - phi_sq) + s_sq * phi_sq) / (nf * nf)))
}

/// `|E_k[ρ]|² = S_N²(q) Φ² / N²`, the value `E|ρ|²` concentrates on for
/// large arrays.
pub fn asymptotic_rho_sq(op: OffsetPair, scheme: &AllocationScheme, n: usize) -> Result<f64> {
    require_mgf(scheme, "asymptotic_rho_sq")?;
    let nf = n as f64;
    let phi_sq = mgf_on_imaginary_axis(scheme, op.p)?.powi(2);
    let s_sq = dirichlet_kernel(op.q, n).powi(2);
    Ok(clamp_unit(s_sq * phi_sq / (nf * nf)))
}

/// Secrecy rate with `|h_E^H h_B|²` replaced by `e` and the AN leakage by
/// its average `η(1-e)`.
pub fn plugged_secrecy(e: f64, eta: f64, params: &LinkParams) -> f64 {
    let am = params.alpha() * params.mu_b();
    let interference = (1.0 - params.alpha()) * params.mu_b() * eta * (1.0 - e) + params.beta();
    log2_1p(am) - log2_1p(am * e / interference)
}

/// The same bound as one ratio of polynomials in `α`, written through
/// `F = 1/(η(1-e))`. Falls back to the `e -> 1` limit
/// `log2(β(1+αμ)/(αμ+β))` where `F` blows up.
pub fn lower_bound_rational(e: f64, eta: f64, params: &LinkParams) -> f64 {
    let (a, mu, beta) = (params.alpha(), params.mu_b(), params.beta());
    if 1.0 - e < DEGENERATE_EPS {
        return (beta * (1.0 + a * mu) / (a * mu + beta)).log2();
    }
    let f = 1.0 / (eta * (1.0 - e));
    let num = -a * a * mu * mu + a * mu * (beta * f + mu - 1.0) + beta * f + mu;
    let den = a * mu * (f - 1.0 / eta - 1.0) + beta * f + mu;
    (num / den).log2()
}

/// Closed-form lower bound on the ergodic secrecy capacity.
pub fn esc_lower_bound(
    loc_e: &Location,
    loc_b: &Location,
    cfg: &ArrayConfig,
    scheme: &AllocationScheme,
    params: &LinkParams,
) -> Result<f64> {
    let n = cfg.n_elements();
    let e = mean_rho_sq(offsets(loc_e, loc_b, cfg), scheme, n)?;
    Ok(plugged_secrecy(e, projector_trace_eta(n)?, params))
}

/// Large-array ergodic secrecy capacity.
pub fn esc_asymptotic(
    loc_e: &Location,
    loc_b: &Location,
    cfg: &ArrayConfig,
    scheme: &AllocationScheme,
    params: &LinkParams,
) -> Result<f64> {
    let n = cfg.n_elements();
    let e = asymptotic_rho_sq(offsets(loc_e, loc_b, cfg), scheme, n)?;
    Ok(plugged_secrecy(e, projector_trace_eta(n)?, params))
}

fn benchmark_capacity(x: f64, cfg: &ArrayConfig, params: &LinkParams) -> f64 {
    let n = cfg.n_elements();
    let r = (dirichlet_kernel(x, n) / n as f64).powi(2);
    plugged_secrecy(clamp_unit(r), 1.0 / (n as f64 - 1.0), params)
}

/// Phased array: `ρ = S_N(q)/N`, independent of range.
pub fn capacity_pa(loc_e: &Location, loc_b: &Location, cfg: &ArrayConfig, params: &LinkParams) -> f64 {
    benchmark_capacity(offsets(loc_e, loc_b, cfg).q, cfg, params)
}

/// Linear FDA: `ρ = S_N(q-p)/N`, peaking wherever `q - p` is an integer.
pub fn capacity_lfda(loc_e: &Location, loc_b: &Location, cfg: &ArrayConfig, params: &LinkParams) -> f64 {
    let op = offsets(loc_e, loc_b, cfg);
    benchmark_capacity(op.q - op.p, cfg, params)
}

/// Closed-form pair `(C_LB, C_∞)` for any scheme. The deterministic arrays
/// have no allocation randomness, so both entries equal their benchmark
/// capacity.
pub fn closed_forms(
    loc_e: &Location,
    loc_b: &Location,
    cfg: &ArrayConfig,
    scheme: &AllocationScheme,
    params: &LinkParams,
) -> Result<(f64, f64)> {
    match scheme.kind() {
        AllocationKind::Pa => {
            let c = capacity_pa(loc_e, loc_b, cfg, params);
            Ok((c, c))
        }
        AllocationKind::Lfda => {
            let c = capacity_lfda(loc_e, loc_b, cfg, params);
            Ok((c, c))
        }
        _ => Ok((
            esc_lower_bound(loc_e, loc_b, cfg, scheme, params)?,
            esc_asymptotic(loc_e, loc_b, cfg, scheme, params)?,
        )),
    }
}

/// Per-trial channel gains at Eve: `|h_E^H h_B|²` and `|h_E^H w|²`.
///
/// Neither depends on `α`, `μ_B` or `β`, so one set of samples serves every
/// link setting (common random numbers).
#[derive(Debug, Clone, PartialEq)]
pub struct EveChannelSamples {
    corr_sq: Vec<f64>,
    an_gain: Vec<f64>,
}

/// Ergodic secrecy estimate from a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscEstimate {
    pub c_bob: f64,
    pub c_eve_mean: f64,
    pub esc: f64,
    pub esc_stderr: f64,
}

impl EveChannelSamples {
    pub fn len(&self) -> usize {
        self.corr_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corr_sq.is_empty()
    }

    pub fn corr_sq(&self) -> &[f64] {
        &self.corr_sq
    }

    pub fn an_gain(&self) -> &[f64] {
        &self.an_gain
    }

    /// Mean and variance of Eve's capacity over the samples.
    fn eve_capacity_moments(&self, params: &LinkParams) -> (f64, f64) {
        let t = self.len() as f64;
        let ce: Vec<f64> =
            self.corr_sq.iter().zip(&self.an_gain).map(|(&x, &y)| log2_1p(sinr_from_gains(x, y, params))).collect();
        let mean = ce.iter().sum::<f64>() / t;
        let var = if self.len() > 1 { ce.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (t - 1.0) } else { 0.0 };
        (mean, var)
    }

    pub fn estimate(&self, params: &LinkParams) -> EscEstimate {
        let c_bob = log2_1p(snr_bob(params));
        let (c_eve_mean, var) = self.eve_capacity_moments(params);
        EscEstimate { c_bob, c_eve_mean, esc: c_bob - c_eve_mean, esc_stderr: (var / self.len() as f64).sqrt() }
    }
}

/// Draws `trials` independent `(k, z)` pairs and records Eve's gains.
///
/// Trial `t` uses allocation stream `(Allocation, context, t)` and AN stream
/// `(ArtificialNoise, context, t)` of `streams`.
#[allow(clippy::too_many_arguments)]
pub fn sample_eve_channel(
    loc_e: &Location,
    loc_b: &Location,
    cfg: &ArrayConfig,
    scheme: &AllocationScheme,
    trials: usize,
    streams: StreamFamily,
    context: u64,
    exec: Exec,
) -> Result<EveChannelSamples> {
    if trials == 0 {
        return Err(invalid("at least one Monte Carlo trial is required"));
    }
    let n = cfg.n_elements();
    let fixed = if scheme.is_random() { None } else { Some(scheme.fixed(n)?) };
    let gains = exec.map_indexed(trials, |t| -> Result<(f64, f64)> {
        let drawn;
        let alloc = match &fixed {
            Some(a) => a,
            None => {
                let mut rng = streams.rng(Purpose::Allocation, context, t as u64);
                drawn = draw_allocation(scheme, n, &mut rng)?;
                &drawn
            }
        };
        let h_b = steering_vector(loc_b, cfg, alloc, PhaseMode::Approximate)?;
        let h_e = steering_vector(loc_e, cfg, alloc, PhaseMode::Approximate)?;
        let w = make_artificial_noise(&h_b, &mut streams.rng(Purpose::ArtificialNoise, context, t as u64));
        let rho: Complex64 = h_e.inner(h_b.entries());
        Ok((rho.norm_sqr(), h_e.inner(w.entries()).norm_sqr()))
    });
    let mut corr_sq = Vec::with_capacity(trials);
    let mut an_gain = Vec::with_capacity(trials);
    for g in gains {
        let (x, y) = g?;
        corr_sq.push(x);
        an_gain.push(y);
    }
    Ok(EveChannelSamples { corr_sq, an_gain })
}

/// Everything known about the secrecy of one Eve position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyReport {
    pub c_bob: f64,
    pub c_eve_mean: f64,
    pub esc: f64,
    /// `max(esc, 0)`; negative estimates only arise from sampling noise.
    pub esc_clamped: f64,
    pub esc_stderr: f64,
    pub c_lb: f64,
    pub c_asym: f64,
    pub trials: usize,
}

impl SecrecyReport {
    pub fn from_samples(samples: &EveChannelSamples, params: &LinkParams, closed: (f64, f64)) -> Self {
        let est = samples.estimate(params);
        Self {
            c_bob: est.c_bob,
            c_eve_mean: est.c_eve_mean,
            esc: est.esc,
            esc_clamped: est.esc.max(0.0),
            esc_stderr: est.esc_stderr,
            c_lb: closed.0,
            c_asym: closed.1,
            trials: samples.len(),
        }
    }
}

/// Monte Carlo ergodic secrecy capacity, averaging over both the frequency
/// allocation and the AN draw.
#[allow(clippy::too_many_arguments)]
pub fn esc_monte_carlo(
    loc_e: &Location,
    loc_b: &Location,
    cfg: &ArrayConfig,
    scheme: &AllocationScheme,
    params: &LinkParams,
    trials: usize,
    seed: u64,
) -> Result<SecrecyReport> {
    let samples = sample_eve_channel(loc_e, loc_b, cfg, scheme, trials, StreamFamily::new(seed), 0, Exec::default())?;
    let closed = closed_forms(loc_e, loc_b, cfg, scheme, params)?;
    Ok(SecrecyReport::from_samples(&samples, params, closed))
}

/// Candidate eavesdropper positions: a union of angle intervals crossed
/// with a union of range intervals, sampled on a midpoint grid with equal
/// cell weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EveRegion {
    theta_intervals_deg: Vec<(f64, f64)>,
    range_intervals_m: Vec<(f64, f64)>,
    grid_theta: usize,
    grid_range: usize,
}

impl EveRegion {
    pub fn new(
        theta_intervals_deg: Vec<(f64, f64)>,
        range_intervals_m: Vec<(f64, f64)>,
        grid_theta: usize,
        grid_range: usize,
    ) -> Result<Self> {
        if theta_intervals_deg.is_empty() || range_intervals_m.is_empty() {
            return Err(invalid("region needs at least one angle and one range interval"));
        }
        if grid_theta == 0 || grid_range == 0 {
            return Err(invalid("region grid counts must be >= 1"));
        }
        for &(lo, hi) in &theta_intervals_deg {
            if !(lo < hi && lo >= 0.0 && hi <= 180.0) {
                return Err(invalid(format!("bad angle interval [{lo}, {hi}] deg")));
            }
        }
        for &(lo, hi) in &range_intervals_m {
            if !(lo < hi && lo >= 0.0 && hi.is_finite()) {
                return Err(invalid(format!("bad range interval [{lo}, {hi}] m")));
            }
        }
        Ok(Self { theta_intervals_deg, range_intervals_m, grid_theta, grid_range })
    }

    /// The region used for the power-allocation study: everything within
    /// 250 m except a 2° by 2 m box around Bob at (45°, 120 m).
    pub fn standard(grid_theta: usize, grid_range: usize) -> Result<Self> {
        Self::new(vec![(0.0, 44.0), (46.0, 180.0)], vec![(0.0, 119.0), (121.0, 250.0)], grid_theta, grid_range)
    }

    pub fn theta_intervals_deg(&self) -> &[(f64, f64)] {
        &self.theta_intervals_deg
    }

    pub fn range_intervals_m(&self) -> &[(f64, f64)] {
        &self.range_intervals_m
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.grid_theta, self.grid_range)
    }

    pub fn contains(&self, loc: &Location) -> bool {
        let t = loc.theta_deg();
        let r = loc.range_m();
        self.theta_intervals_deg.iter().any(|&(lo, hi)| (lo..=hi).contains(&t))
            && self.range_intervals_m.iter().any(|&(lo, hi)| (lo..=hi).contains(&r))
    }

    pub fn cell_count(&self) -> usize {
        self.grid_theta * self.grid_range
    }

    /// Cell midpoints, angle-major.
    pub fn cells(&self) -> Result<Vec<Location>> {
        let thetas = union_midpoints(&self.theta_intervals_deg, self.grid_theta);
        let ranges = union_midpoints(&self.range_intervals_m, self.grid_range);
        thetas.iter().flat_map(|&t| ranges.iter().map(move |&r| Location::from_degrees(t, r))).collect()
    }
}

/// `count` equally spaced midpoints over the total length of a union of
/// intervals.
fn union_midpoints(intervals: &[(f64, f64)], count: usize) -> Vec<f64> {
    let total: f64 = intervals.iter().map(|(lo, hi)| hi - lo).sum();
    (0..count)
        .map(|i| {
            let mut u = (i as f64 + 0.5) * total / count as f64;
            for &(lo, hi) in intervals {
                if u <= hi - lo {
                    return lo + u;
                }
                u -= hi - lo;
            }
            let &(_, hi) = intervals.last().expect("non-empty");
            hi
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionMetric {
    EscMc,
    EscLb,
    EscAsym,
    Pa,
    Lfda,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionAverage {
    pub value: f64,
    /// Zero for the closed-form metrics.
    pub stderr: f64,
}

/// Shared inputs of a region average.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSetup<'a> {
    pub region: &'a EveRegion,
    pub loc_b: Location,
    pub cfg: ArrayConfig,
    pub scheme: AllocationScheme,
    pub trials: usize,
    pub seed: u64,
}

/// Region average of `metric`, evaluated for every entry of `params` from
/// one pass over the region. Monte Carlo cells reuse the same samples for
/// all entries; cell `i` draws from context `i` of the seed's streams.
pub fn average_over_region_many(
    metric: RegionMetric,
    setup: &RegionSetup<'_>,
    params: &[LinkParams],
    exec: Exec,
) -> Result<Vec<RegionAverage>> {
    if setup.region.contains(&setup.loc_b) {
        return Err(invalid("the Eve region must exclude Bob's location"));
    }
    let cells = setup.region.cells()?;
    if cells.is_empty() {
        return Err(invalid("empty Eve region"));
    }
    let streams = StreamFamily::new(setup.seed);
    let per_cell = exec.map_indexed(cells.len(), |i| -> Result<Vec<(f64, f64)>> {
        let loc_e = &cells[i];
        let cfg = &setup.cfg;
        match metric {
            RegionMetric::EscMc => {
                let samples = sample_eve_channel(
                    loc_e,
                    &setup.loc_b,
                    cfg,
                    &setup.scheme,
                    setup.trials,
                    streams,
                    i as u64,
                    Exec::Sequential,
                )?;
                Ok(params
                    .iter()
                    .map(|p| {
                        let est = samples.estimate(p);
                        (est.esc, est.esc_stderr.powi(2))
                    })
                    .collect())
            }
            RegionMetric::EscLb | RegionMetric::EscAsym => {
                let op = offsets(loc_e, &setup.loc_b, cfg);
                let n = cfg.n_elements();
                let e = if metric == RegionMetric::EscLb {
                    mean_rho_sq(op, &setup.scheme, n)?
                } else {
                    asymptotic_rho_sq(op, &setup.scheme, n)?
                };
                let eta = projector_trace_eta(n)?;
                Ok(params.iter().map(|p| (plugged_secrecy(e, eta, p), 0.0)).collect())
            }
            RegionMetric::Pa => Ok(params.iter().map(|p| (capacity_pa(loc_e, &setup.loc_b, cfg, p), 0.0)).collect()),
            RegionMetric::Lfda => {
                Ok(params.iter().map(|p| (capacity_lfda(loc_e, &setup.loc_b, cfg, p), 0.0)).collect())
            }
        }
    });
    let count = cells.len() as f64;
    let mut sums = vec![(0.0, 0.0); params.len()];
    for cell in per_cell {
        for (acc, (v, var)) in sums.iter_mut().zip(cell?) {
            acc.0 += v;
            acc.1 += var;
        }
    }
    Ok(sums.into_iter().map(|(v, var)| RegionAverage { value: v / count, stderr: var.sqrt() / count }).collect())
}

/// Uniform average of `metric` over `region`.
#[allow(clippy::too_many_arguments)]
pub fn average_over_region(
    metric: RegionMetric,
    region: &EveRegion,
    loc_b: &Location,
    cfg: &ArrayConfig,
    scheme: &AllocationScheme,
    params: &LinkParams,
    trials: usize,
    seed: u64,
) -> Result<RegionAverage> {
    let setup = RegionSetup { region, loc_b: *loc_b, cfg: *cfg, scheme: *scheme, trials, seed };
    Ok(average_over_region_many(metric, &setup, std::slice::from_ref(params), Exec::default())?[0])
}
