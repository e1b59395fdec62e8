//! Signal/AN power split `α*` maximizing region-averaged secrecy.
//!
//! The objective is evaluated on a uniform grid over `[0, 1]`; for the
//! closed-form objective the best grid bracket is then refined by golden
//! section search. The Monte Carlo objective reuses one set of channel
//! samples for every `α`.

use std::fmt;
use std::str::FromStr;

use crate::beamform::LinkParams;
use crate::error::{invalid, Error, Result};
use crate::par::Exec;
use crate::secrecy::{average_over_region_many, RegionMetric, RegionSetup};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaObjective {
    AvgEscMc,
    AvgEscLb,
}

impl AlphaObjective {
    pub const ALL: [AlphaObjective; 2] = [AlphaObjective::AvgEscMc, AlphaObjective::AvgEscLb];

    pub fn name(self) -> &'static str {
        match self {
            AlphaObjective::AvgEscMc => "avg_esc_mc",
            AlphaObjective::AvgEscLb => "avg_esc_lb",
        }
    }

    fn metric(self) -> RegionMetric {
        match self {
            AlphaObjective::AvgEscMc => RegionMetric::EscMc,
            AlphaObjective::AvgEscLb => RegionMetric::EscLb,
        }
    }
}

impl fmt::Display for AlphaObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlphaObjective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlphaObjective::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown objective `{s}` (valid objectives: avg_esc_mc, avg_esc_lb)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSearchSpec {
    pub objective: AlphaObjective,
    pub grid_step: f64,
    pub refine: bool,
    pub refine_tol: f64,
}

impl Default for AlphaSearchSpec {
    fn default() -> Self {
        Self { objective: AlphaObjective::AvgEscLb, grid_step: 0.01, refine: true, refine_tol: 1e-4 }
    }
}

impl AlphaSearchSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(invalid(format!("grid_step must lie in (0, 0.5], got {}", self.grid_step)));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(invalid(format!("refine_tol must be > 0, got {}", self.refine_tol)));
        }
        Ok(())
    }
}

/// `{0, step, 2 step, ..., 1}`; the last point is always exactly 1.
pub fn alpha_grid(step: f64) -> Vec<f64> {
    let intervals = (1.0 / step - 1e-9).ceil() as usize;
    let mut grid: Vec<f64> = (0..intervals).map(|i| i as f64 * step).collect();
    grid.push(1.0);
    grid
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub alpha: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaOptimum {
    pub alpha_star: f64,
    pub value: f64,
    /// Standard error of `value`; zero for the closed-form objective.
    pub stderr: f64,
    pub curve: Vec<CurvePoint>,
}

/// Region-averaged objective at each `alpha`, with `μ_B` and `β` from
/// `base` (its own `α` is ignored).
pub fn region_curve(
    objective: AlphaObjective,
    setup: &RegionSetup<'_>,
    base: &LinkParams,
    alphas: &[f64],
    exec: Exec,
) -> Result<Vec<CurvePoint>> {
    let params = alphas.iter().map(|&a| base.with_alpha(a)).collect::<Result<Vec<_>>>()?;
    let avgs = average_over_region_many(objective.metric(), setup, &params, exec)?;
    Ok(alphas
        .iter()
        .zip(avgs)
        .map(|(&alpha, avg)| CurvePoint { alpha, value: avg.value, stderr: avg.stderr })
        .collect())
}

/// Maximizer of `f` on `[lo, hi]` by golden-section search, to within `tol`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// `α* = argmax_α C̄(α)`.
///
/// Grid ties go to the larger `α`. Refinement only runs for the closed-form
/// objective and only replaces the grid optimum when it improves on it.
pub fn optimize_alpha(spec: &AlphaSearchSpec, setup: &RegionSetup<'_>, base: &LinkParams) -> Result<AlphaOptimum> {
    spec.validate()?;
    let alphas = alpha_grid(spec.grid_step);
    let curve = region_curve(spec.objective, setup, base, &alphas, Exec::default())?;
    let (best_idx, best) =
        curve
            .iter()
            .enumerate()
            .fold((0, curve[0]), |(bi, b), (i, &c)| if c.value >= b.value { (i, c) } else { (bi, b) });
    let mut optimum = AlphaOptimum { alpha_star: best.alpha, value: best.value, stderr: best.stderr, curve };
    if spec.refine && spec.objective == AlphaObjective::AvgEscLb {
        let lo = alphas[best_idx.saturating_sub(1)];
        let hi = alphas[(best_idx + 1).min(alphas.len() - 1)];
        let mut failure = None;
        let (x, fx) = golden_section_max(
            |a| match region_curve(spec.objective, setup, base, &[a], Exec::default()) {
                Ok(v) => v[0].value,
                Err(e) => {
                    failure = Some(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            spec.refine_tol,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if fx > optimum.value {
            optimum.alpha_star = x;
            optimum.value = fx;
        }
    }
    Ok(optimum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arraymodel::{ArrayConfig, Location};
    use crate::freqalloc::AllocationScheme;
    use crate::secrecy::EveRegion;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_includes_both_ends() {
        let g = alpha_grid(0.01);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(alpha_grid(0.3), vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        assert_eq!(alpha_grid(0.5), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn objective_names() {
        assert_eq!("avg_esc_mc".parse::<AlphaObjective>().unwrap(), AlphaObjective::AvgEscMc);
        let err = "avg_esc".parse::<AlphaObjective>().unwrap_err().to_string();
        assert!(err.contains("avg_esc_mc") && err.contains("avg_esc_lb"));
    }

    #[test]
    fn spec_validation() {
        let mut s = AlphaSearchSpec::default();
        assert!(s.validate().is_ok());
        s.grid_step = 0.6;
        assert!(s.validate().is_err());
        s.grid_step = 0.1;
        s.refine_tol = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|a| -(a - 0.3137).powi(2), 0.0, 1.0, 1e-8);
        assert_abs_diff_eq!(x, 0.3137, epsilon = 1e-7);
        assert_abs_diff_eq!(fx, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_objective_breaks_ties_upward() {
        // Eve exactly at Bob's angle under PA: the bound is zero for every α.
        let region = EveRegion::new(vec![(44.5, 45.5)], vec![(200.0, 210.0)], 1, 1).unwrap();
        let setup = RegionSetup {
            region: &region,
            loc_b: Location::from_degrees(45.0, 120.0).unwrap(),
            cfg: ArrayConfig::new(16, 1e9, 3e6).unwrap(),
            scheme: AllocationScheme::pa(),
            trials: 1,
            seed: 0,
        };
        let base = LinkParams::from_db(0.5, 15.0, 1.0).unwrap();
        let opt = optimize_alpha(&AlphaSearchSpec::default(), &setup, &base).unwrap();
        assert!(opt.curve.iter().all(|c| c.value == 0.0));
        assert_eq!(opt.alpha_star, 1.0);
    }

    #[test]
    fn refined_value_dominates_grid() {
        let region = EveRegion::standard(6, 8).unwrap();
        let setup = RegionSetup {
            region: &region,
            loc_b: Location::from_degrees(45.0, 120.0).unwrap(),
            cfg: ArrayConfig::new(16, 1e9, 3e6).unwrap(),
            scheme: AllocationScheme::rfda_cont(10.0).unwrap(),
            trials: 1,
            seed: 0,
        };
        let base = LinkParams::from_db(0.5, 15.0, 1.0).unwrap();
        let spec = AlphaSearchSpec { grid_step: 0.05, ..Default::default() };
        let opt = optimize_alpha(&spec, &setup, &base).unwrap();
        let grid_max = opt.curve.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
        assert!(opt.value >= grid_max);
        assert!(opt.value - grid_max <= 0.05);
        assert!(opt.alpha_star > 0.0 && opt.alpha_star < 1.0);
    }
}
