//! Uniform linear frequency diverse array: geometry, per-element phase
//! shifts, steering vectors and their cross-correlation.
//!
//! The phase reference is the geometric center of the array. Element `n`
//! sits at offset `b_n = n - (N-1)/2` spacings from it and radiates at
//! `f_c + k_n Δf`, where the multipliers `k_n` come from a
//! [`FrequencyAllocation`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::freqalloc::FrequencyAllocation;

/// Propagation speed used unless overridden, in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical description of the transmit array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    n_elements: usize,
    carrier_hz: f64,
    increment_hz: f64,
    spacing_m: Option<f64>,
    wave_speed: f64,
}

impl ArrayConfig {
    /// Half-wavelength array in free space.
    pub fn new(n_elements: usize, carrier_hz: f64, increment_hz: f64) -> Result<Self> {
        if n_elements < 2 {
            return Err(invalid(format!("n_elements must be >= 2, got {n_elements}")));
        }
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(invalid(format!("carrier_hz must be > 0, got {carrier_hz}")));
        }
        if !(increment_hz >= 0.0 && increment_hz.is_finite()) {
            return Err(invalid(format!("increment_hz must be >= 0, got {increment_hz}")));
        }
        Ok(Self { n_elements, carrier_hz, increment_hz, spacing_m: None, wave_speed: SPEED_OF_LIGHT })
    }

    pub fn with_spacing(mut self, spacing_m: f64) -> Result<Self> {
        if !(spacing_m > 0.0 && spacing_m.is_finite()) {
            return Err(invalid(format!("spacing_m must be > 0, got {spacing_m}")));
        }
        self.spacing_m = Some(spacing_m);
        Ok(self)
    }

    /// Overrides the propagation speed. A spacing that was never set stays
    /// at half of the (new) wavelength.
    pub fn with_wave_speed(mut self, wave_speed: f64) -> Result<Self> {
        if !(wave_speed > 0.0 && wave_speed.is_finite()) {
            return Err(invalid(format!("wave_speed must be > 0, got {wave_speed}")));
        }
        self.wave_speed = wave_speed;
        Ok(self)
    }

    pub fn with_elements(mut self, n_elements: usize) -> Result<Self> {
        if n_elements < 2 {
            return Err(invalid(format!("n_elements must be >= 2, got {n_elements}")));
        }
        self.n_elements = n_elements;
        Ok(self)
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn increment_hz(&self) -> f64 {
        self.increment_hz
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m.unwrap_or(self.wave_speed / (2.0 * self.carrier_hz))
    }

    pub fn wave_speed(&self) -> f64 {
        self.wave_speed
    }

    /// Whether `N Δf` is small enough next to `f_c` (within a factor of ten)
    /// for the approximate phase model to hold.
    pub fn far_field_ok(&self) -> bool {
        self.n_elements as f64 * self.increment_hz <= self.carrier_hz / 10.0
    }
}

/// Target position relative to the array center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    theta_rad: f64,
    range_m: f64,
}

impl Location {
    pub fn new(theta_rad: f64, range_m: f64) -> Result<Self> {
        if !(0.0..=PI + 1e-12).contains(&theta_rad) {
            return Err(invalid(format!("angle must lie in [0, pi] rad, got {theta_rad}")));
        }
        if !(range_m > 0.0 && range_m.is_finite()) {
            return Err(invalid(format!("range must be > 0 m, got {range_m}")));
        }
        Ok(Self { theta_rad: theta_rad.min(PI), range_m })
    }

    pub fn from_degrees(theta_deg: f64, range_m: f64) -> Result<Self> {
        if !(0.0..=180.0).contains(&theta_deg) {
            return Err(invalid(format!("angle must lie in [0, 180] deg, got {theta_deg}")));
        }
        Self::new(theta_deg.to_radians(), range_m)
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_rad
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_rad.to_degrees()
    }

    pub fn range_m(&self) -> f64 {
        self.range_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    /// Keeps the `b_n k_n Δf d cosθ` cross term.
    Exact,
    /// Drops the cross term; every closed form in the crate assumes this.
    #[default]
    Approximate,
}

/// Unit-norm steering vector `h(θ, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(Vec<Complex64>);

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product `self^H other`.
    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        hermitian_dot(&self.0, other)
    }
}

pub(crate) fn hermitian_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Offset `b_n` of element `n` from the array center, in spacings.
pub fn element_offset(n: usize, count: usize) -> Result<f64> {
    if n >= count {
        return Err(invalid(format!("element index {n} out of range for {count} elements")));
    }
    Ok(offset(n, count))
}

#[inline]
fn offset(n: usize, count: usize) -> f64 {
    n as f64 - (count as f64 - 1.0) / 2.0
}

#[inline]
fn phase_unchecked(n: usize, k: f64, loc: &Location, cfg: &ArrayConfig, mode: PhaseMode) -> f64 {
    let b = offset(n, cfg.n_elements);
    let c = cfg.wave_speed;
    let d_cos = cfg.spacing_m() * loc.theta_rad.cos();
    let approx = -b * cfg.carrier_hz * d_cos + k * cfg.increment_hz * loc.range_m;
    let total = match mode {
        PhaseMode::Approximate => approx,
        PhaseMode::Exact => approx - b * k * cfg.increment_hz * d_cos,
    };
    2.0 * PI * total / c
}

fn check_alloc(cfg: &ArrayConfig, alloc: &FrequencyAllocation) -> Result<()> {
    if alloc.len() != cfg.n_elements {
        return Err(invalid(format!(
            "allocation has {} values but the array has {} elements",
            alloc.len(),
            cfg.n_elements
        )));
    }
    Ok(())
}

/// Phase of element `n` relative to the array center, in radians.
pub fn phase_shift(
    n: usize,
    loc: &Location,
    cfg: &ArrayConfig,
    alloc: &FrequencyAllocation,
    mode: PhaseMode,
) -> Result<f64> {
    check_alloc(cfg, alloc)?;
    element_offset(n, cfg.n_elements)?;
    Ok(phase_unchecked(n, alloc.values()[n], loc, cfg, mode))
}

pub fn steering_vector(
    loc: &Location,
    cfg: &ArrayConfig,
    alloc: &FrequencyAllocation,
    mode: PhaseMode,
) -> Result<SteeringVector> {
    check_alloc(cfg, alloc)?;
    let scale = 1.0 / (cfg.n_elements as f64).sqrt();
    let entries = alloc
        .values()
        .iter()
        .enumerate()
        .map(|(n, &k)| Complex64::from_polar(scale, phase_unchecked(n, k, loc, cfg, mode)))
        .collect();
    Ok(SteeringVector(entries))
}

/// `ρ = h^H(θ_E, R_E) h(θ_B, R_B)` with approximate-mode steering vectors.
pub fn cross_correlation(
    loc_e: &Location,
    loc_b: &Location,
    cfg: &ArrayConfig,
    alloc: &FrequencyAllocation,
) -> Result<Complex64> {
    let h_e = steering_vector(loc_e, cfg, alloc, PhaseMode::Approximate)?;
    let h_b = steering_vector(loc_b, cfg, alloc, PhaseMode::Approximate)?;
    Ok(h_e.inner(h_b.entries()))
}
