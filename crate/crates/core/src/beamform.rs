//! Artificial-noise beamforming toward Bob and the resulting link quality at
//! Bob and Eve.
//!
//! Alice sends `s = sqrt(α P_s) h_B x + sqrt((1-α) P_s) w` where `w` is a
//! random unit vector in the null space of `h_B`. Noise powers are
//! normalized so that `σ_B² = 1`, hence `P_s = μ_B` and `σ_E² = β`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::arraymodel::{hermitian_dot, steering_vector, ArrayConfig, Location, PhaseMode, SteeringVector};
use crate::error::{invalid, Result};
use crate::freqalloc::FrequencyAllocation;

/// Power split and noise budget of the wiretap link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    alpha: f64,
    mu_b: f64,
    beta: f64,
}

impl LinkParams {
    pub fn new(alpha: f64, mu_b: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if !(mu_b > 0.0 && mu_b.is_finite()) {
            return Err(invalid(format!("mu_b must be > 0, got {mu_b}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!("beta must be > 0, got {beta}")));
        }
        Ok(Self { alpha, mu_b, beta })
    }

    /// `μ_B` given in dB.
    pub fn from_db(alpha: f64, mu_b_db: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, db_to_linear(mu_b_db), beta)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.mu_b, self.beta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu_b(&self) -> f64 {
        self.mu_b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Unit-norm artificial-noise direction orthogonal to Bob's steering vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AnVector(Vec<Complex64>);

impl AnVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Circularly-symmetric `CN(0, 1)`: two independent `N(0, 1/2)` parts.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `w = P z / ||P z||` with `P = I - h_B h_B^H` and `z ~ CN(0, I_N)`.
pub fn make_artificial_noise<R: Rng + ?Sized>(h_b: &SteeringVector, rng: &mut R) -> AnVector {
    let h = h_b.entries();
    loop {
        let mut w: Vec<Complex64> = (0..h.len()).map(|_| complex_normal(rng)).collect();
        let proj = hermitian_dot(h, &w);
        for (wi, hi) in w.iter_mut().zip(h) {
            *wi -= hi * proj;
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A zero projection has probability zero; draw again if it happens.
        if norm >= 1e-12 {
            w.iter_mut().for_each(|z| *z /= norm);
            return AnVector(w);
        }
    }
}

/// `γ_B = α μ_B`; the artificial noise never reaches Bob.
pub fn snr_bob(params: &LinkParams) -> f64 {
    params.alpha * params.mu_b
}

/// Eve's SINR from the two channel gains `|h_E^H h_B|²` and `|h_E^H w|²`.
pub fn sinr_from_gains(corr_sq: f64, an_gain: f64, params: &LinkParams) -> f64 {
    let LinkParams { alpha, mu_b, beta } = *params;
    alpha * mu_b * corr_sq / ((1.0 - alpha) * mu_b * an_gain + beta)
}

pub fn sinr_eve(h_e: &SteeringVector, h_b: &SteeringVector, w: &AnVector, params: &LinkParams) -> f64 {
    let corr_sq = h_e.inner(h_b.entries()).norm_sqr();
    let an_gain = h_e.inner(w.entries()).norm_sqr();
    sinr_from_gains(corr_sq, an_gain, params)
}

/// Eve's SINR written with explicit powers rather than the normalized
/// `(μ_B, β)` pair.
pub fn sinr_eve_physical(
    h_e: &SteeringVector,
    h_b: &SteeringVector,
    w: &AnVector,
    alpha: f64,
    power: f64,
    sigma_e_sq: f64,
) -> f64 {
    let corr_sq = h_e.inner(h_b.entries()).norm_sqr();
    let an_gain = h_e.inner(w.entries()).norm_sqr();
    alpha * power * corr_sq / ((1.0 - alpha) * power * an_gain + sigma_e_sq)
}

/// Which receiver's noise floor applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    /// Noise variance 1.
    Bob,
    /// Noise variance β.
    Eve,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnMode {
    /// A new `w` for every symbol.
    Fresh,
    /// One `w`, drawn up front, for the whole block.
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolOptions {
    pub receiver: Receiver,
    pub an_mode: AnMode,
    pub add_noise: bool,
}

impl SymbolOptions {
    pub fn at(receiver: Receiver) -> Self {
        Self { receiver, an_mode: AnMode::Fresh, add_noise: true }
    }
}

/// Baseband samples seen at `loc` for a block of unit-power symbols.
///
/// Per symbol: `sqrt(α P_s) h^H h_B x + sqrt((1-α) P_s) h^H w + n`.
#[allow(clippy::too_many_arguments)]
pub fn received_symbols<R: Rng + ?Sized>(
    symbols: &[Complex64],
    loc: &Location,
    h_b: &SteeringVector,
    cfg: &ArrayConfig,
    alloc: &FrequencyAllocation,
    params: &LinkParams,
    opts: &SymbolOptions,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if symbols.is_empty() {
        return Ok(Vec::new());
    }
    let mean_power = symbols.iter().map(|x| x.norm_sqr()).sum::<f64>() / symbols.len() as f64;
    if (mean_power - 1.0).abs() > 0.25 {
        return Err(invalid(format!("symbols must have unit average power, got {mean_power}")));
    }
    if h_b.len() != cfg.n_elements() {
        return Err(invalid("Bob's steering vector does not match the array size"));
    }
    let h = steering_vector(loc, cfg, alloc, PhaseMode::Approximate)?;
    let power = params.mu_b;
    let signal_gain = (params.alpha * power).sqrt() * h.inner(h_b.entries());
    let an_amp = ((1.0 - params.alpha) * power).sqrt();
    let noise_sd = match opts.receiver {
        Receiver::Bob => 1.0,
        Receiver::Eve => params.beta.sqrt(),
    };
    let mut fixed = match opts.an_mode {
        AnMode::Fixed => Some(h.inner(make_artificial_noise(h_b, rng).entries())),
        AnMode::Fresh => None,
    };
    let out = symbols
        .iter()
        .map(|&x| {
            let leak = match fixed.as_mut() {
                Some(g) => *g,
                None => h.inner(make_artificial_noise(h_b, rng).entries()),
            };
            let noise = if opts.add_noise { complex_normal(rng) * noise_sd } else { Complex64::new(0.0, 0.0) };
            signal_gain * x + an_amp * leak + noise
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freqalloc::{draw_allocation, AllocationScheme};
    use crate::stream::{Purpose, StreamFamily};
    use approx::assert_abs_diff_eq;

    fn setup(scheme: AllocationScheme, n: usize, seed: u64) -> (ArrayConfig, FrequencyAllocation, SteeringVector) {
        let cfg = ArrayConfig::new(n, 1e9, 3e6).unwrap();
        let alloc = draw_allocation(&scheme, n, &mut StreamFamily::new(seed).rng(Purpose::Allocation, 0, 0)).unwrap();
        let bob = Location::from_degrees(45.0, 120.0).unwrap();
        let h_b = steering_vector(&bob, &cfg, &alloc, PhaseMode::Approximate).unwrap();
        (cfg, alloc, h_b)
    }

    #[test]
    fn params_validation() {
        assert!(LinkParams::new(1.1, 1.0, 1.0).is_err());
        assert!(LinkParams::new(0.5, 0.0, 1.0).is_err());
        assert!(LinkParams::new(0.5, 1.0, 0.0).is_err());
        let p = LinkParams::from_db(0.5, 15.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.mu_b(), 31.6227766, epsilon = 1e-6);
    }

    #[test]
    fn snr_bob_values() {
        assert_eq!(snr_bob(&LinkParams::new(0.0, 31.6228, 1.0).unwrap()), 0.0);
        assert_eq!(snr_bob(&LinkParams::new(1.0, 31.6228, 1.0).unwrap()), 31.6228);
        assert_abs_diff_eq!(snr_bob(&LinkParams::new(0.5, 31.6228, 1.0).unwrap()), 15.8114, epsilon = 1e-12);
    }

    #[test]
    fn an_vector_is_unit_and_nulls_bob() {
        let (_, _, h_b) = setup(AllocationScheme::rfda_cont(10.0).unwrap(), 32, 3);
        let mut rng = StreamFamily::new(3).rng(Purpose::ArtificialNoise, 0, 0);
        for _ in 0..100 {
            let w = make_artificial_noise(&h_b, &mut rng);
            let norm = w.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            assert!(h_b.inner(w.entries()).norm() <= 1e-10);
        }
    }

    #[test]
    fn colocated_eve_sees_bob_snr_over_beta() {
        let (_, _, h_b) = setup(AllocationScheme::lfda(), 16, 0);
        let w = make_artificial_noise(&h_b, &mut StreamFamily::new(1).rng(Purpose::ArtificialNoise, 0, 0));
        for beta in [0.5, 1.0, 3.0] {
            let p = LinkParams::new(0.4, 20.0, beta).unwrap();
            assert_abs_diff_eq!(sinr_eve(&h_b, &h_b, &w, &p), 0.4 * 20.0 / beta, epsilon = 1e-9);
        }
        let p = LinkParams::new(0.4, 20.0, 1.0).unwrap();
        assert_abs_diff_eq!(sinr_eve(&h_b, &h_b, &w, &p), snr_bob(&p), epsilon = 1e-9);
        assert_eq!(sinr_eve(&h_b, &h_b, &w, &p.with_alpha(0.0).unwrap()), 0.0);
    }

    #[test]
    fn pa_eve_behind_bob_matches_bob() {
        let cfg = ArrayConfig::new(32, 1e9, 3e6).unwrap();
        let alloc = AllocationScheme::pa().fixed(32).unwrap();
        let bob = Location::from_degrees(45.0, 120.0).unwrap();
        let eve = Location::from_degrees(45.0, 239.0).unwrap();
        let h_b = steering_vector(&bob, &cfg, &alloc, PhaseMode::Approximate).unwrap();
        let h_e = steering_vector(&eve, &cfg, &alloc, PhaseMode::Approximate).unwrap();
        let p = LinkParams::from_db(0.5, 15.0, 1.0).unwrap();
        let w = make_artificial_noise(&h_b, &mut StreamFamily::new(5).rng(Purpose::ArtificialNoise, 0, 0));
        assert_abs_diff_eq!(sinr_eve(&h_e, &h_b, &w, &p), snr_bob(&p), epsilon = 1e-9);
    }

    #[test]
    fn only_noise_ratio_matters() {
        let (cfg, alloc, h_b) = setup(AllocationScheme::rfda_disc(6).unwrap(), 12, 8);
        let eve = Location::from_degrees(70.0, 200.0).unwrap();
        let h_e = steering_vector(&eve, &cfg, &alloc, PhaseMode::Approximate).unwrap();
        let w = make_artificial_noise(&h_b, &mut StreamFamily::new(8).rng(Purpose::ArtificialNoise, 0, 0));
        let p = LinkParams::new(0.3, 12.0, 2.5).unwrap();
        let normalized = sinr_eve(&h_e, &h_b, &w, &p);
        for sigma_b_sq in [1.0, 0.01, 7.3, 1e4] {
            let physical = sinr_eve_physical(&h_e, &h_b, &w, 0.3, 12.0 * sigma_b_sq, 2.5 * sigma_b_sq);
            assert_abs_diff_eq!(physical, normalized, epsilon = 1e-12 * normalized.max(1.0));
        }
    }

    #[test]
    fn eve_sinr_grows_with_alpha() {
        let (cfg, alloc, h_b) = setup(AllocationScheme::rfda_cont(10.0).unwrap(), 16, 4);
        let eve = Location::from_degrees(60.0, 90.0).unwrap();
        let h_e = steering_vector(&eve, &cfg, &alloc, PhaseMode::Approximate).unwrap();
        let w = make_artificial_noise(&h_b, &mut StreamFamily::new(4).rng(Purpose::ArtificialNoise, 0, 0));
        let base = LinkParams::from_db(0.0, 15.0, 1.0).unwrap();
        let mut last = -1.0;
        for i in 0..=100 {
            let g = sinr_eve(&h_e, &h_b, &w, &base.with_alpha(i as f64 / 100.0).unwrap());
            assert!(g >= last);
            last = g;
        }
    }

    #[test]
    fn bob_receives_clean_scaled_symbols() {
        let (cfg, alloc, h_b) = setup(AllocationScheme::rfda_cont(10.0).unwrap(), 32, 6);
        let bob = Location::from_degrees(45.0, 120.0).unwrap();
        let qpsk: Vec<Complex64> = (0..8)
            .map(|i| Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 + i as f64 * std::f64::consts::FRAC_PI_2))
            .collect();
        let p = LinkParams::new(1.0, 31.6228, 1.0).unwrap();
        let opts = SymbolOptions { receiver: Receiver::Bob, an_mode: AnMode::Fresh, add_noise: false };
        let mut rng = StreamFamily::new(6).rng(Purpose::ReceiverNoise, 0, 0);
        let y = received_symbols(&qpsk, &bob, &h_b, &cfg, &alloc, &p, &opts, &mut rng).unwrap();
        for (yi, xi) in y.iter().zip(&qpsk) {
            assert_abs_diff_eq!((yi - xi * 31.6228f64.sqrt()).norm(), 0.0, epsilon = 1e-12);
        }
        // With half the power on AN the leak into Bob stays at round-off.
        let p = p.with_alpha(0.5).unwrap();
        let y = received_symbols(&qpsk, &bob, &h_b, &cfg, &alloc, &p, &opts, &mut rng).unwrap();
        for (yi, xi) in y.iter().zip(&qpsk) {
            assert!((yi - xi * (0.5 * 31.6228f64).sqrt()).norm() <= 1e-10);
        }
        assert!(received_symbols(&[], &bob, &h_b, &cfg, &alloc, &p, &opts, &mut rng).unwrap().is_empty());
        let loud = vec![Complex64::new(3.0, 0.0); 4];
        assert!(received_symbols(&loud, &bob, &h_b, &cfg, &alloc, &p, &opts, &mut rng).is_err());
    }
}
