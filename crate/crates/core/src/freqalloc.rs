//! Frequency-allocation schemes and the statistics of the multipliers `k_n`.
//!
//! | scheme      | `k_n`                                          |
//! |-------------|------------------------------------------------|
//! | `pa`        | 0                                              |
//! | `lfda`      | `b_n`                                          |
//! | `rfda-cont` | i.i.d. uniform on `[-M/2, M/2]`                |
//! | `rfda-disc` | i.i.d. uniform on `{-(M-1)/2, ..., (M-1)/2}`   |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Fractional distance to the nearest integer below which removable
/// singularities are replaced by their analytic limit.
pub const SINGULARITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllocationKind {
    Pa,
    Lfda,
    RfdaCont,
    RfdaDisc,
}

impl AllocationKind {
    pub const ALL: [AllocationKind; 4] =
        [AllocationKind::Pa, AllocationKind::Lfda, AllocationKind::RfdaCont, AllocationKind::RfdaDisc];

    pub fn name(self) -> &'static str {
        match self {
            AllocationKind::Pa => "pa",
            AllocationKind::Lfda => "lfda",
            AllocationKind::RfdaCont => "rfda-cont",
            AllocationKind::RfdaDisc => "rfda-disc",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, AllocationKind::RfdaCont | AllocationKind::RfdaDisc)
    }
}

impl fmt::Display for AllocationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AllocationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AllocationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}` (expected pa | lfda | rfda-cont | rfda-disc)")))
    }
}

/// A scheme together with its bandwidth parameter `M` where one applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationScheme {
    kind: AllocationKind,
    bandwidth: Option<f64>,
}

impl AllocationScheme {
    /// Validates `bandwidth` against `kind`. Deterministic schemes ignore it.
    pub fn new(kind: AllocationKind, bandwidth: Option<f64>) -> Result<Self> {
        match kind {
            AllocationKind::Pa => Ok(Self::pa()),
            AllocationKind::Lfda => Ok(Self::lfda()),
            AllocationKind::RfdaCont => {
                let m =
                    bandwidth.ok_or_else(|| Error::Config("rfda-cont requires the bandwidth parameter M".into()))?;
                Self::rfda_cont(m)
            }
            AllocationKind::RfdaDisc => {
                let m =
                    bandwidth.ok_or_else(|| Error::Config("rfda-disc requires the bandwidth parameter M".into()))?;
                if m.fract() != 0.0 || m > u32::MAX as f64 {
                    return Err(Error::Config(format!("rfda-disc needs an integer M >= 2, got {m}")));
                }
                Self::rfda_disc(m as u32)
            }
        }
    }

    pub fn pa() -> Self {
        Self { kind: AllocationKind::Pa, bandwidth: None }
    }

    pub fn lfda() -> Self {
        Self { kind: AllocationKind::Lfda, bandwidth: None }
    }

    pub fn rfda_cont(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Config(format!("rfda-cont needs M > 0, got {m}")));
        }
        Ok(Self { kind: AllocationKind::RfdaCont, bandwidth: Some(m) })
    }

    pub fn rfda_disc(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(format!("rfda-disc needs an integer M >= 2, got {m}")));
        }
        Ok(Self { kind: AllocationKind::RfdaDisc, bandwidth: Some(m as f64) })
    }

    pub fn kind(&self) -> AllocationKind {
        self.kind
    }

    pub fn bandwidth(&self) -> Option<f64> {
        self.bandwidth
    }

    pub fn is_random(&self) -> bool {
        self.kind.is_random()
    }

    /// Whether `k` lies in the support of this scheme for element `n` of
    /// `count`.
    pub fn supports(&self, n: usize, count: usize, k: f64) -> bool {
        const TOL: f64 = 1e-12;
        match (self.kind, self.bandwidth) {
            (AllocationKind::Pa, _) => k == 0.0,
            (AllocationKind::Lfda, _) => (k - centered(n, count)).abs() <= TOL,
            (AllocationKind::RfdaCont, Some(m)) => k.abs() <= m / 2.0 + TOL,
            (AllocationKind::RfdaDisc, Some(m)) => {
                let shifted = k + (m - 1.0) / 2.0;
                (shifted - shifted.round()).abs() <= TOL && shifted > -0.5 && shifted < m - 0.5
            }
            _ => false,
        }
    }

    /// The allocation of a deterministic scheme.
    pub fn fixed(&self, count: usize) -> Result<FrequencyAllocation> {
        let values = match self.kind {
            AllocationKind::Pa => vec![0.0; count],
            AllocationKind::Lfda => (0..count).map(|n| centered(n, count)).collect(),
            _ => return Err(Error::UnsupportedScheme { op: "fixed allocation", scheme: self.kind.name() }),
        };
        Ok(FrequencyAllocation { scheme: *self, values })
    }
}

fn centered(n: usize, count: usize) -> f64 {
    n as f64 - (count as f64 - 1.0) / 2.0
}

/// One realization of the per-element multipliers `k_0 .. k_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyAllocation {
    scheme: AllocationScheme,
    values: Vec<f64>,
}

impl FrequencyAllocation {
    pub fn new(scheme: AllocationScheme, values: Vec<f64>) -> Result<Self> {
        let count = values.len();
        if let Some((n, k)) = values.iter().enumerate().find(|&(n, &k)| !scheme.supports(n, count, k)) {
            return Err(invalid(format!("k_{n} = {k} is outside the support of {}", scheme.kind())));
        }
        Ok(Self { scheme, values })
    }

    pub fn scheme(&self) -> &AllocationScheme {
        &self.scheme
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Element frequencies `f_c + k_n Δf`.
    pub fn frequencies(&self, carrier_hz: f64, increment_hz: f64) -> Vec<f64> {
        self.values.iter().map(|k| carrier_hz + k * increment_hz).collect()
    }
}

/// Draws one allocation. Deterministic schemes never touch `rng`.
pub fn draw_allocation<R: Rng + ?Sized>(
    scheme: &AllocationScheme,
    count: usize,
    rng: &mut R,
) -> Result<FrequencyAllocation> {
    if count < 2 {
        return Err(invalid(format!("an array needs at least 2 elements, got {count}")));
    }
    let values = match (scheme.kind, scheme.bandwidth) {
        (AllocationKind::Pa | AllocationKind::Lfda, _) => return scheme.fixed(count),
        (AllocationKind::RfdaCont, Some(m)) => {
            let half = m / 2.0;
            (0..count).map(|_| rng.random_range(-half..=half)).collect()
        }
        (AllocationKind::RfdaDisc, Some(m)) => {
            let points = m as u32;
            let shift = (m - 1.0) / 2.0;
            (0..count).map(|_| rng.random_range(0..points) as f64 - shift).collect()
        }
        (kind, None) => return Err(Error::Config(format!("{kind} requires the bandwidth parameter M"))),
    };
    Ok(FrequencyAllocation { scheme: *scheme, values })
}

/// `S_N(x) = sin(Nπx) / sin(πx)`, continuous through the integers.
///
/// The argument is reduced to `r = x - m` with `m` the nearest integer, using
/// `S_N(m + r) = (-1)^{(N-1)m} S_N(r)`, which keeps full relative accuracy
/// next to the removable singularities.
pub fn dirichlet_kernel(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    let m = x.round();
    let r = x - m;
    // (-1)^{(N-1)m}: odd only when N is even and m is odd.
    let sign = if n.is_multiple_of(2) && (m.abs() % 2.0) == 1.0 { -1.0 } else { 1.0 };
    if r.abs() < SINGULARITY_EPS {
        return sign * nf;
    }
    sign * (nf * PI * r).sin() / (PI * r).sin()
}

/// Moment generating function of `k_n` at `j2πp`, i.e. `E[exp(j2π k_n p)]`
/// (real for every symmetric law used here).
pub fn mgf_on_imaginary_axis(scheme: &AllocationScheme, p: f64) -> Result<f64> {
    match (scheme.kind, scheme.bandwidth) {
        (AllocationKind::Pa, _) => Ok(1.0),
        (AllocationKind::Lfda, _) => Err(Error::UnsupportedScheme { op: "mgf_on_imaginary_axis", scheme: "lfda" }),
        (AllocationKind::RfdaCont, Some(m)) => {
            let x = m * p;
            if x.abs() < SINGULARITY_EPS {
                Ok(1.0)
            } else {
                Ok((PI * x).sin() / (PI * x))
            }
        }
        (AllocationKind::RfdaDisc, Some(m)) => Ok(dirichlet_kernel(p, m as usize) / m),
        (kind, None) => Err(Error::Config(format!("{kind} requires the bandwidth parameter M"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{Purpose, StreamFamily};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn deterministic_schemes() {
        let mut rng = StreamFamily::new(1).rng(Purpose::Allocation, 0, 0);
        let pa = draw_allocation(&AllocationScheme::pa(), 4, &mut rng).unwrap();
        assert_eq!(pa.values(), &[0.0; 4]);
        let lfda = draw_allocation(&AllocationScheme::lfda(), 4, &mut rng).unwrap();
        assert_eq!(lfda.values(), &[-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(lfda.frequencies(1e9, 3e6)[3], 1e9 + 4.5e6);
    }

    #[test]
    fn scheme_parsing_and_missing_bandwidth() {
        assert_eq!("rfda-disc".parse::<AllocationKind>().unwrap(), AllocationKind::RfdaDisc);
        assert!("rfda".parse::<AllocationKind>().is_err());
        assert!(matches!(AllocationScheme::new(AllocationKind::RfdaCont, None), Err(Error::Config(_))));
        assert!(AllocationScheme::new(AllocationKind::RfdaDisc, Some(2.5)).is_err());
        assert!(AllocationScheme::rfda_disc(1).is_err());
        assert!(AllocationScheme::rfda_cont(-1.0).is_err());
        assert!(AllocationScheme::new(AllocationKind::RfdaCont, Some(2.5)).is_ok());
    }

    #[test]
    fn draws_stay_in_support_and_repeat() {
        for scheme in [AllocationScheme::rfda_cont(10.0).unwrap(), AllocationScheme::rfda_disc(7).unwrap()] {
            let fam = StreamFamily::new(99);
            let a = draw_allocation(&scheme, 64, &mut fam.rng(Purpose::Allocation, 0, 5)).unwrap();
            let b = draw_allocation(&scheme, 64, &mut fam.rng(Purpose::Allocation, 0, 5)).unwrap();
            assert_eq!(a, b);
            for (n, &k) in a.values().iter().enumerate() {
                assert!(scheme.supports(n, 64, k), "{k}");
            }
        }
        assert!(draw_allocation(&AllocationScheme::pa(), 1, &mut StreamFamily::new(0).rng(Purpose::Allocation, 0, 0))
            .is_err());
    }

    #[test]
    fn discrete_lattice_is_uniform() {
        let scheme = AllocationScheme::rfda_disc(10).unwrap();
        let mut rng = StreamFamily::new(2024).rng(Purpose::Allocation, 0, 0);
        let alloc = draw_allocation(&scheme, 100_000, &mut rng).unwrap();
        let mut counts = [0usize; 10];
        for &k in alloc.values() {
            counts[(k + 4.5) as usize] += 1;
        }
        let n = 100_000f64;
        let se = (0.1 * 0.9 / n).sqrt();
        for c in counts {
            assert!((c as f64 / n - 0.1).abs() <= 3.0 * se, "{counts:?}");
        }
    }

    #[test]
    fn mgf_values() {
        let cont = AllocationScheme::rfda_cont(10.0).unwrap();
        let disc = AllocationScheme::rfda_disc(10).unwrap();
        for s in [AllocationScheme::pa(), cont, disc] {
            assert_eq!(mgf_on_imaginary_axis(&s, 0.0).unwrap(), 1.0);
        }
        assert_abs_diff_eq!(mgf_on_imaginary_axis(&cont, 0.05).unwrap(), 2.0 / PI, epsilon = 1e-15);
        let at_119 = (11.9 * PI).sin() / (11.9 * PI);
        assert_abs_diff_eq!(mgf_on_imaginary_axis(&cont, 1.19).unwrap(), at_119, epsilon = 1e-15);
        assert_abs_diff_eq!(at_119, -0.008266, epsilon = 1e-6);
        // M = 10: the lattice has half-integer points, so Φ(j2π·1) = (-1)^9.
        assert_eq!(mgf_on_imaginary_axis(&disc, 1.0).unwrap(), -1.0);
        assert_eq!(mgf_on_imaginary_axis(&AllocationScheme::pa(), 3.7).unwrap(), 1.0);
        assert!(matches!(mgf_on_imaginary_axis(&AllocationScheme::lfda(), 0.1), Err(Error::UnsupportedScheme { .. })));
    }

    #[test]
    fn dirichlet_values() {
        assert_eq!(dirichlet_kernel(0.0, 7), 7.0);
        assert_eq!(dirichlet_kernel(1.0, 4), -4.0);
        // l'Hôpital check from either side.
        let side = |x: f64| (4.0 * PI * x).sin() / (PI * x).sin();
        assert_abs_diff_eq!(side(1.0 + 1e-6), -4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(side(1.0 - 1e-6), -4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(dirichlet_kernel(0.25, 4), 0.0, epsilon = 1e-15);
        assert_eq!(dirichlet_kernel(2.0, 4), 4.0);
        assert_eq!(dirichlet_kernel(-1.0, 5), 5.0);
    }

    #[test]
    fn dirichlet_is_continuous_at_integers() {
        for n in [3usize, 4, 16, 33] {
            for m in -3..=3 {
                let m = m as f64;
                let at = dirichlet_kernel(m, n);
                for x in [m + 1e-9, m - 1e-9] {
                    assert!((dirichlet_kernel(x, n) - at).abs() <= 1e-4 * n as f64);
                }
            }
        }
    }

    #[test]
    fn disc_mgf_shift_property() {
        for m in [2u32, 5, 10, 11] {
            let s = AllocationScheme::rfda_disc(m).unwrap();
            let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
            for p in [0.0, 0.13, 0.5, 0.77, 1.19] {
                let a = mgf_on_imaginary_axis(&s, p + 1.0).unwrap();
                let b = mgf_on_imaginary_axis(&s, p).unwrap();
                assert_abs_diff_eq!(a, sign * b, epsilon = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn mgf_is_bounded(p in -20.0f64..20.0, m in 2u32..40) {
            let cont = AllocationScheme::rfda_cont(m as f64 * 0.73).unwrap();
            let disc = AllocationScheme::rfda_disc(m).unwrap();
            prop_assert!(mgf_on_imaginary_axis(&cont, p).unwrap().abs() <= 1.0 + 1e-12);
            prop_assert!(mgf_on_imaginary_axis(&disc, p).unwrap().abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn dirichlet_is_bounded_and_matches_direct_formula(x in -5.0f64..5.0, n in 1usize..64) {
            let s = dirichlet_kernel(x, n);
            prop_assert!(s.abs() <= n as f64 + 1e-9);
            let den = (PI * x).sin();
            if den.abs() > 1e-3 {
                let direct = (n as f64 * PI * x).sin() / den;
                prop_assert!((s - direct).abs() <= 1e-9 * n as f64);
            }
        }
    }
}
