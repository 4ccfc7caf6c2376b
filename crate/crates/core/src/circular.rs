//! Circular-statistics kernel: von Mises densities, mixtures, Bessel
//! normalization, KL divergence, and the raw-output-to-parameter transforms.
//!
//! All densities live on the circle `theta in [0, 2*pi)`. Everything here is
//! plain `f64` math with no shared state, so the functions are safe to call
//! from any number of threads.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// ln(2*pi), the log of the circle circumference.
pub const LN_TAU: f64 = 1.837_877_066_409_345_5;

/// Concentration below which a von Mises density is indistinguishable from
/// the uniform density at f64 precision.
pub const NEAR_UNIFORM_B: f64 = 1e-12;

/// Series/asymptotic crossover for `log_bessel_i0`.
const I0_SERIES_CUTOFF: f64 = 20.0;

/// Density floor applied inside logarithms when computing KL divergence.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Numerical constants shared by every consumer of the circular kernel.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CircularConstants {
    /// Maximal concentration parameter; larger values overflow exp(b) in f32.
    pub b_max: f64,
    /// Concentration floor factor keeping b strictly positive at sigma_tilde = 1.
    pub epsilon: f64,
    /// Number of uniform quadrature bins over [0, 2*pi).
    pub n_quad: usize,
}

impl Default for CircularConstants {
    fn default() -> Self {
        Self {
            b_max: 88.0,
            epsilon: 1e-3,
            n_quad: 256,
        }
    }
}

impl CircularConstants {
    pub fn validate(&self) -> Result<()> {
        if self.b_max <= 0.0 {
            return Err(Error::Invariant(format!("b_max must be > 0, got {}", self.b_max)));
        }
        if !(0.0 < self.epsilon && self.epsilon < 1.0) {
            return Err(Error::Invariant(format!(
                "epsilon must be in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.n_quad < 64 {
            return Err(Error::Invariant(format!("n_quad must be >= 64, got {}", self.n_quad)));
        }
        Ok(())
    }
}

/// One von Mises component: mean direction, concentration, mixture weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesComponent {
    /// Mean direction in radians, in [0, 2*pi).
    pub mu: f64,
    /// Concentration; strictly positive.
    pub b: f64,
    /// Mixture weight in [0, 1].
    pub w: f64,
}

impl VonMisesComponent {
    pub fn new(mu: f64, b: f64, w: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&mu) {
            return Err(Error::Invariant(format!("mu must be in [0, 2pi), got {mu}")));
        }
        if b <= 0.0 || !b.is_finite() {
            return Err(Error::Invariant(format!("b must be finite and > 0, got {b}")));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Invariant(format!("w must be in [0, 1], got {w}")));
        }
        Ok(Self { mu, b, w })
    }
}

/// A circular mixture of M von Mises components with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    components: Vec<VonMisesComponent>,
}

impl Mixture {
    /// Weight-sum tolerance enforced at construction.
    pub const WEIGHT_TOL: f64 = 1e-6;

    pub fn new(components: Vec<VonMisesComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invariant("mixture needs at least one component".into()));
        }
        let sum: f64 = components.iter().map(|c| c.w).sum();
        if (sum - 1.0).abs() > Self::WEIGHT_TOL {
            return Err(Error::Invariant(format!(
                "mixture weights must sum to 1 within {}, got {sum}",
                Self::WEIGHT_TOL
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[VonMisesComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Raw sigmoid triple emitted by the network for one mixture component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawComponent {
    /// Normalized mean direction in [0, 1].
    pub mu_tilde: f64,
    /// Normalized variance in [0, 1]; 0 is the most concentrated.
    pub sigma_tilde: f64,
    /// Unnormalized mixture weight in [0, 1].
    pub w_tilde: f64,
}

/// ln I0(b), the log modified Bessel function of the first kind, order zero.
///
/// Evaluated in the log domain so it stays finite for b up to 100 and beyond:
/// a power series below the crossover, an asymptotic expansion above it.
pub fn log_bessel_i0(b: f64) -> Result<f64> {
    if b < 0.0 || !b.is_finite() {
        return Err(Error::Domain(format!("concentration must be finite and >= 0, got {b}")));
    }
    if b <= I0_SERIES_CUTOFF {
        // I0(b) = sum_k (b^2/4)^k / (k!)^2; at b=20 the sum is ~4.4e7, well
        // inside f64 range, and the terms are past machine precision by k=60.
        let x = b * b / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=60u32 {
            term *= x / ((k as f64) * (k as f64));
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
        }
        Ok(sum.ln())
    } else {
        // I0(b) ~ e^b / sqrt(2 pi b) * (1 + 1/(8b) + 9/(128 b^2) + ...)
        let inv = 1.0 / b;
        let corr = 1.0
            + inv * (1.0 / 8.0
                + inv * (9.0 / 128.0 + inv * (225.0 / 3072.0 + inv * (11025.0 / 98304.0))));
        Ok(b - 0.5 * (TAU * b).ln() + corr.ln())
    }
}

/// Von Mises density at `theta` for a single component (the weight is ignored).
///
/// The angle is reduced modulo 2*pi before evaluation; `%` on floats is exact,
/// so thetas one full period apart hit the identical code path.
pub fn vm_pdf(theta: f64, comp: &VonMisesComponent) -> f64 {
    let t = theta.rem_euclid(TAU);
    let log_norm = log_bessel_i0(comp.b).expect("component b is validated non-negative");
    (comp.b * (t - comp.mu).cos() - LN_TAU - log_norm).exp()
}

/// Mixture density at `theta`: the weighted sum of component densities.
pub fn mixture_pdf(theta: f64, mix: &Mixture) -> f64 {
    mix.components().iter().map(|c| c.w * vm_pdf(theta, c)).sum()
}

/// The ideal directional target: a single component at `mu_hat` with maximal
/// concentration (normalized variance zero) and unit weight.
pub fn target_distribution(mu_hat: f64, consts: &CircularConstants) -> Result<Mixture> {
    Mixture::new(vec![VonMisesComponent::new(mu_hat.rem_euclid(TAU), consts.b_max, 1.0)?])
}

/// Uniform quadrature nodes over one period, `theta_k = k * 2*pi / n`.
///
/// Both the f64 kernel and the tensor-valued training loss integrate on this
/// exact grid; for periodic integrands the uniform sum equals the trapezoid
/// rule and converges spectrally.
pub fn quadrature_nodes(n_quad: usize) -> Vec<f64> {
    let h = TAU / n_quad as f64;
    (0..n_quad).map(|k| k as f64 * h).collect()
}

/// KL divergence D(p_target || q) by fixed-grid quadrature over [0, 2*pi).
///
/// Density logs are floored at [`DENSITY_FLOOR`] so the result stays finite
/// when q vanishes under a sharply peaked target.
pub fn kl_divergence(p_target: &Mixture, q: &Mixture, n_quad: usize) -> f64 {
    let h = TAU / n_quad as f64;
    let mut acc = 0.0;
    for theta in quadrature_nodes(n_quad) {
        let p = mixture_pdf(theta, p_target);
        let qv = mixture_pdf(theta, q);
        if p > 0.0 {
            acc += p * (p.max(DENSITY_FLOOR).ln() - qv.max(DENSITY_FLOOR).ln());
        }
    }
    acc * h
}

/// Transform raw sigmoid triples into a valid mixture:
/// weights normalized, means rescaled to radians, normalized variance mapped
/// to a concentration clamped into (0, b_max].
pub fn params_from_raw(raw: &[RawComponent], consts: &CircularConstants) -> Result<Mixture> {
    if raw.is_empty() {
        return Err(Error::Invariant("raw output needs at least one component".into()));
    }
    let w_sum: f64 = raw.iter().map(|r| r.w_tilde).sum();
    let uniform = 1.0 / raw.len() as f64;
    let components = raw
        .iter()
        .map(|r| {
            let w = if w_sum > 0.0 { r.w_tilde / w_sum } else { uniform };
            let mu = (TAU * r.mu_tilde).rem_euclid(TAU);
            let b = (consts.b_max * (1.0 - r.sigma_tilde + consts.epsilon)).min(consts.b_max);
            VonMisesComponent::new(mu, b, w)
        })
        .collect::<Result<Vec<_>>>()?;
    Mixture::new(components)
}
