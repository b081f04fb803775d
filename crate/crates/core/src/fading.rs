//! Fast-fading envelopes and the MRC/MRT vector algebra.
//!
//! Random draws come from counter-based ChaCha streams keyed by
//! `(seed, trial)`. Each physical link reads from its own region of the
//! stream, so the draw for one link never depends on how many samples another
//! link consumed (for example when the relay array size is swept).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

pub type ComplexGain = Complex64;

/// A column of complex channel coefficients, one per antenna or RIS element.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector(Vec<ComplexGain>);

impl GainVector {
    pub fn new(elements: Vec<ComplexGain>) -> Result<Self> {
        if elements.is_empty() {
            return Err(invalid("gain vector", "must contain at least one element"));
        }
        if elements.iter().any(|h| !h.re.is_finite() || !h.im.is_finite()) {
            return Err(invalid("gain vector", "elements must be finite"));
        }
        Ok(Self(elements))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| ComplexGain::new(v, 0.0)).collect())
    }

    /// `n` copies of `value`.
    pub fn filled(value: ComplexGain, n: usize) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[ComplexGain] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexGain> {
        self.0.iter()
    }

    /// Squared Euclidean norm `||h||^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|h| h.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unconjugated bilinear product `sum_i a_i b_i`.
    pub fn dot(&self, other: &GainVector) -> Result<ComplexGain> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn scaled(&self, factor: ComplexGain) -> Self {
        Self(self.0.iter().map(|h| h * factor).collect())
    }
}

impl std::ops::Index<usize> for GainVector {
    type Output = ComplexGain;

    fn index(&self, idx: usize) -> &ComplexGain {
        &self.0[idx]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingKind {
    Rayleigh,
    Rician,
    /// Deterministic line-of-sight envelope (the `K -> inf` limit).
    Los,
}

impl FadingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rayleigh => "rayleigh",
            Self::Rician => "rician",
            Self::Los => "los",
        }
    }
}

impl fmt::Display for FadingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FadingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh" => Ok(Self::Rayleigh),
            "rician" => Ok(Self::Rician),
            "los" => Ok(Self::Los),
            other => Err(invalid(
                "fading kind",
                format!("expected \"rayleigh\", \"rician\" or \"los\", got {other:?}"),
            )),
        }
    }
}

/// Statistics of one link's fading envelope. `mean_power` is `E[|h|^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    pub kind: FadingKind,
    pub k_factor: f64,
    pub mean_power: f64,
    pub los_phase: f64,
}

impl FadingSpec {
    pub fn rayleigh(mean_power: f64) -> Result<Self> {
        Self::build(FadingKind::Rayleigh, 0.0, mean_power, 0.0)
    }

    /// A Rician envelope. `k_factor == 0` collapses to Rayleigh.
    pub fn rician(k_factor: f64, mean_power: f64, los_phase: f64) -> Result<Self> {
        if k_factor == 0.0 {
            return Self::rayleigh(mean_power);
        }
        Self::build(FadingKind::Rician, k_factor, mean_power, los_phase)
    }

    pub fn los(mean_power: f64, los_phase: f64) -> Result<Self> {
        Self::build(FadingKind::Los, f64::INFINITY, mean_power, los_phase)
    }

    fn build(kind: FadingKind, k_factor: f64, mean_power: f64, los_phase: f64) -> Result<Self> {
        let spec = Self {
            kind,
            k_factor,
            mean_power,
            los_phase,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_power.is_finite() && self.mean_power > 0.0) {
            return Err(invalid(
                "mean_power",
                format!("must be finite and > 0, got {}", self.mean_power),
            ));
        }
        if !self.los_phase.is_finite() {
            return Err(invalid("los_phase", "must be finite"));
        }
        match self.kind {
            FadingKind::Rayleigh if self.k_factor != 0.0 => {
                Err(invalid("k_factor", "rayleigh fading requires k_factor = 0"))
            }
            FadingKind::Rician if !(self.k_factor.is_finite() && self.k_factor > 0.0) => Err(invalid(
                "k_factor",
                format!("rician fading requires a finite k_factor > 0, got {}", self.k_factor),
            )),
            _ => Ok(()),
        }
    }

    /// Draw one envelope.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexGain {
        let los = || ComplexGain::from_polar(self.mean_power.sqrt(), self.los_phase);
        match self.kind {
            FadingKind::Los => los(),
            FadingKind::Rayleigh => standard_complex_normal(rng) * self.mean_power.sqrt(),
            FadingKind::Rician => {
                let k = self.k_factor;
                let specular = ComplexGain::from_polar((self.mean_power * k / (k + 1.0)).sqrt(), self.los_phase);
                specular + standard_complex_normal(rng) * (self.mean_power / (k + 1.0)).sqrt()
            }
        }
    }
}

/// `CN(0, 1)`: independent real and imaginary parts with variance 1/2 each.
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> ComplexGain {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ComplexGain::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `n` i.i.d. envelopes drawn from `spec`.
pub fn sample_vector<R: Rng + ?Sized>(spec: &FadingSpec, n: usize, rng: &mut R) -> Result<GainVector> {
    if n == 0 {
        return Err(invalid("n", "vector length must be >= 1"));
    }
    spec.validate()?;
    GainVector::new((0..n).map(|_| spec.sample(rng)).collect())
}

/// Physical links that carry their own fading draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    Sd,
    Sr,
    Rd,
    SrFd,
    RdFd,
    Li,
    SRis,
    RisD,
}

impl Link {
    fn region(self) -> u128 {
        self as u128
    }
}

/// Addressable random stream for one Monte Carlo trial.
///
/// `(seed, stream_id)` fully determines every draw, independent of thread
/// count or evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    // 2^40 words (~8 TiB of output) per link region.
    const REGION_SHIFT: u32 = 40;

    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Generator positioned at the region reserved for `link`.
    pub fn link(&self, link: Link) -> ChaCha20Rng {
        let mut rng = self.rng();
        rng.set_word_pos(link.region() << Self::REGION_SHIFT);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mrc {
    /// Combined power gain `||h||^2`.
    pub gain: f64,
    /// Unit-norm combiner `h^H / ||h||`.
    pub weights: GainVector,
}

/// Maximal-ratio combiner for channel `h`. The same vector, read as a
/// transmit precoder, is the MRT beamformer.
pub fn mrc_combine(h: &GainVector) -> Result<Mrc> {
    let gain = h.norm_sqr();
    if gain == 0.0 {
        return Err(Error::ZeroVector);
    }
    let norm = gain.sqrt();
    let weights = GainVector(h.iter().map(|x| x.conj() / norm).collect());
    Ok(Mrc { gain, weights })
}

/// Loop-back interference power `|w^T h_li|^2` seen after combining with `w`.
pub fn li_projection(weights: &GainVector, h_li: &GainVector) -> Result<f64> {
    Ok(weights.dot(h_li)?.norm_sqr())
}
