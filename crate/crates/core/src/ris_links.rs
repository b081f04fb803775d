//! SNR of an RIS-assisted link: arbitrary phase configurations, optimal
//! co-phasing, and the resulting maximum SNR.

use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::fading::{ComplexGain, GainVector};
use crate::propagation::{LinkBudget, RisMode};

/// One fading draw of the direct and reflected envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct RisChannelRealization {
    pub h_sd: ComplexGain,
    pub h_s_ris: GainVector,
    pub h_ris_d: GainVector,
}

impl RisChannelRealization {
    pub fn new(h_sd: ComplexGain, h_s_ris: GainVector, h_ris_d: GainVector) -> Result<Self> {
        if h_s_ris.len() != h_ris_d.len() {
            return Err(Error::LengthMismatch {
                expected: h_s_ris.len(),
                found: h_ris_d.len(),
            });
        }
        Ok(Self { h_sd, h_s_ris, h_ris_d })
    }

    pub fn n_elements(&self) -> usize {
        self.h_s_ris.len()
    }
}

/// Reflection matrix `r_a * diag(exp(j phi_n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    phases: Vec<f64>,
    r_a: f64,
}

impl PhaseConfig {
    /// Phases are wrapped to `[0, 2 pi)`; `r_a` must lie in `(0, 1]`.
    pub fn new(phases: Vec<f64>, r_a: f64) -> Result<Self> {
        validate_r_a(r_a)?;
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(invalid("phases", "must be finite"));
        }
        Ok(Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
            r_a,
        })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn r_a(&self) -> f64 {
        self.r_a
    }
}

pub fn validate_r_a(r_a: f64) -> Result<()> {
    if r_a > 0.0 && r_a <= 1.0 {
        Ok(())
    } else {
        Err(invalid(
            "ris.r_a",
            format!("amplitude reflection coefficient must lie in (0, 1], got {r_a}"),
        ))
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let wrapped = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Coherent received SNR for an arbitrary phase configuration.
pub fn ris_snr(
    real: &RisChannelRealization,
    cfg: &PhaseConfig,
    pl_direct: f64,
    pl_ris: f64,
    p_tot: f64,
    n0: f64,
) -> Result<f64> {
    if cfg.phases.len() != real.n_elements() {
        return Err(Error::LengthMismatch {
            expected: real.n_elements(),
            found: cfg.phases.len(),
        });
    }
    validate_r_a(cfg.r_a)?;
    let reflected: ComplexGain = real
        .h_s_ris
        .iter()
        .zip(real.h_ris_d.iter())
        .zip(&cfg.phases)
        .map(|((h, g), &phi)| h * g * ComplexGain::from_polar(1.0, phi))
        .sum::<ComplexGain>()
        * cfg.r_a;
    let field = real.h_sd * (p_tot * pl_direct).sqrt() + reflected * (p_tot * pl_ris).sqrt();
    Ok(field.norm_sqr() / n0)
}

/// Phases that align every reflected path with the direct path.
///
/// A blocked direct link (`h_sd == 0`) has no phase; zero is used as the
/// common reference.
pub fn optimal_phases(real: &RisChannelRealization) -> Vec<f64> {
    let reference = if real.h_sd == ComplexGain::new(0.0, 0.0) {
        0.0
    } else {
        real.h_sd.arg()
    };
    real.h_s_ris
        .iter()
        .zip(real.h_ris_d.iter())
        .map(|(h, g)| wrap_phase(reference - (h * g).arg()))
        .collect()
}

/// Maximum SNR `p (sqrt(PL_sd)|h_sd| + sqrt(PL_ris) r_a sum|h_n||g_n|)^2 / N0`.
pub fn ris_max_snr_with(
    real: &RisChannelRealization,
    r_a: f64,
    pl_direct: f64,
    pl_ris: f64,
    p_tot: f64,
    n0: f64,
) -> Result<f64> {
    validate_r_a(r_a)?;
    let reflected: f64 = real
        .h_s_ris
        .iter()
        .zip(real.h_ris_d.iter())
        .map(|(h, g)| h.norm() * g.norm())
        .sum();
    let amplitude = pl_direct.sqrt() * real.h_sd.norm() + pl_ris.sqrt() * r_a * reflected;
    Ok(p_tot * amplitude * amplitude / n0)
}

/// Maximum SNR under the path-loss law selected by `mode`.
pub fn ris_max_snr(real: &RisChannelRealization, r_a: f64, mode: RisMode, budget: &LinkBudget) -> Result<f64> {
    ris_max_snr_with(real, r_a, budget.pl_sd, budget.ris_gain(mode), budget.p_tot, budget.n0)
}
