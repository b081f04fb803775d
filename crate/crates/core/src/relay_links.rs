//! End-to-end SNR/SINR of the four relaying schemes for one channel draw.
//!
//! The relay combines with MRC on receive and precodes with MRT on transmit,
//! so every array link collapses to its squared norm. Full-duplex operation
//! splits the array in half: `N_R / 2` receive and `N_R / 2` transmit
//! antennas, with the residual loop-back interference entering through the
//! receive combiner.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::fading::{li_projection, mrc_combine, ComplexGain, GainVector};
use crate::propagation::LinkBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelayScheme {
    HdDf,
    HdAf,
    FdDf,
    FdAf,
}

impl RelayScheme {
    pub const ALL: [RelayScheme; 4] = [Self::HdDf, Self::HdAf, Self::FdDf, Self::FdAf];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::HdDf => "hd_df",
            Self::HdAf => "hd_af",
            Self::FdDf => "fd_df",
            Self::FdAf => "fd_af",
        }
    }

    pub fn is_full_duplex(self) -> bool {
        matches!(self, Self::FdDf | Self::FdAf)
    }

    pub fn is_amplify_forward(self) -> bool {
        matches!(self, Self::HdAf | Self::FdAf)
    }
}

impl fmt::Display for RelayScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelayScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| invalid("scheme", format!("unknown relay scheme {s:?}")))
    }
}

/// Channels seen by the half of the array used in full-duplex mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FdChannels {
    pub h_sr: GainVector,
    pub h_rd: GainVector,
    pub h_li: GainVector,
}

/// One fading draw of every envelope involved in relaying.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannelRealization {
    pub h_sd: ComplexGain,
    pub h_sr: GainVector,
    pub h_rd: GainVector,
    /// Present only when the array can be split, i.e. `N_R` is even.
    pub fd: Option<FdChannels>,
}

impl RelayChannelRealization {
    pub fn new(h_sd: ComplexGain, h_sr: GainVector, h_rd: GainVector, fd: Option<FdChannels>) -> Result<Self> {
        if h_sr.len() != h_rd.len() {
            return Err(Error::LengthMismatch {
                expected: h_sr.len(),
                found: h_rd.len(),
            });
        }
        if let Some(fd) = &fd {
            let n_r = h_sr.len();
            if n_r < 2 || !n_r.is_multiple_of(2) {
                return Err(Error::OddRelayAntennas(n_r));
            }
            for v in [&fd.h_sr, &fd.h_rd, &fd.h_li] {
                if v.len() != n_r / 2 {
                    return Err(Error::LengthMismatch {
                        expected: n_r / 2,
                        found: v.len(),
                    });
                }
            }
        }
        Ok(Self { h_sd, h_sr, h_rd, fd })
    }

    pub fn n_r(&self) -> usize {
        self.h_sr.len()
    }

    pub fn fd_channels(&self) -> Result<&FdChannels> {
        self.fd.as_ref().ok_or(Error::OddRelayAntennas(self.n_r()))
    }

    /// `|w_MRC h_li|^2` with `w_MRC` matched to the full-duplex receive half.
    /// Zero when the receive channel vanishes (the relay SINR is then zero anyway).
    pub fn li_power(&self) -> Result<f64> {
        let fd = self.fd_channels()?;
        match mrc_combine(&fd.h_sr) {
            Ok(mrc) => li_projection(&mrc.weights, &fd.h_li),
            Err(Error::ZeroVector) => Ok(0.0),
            Err(e) => Err(e),
        }
    }
}

/// Source and relay transmit powers (W).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub p_s: f64,
    pub p_r: f64,
}

impl PowerSplit {
    pub fn new(p_s: f64, p_r: f64) -> Result<Self> {
        if !(p_s.is_finite() && p_s > 0.0) {
            return Err(invalid("p_s", format!("must be finite and > 0, got {p_s}")));
        }
        if !(p_r.is_finite() && p_r >= 0.0) {
            return Err(invalid("p_r", format!("must be finite and >= 0, got {p_r}")));
        }
        Ok(Self { p_s, p_r })
    }

    /// Give `p_s` to the source and the remainder of `p_tot` to the relay.
    pub fn from_total(p_s: f64, p_tot: f64) -> Result<Self> {
        if p_s.partial_cmp(&p_tot).is_none_or(|o| o.is_gt()) {
            return Err(invalid("p_s", format!("{p_s} exceeds p_tot = {p_tot}")));
        }
        Self::new(p_s, (p_tot - p_s).max(0.0))
    }

    pub fn total(&self) -> f64 {
        self.p_s + self.p_r
    }

    pub fn source_fraction(&self) -> f64 {
        self.p_s / self.total()
    }
}

/// Per-hop SNRs of one scheme. Components that the scheme does not define
/// are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBreakdown {
    pub scheme: RelayScheme,
    /// SNR (HD) or SINR (FD) after MRC at the relay.
    pub gamma_relay: f64,
    /// Direct source-destination SNR in the first slot (HD only).
    pub gamma_dest_direct: Option<f64>,
    /// Relay-destination contribution: the MRT hop SNR for DF, the
    /// two-hop AF SNR for HD-AF, the interference-limited hop SINR for FD.
    pub gamma_dest_hop2: f64,
    /// Combined SNR at the destination. Absent for FD-DF, whose rate is
    /// limited by `min(gamma_relay, gamma_dest_hop2)`.
    pub gamma_end_to_end: Option<f64>,
}

/// Variable-gain AF end-to-end SNR `x y / (x + y + 1)`.
pub fn af_combine(x: f64, y: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    x * y / (x + y + 1.0)
}

/// `true` when `af_combine` honours the strict bottleneck
/// `x y / (x + y + 1) < min(x, y)` for positive inputs.
pub fn af_bottleneck_holds(x: f64, y: f64, combined: f64) -> bool {
    if x <= 0.0 || y <= 0.0 {
        return combined == 0.0;
    }
    combined < x.min(y)
}

struct HdHops {
    relay: f64,
    direct: f64,
    hop2: f64,
}

fn hd_hops(real: &RelayChannelRealization, budget: &LinkBudget, split: PowerSplit) -> HdHops {
    HdHops {
        relay: split.p_s * budget.pl_sr * real.h_sr.norm_sqr() / budget.n0,
        direct: split.p_s * budget.pl_sd * real.h_sd.norm_sqr() / budget.n0,
        hop2: split.p_r * budget.pl_rd * real.h_rd.norm_sqr() / budget.n0,
    }
}

struct FdHops {
    relay: f64,
    hop2: f64,
}

fn fd_hops(real: &RelayChannelRealization, budget: &LinkBudget, split: PowerSplit) -> Result<FdHops> {
    let fd = real.fd_channels()?;
    let li = real.li_power()?;
    let relay = split.p_s * budget.pl_sr * fd.h_sr.norm_sqr() / (split.p_r * li + budget.n0);
    let interference = split.p_s * budget.pl_sd * real.h_sd.norm_sqr();
    let hop2 = split.p_r * budget.pl_rd * fd.h_rd.norm_sqr() / (interference + budget.n0);
    Ok(FdHops { relay, hop2 })
}

pub fn hd_df(real: &RelayChannelRealization, budget: &LinkBudget, split: PowerSplit) -> SnrBreakdown {
    let hops = hd_hops(real, budget, split);
    SnrBreakdown {
        scheme: RelayScheme::HdDf,
        gamma_relay: hops.relay,
        gamma_dest_direct: Some(hops.direct),
        gamma_dest_hop2: hops.hop2,
        gamma_end_to_end: Some(hops.direct + hops.hop2),
    }
}

pub fn hd_af(real: &RelayChannelRealization, budget: &LinkBudget, split: PowerSplit) -> SnrBreakdown {
    let hops = hd_hops(real, budget, split);
    let hop2 = af_combine(hops.relay, hops.hop2);
    SnrBreakdown {
        scheme: RelayScheme::HdAf,
        gamma_relay: hops.relay,
        gamma_dest_direct: Some(hops.direct),
        gamma_dest_hop2: hop2,
        gamma_end_to_end: Some(hops.direct + hop2),
    }
}

pub fn fd_df(real: &RelayChannelRealization, budget: &LinkBudget, split: PowerSplit) -> Result<SnrBreakdown> {
    let hops = fd_hops(real, budget, split)?;
    Ok(SnrBreakdown {
        scheme: RelayScheme::FdDf,
        gamma_relay: hops.relay,
        gamma_dest_direct: None,
        gamma_dest_hop2: hops.hop2,
        gamma_end_to_end: None,
    })
}

pub fn fd_af(real: &RelayChannelRealization, budget: &LinkBudget, split: PowerSplit) -> Result<SnrBreakdown> {
    let hops = fd_hops(real, budget, split)?;
    Ok(SnrBreakdown {
        scheme: RelayScheme::FdAf,
        gamma_relay: hops.relay,
        gamma_dest_direct: None,
        gamma_dest_hop2: hops.hop2,
        gamma_end_to_end: Some(af_combine(hops.relay, hops.hop2)),
    })
}

/// Dispatch on `scheme`.
pub fn evaluate(
    scheme: RelayScheme,
    real: &RelayChannelRealization,
    budget: &LinkBudget,
    split: PowerSplit,
) -> Result<SnrBreakdown> {
    match scheme {
        RelayScheme::HdDf => Ok(hd_df(real, budget, split)),
        RelayScheme::HdAf => Ok(hd_af(real, budget, split)),
        RelayScheme::FdDf => fd_df(real, budget, split),
        RelayScheme::FdAf => fd_af(real, budget, split),
    }
}
