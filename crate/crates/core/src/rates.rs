//! Achievable rate (bits/s/Hz) of every scheme.
//!
//! Half-duplex relaying spends two slots per symbol and carries a `1/2`
//! prelog. Full-duplex relaying is taken in the long-frame limit, where its
//! prelog is exactly one, as for RIS and direct transmission.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::power_allocation::{allocate, brute_force_split, link_coefficients, AllocationBranch};
use crate::propagation::{LinkBudget, RisMode};
use crate::relay_links::{evaluate, PowerSplit, RelayChannelRealization, RelayScheme, SnrBreakdown};
use crate::ris_links::{ris_max_snr, RisChannelRealization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    HdDf,
    HdAf,
    FdDf,
    FdAf,
    RisAnomalous,
    RisDiffuse,
    Siso,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Self::HdDf,
        Self::HdAf,
        Self::FdDf,
        Self::FdAf,
        Self::RisAnomalous,
        Self::RisDiffuse,
        Self::Siso,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::HdDf => "hd_df",
            Self::HdAf => "hd_af",
            Self::FdDf => "fd_df",
            Self::FdAf => "fd_af",
            Self::RisAnomalous => "ris_anomalous",
            Self::RisDiffuse => "ris_diffuse",
            Self::Siso => "siso",
        }
    }

    pub fn relay(self) -> Option<RelayScheme> {
        match self {
            Self::HdDf => Some(RelayScheme::HdDf),
            Self::HdAf => Some(RelayScheme::HdAf),
            Self::FdDf => Some(RelayScheme::FdDf),
            Self::FdAf => Some(RelayScheme::FdAf),
            _ => None,
        }
    }

    pub fn ris_mode(self) -> Option<RisMode> {
        match self {
            Self::RisAnomalous => Some(RisMode::Anomalous),
            Self::RisDiffuse => Some(RisMode::Diffuse),
            _ => None,
        }
    }

    pub fn prelog(self) -> f64 {
        match self {
            Self::HdDf | Self::HdAf => 0.5,
            _ => 1.0,
        }
    }
}

impl From<RelayScheme> for Scheme {
    fn from(s: RelayScheme) -> Self {
        match s {
            RelayScheme::HdDf => Self::HdDf,
            RelayScheme::HdAf => Self::HdAf,
            RelayScheme::FdDf => Self::FdDf,
            RelayScheme::FdAf => Self::FdAf,
        }
    }
}

impl From<RisMode> for Scheme {
    fn from(m: RisMode) -> Self {
        match m {
            RisMode::Anomalous => Self::RisAnomalous,
            RisMode::Diffuse => Self::RisDiffuse,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| invalid("scheme", format!("unknown scheme {s:?}")))
    }
}

fn log_rate(prelog: f64, snr: f64) -> f64 {
    prelog * snr.max(0.0).ln_1p() / std::f64::consts::LN_2
}

fn expect(snr: &SnrBreakdown, scheme: RelayScheme) -> Result<()> {
    if snr.scheme == scheme {
        Ok(())
    } else {
        Err(Error::SchemeMismatch {
            expected: scheme.as_str(),
            found: snr.scheme.as_str(),
        })
    }
}

fn end_to_end(snr: &SnrBreakdown) -> f64 {
    snr.gamma_end_to_end.unwrap_or(0.0)
}

/// `1/2 log2(1 + min(gamma_R, gamma_D1 + gamma_D2))`.
pub fn rate_hd_df(snr: &SnrBreakdown) -> Result<f64> {
    expect(snr, RelayScheme::HdDf)?;
    Ok(log_rate(0.5, snr.gamma_relay.min(end_to_end(snr))))
}

pub fn rate_hd_af(snr: &SnrBreakdown) -> Result<f64> {
    expect(snr, RelayScheme::HdAf)?;
    Ok(log_rate(0.5, end_to_end(snr)))
}

pub fn rate_fd_df(snr: &SnrBreakdown) -> Result<f64> {
    expect(snr, RelayScheme::FdDf)?;
    Ok(log_rate(1.0, snr.gamma_relay.min(snr.gamma_dest_hop2)))
}

pub fn rate_fd_af(snr: &SnrBreakdown) -> Result<f64> {
    expect(snr, RelayScheme::FdAf)?;
    Ok(log_rate(1.0, end_to_end(snr)))
}

/// Rate of whichever relay scheme produced `snr`.
pub fn relay_rate(snr: &SnrBreakdown) -> f64 {
    match snr.scheme {
        RelayScheme::HdDf => log_rate(0.5, snr.gamma_relay.min(end_to_end(snr))),
        RelayScheme::HdAf => log_rate(0.5, end_to_end(snr)),
        RelayScheme::FdDf => log_rate(1.0, snr.gamma_relay.min(snr.gamma_dest_hop2)),
        RelayScheme::FdAf => log_rate(1.0, end_to_end(snr)),
    }
}

/// Direct transmission at full power: `log2(1 + p_tot A)`.
pub fn rate_siso(a_direct: f64, p_tot: f64) -> f64 {
    log_rate(1.0, p_tot * a_direct)
}

/// `log2(1 + gamma_max)`; the surface is passive, so there is no second slot.
pub fn rate_ris(gamma_max: f64, _mode: RisMode) -> f64 {
    log_rate(1.0, gamma_max)
}

/// How the source/relay split is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Allocator {
    ClosedForm,
    /// Uniform grid search with the given number of points.
    Oracle {
        grid_points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkSnr {
    Relay(SnrBreakdown),
    /// Full-power direct-link SNR.
    Direct(f64),
    /// Co-phased RIS maximum SNR.
    Ris(f64),
}

impl LinkSnr {
    pub fn relay(&self) -> Option<&SnrBreakdown> {
        match self {
            Self::Relay(snr) => Some(snr),
            _ => None,
        }
    }

    /// The SNR that the rate is a function of.
    pub fn effective(&self) -> f64 {
        match *self {
            Self::Relay(snr) => match snr.scheme {
                RelayScheme::HdDf => snr.gamma_relay.min(end_to_end(&snr)),
                RelayScheme::FdDf => snr.gamma_relay.min(snr.gamma_dest_hop2),
                _ => end_to_end(&snr),
            },
            Self::Direct(g) | Self::Ris(g) => g,
        }
    }
}

/// Both candidates of the HD-DF relay-versus-direct decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdDfCandidates {
    pub relay: f64,
    pub siso: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Scheme that achieved `rate`. HD-DF requests resolve to `Siso` when
    /// direct transmission wins.
    pub scheme: Scheme,
    pub rate: f64,
    /// `None` for schemes that spend the whole budget at the source.
    pub split: Option<PowerSplit>,
    pub snr: LinkSnr,
    pub branch: Option<AllocationBranch>,
    pub hd_df_candidates: Option<HdDfCandidates>,
}

impl RateResult {
    /// Fraction of `p_tot` spent at the source.
    pub fn source_fraction(&self) -> f64 {
        self.split.map_or(1.0, |s| s.source_fraction())
    }
}

pub fn siso_result(real: &RelayChannelRealization, budget: &LinkBudget) -> RateResult {
    let a = budget.pl_sd * real.h_sd.norm_sqr() / budget.n0;
    RateResult {
        scheme: Scheme::Siso,
        rate: rate_siso(a, budget.p_tot),
        split: None,
        snr: LinkSnr::Direct(budget.p_tot * a),
        branch: None,
        hd_df_candidates: None,
    }
}

/// Maximum rate of a relay scheme under the closed-form split.
pub fn best_rate(real: &RelayChannelRealization, budget: &LinkBudget, scheme: RelayScheme) -> Result<RateResult> {
    best_rate_with(real, budget, scheme, Allocator::ClosedForm)
}

pub fn best_rate_with(
    real: &RelayChannelRealization,
    budget: &LinkBudget,
    scheme: RelayScheme,
    allocator: Allocator,
) -> Result<RateResult> {
    let relay = relay_result(real, budget, scheme, allocator)?;
    if scheme == RelayScheme::HdDf {
        Ok(with_siso_fallback(relay, siso_result(real, budget)))
    } else {
        Ok(relay)
    }
}

/// Rate of a relay scheme at the split chosen by `allocator`, without the
/// HD-DF comparison against direct transmission.
pub fn relay_result(
    real: &RelayChannelRealization,
    budget: &LinkBudget,
    scheme: RelayScheme,
    allocator: Allocator,
) -> Result<RateResult> {
    let coeffs = link_coefficients(real, budget)?;
    let (split, branch) = match allocator {
        Allocator::ClosedForm => {
            let alloc = allocate(scheme, &coeffs, budget.p_tot)?;
            (alloc.split, Some(alloc.branch))
        }
        Allocator::Oracle { grid_points } => (brute_force_split(scheme, &coeffs, budget.p_tot, grid_points)?, None),
    };
    let snr = evaluate(scheme, real, budget, split)?;
    Ok(RateResult {
        scheme: scheme.into(),
        rate: relay_rate(&snr),
        split: Some(split),
        snr: LinkSnr::Relay(snr),
        branch,
        hd_df_candidates: None,
    })
}

/// Keep the better of an HD-DF relay result and direct transmission,
/// recording both candidate rates.
pub fn with_siso_fallback(relay: RateResult, siso: RateResult) -> RateResult {
    let candidates = Some(HdDfCandidates {
        relay: relay.rate,
        siso: siso.rate,
    });
    let mut best = if siso.rate > relay.rate { siso } else { relay };
    best.hd_df_candidates = candidates;
    best
}

/// Rate of a co-phased RIS at full source power.
pub fn ris_rate(real: &RisChannelRealization, r_a: f64, mode: RisMode, budget: &LinkBudget) -> Result<RateResult> {
    let gamma = ris_max_snr(real, r_a, mode, budget)?;
    Ok(RateResult {
        scheme: mode.into(),
        rate: rate_ris(gamma, mode),
        split: None,
        snr: LinkSnr::Ris(gamma),
        branch: None,
        hd_df_candidates: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::{sample_vector, ComplexGain, FadingSpec, GainVector, Link, RngStream};
    use crate::relay_links::FdChannels;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn breakdown(scheme: RelayScheme, relay: f64, direct: Option<f64>, hop2: f64, e2e: Option<f64>) -> SnrBreakdown {
        SnrBreakdown {
            scheme,
            gamma_relay: relay,
            gamma_dest_direct: direct,
            gamma_dest_hop2: hop2,
            gamma_end_to_end: e2e,
        }
    }

    fn c(re: f64) -> ComplexGain {
        ComplexGain::new(re, 0.0)
    }

    fn random_realization(seed: u64, trial: u64) -> RelayChannelRealization {
        let spec = FadingSpec::rayleigh(1.0).unwrap();
        let li = FadingSpec::rician(5.0, 0.2, 0.0).unwrap();
        let s = RngStream::new(seed, trial);
        RelayChannelRealization::new(
            spec.sample(&mut s.link(Link::Sd)),
            sample_vector(&spec, 4, &mut s.link(Link::Sr)).unwrap(),
            sample_vector(&spec, 4, &mut s.link(Link::Rd)).unwrap(),
            Some(FdChannels {
                h_sr: sample_vector(&spec, 2, &mut s.link(Link::SrFd)).unwrap(),
                h_rd: sample_vector(&spec, 2, &mut s.link(Link::RdFd)).unwrap(),
                h_li: sample_vector(&li, 2, &mut s.link(Link::Li)).unwrap(),
            }),
        )
        .unwrap()
    }

    #[test]
    fn hd_df_rate_examples() {
        let snr = breakdown(RelayScheme::HdDf, 3.0, Some(1.0), 2.0, Some(3.0));
        assert_eq!(rate_hd_df(&snr).unwrap(), 1.0);
        let dead = breakdown(RelayScheme::HdDf, 0.0, Some(1.0), 2.0, Some(3.0));
        assert_eq!(rate_hd_df(&dead).unwrap(), 0.0);
        assert!(matches!(rate_hd_af(&snr), Err(Error::SchemeMismatch { .. })));
    }

    #[test]
    fn siso_examples() {
        assert_eq!(rate_siso(1.0, 3.0), 2.0);
        assert_eq!(rate_siso(0.0, 3.0), 0.0);
        assert_eq!(rate_siso(1.0, 1.0), 1.0);
    }

    #[test]
    fn other_relay_rates() {
        assert_eq!(
            rate_hd_af(&breakdown(RelayScheme::HdAf, 9.0, Some(1.0), 2.0, Some(3.0))).unwrap(),
            1.0
        );
        assert_eq!(
            rate_fd_df(&breakdown(RelayScheme::FdDf, 3.0, None, 5.0, None)).unwrap(),
            2.0
        );
        assert_eq!(
            rate_fd_af(&breakdown(RelayScheme::FdAf, 9.0, None, 9.0, Some(3.0))).unwrap(),
            2.0
        );
        for scheme in RelayScheme::ALL {
            let zero = breakdown(scheme, 0.0, Some(0.0), 0.0, Some(0.0));
            assert_eq!(relay_rate(&zero), 0.0);
        }
    }

    #[test]
    fn ris_rate_examples() {
        assert_relative_eq!(rate_ris(4.0, RisMode::Anomalous), 5f64.log2(), max_relative = 1e-15);
        assert!((rate_ris(4.0, RisMode::Diffuse) - 2.3219).abs() < 1e-4);
        assert_eq!(rate_ris(0.0, RisMode::Diffuse), 0.0);

        let ones = GainVector::from_real(&[1.0]).unwrap();
        let real = RisChannelRealization::new(c(1.0), ones.clone(), ones).unwrap();
        let r = ris_rate(&real, 1.0, RisMode::Anomalous, &LinkBudget::unit()).unwrap();
        assert_relative_eq!(r.rate, 5f64.log2(), max_relative = 1e-15);
        assert_eq!(r.scheme, Scheme::RisAnomalous);
    }

    #[test]
    fn full_duplex_doubles_prelog() {
        for gamma in [0.0, 0.3, 3.0, 1e4] {
            let hd = rate_hd_af(&breakdown(RelayScheme::HdAf, 0.0, Some(0.0), gamma, Some(gamma))).unwrap();
            let fd = rate_fd_af(&breakdown(RelayScheme::FdAf, gamma, None, gamma, Some(gamma))).unwrap();
            assert_eq!(fd, 2.0 * hd);
        }
    }

    #[test]
    fn case_two_worked_example() {
        // A = 0, B = 3, C = 1 at p_tot = 4, with unit noise and path loss.
        let real = RelayChannelRealization::new(
            c(0.0),
            GainVector::from_real(&[3f64.sqrt()]).unwrap(),
            GainVector::from_real(&[1.0]).unwrap(),
            None,
        )
        .unwrap();
        let budget = LinkBudget {
            p_tot: 4.0,
            ..LinkBudget::unit()
        };
        let r = best_rate(&real, &budget, RelayScheme::HdDf).unwrap();
        assert_eq!(r.scheme, Scheme::HdDf);
        let split = r.split.unwrap();
        assert_relative_eq!(split.p_s, 1.0, max_relative = 1e-15);
        assert_relative_eq!(split.p_r, 3.0, max_relative = 1e-15);
        assert_relative_eq!(r.rate, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn strong_direct_link_routes_to_siso() {
        let real = RelayChannelRealization::new(
            c(2.0),
            GainVector::from_real(&[1.0]).unwrap(),
            GainVector::from_real(&[1.0]).unwrap(),
            None,
        )
        .unwrap();
        let budget = LinkBudget {
            p_tot: 2.0,
            ..LinkBudget::unit()
        };
        let r = best_rate(&real, &budget, RelayScheme::HdDf).unwrap();
        assert_eq!(r.scheme, Scheme::Siso);
        assert_relative_eq!(r.rate, 9f64.log2(), max_relative = 1e-15);
        let cand = r.hd_df_candidates.unwrap();
        assert!(cand.siso > cand.relay);
    }

    #[test]
    fn best_rate_dominates_random_splits() {
        let budget = LinkBudget {
            pl_sd: 1e-2,
            pl_sr: 0.3,
            pl_rd: 0.2,
            n0: 0.05,
            p_tot: 2.0,
            ..LinkBudget::unit()
        };
        let mut rng = RngStream::new(1, 1).rng();
        for trial in 0..100 {
            let real = random_realization(9, trial);
            for scheme in RelayScheme::ALL {
                let best = best_rate(&real, &budget, scheme).unwrap();
                for _ in 0..100 {
                    let p_s = rng.random_range(1e-9..budget.p_tot);
                    let split = PowerSplit::from_total(p_s, budget.p_tot).unwrap();
                    let r = relay_rate(&evaluate(scheme, &real, &budget, split).unwrap());
                    assert!(best.rate >= r - 1e-12, "{scheme}: {} < {r}", best.rate);
                }
            }
        }
    }

    #[test]
    fn hd_df_bounded_by_each_constraint_and_above_siso() {
        let budget = LinkBudget {
            pl_sd: 0.05,
            n0: 0.1,
            ..LinkBudget::unit()
        };
        for trial in 0..200 {
            let real = random_realization(3, trial);
            let best = best_rate(&real, &budget, RelayScheme::HdDf).unwrap();
            assert!(best.rate >= siso_result(&real, &budget).rate);
            if let LinkSnr::Relay(snr) = best.snr {
                let r = rate_hd_df(&snr).unwrap();
                assert!(r <= 0.5 * (1.0 + snr.gamma_relay).log2() + 1e-15);
                assert!(r <= 0.5 * (1.0 + snr.gamma_end_to_end.unwrap()).log2() + 1e-15);
            }
        }
    }

    #[test]
    fn equalized_split_balances_min_arguments() {
        let budget = LinkBudget::unit();
        for trial in 0..200 {
            let real = random_realization(4, trial);
            let r = best_rate(&real, &budget, RelayScheme::HdDf).unwrap();
            if r.branch == Some(AllocationBranch::Equalized) {
                let snr = r.snr.relay().unwrap();
                let e2e = snr.gamma_end_to_end.unwrap();
                assert!((snr.gamma_relay - e2e).abs() <= 1e-9 * e2e);
            }
        }
    }

    #[test]
    fn log_of_max_equals_max_of_log_on_grid() {
        let real = random_realization(6, 0);
        let budget = LinkBudget::unit();
        for scheme in RelayScheme::ALL {
            let grid: Vec<SnrBreakdown> = (1..=1000)
                .map(|i| {
                    let split = PowerSplit::from_total(i as f64 / 1000.0, 1.0).unwrap();
                    evaluate(scheme, &real, &budget, split).unwrap()
                })
                .collect();
            let max_of_log = grid.iter().map(relay_rate).fold(f64::MIN, f64::max);
            let max_snr = grid
                .iter()
                .map(|s| LinkSnr::Relay(*s).effective())
                .fold(f64::MIN, f64::max);
            let log_of_max = log_rate(Scheme::from(scheme).prelog(), max_snr);
            assert!((max_of_log - log_of_max).abs() <= 1e-9);
        }
    }

    proptest! {
        #[test]
        fn rates_monotone_in_total_power(trial in 0u64..500, p in 0.01f64..10.0, factor in 1.001f64..4.0) {
            let real = random_realization(12, trial);
            let lo = LinkBudget { p_tot: p, n0: 0.1, ..LinkBudget::unit() };
            let hi = LinkBudget { p_tot: p * factor, ..lo };
            for scheme in RelayScheme::ALL {
                let a = best_rate(&real, &lo, scheme).unwrap().rate;
                let b = best_rate(&real, &hi, scheme).unwrap().rate;
                prop_assert!(b >= a, "{} {} {}", scheme, a, b);
            }
        }
    }
}
