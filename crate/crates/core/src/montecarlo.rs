//! Seeded Monte Carlo engine: per-trial channel draws, scheme evaluation,
//! aggregation and one-dimensional parameter sweeps.
//!
//! Trial `t` of a run with seed `s` reads all of its randomness from
//! `RngStream::new(s, t)`, so results depend only on `(scenario, seed,
//! n_trials)`. Trials are evaluated on the current rayon pool, collected in
//! trial order and aggregated sequentially, which makes every statistic
//! bit-identical for any worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fading::{sample_vector, FadingSpec, Link, RngStream};
use crate::propagation::{LinkBudget, LinkGeometry, PathLossModel, RadioConfig};
use crate::rates::{relay_result, ris_rate, siso_result, with_siso_fallback, Allocator, RateResult, Scheme};
use crate::relay_links::{af_bottleneck_holds, FdChannels, RelayChannelRealization, RelayScheme};
use crate::ris_links::{validate_r_a, RisChannelRealization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllocationMode {
    Closed,
    Oracle,
    /// Closed form drives the statistics; the oracle is reported alongside.
    Both,
}

impl AllocationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Closed => "closed",
            Self::Oracle => "oracle",
            Self::Both => "both",
        }
    }
}

impl fmt::Display for AllocationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AllocationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Self::Closed),
            "oracle" => Ok(Self::Oracle),
            "both" => Ok(Self::Both),
            other => Err(invalid(
                "allocation",
                format!("expected one of closed, oracle, both; got {other:?}"),
            )),
        }
    }
}

/// Fading statistics of every link. The full-duplex half-array channels use
/// the `sr` and `rd` statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingProfile {
    pub sd: FadingSpec,
    pub sr: FadingSpec,
    pub rd: FadingSpec,
    pub li: FadingSpec,
    pub s_ris: FadingSpec,
    pub ris_d: FadingSpec,
}

impl FadingProfile {
    pub fn uniform(spec: FadingSpec) -> Self {
        Self {
            sd: spec,
            sr: spec,
            rd: spec,
            li: spec,
            s_ris: spec,
            ris_d: spec,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for spec in [self.sd, self.sr, self.rd, self.li, self.s_ris, self.ris_d] {
            spec.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub radio: RadioConfig,
    pub geometry: LinkGeometry,
    pub pathloss: PathLossModel,
    pub fading: FadingProfile,
    pub n_r: usize,
    pub n_ris: usize,
    pub r_a: f64,
    pub schemes: Vec<Scheme>,
    pub allocation_mode: AllocationMode,
    pub oracle_grid: usize,
    /// Rate below which a trial counts as an outage, bits/s/Hz.
    pub outage_threshold: f64,
}

impl Scenario {
    pub const DEFAULT_OUTAGE_THRESHOLD: f64 = 1.0;
    pub const DEFAULT_ORACLE_GRID: usize = 10_000;

    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.geometry.validate()?;
        self.pathloss.validate()?;
        self.fading.validate()?;
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "at least one scheme is required"));
        }
        if self.n_r == 0 {
            return Err(invalid("n_r", "must be >= 1"));
        }
        if self.has_full_duplex() && (self.n_r < 2 || !self.n_r.is_multiple_of(2)) {
            return Err(Error::OddRelayAntennas(self.n_r));
        }
        if self.n_ris == 0 {
            return Err(invalid("n_ris", "must be >= 1"));
        }
        validate_r_a(self.r_a)?;
        if self.oracle_grid < 2 {
            return Err(invalid("oracle_grid", "must be >= 2"));
        }
        if !self.outage_threshold.is_finite() || self.outage_threshold < 0.0 {
            return Err(invalid("outage_threshold", "must be finite and >= 0"));
        }
        Ok(())
    }

    fn has_full_duplex(&self) -> bool {
        self.schemes
            .iter()
            .any(|s| s.relay().is_some_and(RelayScheme::is_full_duplex))
    }

    fn has_relay(&self) -> bool {
        self.schemes.iter().any(|s| s.relay().is_some())
    }

    fn has_ris(&self) -> bool {
        self.schemes.iter().any(|s| s.ris_mode().is_some())
    }

    /// Copy of the scenario with `variable` set to `value`.
    pub fn with(&self, variable: SweepVariable, value: f64) -> Result<Self> {
        let mut s = self.clone();
        match variable {
            SweepVariable::DSd => s.geometry.d_sd = value,
            SweepVariable::DSr => s.geometry.d_sr = value,
            SweepVariable::DRd => s.geometry.d_rd = value,
            SweepVariable::PTot => s.radio.p_tot_w = value,
            SweepVariable::NR => s.n_r = as_count("n_r", value)?,
            SweepVariable::NRis => s.n_ris = as_count("n_ris", value)?,
            SweepVariable::OmegaLi => s.fading.li.mean_power = value,
            SweepVariable::RA => s.r_a = value,
        }
        s.validate()?;
        Ok(s)
    }

    /// Validated scenario with its link budget precomputed.
    pub fn engine(&self) -> Result<TrialEngine<'_>> {
        self.validate()?;
        let budget = LinkBudget::new(&self.radio, &self.geometry, &self.pathloss)?;
        Ok(TrialEngine { scenario: self, budget })
    }
}

fn as_count(name: &'static str, value: f64) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(invalid(name, format!("must be a positive integer, got {value}")))
    }
}

/// One scheme's result in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub scheme: Scheme,
    /// Rate under the scenario's primary allocator (closed form unless the
    /// mode is `Oracle`).
    pub rate: f64,
    /// Oracle rate, present in `Both` mode.
    pub oracle_rate: Option<f64>,
    pub ps_fraction: f64,
    pub gamma: GammaSample,
    /// AF evaluations in this trial that broke the strict bottleneck bound.
    pub af_violations: usize,
}

/// SNR components reported per scheme. Relay schemes report the relay
/// breakdown at their allocated split; direct and RIS links only `e2e`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GammaSample {
    pub relay: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub e2e: Option<f64>,
}

struct Draw {
    relay: Option<RelayChannelRealization>,
    ris: Option<RisChannelRealization>,
    h_sd: crate::fading::ComplexGain,
}

pub struct TrialEngine<'a> {
    scenario: &'a Scenario,
    budget: LinkBudget,
}

impl TrialEngine<'_> {
    pub fn budget(&self) -> &LinkBudget {
        &self.budget
    }

    fn draw(&self, stream: RngStream) -> Result<Draw> {
        let sc = self.scenario;
        let f = &sc.fading;
        let h_sd = f.sd.sample(&mut stream.link(Link::Sd));
        let relay = if sc.has_relay() {
            let h_sr = sample_vector(&f.sr, sc.n_r, &mut stream.link(Link::Sr))?;
            let h_rd = sample_vector(&f.rd, sc.n_r, &mut stream.link(Link::Rd))?;
            let fd = if sc.n_r >= 2 && sc.n_r.is_multiple_of(2) {
                let half = sc.n_r / 2;
                Some(FdChannels {
                    h_sr: sample_vector(&f.sr, half, &mut stream.link(Link::SrFd))?,
                    h_rd: sample_vector(&f.rd, half, &mut stream.link(Link::RdFd))?,
                    h_li: sample_vector(&f.li, half, &mut stream.link(Link::Li))?,
                })
            } else {
                None
            };
            Some(RelayChannelRealization::new(h_sd, h_sr, h_rd, fd)?)
        } else {
            None
        };
        let ris = if sc.has_ris() {
            Some(RisChannelRealization::new(
                h_sd,
                sample_vector(&f.s_ris, sc.n_ris, &mut stream.link(Link::SRis))?,
                sample_vector(&f.ris_d, sc.n_ris, &mut stream.link(Link::RisD))?,
            )?)
        } else {
            None
        };
        Ok(Draw { relay, ris, h_sd })
    }

    /// Evaluate every configured scheme on trial `trial` of `seed`, in the
    /// scenario's scheme order.
    pub fn evaluate(&self, seed: u64, trial: u64) -> Result<Vec<TrialOutcome>> {
        let draw = self.draw(RngStream::new(seed, trial))?;
        self.scenario
            .schemes
            .iter()
            .map(|&scheme| self.evaluate_scheme(scheme, &draw))
            .collect()
    }

    fn evaluate_scheme(&self, scheme: Scheme, draw: &Draw) -> Result<TrialOutcome> {
        let b = &self.budget;
        if let Some(relay) = scheme.relay() {
            let real = draw.relay.as_ref().expect("relay channels drawn for relay schemes");
            return self.evaluate_relay(relay, real);
        }
        let result = match scheme.ris_mode() {
            Some(mode) => ris_rate(
                draw.ris.as_ref().expect("RIS channels drawn for RIS schemes"),
                self.scenario.r_a,
                mode,
                b,
            )?,
            None => direct_result(draw.h_sd, b),
        };
        let gamma = GammaSample {
            e2e: Some(result.snr.effective()),
            ..GammaSample::default()
        };
        Ok(TrialOutcome {
            scheme,
            rate: result.rate,
            oracle_rate: (self.scenario.allocation_mode == AllocationMode::Both).then_some(result.rate),
            ps_fraction: result.source_fraction(),
            gamma,
            af_violations: 0,
        })
    }

    fn evaluate_relay(&self, scheme: RelayScheme, real: &RelayChannelRealization) -> Result<TrialOutcome> {
        let b = &self.budget;
        let oracle = Allocator::Oracle {
            grid_points: self.scenario.oracle_grid,
        };
        let (primary, secondary) = match self.scenario.allocation_mode {
            AllocationMode::Closed => (Allocator::ClosedForm, None),
            AllocationMode::Oracle => (oracle, None),
            AllocationMode::Both => (Allocator::ClosedForm, Some(oracle)),
        };

        let relay = relay_result(real, b, scheme, primary)?;
        let mut af_violations = af_violation(scheme, real, b, &relay) as usize;
        let gamma = relay_gammas(&relay);
        let finish = |r: RateResult| {
            if scheme == RelayScheme::HdDf {
                with_siso_fallback(r, siso_result(real, b))
            } else {
                r
            }
        };
        let chosen = finish(relay);

        let oracle_rate = match secondary {
            Some(alloc) => {
                let r = relay_result(real, b, scheme, alloc)?;
                af_violations += af_violation(scheme, real, b, &r) as usize;
                Some(finish(r).rate)
            }
            None => None,
        };

        Ok(TrialOutcome {
            scheme: scheme.into(),
            rate: chosen.rate,
            oracle_rate,
            ps_fraction: chosen.source_fraction(),
            gamma,
            af_violations,
        })
    }
}

fn direct_result(h_sd: crate::fading::ComplexGain, b: &LinkBudget) -> RateResult {
    let a = b.pl_sd * h_sd.norm_sqr() / b.n0;
    let gamma = b.p_tot * a;
    RateResult {
        scheme: Scheme::Siso,
        rate: crate::rates::rate_siso(a, b.p_tot),
        split: None,
        snr: crate::rates::LinkSnr::Direct(gamma),
        branch: None,
        hd_df_candidates: None,
    }
}

fn relay_gammas(result: &RateResult) -> GammaSample {
    match result.snr.relay() {
        Some(s) => GammaSample {
            relay: Some(s.gamma_relay),
            d1: s.gamma_dest_direct,
            d2: Some(s.gamma_dest_hop2),
            e2e: s.gamma_end_to_end,
        },
        None => GammaSample::default(),
    }
}

fn af_violation(scheme: RelayScheme, real: &RelayChannelRealization, b: &LinkBudget, result: &RateResult) -> bool {
    let (Some(snr), Some(split)) = (result.snr.relay(), result.split) else {
        return false;
    };
    match scheme {
        RelayScheme::HdAf => {
            let second_hop = split.p_r * b.pl_rd * real.h_rd.norm_sqr() / b.n0;
            !af_bottleneck_holds(snr.gamma_relay, second_hop, snr.gamma_dest_hop2)
        }
        RelayScheme::FdAf => {
            let combined = snr.gamma_end_to_end.unwrap_or(0.0);
            !af_bottleneck_holds(snr.gamma_relay, snr.gamma_dest_hop2, combined)
        }
        _ => false,
    }
}

/// Mean of each SNR component over the trials. A component is reported only
/// if every trial defines it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GammaSummary {
    pub relay: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub e2e: Option<f64>,
}

/// Closed-form versus oracle allocation over the same trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub mean_rate_closed: f64,
    pub mean_rate_oracle: f64,
    /// Largest per-trial `oracle - closed`. Non-positive when the closed form
    /// is never beaten by the grid.
    pub max_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStatistics {
    pub scheme: Scheme,
    pub n_trials: usize,
    pub mean_rate: f64,
    /// Sample standard deviation (`n - 1` denominator); zero for one trial.
    pub std_rate: f64,
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
    pub outage_prob: f64,
    pub mean_ps_fraction: f64,
    pub gamma: GammaSummary,
    pub af_violations: usize,
    pub oracle: Option<OracleComparison>,
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn sample_std(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }
}

#[derive(Default)]
struct OptionalMean {
    acc: Welford,
    missing: bool,
}

impl OptionalMean {
    fn push(&mut self, x: Option<f64>) {
        match x {
            Some(x) => self.acc.push(x),
            None => self.missing = true,
        }
    }

    fn get(&self) -> Option<f64> {
        (!self.missing && self.acc.n > 0).then_some(self.acc.mean)
    }
}

/// Linear interpolation between order statistics of a sorted sample.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

fn aggregate(scheme: Scheme, outcomes: &[TrialOutcome], threshold: f64) -> TrialStatistics {
    let mut rate = Welford::default();
    let mut ps = Welford::default();
    let mut oracle = Welford::default();
    let mut max_gap = f64::NEG_INFINITY;
    let (mut g_relay, mut g_d1, mut g_d2, mut g_e2e) = (
        OptionalMean::default(),
        OptionalMean::default(),
        OptionalMean::default(),
        OptionalMean::default(),
    );
    let mut outages = 0usize;
    let mut af_violations = 0usize;
    let mut rates = Vec::with_capacity(outcomes.len());

    for o in outcomes {
        rate.push(o.rate);
        ps.push(o.ps_fraction);
        rates.push(o.rate);
        if o.rate < threshold {
            outages += 1;
        }
        af_violations += o.af_violations;
        if let Some(r) = o.oracle_rate {
            oracle.push(r);
            max_gap = max_gap.max(r - o.rate);
        }
        g_relay.push(o.gamma.relay);
        g_d1.push(o.gamma.d1);
        g_d2.push(o.gamma.d2);
        g_e2e.push(o.gamma.e2e);
    }
    rates.sort_by(f64::total_cmp);

    let n = outcomes.len();
    TrialStatistics {
        scheme,
        n_trials: n,
        mean_rate: rate.mean,
        std_rate: rate.sample_std(),
        p5: percentile(&rates, 0.05),
        p50: percentile(&rates, 0.50),
        p95: percentile(&rates, 0.95),
        outage_prob: outages as f64 / n as f64,
        mean_ps_fraction: ps.mean,
        gamma: GammaSummary {
            relay: g_relay.get(),
            d1: g_d1.get(),
            d2: g_d2.get(),
            e2e: g_e2e.get(),
        },
        af_violations,
        oracle: (oracle.n == n).then_some(OracleComparison {
            mean_rate_closed: rate.mean,
            mean_rate_oracle: oracle.mean,
            max_gap,
        }),
    }
}

/// Run `n_trials` trials on the current rayon pool and aggregate per scheme.
pub fn run_trials(scenario: &Scenario, n_trials: u64, seed: u64) -> Result<BTreeMap<Scheme, TrialStatistics>> {
    if n_trials == 0 {
        return Err(invalid("n_trials", "must be >= 1"));
    }
    let engine = scenario.engine()?;
    let trials: Vec<Vec<TrialOutcome>> = (0..n_trials)
        .into_par_iter()
        .map(|t| engine.evaluate(seed, t))
        .collect::<Result<_>>()?;

    let mut out = BTreeMap::new();
    for (i, &scheme) in scenario.schemes.iter().enumerate() {
        if out.contains_key(&scheme) {
            continue;
        }
        let column: Vec<TrialOutcome> = trials.iter().map(|t| t[i]).collect();
        out.insert(scheme, aggregate(scheme, &column, scenario.outage_threshold));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepVariable {
    DSd,
    DSr,
    DRd,
    PTot,
    NR,
    NRis,
    OmegaLi,
    RA,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 8] = [
        Self::DSd,
        Self::DSr,
        Self::DRd,
        Self::PTot,
        Self::NR,
        Self::NRis,
        Self::OmegaLi,
        Self::RA,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DSd => "d_sd",
            Self::DSr => "d_sr",
            Self::DRd => "d_rd",
            Self::PTot => "p_tot",
            Self::NR => "n_r",
            Self::NRis => "n_ris",
            Self::OmegaLi => "omega_li",
            Self::RA => "r_a",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|v| v.as_str()).collect();
            invalid(
                "sweep.variable",
                format!("expected one of {}, got {s:?}", names.join(", ")),
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>) -> Result<Self> {
        let spec = Self { variable, values };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(invalid("sweep.values", "must not be empty"));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(invalid("sweep.values", format!("must be finite, got {v}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub stats: BTreeMap<Scheme, TrialStatistics>,
}

/// Independent `run_trials` per sweep value with the same seed, so curves
/// share their fading draws. Every substitution is validated before any
/// trial runs.
pub fn run_sweep(scenario: &Scenario, sweep: &SweepSpec, n_trials: u64, seed: u64) -> Result<Vec<SweepPoint>> {
    sweep.validate()?;
    let scenarios = sweep
        .values
        .iter()
        .map(|&v| scenario.with(sweep.variable, v))
        .collect::<Result<Vec<_>>>()?;
    sweep
        .values
        .iter()
        .zip(&scenarios)
        .map(|(&value, s)| {
            Ok(SweepPoint {
                value,
                stats: run_trials(s, n_trials, seed)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_scenario(schemes: Vec<Scheme>, fading: FadingSpec) -> Scenario {
        Scenario {
            radio: RadioConfig::new(1.0, 0.0, 1.0, 1e9).unwrap(),
            geometry: LinkGeometry::new(1.0, 1.0, 1.0).unwrap(),
            // unit distances at the reference distance: every direct path gain is one
            pathloss: PathLossModel::log_distance(2.0, 0.0, 1.0).unwrap(),
            fading: FadingProfile::uniform(fading),
            n_r: 2,
            n_ris: 4,
            r_a: 1.0,
            schemes,
            allocation_mode: AllocationMode::Closed,
            oracle_grid: 1000,
            outage_threshold: 1.0,
        }
    }

    fn rayleigh_scenario(schemes: Vec<Scheme>) -> Scenario {
        let mut s = unit_scenario(schemes, FadingSpec::rayleigh(1.0).unwrap());
        // noise at 1 Hz is ~4e-21 W; pick a power that gives moderate SNRs
        s.radio.p_tot_w = 1e-19;
        s.n_r = 4;
        s
    }

    #[test]
    fn deterministic_single_trial_collapses_to_closed_form() {
        let sc = unit_scenario(vec![Scheme::HdDf], FadingSpec::los(1.0, 0.0).unwrap());
        let engine = sc.engine().unwrap();
        let b = *engine.budget();
        let real = RelayChannelRealization::new(
            crate::fading::ComplexGain::new(1.0, 0.0),
            crate::fading::GainVector::from_real(&[1.0, 1.0]).unwrap(),
            crate::fading::GainVector::from_real(&[1.0, 1.0]).unwrap(),
            None,
        )
        .unwrap();
        let expected = crate::rates::best_rate(&real, &b, RelayScheme::HdDf).unwrap().rate;
        let stats = run_trials(&sc, 1, 7).unwrap();
        let s = stats[&Scheme::HdDf];
        assert_eq!(s.n_trials, 1);
        assert_eq!(s.mean_rate, expected);
        assert_eq!(s.std_rate, 0.0);
        assert_eq!((s.p5, s.p50, s.p95), (expected, expected, expected));
    }

    #[test]
    fn deterministic_ensemble_has_zero_variance() {
        let sc = unit_scenario(
            vec![Scheme::HdAf, Scheme::FdDf, Scheme::RisDiffuse],
            FadingSpec::los(1.0, 0.3).unwrap(),
        );
        for s in run_trials(&sc, 10_000, 1).unwrap().values() {
            assert_eq!(s.std_rate, 0.0, "{}", s.scheme);
            assert_eq!(s.p5, s.mean_rate);
            assert_eq!(s.p95, s.mean_rate);
        }
    }

    #[test]
    fn ris_gamma_ratios_follow_n_squared() {
        let mut sc = unit_scenario(vec![Scheme::RisDiffuse], FadingSpec::los(1.0, 0.0).unwrap());
        // blocked direct link
        sc.fading.sd = FadingSpec::los(1e-300, 0.0).unwrap();
        let gamma = |n: usize| {
            let mut s = sc.clone();
            s.n_ris = n;
            run_trials(&s, 3, 0).unwrap()[&Scheme::RisDiffuse].gamma.e2e.unwrap()
        };
        let g1 = gamma(1);
        assert_relative_eq!(gamma(2) / g1, 4.0, max_relative = 1e-9);
        assert_relative_eq!(gamma(4) / g1, 16.0, max_relative = 1e-9);
    }

    #[test]
    fn n_ris_sweep_gives_log_of_n_squared() {
        let mut sc = unit_scenario(vec![Scheme::RisAnomalous], FadingSpec::los(1.0, 0.0).unwrap());
        sc.fading.sd = FadingSpec::los(1e-300, 0.0).unwrap();
        let sweep = SweepSpec::new(SweepVariable::NRis, vec![1.0, 4.0, 16.0]).unwrap();
        let points = run_sweep(&sc, &sweep, 2, 0).unwrap();
        let b = *sc.engine().unwrap().budget();
        let c = b.p_tot * b.pl_ris_anomalous / b.n0;
        for p in &points {
            let n = p.value;
            assert_relative_eq!(
                p.stats[&Scheme::RisAnomalous].mean_rate,
                (1.0 + c * n * n).log2(),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn p_tot_sweep_is_strictly_increasing() {
        let sc = rayleigh_scenario(vec![
            Scheme::HdDf,
            Scheme::HdAf,
            Scheme::FdDf,
            Scheme::FdAf,
            Scheme::RisDiffuse,
        ]);
        let sweep = SweepSpec::new(SweepVariable::PTot, vec![1e-19, 2e-19, 4e-19]).unwrap();
        let points = run_sweep(&sc, &sweep, 500, 3).unwrap();
        for scheme in &sc.schemes {
            let means: Vec<f64> = points.iter().map(|p| p.stats[scheme].mean_rate).collect();
            assert!(means.windows(2).all(|w| w[1] > w[0]), "{scheme}: {means:?}");
        }
    }

    #[test]
    fn d_sr_sweep_is_non_increasing_per_trial() {
        let mut sc = rayleigh_scenario(RelayScheme::ALL.map(Scheme::from).to_vec());
        sc.pathloss = PathLossModel::log_distance(3.0, 0.0, 1.0).unwrap();
        sc.radio.p_tot_w = 1e-17;
        sc.geometry = LinkGeometry::new(20.0, 5.0, 15.0).unwrap();
        let near = sc.with(SweepVariable::DSr, 5.0).unwrap();
        let far = sc.with(SweepVariable::DSr, 12.0).unwrap();
        let (en, ef) = (near.engine().unwrap(), far.engine().unwrap());
        for t in 0..300 {
            let a = en.evaluate(9, t).unwrap();
            let b = ef.evaluate(9, t).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(y.rate <= x.rate, "{} trial {t}: {} > {}", x.scheme, y.rate, x.rate);
            }
        }
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let sc = rayleigh_scenario(Scheme::ALL.to_vec());
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_trials(&sc, 2000, 42).unwrap())
        };
        let one = run(1);
        let eight = run(8);
        for (a, b) in one.values().zip(eight.values()) {
            assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
    }

    #[test]
    fn shared_direct_link_is_identical_across_schemes() {
        let sc = rayleigh_scenario(vec![Scheme::Siso, Scheme::RisDiffuse]);
        let engine = sc.engine().unwrap();
        let draw = engine.draw(RngStream::new(5, 11)).unwrap();
        assert_eq!(draw.ris.unwrap().h_sd, draw.h_sd);
        assert!(draw.relay.is_none());
    }

    #[test]
    fn both_mode_reports_oracle_alongside_closed_form() {
        let mut sc = rayleigh_scenario(RelayScheme::ALL.map(Scheme::from).to_vec());
        sc.allocation_mode = AllocationMode::Both;
        for s in run_trials(&sc, 200, 8).unwrap().values() {
            let o = s.oracle.unwrap();
            assert_eq!(o.mean_rate_closed, s.mean_rate);
            assert!(o.max_gap <= 1e-6, "{}: gap {}", s.scheme, o.max_gap);
            assert_eq!(s.af_violations, 0);
        }
    }

    #[test]
    fn statistics_are_ordered_and_bounded() {
        let sc = rayleigh_scenario(Scheme::ALL.to_vec());
        for s in run_trials(&sc, 3000, 2).unwrap().values() {
            assert!(s.p5 <= s.p50 && s.p50 <= s.p95);
            assert!(s.p5 <= s.mean_rate && s.mean_rate <= s.p95);
            assert!((0.0..=1.0).contains(&s.outage_prob));
            assert!((0.0..=1.0).contains(&s.mean_ps_fraction));
        }
    }

    #[test]
    fn fd_gamma_columns() {
        let sc = rayleigh_scenario(vec![Scheme::FdDf, Scheme::HdAf]);
        let stats = run_trials(&sc, 50, 0).unwrap();
        let fd = stats[&Scheme::FdDf].gamma;
        assert!(fd.relay.is_some() && fd.d2.is_some());
        assert!(fd.d1.is_none() && fd.e2e.is_none());
        let hd = stats[&Scheme::HdAf].gamma;
        assert!(hd.d1.is_some() && hd.e2e.is_some());
    }

    #[test]
    fn invalid_configuration_is_rejected_before_running() {
        let mut sc = rayleigh_scenario(vec![Scheme::FdAf]);
        sc.n_r = 3;
        assert_eq!(run_trials(&sc, 10, 0).unwrap_err(), Error::OddRelayAntennas(3));
        sc.n_r = 4;
        assert!(run_trials(&sc, 0, 0).is_err());
        let sweep = SweepSpec::new(SweepVariable::NR, vec![2.0, 3.0]).unwrap();
        assert_eq!(run_sweep(&sc, &sweep, 10, 0).unwrap_err(), Error::OddRelayAntennas(3));
        assert!(sc.with(SweepVariable::NRis, 2.5).is_err());
        assert!(sc.with(SweepVariable::RA, 1.5).is_err());
        assert!(SweepSpec::new(SweepVariable::PTot, vec![]).is_err());
    }

    #[test]
    fn odd_n_r_is_fine_without_full_duplex() {
        let mut sc = rayleigh_scenario(vec![Scheme::HdDf, Scheme::HdAf]);
        sc.n_r = 3;
        assert_eq!(run_trials(&sc, 20, 0).unwrap().len(), 2);
    }

    #[test]
    fn percentile_interpolates() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.5), 2.0);
        assert_eq!(percentile(&v, 0.05), 0.2);
        assert_eq!(percentile(&[3.0], 0.95), 3.0);
    }
}
