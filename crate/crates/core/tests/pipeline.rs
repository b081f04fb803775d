use linklab_core::montecarlo::FadingProfile;
use linklab_core::power_allocation::link_coefficients;
use linklab_core::rates::{best_rate, best_rate_with, ris_rate, Allocator};
use linklab_core::relay_links::FdChannels;
use linklab_core::{
    run_sweep, run_trials, AllocationMode, ComplexGain, FadingSpec, GainVector, LinkBudget, LinkGeometry,
    PathLossModel, RadioConfig, RelayChannelRealization, RelayScheme, RisChannelRealization, RisMode, Scenario, Scheme,
    SweepSpec, SweepVariable,
};

fn ones(n: usize) -> GainVector {
    GainVector::from_real(&vec![1.0; n]).unwrap()
}

#[test]
fn unit_ris_case_through_rates() {
    let real = RisChannelRealization::new(ComplexGain::new(1.0, 0.0), ones(1), ones(1)).unwrap();
    let r = ris_rate(&real, 1.0, RisMode::Diffuse, &LinkBudget::unit()).unwrap();
    assert!((r.rate - 5f64.log2()).abs() < 1e-12);
    assert!((r.rate - 2.3219).abs() < 1e-4);
}

#[test]
fn realization_budget_and_coefficients_agree() {
    let radio = RadioConfig::new(1e6, 7.0, 0.5, 3.5e9).unwrap();
    let geometry = LinkGeometry::new(200.0, 90.0, 120.0).unwrap();
    let model = PathLossModel::free_space(radio.carrier_hz).unwrap();
    let budget = LinkBudget::new(&radio, &geometry, &model).unwrap();
    let h_sr = GainVector::from_real(&[0.3, 1.1, 0.7, 0.2]).unwrap();
    let h_rd = GainVector::from_real(&[0.9, 0.4, 1.3, 0.6]).unwrap();
    let fd = FdChannels {
        h_sr: GainVector::from_real(&[0.5, 0.8]).unwrap(),
        h_rd: GainVector::from_real(&[1.2, 0.1]).unwrap(),
        h_li: GainVector::from_real(&[1e-5, 2e-5]).unwrap(),
    };
    let real = RelayChannelRealization::new(ComplexGain::new(0.2, -0.1), h_sr, h_rd, Some(fd)).unwrap();
    let c = link_coefficients(&real, &budget).unwrap();
    assert!((c.a_direct - budget.pl_sd * 0.05 / budget.n0).abs() <= 1e-12 * c.a_direct);
    assert!((c.b_hd - budget.pl_sr * (0.09 + 1.21 + 0.49 + 0.04) / budget.n0).abs() <= 1e-12 * c.b_hd);

    for scheme in RelayScheme::ALL {
        let closed = best_rate(&real, &budget, scheme).unwrap();
        let oracle = best_rate_with(&real, &budget, scheme, Allocator::Oracle { grid_points: 100_000 }).unwrap();
        assert!(
            closed.rate >= oracle.rate - 1e-6,
            "{scheme}: {} < {}",
            closed.rate,
            oracle.rate
        );
        assert!(closed.rate > 0.0 && closed.rate.is_finite());
    }
}

fn scenario(schemes: Vec<Scheme>) -> Scenario {
    Scenario {
        radio: RadioConfig::new(1e6, 9.0, 0.1, 2.4e9).unwrap(),
        geometry: LinkGeometry::new(100.0, 50.0, 60.0).unwrap(),
        pathloss: PathLossModel::log_distance(3.0, 40.0, 1.0).unwrap(),
        fading: FadingProfile {
            li: FadingSpec::rayleigh(1e-11).unwrap(),
            ..FadingProfile::uniform(FadingSpec::rician(2.0, 1.0, 0.4).unwrap())
        },
        n_r: 4,
        n_ris: 16,
        r_a: 0.8,
        schemes,
        allocation_mode: AllocationMode::Closed,
        oracle_grid: 5000,
        outage_threshold: 1.0,
    }
}

#[test]
fn sweep_points_match_independent_runs() {
    let sc = scenario(Scheme::ALL.to_vec());
    let sweep = SweepSpec::new(SweepVariable::OmegaLi, vec![1e-12, 1e-10]).unwrap();
    let points = run_sweep(&sc, &sweep, 300, 17).unwrap();
    for p in &points {
        let direct = run_trials(&sc.with(SweepVariable::OmegaLi, p.value).unwrap(), 300, 17).unwrap();
        assert_eq!(p.stats, direct);
    }
    // Stronger loop-back interference only hurts full duplex.
    let (weak, strong) = (&points[0].stats, &points[1].stats);
    for s in [Scheme::FdDf, Scheme::FdAf] {
        assert!(strong[&s].mean_rate < weak[&s].mean_rate, "{s}");
    }
    for s in [Scheme::HdDf, Scheme::HdAf, Scheme::RisAnomalous, Scheme::Siso] {
        assert_eq!(strong[&s], weak[&s], "{s}");
    }
}

#[test]
fn schemes_share_the_direct_link_draw() {
    // Adding schemes must not perturb the draws seen by the others.
    let alone = run_trials(&scenario(vec![Scheme::Siso]), 500, 5).unwrap();
    let together = run_trials(&scenario(Scheme::ALL.to_vec()), 500, 5).unwrap();
    assert_eq!(alone[&Scheme::Siso], together[&Scheme::Siso]);
}

#[test]
fn hd_df_never_below_direct_transmission() {
    let stats = run_trials(&scenario(vec![Scheme::HdDf, Scheme::Siso]), 2000, 8).unwrap();
    assert!(stats[&Scheme::HdDf].mean_rate >= stats[&Scheme::Siso].mean_rate);
    assert!(stats[&Scheme::HdDf].outage_prob <= stats[&Scheme::Siso].outage_prob);
}
