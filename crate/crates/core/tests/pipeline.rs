use boxmf::synth::*;
use boxmf::*;
use proptest::prelude::*;

fn iid(seed: u64) -> PriceSeries {
    let k = RandomKind::IidLognormal {
        level: 1.0,
        sigma: 0.01,
    };
    random_positive_series("iid", 240, k, seed).unwrap()
}

#[test]
fn cascade_matches_analytic_tau_and_spectrum_shape() {
    let spec = CascadeSpec::new(0.6, 12, 1.0).unwrap();
    let s = binomial_cascade("c", &spec, None).unwrap();
    let grid = MomentGrid::range(-10.0, 10.0, 1.0).unwrap();
    let a = analyze_series(&s, &BoxScheme::derive(4096).unwrap(), &grid).unwrap();
    for (&q, &t) in grid.values().iter().zip(&a.exponents.tau) {
        assert!(
            (t - analytic_binomial_tau(0.6, q).unwrap()).abs() <= 0.05,
            "q={q}"
        );
    }
    assert!((a.exponents.tau_at(2.0).unwrap() - 0.9434).abs() < 0.05);
    // α non-increasing and f peaking at 1 when q = 0
    assert!(a.spectrum.max_alpha_increase() <= 1e-6);
    let q0 = grid.index_of(0.0).unwrap();
    assert!((a.spectrum.f[q0] - 1.0).abs() < 1e-9);
    assert!(a.spectrum.f.iter().all(|&f| f <= 1.0 + 1e-9));
}

#[test]
fn analytic_spectrum_shape() {
    let qs: Vec<f64> = (-120..=120).map(f64::from).collect();
    let alpha: Vec<f64> = qs
        .iter()
        .map(|&q| analytic_binomial_alpha(0.6, q).unwrap())
        .collect();
    assert!(alpha.windows(2).all(|w| w[1] <= w[0]));
    let f: Vec<f64> = qs
        .iter()
        .map(|&q| analytic_binomial_f(0.6, q).unwrap())
        .collect();
    let (imax, _) = f
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert_eq!(qs[imax], 0.0);
}

#[test]
fn uniform_cascade_is_monofractal() {
    let spec = CascadeSpec::new(0.5, 10, 3.0).unwrap();
    let s = binomial_cascade("c", &spec, None).unwrap();
    let a = analyze_series(
        &s,
        &BoxScheme::derive(1024).unwrap(),
        &MomentGrid::standard(),
    )
    .unwrap();
    assert!(a.spectrum.delta_alpha <= 1e-9);
}

#[test]
fn exchangeable_days_sit_on_the_replicate_line() {
    let grid = MomentGrid::standard();
    let scheme = BoxScheme::derive(240).unwrap();
    for seed in 0..5 {
        let cfg = BootstrapConfig {
            replicates: 300,
            master_seed: seed,
            significance_level: 0.05,
        };
        let rep = bootstrap_analysis(&iid(100 + seed), &scheme, &grid, &cfg).unwrap();
        let dev = rep.original_line_deviation().unwrap();
        assert!(dev <= 3.0, "seed {seed}: {dev}");
        assert!(
            (rep.p1 - rep.p2).abs() <= 0.1,
            "seed {seed}: {} {}",
            rep.p1,
            rep.p2
        );
        let line = rep.line.unwrap();
        assert!((-32.0..=-28.0).contains(&line.k), "{}", line.k);
    }
}

#[test]
fn parallel_and_serial_reports_agree() {
    let grid = MomentGrid::standard();
    let scheme = BoxScheme::derive(240).unwrap();
    let cfg = BootstrapConfig {
        replicates: 64,
        master_seed: 1,
        significance_level: 0.05,
    };
    let days: Vec<PriceSeries> = (0..3).map(iid).collect();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one
        .install(|| bootstrap_days(&days, &scheme, &grid, &cfg))
        .unwrap();
    let b = four
        .install(|| bootstrap_days(&days, &scheme, &grid, &cfg))
        .unwrap();
    assert_eq!(a, b);
    assert_eq!(
        a[1],
        bootstrap_analysis(&days[1], &scheme, &grid, &cfg).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scale_changes_nothing_beyond_round_off(seed in any::<u64>(), factor in 1e-6f64..1e6) {
        let k = RandomKind::IidLognormal { level: 10.0, sigma: 0.3 };
        let s = random_positive_series("p", 240, k, seed).unwrap();
        let t = s.scaled(factor).unwrap();
        let grid = MomentGrid::standard();
        let scheme = BoxScheme::derive(240).unwrap();
        let a = analyze_series(&s, &scheme, &grid).unwrap();
        let b = analyze_series(&t, &scheme, &grid).unwrap();
        for (x, y) in a.exponents.tau.iter().zip(&b.exponents.tau) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
        prop_assert!((a.spectrum.delta_alpha - b.spectrum.delta_alpha).abs() <= 1e-10);
        prop_assert!((a.spectrum.big_f - b.spectrum.big_f).abs() <= 1e-10);
    }

    #[test]
    fn normalization_exponents_hold(seed in any::<u64>(), sigma in 0.0f64..2.0) {
        let k = RandomKind::IidLognormal { level: 1.0, sigma };
        let s = random_positive_series("p", 240, k, seed).unwrap();
        let a = analyze_series(&s, &BoxScheme::derive(240).unwrap(), &MomentGrid::standard()).unwrap();
        prop_assert!((a.exponents.tau_at(0.0).unwrap() + 1.0).abs() <= 1e-10);
        prop_assert!(a.exponents.tau_at(1.0).unwrap().abs() <= 1e-10);
        prop_assert!(a.spectrum.delta_alpha >= 0.0);
        for i in 0..a.spectrum.grid.len() {
            let q = a.spectrum.grid.values()[i];
            let t = a.exponents.tau[i];
            prop_assert!((q * a.spectrum.alpha[i] - a.spectrum.f[i] - t).abs() <= 1e-12 * (1.0 + t.abs()));
        }
    }
}
