//! Exit criteria. Each test prints one `criterion N: PASS|FAIL ...` line;
//! run with `cargo test -p boxmf --test acceptance -- --nocapture
//! --test-threads=1` to see them in order.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use boxmf::measure::build_box_measure;
use boxmf::partition::log_partition_value;
use boxmf::rng::stream_seed;
use boxmf::synth::{
    analytic_binomial_alpha, binomial_cascade, constant_series, random_positive_series,
    CascadeSpec, RandomKind,
};
use boxmf::{
    analyze_series, bootstrap_analysis, shuffle_series, BootstrapConfig, BoxScheme, MomentGrid,
    PriceSeries,
};

fn report(n: u32, ok: bool, detail: String) {
    println!(
        "criterion {n}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn walk_day(seed: u64) -> PriceSeries {
    let kind = RandomKind::IntradayWalk {
        start: 15000.0,
        step_sigma: 0.0005,
    };
    random_positive_series("walk", 240, kind, seed).unwrap()
}

fn iid_day(seed: u64) -> PriceSeries {
    let kind = RandomKind::IidLognormal {
        level: 1.0,
        sigma: 0.01,
    };
    random_positive_series("iid", 240, kind, seed).unwrap()
}

#[test]
fn criterion_1_normalization_exactness() {
    let start = Instant::now();
    let grid = MomentGrid::standard();
    let scheme = BoxScheme::derive(240).unwrap();
    let (mut tau_dev, mut chi_dev) = (0.0_f64, 0.0_f64);
    for seed in 0..100 {
        let kind = RandomKind::IidLognormal {
            level: 100.0,
            sigma: 0.5,
        };
        let s = random_positive_series("r", 240, kind, seed).unwrap();
        let a = analyze_series(&s, &scheme, &grid).unwrap();
        tau_dev = tau_dev
            .max(a.exponents.tau_at(1.0).unwrap().abs())
            .max((a.exponents.tau_at(0.0).unwrap() + 1.0).abs());
        for (&l, n) in scheme.sizes().iter().zip(scheme.box_counts()) {
            let m = build_box_measure(&s, l).unwrap();
            chi_dev = chi_dev
                .max((log_partition_value(&m, 1.0).exp() - 1.0).abs())
                .max((log_partition_value(&m, 0.0).exp() - n as f64).abs());
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        tau_dev <= 1e-10 && chi_dev <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("max |τ(0)+1|,|τ(1)| = {tau_dev:.2e} (≤1e-10); max χ deviation = {chi_dev:.2e} (≤1e-12); {elapsed:.2?} (<5s)"),
    );
}

#[test]
fn criterion_2_constant_series_analytics() {
    let grid = MomentGrid::standard();
    let (mut tau_dev, mut width, mut f_dev) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (len, value) in [(240, 5.0), (405, 1.0), (390, 3.3), (240, 1e-8), (4096, 2.0)] {
        let s = constant_series("c", len, value).unwrap();
        let a = analyze_series(&s, &BoxScheme::derive(len).unwrap(), &grid).unwrap();
        for (&q, &t) in grid.values().iter().zip(&a.exponents.tau) {
            tau_dev = tau_dev.max((t - (q - 1.0)).abs());
        }
        width = width.max(a.spectrum.delta_alpha);
        f_dev = f_dev.max((a.spectrum.big_f - 1.0).abs());
    }
    report(
        2,
        tau_dev <= 1e-9 && width <= 1e-9 && f_dev <= 1e-9,
        format!(
            "max |τ(q)−(q−1)| = {tau_dev:.2e}; Δα = {width:.2e}; |F−1| = {f_dev:.2e} (all ≤1e-9)"
        ),
    );
}

#[test]
fn criterion_3_binomial_oracle() {
    let start = Instant::now();
    let spec = CascadeSpec::new(0.6, 12, 1.0).unwrap();
    let s = binomial_cascade("cascade", &spec, None).unwrap();
    let scheme = BoxScheme::derive(4096).unwrap();
    assert_eq!(scheme.sizes().len(), 13);

    let grid10 = MomentGrid::range(-10.0, 10.0, 1.0).unwrap();
    let a = analyze_series(&s, &scheme, &grid10).unwrap();
    let tau_dev = grid10
        .values()
        .iter()
        .zip(&a.exponents.tau)
        .map(|(&q, &t)| (t + (0.6_f64.powf(q) + 0.4_f64.powf(q)).log2()).abs())
        .fold(0.0, f64::max);

    let grid20 = MomentGrid::range(-20.0, 20.0, 1.0).unwrap();
    let b = analyze_series(&s, &scheme, &grid20).unwrap();
    let analytic =
        analytic_binomial_alpha(0.6, -20.0).unwrap() - analytic_binomial_alpha(0.6, 20.0).unwrap();
    let rel = (b.spectrum.delta_alpha - analytic).abs() / analytic;
    let elapsed = start.elapsed();
    report(
        3,
        tau_dev <= 0.05 && rel <= 0.15 && elapsed < Duration::from_secs(5),
        format!(
            "max |τ̂+log₂(0.6^q+0.4^q)| = {tau_dev:.2e} (≤0.05); Δα = {:.5} vs analytic {analytic:.5}, rel {rel:.2e} (≤0.15); {elapsed:.2?} (<5s)",
            b.spectrum.delta_alpha
        ),
    );
}

#[test]
fn criterion_4_monofractal_slope() {
    let grid = MomentGrid::standard();
    let scheme = BoxScheme::derive(240).unwrap();
    let (mut slope_dev, mut min_corr) = (0.0_f64, 1.0_f64);
    for seed in 0..20 {
        let a = analyze_series(&walk_day(seed), &scheme, &grid).unwrap();
        slope_dev = slope_dev.max((a.linearity.alpha_bar - 1.0).abs());
        min_corr = min_corr.min(a.linearity.line_correlation);
    }
    report(
        4,
        slope_dev <= 0.005 && min_corr >= 0.9999,
        format!("20 walk days: max |ᾱ−1| = {slope_dev:.2e} (≤0.005); min τ–q correlation = {min_corr:.8} (≥0.9999)"),
    );
}

#[test]
fn criterion_5_scatter_law() {
    let start = Instant::now();
    let cfg = BootstrapConfig {
        replicates: 1000,
        master_seed: 2009,
        significance_level: 0.05,
    };
    let rep = bootstrap_analysis(
        &walk_day(0),
        &BoxScheme::derive(240).unwrap(),
        &MomentGrid::standard(),
        &cfg,
    )
    .unwrap();
    let elapsed = start.elapsed();
    let line = rep.line.expect("walk replicates give a fittable cloud");
    report(
        5,
        (-32.0..=-28.0).contains(&line.k)
            && (0.95..=1.10).contains(&line.b)
            && elapsed < Duration::from_secs(30),
        format!(
            "k = {:.3} (∈[−32,−28]); b = {:.5} (∈[0.95,1.10]); 1000 replicates in {elapsed:.2?} (<30s)",
            line.k, line.b
        ),
    );
}

#[test]
fn criterion_6_null_uniformity_and_positive_control() {
    let grid = MomentGrid::standard();
    let scheme = BoxScheme::derive(240).unwrap();
    let mut significant = 0;
    for day in 0..200u64 {
        let cfg = BootstrapConfig {
            replicates: 200,
            master_seed: stream_seed(6, day),
            significance_level: 0.05,
        };
        let rep = bootstrap_analysis(&iid_day(stream_seed(60, day)), &scheme, &grid, &cfg).unwrap();
        if rep.p1 <= 0.05 {
            significant += 1;
        }
    }
    let fraction = significant as f64 / 200.0;

    let spec = CascadeSpec::new(0.6, 12, 1.0).unwrap();
    let cascade = binomial_cascade("cascade", &spec, None).unwrap();
    let cfg = BootstrapConfig {
        replicates: 1000,
        master_seed: 6,
        significance_level: 0.05,
    };
    let rep = bootstrap_analysis(&cascade, &BoxScheme::derive(4096).unwrap(), &grid, &cfg).unwrap();
    let mean = rep.replicate_mean();
    report(
        6,
        (0.01..=0.10).contains(&fraction) && rep.p1 == 0.0 && rep.p2 == 0.0,
        format!(
            "iid null: fraction p1≤0.05 = {fraction:.3} (∈[0.01,0.10]); cascade p=0.6 k=12: p1 = {} (=0), p2 = {} (=0); \
             cascade F = {:.4} vs mean F_rnd = {:.4}, Δα = {:.4} vs mean Δα_rnd = {:.4}",
            rep.p1, rep.p2, rep.original.big_f, mean.big_f, rep.original.delta_alpha, mean.delta_alpha
        ),
    );
}

fn boxmf(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_boxmf"))
        .args(args)
        .status()
        .expect("run boxmf");
    assert!(status.success(), "boxmf {args:?} failed: {status}");
}

fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

#[test]
fn criterion_7_determinism_and_invariances() {
    // byte-identical CLI outputs: same seed twice, and 1 vs 4 workers
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("walk.csv");
    let input = input.to_str().unwrap();
    boxmf(&[
        "synth", "--kind", "walk", "--days", "3", "--seed", "5", "--output", input,
    ]);
    let mut trees = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = dir.path().join(name);
        let out = out.to_str().unwrap();
        boxmf(&[
            "analyze",
            "--input",
            input,
            "--outdir",
            out,
            "--export",
            "surface",
            "--workers",
            workers,
        ]);
        boxmf(&[
            "shuffle-test",
            "--input",
            input,
            "--outdir",
            out,
            "--bootstrap",
            "100",
            "--seed",
            "11",
            "--export",
            "scatter",
            "--replicates",
            "--workers",
            workers,
        ]);
        trees.push(tree_bytes(Path::new(out)));
    }
    let files = trees[0].len();
    let reruns_identical = trees[0] == trees[1];
    let workers_identical = trees[0] == trees[2];

    // scale invariance
    let grid = MomentGrid::standard();
    let scheme = BoxScheme::derive(240).unwrap();
    let cfg = BootstrapConfig {
        replicates: 100,
        master_seed: 3,
        significance_level: 0.05,
    };
    let (mut scale_dev, mut p_equal, mut pow2_identical) = (0.0_f64, true, true);
    for seed in 0..10 {
        let kind = RandomKind::IidLognormal {
            level: 50.0,
            sigma: 0.2,
        };
        let s = random_positive_series("s", 240, kind, seed).unwrap();
        let a = analyze_series(&s, &scheme, &grid).unwrap();
        let ra = bootstrap_analysis(&s, &scheme, &grid, &cfg).unwrap();

        let t = s.scaled(7.3).unwrap();
        let b = analyze_series(&t, &scheme, &grid).unwrap();
        let rb = bootstrap_analysis(&t, &scheme, &grid, &cfg).unwrap();
        let surf = |x: &boxmf::DayAnalysis| {
            (0..grid.len())
                .flat_map(|q| x.surface.row(q).to_vec())
                .collect::<Vec<_>>()
        };
        let scalars = |x: &boxmf::DayAnalysis, r: &boxmf::BootstrapReport| {
            let l = r.line.unwrap();
            vec![
                x.spectrum.delta_alpha,
                x.spectrum.big_f,
                x.linearity.alpha_bar,
                l.k,
                l.b,
            ]
        };
        scale_dev = scale_dev
            .max(max_rel(&surf(&a), &surf(&b)))
            .max(max_rel(&a.exponents.tau, &b.exponents.tau))
            .max(max_rel(&a.spectrum.alpha, &b.spectrum.alpha))
            .max(max_rel(&a.spectrum.f, &b.spectrum.f))
            .max(max_rel(&scalars(&a, &ra), &scalars(&b, &rb)));
        p_equal &= ra.p1 == rb.p1 && ra.p2 == rb.p2;

        let u = s.scaled(8.0).unwrap();
        let c = analyze_series(&u, &scheme, &grid).unwrap();
        let rc = bootstrap_analysis(&u, &scheme, &grid, &cfg).unwrap();
        pow2_identical &= surf(&a) == surf(&c)
            && a.spectrum == c.spectrum
            && ra.replicates == rc.replicates
            && ra.line == rc.line;
    }

    // shuffle leaves ln χ at l = 1 and l = T untouched, bit for bit
    let mut shuffle_identical = true;
    for seed in 0..10 {
        let s = iid_day(seed);
        let sh = shuffle_series(&s, seed, 77);
        assert_ne!(s, sh);
        for l in [1, 240] {
            let (m, n) = (
                build_box_measure(&s, l).unwrap(),
                build_box_measure(&sh, l).unwrap(),
            );
            for &q in grid.values() {
                shuffle_identical &= log_partition_value(&m, q) == log_partition_value(&n, q);
            }
        }
        let (a, b) = (
            analyze_series(&s, &scheme, &grid).unwrap(),
            analyze_series(&sh, &scheme, &grid).unwrap(),
        );
        for qi in 0..grid.len() {
            shuffle_identical &= a.surface.get(qi, 0) == b.surface.get(qi, 0)
                && a.surface.get(qi, 13) == b.surface.get(qi, 13);
        }
    }

    report(
        7,
        reruns_identical
            && workers_identical
            && scale_dev <= 1e-10
            && p_equal
            && pow2_identical
            && shuffle_identical,
        format!(
            "{files} output files: rerun identical = {reruns_identical}, 1 vs 4 workers identical = {workers_identical}; \
             ×7.3: max rel deviation {scale_dev:.1e} (≤1e-10), p-values equal = {p_equal}; \
             ×8: bit-identical = {pow2_identical}; shuffled ln χ at l=1,T bit-identical = {shuffle_identical}"
        ),
    );
}
