//! End-to-end acceptance suite: one test per shipped criterion, each
//! printing a `criterion N: PASS` line with the measured numbers (visible
//! under `cargo test --test acceptance -- --nocapture`).

use qfluct_core::spectra::{CasimirGeometry, CasimirPolderSetup, SpectrumModel};
use qfluct_core::{abel, field2d, quadform, stats, wick};
use std::f64::consts::{PI, SQRT_2, TAU};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn unit_casimir() -> SpectrumModel {
    SpectrumModel::Casimir(CasimirGeometry::new(1.0, 1.0).unwrap())
}

#[test]
fn criterion_01_casimir_abel_limit() {
    let start = Instant::now();
    let model = unit_casimir();
    let seq = abel::default_beta_sequence(&model);
    // the default sequence is 2^{-k} (L / 2 pi), k = 1..8
    assert_eq!(seq.len(), 8);
    for (k, beta) in seq.iter().enumerate() {
        let expected = 0.5f64.powi(k as i32 + 1) / TAU;
        assert!((beta - expected).abs() <= 1e-15 * expected);
    }

    let res = abel::abel_limit(&model, &seq, 1e-10).unwrap();
    let exact = -PI * PI / 90.0;
    let rel = ((res.limit - exact) / exact).abs();
    assert!(rel <= 1e-6, "relative deviation {rel}");

    let l2 = SpectrumModel::Casimir(CasimirGeometry::new(1.0, 2.0).unwrap());
    let res2 = abel::abel_limit(&l2, &abel::default_beta_sequence(&l2), 1e-10).unwrap();
    let scale_rel = ((res2.limit - res.limit / 8.0) / (res.limit / 8.0)).abs();
    assert!(scale_rel <= 1e-6, "L-scaling deviation {scale_rel}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 1: PASS - casimir limit {} vs -pi^2/90 (rel {rel:.2e}), L=2 scales by 1/8 (rel {scale_rel:.2e}), {elapsed:?}"
    , res.limit);
}

#[test]
fn criterion_02_casimir_polder_abel_limit() {
    let setup = CasimirPolderSetup::new(1.0, 1.0).unwrap();
    let model = SpectrumModel::CasimirPolder(setup);
    let res = abel::abel_limit(&model, &abel::default_beta_sequence(&model), 1e-10).unwrap();
    let exact = -3.0 / (8.0 * PI);
    let rel = ((res.limit - exact) / exact).abs();
    assert!(rel <= 1e-6, "relative deviation {rel}");

    let far = SpectrumModel::CasimirPolder(CasimirPolderSetup::new(1.0, 2.0).unwrap());
    let res2 = abel::abel_limit(&far, &abel::default_beta_sequence(&far), 1e-10).unwrap();
    let scale_rel = ((res2.limit - res.limit / 16.0) / (res.limit / 16.0)).abs();
    assert!(scale_rel <= 1e-6, "z-scaling deviation {scale_rel}");
    println!(
        "criterion 2: PASS - cp limit {} vs -3/8pi (rel {rel:.2e}), z=2 scales by 1/16 (rel {scale_rel:.2e})",
        res.limit
    );
}

#[test]
fn criterion_03_oracle_equivalence() {
    let geom = CasimirGeometry::new(1.0, 1.0).unwrap();
    let casimir = SpectrumModel::Casimir(geom);
    let mut worst = 0.0f64;
    for beta in abel::default_beta_sequence(&casimir) {
        let quad = abel::integrate_damped(&casimir, beta, 1e-10).unwrap().value;
        let oracle = abel::casimir_damped_modesum(&geom, beta);
        worst = worst.max(((quad - oracle) / oracle).abs());
    }
    assert!(worst <= 1e-8, "casimir worst relative deviation {worst}");

    let setup = CasimirPolderSetup::new(1.0, 1.0).unwrap();
    let cp = SpectrumModel::CasimirPolder(setup);
    let mut worst_cp = 0.0f64;
    for beta in abel::default_beta_sequence(&cp) {
        let quad = abel::integrate_damped(&cp, beta, 1e-10).unwrap().value;
        let oracle = abel::cp_damped_closed(&setup, beta);
        worst_cp = worst_cp.max(((quad - oracle) / oracle).abs());
    }
    assert!(worst_cp <= 1e-8, "cp worst relative deviation {worst_cp}");
    println!(
        "criterion 3: PASS - quadrature vs analytic oracles, worst rel casimir {worst:.2e}, cp {worst_cp:.2e}"
    );
}

#[test]
fn criterion_04_counting_identities() {
    for n in 1..=5usize {
        let count = wick::enumerate_pairings(n).unwrap().len() as u128;
        assert_eq!(count, wick::odd_double_factorial(n as u32), "pairings n={n}");
    }
    let golden = [2u128, 8, 60, 544, 6040];
    for (i, n) in (2..=6usize).enumerate() {
        let count = wick::enumerate_vertex_matchings(n).unwrap().len() as u128;
        assert_eq!(count, golden[i], "matchings n={n}");
        assert_eq!(count, wick::matching_count_formula(n as u32));
        let mass: u128 = wick::cycle_partitions(n)
            .unwrap()
            .iter()
            .map(|p| p.multiplicity)
            .sum();
        assert_eq!(mass, count, "cycle mass n={n}");
    }
    println!(
        "criterion 4: PASS - pairings (2n-1)!! for n<=5, matchings {{2,8,60,544,6040}} with cycle-mass identity"
    );
}

#[test]
fn criterion_05_linear_gaussianity() {
    let n = 1_000_000usize;
    let batch = quadform::sample_linear(&[0.8, 0.5, 0.2, 0.1], n, 2718);
    let est = stats::shape(&batch.values).unwrap();
    let skew_bound = 3.0 * (6.0 / n as f64).sqrt();
    let kurt_bound = 3.0 * (24.0 / n as f64).sqrt();
    assert!(
        est.skewness.abs() < skew_bound,
        "skewness {} vs {skew_bound}",
        est.skewness
    );
    assert!(
        est.excess_kurtosis.abs() < kurt_bound,
        "excess kurtosis {} vs {kurt_bound}",
        est.excess_kurtosis
    );
    println!(
        "criterion 5: PASS - 1e6 linear draws: |skewness| {:.2e} < {skew_bound:.2e}, |mu4/mu2^2 - 3| {:.2e} < {kurt_bound:.2e}",
        est.skewness.abs(),
        est.excess_kurtosis.abs()
    );
}

#[test]
fn criterion_06_second_moment() {
    let mut prev_dev = f64::INFINITY;
    let mut worst_resid = 0.0f64;
    for mu_t in [1e-1, 1e-2, 1e-4, 1e-8] {
        let params = field2d::ModelParams::new(mu_t, 1.0).unwrap();
        let quad = field2d::second_moment(&params, field2d::MomentMethod::Quadrature)
            .unwrap()
            .value;
        let closed = field2d::second_moment(&params, field2d::MomentMethod::ClosedForm)
            .unwrap()
            .value;
        let rel = ((quad - closed) / closed).abs();
        assert!(rel <= 1e-6, "muT={mu_t}: quadrature vs closed {rel}");
        worst_resid = worst_resid.max(rel);

        let leading = field2d::second_moment(&params, field2d::MomentMethod::LeadingLog)
            .unwrap()
            .value;
        let dev = ((closed - leading) / closed).abs();
        assert!(
            dev <= 3.5 / mu_t.ln().abs(),
            "muT={mu_t}: leading-log deviation {dev}"
        );
        assert!(dev < prev_dev, "deviation not decreasing at muT={mu_t}");
        prev_dev = dev;
    }
    println!(
        "criterion 6: PASS - quadrature = closed form within {worst_resid:.2e} <= 1e-6; leading-log deviation <= 3.5/|ln muT| and decreasing"
    );
}

#[test]
fn criterion_07_third_moment_and_ratio() {
    let params = field2d::ModelParams::new(0.01, 1.0).unwrap();
    let quad = field2d::third_moment(&params, field2d::MomentMethod::Quadrature)
        .unwrap()
        .value;
    assert!(quad > 0.0, "third moment must be positive, got {quad}");

    let trace = field2d::third_moment(&params, field2d::MomentMethod::Trace { points: 2000 })
        .unwrap()
        .value;
    let trace_rel = ((quad - trace) / quad).abs();
    assert!(trace_rel <= 0.02, "trace vs quadrature {trace_rel}");

    let mut prev = f64::INFINITY;
    for mu_t in [1e-2, 1e-4, 1e-8] {
        let p = field2d::ModelParams::new(mu_t, 1.0).unwrap();
        let ratio = field2d::skewness_ratio(&p).unwrap();
        let dev = (ratio - SQRT_2).abs();
        assert!(dev < prev, "|ratio - sqrt2| not decreasing at muT={mu_t}");
        prev = dev;
    }

    let m2 = field2d::second_moment(&params, field2d::MomentMethod::LeadingLog)
        .unwrap()
        .value;
    let m3 = field2d::third_moment(&params, field2d::MomentMethod::LeadingLog)
        .unwrap()
        .value;
    let ll_ratio = m3.cbrt() / m2.sqrt();
    assert!(
        (ll_ratio - SQRT_2).abs() <= 1e-14 * SQRT_2,
        "leading-log ratio {ll_ratio}"
    );
    println!(
        "criterion 7: PASS - third moment {quad:.6} > 0; trace(N=2000) within {trace_rel:.2e} <= 2%; |ratio - sqrt2| decreasing; leading-log ratio = sqrt2 to machine precision"
    );
}

#[test]
fn criterion_08_skewed_distribution_properties() {
    let start = Instant::now();
    let n = 1_000_000usize;
    let grid = quadform::TimeGrid::new(1.0, 200).unwrap();
    let kernel = quadform::build_kernel(&grid, 0.01).unwrap();
    let model = quadform::eigen_lambdas(&kernel, 1e-10).unwrap();
    let batch = quadform::sample_quadratic(&model, n, 1234);

    let lb = quadform::lower_bound(&model);
    let below = batch.values.iter().filter(|&&v| v < lb).count();
    assert_eq!(below, 0, "samples below the exact lower bound");

    let est = stats::shape(&batch.values).unwrap();
    assert!(
        est.frac_below_zero > 0.5,
        "negative fraction {}",
        est.frac_below_zero
    );
    let skew_sig = est.skewness / est.skewness_se;
    assert!(skew_sig > 5.0, "skewness significance {skew_sig}");

    // empirical cumulants vs trace values, standard errors from the sample
    let nf = n as f64;
    let mean = batch.values.iter().sum::<f64>() / nf;
    let mut m = [0.0f64; 7];
    for &v in &batch.values {
        let d = v - mean;
        let d2 = d * d;
        m[2] += d2;
        m[3] += d2 * d;
        m[4] += d2 * d2;
        m[6] += d2 * d2 * d2;
    }
    for entry in &mut m {
        *entry /= nf;
    }
    let kappa2 = quadform::trace_cumulant(&model, 2).unwrap();
    let kappa3 = quadform::trace_cumulant(&model, 3).unwrap();
    let se2 = ((m[4] - m[2] * m[2]) / nf).sqrt();
    let se3 = ((m[6] - m[3] * m[3] - 6.0 * m[2] * m[4] + 9.0 * m[2] * m[2] * m[2]) / nf).sqrt();
    let dev2 = (m[2] - kappa2).abs() / se2;
    let dev3 = (m[3] - kappa3).abs() / se3;
    assert!(dev2 <= 4.0, "kappa2 off by {dev2} standard errors");
    assert!(dev3 <= 4.0, "kappa3 off by {dev3} standard errors");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 8: PASS - no sample below {lb:.6}; frac_negative {:.4} > 0.5; skewness at {skew_sig:.0} sigma; kappa2/kappa3 within {dev2:.2}/{dev3:.2} SE; {elapsed:?}",
        est.frac_below_zero
    );
}

fn run_qfluct(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qfluct"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("QFLUCT_OUT_DIR")
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_09_determinism_across_threads() {
    let base = std::env::temp_dir().join(format!("qfluct_acc9_{}", std::process::id()));
    let sample_args = |threads: &'static str| -> Vec<&'static str> {
        vec![
            "sample", "--mu", "0.01", "--T", "1", "--N", "100", "--count", "200000", "--seed",
            "7", "--bins", "120", "--threads", threads,
        ]
    };
    let d1 = base.join("t1");
    let d2 = base.join("t2");
    let d3 = base.join("t1_again");
    for (dir, threads) in [(&d1, "1"), (&d2, "2"), (&d3, "1")] {
        let out = run_qfluct(dir, &sample_args(threads));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["sample_histogram.csv", "sample_shape.csv", "sample_summary.csv"] {
        let a = std::fs::read(d1.join(name)).unwrap();
        let b = std::fs::read(d2.join(name)).unwrap();
        let c = std::fs::read(d3.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between 1 and 2 threads");
        assert_eq!(a, c, "{name} differs between repeated runs");
    }
    std::fs::remove_dir_all(&base).ok();
    println!("criterion 9: PASS - byte-identical CSVs for seed 7 across 1/2 threads and repeated runs");
}

#[test]
fn criterion_10_figure_regeneration() {
    let base = std::env::temp_dir().join(format!("qfluct_acc10_{}", std::process::id()));

    // periodic spectrum: one upward jump per period boundary omega L = 2 pi n
    let out = run_qfluct(
        &base,
        &[
            "spectrum", "--model", "casimir", "--L", "1", "--A", "1", "--omega-max",
            "25.132741228718345", "--samples", "1601",
        ],
    );
    assert!(out.status.success());
    let rows = read_csv(&base.join("spectrum_casimir.csv"));
    let spacing = 8.0 * PI / 1600.0;
    let nonzero: Vec<(f64, f64)> = rows.into_iter().filter(|r| r.1 != 0.0).collect();
    let flips: Vec<f64> = nonzero
        .windows(2)
        .filter(|w| w[0].1 < 0.0 && w[1].1 > 0.0)
        .map(|w| w[0].0)
        .collect();
    for boundary in [TAU, 2.0 * TAU, 3.0 * TAU] {
        assert!(
            flips.iter().any(|&x| (x - boundary).abs() <= spacing),
            "missing sawtooth jump near {boundary}"
        );
    }
    for &x in &flips {
        let nearest = (x / TAU).round() * TAU;
        assert!((x - nearest).abs() <= spacing, "stray jump at {x}");
    }

    // atom-wall spectrum: growing-envelope oscillation, sign changes within
    // one sample spacing of the Newton-refined roots near n pi in 2 omega z
    let out = run_qfluct(
        &base,
        &[
            "spectrum", "--model", "cp", "--z", "1", "--omega-max", "12.566370614359172",
            "--samples", "2000",
        ],
    );
    assert!(out.status.success());
    let rows = read_csv(&base.join("spectrum_cp.csv"));
    let x_spacing = 2.0 * 12.566370614359172 / 1999.0;
    let mut crossings = Vec::new();
    for w in rows.windows(2) {
        if w[0].1 != 0.0 && w[1].1 != 0.0 && w[0].1.signum() != w[1].1.signum() {
            crossings.push(2.0 * w[0].0);
        }
    }
    let late: Vec<f64> = crossings.iter().copied().filter(|&x| x > 6.0).collect();
    assert!(late.len() >= 5, "expected several oscillations, got {late:?}");
    for &x in &late {
        let predicted = cp_root_near((x / PI).round());
        assert!(
            (x - predicted).abs() <= x_spacing,
            "crossing {x} vs predicted {predicted}"
        );
    }
    // quasi-period pi in x = 2 omega z
    for pair in late.windows(2) {
        let gap = pair[1] - pair[0];
        assert!(
            (gap - PI).abs() < 0.25,
            "quasi-period {gap} deviates from pi"
        );
    }
    // envelope grows: last oscillation extremum exceeds the first
    let nonzero_cp: Vec<(f64, f64)> = read_csv(&base.join("spectrum_cp.csv"));
    let early_max = nonzero_cp
        .iter()
        .filter(|r| 2.0 * r.0 > 6.0 && 2.0 * r.0 < 6.0 + PI)
        .fold(0.0f64, |m, r| m.max(r.1.abs()));
    let late_max = nonzero_cp
        .iter()
        .filter(|r| 2.0 * r.0 > 22.0)
        .fold(0.0f64, |m, r| m.max(r.1.abs()));
    assert!(late_max > early_max, "envelope must grow");

    std::fs::remove_dir_all(&base).ok();
    println!(
        "criterion 10: PASS - sawtooth jumps at omega L = 2 pi n; cp sign changes track roots near n pi with growing envelope"
    );
}

fn read_csv(path: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect()
}

/// Newton iteration on (x^2/2 - 1) sin x + x cos x with f' = (x^2/2) cos x.
fn cp_root_near(n: f64) -> f64 {
    let mut x = n * PI;
    for _ in 0..6 {
        let f = (x * x / 2.0 - 1.0) * x.sin() + x * x.cos();
        let df = x * x / 2.0 * x.cos();
        x -= f / df;
    }
    x
}
