//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line;
//! run with `--nocapture` to see them.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phasestab::bounds::{exceptional_set, evaluate_theorem_with_spectra, h_f, translation_term, TailParams, Tolerance};
use phasestab::experiments::{
    certify_pair, default_tail_grid, default_tail_sweep, default_translation_input, default_translation_sweep,
    optimality_experiment, tail_experiment, translation_experiment, triangle_experiment, OptimalityConfig,
    TriangleConfig, CERTIFICATION_EXPONENTS,
};
use phasestab::families::{random_pair, random_smooth, triangle_spectrum, PairFamily};
use phasestab::geometry::{lemma1_random, lemma1_scan};
use phasestab::grid::{fourier_transform, inverse_transform, lp_norm, shift, GridSpec};

fn verdict(n: u32, pass: bool, detail: &str) {
    println!("criterion {n}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn pair_grid() -> GridSpec {
    GridSpec::uniform(1, 16.0, 1024).unwrap()
}

#[test]
fn criterion_1_lemma1_brute_force() {
    let start = Instant::now();
    let scan = lemma1_scan(1000, 1000).unwrap();
    let random = lemma1_random(10_000_000, 0x5eed).unwrap();
    let min = scan.min_gap.min(random.min_gap);
    let pass = min >= -1e-12;
    verdict(
        1,
        pass,
        &format!(
            "scan min {:.3e}, random min {:.3e}, {:.1}s",
            scan.min_gap,
            random.min_gap,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass, "min gap {min}");
}

#[test]
fn criterion_2_theorem_certification() {
    let grid = pair_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let per_family = 50;
    let mut pairs = 0;
    let mut reports = 0;
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for family in PairFamily::ALL {
        for _ in 0..per_family {
            let (f, g) = random_pair(family, &grid, &mut rng).unwrap();
            let (fhat, ghat) = (fourier_transform(&f), fourier_transform(&g));
            pairs += 1;
            for r in certify_pair(&f, &g, &fhat, &ghat).unwrap() {
                reports += 1;
                let rel = (r.slack / r.rhs).min(r.squared_form_slack / r.squared_rhs());
                worst = worst.min(rel);
                let ok = r.slack >= -1e-6 * r.rhs && r.squared_form_slack >= -1e-6 * r.squared_rhs();
                if !ok {
                    failures.push((family.name(), r.p, r.slack, r.squared_form_slack));
                }
            }
        }
    }
    let pass = pairs >= 200 && failures.is_empty();
    verdict(
        2,
        pass,
        &format!("{pairs} pairs, {reports} reports, worst relative slack {worst:.3e}"),
    );
    assert!(pairs >= 200);
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_3_optimality_slopes() {
    let r = optimality_experiment(&OptimalityConfig::default()).unwrap();
    let pass = r.l2.pass && r.l1.pass && r.theorem_certified && r.corollary1_certified;
    verdict(
        3,
        pass,
        &format!(
            "L2 slope {:.4}, L1 slope {:.4}, ratio spread {:.4}",
            r.l2.fitted_slope, r.l1.fitted_slope, r.ratio_spread
        ),
    );
    assert!(r.l2.pass, "L2 slope {}", r.l2.fitted_slope);
    assert!(r.l1.pass, "L1 slope {}", r.l1.fitted_slope);
    assert!(r.theorem_certified && r.corollary1_certified);
    assert!(r.ratio_spread <= 1.1, "ratio spread {}", r.ratio_spread);
}

#[test]
fn criterion_3_band_limited_ratio_at_most_ten() {
    let r = optimality_experiment(&OptimalityConfig::default()).unwrap();
    let max = r.corollary1_ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pass = max <= 10.0;
    verdict(3, pass, &format!("band-limited rhs/lhs max {max:.3} over {:?}", r.config.scales));
    assert!(pass, "ratios {:?}", r.corollary1_ratios);
}

#[test]
fn criterion_4_translation_identity() {
    let f = default_translation_input(16.0, 1024).unwrap();
    let r = translation_experiment(&f, &default_translation_sweep()).unwrap();

    let fhat = fourier_transform(&f);
    let mut oracle_rel = 0.0f64;
    for &eps in &default_translation_sweep() {
        let g = shift(&f, &[eps]).unwrap();
        let term = translation_term(&fhat, &fourier_transform(&g), 0.0).unwrap();
        let grid = fhat.grid();
        let mut acc = 0.0;
        let mut xi = [0.0];
        for (j, v) in fhat.values().iter().enumerate() {
            grid.coordinates_into(j, &mut xi);
            acc += (v.norm() * (2.0 * std::f64::consts::PI * eps * xi[0]).sin()).powi(2);
        }
        let expected = 2.0 * (acc * grid.cell_volume()).sqrt();
        oracle_rel = oracle_rel.max((term - expected).abs() / expected);
    }

    let pass = oracle_rel <= 1e-8 && r.max_identity_rel_error <= 1e-8 && r.max_term_modulus <= 1e-10;
    verdict(
        4,
        pass,
        &format!(
            "identity rel error {oracle_rel:.3e}, max term_modulus {:.3e}",
            r.max_term_modulus
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_triangle_super_linear() {
    let r = triangle_experiment(&TriangleConfig::default()).unwrap();
    let oracle = (2.0f64 / 3.0).sqrt();

    let fine = GridSpec::uniform(1, 1024.0, 8192).unwrap();
    let direct = h_f(&triangle_spectrum(&fine).unwrap(), 0.05, 1.0).unwrap();

    let slope_ok = (r.excess.fitted_slope - 1.5).abs() <= 0.15;
    let hf_ok = (r.h_f_at_0_05 - 0.8165).abs() <= 1e-3 && (direct - oracle).abs() <= 1e-3;
    let pass = slope_ok && hf_ok && r.theorem_certified;
    verdict(
        5,
        pass,
        &format!(
            "exponent {:.4} ± {:.4}, h_f(0.05) {:.5} vs {oracle:.5}",
            r.excess.fitted_slope, r.excess.slope_stderr, r.h_f_at_0_05
        ),
    );
    assert!(slope_ok, "slope {}", r.excess.fitted_slope);
    assert!(hf_ok, "h_f(0.05) = {} / {direct}", r.h_f_at_0_05);
    assert!(r.theorem_certified);
}

#[test]
fn criterion_6_tail_exponents() {
    let mut lines = Vec::new();
    let mut pass = true;
    for (k, n) in [(2, 1), (4, 1), (3, 2)] {
        let params = TailParams::new(k, n).unwrap();
        let grid = default_tail_grid(params).unwrap();
        let r = tail_experiment(params, &default_tail_sweep(), &grid).unwrap();
        let expected = 2.0 - n as f64 / k as f64;
        let ok = (r.fitted_slope - expected).abs() <= 0.1;
        pass &= ok;
        lines.push(format!("(k={k},n={n}) {:.4} vs {expected:.4}", r.fitted_slope));
    }
    verdict(6, pass, &lines.join(", "));
    assert!(pass);
}

#[test]
fn criterion_7_exceptional_set() {
    let grid = pair_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_measure = 0.0f64;
    let mut p1_nonempty = 0;
    let mut checked = 0;
    for family in PairFamily::ALL {
        for _ in 0..10 {
            let (f, g) = random_pair(family, &grid, &mut rng).unwrap();
            let (fhat, ghat) = (fourier_transform(&f), fourier_transform(&g));
            let diff = f.sub(&g).unwrap();
            for &p in &CERTIFICATION_EXPONENTS {
                let eps = lp_norm(&diff, p).unwrap();
                let report = evaluate_theorem_with_spectra(&f, &g, &fhat, &ghat, p, Tolerance::default()).unwrap();
                assert_eq!(report.epsilon, eps);
                let x = exceptional_set(&fhat, &ghat, eps).unwrap();
                checked += 1;
                if p == 1.0 {
                    if !x.is_empty() {
                        p1_nonempty += 1;
                    }
                } else {
                    max_measure = max_measure.max(x.measure);
                }
            }
        }
    }
    let pass = max_measure <= 1.0 + 1e-3 && p1_nonempty == 0;
    verdict(
        7,
        pass,
        &format!("{checked} sets, max |X| for p>1 {max_measure:.4}, nonempty at p=1: {p1_nonempty}"),
    );
    assert!(pass);
}

#[test]
fn criterion_8_analysis_infrastructure() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grids = [
        GridSpec::uniform(1, 16.0, 1024).unwrap(),
        GridSpec::uniform(2, 8.0, 128).unwrap(),
    ];
    let mut plancherel = 0.0f64;
    let mut inversion = 0.0f64;
    let mut hy_worst = f64::INFINITY;
    for grid in &grids {
        for _ in 0..20 {
            let f = random_smooth(grid, &mut rng).unwrap();
            let fhat = fourier_transform(&f);
            let n2 = lp_norm(&f, 2.0).unwrap();
            plancherel = plancherel.max((lp_norm(&fhat, 2.0).unwrap() - n2).abs() / n2);
            let back = inverse_transform(&fhat);
            inversion = inversion.max(back.sub(&f).unwrap().max_abs() / f.max_abs());
            for p in [1.0, 1.25, 1.5] {
                let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
                let lhs = lp_norm(&fhat, q).unwrap();
                let rhs = lp_norm(&f, p).unwrap();
                hy_worst = hy_worst.min((rhs - lhs) / rhs);
            }
        }
    }
    let pass = plancherel <= 1e-10 && inversion <= 1e-10 && hy_worst >= -1e-6;
    verdict(
        8,
        pass,
        &format!(
            "Plancherel {plancherel:.3e}, inversion {inversion:.3e}, worst Hausdorff-Young relative slack {hy_worst:.3e}"
        ),
    );
    assert!(pass);
}
