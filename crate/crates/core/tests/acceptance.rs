use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};
use std::path::Path;
use std::time::{Duration, Instant};

use macroqubit::amplifier::{gain_params, macroqubit_state};
use macroqubit::analysis::{
    activation_values, chsh_sweep, chsh_value, conditional_injection_values, double_of_surface, fringe_pattern,
    preselect_sums, refine_peak, visibility_curve, CurveResult, MicroMacroModel,
};
use macroqubit::cli::main_with_args;
use macroqubit::filters::FilterSpec;
use macroqubit::oracle::{standard_suites, OracleConfig};

const G_PRESELECT: f64 = 1.2;
const TAU: f64 = 0.9;

fn report(criterion: u32, title: &str, ok: bool, detail: String) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion:>2} {status}: {title} ({detail})");
    assert!(ok, "criterion {criterion} failed: {title}: {detail}");
}

fn nondecreasing(ys: &[f64], slack: f64) -> bool {
    ys.windows(2).all(|w| w[1] >= w[0] - slack)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        for &p in &idx[i..=j] {
            r[p] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn defined(curve: &CurveResult) -> Vec<f64> {
    curve.samples.iter().map(|(_, y)| y.expect("every point has events")).collect()
}

fn grid_peak(curve: &CurveResult) -> f64 {
    curve
        .samples
        .iter()
        .filter_map(|(x, y)| y.map(|y| (*x, y)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("curve has events")
        .0
}

#[test]
fn c01_oracle_equivalence() {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let mut worst = 0.0_f64;
    let mut all = true;
    let mut count = 0;
    for g in [0.3, 0.6] {
        for r in standard_suites(g, &cfg).expect("oracle suites run") {
            worst = worst.max(r.max_deviation);
            all &= r.passed() && r.max_deviation < 1e-9 && r.compared > 0;
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "closed forms match dense evolution",
        all && worst < 1e-9 && elapsed < Duration::from_secs(120),
        format!("{count} suites, worst deviation {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn c02_normalization_and_parity() {
    let mut worst = 0.0_f64;
    let mut parity = true;
    for g in [0.3, 0.6, 0.9, 1.2, 1.5] {
        for beta in [0.0, FRAC_PI_4, FRAC_PI_2] {
            let s = macroqubit_state(beta, g, 1e-10).expect("state builds");
            worst = worst.max((s.norm_sqr() - 1.0).abs());
            parity &= s
                .amplitudes()
                .filter(|(_, w)| w.probability() > 0.0)
                .all(|(p, _)| p.n_a % 2 == 1 && p.n_b % 2 == 0);
        }
    }
    report(
        2,
        "macro-qubit tables normalized with (odd, even) support",
        worst <= 1e-10 && parity,
        format!("worst |norm - 1| = {worst:.2e}, parity {parity}"),
    );
}

#[test]
fn c03_mean_photon_identity() {
    let g = 1.2;
    let m = gain_params(g).expect("gain").mean_photons;
    let (plus, minus) = macroqubit_state(0.0, g, 1e-15).expect("state").mean_counts();
    let (e_plus, e_minus) = ((plus - (3.0 * m + 1.0)).abs(), (minus - m).abs());
    report(
        3,
        "mean counts equal 3m+1 and m",
        e_plus < 1e-6 && e_minus < 1e-6,
        format!("N+ = {plus:.9} vs {:.9}, N- = {minus:.9} vs {m:.9}", 3.0 * m + 1.0),
    );
}

#[test]
fn c04_activation_is_basis_blind() {
    let ks: Vec<u32> = (0..=10).collect();
    let a = activation_values(0.0, 1.5, TAU, 0.0, &ks, 1e-12).expect("activation");
    let b = activation_values(FRAC_PI_2, 1.5, TAU, 0.0, &ks, 1e-12).expect("activation");
    let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    report(
        4,
        "shutter activation equal for codification and conjugate injection",
        worst <= 1e-10,
        format!("max difference {worst:.2e} over k = 0..10"),
    );
}

#[test]
fn c05_double_filter_headline() {
    let start = Instant::now();
    let n = 4u32;
    let ks: Vec<u32> = (0..n).collect();
    let surface = double_of_surface(1.2, &ks, &ks, 0.0, FRAC_PI_2, 1e-10).expect("surface");
    let v: Vec<Vec<f64>> = surface
        .iter()
        .map(|row| row.iter().map(|c| c.as_ref().expect("events pass").value).collect())
        .collect();
    let diag: Vec<f64> = (0..3).map(|k| v[k][k]).collect();
    let diag_ok = diag.iter().all(|x| (x - 0.64).abs() <= 0.03);
    let mut above = true;
    let mut below = true;
    for k in 0..n as usize {
        for h in 0..n as usize {
            if h > k {
                above &= v[k][h] > 0.64;
            } else if h < k {
                below &= v[k][h] < v[k][k];
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        5,
        "two-sided filter visibility near 0.64 on the diagonal",
        diag_ok && above && below && elapsed < Duration::from_secs(300),
        format!(
            "V(h=k) = {:.4} {:.4} {:.4}, h>k above {above}, h<k below {below}, {:.1}s",
            diag[0],
            diag[1],
            diag[2],
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c06_visibility_trends() {
    let ks: Vec<u32> = (0..=10).collect();
    let same = defined(&visibility_curve(0.0, 0.0, 0.0, 1.1, TAU, &ks, 1e-10).expect("curve"));
    let conj = defined(&visibility_curve(FRAC_PI_2, 0.0, FRAC_PI_2, 1.1, TAU, &ks, 1e-10).expect("curve"));
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let rho = spearman(&kf, &conj);
    let rising = nondecreasing(&same, 1e-12);
    report(
        6,
        "codification visibility rises, conjugate visibility falls",
        rising && rho < -0.9,
        format!(
            "codification {:.4} -> {:.4} nondecreasing {rising}, conjugate {:.4} -> {:.4} spearman {rho:.4}",
            same[0], same[10], conj[0], conj[10]
        ),
    );
}

#[test]
fn c07_injection_distillation() {
    let hs: Vec<i64> = (0..=8).collect();
    let mut ok = true;
    let mut lowest_gain = f64::INFINITY;
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        let ys: Vec<f64> = conditional_injection_values(p, 1.5, TAU, &hs, 1e-10)
            .expect("distill")
            .into_iter()
            .map(|y| y.expect("events pass"))
            .collect();
        ok &= nondecreasing(&ys, 1e-12) && ys.iter().all(|&y| y >= p - 1e-12);
        lowest_gain = lowest_gain.min(ys[0] - p);
    }
    report(
        7,
        "conditioned injection probability grows with the threshold",
        ok,
        format!("p = 0.1..0.9, h = 0..8, smallest p_cond(0) - p = {lowest_gain:.3e}"),
    );
}

#[test]
fn c08_preselection_fringes() {
    let start = Instant::now();
    let step = PI / 90.0;
    let alphas: Vec<f64> = (0..90).map(|i| i as f64 * step).collect();
    let fringe = |beta: f64, k: u32| fringe_pattern(&alphas, beta, FRAC_PI_4, k, G_PRESELECT, TAU).expect("fringe");
    let plus = |beta: f64, k: u32| {
        move |alpha: f64| {
            preselect_sums(alpha, beta, FRAC_PI_4, &[k], G_PRESELECT, TAU, 1e-10).and_then(|s| s[0].plus_fraction())
        }
    };

    let shift0 = grid_peak(&fringe(FRAC_PI_4, 0)) - grid_peak(&fringe(0.0, 0));
    let open_ok = (shift0 - FRAC_PI_4).abs() <= step;

    let (a0, _) = refine_peak(&fringe(0.0, 5), plus(0.0, 5), 1e-4).expect("peak");
    let (a1, _) = refine_peak(&fringe(FRAC_PI_4, 5), plus(FRAC_PI_4, 5), 1e-4).expect("peak");
    let sep = (a1 - a0).abs();
    let filtered_ok = sep < 0.05 && (a0 - FRAC_PI_8).abs() <= 0.03 && (a1 - FRAC_PI_8).abs() <= 0.03;

    let elapsed = start.elapsed();
    report(
        8,
        "pre-selection locks the fringe peak at pi/8",
        open_ok && filtered_ok && elapsed < Duration::from_secs(900),
        format!(
            "k=0 shift {shift0:.4} vs {FRAC_PI_4:.4} (grid {step:.4}); k=5 peaks {a0:.4}, {a1:.4} vs {FRAC_PI_8:.4}; {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c09_no_chsh_violation() {
    let ideal = MicroMacroModel::new(0.0, 1.0, None, 0).expect("model");
    let s0 = chsh_value(0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4, &ideal).expect("chsh").abs();
    let anchor = (s0 - 2.0 * SQRT_2).abs() <= 1e-9;
    let mut maxima = Vec::new();
    for k in [0, 3, 5] {
        let spec = FilterSpec::DoubleOf { k, basis1: 0.0, basis2: FRAC_PI_4 };
        let model = MicroMacroModel::new(G_PRESELECT, TAU, Some(spec), 0).expect("model");
        maxima.push(chsh_sweep(&model, 16).expect("sweep").max_abs_s);
    }
    let bounded = maxima.iter().all(|&s| s <= 2.0 + 1e-6);
    report(
        9,
        "amplified micro-macro pair stays within the local bound",
        anchor && bounded,
        format!(
            "single photon S = {s0:.12}, max |S| at k=0,3,5: {:.4} {:.4} {:.4}",
            maxima[0], maxima[1], maxima[2]
        ),
    );
}

fn csv_outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn c10_deterministic_outputs() {
    let runs = [
        ("distill", r#"{"g": 1.0, "p": [0.2, 0.7], "h": [0, 1, 2, 3]}"#),
        ("visibility", r#"{"g": 0.8, "thresholds": [0, 1, 2, 3]}"#),
        ("activation", r#"{"g": 0.8, "thresholds": [0, 1, 2]}"#),
        ("double-filter", r#"{"g": 0.8, "thresholds": [0, 1], "h": [0, 1]}"#),
        ("preselect", r#"{"g": 0.6, "thresholds": [0, 2], "alpha_grid": 8}"#),
        ("chsh", r#"{"g": 0.5, "thresholds": [0, 2], "alpha_grid": 4}"#),
        ("oracle-check", r#"{"g": 0.3}"#),
    ];
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut mismatched = Vec::new();
    let mut files = 0;
    for (cmd, json) in runs {
        let config = tmp.path().join(format!("{cmd}.json"));
        std::fs::write(&config, json).unwrap();
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = tmp.path().join(format!("{cmd}-{run}"));
            let code = main_with_args([
                "macroqubit",
                cmd,
                "--config",
                config.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code, 0, "{cmd} exited with {code}");
            outputs.push(csv_outputs(&out));
        }
        files += outputs[0].len();
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            mismatched.push(cmd);
        }
    }
    report(
        10,
        "repeated runs write byte-identical CSV",
        mismatched.is_empty(),
        format!("7 subcommands, {files} files compared, mismatched {mismatched:?}"),
    );
}
