//! Acceptance sweep: one numbered check per guarantee the tool makes, each
//! printing a single labeled pass/fail line (visible with `--nocapture` or
//! on failure) before asserting.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use minsing::cli_reports::report::run_zariski;
use minsing::envelope_1d::{
    equilibrium_envelope, monotonicity_check, psh_convexity_check, sandwich_report, vhat_toy,
    RadialWeight, UniformGrid,
};
use minsing::fiber_integral::{
    closed_form, holder_check, normalization_constant, numeric_integral, orthogonality_check,
    FiberProblem, QuadratureSpec,
};
use minsing::rational::{format_rational, ratio};
use minsing::tol::GRID_TOL;
use minsing::tropical_weight::TropicalWeight;
use minsing::{BoxPolytope, Halfspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn record(label: &str, ok: bool, details: &str) {
    println!("[{}] {label}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{label}: {details}");
}

#[test]
fn c01_blowup_pipeline_reports_exact_fractions() {
    let mut details = String::new();
    let mut ok = true;
    for n in 13..=20u32 {
        let start = Instant::now();
        let out = run_zariski(n).expect("the pipeline runs for every point count");
        let elapsed = start.elapsed();
        let r = &out.results;

        let c = ratio(i64::from(n) - 12, i64::from(n) - 8);
        let zero = ratio(0, 1);
        let one = ratio(1, 1);
        let expected: HashSet<Vec<String>> = [
            vec![&c, &zero],
            vec![&zero, &c],
            vec![&one, &zero],
            vec![&zero, &one],
        ]
        .iter()
        .map(|v| v.iter().map(|q| format_rational(q)).collect())
        .collect();
        let got: HashSet<Vec<String>> = r.vertices.iter().cloned().collect();

        let good = r.exponent == format_rational(&c)
            && !r.nef
            && r.vertices.len() == 4
            && got == expected
            && elapsed.as_secs_f64() < 1.0;
        if !good {
            ok = false;
            details.push_str(&format!(
                "n={n}: exponent {} nef {} vertices {:?} elapsed {:?}; ",
                r.exponent, r.nef, r.vertices, elapsed
            ));
        }
    }
    record(
        "01 blow-up exponents (n - 12)/(n - 8) with the four exact vertices, under a second each",
        ok,
        &details,
    );
}

#[test]
fn c02_nef_threshold_is_bounded_with_zero_exponent() {
    let out = run_zariski(12).expect("the pipeline runs at the threshold");
    let r = &out.results;
    let ok = r.nef && r.contains_origin && r.exponent == "0/1";
    record(
        "02 twelve points: nef, origin admissible, exponent zero",
        ok,
        &format!(
            "nef {} contains_origin {} exponent {}",
            r.nef, r.contains_origin, r.exponent
        ),
    );
}

#[test]
fn c03_fiber_integral_matches_the_closed_form() {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    let mut details = String::new();
    let mut ok = true;

    // Pinned anchors with known exact values.
    let p = FiberProblem::new(vec![0.0], vec![0.0, 0.0]).unwrap();
    let anchor1 = closed_form(&p);
    let num1 = numeric_integral(&p, &spec).unwrap().value;
    if ((anchor1 - PI) / PI).abs() > 1e-12 || ((num1 - PI) / PI).abs() > 1e-6 {
        ok = false;
        details.push_str(&format!("pi anchor: closed {anchor1} numeric {num1}; "));
    }
    let p = FiberProblem::new(vec![0.5, 0.5], vec![0.0, 0.0, 0.0]).unwrap();
    let target = PI.powi(3) / 6.0;
    let anchor2 = closed_form(&p);
    let num2 = numeric_integral(&p, &spec).unwrap().value;
    if ((anchor2 - target) / target).abs() > 1e-12 || ((num2 - target) / target).abs() > 1e-6 {
        ok = false;
        details.push_str(&format!("pi^3/6 anchor: closed {anchor2} numeric {num2}; "));
    }

    // Seeded sweep across the admissible exponent window.
    for r in 1..=3usize {
        let t_hi = [1.5, 0.9, 0.6][r - 1];
        let mut rng = ChaCha20Rng::seed_from_u64(r as u64);
        for _ in 0..20 {
            let t: Vec<f64> = (0..r).map(|_| rng.gen_range(-0.9..t_hi)).collect();
            let phi: Vec<f64> = (0..=r).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = FiberProblem::new(t.clone(), phi.clone()).unwrap();
            let exact = closed_form(&p);
            let numeric = numeric_integral(&p, &spec).unwrap().value;
            let rel = ((numeric - exact) / exact).abs();
            worst = worst.max(rel);
            if rel >= 1e-6 {
                ok = false;
                details.push_str(&format!("r={r} t={t:?} phi={phi:?} rel={rel:.3e}; "));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 60 {
        ok = false;
        details.push_str(&format!("sweep took {elapsed:?}; "));
    }
    record(
        "03 fiber integral: anchors pi and pi^3/6, sixty seeded points within 1e-6",
        ok,
        &format!("worst rel err {worst:.3e}; {details}"),
    );
}

#[test]
fn c04_volume_constant_ignores_the_potential() {
    let spec = QuadratureSpec {
        rel_tol: 1e-9,
        ..QuadratureSpec::default()
    };
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut ok = true;
    let mut details = String::new();
    for r in 1..=2usize {
        let mut values = Vec::with_capacity(10);
        for _ in 0..10 {
            let phi: Vec<f64> = (0..=r).map(|_| rng.gen_range(-1.0..1.0)).collect();
            values.push(normalization_constant(r, &phi, &spec).unwrap().value);
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = (hi - lo) / lo;
        if spread > 1e-8 {
            ok = false;
        }
        details.push_str(&format!("r={r} spread {spread:.3e}; "));
    }
    record(
        "04 normalization constant independent of the potential within 1e-8",
        ok,
        &details,
    );
}

#[test]
fn c05_distinct_frequencies_are_orthogonal() {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;

    for a in 0..=4u32 {
        for b in 0..=4u32 {
            if a == b {
                continue;
            }
            let v = orthogonality_check(&[a], &[b], &[0.3, -0.1], &spec).unwrap();
            worst = worst.max(v.abs());
        }
    }
    let ells: Vec<[u32; 2]> = (0..=4u32)
        .flat_map(|a| (0..=4u32).map(move |b| [a, b]))
        .collect();
    for i in 0..ells.len() {
        for j in i + 1..ells.len() {
            let v = orthogonality_check(&ells[i], &ells[j], &[0.2, -0.3, 0.1], &spec).unwrap();
            worst = worst.max(v.abs());
        }
    }
    let same = orthogonality_check(&[2, 1], &[2, 1], &[0.2, -0.3, 0.1], &spec).unwrap();

    let ok = worst <= 1e-10 && (same - 1.0).abs() <= 1e-8;
    record(
        "05 monomial sections orthogonal within 1e-10 across all small frequency pairs",
        ok,
        &format!("worst off-diagonal {worst:.3e}, diagonal {same}"),
    );
}

#[test]
fn c06_fractional_twists_obey_the_holder_bound() {
    let spec = QuadratureSpec::default();
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0u32;
    let mut ok = true;
    let mut details = String::new();

    let mut check = |ell: &[u32], m: u32, phi: &[f64]| {
        let rep = holder_check(ell, m, phi, &spec).unwrap();
        let margin = rep.lhs / rep.rhs - 1.0;
        if rep.lhs > rep.rhs * (1.0 + 1e-8) {
            ok = false;
            details.push_str(&format!("ell={ell:?} m={m}: lhs {} rhs {}; ", rep.lhs, rep.rhs));
        }
        worst = worst.max(margin);
        count += 1;
    };

    for m in 1..=4u32 {
        for a in 0..=4u32.min(m) {
            check(&[a], m, &[0.3, -0.2]);
        }
        for a in 0..=4u32 {
            for b in 0..=4u32 {
                if a + b <= m {
                    check(&[a, b], m, &[0.25, -0.35, 0.15]);
                }
            }
        }
    }
    record(
        "06 power bound holds for every admissible twist up to power four",
        ok,
        &format!("{count} cases, worst margin {worst:.3e}; {details}"),
    );
}

/// Row maxima of an implicitly defined matrix whose per-row argmax column
/// is nondecreasing in the row index, by divide and conquer.
fn monotone_row_maxima(n_rows: usize, n_cols: usize, value: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; n_rows];
    let mut stack = vec![(0usize, n_rows, 0usize, n_cols)];
    while let Some((r_lo, r_hi, c_lo, c_hi)) = stack.pop() {
        if r_lo >= r_hi {
            continue;
        }
        let r_mid = r_lo + (r_hi - r_lo) / 2;
        let mut best = f64::NEG_INFINITY;
        let mut best_c = c_lo;
        for c in c_lo..c_hi {
            let v = value(r_mid, c);
            if v > best {
                best = v;
                best_c = c;
            }
        }
        out[r_mid] = best;
        stack.push((r_lo, r_mid, c_lo, best_c + 1));
        stack.push((r_mid + 1, r_hi, best_c, c_hi));
    }
    out
}

/// Independent slope-constrained envelope: the double discrete Legendre
/// transform of the sampled weight, with slopes confined to `[0, k]` on a
/// fine uniform slope grid. Shares no code path with the hull route.
fn biconjugate_oracle(grid: &UniformGrid, phi: &[f64], k: f64, n_slopes: usize) -> Vec<f64> {
    let t: Vec<f64> = grid.points().collect();
    let ds = k / (n_slopes - 1) as f64;
    let conj = monotone_row_maxima(n_slopes, t.len(), |j, i| {
        let s = j as f64 * ds;
        s * t[i] - phi[i]
    });
    monotone_row_maxima(t.len(), n_slopes, |i, j| {
        let s = j as f64 * ds;
        s * t[i] - conj[j]
    })
}

#[test]
fn c07_envelope_agrees_with_independent_oracles() {
    let mut ok = true;
    let mut details = String::new();

    // A strictly convex weight with admissible slopes is its own envelope.
    let grid = UniformGrid::symmetric(40.0, 4096).unwrap();
    let round = RadialWeight::round_metric(grid, ratio(1, 1)).unwrap();
    let env = equilibrium_envelope(&round).unwrap();
    let flat_defect = env.v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if flat_defect > 1e-9 {
        ok = false;
        details.push_str(&format!("round defect {flat_defect:.3e}; "));
    }

    // Applying the envelope twice changes nothing.
    let dipped = RadialWeight::dipped_metric(grid).unwrap();
    let once = equilibrium_envelope(&dipped).unwrap();
    let as_weight =
        RadialWeight::from_values(grid, once.envelope.clone(), ratio(2, 1), "hulled").unwrap();
    let twice = equilibrium_envelope(&as_weight).unwrap();
    let drift = once
        .envelope
        .iter()
        .zip(&twice.envelope)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if drift > 2.0 * GRID_TOL {
        ok = false;
        details.push_str(&format!("idempotence drift {drift:.3e}; "));
    }

    // Cross-check the hull route against the conjugate route on a dense
    // grid: same samples, disjoint algorithms.
    let dense = UniformGrid::symmetric(40.0, 10_000).unwrap();
    let bump = RadialWeight::dipped_metric(dense).unwrap();
    let env = equilibrium_envelope(&bump).unwrap();
    let oracle = biconjugate_oracle(&dense, bump.values(), bump.degree_f64(), 8_000_001);
    let gap = env
        .envelope
        .iter()
        .zip(&oracle)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if gap > 1e-6 {
        ok = false;
        details.push_str(&format!("conjugate-oracle gap {gap:.3e}; "));
    }

    record(
        "07 envelope: convex weight untouched, idempotent, matches the conjugate oracle",
        ok,
        &details,
    );
}

#[test]
fn c08_kernel_weights_sandwich_the_envelope() {
    let grid = UniformGrid::symmetric(40.0, 4096).unwrap();
    let weights = [
        RadialWeight::round_metric(grid, ratio(1, 1)).unwrap(),
        RadialWeight::dipped_metric(grid).unwrap(),
    ];
    let mut ok = true;
    let mut details = String::new();
    for w in &weights {
        let rep = sandwich_report(w, &[1, 2, 4, 8]).unwrap();
        let mut prev = f64::INFINITY;
        for row in &rep.rows {
            if row.sup_v_minus_vb > 1e-6 {
                ok = false;
                details.push_str(&format!(
                    "{} m={}: envelope exceeds the kernel weight by {:.3e}; ",
                    w.label(),
                    row.m,
                    row.sup_v_minus_vb
                ));
            }
            if !row.sup_vb_minus_v.is_finite() || row.sup_vb_minus_v > prev + 1e-9 {
                ok = false;
                details.push_str(&format!(
                    "{} m={}: gap {:.3e} after {:.3e}; ",
                    w.label(),
                    row.m,
                    row.sup_vb_minus_v,
                    prev
                ));
            }
            prev = row.sup_vb_minus_v;
        }
        details.push_str(&format!(
            "{}: final gap {:.3e}; ",
            w.label(),
            rep.rows.last().unwrap().sup_vb_minus_v
        ));
    }
    record(
        "08 kernel weights stay above the envelope and close in from above",
        ok,
        &details,
    );
}

#[test]
fn c09_scaled_defect_grows_with_the_coefficients() {
    let grid = UniformGrid::symmetric(40.0, 4096).unwrap();
    let weights = [
        RadialWeight::round_metric(grid, ratio(1, 1)).unwrap(),
        RadialWeight::round_metric(grid, ratio(2, 1)).unwrap(),
        RadialWeight::dipped_metric(grid).unwrap(),
    ];

    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    let mut details = String::new();
    for _ in 0..50 {
        let a1 = rng.gen_range(0..=400i64);
        let a2 = rng.gen_range(0..=400i64);
        let d1 = rng.gen_range(0..=75i64);
        let d2 = rng.gen_range(0..=75i64);
        let alpha = [ratio(a1, 1000), ratio(a2, 1000)];
        let beta = [ratio(a1 + d1, 1000), ratio(a2 + d2, 1000)];
        let rep = monotonicity_check(&weights, &alpha, &beta).unwrap();
        worst = worst.max(rep.max_violation);
        if rep.max_violation > 1e-7 {
            ok = false;
            details.push_str(&format!(
                "alpha=({a1},{a2})/1000 delta=({d1},{d2})/1000: violation {:.3e}; ",
                rep.max_violation
            ));
        }
    }

    let alpha = [ratio(1, 5), ratio(3, 10)];
    let mut diffs = Vec::new();
    for eps in [ratio(1, 10), ratio(1, 100), ratio(1, 1000)] {
        let beta = [&alpha[0] + &eps, &alpha[1] + &eps];
        let rep = monotonicity_check(&weights, &alpha, &beta).unwrap();
        diffs.push(rep.sup_abs_diff);
    }
    if !(diffs[0] > diffs[1] && diffs[1] > diffs[2]) {
        ok = false;
        details.push_str(&format!("shrinking steps gave gaps {diffs:?}; "));
    }

    record(
        "09 scaled defect monotone on fifty seeded pairs, gap vanishing with the step",
        ok,
        &format!("worst violation {worst:.3e}, gaps {diffs:?}; {details}"),
    );
}

/// Exponent polytope used by the global-envelope checks: `alpha >= 0`,
/// `|alpha| <= 1`, `8 alpha_1 + 8 alpha_2 - 4 >= 0`.
fn model_box() -> BoxPolytope {
    let hs = vec![
        Halfspace {
            normal: vec![ratio(1, 1), ratio(0, 1)],
            offset: ratio(0, 1),
        },
        Halfspace {
            normal: vec![ratio(0, 1), ratio(1, 1)],
            offset: ratio(0, 1),
        },
        Halfspace {
            normal: vec![ratio(-1, 1), ratio(-1, 1)],
            offset: ratio(1, 1),
        },
        Halfspace {
            normal: vec![ratio(8, 1), ratio(8, 1)],
            offset: ratio(-4, 1),
        },
    ];
    BoxPolytope::from_halfspaces(2, hs).unwrap()
}

#[test]
fn c10_global_bound_structure_holds() {
    let bx = model_box();
    let mut ok = true;
    let mut details = String::new();

    // Flat base weights collapse the bound onto the tropical weight.
    let base = UniformGrid::symmetric(6.0, 129).unwrap();
    let fiber = UniformGrid::new(-8.0, 2.0, 11).unwrap();
    let flat = RadialWeight::flat(base).unwrap();
    let res = vhat_toy(&bx, &[flat.clone(), flat.clone(), flat], 4, &fiber).unwrap();
    let trop = TropicalWeight::from_box(&bx).unwrap();
    let mut gap = 0.0f64;
    for i0 in 0..fiber.len() {
        for i1 in 0..fiber.len() {
            let expected = trop.evaluate(&[fiber.point(i0), fiber.point(i1)]).unwrap();
            for ib in 0..base.len() {
                gap = gap.max((res.fun.value_at(&[i0, i1, ib]) - expected).abs());
            }
        }
    }
    if gap > 1e-6 {
        ok = false;
    }
    details.push_str(&format!("tropical gap {gap:.3e}; "));

    // Curved weights keep the bound convex within the slope budgets.
    let base = UniformGrid::symmetric(6.0, 97).unwrap();
    let fiber = UniformGrid::new(-5.0, 1.0, 13).unwrap();
    let weights = [
        RadialWeight::round_metric(base, ratio(1, 1)).unwrap(),
        RadialWeight::round_metric(base, ratio(2, 1)).unwrap(),
        RadialWeight::flat(base).unwrap(),
    ];
    let res = vhat_toy(&bx, &weights, 4, &fiber).unwrap();
    let audit =
        psh_convexity_check(&res.fun, &[(0.0, 1.0), (0.0, 1.0), (0.0, 2.0)]).unwrap();
    if audit.max_midpoint_violation > 1e-6 || audit.max_slope_violation > 1e-6 {
        ok = false;
    }
    details.push_str(&format!(
        "convexity violations {:.3e}/{:.3e}; ",
        audit.max_midpoint_violation, audit.max_slope_violation
    ));

    // Denser exponent families raise the bound by less and less.
    let base = UniformGrid::symmetric(6.0, 129).unwrap();
    let fiber = UniformGrid::new(-8.0, 2.0, 11).unwrap();
    let weights = [
        RadialWeight::round_metric(base, ratio(1, 1)).unwrap(),
        RadialWeight::dipped_metric(base).unwrap(),
        RadialWeight::flat(base).unwrap(),
    ];
    let mut prev: Option<Vec<f64>> = None;
    let mut rises = Vec::new();
    for d in [2u32, 4, 8, 16] {
        let res = vhat_toy(&bx, &weights, d, &fiber).unwrap();
        if let Some(old) = &prev {
            let rise = res
                .fun
                .values()
                .iter()
                .zip(old)
                .map(|(new, old)| new - old)
                .fold(0.0f64, f64::max);
            rises.push(rise);
        }
        prev = Some(res.fun.values().to_vec());
    }
    if !(rises[0] >= rises[1] && rises[1] >= rises[2]) {
        ok = false;
    }
    details.push_str(&format!("refinement rises {rises:?}"));

    record(
        "10 global bound: tropical limit, convexity audit, shrinking refinements",
        ok,
        &details,
    );
}

#[test]
fn c11_tropical_weight_tracks_the_smooth_form() {
    let mut ok = true;
    let mut details = String::new();
    for n in 13..=20u32 {
        let out = run_zariski(n).expect("the pipeline runs for every point count");
        let gap = &out.results.gap;
        if !gap.within_bound {
            ok = false;
        }
        details.push_str(&format!(
            "n={n}: spread {:.4} bound {:.4}; ",
            gap.spread, gap.bound
        ));
    }
    record(
        "11 tropical weight within (c + 1) log 2 of the smooth form on the sample box",
        ok,
        &details,
    );
}

type CliRun = (String, Option<i32>, Vec<(String, Vec<u8>)>);

fn run_cli(args: &[&str], dir: &Path) -> CliRun {
    let out_dir = dir.join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_minsing"))
        .args(args)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .expect("the binary runs");
    let stdout = String::from_utf8(output.stdout).expect("reports are UTF-8");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out_dir)
        .expect("the output directory exists")
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    std::fs::remove_dir_all(&out_dir).unwrap();
    (stdout, output.status.code(), files)
}

#[test]
fn c12_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    };

    let box_file = write(
        "box.prob",
        "kind = box\nrank = 2\ncone_dim = 2\nfunctional = 1, 0\nfunctional = 0, 1\n\
         l_restr = -1, -2\nconormal = 3, 1\nconormal = 1, 4\n",
    );
    let integral_file = write(
        "integral.prob",
        "kind = integral\nr = 1\nt = 1/2\nphi = 1/4, -1/4\nsamples = 3\n",
    );
    let envelope_file = write(
        "envelope.prob",
        "kind = envelope\nweight = bump\nt_max = 20\ngrid_points = 513\nm_list = 1, 2\n",
    );
    let vhat_file = write(
        "vhat.prob",
        "kind = vhat\nrank = 2\ncone_dim = 2\nfunctional = 1, 0\nfunctional = 0, 1\n\
         l_restr = -1, -2\nconormal = 3, 1\nconormal = 1, 4\nweights = fs:1, bump, flat\n\
         alpha_density = 2\nfiber_min = -5\nfiber_max = 1\nfiber_points = 7\n\
         t_max = 6\nbase_points = 129\n",
    );

    let cases: Vec<Vec<String>> = vec![
        vec!["box".into(), box_file.display().to_string()],
        vec!["zariski".into(), "--n".into(), "16".into()],
        vec!["integral".into(), integral_file.display().to_string()],
        vec!["envelope".into(), envelope_file.display().to_string()],
        vec!["vhat".into(), vhat_file.display().to_string()],
    ];

    let mut ok = true;
    let mut details = String::new();
    for case in &cases {
        let args: Vec<&str> = case.iter().map(String::as_str).collect();
        let first = run_cli(&args, dir.path());
        let second = run_cli(&args, dir.path());
        if first != second {
            ok = false;
            details.push_str(&format!("{} differs between runs; ", case.join(" ")));
        }
        if first.1 != Some(0) {
            ok = false;
            details.push_str(&format!("{} exited with {:?}; ", case.join(" "), first.1));
        }
        details.push_str(&format!(
            "{}: {} output files; ",
            case[0],
            first.2.len()
        ));
    }
    record(
        "12 every command emits byte-identical reports on repeated runs",
        ok,
        &details,
    );
}

