//! Acceptance suite: one test per shipped claim, each printing a single
//! PASS/FAIL line with the measured numbers and its runtime.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! as they complete.  Every tolerance here is part of the claim being
//! tested, not a tunable: loosening one weakens the statement the suite
//! certifies.

use std::fmt::Write as _;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use rieszcap::analysis::{
    bm_sweep, body_concavity_experiment, concavity_index, homothetic_levels_experiment,
    level_set_extract, three_levels_experiment, Annulus, BmClass, ConcavityParams,
};
use rieszcap::extension::{extension_level_body, solve_extension, ExtensionParams};
use rieszcap::geometry::{minkowski_combine, pt2, CellWeighting, Quadrature};
use rieszcap::solver::{
    assemble_kernel, capacity, extrapolate_values, refine_study, solve_equilibrium, solve_pcg,
};
use rieszcap::{detect_homothety, ConvexBody, DirectionGrid, KernelSpec};

const EXACT_DISK: f64 = std::f64::consts::FRAC_2_PI;

fn grid2() -> Arc<DirectionGrid> {
    Arc::new(DirectionGrid::uniform(2, 256).expect("valid grid"))
}

fn disk(grid: &Arc<DirectionGrid>) -> ConvexBody {
    ConvexBody::ball(pt2(0.0, 0.0), 1.0, grid).expect("unit disk")
}

fn square(grid: &Arc<DirectionGrid>) -> ConvexBody {
    ConvexBody::polytope(
        &[pt2(-1.0, -1.0), pt2(1.0, -1.0), pt2(1.0, 1.0), pt2(-1.0, 1.0)],
        grid,
    )
    .expect("unit square")
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / (0.5 * (a.abs() + b.abs()))
}

/// Print the verdict line, then fail the test if the criterion missed.
fn conclude(criterion: u32, ok: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let timely = elapsed <= budget;
    let verdict = if ok && timely { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {criterion}: {verdict} [{:.1}s of {:.0}s] {detail}",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    println!("{line}");
    assert!(ok && timely, "{line}");
}

#[test]
fn criterion_01_disk_capacity_three_estimators_agree() {
    let t0 = Instant::now();
    let g = grid2();
    let body = disk(&g);
    let spec = KernelSpec::half_fractional(2).unwrap();

    // Default resolution: both kernel normalizations plus the extension
    // solver at its default grid.
    let est = capacity(&body, 0.04, &spec).unwrap();
    let ext_default = solve_extension(&body, &ExtensionParams::default())
        .unwrap()
        .capacity_estimate();
    let coarse = [
        rel_gap(est.mass, est.asymptotic),
        rel_gap(est.mass, ext_default),
        rel_gap(est.asymptotic, ext_default),
    ];
    let coarse_ok = coarse.iter().all(|&gap| gap <= 0.03);

    // Richardson on the kernel ladder (mass and asymptotic sequences) and
    // on the extension solver's own grid ladder.
    let ladder = [0.08, 0.04, 0.02];
    let study = refine_study(&body, &ladder, &spec).unwrap();
    let asym: Vec<f64> = study.rows.iter().map(|r| r.asymptotic).collect();
    let asym_ex = extrapolate_values(&ladder, &asym).unwrap();

    let mut ext_h = Vec::new();
    let mut ext_vals = Vec::new();
    for cells in [10.0, 12.0, 16.0] {
        let params = ExtensionParams {
            cells_per_inradius: cells,
            ..ExtensionParams::default()
        };
        let sol = solve_extension(&body, &params).unwrap();
        ext_h.push(sol.grid().h());
        ext_vals.push(sol.capacity_estimate());
    }
    let ext_ex = extrapolate_values(&ext_h, &ext_vals).unwrap();

    let fine = [
        rel_gap(study.extrapolated, asym_ex.extrapolated),
        rel_gap(study.extrapolated, ext_ex.extrapolated),
        rel_gap(asym_ex.extrapolated, ext_ex.extrapolated),
    ];
    let fine_ok = fine.iter().all(|&gap| gap <= 0.01);

    let stability = (study.extrapolated - study.finest().mass).abs() / study.extrapolated;
    let exact_err = (study.extrapolated - EXACT_DISK).abs() / EXACT_DISK;

    let ok = coarse_ok && fine_ok && stability <= 0.005 && exact_err <= 0.01;
    let detail = format!(
        "default gaps {:.4}/{:.4}/{:.4} (<=0.03), extrapolated gaps {:.4}/{:.4}/{:.4} (<=0.01), \
         stability {:.5} (<=0.005), vs closed form 2/pi: {:.5}",
        coarse[0], coarse[1], coarse[2], fine[0], fine[1], fine[2], stability, exact_err
    );
    conclude(1, ok, t0.elapsed(), Duration::from_secs(120), &detail);
}

#[test]
fn criterion_02_scaling_and_translation_invariance() {
    let t0 = Instant::now();
    let g = grid2();
    let spec = KernelSpec::half_fractional(2).unwrap();
    let h = 0.04;

    let mut worst_scale = 0.0_f64;
    let mut worst_shift = 0.0_f64;
    let mut detail = String::new();
    for (name, body) in [("disk", disk(&g)), ("square", square(&g))] {
        let base = capacity(&body, h, &spec).unwrap().mass;
        for rho in [0.5, 2.0] {
            let scaled = body.scale_translate(rho, pt2(0.0, 0.0)).unwrap();
            // Matched relative resolution so the lattices are similar.
            let got = capacity(&scaled, rho * h, &spec).unwrap().mass;
            let err = (got - rho * base).abs() / (rho * base);
            worst_scale = worst_scale.max(err);
            let _ = write!(detail, "{name} rho {rho}: {err:.5} ");
        }
        let moved = body.scale_translate(1.0, pt2(0.37, -1.21)).unwrap();
        let got = capacity(&moved, h, &spec).unwrap().mass;
        let err = (got - base).abs() / base;
        worst_shift = worst_shift.max(err);
        let _ = write!(detail, "{name} shifted: {err:.5} ");
    }

    let ok = worst_scale <= 0.005 && worst_shift <= 0.002;
    let _ = write!(
        detail,
        "(worst scaling {worst_scale:.5} <= 0.005, worst translation {worst_shift:.5} <= 0.002)"
    );
    conclude(2, ok, t0.elapsed(), Duration::from_secs(120), &detail);
}

#[test]
fn criterion_03_capacity_monotone_under_inclusion() {
    let t0 = Instant::now();
    let g = grid2();
    let spec = KernelSpec::half_fractional(2).unwrap();
    let ladder = [0.064, 0.052, 0.04];

    let inner = refine_study(&disk(&g), &ladder, &spec).unwrap();
    let mid = refine_study(&square(&g), &ladder, &spec).unwrap();
    let outer = refine_study(
        &ConvexBody::ball(pt2(0.0, 0.0), 2.0_f64.sqrt(), &g).unwrap(),
        &ladder,
        &spec,
    )
    .unwrap();

    let gap1 = mid.extrapolated - inner.extrapolated;
    let bars1 = mid.error_bar + inner.error_bar;
    let gap2 = outer.extrapolated - mid.extrapolated;
    let bars2 = outer.error_bar + mid.error_bar;

    let ok = gap1 > bars1 && gap2 > bars2;
    let detail = format!(
        "disk {:.5} < square {:.5} < disk(sqrt2) {:.5}; gaps {:.5} > bars {:.5} and {:.5} > {:.5}",
        inner.extrapolated, mid.extrapolated, outer.extrapolated, gap1, bars1, gap2, bars2
    );
    conclude(3, ok, t0.elapsed(), Duration::from_secs(180), &detail);
}

#[test]
fn criterion_04_combination_inequality_sweep() {
    let t0 = Instant::now();
    let g = grid2();
    let lambdas: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();

    // Non-homothetic pair: strict inequality expected away from equality.
    let report = bm_sweep(&disk(&g), &square(&g), &lambdas, 0.04).unwrap();
    let none_below = report.points.iter().all(|p| p.deficit >= -p.bar);
    let strict = report
        .points
        .iter()
        .filter(|p| p.deficit > p.bar)
        .count();

    // Homothetic pair: deficits must vanish within their bars.
    let sq = square(&g);
    let sq2 = sq.scale_translate(2.0, pt2(3.0, 0.0)).unwrap();
    let homo = bm_sweep(&sq, &sq2, &lambdas, 0.04).unwrap();
    let equality = homo
        .points
        .iter()
        .all(|p| p.deficit.abs() <= p.bar && p.class != BmClass::Violated);

    let ok = none_below && strict >= 7 && equality;
    let worst = report
        .points
        .iter()
        .map(|p| p.deficit / p.bar)
        .fold(f64::INFINITY, f64::min);
    let worst_homo = homo
        .points
        .iter()
        .map(|p| p.deficit.abs() / p.bar)
        .fold(0.0_f64, f64::max);
    let detail = format!(
        "disk/square: {strict}/9 strictly above bar, min deficit/bar {worst:.1}; \
         homothetic squares: max |deficit|/bar {worst_homo:.2} (<=1)"
    );
    conclude(4, ok, t0.elapsed(), Duration::from_secs(900), &detail);
}

#[test]
fn criterion_05_homothety_detection_roundtrip_and_rejection() {
    let t0 = Instant::now();
    let g = grid2();
    let base = square(&g);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let rho = rng.gen_range(0.1..10.0);
        let xi = pt2(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let moved = base.scale_translate(rho, xi).unwrap();
        let fit = detect_homothety(&moved, &base).unwrap();
        let rho_err = (fit.rho - rho).abs() / rho;
        worst = worst.max(fit.residual).max(rho_err);
    }

    let s = 2.0_f64.sqrt();
    let rotated = ConvexBody::polytope(
        &[pt2(s, 0.0), pt2(0.0, s), pt2(-s, 0.0), pt2(0.0, -s)],
        &g,
    )
    .unwrap();
    let reject = detect_homothety(&rotated, &base).unwrap();

    let ok = worst < 1e-10 && !reject.is_homothety() && reject.residual > 0.1;
    let detail = format!(
        "100 round-trips worst residual/scale error {worst:.2e} (<1e-10); \
         rotated square residual {:.3} (>0.1)",
        reject.residual
    );
    conclude(5, ok, t0.elapsed(), Duration::from_secs(1), &detail);
}

#[test]
fn criterion_06_concavity_estimator_on_closed_forms() {
    let t0 = Instant::now();
    let region = Annulus::new([0.0, 0.0], 1.2, 6.0).unwrap();
    let params = ConcavityParams::default();

    let reciprocal = |p: [f64; 2]| 1.0 / (p[0] * p[0] + p[1] * p[1]).sqrt();
    let gaussian = |p: [f64; 2]| (-(p[0] * p[0] + p[1] * p[1])).exp();
    let constant = |_: [f64; 2]| 2.5;

    let a1 = concavity_index(&reciprocal, &region, &params).unwrap().alpha;
    let a2 = concavity_index(&gaussian, &region, &params).unwrap().alpha;
    let a3 = concavity_index(&constant, &region, &params).unwrap().alpha;

    let ok = (a1 + 1.0).abs() <= 0.05 && a2.abs() <= 0.05 && a3 == 1.0;
    let detail = format!(
        "1/|x| -> {a1:.4} (-1 +- 0.05), exp(-|x|^2) -> {a2:.4} (0 +- 0.05), constant -> {a3} (= 1)"
    );
    conclude(6, ok, t0.elapsed(), Duration::from_secs(10), &detail);
}

#[test]
fn criterion_07_potential_concavity_index_hits_ceiling() {
    let t0 = Instant::now();
    let g = grid2();
    let params = ConcavityParams::default();

    let d = body_concavity_experiment(&disk(&g), 0.04, (3.0, 8.0), &params).unwrap();
    let s = body_concavity_experiment(&square(&g), 0.04, (3.0, 8.0), &params).unwrap();

    let (da, dg) = (d.concavity.alpha, d.concavity.gap.unwrap_or(f64::NAN));
    let (sa, sg) = (s.concavity.alpha, s.concavity.gap.unwrap_or(f64::NAN));

    let ok = (da + 1.0).abs() <= 0.1 && sa <= -0.9;
    let detail = format!(
        "disk alpha {da:.4} (gap to ceiling {dg:+.4}), square alpha {sa:.4} (gap {sg:+.4})"
    );
    conclude(7, ok, t0.elapsed(), Duration::from_secs(600), &detail);
}

#[test]
fn criterion_08_extension_oracle_cross_agreement_and_level_law() {
    let t0 = Instant::now();
    let g = grid2();
    let spec = KernelSpec::half_fractional(2).unwrap();
    let d = disk(&g);
    let s = square(&g);
    let combo = minkowski_combine(0.5, &d, &s).unwrap();

    let mut detail = String::new();
    let mut worst_cross = 0.0_f64;
    for (name, body) in [("disk", &d), ("square", &s), ("combination", &combo)] {
        let kern = capacity(body, 0.04, &spec).unwrap().mass;
        let params = ExtensionParams {
            cells_per_inradius: 16.0,
            ..ExtensionParams::default()
        };
        let ext = solve_extension(body, &params).unwrap().capacity_estimate();
        let gap = rel_gap(kern, ext);
        worst_cross = worst_cross.max(gap);
        let _ = write!(detail, "{name} {gap:.4} ");
    }

    // Reciprocal law for the extension's own super-level bodies, checked
    // with the spatial kernel on the coarsened region.
    let sol = solve_extension(&d, &ExtensionParams::default()).unwrap();
    let cap0 = sol.capacity_estimate();
    let mut worst_law = 0.0_f64;
    for r in [0.3, 0.5, 0.7] {
        let lq = extension_level_body(&sol, r).unwrap();
        let eq = solve_equilibrium(&lq, &KernelSpec::newtonian3()).unwrap();
        let dev = (eq.capacity_mass() * r / cap0 - 1.0).abs();
        worst_law = worst_law.max(dev);
        let _ = write!(detail, "level {r}: {dev:.4} ");
    }

    let ok = worst_cross <= 0.03 && worst_law <= 0.03;
    let _ = write!(detail, "(all <= 0.03)");
    conclude(8, ok, t0.elapsed(), Duration::from_secs(1200), &detail);
}

#[test]
fn criterion_09_level_set_geometry() {
    let t0 = Instant::now();
    let g = grid2();
    let spec = KernelSpec::half_fractional(2).unwrap();
    let levels = [0.2, 0.3, 0.5];
    let probe_n = 201;

    let mut worst_score = f64::INFINITY;
    let mut nested = true;
    for body in [disk(&g), square(&g)] {
        let q = Quadrature::rasterize(&body, 0.05, CellWeighting::Occupancy).unwrap();
        let sol = solve_equilibrium(&q, &spec).unwrap();
        let mut extracted = Vec::new();
        for &t in &levels {
            let lvl = level_set_extract(&sol, t, probe_n, body.grid()).unwrap();
            worst_score = worst_score.min(lvl.convexity_score);
            extracted.push(lvl);
        }
        for w in extracted.windows(2) {
            // Deeper levels sit strictly inside shallower ones.
            nested &= w[1].body.is_subset(&w[0].body).unwrap();
        }
    }

    let homo = homothetic_levels_experiment(&disk(&g), 0.05, 0.1, 0.05).unwrap();
    let relation_ok = homo.homothetic && (homo.relation - 1.0).abs() <= 0.02;

    let triple = three_levels_experiment(&disk(&g), 0.5, 0.25, 0.5, 0.04).unwrap();
    let margin_ok = triple.margin_rel >= -0.02;

    let ok = worst_score >= 0.98 && nested && relation_ok && margin_ok;
    let detail = format!(
        "worst convexity score {worst_score:.4} (>=0.98), nesting {nested}, \
         disk levels rho {:.4} with (r/s) rho^(n-1) = {:.4} (1 +- 0.02), \
         inclusion margin {:.4} at t = {:.4} (>= -0.02)",
        homo.fit.rho, homo.relation, triple.margin_rel, triple.t
    );
    conclude(9, ok, t0.elapsed(), Duration::from_secs(600), &detail);
}

#[test]
fn criterion_10_determinism_and_small_system_oracle() {
    let t0 = Instant::now();

    // Byte-identical reruns through the real binary.
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("disk.body"),
        "type = ball\ncenter = 0, 0\nradius = 1\n",
    )
    .unwrap();
    let args = [
        "capacity",
        "--body",
        "disk.body",
        "--cell-size",
        "0.1",
        "--out",
        "run",
        "--no-timestamp",
    ];
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_rieszcap"))
            .current_dir(tmp.path())
            .args(args)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{out:?}");
        let mut files = Vec::new();
        for entry in std::fs::read_dir(tmp.path().join("run")).unwrap() {
            let path = entry.unwrap().path();
            files.push((path.clone(), std::fs::read(&path).unwrap()));
        }
        files.sort();
        (out.stdout, files)
    };
    let first = run();
    let second = run();
    let identical = first == second;

    // Conjugate gradients against direct elimination on a tiny system.
    let nodes = vec![
        pt2(0.0, 0.0),
        pt2(1.0, 0.1),
        pt2(-0.3, 0.9),
        pt2(0.4, -0.8),
        pt2(-0.9, -0.4),
    ];
    let weights = vec![0.2, 0.3, 0.25, 0.15, 0.1];
    let q = Quadrature::from_nodes(2, nodes, weights, 0.5).unwrap();
    let kernel = assemble_kernel(&q, &KernelSpec::half_fractional(2).unwrap()).unwrap();
    let n = kernel.n();
    let b = vec![1.0; n];
    let (x_cg, _) = solve_pcg(&kernel, &b, 1e-14, 1000).unwrap();

    // Partial-pivot elimination, written out since the system is 5 by 5.
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| kernel.get(i, j)).collect();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        for row in col + 1..n {
            let f = aug[row][col] / aug[col][col];
            for k in col..=n {
                aug[row][k] -= f * aug[col][k];
            }
        }
    }
    let mut x_el = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = aug[i][n];
        for j in i + 1..n {
            v -= aug[i][j] * x_el[j];
        }
        x_el[i] = v / aug[i][i];
    }

    let scale = x_el.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let diff = x_cg
        .iter()
        .zip(&x_el)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
        / scale;

    let ok = identical && diff <= 1e-10;
    let detail = format!(
        "reruns byte-identical: {identical}; CG vs elimination on {n} nodes: {diff:.2e} (<=1e-10)"
    );
    conclude(10, ok, t0.elapsed(), Duration::from_secs(1), &detail);
}
