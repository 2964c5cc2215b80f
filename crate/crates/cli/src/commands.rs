//! One handler per subcommand.  Each handler runs the experiment, writes
//! its data files under the output directory, prints a short summary, and
//! returns the results blob for `report.json` together with the exit code:
//! 0 for a clean run, 2 when the run itself succeeded but the numbers show
//! a genuine finding (a violated inequality, a broken level-set property).

use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use rieszcap::analysis::{
    body_concavity_experiment, equality_probe_from, homothetic_levels_experiment,
    level_scaling_experiment, level_set_extract, three_levels_experiment, BmClass,
    ConcavityParams, EqualityClass, EqualityProbe, ExtractedLevel,
};
use rieszcap::extension::{extension_level_body, solve_extension, ExtensionParams};
use rieszcap::geometry::parse_body_file;
use rieszcap::solver::{
    capacity_with, extrapolate_values, solve_equilibrium_with, CapacityEstimate, CapacityParams,
    Extrapolation,
};
use rieszcap::{ConvexBody, DirectionGrid, KernelSpec, Point, Quadrature};

use crate::config::{
    BmConfig, CapacityConfig, ConcavityConfig, ConvergenceConfig, ExtensionConfig, Globals,
    KernelChoice, LevelsetsConfig,
};
use crate::report::{write_csv, write_dat, Cell};
use crate::CliError;

/// Probe lattice used when this layer extracts level sets itself; matches
/// the resolution the analysis experiments use internally.
const PROBE_N: usize = 201;

fn read_body_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Dimension implied by the first `dim`, `center` or `vertices` line; the
/// parser re-checks consistency against the full file.
fn sniff_dim(path: &Path, text: &str) -> Result<usize, CliError> {
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "dim" => {
                return value.parse::<usize>().map_err(|_| {
                    CliError::Config(format!("{}: bad dim `{value}`", path.display()))
                })
            }
            "center" => return Ok(value.split(',').count()),
            "vertices" => {
                let first = value.split(';').next().unwrap_or("");
                return Ok(first.split(',').count());
            }
            _ => {}
        }
    }
    Err(CliError::Config(format!(
        "{}: cannot infer dimension (no dim, center or vertices line)",
        path.display()
    )))
}

fn load_body(path: &Path, directions: usize) -> Result<ConvexBody, CliError> {
    let text = read_body_text(path)?;
    let dim = sniff_dim(path, &text)?;
    let grid = Arc::new(DirectionGrid::uniform(dim, directions)?);
    Ok(parse_body_file(&text, &grid)?)
}

/// Two bodies on one shared grid, as the combination experiments require.
fn load_pair(
    path1: &Path,
    path2: &Path,
    directions: usize,
) -> Result<(ConvexBody, ConvexBody), CliError> {
    let text1 = read_body_text(path1)?;
    let text2 = read_body_text(path2)?;
    let dim1 = sniff_dim(path1, &text1)?;
    let dim2 = sniff_dim(path2, &text2)?;
    if dim1 != dim2 {
        return Err(CliError::Config(format!(
            "bodies have different dimensions ({dim1} vs {dim2})"
        )));
    }
    let grid = Arc::new(DirectionGrid::uniform(dim1, directions)?);
    let a = parse_body_file(&text1, &grid)?;
    let b = parse_body_file(&text2, &grid)?;
    Ok((a, b))
}

fn kernel_for(body: &ConvexBody, choice: &KernelChoice) -> Result<KernelSpec, CliError> {
    match choice {
        KernelChoice::HalfFractional => Ok(KernelSpec::half_fractional(body.dim())?),
        KernelChoice::Newtonian => {
            if body.dim() != 3 {
                return Err(CliError::Config(
                    "kernel: newtonian needs a three-dimensional body".into(),
                ));
            }
            Ok(KernelSpec::newtonian3())
        }
    }
}

#[derive(Serialize)]
struct EstimateRow<'a> {
    #[serde(flatten)]
    estimate: &'a CapacityEstimate,
}

fn estimate_cells(est: &CapacityEstimate) -> Vec<Cell> {
    vec![
        est.cell_size.into(),
        est.mass.into(),
        est.asymptotic.into(),
        est.discrepancy.into(),
        est.nodes.into(),
        est.cg_iterations.into(),
        est.residual_max.into(),
        est.negative_mass_fraction.into(),
    ]
}

const ESTIMATE_COLUMNS: [&str; 8] = [
    "cell_size",
    "mass",
    "asymptotic",
    "discrepancy",
    "nodes",
    "cg_iterations",
    "residual_max",
    "negative_mass_fraction",
];

/// Mean potential over rings about the charge centroid, tabulated as
/// `r, u, u r^s`; the last column flattens to the capacity far out.
fn radial_profile(
    body: &ConvexBody,
    cell_size: f64,
    spec: &KernelSpec,
    params: &CapacityParams,
) -> Result<Vec<Vec<f64>>, CliError> {
    let q = Quadrature::rasterize(body, cell_size, params.weighting)?;
    let sol = solve_equilibrium_with(&q, spec, &params.solve)?;
    let center = sol.charge_centroid();
    let base = body.outer_radius_about(center).max(cell_size);

    let dirs = body.grid().dirs();
    let stride = (dirs.len() / 64).max(1);
    let sample: Vec<Point> = dirs.iter().step_by(stride).copied().collect();

    let n_radii = 24;
    let (lo, hi) = (2.0_f64, 40.0_f64);
    let mut rows = Vec::with_capacity(n_radii);
    for k in 0..n_radii {
        let t = k as f64 / (n_radii - 1) as f64;
        let r = base * lo * (hi / lo).powf(t);
        let mut mean = 0.0;
        for d in &sample {
            let p = [
                center[0] + r * d[0],
                center[1] + r * d[1],
                center[2] + r * d[2],
            ];
            mean += rieszcap::solver::eval_potential_at(&sol, p);
        }
        mean /= sample.len() as f64;
        rows.push(vec![r, mean, mean * r.powf(spec.s())]);
    }
    Ok(rows)
}

pub fn cmd_capacity(globals: &Globals, cfg: &CapacityConfig) -> Result<(Value, i32), CliError> {
    let body = load_body(&cfg.body, globals.directions)?;
    let spec = kernel_for(&body, &cfg.kernel)?;
    let params = CapacityParams::default();

    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    let mut extrapolation: Option<Extrapolation> = None;

    match &cfg.ladder {
        Some(ladder) => {
            for &h in ladder {
                let est = capacity_with(&body, h, &spec, &params)?;
                rows.push(estimate_cells(&est));
                estimates.push(est);
            }
            let cells: Vec<f64> = estimates.iter().map(|e| e.cell_size).collect();
            let masses: Vec<f64> = estimates.iter().map(|e| e.mass).collect();
            extrapolation = Some(extrapolate_values(&cells, &masses)?);
        }
        None => {
            let est = capacity_with(&body, cfg.cell_size, &spec, &params)?;
            rows.push(estimate_cells(&est));
            estimates.push(est);
        }
    }
    write_csv(&globals.out, "capacity.csv", &ESTIMATE_COLUMNS, &rows)?;

    let finest = estimates.last().expect("at least one estimate");
    let radial = radial_profile(&body, finest.cell_size, &spec, &params)?;
    write_dat(&globals.out, "radial.dat", &["r", "u", "u_r_s"], &radial)?;

    println!(
        "capacity: mass {} asymptotic {} discrepancy {} ({} nodes at h = {})",
        finest.mass, finest.asymptotic, finest.discrepancy, finest.nodes, finest.cell_size
    );
    if let Some(ex) = &extrapolation {
        println!(
            "capacity: extrapolated {} +- {} over {} grids",
            ex.extrapolated,
            ex.error_bar,
            estimates.len()
        );
    }

    let results = json!({
        "estimates": estimates.iter().map(|e| EstimateRow { estimate: e }).collect::<Vec<_>>(),
        "extrapolation": extrapolation,
        "kernel": { "dim": spec.dim(), "s": spec.s() },
    });
    Ok((results, 0))
}

pub fn cmd_convergence(
    globals: &Globals,
    cfg: &ConvergenceConfig,
) -> Result<(Value, i32), CliError> {
    let body = load_body(&cfg.body, globals.directions)?;
    let spec = KernelSpec::half_fractional(body.dim())?;
    let params = CapacityParams::default();

    let mut estimates = Vec::new();
    let mut rows = Vec::new();
    for &h in &cfg.ladder {
        let est = capacity_with(&body, h, &spec, &params)?;
        rows.push(estimate_cells(&est));
        estimates.push(est);
    }
    let cells: Vec<f64> = estimates.iter().map(|e| e.cell_size).collect();
    let masses: Vec<f64> = estimates.iter().map(|e| e.mass).collect();
    let ex = extrapolate_values(&cells, &masses)?;

    let finest = *masses.last().expect("ladder is nonempty");
    let stability_rel = if ex.extrapolated.abs() > 0.0 {
        (ex.extrapolated - finest).abs() / ex.extrapolated.abs()
    } else {
        f64::INFINITY
    };

    write_csv(&globals.out, "convergence.csv", &ESTIMATE_COLUMNS, &rows)?;
    let dat: Vec<Vec<f64>> = estimates
        .iter()
        .map(|e| {
            vec![
                e.cell_size,
                e.mass,
                (e.mass - ex.extrapolated).abs(),
            ]
        })
        .collect();
    write_dat(
        &globals.out,
        "convergence.dat",
        &["cell_size", "mass", "abs_err_vs_extrapolated"],
        &dat,
    )?;

    match ex.order {
        Some(p) => println!(
            "convergence: extrapolated {} +- {} (order {}), stability {}",
            ex.extrapolated, ex.error_bar, p, stability_rel
        ),
        None => println!(
            "convergence: extrapolated {} +- {} (no stable order), stability {}",
            ex.extrapolated, ex.error_bar, stability_rel
        ),
    }

    let results = json!({
        "rows": estimates.iter().map(|e| EstimateRow { estimate: e }).collect::<Vec<_>>(),
        "extrapolation": ex,
        "stability_rel": stability_rel,
    });
    Ok((results, 0))
}

fn class_label(class: BmClass) -> &'static str {
    match class {
        BmClass::Satisfied => "satisfied",
        BmClass::NearEquality => "near-equality",
        BmClass::Violated => "violated",
    }
}

pub fn cmd_bm(globals: &Globals, cfg: &BmConfig) -> Result<(Value, i32), CliError> {
    let (a, b) = load_pair(&cfg.body1, &cfg.body2, globals.directions)?;
    let report = rieszcap::analysis::bm_sweep(&a, &b, &cfg.lambdas, cfg.cell_size)?;

    let rows: Vec<Vec<Cell>> = report
        .points
        .iter()
        .map(|p| {
            vec![
                p.lambda.into(),
                p.capacity.into(),
                p.capacity_bar.into(),
                p.deficit.into(),
                p.bar.into(),
                class_label(p.class).into(),
            ]
        })
        .collect();
    write_csv(
        &globals.out,
        "bm.csv",
        &["lambda", "capacity", "capacity_bar", "deficit", "bar", "class"],
        &rows,
    )?;
    let dat: Vec<Vec<f64>> = report
        .points
        .iter()
        .map(|p| vec![p.lambda, p.deficit, p.bar])
        .collect();
    write_dat(&globals.out, "deficit.dat", &["lambda", "deficit", "bar"], &dat)?;

    // The lambda = 1/2 point doubles as the equality-case probe: for a
    // homothetic pair the deficit must vanish within its bar.
    let probe: Option<EqualityProbe> = report
        .points
        .iter()
        .find(|p| (p.lambda - 0.5).abs() < 1e-12)
        .map(|p| equality_probe_from(&report.homothety, p));

    let violated = report
        .points
        .iter()
        .filter(|p| p.class == BmClass::Violated)
        .count();
    let tension = matches!(
        probe.as_ref().map(|p| p.class),
        Some(EqualityClass::Tension)
    );

    for p in &report.points {
        println!(
            "bm: lambda {} deficit {} +- {} [{}]",
            p.lambda,
            p.deficit,
            p.bar,
            class_label(p.class)
        );
    }
    if let Some(pr) = &probe {
        println!(
            "bm: equality probe {} ({})",
            match pr.class {
                EqualityClass::Consistent => "consistent",
                EqualityClass::Tension => "tension",
            },
            pr.note
        );
    }

    let code = if violated > 0 || tension {
        println!("finding: VIOLATED at {violated} points, equality tension {tension}");
        2
    } else {
        0
    };

    let results = json!({ "sweep": report, "equality_probe": probe });
    Ok((results, code))
}

pub fn cmd_concavity(globals: &Globals, cfg: &ConcavityConfig) -> Result<(Value, i32), CliError> {
    let body = load_body(&cfg.body, globals.directions)?;
    let params = ConcavityParams {
        bracket: cfg.bracket,
        segments: cfg.segments,
        seed: globals.seed,
        ..ConcavityParams::default()
    };
    let report = body_concavity_experiment(&body, cfg.cell_size, cfg.shell, &params)?;

    let rows: Vec<Vec<Cell>> = report
        .concavity
        .probes
        .iter()
        .map(|p| {
            vec![
                p.beta.into(),
                if p.accepted { "accepted" } else { "rejected" }.into(),
                p.worst_violation.into(),
                p.worst_at[0].into(),
                p.worst_at[1].into(),
            ]
        })
        .collect();
    write_csv(
        &globals.out,
        "concavity.csv",
        &["beta", "decision", "worst_violation", "worst_x", "worst_y"],
        &rows,
    )?;

    let c = &report.concavity;
    println!(
        "concavity: alpha {} (bracket {}..{}, {} segments on shell {}..{})",
        c.alpha, c.bracket.0, c.bracket.1, c.segments, report.shell.0, report.shell.1
    );
    if let (Some(ceiling), Some(gap)) = (c.ceiling, c.gap) {
        println!("concavity: ceiling {ceiling}, gap {gap}");
    }

    let results = serde_json::to_value(&report)
        .map_err(|e| CliError::Config(format!("result serialization failed: {e}")))?;
    Ok((results, 0))
}

#[derive(Serialize)]
struct NestingStep {
    t_inner: f64,
    t_outer: f64,
    nested: bool,
}

pub fn cmd_levelsets(globals: &Globals, cfg: &LevelsetsConfig) -> Result<(Value, i32), CliError> {
    let body = load_body(&cfg.body, globals.directions)?;
    if body.dim() != 2 {
        return Err(CliError::Config(
            "levelsets: the level-set experiments are planar".into(),
        ));
    }
    let mut levels = cfg.levels.clone();
    levels.sort_by(|x, y| x.partial_cmp(y).expect("levels validated finite"));
    levels.dedup();

    let spec = KernelSpec::half_fractional(body.dim())?;
    let params = CapacityParams::default();
    let q = Quadrature::rasterize(&body, cfg.cell_size, params.weighting)?;
    let sol = solve_equilibrium_with(&q, &spec, &params.solve)?;

    let mut extracted: Vec<ExtractedLevel> = Vec::with_capacity(levels.len());
    for &t in &levels {
        extracted.push(level_set_extract(&sol, t, PROBE_N, body.grid())?);
    }

    // Higher levels are deeper in the potential well, so each level body
    // must sit inside every lower one; adjacent checks give the chain.
    let mut nesting = Vec::new();
    for w in extracted.windows(2) {
        let nested = w[1].body.is_subset(&w[0].body)?;
        nesting.push(NestingStep {
            t_inner: w[1].level,
            t_outer: w[0].level,
            nested,
        });
    }
    let nested_all = nesting.iter().all(|s| s.nested);

    let scaling = level_scaling_experiment(&body, &levels, cfg.cell_size)?;

    let mut rows = Vec::new();
    for (lvl, row) in extracted.iter().zip(&scaling.rows) {
        rows.push(vec![
            Cell::from(lvl.level),
            row.convexity_score.into(),
            lvl.points_kept.into(),
            lvl.hull_vertices.into(),
            row.capacity.into(),
            row.capacity_bar.into(),
            row.ratio.into(),
            row.ratio_bar.into(),
        ]);
    }
    write_csv(
        &globals.out,
        "levels.csv",
        &[
            "level",
            "convexity_score",
            "points_kept",
            "hull_vertices",
            "capacity",
            "capacity_bar",
            "ratio",
            "ratio_bar",
        ],
        &rows,
    )?;
    let dat: Vec<Vec<f64>> = scaling
        .rows
        .iter()
        .map(|r| vec![r.t, r.ratio, r.ratio_bar])
        .collect();
    write_dat(&globals.out, "ratio.dat", &["t", "ratio", "ratio_bar"], &dat)?;

    let worst_score = scaling
        .rows
        .iter()
        .map(|r| r.convexity_score)
        .fold(f64::INFINITY, f64::min);

    let pair_report = match cfg.pair {
        Some((r, s)) => Some(homothetic_levels_experiment(&body, r, s, cfg.cell_size)?),
        None => None,
    };
    let triple_report = match cfg.triple {
        Some((r, s, lambda)) => Some(three_levels_experiment(&body, r, s, lambda, cfg.cell_size)?),
        None => None,
    };

    for (lvl, row) in extracted.iter().zip(&scaling.rows) {
        println!(
            "levelsets: t {} score {} capacity {} ratio {} +- {}",
            lvl.level, row.convexity_score, row.capacity, row.ratio, row.ratio_bar
        );
    }
    println!("levelsets: nesting chain {}", if nested_all { "holds" } else { "BROKEN" });
    if let Some(p) = &pair_report {
        println!(
            "levelsets: pair ({}, {}) homothetic {} rho {} relation {} +- residual {}",
            p.r, p.s, p.homothetic, p.fit.rho, p.relation, p.fit.residual_rel
        );
    }
    if let Some(t) = &triple_report {
        println!(
            "levelsets: triple ({}, {}, {}) -> t {} margin {} included {}",
            t.r, t.s, t.lambda, t.t, t.margin_rel, t.included
        );
    }

    let mut findings = Vec::new();
    if worst_score < cfg.score_floor {
        findings.push(format!(
            "convexity score {worst_score} below floor {}",
            cfg.score_floor
        ));
    }
    if !nested_all {
        findings.push("level bodies are not nested".to_string());
    }
    if let Some(p) = &pair_report {
        if !p.homothetic {
            findings.push(format!(
                "levels {} and {} are not homothetic (residual {})",
                p.r, p.s, p.fit.residual_rel
            ));
        }
    }
    if let Some(t) = &triple_report {
        if !t.included {
            findings.push(format!(
                "combination leaves level {} (margin {})",
                t.t, t.margin_rel
            ));
        }
    }
    let code = if findings.is_empty() {
        0
    } else {
        for f in &findings {
            println!("finding: {f}");
        }
        2
    };

    let results = json!({
        "levels": extracted,
        "nesting": nesting,
        "scaling": scaling,
        "pair": pair_report,
        "triple": triple_report,
        "findings": findings,
    });
    Ok((results, code))
}

pub fn cmd_extension(globals: &Globals, cfg: &ExtensionConfig) -> Result<(Value, i32), CliError> {
    let body = load_body(&cfg.body, globals.directions)?;
    let params = ExtensionParams {
        box_factor: cfg.box_factor,
        cells_per_inradius: cfg.cells,
        ..ExtensionParams::default()
    };
    let sol = solve_extension(&body, &params)?;
    let cap0 = sol.capacity_estimate();

    let fit = sol.fit();
    let rows = vec![vec![
        Cell::from(sol.grid().h()),
        cfg.cells.into(),
        cfg.box_factor.into(),
        sol.sweeps().into(),
        sol.residual().into(),
        Cell::from(cap0),
        sol.boundary_coefficient().into(),
        fit.slope.into(),
    ]];
    write_csv(
        &globals.out,
        "extension.csv",
        &[
            "h",
            "cells_per_inradius",
            "box_factor",
            "sweeps",
            "residual",
            "capacity",
            "boundary_coefficient",
            "shell_slope",
        ],
        &rows,
    )?;
    println!(
        "extension: capacity {} (boundary coefficient {}, {} sweeps, residual {})",
        cap0,
        sol.boundary_coefficient(),
        sol.sweeps(),
        sol.residual()
    );

    // Cross-check against the kernel solver on the same body.
    let compare = match cfg.compare_cell_size {
        Some(h) => {
            let spec = KernelSpec::half_fractional(body.dim())?;
            let est = capacity_with(&body, h, &spec, &CapacityParams::default())?;
            let rel_gap = (cap0 - est.mass).abs() / est.mass;
            println!(
                "extension: kernel solver gives {} at h = {h}, relative gap {}",
                est.mass, rel_gap
            );
            Some(json!({ "estimate": EstimateRow { estimate: &est }, "rel_gap": rel_gap }))
        }
        None => None,
    };

    // Level bodies of the extension obey a reciprocal capacity law; the
    // comparison solves the coarsened level region with the spatial kernel.
    let mut level_rows = Vec::new();
    let mut level_results = Vec::new();
    for &r in &cfg.levels {
        let lq = extension_level_body(&sol, r)?;
        let lsol = solve_equilibrium_with(
            &lq,
            &KernelSpec::newtonian3(),
            &rieszcap::solver::SolveOptions::default(),
        )?;
        let cap = lsol.capacity_mass();
        let expected = cap0 / r;
        let rel_dev = cap / expected - 1.0;
        println!(
            "extension: level {} capacity {} expected {} deviation {}",
            r, cap, expected, rel_dev
        );
        level_rows.push(vec![
            Cell::from(r),
            cap.into(),
            expected.into(),
            rel_dev.into(),
            lq.nodes().len().into(),
        ]);
        level_results.push(json!({
            "level": r,
            "capacity": cap,
            "expected": expected,
            "rel_dev": rel_dev,
            "nodes": lq.nodes().len(),
        }));
    }
    if !cfg.levels.is_empty() {
        write_csv(
            &globals.out,
            "extension_levels.csv",
            &["level", "capacity", "expected", "rel_dev", "nodes"],
            &level_rows,
        )?;
    }

    let results = json!({
        "h": sol.grid().h(),
        "sweeps": sol.sweeps(),
        "residual": sol.residual(),
        "capacity": cap0,
        "boundary_coefficient": sol.boundary_coefficient(),
        "shell_fit": fit,
        "kernel_comparison": compare,
        "levels": level_results,
    });
    Ok((results, 0))
}
