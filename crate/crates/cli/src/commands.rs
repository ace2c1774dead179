//! The `compute`, `verify`, `bench` and `repro` subcommands.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hlmax_core::io::{fmt_real, write_field, write_function, write_vector_field};
use hlmax_core::verify::{
    self, ball_mask, check_avg_upper_bound, check_decay_bound, check_splitting, splitting_radius, AeParams,
    BatteryParams, ConvergenceReport, InequalityReport, TranslateParams, WeakContinuityParams, WeakGlobalParams,
    WeakLocalParams,
};
use hlmax_core::{
    bilinear_maximal_with, gradient, hl_maximal_with, hl_values, hl_values_at, local_maximal_with, AveragingPath,
    MaximalField, Profile, RadiusGrid, SampledFunction, UniformGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::catalog::FunctionSpec;
use crate::config::{Operator, RunConfig};
use crate::error::CliError;
use crate::json;

/// Every suite accepted by `verify`, in the order `all` runs them.
pub const SUITES: [&str; 11] = [
    "gradient-bound",
    "line-bound",
    "derivative-formula",
    "decay-bound",
    "ae-counterexample",
    "weak-local",
    "weak-global",
    "avg-upper-bound",
    "splitting",
    "translate-sequence",
    "weak-continuity",
];

/// Identifiers accepted by `repro`.
pub const REPRO_IDS: [&str; 5] = [
    "example-5-1",
    "example-6-local",
    "example-6-global",
    "theorem-9",
    "noncompact",
];

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn catalog(spec: &FunctionSpec) -> Result<Profile, CliError> {
    match spec {
        FunctionSpec::Catalog(p) => Ok(p.clone()),
        FunctionSpec::Csv(_) => Err(CliError::Usage(
            "this suite needs a catalog function, not a CSV file".into(),
        )),
    }
}

/// Writes the input(s), the maximal field and its gradient to the output directory.
pub fn cmd_compute(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    create_dir(&cfg.out)?;
    let default_grid = cfg.grid()?;
    let f = cfg.f.load(&default_grid)?;
    let grid = f.grid().clone();
    let radii = cfg.radius_grid(&grid)?;
    let mut written = vec![cfg.out.join("input_f.csv")];
    write_function(&f, create(&written[0])?)?;
    let field: MaximalField = match cfg.operator {
        Operator::Hl => hl_maximal_with(&f, &radii, AveragingPath::Prefix, cfg.good_radii_tol)?,
        Operator::Local => {
            let mask = ball_mask(&grid, &[0.0, 0.0], cfg.domain_radius, false);
            local_maximal_with(&f, &mask, &radii, cfg.good_radii_tol)?
        }
        Operator::Bilinear => {
            let g = cfg.g.load(&grid)?;
            let path = cfg.out.join("input_g.csv");
            write_function(&g, create(&path)?)?;
            written.push(path);
            bilinear_maximal_with(&f, &g, cfg.alpha, &radii, cfg.good_radii_tol)?
        }
    };
    if field.boundary_flag_count() > 0 {
        eprintln!(
            "note: {} nodes attain their maximum at the largest radius {}",
            field.boundary_flag_count(),
            fmt_real(radii.max())
        );
    }
    let path = cfg.out.join("maximal.csv");
    write_field(&field, create(&path)?)?;
    written.push(path);
    let path = cfg.out.join("gradient.csv");
    write_vector_field(&gradient(&field.to_function()), create(&path)?)?;
    written.push(path);
    Ok(written)
}

fn battery(cfg: &RunConfig) -> Result<BatteryParams, CliError> {
    let d = BatteryParams::default();
    Ok(BatteryParams {
        fixed: vec![(catalog(&cfg.f)?, catalog(&cfg.g)?)],
        count: cfg.battery_count,
        seed: cfg.seed,
        h: cfg.h.unwrap_or(d.h),
        half_width: cfg.hull.1.max(-cfg.hull.0),
        alpha: cfg.alpha,
        radii_max: cfg.radii_max.unwrap_or(d.radii_max),
        radii_count: cfg.radii_count.unwrap_or(d.radii_count),
        tol_factor: cfg.tol_factor,
        refine: true,
        exclude_switching: cfg.exclude_switching,
    })
}

fn decay_suite(cfg: &RunConfig) -> Result<InequalityReport, CliError> {
    let grid = UniformGrid::interval(-4.0, 4.0, cfg.spacing())?;
    let chi = Profile::indicator(0.0, 1.0).sample(&grid)?;
    let radii = RadiusGrid::spanning(&grid, false)?;
    let points: Vec<usize> = (0..grid.len())
        .filter(|&i| (1.0 - 1e-9..=4.0 + 1e-9).contains(&grid.node(i)[0]))
        .collect();
    Ok(check_decay_bound(
        &chi,
        &points,
        &radii,
        cfg.tol_factor * grid.spacing(),
    )?)
}

fn avg_suite(cfg: &RunConfig) -> Result<InequalityReport, CliError> {
    let f = cfg.f.load(&cfg.grid()?)?;
    let tol = cfg.tol_factor * f.grid().spacing();
    Ok(check_avg_upper_bound(&f, cfg.p, &cfg.avg_radii, tol)?)
}

fn splitting_suite(cfg: &RunConfig) -> Result<InequalityReport, CliError> {
    let w = cfg.splitting_half_width;
    let grid = UniformGrid::interval(-w, w, cfg.spacing())?;
    let u = catalog(&cfg.f)?.sample(&grid)?;
    let radii = RadiusGrid::spanning(&grid, false)?;
    let r_m = splitting_radius(&u, cfg.splitting_m, &radii)?.ok_or_else(|| {
        CliError::Usage(format!(
            "no radius brings every ball average below 1/{}",
            cfg.splitting_m
        ))
    })?;
    Ok(check_splitting(
        &u,
        cfg.splitting_l,
        r_m,
        cfg.splitting_m,
        &radii,
        cfg.tol_factor * grid.spacing(),
    )?
    .with_parameter("half_width", w))
}

fn ae_params(cfg: &RunConfig) -> AeParams {
    let d = AeParams::default();
    AeParams {
        h: cfg.h.unwrap_or(d.h),
        k_list: cfg.ae_k_list.clone().unwrap_or(d.k_list),
        ..d
    }
}

fn weak_local_params(cfg: &RunConfig) -> WeakLocalParams {
    let d = WeakLocalParams::default();
    WeakLocalParams {
        h: cfg.h.unwrap_or(d.h),
        n_list: cfg.weak_local_n_list.clone().unwrap_or(d.n_list),
        ..d
    }
}

fn weak_global_params(cfg: &RunConfig) -> WeakGlobalParams {
    let d = WeakGlobalParams::default();
    WeakGlobalParams {
        h: cfg.h.unwrap_or(d.h),
        n_list: cfg.weak_global_n_list.clone().unwrap_or(d.n_list),
        ..d
    }
}

fn translate_params(cfg: &RunConfig) -> TranslateParams {
    let d = TranslateParams::default();
    TranslateParams {
        h: cfg.h.unwrap_or(d.h),
        k_list: cfg.translate_k_list.clone().unwrap_or(d.k_list),
        p: cfg.p,
        ..d
    }
}

fn weak_continuity_params(cfg: &RunConfig) -> WeakContinuityParams {
    let d = WeakContinuityParams::default();
    WeakContinuityParams {
        h: cfg.h.unwrap_or(d.h),
        n_list: cfg.weak_continuity_n_list.clone().unwrap_or(d.n_list),
        ..d
    }
}

/// Outcome of one suite inside `verify`.
pub struct SuiteOutcome {
    pub name: String,
    pub document: Value,
    pub passed: bool,
    pub error: Option<CliError>,
}

fn inequality(r: InequalityReport, per_point: bool) -> (Value, bool) {
    (r.document(per_point), r.passed())
}

fn convergence(r: ConvergenceReport) -> (Value, bool) {
    (r.document(), r.passed())
}

/// Runs one named suite.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<(Value, bool), CliError> {
    let pp = cfg.per_point;
    let mut b = battery(cfg);
    Ok(match name {
        "gradient-bound" => inequality(verify::run_gradient_battery(&b?)?, pp),
        "line-bound" => {
            b = b.map(|b| BatteryParams { refine: false, ..b });
            inequality(verify::run_line_battery(&b?)?, pp)
        }
        "derivative-formula" => {
            b = b.map(|b| BatteryParams {
                refine: false,
                tol_factor: cfg.derivative_tol_factor,
                ..b
            });
            inequality(verify::run_derivative_battery(&b?)?, pp)
        }
        "decay-bound" => inequality(decay_suite(cfg)?, pp),
        "avg-upper-bound" => inequality(avg_suite(cfg)?, pp),
        "splitting" => inequality(splitting_suite(cfg)?, pp),
        "ae-counterexample" => convergence(verify::run_ae_counterexample(&ae_params(cfg))?),
        "weak-local" => convergence(verify::run_weak_counterexample_local(&weak_local_params(cfg))?),
        "weak-global" => convergence(verify::run_weak_counterexample_global(&weak_global_params(cfg))?),
        "translate-sequence" => convergence(verify::run_translate_sequence(&translate_params(cfg))?),
        "weak-continuity" => convergence(verify::run_weak_continuity_demo(&weak_continuity_params(cfg))?),
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite {other:?}; known: {}",
                SUITES.join(", ")
            )))
        }
    })
}

/// Expands `all` and rejects unknown names before any work starts.
pub fn resolve_suites(names: &[String]) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(SUITES.iter().map(|s| s.to_string()));
        } else if SUITES.contains(&n.as_str()) {
            out.push(n.clone());
        } else {
            return Err(CliError::Usage(format!(
                "unknown suite {n:?}; known: all, {}",
                SUITES.join(", ")
            )));
        }
    }
    Ok(out)
}

/// Runs the selected suites; returns the JSON document and the exit status.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(Vec<u8>, i32), CliError> {
    let suites = resolve_suites(&cfg.suites)?;
    let mut outcomes = Vec::with_capacity(suites.len());
    for name in &suites {
        let started = Instant::now();
        let outcome = match run_suite(name, cfg) {
            Ok((document, passed)) => SuiteOutcome {
                name: name.clone(),
                document,
                passed,
                error: None,
            },
            Err(e) => SuiteOutcome {
                name: name.clone(),
                document: json!({
                    "name": name,
                    "error": e.to_string(),
                    "summary": {"violations": Value::Null, "worst": Value::Null, "verdict": "error"},
                }),
                passed: false,
                error: Some(e),
            },
        };
        let verdict = outcome.document["summary"]["verdict"]
            .as_str()
            .unwrap_or("error")
            .to_owned();
        eprintln!("{name}: {verdict} ({:.1}s)", started.elapsed().as_secs_f64());
        outcomes.push(outcome);
    }
    let code = exit_status(&outcomes);
    let verdict = match code {
        0 => "pass",
        crate::EXIT_FAILURE => "fail",
        _ => "error",
    };
    let doc = json!({
        "config": cfg.echo(),
        "suites": outcomes.iter().map(|o| o.document.clone()).collect::<Vec<_>>(),
        "summary": {
            "suites": outcomes.len(),
            "passed": outcomes.iter().filter(|o| o.passed).count(),
            "verdict": verdict,
        },
    });
    let bytes = json::to_bytes(&doc).map_err(|e| CliError::Failed(e.to_string()))?;
    create_dir(&cfg.out)?;
    fs::write(cfg.out.join("verify.json"), &bytes)?;
    Ok((bytes, code))
}

/// Resolution errors dominate, then usage errors, then failed suites.
fn exit_status(outcomes: &[SuiteOutcome]) -> i32 {
    let codes: Vec<i32> = outcomes
        .iter()
        .filter_map(|o| o.error.as_ref().map(CliError::exit_code))
        .collect();
    if codes.contains(&crate::EXIT_RESOLUTION) {
        crate::EXIT_RESOLUTION
    } else if codes.contains(&crate::EXIT_USAGE) {
        crate::EXIT_USAGE
    } else if outcomes.iter().any(|o| !o.passed) {
        crate::EXIT_FAILURE
    } else {
        0
    }
}

/// One row of `bench.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub j: usize,
    pub t_naive: f64,
    pub t_fast: f64,
    pub max_abs_diff: f64,
}

/// Times both averaging paths on seeded random data with radii `h, 2h, ..., J h`.
///
/// With `naive_stride > 1` the naive path runs on every `stride`-th node and its
/// time is scaled by the stride; the difference is taken on those nodes.
pub fn bench_case(dim: usize, side: usize, j: usize, stride: usize, seed: u64) -> Result<BenchRow, CliError> {
    let counts = vec![side; dim];
    let origin = vec![0.0; dim];
    let grid = UniformGrid::new(dim, &origin, 1.0, &counts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = SampledFunction::new(grid.clone(), values)?;
    let radii = RadiusGrid::multiples_of(1.0, j, false)?;
    let started = Instant::now();
    let fast = hl_values(&f, &radii, AveragingPath::Prefix)?;
    let t_fast = started.elapsed().as_secs_f64();
    let nodes: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let started = Instant::now();
    let naive = hl_values_at(&f, &radii, AveragingPath::Naive, &nodes)?;
    let t_naive = started.elapsed().as_secs_f64() * grid.len() as f64 / nodes.len() as f64;
    let max_abs_diff = nodes
        .iter()
        .zip(&naive)
        .map(|(&i, v)| (fast[i] - v).abs())
        .fold(0.0f64, f64::max);
    Ok(BenchRow {
        n: grid.len(),
        j,
        t_naive,
        t_fast,
        max_abs_diff,
    })
}

/// Largest disagreement tolerated between the two paths.
pub const BENCH_AGREEMENT: f64 = 1e-10;

pub fn cmd_bench(cfg: &RunConfig) -> Result<(Vec<BenchRow>, i32), CliError> {
    if cfg.bench_dim != 1 && cfg.bench_dim != 2 {
        return Err(CliError::Usage("bench.dim must be 1 or 2".into()));
    }
    create_dir(&cfg.out)?;
    let mut rows = Vec::new();
    for &side in &cfg.bench_sizes {
        for &j in &cfg.bench_radii {
            let row = bench_case(cfg.bench_dim, side, j, cfg.bench_naive_stride, cfg.seed)?;
            eprintln!(
                "N = {}, J = {}: naive {:.3}s, fast {:.3}s, max diff {:.1e}",
                row.n, row.j, row.t_naive, row.t_fast, row.max_abs_diff
            );
            rows.push(row);
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(&cfg.out.join("bench.csv"))?);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["N", "J", "t_naive", "t_fast", "max_abs_diff"])
        .map_err(io)?;
    for r in &rows {
        w.write_record([
            r.n.to_string(),
            r.j.to_string(),
            fmt_real(r.t_naive),
            fmt_real(r.t_fast),
            fmt_real(r.max_abs_diff),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    let code = if rows.iter().all(|r| r.max_abs_diff <= BENCH_AGREEMENT) {
        0
    } else {
        crate::EXIT_FAILURE
    };
    Ok((rows, code))
}

/// Runs the experiment behind a repro id and keeps its plot-ready columns.
pub fn repro_report(id: &str, cfg: &RunConfig) -> Result<ConvergenceReport, CliError> {
    let r = match id {
        "example-5-1" => {
            let p = ae_params(cfg);
            let x = p.probes[0];
            let full = verify::run_ae_counterexample(&p)?;
            let (a, b, c) = (format!("u_k({x})"), format!("M(u_k)({x})"), format!("floor({x})"));
            full.select(&[&a, &b], &[&c])?
        }
        "example-6-local" => verify::run_weak_counterexample_local(&weak_local_params(cfg))?
            .select(&["<u_n,1>", "<1,M_Omega(u_n)>", "lower_bound"], &["2/pi"])?,
        "example-6-global" => verify::run_weak_counterexample_global(&weak_global_params(cfg))?
            .select(&["<u_n,w>", "<M(u_n),w>", "lower_bound"], &["floor"])?,
        "theorem-9" => {
            verify::run_translate_sequence(&translate_params(cfg))?.select(&["<u_k,phi>", "M(u_k)(0)"], &[])?
        }
        "noncompact" => {
            verify::run_translate_sequence(&translate_params(cfg))?.select(&["separation"], &["separation_floor"])?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown example {other:?}; known: {}",
                REPRO_IDS.join(", ")
            )))
        }
    };
    Ok(r)
}

pub fn cmd_repro(id: &str, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let report = repro_report(id, cfg)?;
    create_dir(&cfg.out)?;
    let path = cfg.out.join(format!("{id}.csv"));
    report.write_csv(create(&path)?)?;
    Ok(path)
}
