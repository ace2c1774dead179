//! Acceptance checks, one line per criterion. Exits non-zero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use hlmax_cli::commands::bench_case;
use hlmax_core::verify::{
    self, check_decay_bound, AeParams, BatteryParams, TranslateParams, WeakContinuityParams, WeakGlobalParams,
    WeakLocalParams,
};
use hlmax_core::{
    bilinear_maximal, hl_maximal, hl_maximal_naive, local_maximal, lp_norm, Profile, RadiusGrid, SampledFunction,
    UniformGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Closed-form and property tolerances are multiples of the grid spacing or relative bounds.
const CLOSED_FORM_FACTOR: f64 = 5.0;
const ALGEBRA_REL: f64 = 1e-12;
const PATH_ABS: f64 = 1e-10;
const SPEEDUP: f64 = 10.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn gradient_bound() -> Outcome {
    let p = BatteryParams::default();
    let started = Instant::now();
    let r = verify::run_gradient_battery(&p).map_err(err)?;
    let refined = r
        .requirements
        .iter()
        .find(|q| q.name == "refined_worst_violation")
        .ok_or("missing refinement")?;
    ensure(
        p.count >= 20 && r.violation_count == 0 && refined.holds(),
        format!(
            "{} pairs, violations {}, worst {:.3e} at h, {:.3e} at h/2, tol {:.3e}, {:.1}s",
            p.count + p.fixed.len(),
            r.violation_count,
            r.worst_violation,
            refined.value,
            r.tolerance_used,
            started.elapsed().as_secs_f64()
        ),
    )
}

fn derivative_formula() -> Outcome {
    let p = BatteryParams {
        tol_factor: 20.0,
        refine: false,
        ..BatteryParams::default()
    };
    let r = verify::run_derivative_battery(&p).map_err(err)?;
    let frac = r
        .requirements
        .iter()
        .find(|q| q.name == "singleton_fraction")
        .ok_or("missing fraction")?;
    ensure(
        r.violation_count == 0 && frac.value >= 0.9,
        format!(
            "violations {}, worst {:.3e} (tol {:.3e}), singleton fraction {:.4}",
            r.violation_count, r.worst_violation, r.tolerance_used, frac.value
        ),
    )
}

fn decay_bound() -> Outcome {
    let h = 0.01;
    let grid = UniformGrid::interval(-4.0, 4.0, h).map_err(err)?;
    let chi = Profile::indicator(0.0, 1.0).sample(&grid).map_err(err)?;
    let radii = RadiusGrid::spanning(&grid, false).map_err(err)?;
    let nodes: Vec<usize> = (0..grid.len())
        .filter(|&i| (1.0 - 1e-9..=4.0 + 1e-9).contains(&grid.node(i)[0]))
        .collect();
    let report = check_decay_bound(&chi, &nodes, &radii, 0.0).map_err(err)?;
    let m = hl_maximal(&chi, &radii).map_err(err)?;
    let tol = CLOSED_FORM_FACTOR * h;
    let oracle_err = nodes
        .iter()
        .map(|&i| (m.value(i) - 1.0 / (1.0 + grid.node(i)[0].abs())).abs())
        .fold(0.0f64, f64::max);
    let at2 = m.value(grid.locate(&[2.0]).ok_or("x = 2 off grid")?);
    ensure(
        report.violation_count == 0 && oracle_err <= tol && (at2 - 1.0 / 3.0).abs() <= tol,
        format!(
            "{} nodes, decay violations {}, |Mf - 1/(1+|x|)| <= {:.3e}, Mf(2) = {:.6} (tol {:.3e})",
            nodes.len(),
            report.violation_count,
            oracle_err,
            at2,
            tol
        ),
    )
}

fn ae_counterexample() -> Outcome {
    let p = AeParams::default();
    let r = verify::run_ae_counterexample(&p).map_err(err)?;
    let u = r.observable("u_k(2)").ok_or("missing u_k(2)")?;
    let m = r.observable("M(u_k)(2)").ok_or("missing M(u_k)(2)")?;
    let tol = CLOSED_FORM_FACTOR * p.h;
    let ok = p.k_list == [1.0, 2.0, 4.0, 8.0, 16.0]
        && u.iter().all(|&v| v == 0.0)
        && m.iter().all(|&v| v >= 0.125)
        && (m[0] - 1.0 / 6.0).abs() <= tol;
    ensure(
        ok,
        format!(
            "u_k(2) = {u:?}, M(u_k)(2) = {m:.5?}, M(u_1)(2) - 1/6 = {:.3e}",
            m[0] - 1.0 / 6.0
        ),
    )
}

fn weak_local() -> Outcome {
    let p = WeakLocalParams::default();
    let r = verify::run_weak_counterexample_local(&p).map_err(err)?;
    let pair = r.observable("<u_n,1>").ok_or("missing pairing")?;
    let mass = r.observable("<1,M_Omega(u_n)>").ok_or("missing mass")?;
    let worst = pair.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let least = mass.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(
        p.n_list == [4.0, 8.0, 16.0, 32.0] && p.r == 0.25 && worst <= 2.0 * p.h && least >= 0.6,
        format!(
            "max |<u_n,1>| = {worst:.3e} (tol {:.3e}), min <1,M_Omega u_n> = {least:.4}",
            2.0 * p.h
        ),
    )
}

fn weak_global() -> Outcome {
    let p = WeakGlobalParams::default();
    let r = verify::run_weak_counterexample_global(&p).map_err(err)?;
    let pair = r.observable("<u_n,w>").ok_or("missing pairing")?;
    let mass = r.observable("<M(u_n),w>").ok_or("missing mass")?;
    let late = p
        .n_list
        .iter()
        .zip(pair)
        .filter(|(n, _)| **n >= 32.0)
        .fold(0.0f64, |a, (_, v)| a.max(v.abs()));
    let least = mass.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(
        p.half_width == 20.0 && p.h == 1.0 / 512.0 && late <= 0.05 && least >= 0.5,
        format!("max |<u_n,w>| for n >= 32 = {late:.3e}, min <M(u_n),w> = {least:.4}"),
    )
}

fn translates() -> Outcome {
    let p = TranslateParams::default();
    let r = verify::run_translate_sequence(&p).map_err(err)?;
    let pair = r.observable("<u_k,phi>").ok_or("missing pairing")?;
    let m0 = r.observable("M(u_k)(0)").ok_or("missing M(u_k)(0)")?;
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    // Separation recomputed directly from the two maximal functions.
    let grid = UniformGrid::interval(-p.half_width, p.half_width, p.h).map_err(err)?;
    let radii = RadiusGrid::spanning(&grid, false).map_err(err)?;
    let m = |k: f64| -> Result<SampledFunction, String> {
        let u = p.profile.clone().translated(k).sample(&grid).map_err(err)?;
        Ok(hl_maximal(&u, &radii).map_err(err)?.to_function())
    };
    let sep = lp_norm(&m(8.0)?.sub(&m(2.0)?).map_err(err)?, 2.0).map_err(err)?;
    let base = lp_norm(&m(0.0)?, 2.0).map_err(err)?;
    let ok = p.k_list == [2.0, 4.0, 8.0, 10.0]
        && decreasing(pair)
        && pair[pair.len() - 1] < 0.01
        && decreasing(m0)
        && m0[m0.len() - 1] < 0.1
        && sep >= 0.5 * base;
    ensure(
        ok,
        format!(
            "<u_k,phi> = {pair:.4?}, M(u_k)(0) = {m0:.4?}, |M(u_8) - M(u_2)|_2 = {sep:.4} vs {:.4}",
            0.5 * base
        ),
    )
}

fn weak_continuity() -> Outcome {
    let p = WeakContinuityParams::default();
    let r = verify::run_weak_continuity_demo(&p).map_err(err)?;
    let gap = r.observable("|<M(u_n)-M(u),phi>|").ok_or("missing gap")?;
    let ratios: Vec<f64> = gap.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(
        p.n_list == [16.0, 64.0, 256.0] && ratios.iter().all(|&q| q >= 1.5),
        format!("gaps {gap:.4?}, ratios {ratios:.3?}"),
    )
}

fn random_field(rng: &mut ChaCha8Rng, n: usize, h: f64) -> SampledFunction {
    let grid = UniformGrid::new(1, &[0.0], h, &[n]).expect("grid");
    SampledFunction::new(grid, (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect()).expect("field")
}

fn rel_le(a: f64, b: f64) -> bool {
    a <= b + ALGEBRA_REL * (1.0 + b.abs())
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= ALGEBRA_REL * (1.0 + b.abs())
}

fn operator_algebra() -> Outcome {
    const CASES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 0.25;
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok && !failures.contains(&name.to_owned()) {
            failures.push(name.to_owned());
        }
    };
    for _ in 0..CASES {
        let n = rng.gen_range(8..48);
        let radii = RadiusGrid::multiples_of(h, rng.gen_range(1..10), true).map_err(err)?;
        let f = random_field(&mut rng, n, h);
        let g = random_field(&mut rng, n, h);
        let mf = hl_maximal(&f, &radii).map_err(err)?;
        let mg = hl_maximal(&g, &radii).map_err(err)?;

        let c = rng.gen_range(-5.0..5.0);
        let mc = hl_maximal(&f.scale(c), &radii).map_err(err)?;
        check(
            "homogeneity",
            (0..n).all(|i| rel_eq(mc.value(i), c.abs() * mf.value(i))),
        );

        let big = f.zip_with(&g, |a, b| a.abs().max(b.abs())).map_err(err)?;
        let mb = hl_maximal(&big, &radii).map_err(err)?;
        check("monotonicity", (0..n).all(|i| rel_le(mf.value(i), mb.value(i))));

        let ms = hl_maximal(&f.add(&g).map_err(err)?, &radii).map_err(err)?;
        check(
            "sublinearity",
            (0..n).all(|i| rel_le(ms.value(i), mf.value(i) + mg.value(i))),
        );

        let k = rng.gen_range(1..6);
        let padded: Vec<f64> = f.values().iter().copied().chain(std::iter::repeat_n(0.0, k)).collect();
        let shifted: Vec<f64> = std::iter::repeat_n(0.0, k).chain(f.values().iter().copied()).collect();
        let grid = UniformGrid::new(1, &[0.0], h, &[n + k]).map_err(err)?;
        let mp = hl_maximal(&SampledFunction::new(grid.clone(), padded).map_err(err)?, &radii).map_err(err)?;
        let mt = hl_maximal(&SampledFunction::new(grid, shifted).map_err(err)?, &radii).map_err(err)?;
        check("translation", (0..n).all(|i| rel_eq(mt.value(i + k), mp.value(i))));

        let lo = rng.gen_range(0..n / 2);
        let mask: Vec<bool> = (0..n).map(|i| i >= lo && i < lo + n / 3).collect();
        let ml = local_maximal(&f, &mask, &radii).map_err(err)?;
        check(
            "local<=global",
            (0..n).filter(|&i| mask[i]).all(|i| rel_le(ml.value(i), mf.value(i))),
        );

        let a = bilinear_maximal(&f, &g, -1.0, &radii).map_err(err)?;
        let b = bilinear_maximal(&g, &f, -1.0, &radii).map_err(err)?;
        check("alpha=-1 symmetry", (0..n).all(|i| rel_eq(a.value(i), b.value(i))));
    }
    ensure(
        failures.is_empty(),
        format!("6 properties x {CASES} inputs, rel tol {ALGEBRA_REL:e}, failing: {failures:?}"),
    )
}

fn fast_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let dim = 1 + case % 2;
        let side = if dim == 1 {
            rng.gen_range(16..400)
        } else {
            rng.gen_range(4..24)
        };
        let counts = vec![side; dim];
        let grid = UniformGrid::new(dim, &vec![0.0; dim], 0.1, &counts).map_err(err)?;
        let values = (0..grid.len()).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let f = SampledFunction::new(grid, values).map_err(err)?;
        let radii = RadiusGrid::multiples_of(0.1, rng.gen_range(1..side.min(40)), false).map_err(err)?;
        let a = hl_maximal(&f, &radii).map_err(err)?;
        let b = hl_maximal_naive(&f, &radii).map_err(err)?;
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max((x - y).abs());
        }
    }
    let row = bench_case(1, 1 << 20, 256, 1024, 0x5eed).map_err(err)?;
    let speedup = row.t_naive / row.t_fast;
    ensure(
        worst <= PATH_ABS && row.max_abs_diff <= PATH_ABS && speedup >= SPEEDUP,
        format!(
            "max diff {worst:.2e} over 50 inputs; N = {}, J = {}: naive {:.2}s (strided, scaled), fast {:.2}s, {speedup:.1}x",
            row.n, row.j, row.t_naive, row.t_fast
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let run = |threads: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(format!("t{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_hlmax"))
            .args(["verify", "--suite", "all", "--threads", threads, "--out"])
            .arg(&out)
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(err)?;
        if status.code() != Some(0) {
            return Err(format!("verify exited with {status}"));
        }
        std::fs::read(out.join("verify.json")).map_err(err)
    };
    let (a, b) = (run("1")?, run("3")?);
    ensure(
        a == b,
        format!("{} bytes, threads 1 vs 3 identical: {}", a.len(), a == b),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("gradient bound", gradient_bound),
        ("derivative formula", derivative_formula),
        ("decay bound", decay_bound),
        ("pointwise counterexample", ae_counterexample),
        ("weak counterexample, local", weak_local),
        ("weak counterexample, global", weak_global),
        ("translates and non-compactness", translates),
        ("weak continuity", weak_continuity),
        ("operator algebra", operator_algebra),
        ("fast path", fast_path),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (verdict, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {verdict} {name}: {detail}", i + 1);
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
