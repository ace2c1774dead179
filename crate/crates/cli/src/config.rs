//! Run configuration: a flat `key = value` file plus command-line overrides.

use std::path::{Path, PathBuf};

use hlmax_core::{Profile, RadiusGrid, UniformGrid};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::FunctionSpec;
use crate::error::CliError;

/// Operator evaluated by `compute`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Hl,
    Local,
    Bilinear,
}

/// Everything a subcommand needs; unset options fall back to per-suite defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub hull: (f64, f64),
    pub origin: Option<Vec<f64>>,
    pub counts: Option<Vec<usize>>,
    pub h: Option<f64>,
    pub radii_max: Option<f64>,
    pub radii_count: Option<usize>,
    pub include_zero: bool,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub suites: Vec<String>,
    pub tol_factor: f64,
    pub derivative_tol_factor: f64,
    pub good_radii_tol: f64,
    pub exclude_switching: bool,
    pub out: PathBuf,
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub operator: Operator,
    pub domain_radius: f64,
    pub seed: u64,
    pub battery_count: usize,
    pub per_point: bool,
    pub threads: Option<usize>,
    pub bench_dim: usize,
    pub bench_sizes: Vec<usize>,
    pub bench_radii: Vec<usize>,
    pub bench_naive_stride: usize,
    pub avg_radii: Vec<f64>,
    pub splitting_l: f64,
    pub splitting_m: f64,
    pub splitting_half_width: f64,
    pub ae_k_list: Option<Vec<f64>>,
    pub weak_local_n_list: Option<Vec<f64>>,
    pub weak_global_n_list: Option<Vec<f64>>,
    pub translate_k_list: Option<Vec<f64>>,
    pub weak_continuity_n_list: Option<Vec<f64>>,
}

/// Default grid spacing for `compute` and the hull-based suites.
pub const DEFAULT_H: f64 = 0.01;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            hull: (-4.0, 4.0),
            origin: None,
            counts: None,
            h: None,
            radii_max: None,
            radii_count: None,
            include_zero: true,
            p: 2.0,
            q: 2.0,
            alpha: -1.0,
            suites: Vec::new(),
            tol_factor: 10.0,
            derivative_tol_factor: 20.0,
            good_radii_tol: hlmax_core::DEFAULT_GOOD_RADII_TOL,
            exclude_switching: false,
            out: PathBuf::from("."),
            f: FunctionSpec::Catalog(Profile::bump(-0.3, 1.2, 1.0)),
            g: FunctionSpec::Catalog(Profile::bump(0.4, 0.9, 1.5)),
            operator: Operator::Hl,
            domain_radius: 1.0,
            seed: 0x5eed,
            battery_count: 20,
            per_point: false,
            threads: None,
            bench_dim: 1,
            bench_sizes: vec![1024, 16384],
            bench_radii: vec![1, 16, 64],
            bench_naive_stride: 1,
            avg_radii: vec![0.5, 1.0, 2.0, 4.0],
            splitting_l: 1.0,
            splitting_m: 10.0,
            splitting_half_width: 16.0,
            ae_k_list: None,
            weak_local_n_list: None,
            weak_global_n_list: None,
            translate_k_list: None,
            weak_continuity_n_list: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn real(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v.parse().map_err(|_| usage(format!("{key}: {v:?} is not a number")))?;
    if !x.is_finite() {
        return Err(usage(format!("{key}: {v:?} is not finite")));
    }
    Ok(x)
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| usage(format!("{key}: {v:?} is not a non-negative integer")))
}

fn boolean(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(usage(format!("{key}: {v:?} is not a boolean"))),
    }
}

fn list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect()
}

impl RunConfig {
    /// Reads a configuration file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| usage(format!("config line {}: {}", n + 1, e.message())))?;
        }
        Ok(())
    }

    /// Sets one option by its configuration key.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "dim" => self.dim = integer(key, v)?,
            "hull" => {
                let b = list(key, v, real)?;
                if b.len() != 2 {
                    return Err(usage("hull: expected lo,hi"));
                }
                self.hull = (b[0], b[1]);
            }
            "origin" => self.origin = Some(list(key, v, real)?),
            "counts" => self.counts = Some(list(key, v, integer)?),
            "h" => self.h = Some(real(key, v)?),
            "radii_max" => self.radii_max = Some(real(key, v)?),
            "radii_count" => self.radii_count = Some(integer(key, v)?),
            "include_zero" => self.include_zero = boolean(key, v)?,
            "p" => self.p = real(key, v)?,
            "q" => self.q = real(key, v)?,
            "alpha" => self.alpha = real(key, v)?,
            "suites" => {
                self.suites = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "tol_factor" => self.tol_factor = real(key, v)?,
            "derivative_tol_factor" => self.derivative_tol_factor = real(key, v)?,
            "good_radii_tol" => self.good_radii_tol = real(key, v)?,
            "exclude_switching" => self.exclude_switching = boolean(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "f" => self.f = v.parse()?,
            "g" => self.g = v.parse()?,
            "operator" => {
                self.operator = match v {
                    "hl" => Operator::Hl,
                    "local" => Operator::Local,
                    "bilinear" => Operator::Bilinear,
                    _ => return Err(usage(format!("operator: expected hl, local or bilinear, got {v:?}"))),
                }
            }
            "domain_radius" => self.domain_radius = real(key, v)?,
            "seed" => self.seed = integer(key, v)?,
            "battery_count" => self.battery_count = integer(key, v)?,
            "per_point" => self.per_point = boolean(key, v)?,
            "threads" => self.threads = Some(integer(key, v)?),
            "bench.dim" => self.bench_dim = integer(key, v)?,
            "bench.sizes" => self.bench_sizes = list(key, v, integer)?,
            "bench.radii" => self.bench_radii = list(key, v, integer)?,
            "bench.naive_stride" => self.bench_naive_stride = integer(key, v)?,
            "avg.radii" => self.avg_radii = list(key, v, real)?,
            "splitting.L" => self.splitting_l = real(key, v)?,
            "splitting.m" => self.splitting_m = real(key, v)?,
            "splitting.half_width" => self.splitting_half_width = real(key, v)?,
            "ae.k_list" => self.ae_k_list = Some(list(key, v, real)?),
            "weak_local.n_list" => self.weak_local_n_list = Some(list(key, v, real)?),
            "weak_global.n_list" => self.weak_global_n_list = Some(list(key, v, real)?),
            "translate.k_list" => self.translate_k_list = Some(list(key, v, real)?),
            "weak_continuity.n_list" => self.weak_continuity_n_list = Some(list(key, v, real)?),
            _ => return Err(usage(format!("unknown option {key:?}"))),
        }
        Ok(())
    }

    /// `r` from `1/r = 1/p + 1/q`.
    pub fn r(&self) -> f64 {
        1.0 / (1.0 / self.p + 1.0 / self.q)
    }

    /// Checks the ranges every subcommand relies on.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.dim != 1 && self.dim != 2 {
            return Err(usage(format!("dim must be 1 or 2, got {}", self.dim)));
        }
        for (name, e) in [("p", self.p), ("q", self.q)] {
            if !(e > 1.0) {
                return Err(usage(format!("{name} = {e} violates the requirement {name} > 1")));
            }
        }
        let r = self.r();
        let ok = if self.dim == 1 { r >= 1.0 - 1e-12 } else { r > 1.0 };
        if !ok {
            let need = if self.dim == 1 { "r >= 1" } else { "r > 1" };
            return Err(usage(format!(
                "1/r = 1/p + 1/q gives r = {r} for p = {}, q = {}; dimension {} needs {need}",
                self.p, self.q, self.dim
            )));
        }
        if self.alpha == 1.0 {
            return Err(usage("alpha must differ from 1"));
        }
        if let Some(h) = self.h {
            if !(h > 0.0) {
                return Err(usage(format!("h must be positive, got {h}")));
            }
        }
        if matches!(self.radii_max, Some(m) if !(m > 0.0)) {
            return Err(usage("radii_max must be positive"));
        }
        if self.radii_count == Some(0) {
            return Err(usage("radii_count must be at least 1"));
        }
        if !(self.hull.0 < self.hull.1) {
            return Err(usage("hull needs lo < hi"));
        }
        if !(self.tol_factor >= 0.0 && self.derivative_tol_factor >= 0.0) {
            return Err(usage("tolerance factors must be non-negative"));
        }
        if self.threads == Some(0) {
            return Err(usage("threads must be at least 1"));
        }
        if self.bench_naive_stride == 0 {
            return Err(usage("bench.naive_stride must be at least 1"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.h.unwrap_or(DEFAULT_H)
    }

    /// The grid for `compute` and the hull-based suites.
    pub fn grid(&self) -> Result<UniformGrid, CliError> {
        let h = self.spacing();
        let grid = match (&self.origin, &self.counts) {
            (Some(o), Some(c)) => UniformGrid::new(self.dim, o, h, c)?,
            (None, None) if self.dim == 1 => UniformGrid::interval(self.hull.0, self.hull.1, h)?,
            (None, None) => UniformGrid::square(self.hull.0, self.hull.1, h)?,
            _ => return Err(usage("origin and counts must be given together")),
        };
        Ok(grid)
    }

    /// Radii for `compute`: `radii_count` equal steps up to `radii_max`, or every
    /// multiple of `h` up to `radii_max` (default: the hull diameter).
    pub fn radius_grid(&self, grid: &UniformGrid) -> Result<RadiusGrid, CliError> {
        let h = grid.spacing();
        let max = self.radii_max.unwrap_or_else(|| grid.diameter());
        let radii = match self.radii_count {
            Some(n) => RadiusGrid::linspace(max, n, self.include_zero)?,
            None => RadiusGrid::up_to(h, max, self.include_zero)?,
        };
        Ok(radii)
    }

    /// Echo of every setting that influences results (thread count and output
    /// directory are left out so that reports compare byte-for-byte).
    pub fn echo(&self) -> Value {
        let spec = |f: &FunctionSpec| match f {
            FunctionSpec::Catalog(p) => json!(p),
            FunctionSpec::Csv(path) => json!({"kind": "csv", "path": path.display().to_string()}),
        };
        json!({
            "dim": self.dim,
            "hull": [self.hull.0, self.hull.1],
            "origin": self.origin,
            "counts": self.counts,
            "h": self.h,
            "radii_max": self.radii_max,
            "radii_count": self.radii_count,
            "include_zero": self.include_zero,
            "p": self.p,
            "q": self.q,
            "r": self.r(),
            "alpha": self.alpha,
            "suites": self.suites,
            "tol_factor": self.tol_factor,
            "derivative_tol_factor": self.derivative_tol_factor,
            "good_radii_tol": self.good_radii_tol,
            "exclude_switching": self.exclude_switching,
            "f": spec(&self.f),
            "g": spec(&self.g),
            "seed": self.seed,
            "battery_count": self.battery_count,
            "avg_radii": self.avg_radii,
            "splitting": {"L": self.splitting_l, "m": self.splitting_m, "half_width": self.splitting_half_width},
            "ae_k_list": self.ae_k_list,
            "weak_local_n_list": self.weak_local_n_list,
            "weak_global_n_list": self.weak_global_n_list,
            "translate_k_list": self.translate_k_list,
            "weak_continuity_n_list": self.weak_continuity_n_list,
        })
    }
}

impl CliError {
    pub(crate) fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Resolution(m) | CliError::Io(m) | CliError::Failed(m) => m.clone(),
        }
    }
}
