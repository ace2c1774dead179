//! Function specifications: `kind:key=value,...` or `csv:path=FILE`.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;

use hlmax_core::io::read_function;
use hlmax_core::{Profile, SampledFunction, UniformGrid};

use crate::error::CliError;

/// A function named in a configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Catalog(Profile),
    Csv(PathBuf),
}

type Params = BTreeMap<String, String>;

fn take(params: &mut Params, key: &str, default: f64) -> Result<f64, CliError> {
    match params.remove(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("parameter {key}={v} is not a number"))),
    }
}

fn center(params: &mut Params) -> Result<[f64; 2], CliError> {
    Ok([take(params, "center", 0.0)?, take(params, "center_y", 0.0)?])
}

fn profile(kind: &str, params: &mut Params) -> Result<Profile, CliError> {
    let p = match kind {
        "indicator" => Profile::Indicator {
            center: center(params)?,
            radius: take(params, "radius", 1.0)?,
            amplitude: take(params, "amplitude", 1.0)?,
        },
        "normalized_indicator" => Profile::NormalizedIndicator {
            radius: take(params, "radius", 1.0)?,
        },
        "tent" => Profile::Tent {
            center: center(params)?,
            width: take(params, "width", 1.0)?,
            amplitude: take(params, "amplitude", 1.0)?,
        },
        "smooth_bump" | "bump" => Profile::SmoothBump {
            center: center(params)?,
            width: take(params, "width", 1.0)?,
            amplitude: take(params, "amplitude", 1.0)?,
        },
        "sine" => Profile::Sine {
            frequency: take(params, "n", 1.0)?,
        },
        "sine_weighted" => Profile::SineWeighted {
            frequency: take(params, "n", 1.0)?,
        },
        "lorentzian" => Profile::Lorentzian,
        "oscillated" => {
            let n = take(params, "n", 16.0)?;
            Profile::Oscillated {
                base: Box::new(Profile::tent(0.0, take(params, "width", 1.0)?)),
                envelope: Box::new(Profile::bump(0.0, take(params, "envelope_width", 1.0)?, 1.0)),
                frequency: n,
                amplitude: take(params, "a", 1.0)? / n,
            }
        }
        "translate" => {
            let shift = take(params, "k", 0.0)?;
            let base = params.remove("base").unwrap_or_else(|| "tent".into());
            if base == "translate" || base == "csv" {
                return Err(CliError::Usage(format!("translate cannot wrap {base}")));
            }
            profile(&base, params)?.translated(shift)
        }
        other => return Err(CliError::Usage(format!("unknown function kind {other:?}"))),
    };
    Ok(p)
}

impl FromStr for FunctionSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = Params::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key=value in function spec, got {item:?}")))?;
            params.insert(k.trim().to_owned(), v.trim().to_owned());
        }
        if kind == "csv" {
            let path = params
                .remove("path")
                .ok_or_else(|| CliError::Usage("csv functions need path=FILE".into()))?;
            if let Some(k) = params.keys().next() {
                return Err(CliError::Usage(format!("unknown parameter {k} for csv")));
            }
            return Ok(FunctionSpec::Csv(path.into()));
        }
        let shift = params.remove("shift");
        let mut p = profile(kind, &mut params)?;
        if let Some(k) = params.keys().next() {
            return Err(CliError::Usage(format!("unknown parameter {k} for {kind}")));
        }
        if let Some(v) = shift {
            let mut m = Params::from([("shift".to_owned(), v)]);
            p = p.translated(take(&mut m, "shift", 0.0)?);
        }
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(FunctionSpec::Catalog(p))
    }
}

impl FunctionSpec {
    /// Samples a catalog function on `grid`, or loads a CSV file (whose own grid wins).
    pub fn load(&self, grid: &UniformGrid) -> Result<SampledFunction, CliError> {
        match self {
            FunctionSpec::Catalog(p) => Ok(p.sample(grid)?),
            FunctionSpec::Csv(path) => {
                let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Ok(read_function(file)?)
            }
        }
    }
}
