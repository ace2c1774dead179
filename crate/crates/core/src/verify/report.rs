//! Structured outcomes of inequality checks and sequence experiments.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::grid::UniformGrid;

/// Where a numeric constant in a report comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Closed-form value of the quantity being approximated.
    ClosedForm,
    /// Constant of an inequality asserted by the theory.
    Theory,
    /// Numerically derived floor or threshold fixed in the default configuration.
    Derived,
    /// Supplied by the caller.
    Config,
}

/// A named constant echoed into a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub name: String,
    pub value: f64,
    pub source: Source,
}

impl Constant {
    pub fn new(name: impl Into<String>, value: f64, source: Source) -> Self {
        Self {
            name: name.into(),
            value,
            source,
        }
    }
}

/// A scalar side condition attached to an inequality report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Requirement {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `true` for `value >= bound`, `false` for `value <= bound`.
    pub at_least: bool,
}

impl Requirement {
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            at_least: true,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            at_least: false,
        }
    }

    pub fn holds(&self) -> bool {
        if self.at_least {
            self.value >= self.bound
        } else {
            self.value <= self.bound
        }
    }
}

/// One checked point: `lhs <= rhs` is the claim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCheck {
    /// Index of the input case within a battery (0 for single runs).
    pub case: usize,
    pub node: usize,
    pub x: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

impl PointCheck {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Per-point comparison `lhs <= rhs + tolerance` with summary statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub points: Vec<PointCheck>,
    pub violation_count: usize,
    pub worst_violation: f64,
    pub tolerance_used: f64,
    pub grid_spacing: f64,
    pub counts: Vec<usize>,
    /// Nodes whose maximizing radius reached the largest radius `r_J`.
    pub boundary_flag_count: usize,
    /// Width of the band next to the hull faces left out of the check.
    pub boundary_band: f64,
    /// Nodes inside the band.
    pub boundary_excluded: usize,
    /// Nodes outside the band skipped by the suite's own rule (for example ties).
    pub excluded: Vec<usize>,
    pub requirements: Vec<Requirement>,
    pub constants: Vec<Constant>,
    pub parameters: BTreeMap<String, Value>,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, grid: &UniformGrid, tolerance: f64, points: Vec<PointCheck>) -> Self {
        let mut report = Self {
            name: name.into(),
            points,
            violation_count: 0,
            worst_violation: 0.0,
            tolerance_used: tolerance,
            grid_spacing: grid.spacing(),
            counts: grid.counts().to_vec(),
            boundary_flag_count: 0,
            boundary_band: 0.0,
            boundary_excluded: 0,
            excluded: Vec::new(),
            requirements: Vec::new(),
            constants: Vec::new(),
            parameters: BTreeMap::new(),
        };
        report.recount();
        report
    }

    fn recount(&mut self) {
        let tol = self.tolerance_used;
        self.violation_count = self.points.iter().filter(|p| p.margin() < -tol).count();
        let min_margin = self.points.iter().map(PointCheck::margin).fold(f64::INFINITY, f64::min);
        self.worst_violation = if min_margin.is_finite() {
            (-min_margin).max(0.0)
        } else {
            0.0
        };
    }

    /// Concatenates the points of several runs on a common grid and tolerance.
    pub fn merge(name: impl Into<String>, reports: Vec<InequalityReport>) -> Result<Self> {
        let first = reports.first().ok_or_else(|| invalid("nothing to merge"))?;
        let mut out = Self {
            name: name.into(),
            points: Vec::new(),
            violation_count: 0,
            worst_violation: 0.0,
            tolerance_used: first.tolerance_used,
            grid_spacing: first.grid_spacing,
            counts: first.counts.clone(),
            boundary_flag_count: 0,
            boundary_band: first.boundary_band,
            boundary_excluded: 0,
            excluded: Vec::new(),
            requirements: Vec::new(),
            constants: first.constants.clone(),
            parameters: first.parameters.clone(),
        };
        for (case, r) in reports.into_iter().enumerate() {
            if r.grid_spacing != out.grid_spacing || r.tolerance_used != out.tolerance_used {
                return Err(invalid("merged reports must share grid spacing and tolerance"));
            }
            out.boundary_flag_count += r.boundary_flag_count;
            out.boundary_excluded += r.boundary_excluded;
            out.boundary_band = out.boundary_band.max(r.boundary_band);
            out.excluded.extend(r.excluded);
            out.requirements.extend(r.requirements);
            out.points.extend(r.points.into_iter().map(|mut p| {
                p.case = case;
                p
            }));
        }
        out.recount();
        Ok(out)
    }

    pub fn with_parameter(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(
            key.to_owned(),
            serde_json::to_value(value).expect("serializable parameter"),
        );
        self
    }

    pub fn with_constant(mut self, c: Constant) -> Self {
        self.constants.push(c);
        self
    }

    pub fn with_requirement(mut self, r: Requirement) -> Self {
        self.requirements.push(r);
        self
    }

    pub fn margins(&self) -> Vec<f64> {
        self.points.iter().map(PointCheck::margin).collect()
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0 && self.requirements.iter().all(Requirement::holds)
    }

    pub fn document(&self, include_points: bool) -> Value {
        let mut parameters = serde_json::Map::new();
        for (k, v) in &self.parameters {
            parameters.insert(k.clone(), v.clone());
        }
        parameters.insert("boundary_band".into(), json!(self.boundary_band));
        parameters.insert("boundary_excluded".into(), json!(self.boundary_excluded));
        parameters.insert("boundary_flag_count".into(), json!(self.boundary_flag_count));
        parameters.insert("excluded_count".into(), json!(self.excluded.len()));
        parameters.insert("checked_points".into(), json!(self.points.len()));
        parameters.insert("constants".into(), json!(self.constants));
        parameters.insert("requirements".into(), json!(self.requirements));
        json!({
            "name": self.name,
            "parameters": parameters,
            "tolerance": self.tolerance_used,
            "grid": {"h": self.grid_spacing, "counts": self.counts},
            "per_point": if include_points { json!(self.points) } else { Value::Null },
            "summary": {
                "violations": self.violation_count,
                "worst": self.worst_violation,
                "verdict": verdict(self.passed()),
            },
        })
    }
}

pub(crate) fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

/// What a sequence experiment claims about one observable.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClaimKind {
    /// `|value|` at the largest parameter is below `threshold`.
    Converges { threshold: f64 },
    /// Every value is at least `floor`.
    BoundedBelow { floor: f64 },
    /// Every `|value|` is at most `ceiling`.
    BoundedAbove { ceiling: f64 },
    /// Values strictly decrease along the parameter list.
    Decreasing,
    /// `|v_i| / |v_{i+1}| >= factor` for consecutive parameters.
    DecaysByFactor { factor: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub observable: String,
    #[serde(flatten)]
    pub kind: ClaimKind,
    /// Only parameters at or above this value are tested.
    pub min_parameter: Option<f64>,
    pub source: Source,
    pub passed: bool,
}

/// Values of one quantity along the sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observable {
    pub name: String,
    pub values: Vec<f64>,
}

/// Observables of a sequence `u_k` and verdicts on their claimed limits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub name: String,
    pub parameter_name: String,
    pub parameters: Vec<f64>,
    pub observables: Vec<Observable>,
    pub claims: Vec<Claim>,
    pub constants: Vec<Constant>,
    pub grid_spacing: f64,
    pub counts: Vec<usize>,
    pub settings: BTreeMap<String, Value>,
}

impl ConvergenceReport {
    pub fn new(name: &str, parameter_name: &str, parameters: Vec<f64>, grid: &UniformGrid) -> Result<Self> {
        if parameters.is_empty() {
            return Err(invalid("parameter list is empty"));
        }
        if parameters.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("parameter list must be strictly increasing"));
        }
        Ok(Self {
            name: name.into(),
            parameter_name: parameter_name.into(),
            parameters,
            observables: Vec::new(),
            claims: Vec::new(),
            constants: Vec::new(),
            grid_spacing: grid.spacing(),
            counts: grid.counts().to_vec(),
            settings: BTreeMap::new(),
        })
    }

    pub fn observe(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.parameters.len() {
            return Err(invalid(format!(
                "observable {name} has {} values for {} parameters",
                values.len(),
                self.parameters.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid(format!("observable {name} is not finite")));
        }
        self.observables.push(Observable {
            name: name.into(),
            values,
        });
        Ok(())
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.values.as_slice())
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|c| c.name == name).map(|c| c.value)
    }

    pub fn add_constant(&mut self, c: Constant) {
        self.constants.push(c);
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.settings.insert(
            key.to_owned(),
            serde_json::to_value(value).expect("serializable setting"),
        );
    }

    /// Evaluates and records a claim about an existing observable.
    pub fn claim(
        &mut self,
        observable: &str,
        kind: ClaimKind,
        min_parameter: Option<f64>,
        source: Source,
    ) -> Result<bool> {
        let values = self
            .observable(observable)
            .ok_or_else(|| invalid(format!("unknown observable {observable}")))?;
        let v: Vec<f64> = values
            .iter()
            .zip(&self.parameters)
            .filter(|(_, p)| min_parameter.is_none_or(|m| **p >= m))
            .map(|(v, _)| *v)
            .collect();
        let passed = !v.is_empty()
            && match kind {
                ClaimKind::Converges { threshold } => v.last().is_some_and(|x| x.abs() < threshold),
                ClaimKind::BoundedBelow { floor } => v.iter().all(|&x| x >= floor),
                ClaimKind::BoundedAbove { ceiling } => v.iter().all(|x| x.abs() <= ceiling),
                ClaimKind::Decreasing => v.windows(2).all(|w| w[1] < w[0]),
                ClaimKind::DecaysByFactor { factor } => v.windows(2).all(|w| w[0].abs() >= factor * w[1].abs()),
            };
        self.claims.push(Claim {
            observable: observable.into(),
            kind,
            min_parameter,
            source,
            passed,
        });
        Ok(passed)
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn failed_claims(&self) -> usize {
        self.claims.iter().filter(|c| !c.passed).count()
    }

    /// A copy keeping only the named observables and constants, in the order given.
    pub fn select(&self, observables: &[&str], constants: &[&str]) -> Result<Self> {
        let mut out = self.clone();
        out.observables = observables
            .iter()
            .map(|n| {
                self.observables
                    .iter()
                    .find(|o| o.name == *n)
                    .cloned()
                    .ok_or_else(|| invalid(format!("unknown observable {n}")))
            })
            .collect::<Result<_>>()?;
        out.constants = constants
            .iter()
            .map(|n| {
                self.constants
                    .iter()
                    .find(|c| c.name == *n)
                    .cloned()
                    .ok_or_else(|| invalid(format!("unknown constant {n}")))
            })
            .collect::<Result<_>>()?;
        out.claims.retain(|c| observables.contains(&c.observable.as_str()));
        Ok(out)
    }

    /// Observables as rows `(parameter, observable...)`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.parameters.len())
            .map(|i| {
                std::iter::once(self.parameters[i])
                    .chain(self.observables.iter().map(|o| o.values[i]))
                    .collect()
            })
            .collect()
    }

    /// Plot-ready CSV: the parameter, every observable, then every constant as a flat column.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        use crate::io::fmt_real;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header = vec![self.parameter_name.clone()];
        header.extend(self.observables.iter().map(|o| o.name.clone()));
        header.extend(self.constants.iter().map(|c| c.name.clone()));
        w.write_record(&header)?;
        for row in self.rows() {
            let mut rec: Vec<String> = row.iter().map(|&v| fmt_real(v)).collect();
            rec.extend(self.constants.iter().map(|c| fmt_real(c.value)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn document(&self) -> Value {
        let mut parameters = serde_json::Map::new();
        for (k, v) in &self.settings {
            parameters.insert(k.clone(), v.clone());
        }
        parameters.insert(self.parameter_name.clone(), json!(self.parameters));
        parameters.insert("constants".into(), json!(self.constants));
        parameters.insert("claims".into(), json!(self.claims));
        let per_point: Vec<Value> = (0..self.parameters.len())
            .map(|i| {
                let mut row = serde_json::Map::new();
                row.insert(self.parameter_name.clone(), json!(self.parameters[i]));
                for o in &self.observables {
                    row.insert(o.name.clone(), json!(o.values[i]));
                }
                Value::Object(row)
            })
            .collect();
        json!({
            "name": self.name,
            "parameters": parameters,
            "tolerance": Value::Null,
            "grid": {"h": self.grid_spacing, "counts": self.counts},
            "per_point": per_point,
            "summary": {
                "violations": self.failed_claims(),
                "worst": Value::Null,
                "verdict": verdict(self.passed()),
            },
        })
    }
}
