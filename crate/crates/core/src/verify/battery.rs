//! Randomized smooth bump pairs for the bilinear inequality checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::inequalities::{
    boundary_band, check_derivative_formula, check_gradient_bound_with, check_line_bound_pairs, interior_segments,
    GradientBoundOptions, MIN_SINGLETON_FRACTION,
};
use super::report::{InequalityReport, Requirement};
use crate::error::Result;
use crate::grid::{SampledFunction, UniformGrid};
use crate::profile::Profile;
use crate::radius::RadiusGrid;

/// Settings shared by the bump-pair batteries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryParams {
    /// Pairs checked before the random ones.
    pub fixed: Vec<(Profile, Profile)>,
    /// Number of random pairs.
    pub count: usize,
    pub seed: u64,
    pub h: f64,
    pub half_width: f64,
    pub alpha: f64,
    pub radii_max: f64,
    pub radii_count: usize,
    /// Tolerance as a multiple of `h`.
    pub tol_factor: f64,
    /// Repeat the gradient check at `h/2` and require the worst violation not to grow.
    pub refine: bool,
    pub exclude_switching: bool,
}

impl Default for BatteryParams {
    fn default() -> Self {
        Self {
            fixed: Vec::new(),
            count: 20,
            seed: 0x5eed,
            h: 0.01,
            half_width: 4.0,
            alpha: -1.0,
            radii_max: 8.0,
            radii_count: 256,
            tol_factor: 10.0,
            refine: true,
            exclude_switching: false,
        }
    }
}

impl BatteryParams {
    pub fn grid(&self, h: f64) -> Result<UniformGrid> {
        UniformGrid::interval(-self.half_width, self.half_width, h)
    }

    pub fn radii(&self) -> Result<RadiusGrid> {
        RadiusGrid::linspace(self.radii_max, self.radii_count, true)
    }
}

/// `count` pairs of smooth bumps with centres in `[-1.5, 1.5]`, widths in
/// `[0.5, 1.5]` and peak heights in `[0.5, 2]`.
pub fn bump_pairs(count: usize, seed: u64) -> Vec<(Profile, Profile)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = move || {
        Profile::bump(
            rng.gen_range(-1.5..=1.5),
            rng.gen_range(0.5..=1.5),
            rng.gen_range(0.5..=2.0),
        )
    };
    (0..count).map(|_| (draw(), draw())).collect()
}

fn sampled_pairs(p: &BatteryParams, h: f64) -> Result<Vec<(SampledFunction, SampledFunction)>> {
    let grid = p.grid(h)?;
    p.fixed
        .iter()
        .chain(bump_pairs(p.count, p.seed).iter())
        .map(|(a, b)| Ok((a.sample(&grid)?, b.sample(&grid)?)))
        .collect()
}

fn gradient_at(p: &BatteryParams, h: f64) -> Result<InequalityReport> {
    let radii = p.radii()?;
    let options = GradientBoundOptions {
        exclude_switching: p.exclude_switching,
    };
    let reports = sampled_pairs(p, h)?
        .iter()
        .map(|(f, g)| check_gradient_bound_with(f, g, p.alpha, &radii, p.tol_factor * h, options))
        .collect::<Result<Vec<_>>>()?;
    InequalityReport::merge("gradient-bound", reports)
}

/// Gradient bound on every pair, plus the refinement comparison when enabled.
pub fn run_gradient_battery(p: &BatteryParams) -> Result<InequalityReport> {
    let coarse = gradient_at(p, p.h)?;
    let mut report = coarse.with_parameter("battery", p);
    if p.refine {
        let fine = gradient_at(p, 0.5 * p.h)?;
        let coarse_worst = report.worst_violation;
        report = report
            .with_parameter("refined_violation_count", fine.violation_count)
            .with_requirement(Requirement::at_most(
                "refined_worst_violation",
                fine.worst_violation,
                coarse_worst,
            ));
    }
    Ok(report)
}

/// Derivative formula on every pair; the singleton share is pooled over the battery.
pub fn run_derivative_battery(p: &BatteryParams) -> Result<InequalityReport> {
    let radii = p.radii()?;
    let reports = sampled_pairs(p, p.h)?
        .iter()
        .map(|(f, g)| check_derivative_formula(f, g, p.alpha, &radii, p.tol_factor * p.h))
        .collect::<Result<Vec<_>>>()?;
    let total = |key: &str| -> usize {
        reports
            .iter()
            .map(|r| r.parameters[key].as_u64().unwrap_or(0) as usize)
            .sum()
    };
    let (candidates, singletons, switching) = (total("candidates"), total("singletons"), total("switching_excluded"));
    let mut merged = InequalityReport::merge("derivative-formula", reports)?
        .with_parameter("candidates", candidates)
        .with_parameter("singletons", singletons)
        .with_parameter("switching_excluded", switching);
    let fraction = if candidates == 0 {
        1.0
    } else {
        singletons as f64 / candidates as f64
    };
    merged.requirements = vec![Requirement::at_least(
        "singleton_fraction",
        fraction,
        MIN_SINGLETON_FRACTION,
    )];
    Ok(merged.with_parameter("battery", p))
}

/// Segment bound over adjacent interior nodes and the longest interior segment of every pair.
pub fn run_line_battery(p: &BatteryParams) -> Result<InequalityReport> {
    let radii = p.radii()?;
    let reports = sampled_pairs(p, p.h)?
        .iter()
        .map(|(f, g)| {
            let pairs = interior_segments(f.grid(), boundary_band(&[f, g], &radii));
            check_line_bound_pairs(f, g, p.alpha, &radii, &pairs, p.tol_factor * p.h)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InequalityReport::merge("line-bound", reports)?.with_parameter("battery", p))
}
