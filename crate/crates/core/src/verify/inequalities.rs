//! Pointwise inequality checks on computed maximal fields.

use rayon::prelude::*;

use super::report::{Constant, InequalityReport, PointCheck, Requirement, Source};
use crate::error::{invalid, Result};
use crate::grid::{SampledFunction, UniformGrid};
use crate::maximal::{
    ball_averages, ball_measure, bilinear_maximal, bilinear_signed_average, hl_maximal, local_maximal, MaximalField,
};
use crate::radius::RadiusGrid;
use crate::sobolev::{gradient, lp_norm, VectorField};

/// Share of interior nodes (with a positive field) that must carry a unique maximizing radius.
pub const MIN_SINGLETON_FRACTION: f64 = 0.9;

/// Layers next to the hull on which compactly supported inputs must vanish for
/// the narrow boundary band to apply.
const CLEAR_LAYERS: usize = 2;

/// Width of the band next to the hull faces excluded from the pointwise checks.
///
/// Inputs that vanish on the outermost layers are exactly zero-extended, so only
/// the one-sided differences at the faces need excluding; otherwise averages can
/// see the missing exterior up to the largest radius.
pub fn boundary_band(inputs: &[&SampledFunction], radii: &RadiusGrid) -> f64 {
    let h = inputs[0].grid().spacing();
    if inputs.iter().all(|f| f.vanishes_near_boundary(CLEAR_LAYERS)) {
        CLEAR_LAYERS as f64 * h
    } else {
        radii.max()
    }
}

/// Nodes at least `band` away from every hull face.
pub fn interior_mask(grid: &UniformGrid, band: f64) -> Vec<bool> {
    let h = grid.spacing();
    (0..grid.len())
        .map(|i| grid.cells_to_boundary(i) as f64 * h >= band - 1e-9 * h)
        .collect()
}

/// Nodes with `|x - center| < radius` (`<=` when `closed`).
pub fn ball_mask(grid: &UniformGrid, center: &[f64], radius: f64, closed: bool) -> Vec<bool> {
    let slack = 1e-9 * grid.spacing();
    (0..grid.len())
        .map(|i| {
            let p = grid.node(i);
            let d = (0..grid.dim()).map(|a| (p[a] - center[a]).powi(2)).sum::<f64>().sqrt();
            if closed {
                d <= radius + slack
            } else {
                d < radius - slack
            }
        })
        .collect()
}

/// Options for [`check_gradient_bound_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GradientBoundOptions {
    /// Skip nodes whose maximizing radius is not unique.
    pub exclude_switching: bool,
}

/// The fields entering the gradient bound, computed once for several checks.
pub struct GradientFields {
    pub field: MaximalField,
    pub gradient: VectorField,
    /// `M(f, |grad g|) + M(|grad f|, g)`.
    pub bound: Vec<f64>,
    pub band: f64,
}

impl GradientFields {
    pub fn compute(f: &SampledFunction, g: &SampledFunction, alpha: f64, radii: &RadiusGrid) -> Result<Self> {
        f.require_same_grid(g)?;
        let (f, g) = (f.abs(), g.abs());
        let band = boundary_band(&[&f, &g], radii);
        let field = bilinear_maximal(&f, &g, alpha, radii)?;
        let grad = gradient(&field.to_function());
        let dg = gradient(&g).magnitude();
        let df = gradient(&f).magnitude();
        let a = bilinear_maximal(&f, &dg, alpha, radii)?;
        let b = bilinear_maximal(&df, &g, alpha, radii)?;
        let bound = a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect();
        Ok(Self {
            field,
            gradient: grad,
            bound,
            band,
        })
    }
}

/// `|grad M(f, g)| <= M(f, |grad g|) + M(|grad f|, g)` on interior nodes.
pub fn check_gradient_bound(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    radii: &RadiusGrid,
    tol: f64,
) -> Result<InequalityReport> {
    check_gradient_bound_with(f, g, alpha, radii, tol, GradientBoundOptions::default())
}

pub fn check_gradient_bound_with(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    radii: &RadiusGrid,
    tol: f64,
    options: GradientBoundOptions,
) -> Result<InequalityReport> {
    let grid = f.grid();
    let fields = GradientFields::compute(f, g, alpha, radii)?;
    let interior = interior_mask(grid, fields.band);
    let magnitude = fields.gradient.magnitude();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let mut flags = 0;
    for i in (0..grid.len()).filter(|&i| interior[i]) {
        if options.exclude_switching && !fields.field.is_singleton(i) {
            excluded.push(i);
            continue;
        }
        flags += usize::from(fields.field.at_radius_cap(i));
        points.push(PointCheck {
            case: 0,
            node: i,
            x: grid.node_vec(i),
            lhs: magnitude.values()[i],
            rhs: fields.bound[i],
        });
    }
    let mut report = InequalityReport::new("gradient-bound", grid, tol, points)
        .with_parameter("alpha", alpha)
        .with_parameter("radii_max", radii.max())
        .with_parameter("radii_count", radii.len())
        .with_parameter("exclude_switching", options.exclude_switching);
    report.boundary_band = fields.band;
    report.boundary_excluded = interior.iter().filter(|&&m| !m).count();
    report.boundary_flag_count = flags;
    report.excluded = excluded;
    Ok(report)
}

fn collinear(grid: &UniformGrid, x: usize, y: usize) -> Option<usize> {
    let (a, b) = (grid.unravel(x), grid.unravel(y));
    if grid.dim() == 1 || a[1] == b[1] {
        Some(0)
    } else if a[0] == b[0] {
        Some(1)
    } else {
        None
    }
}

/// Trapezoid rule for `bound` along the grid segment from `x` to `y`.
fn segment_integral(grid: &UniformGrid, bound: &[f64], x: usize, y: usize, axis: usize) -> f64 {
    let (a, b) = (grid.unravel(x), grid.unravel(y));
    let (lo, hi) = if a[axis] <= b[axis] { (a, b) } else { (b, a) };
    let mut sum = 0.0;
    let mut idx = lo;
    while idx[axis] < hi[axis] {
        let mut next = idx;
        next[axis] += 1;
        sum += 0.5 * (bound[grid.ravel(idx)] + bound[grid.ravel(next)]);
        idx = next;
    }
    sum * grid.spacing()
}

/// `|M(f,g)(x) - M(f,g)(y)| <= \int_{[x,y]} M(f,|grad g|) + M(|grad f|,g)` for one grid segment.
pub fn check_line_bound(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    radii: &RadiusGrid,
    x: usize,
    y: usize,
    tol: f64,
) -> Result<InequalityReport> {
    check_line_bound_pairs(f, g, alpha, radii, &[(x, y)], tol)
}

/// [`check_line_bound`] for many segments sharing one set of fields.
pub fn check_line_bound_pairs(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    radii: &RadiusGrid,
    pairs: &[(usize, usize)],
    tol: f64,
) -> Result<InequalityReport> {
    let grid = f.grid();
    for &(x, y) in pairs {
        if x >= grid.len() || y >= grid.len() {
            return Err(invalid(format!("segment ({x}, {y}) leaves the grid")));
        }
        if collinear(grid, x, y).is_none() {
            return Err(invalid(format!("nodes {x} and {y} do not share a grid line")));
        }
    }
    let fields = GradientFields::compute(f, g, alpha, radii)?;
    let m = fields.field.values();
    let points = pairs
        .iter()
        .map(|&(x, y)| {
            let axis = collinear(grid, x, y).expect("checked above");
            PointCheck {
                case: 0,
                node: x,
                x: grid.node_vec(x),
                lhs: (m[x] - m[y]).abs(),
                rhs: segment_integral(grid, &fields.bound, x, y, axis),
            }
        })
        .collect();
    let mut report = InequalityReport::new("line-bound", grid, tol, points)
        .with_parameter("alpha", alpha)
        .with_parameter("segments", pairs.len());
    report.boundary_band = fields.band;
    Ok(report)
}

/// Adjacent interior pairs along the first axis plus the longest interior segment.
pub fn interior_segments(grid: &UniformGrid, band: f64) -> Vec<(usize, usize)> {
    let interior = interior_mask(grid, band);
    let (n0, n1) = grid.shape();
    let row = n1 / 2;
    let line: Vec<usize> = (0..n0).map(|i| grid.ravel([i, row])).filter(|&i| interior[i]).collect();
    let mut pairs: Vec<(usize, usize)> = line.windows(2).map(|w| (w[0], w[1])).collect();
    if let (Some(&a), Some(&b)) = (line.first(), line.last()) {
        if a != b {
            pairs.push((a, b));
        }
    }
    pairs
}

/// `v_x(r*)` along `axis` for the smallest good radius `r*` already found at `node`.
fn formula_at(
    f: &SampledFunction,
    g: &SampledFunction,
    df: &SampledFunction,
    dg: &SampledFunction,
    alpha: f64,
    node: usize,
    radius: f64,
) -> Result<f64> {
    Ok(bilinear_signed_average(df, g, alpha, node, radius)? + bilinear_signed_average(f, dg, alpha, node, radius)?)
}

/// Derivative of `M(f, g)` at `node` along `axis` from the averaged product rule at the
/// smallest good radius; at `r* = 0` this is `D f(x) g(x) + f(x) D g(x)`.
pub fn derivative_formula(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    node: usize,
    axis: usize,
    radii: &RadiusGrid,
) -> Result<f64> {
    f.require_same_grid(g)?;
    if axis >= f.grid().dim() {
        return Err(invalid(format!("axis {axis} out of range")));
    }
    let (f, g) = (f.abs(), g.abs());
    let good = crate::maximal::good_radii(&f, &g, alpha, node, radii, crate::maximal::DEFAULT_GOOD_RADII_TOL)?;
    let df = gradient(&f).component_function(axis);
    let dg = gradient(&g).component_function(axis);
    formula_at(&f, &g, &df, &dg, alpha, node, good[0])
}

/// Compares the derivative formula with centered differences of the computed field on
/// interior nodes whose good radius is unique.
///
/// Ties, and singleton nodes whose stencil crosses a jump between branches of
/// maximizing radii, are listed in `excluded`. The required singleton share
/// counts every singleton node.
pub fn check_derivative_formula(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    radii: &RadiusGrid,
    tol: f64,
) -> Result<InequalityReport> {
    f.require_same_grid(g)?;
    let grid = f.grid();
    let (f, g) = (f.abs(), g.abs());
    let band = boundary_band(&[&f, &g], radii);
    let field = bilinear_maximal(&f, &g, alpha, radii)?;
    let fd = gradient(&field.to_function());
    let (grad_f, grad_g) = (gradient(&f), gradient(&g));
    let df: Vec<SampledFunction> = (0..grid.dim()).map(|a| grad_f.component_function(a)).collect();
    let dg: Vec<SampledFunction> = (0..grid.dim()).map(|a| grad_g.component_function(a)).collect();
    let interior = interior_mask(grid, band);
    let candidates: Vec<usize> = (0..grid.len())
        .filter(|&i| interior[i] && field.value(i) > 0.0)
        .collect();
    let excluded: Vec<usize> = candidates.iter().copied().filter(|&i| !field.is_singleton(i)).collect();
    let singles: Vec<usize> = candidates.iter().copied().filter(|&i| field.is_singleton(i)).collect();
    let (smooth, switching): (Vec<usize>, Vec<usize>) = singles.iter().partition(|&&i| on_one_branch(&field, radii, i));
    let points = smooth
        .par_iter()
        .map(|&i| {
            let r = field.good_radii(i)[0];
            let mut err: f64 = 0.0;
            for axis in 0..grid.dim() {
                let formula = formula_at(&f, &g, &df[axis], &dg[axis], alpha, i, r)?;
                err = err.max((formula - fd.component(axis)[i]).abs());
            }
            Ok(PointCheck {
                case: 0,
                node: i,
                x: grid.node_vec(i),
                lhs: err,
                rhs: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fraction = if candidates.is_empty() {
        1.0
    } else {
        singles.len() as f64 / candidates.len() as f64
    };
    let flags = singles.iter().filter(|&&i| field.at_radius_cap(i)).count();
    let mut report = InequalityReport::new("derivative-formula", grid, tol, points)
        .with_parameter("alpha", alpha)
        .with_parameter("candidates", candidates.len())
        .with_parameter("singletons", singles.len())
        .with_parameter("switching_excluded", switching.len())
        .with_requirement(Requirement::at_least(
            "singleton_fraction",
            fraction,
            MIN_SINGLETON_FRACTION,
        ));
    report.boundary_band = band;
    report.boundary_excluded = interior.iter().filter(|&&m| !m).count();
    report.boundary_flag_count = flags;
    report.excluded = excluded;
    report.excluded.extend(switching);
    Ok(report)
}

/// Whether the centered stencil at `node` stays on one branch of maximizing radii:
/// every neighbour has a unique good radius at most one grid step from the node's.
fn on_one_branch(field: &MaximalField, radii: &RadiusGrid, node: usize) -> bool {
    let grid = field.grid();
    let position = |r: f64| radii.radii().partition_point(|&s| s < r);
    let here = position(field.good_radii(node)[0]);
    let idx = grid.unravel(node);
    (0..grid.dim()).all(|axis| {
        [-1isize, 1].iter().all(|&d| {
            let mut n = idx;
            let Some(v) = n[axis].checked_add_signed(d).filter(|&v| v < grid.counts()[axis]) else {
                return false;
            };
            n[axis] = v;
            let j = grid.ravel(n);
            field.is_singleton(j) && position(field.good_radii(j)[0]).abs_diff(here) <= 1
        })
    })
}

/// `C_f = ||f||_{L^1(B_1)} / (2^n omega_n)`.
pub fn decay_constant(f: &SampledFunction) -> f64 {
    let grid = f.grid();
    let unit = ball_mask(grid, &[0.0, 0.0], 1.0, true);
    let mass: f64 = f
        .values()
        .iter()
        .zip(&unit)
        .filter(|(_, &m)| m)
        .map(|(v, _)| v.abs())
        .sum::<f64>()
        * grid.cell_volume();
    mass / (2f64.powi(grid.dim() as i32) * ball_measure(1.0, grid.dim()))
}

/// `M f(x) >= C_f |x|^{-n}` at nodes with `|x| >= 1`.
pub fn check_decay_bound(
    f: &SampledFunction,
    sample_points: &[usize],
    radii: &RadiusGrid,
    tol: f64,
) -> Result<InequalityReport> {
    let grid = f.grid();
    let c = decay_constant(f);
    let dim = grid.dim() as i32;
    let m = hl_maximal(f, radii)?;
    let mut points = Vec::with_capacity(sample_points.len());
    let mut flags = 0;
    for &i in sample_points {
        if i >= grid.len() {
            return Err(invalid(format!("node {i} out of range")));
        }
        let x = grid.node_vec(i);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < 1.0 - 1e-12 {
            return Err(invalid(format!("sample point {x:?} lies inside the unit ball")));
        }
        flags += usize::from(m.at_radius_cap(i));
        points.push(PointCheck {
            case: 0,
            node: i,
            x,
            lhs: c * r.powi(-dim),
            rhs: m.value(i),
        });
    }
    let mut report =
        InequalityReport::new("decay-bound", grid, tol, points).with_constant(Constant::new("C_f", c, Source::Theory));
    report.boundary_flag_count = flags;
    Ok(report)
}

/// `avg_{B_R(x)} |f| <= m(B_R)^{-1/p} ||f||_p` at every node and radius.
pub fn check_avg_upper_bound(f: &SampledFunction, p: f64, radius_list: &[f64], tol: f64) -> Result<InequalityReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("exponent must lie in [1, inf), got {p}")));
    }
    if radius_list.is_empty() {
        return Err(invalid("radius list is empty"));
    }
    let grid = f.grid();
    let norm = lp_norm(f, p)?;
    let mut points = Vec::new();
    let mut envelopes = Vec::with_capacity(radius_list.len());
    for &r in radius_list {
        let envelope = ball_measure(r, grid.dim()).powf(-1.0 / p) * norm;
        envelopes.push(envelope);
        let avgs = ball_averages(f, r)?;
        points.extend(avgs.into_iter().enumerate().map(|(i, a)| PointCheck {
            case: 0,
            node: i,
            x: grid.node_vec(i),
            lhs: a,
            rhs: envelope,
        }));
    }
    let mut sorted: Vec<(f64, f64)> = radius_list.iter().copied().zip(envelopes).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let increase = sorted.windows(2).map(|w| w[1].1 - w[0].1).fold(0.0f64, f64::max);
    Ok(InequalityReport::new("avg-upper-bound", grid, tol, points)
        .with_parameter("p", p)
        .with_parameter("radii", radius_list)
        .with_constant(Constant::new("norm_p", norm, Source::Derived))
        .with_requirement(Requirement::at_most("envelope_increase", increase, 0.0)))
}

/// Smallest grid radius `R_m` beyond which every ball average of `|u|` is at most `1/m`.
pub fn splitting_radius(u: &SampledFunction, m: f64, radii: &RadiusGrid) -> Result<Option<f64>> {
    if !(m > 0.0) {
        return Err(invalid(format!("level m must be positive, got {m}")));
    }
    let positive = radii.positive();
    let peaks = positive
        .iter()
        .map(|&r| Ok(ball_averages(u, r)?.into_iter().fold(0.0f64, f64::max)))
        .collect::<Result<Vec<f64>>>()?;
    let mut found = None;
    for (j, &r) in positive.iter().enumerate().rev() {
        if peaks[j] > 1.0 / m {
            break;
        }
        found = Some(r);
    }
    Ok(found)
}

/// `M u(x) <= max{M_{B*} u(x), 1/m}` on `B_L(0)` with `B* = B_{L + 2 R_m}(0)`.
#[allow(clippy::too_many_arguments)]
pub fn check_splitting(
    u: &SampledFunction,
    l: f64,
    r_m: f64,
    m: f64,
    radii: &RadiusGrid,
    tol: f64,
) -> Result<InequalityReport> {
    if !(l > 0.0 && r_m > 0.0 && m > 0.0) {
        return Err(invalid("L, R_m and m must be positive"));
    }
    let grid = u.grid();
    let outer = l + 2.0 * r_m;
    for axis in 0..grid.dim() {
        let lo = grid.origin()[axis];
        let hi = lo + (grid.counts()[axis] - 1) as f64 * grid.spacing();
        if lo > -outer || hi < outer {
            return Err(invalid(format!(
                "hull [{lo}, {hi}] on axis {axis} does not contain the ball of radius {outer}"
            )));
        }
    }
    let global = hl_maximal(u, radii)?;
    let star = ball_mask(grid, &[0.0, 0.0], outer, false);
    let local = local_maximal(u, &star, radii)?;
    let inner = ball_mask(grid, &[0.0, 0.0], l, false);
    let points = (0..grid.len())
        .filter(|&i| inner[i])
        .map(|i| PointCheck {
            case: 0,
            node: i,
            x: grid.node_vec(i),
            lhs: global.value(i),
            rhs: local.value(i).max(1.0 / m),
        })
        .collect();
    Ok(InequalityReport::new("splitting", grid, tol, points)
        .with_parameter("L", l)
        .with_parameter("R_m", r_m)
        .with_parameter("m", m))
}
