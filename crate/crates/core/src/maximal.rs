//! Ball averages and the global, local and bilinear maximal operators.
//!
//! Suprema over `R > 0` become maxima over a [`RadiusGrid`]. A ball of radius
//! `R` around a node is the set of lattice nodes at distance `<= R`
//! (closed ball), and averages divide by the number of lattice nodes in it,
//! counting zero-extended nodes outside the hull. Averages are therefore
//! translation invariant, and a constant averages to itself on any ball
//! contained in the hull.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::{interpolate_index, SampledFunction, UniformGrid};
use crate::prefix::PrefixTable;
use crate::radius::{lattice_radius_sq, sorted_offsets, BallStencil, LatticeBall, RadiusGrid};

/// Default relative tolerance for recognising a radius as maximizing.
pub const DEFAULT_GOOD_RADII_TOL: f64 = 1e-9;

/// How per-ball sums of `|f|` are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AveragingPath {
    /// Sum every node of every ball directly.
    Naive,
    /// Recover ball sums from a [`PrefixTable`] (strips of a summed-area table in 2D).
    Prefix,
}

/// Output of a maximal operator: one value per node plus its maximizing radii.
#[derive(Clone, Debug)]
pub struct MaximalField {
    grid: UniformGrid,
    values: Vec<f64>,
    good_radii: Vec<Vec<f64>>,
    capped: Vec<bool>,
    domain: Option<Vec<bool>>,
    radius_cap: f64,
    tolerance: f64,
}

impl MaximalField {
    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Radii attaining the maximum at `node` within the relative tolerance.
    pub fn good_radii(&self, node: usize) -> &[f64] {
        &self.good_radii[node]
    }

    pub fn is_singleton(&self, node: usize) -> bool {
        self.good_radii[node].len() == 1
    }

    /// Whether a positive maximum at `node` is attained at the largest radius `r_J`.
    pub fn at_radius_cap(&self, node: usize) -> bool {
        self.capped[node]
    }

    /// Number of nodes whose maximum is attained at `r_J`.
    pub fn boundary_flag_count(&self) -> usize {
        self.capped.iter().filter(|&&c| c).count()
    }

    pub fn radius_cap(&self) -> f64 {
        self.radius_cap
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Nodes on which the field is defined (`None` means every node).
    pub fn domain(&self) -> Option<&[bool]> {
        self.domain.as_deref()
    }

    pub fn in_domain(&self, node: usize) -> bool {
        self.domain.as_ref().is_none_or(|d| d[node])
    }

    /// The field as a sampled function (zero off the domain).
    pub fn to_function(&self) -> SampledFunction {
        SampledFunction::new(self.grid.clone(), self.values.clone()).expect("field values are finite")
    }
}

/// Picks the maximum of `avgs` and every radius within `tol` of it.
fn select(avgs: &[f64], radii: &[f64], tol: f64) -> (f64, Vec<f64>) {
    let max = avgs.iter().copied().fold(0.0f64, f64::max);
    let floor = (1.0 - tol) * max;
    let good = avgs
        .iter()
        .zip(radii)
        .filter(|(a, _)| **a >= floor)
        .map(|(_, r)| *r)
        .collect();
    (max, good)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(invalid(format!("good-radii tolerance must lie in (0, 0.1], got {tol}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha == 1.0 || !alpha.is_finite() {
        return Err(invalid(format!(
            "alpha must be finite and different from 1, got {alpha}"
        )));
    }
    Ok(())
}

fn check_node(grid: &UniformGrid, node: usize) -> Result<()> {
    if node >= grid.len() {
        return Err(invalid(format!("node {node} out of range for {} nodes", grid.len())));
    }
    Ok(())
}

/// Direct sum of `|f|` over the lattice ball `|k|^2 <= m2` around `node`.
fn direct_ball_sum(f: &SampledFunction, node: usize, ball: &LatticeBall) -> f64 {
    let grid = f.grid();
    let [i0, i1] = grid.unravel(node);
    let (i0, i1) = (i0 as isize, i1 as isize);
    let s = ball.half_width;
    if grid.dim() == 1 {
        let n = grid.shape().0 as isize;
        let lo = (i0 - s).max(0) as usize;
        let hi = (i0 + s).min(n - 1);
        if (lo as isize) > hi {
            return 0.0;
        }
        return f.values()[lo..=hi as usize].iter().map(|v| v.abs()).sum();
    }
    let mut sum = 0.0;
    for &(a, b, w) in &ball.strips {
        for d0 in a..=b {
            for d1 in -w..=w {
                sum += f.get(i0 + d0, i1 + d1).abs();
            }
        }
    }
    sum
}

fn prefix_ball_sum(table: &PrefixTable, dim: usize, node: [usize; 2], ball: &LatticeBall) -> f64 {
    let (i0, i1) = (node[0] as isize, node[1] as isize);
    if dim == 1 {
        let s = ball.half_width;
        return table.clipped_sum_1d(i0 - s, i0 + s);
    }
    ball.strips
        .iter()
        .map(|&(a, b, w)| table.clipped_sum_2d(i0 + a, i0 + b, i1 - w, i1 + w))
        .sum()
}

/// Average of `|f|` over the closed lattice ball of radius `radius` around `node`.
pub fn ball_average(f: &SampledFunction, node: usize, radius: f64) -> Result<f64> {
    let grid = f.grid();
    check_node(grid, node)?;
    let h = grid.spacing();
    if !(radius >= h * (1.0 - 1e-12)) {
        return Err(invalid(format!("radius {radius} is below the grid spacing {h}")));
    }
    let ball = LatticeBall::new(grid.dim(), lattice_radius_sq(radius, h));
    Ok(direct_ball_sum(f, node, &ball) / ball.count as f64)
}

/// Averages of `|f|` over the ball of radius `radius` around every node (prefix path).
pub fn ball_averages(f: &SampledFunction, radius: f64) -> Result<Vec<f64>> {
    let grid = f.grid();
    let h = grid.spacing();
    if !(radius >= h * (1.0 - 1e-12)) {
        return Err(invalid(format!("radius {radius} is below the grid spacing {h}")));
    }
    let table = PrefixTable::new(f);
    let ball = LatticeBall::new(grid.dim(), lattice_radius_sq(radius, h));
    Ok((0..grid.len())
        .into_par_iter()
        .map(|i| prefix_ball_sum(&table, grid.dim(), grid.unravel(i), &ball) / ball.count as f64)
        .collect())
}

/// Evaluates `|f(x - alpha k h) g(x - k h)|` for a lattice offset `k`.
struct BilinearTerm<'a> {
    f: &'a SampledFunction,
    g: &'a SampledFunction,
    alpha: f64,
    integer_alpha: Option<isize>,
}

impl<'a> BilinearTerm<'a> {
    fn new(f: &'a SampledFunction, g: &'a SampledFunction, alpha: f64) -> Self {
        let integer_alpha = (alpha.fract() == 0.0 && alpha.abs() < 1e6).then_some(alpha as isize);
        Self {
            f,
            g,
            alpha,
            integer_alpha,
        }
    }

    #[inline]
    fn eval(&self, i0: isize, i1: isize, k: [isize; 2]) -> f64 {
        self.product(i0, i1, k).abs()
    }

    #[inline]
    fn product(&self, i0: isize, i1: isize, k: [isize; 2]) -> f64 {
        let gv = self.g.get(i0 - k[0], i1 - k[1]);
        if gv == 0.0 {
            return 0.0;
        }
        let fv = match self.integer_alpha {
            Some(a) => self.f.get(i0 - a * k[0], i1 - a * k[1]),
            None => interpolate_index(
                self.f,
                [
                    i0 as f64 - self.alpha * k[0] as f64,
                    i1 as f64 - self.alpha * k[1] as f64,
                ],
            ),
        };
        fv * gv
    }
}

/// `u_x(r)`: the average of `|f(x - alpha y) g(x - y)|` over the lattice ball of
/// radius `r`, or `|f(x) g(x)|` when `r = 0`.
///
/// Off-grid values of `f` are interpolated multilinearly.
pub fn bilinear_average(f: &SampledFunction, g: &SampledFunction, alpha: f64, node: usize, radius: f64) -> Result<f64> {
    check_alpha(alpha)?;
    f.require_same_grid(g)?;
    let grid = f.grid();
    check_node(grid, node)?;
    let h = grid.spacing();
    let term = BilinearTerm::new(f, g, alpha);
    let [i0, i1] = grid.unravel(node);
    let (i0, i1) = (i0 as isize, i1 as isize);
    if radius == 0.0 {
        return Ok(term.eval(i0, i1, [0, 0]));
    }
    if !(radius >= h * (1.0 - 1e-12)) {
        return Err(invalid(format!(
            "radius {radius} must be 0 or at least the grid spacing {h}"
        )));
    }
    let offsets = sorted_offsets(grid.dim(), lattice_radius_sq(radius, h));
    let mut sum = 0.0;
    for &k in &offsets {
        sum += term.eval(i0, i1, k);
    }
    Ok(sum / offsets.len() as f64)
}

/// Signed average of `f(x - alpha y) g(x - y)` over the lattice ball of radius
/// `r`, or `f(x) g(x)` when `r = 0`.
pub fn bilinear_signed_average(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    node: usize,
    radius: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    f.require_same_grid(g)?;
    let grid = f.grid();
    check_node(grid, node)?;
    let h = grid.spacing();
    let term = BilinearTerm::new(f, g, alpha);
    let [i0, i1] = grid.unravel(node);
    let (i0, i1) = (i0 as isize, i1 as isize);
    if radius == 0.0 {
        return Ok(term.product(i0, i1, [0, 0]));
    }
    if !(radius >= h * (1.0 - 1e-12)) {
        return Err(invalid(format!(
            "radius {radius} must be 0 or at least the grid spacing {h}"
        )));
    }
    let offsets = sorted_offsets(grid.dim(), lattice_radius_sq(radius, h));
    let sum: f64 = offsets.iter().map(|&k| term.product(i0, i1, k)).sum();
    Ok(sum / offsets.len() as f64)
}

/// Global Hardy-Littlewood maximal function over the radius grid, via prefix tables.
pub fn hl_maximal(f: &SampledFunction, radii: &RadiusGrid) -> Result<MaximalField> {
    hl_maximal_with(f, radii, AveragingPath::Prefix, DEFAULT_GOOD_RADII_TOL)
}

/// Global maximal function summing every ball directly; the reference for [`hl_maximal`].
pub fn hl_maximal_naive(f: &SampledFunction, radii: &RadiusGrid) -> Result<MaximalField> {
    hl_maximal_with(f, radii, AveragingPath::Naive, DEFAULT_GOOD_RADII_TOL)
}

/// Per-node averages of `|f|` for every positive radius, in radius order.
struct BallAverager<'a> {
    f: &'a SampledFunction,
    stencil: BallStencil,
    table: Option<PrefixTable>,
}

impl<'a> BallAverager<'a> {
    fn new(f: &'a SampledFunction, radii: &RadiusGrid, path: AveragingPath) -> Self {
        let table = (path == AveragingPath::Prefix).then(|| PrefixTable::new(f));
        Self {
            f,
            stencil: BallStencil::new(f.grid(), radii),
            table,
        }
    }

    /// Fills `out` with the averages of the first `out.len()` positive radii.
    fn averages(&self, node: usize, out: &mut [f64]) {
        let grid = self.f.grid();
        let idx = grid.unravel(node);
        for (slot, ball) in out.iter_mut().zip(&self.stencil.balls) {
            let sum = match &self.table {
                Some(t) => prefix_ball_sum(t, grid.dim(), idx, ball),
                None => direct_ball_sum(self.f, node, ball),
            };
            *slot = sum / ball.count as f64;
        }
    }
}

/// Maximal function values only, without good-radii bookkeeping.
pub fn hl_values(f: &SampledFunction, radii: &RadiusGrid, path: AveragingPath) -> Result<Vec<f64>> {
    let nodes: Vec<usize> = (0..f.grid().len()).collect();
    hl_values_at(f, radii, path, &nodes)
}

/// [`hl_values`] restricted to the listed nodes, in the order given.
pub fn hl_values_at(f: &SampledFunction, radii: &RadiusGrid, path: AveragingPath, nodes: &[usize]) -> Result<Vec<f64>> {
    radii.check_against(f.grid())?;
    if let Some(&bad) = nodes.iter().find(|&&i| i >= f.grid().len()) {
        return Err(invalid(format!("node {bad} out of range for {} nodes", f.grid().len())));
    }
    let averager = BallAverager::new(f, radii, path);
    let j = radii.positive().len();
    let zero = radii.include_zero();
    Ok(nodes
        .par_iter()
        .map_init(
            || vec![0.0; j],
            |buf, &i| {
                averager.averages(i, buf);
                let m = buf.iter().copied().fold(0.0f64, f64::max);
                if zero {
                    m.max(f.values()[i].abs())
                } else {
                    m
                }
            },
        )
        .collect())
}

/// Global maximal function with an explicit averaging path and good-radii tolerance.
///
/// Only positive radii are candidates unless the grid includes `r = 0`, whose
/// candidate value is `|f(x)|`.
pub fn hl_maximal_with(f: &SampledFunction, radii: &RadiusGrid, path: AveragingPath, tol: f64) -> Result<MaximalField> {
    check_tol(tol)?;
    radii.check_against(f.grid())?;
    let averager = BallAverager::new(f, radii, path);
    let cands = radii.radii();
    let zero = radii.include_zero();
    let j = radii.positive().len();
    let r_max = radii.max();
    let per_node: Vec<(f64, Vec<f64>)> = (0..f.grid().len())
        .into_par_iter()
        .map_init(
            || vec![0.0; cands.len()],
            |buf, i| {
                let offset = if zero {
                    buf[0] = f.values()[i].abs();
                    1
                } else {
                    0
                };
                averager.averages(i, &mut buf[offset..offset + j]);
                select(buf, cands, tol)
            },
        )
        .collect();
    Ok(assemble(f.grid(), per_node, None, r_max, tol))
}

fn assemble(
    grid: &UniformGrid,
    per_node: Vec<(f64, Vec<f64>)>,
    domain: Option<Vec<bool>>,
    r_max: f64,
    tol: f64,
) -> MaximalField {
    let mut values = Vec::with_capacity(per_node.len());
    let mut good_radii = Vec::with_capacity(per_node.len());
    let mut capped = Vec::with_capacity(per_node.len());
    for (v, good) in per_node {
        values.push(v);
        capped.push(v > 0.0 && r_max > 0.0 && good.last().is_some_and(|&r| r == r_max));
        good_radii.push(good);
    }
    MaximalField {
        grid: grid.clone(),
        values,
        good_radii,
        capped,
        domain,
        radius_cap: r_max,
        tolerance: tol,
    }
}

/// `delta_x`: distance from each masked node to the nearest unmasked lattice node,
/// minus `h/2`. Lattice nodes outside the hull count as unmasked. Unmasked nodes get 0.
pub fn distance_to_complement(grid: &UniformGrid, mask: &[bool]) -> Result<Vec<f64>> {
    if mask.len() != grid.len() {
        return Err(invalid(format!(
            "mask has {} entries for {} nodes",
            mask.len(),
            grid.len()
        )));
    }
    if !mask.iter().any(|&m| m) {
        return Err(invalid("domain mask is empty"));
    }
    let (n0, n1) = grid.shape();
    let dim = grid.dim();
    let masked = |i0: isize, i1: isize| -> bool {
        i0 >= 0 && i1 >= 0 && (i0 as usize) < n0 && (i1 as usize) < n1 && mask[i0 as usize * n1 + i1 as usize]
    };
    let neighbours: &[[isize; 2]] = if dim == 1 {
        &[[-1, 0], [1, 0]]
    } else {
        &[[-1, 0], [1, 0], [0, -1], [0, 1]]
    };
    // The nearest unmasked node always has a masked 4-neighbour, so the search
    // only needs that frontier (including virtual nodes just outside the hull).
    let mut frontier: Vec<[isize; 2]> = Vec::new();
    for i0 in -1..=n0 as isize {
        for i1 in if dim == 1 { 0..=0 } else { -1..=n1 as isize } {
            if masked(i0, i1) {
                continue;
            }
            if neighbours.iter().any(|d| masked(i0 + d[0], i1 + d[1])) {
                frontier.push([i0, i1]);
            }
        }
    }
    let h = grid.spacing();
    Ok((0..grid.len())
        .into_par_iter()
        .map(|i| {
            if !mask[i] {
                return 0.0;
            }
            let [a, b] = grid.unravel(i);
            let d2 = frontier
                .iter()
                .map(|p| {
                    let d0 = (p[0] - a as isize) as f64;
                    let d1 = (p[1] - b as isize) as f64;
                    d0 * d0 + d1 * d1
                })
                .fold(f64::INFINITY, f64::min);
            d2.sqrt() * h - 0.5 * h
        })
        .collect())
}

/// Local maximal function on the masked domain: candidate radii satisfy `r < delta_x`.
///
/// Nodes without an admissible positive radius take the `r -> 0` value `|f(x)|`.
/// Off the domain the field is 0 with no good radii.
pub fn local_maximal(f: &SampledFunction, domain_mask: &[bool], radii: &RadiusGrid) -> Result<MaximalField> {
    local_maximal_with(f, domain_mask, radii, DEFAULT_GOOD_RADII_TOL)
}

pub fn local_maximal_with(
    f: &SampledFunction,
    domain_mask: &[bool],
    radii: &RadiusGrid,
    tol: f64,
) -> Result<MaximalField> {
    check_tol(tol)?;
    radii.check_against(f.grid())?;
    let delta = distance_to_complement(f.grid(), domain_mask)?;
    let averager = BallAverager::new(f, radii, AveragingPath::Prefix);
    let cands = radii.radii();
    let zero = radii.include_zero();
    let positive = radii.positive();
    let r_max = radii.max();
    let per_node: Vec<(f64, Vec<f64>)> = (0..f.grid().len())
        .into_par_iter()
        .map_init(
            || vec![0.0; cands.len()],
            |buf, i| {
                if !domain_mask[i] {
                    return (0.0, Vec::new());
                }
                let admissible = positive.partition_point(|&r| r < delta[i]);
                let point = f.values()[i].abs();
                if admissible == 0 {
                    return (point, vec![0.0]);
                }
                let offset = if zero {
                    buf[0] = point;
                    1
                } else {
                    0
                };
                averager.averages(i, &mut buf[offset..offset + admissible]);
                let n = offset + admissible;
                select(&buf[..n], &cands[..n], tol)
            },
        )
        .collect();
    Ok(assemble(f.grid(), per_node, Some(domain_mask.to_vec()), r_max, tol))
}

/// Bilinear maximal function `sup_r u_x(r)` over the radius grid (including `r = 0`
/// when the grid does).
pub fn bilinear_maximal(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    radii: &RadiusGrid,
) -> Result<MaximalField> {
    bilinear_maximal_with(f, g, alpha, radii, DEFAULT_GOOD_RADII_TOL)
}

pub fn bilinear_maximal_with(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    radii: &RadiusGrid,
    tol: f64,
) -> Result<MaximalField> {
    check_alpha(alpha)?;
    check_tol(tol)?;
    f.require_same_grid(g)?;
    let grid = f.grid();
    radii.check_against(grid)?;
    let stencil = BallStencil::new(grid, radii);
    let term = BilinearTerm::new(f, g, alpha);
    let cands = radii.radii();
    let zero = radii.include_zero();
    let r_max = radii.max();
    let per_node: Vec<(f64, Vec<f64>)> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; cands.len()],
            |buf, i| {
                let [a, b] = grid.unravel(i);
                let (i0, i1) = (a as isize, b as isize);
                let mut slot = 0;
                if zero {
                    buf[0] = term.eval(i0, i1, [0, 0]);
                    slot = 1;
                }
                // Running sum over offsets sorted by norm: each ball is a prefix.
                let mut sum = 0.0;
                let mut visited = 0;
                for ball in &stencil.balls {
                    while visited < ball.count {
                        sum += term.eval(i0, i1, stencil.offsets[visited]);
                        visited += 1;
                    }
                    buf[slot] = sum / ball.count as f64;
                    slot += 1;
                }
                select(buf, cands, tol)
            },
        )
        .collect();
    Ok(assemble(grid, per_node, None, r_max, tol))
}

/// Every grid radius whose bilinear average at `node` is within `tol` of the maximum.
pub fn good_radii(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: f64,
    node: usize,
    radii: &RadiusGrid,
    tol: f64,
) -> Result<Vec<f64>> {
    check_tol(tol)?;
    radii.check_against(f.grid())?;
    let avgs = radii
        .radii()
        .iter()
        .map(|&r| bilinear_average(f, g, alpha, node, r))
        .collect::<Result<Vec<f64>>>()?;
    Ok(select(&avgs, radii.radii(), tol).1)
}

/// Lebesgue measure of the ball of radius `r` in dimension 1 or 2.
pub fn ball_measure(r: f64, dim: usize) -> f64 {
    match dim {
        1 => 2.0 * r,
        _ => std::f64::consts::PI * r * r,
    }
}

/// Hölder bound `m(B_r)^{-(1/p + 1/q)} ||f||_p ||g||_q` on `u_x(r)`.
pub fn holder_envelope(p: f64, q: f64, norm_f_p: f64, norm_g_q: f64, r: f64, dim: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
        return Err(invalid(format!("exponents must lie in (1, inf), got p = {p}, q = {q}")));
    }
    if norm_f_p < 0.0 || norm_g_q < 0.0 {
        return Err(invalid("norms must be non-negative"));
    }
    if dim != 1 && dim != 2 {
        return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
    }
    Ok(ball_measure(r, dim).powf(-(1.0 / p + 1.0 / q)) * norm_f_p * norm_g_q)
}
