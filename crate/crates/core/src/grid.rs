//! Uniform grids in one or two dimensions and real-valued samples on them.
//!
//! Nodes are stored row-major: the flat index of node `(i0, i1)` is
//! `i0 * n1 + i1`, so the last axis varies fastest. Outside the sampled box
//! every function is zero-extended.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Snap tolerance, in units of the spacing, for recognising a point as a node.
const NODE_SNAP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformGrid {
    dim: usize,
    origin: Vec<f64>,
    spacing: f64,
    counts: Vec<usize>,
}

/// Builds a grid with nodes `origin + i * spacing` along every axis.
pub fn build_grid(dim: usize, origin: &[f64], spacing: f64, counts: &[usize]) -> Result<UniformGrid> {
    UniformGrid::new(dim, origin, spacing, counts)
}

impl UniformGrid {
    pub fn new(dim: usize, origin: &[f64], spacing: f64, counts: &[usize]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if origin.len() != dim || counts.len() != dim {
            return Err(invalid(format!(
                "origin and counts must have length {dim} (got {} and {})",
                origin.len(),
                counts.len()
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(invalid(format!("spacing must be positive and finite, got {spacing}")));
        }
        if let Some(&n) = counts.iter().find(|&&n| n < 2) {
            return Err(invalid(format!("every axis needs at least 2 nodes, got {n}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(invalid("origin must be finite"));
        }
        Ok(Self {
            dim,
            origin: origin.to_vec(),
            spacing,
            counts: counts.to_vec(),
        })
    }

    /// One-dimensional grid covering `[lo, hi]` with the given spacing.
    ///
    /// The node count is rounded, so `hi` should be (close to) `lo + k * spacing`.
    pub fn interval(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(invalid(format!("empty interval [{lo}, {hi}]")));
        }
        let cells = ((hi - lo) / spacing).round() as usize;
        Self::new(1, &[lo], spacing, &[cells + 1])
    }

    /// Square grid covering `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(invalid(format!("empty interval [{lo}, {hi}]")));
        }
        let n = ((hi - lo) / spacing).round() as usize + 1;
        Self::new(2, &[lo, lo], spacing, &[n, n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Node counts as `(n0, n1)`, with `n1 = 1` in one dimension.
    pub fn shape(&self) -> (usize, usize) {
        match self.dim {
            1 => (self.counts[0], 1),
            _ => (self.counts[0], self.counts[1]),
        }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lebesgue weight of one node, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing
    }

    pub fn unravel(&self, flat: usize) -> [usize; 2] {
        let (_, n1) = self.shape();
        [flat / n1, flat % n1]
    }

    pub fn ravel(&self, idx: [usize; 2]) -> usize {
        let (_, n1) = self.shape();
        idx[0] * n1 + idx[1]
    }

    /// Coordinates of a node, padded with zero in one dimension.
    pub fn node(&self, flat: usize) -> [f64; 2] {
        let [i0, i1] = self.unravel(flat);
        match self.dim {
            1 => [self.coord(0, i0), 0.0],
            _ => [self.coord(0, i0), self.coord(1, i1)],
        }
    }

    pub fn node_vec(&self, flat: usize) -> Vec<f64> {
        self.node(flat)[..self.dim].to_vec()
    }

    /// Largest axis extent `(n - 1) h`.
    pub fn max_extent(&self) -> f64 {
        self.counts
            .iter()
            .map(|&n| (n - 1) as f64 * self.spacing)
            .fold(0.0, f64::max)
    }

    /// Euclidean diameter of the hull.
    pub fn diameter(&self) -> f64 {
        self.counts
            .iter()
            .map(|&n| ((n - 1) as f64 * self.spacing).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Continuous index of a point along every axis.
    pub fn fractional_index(&self, point: &[f64]) -> [f64; 2] {
        let mut t = [0.0; 2];
        for axis in 0..self.dim {
            t[axis] = (point[axis] - self.origin[axis]) / self.spacing;
        }
        t
    }

    /// Flat index of the node at `point`, if `point` is a node up to rounding.
    pub fn locate(&self, point: &[f64]) -> Option<usize> {
        if point.len() != self.dim {
            return None;
        }
        let t = self.fractional_index(point);
        let mut idx = [0usize; 2];
        for axis in 0..self.dim {
            let r = t[axis].round();
            if (t[axis] - r).abs() > NODE_SNAP || r < 0.0 || r as usize >= self.counts[axis] {
                return None;
            }
            idx[axis] = r as usize;
        }
        Some(self.ravel(idx))
    }

    /// Distance, in whole cells, from a node to the nearest hull face.
    pub fn cells_to_boundary(&self, flat: usize) -> usize {
        let idx = self.unravel(flat);
        (0..self.dim)
            .map(|a| idx[a].min(self.counts[a] - 1 - idx[a]))
            .min()
            .unwrap_or(0)
    }
}

/// Real values on every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "expected {} values for the grid, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Sampling {
                index: grid.unravel(i)[..grid.dim()].to_vec(),
                point: grid.node_vec(i),
                value: values[i],
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &UniformGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &UniformGrid, c: f64) -> Self {
        Self {
            values: vec![c; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at a signed 2D index, zero outside the hull.
    #[inline]
    pub fn get(&self, i0: isize, i1: isize) -> f64 {
        let (n0, n1) = self.grid.shape();
        if i0 < 0 || i1 < 0 || i0 as usize >= n0 || i1 as usize >= n1 {
            0.0
        } else {
            self.values[i0 as usize * n1 + i1 as usize]
        }
    }

    /// Applies `op` pointwise; the result must stay finite.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| op(v)).collect())
    }

    pub fn abs(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise combination of two samples on the same grid.
    pub fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.require_same_grid(other)?;
        Self::new(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub(crate) fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(invalid("functions live on different grids"));
        }
        Ok(())
    }

    /// True when every node within `layers` cells of the hull boundary is exactly zero.
    pub fn vanishes_near_boundary(&self, layers: usize) -> bool {
        (0..self.values.len())
            .filter(|&i| self.grid.cells_to_boundary(i) < layers)
            .all(|i| self.values[i] == 0.0)
    }
}

/// Evaluates `evaluator` at every node.
pub fn sample(evaluator: impl Fn(&[f64]) -> f64, grid: &UniformGrid) -> Result<SampledFunction> {
    let dim = grid.dim();
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let node = grid.node(i);
        let v = evaluator(&node[..dim]);
        if !v.is_finite() {
            return Err(Error::Sampling {
                index: grid.unravel(i)[..dim].to_vec(),
                point: node[..dim].to_vec(),
                value: v,
            });
        }
        values.push(v);
    }
    Ok(SampledFunction {
        grid: grid.clone(),
        values,
    })
}

/// Multilinear interpolation at an arbitrary point; zero outside the hull.
pub fn interpolate(f: &SampledFunction, point: &[f64]) -> f64 {
    if point.len() != f.grid.dim() {
        return 0.0;
    }
    let t = f.grid.fractional_index(point);
    interpolate_index(f, t)
}

/// Multilinear interpolation at a continuous index position.
pub(crate) fn interpolate_index(f: &SampledFunction, t: [f64; 2]) -> f64 {
    let grid = &f.grid;
    let (n0, n1) = grid.shape();
    let dim = grid.dim();
    let mut base = [0isize; 2];
    let mut frac = [0.0f64; 2];
    for axis in 0..dim {
        let n = if axis == 0 { n0 } else { n1 };
        let r = t[axis].round();
        if (t[axis] - r).abs() <= NODE_SNAP {
            if r < 0.0 || r as usize >= n {
                return 0.0;
            }
            base[axis] = r as isize;
            frac[axis] = 0.0;
        } else {
            if t[axis] < 0.0 || t[axis] > (n - 1) as f64 {
                return 0.0;
            }
            let fl = t[axis].floor();
            base[axis] = fl as isize;
            frac[axis] = t[axis] - fl;
        }
    }
    match dim {
        1 => lerp(f.get(base[0], 0), f.get(base[0] + 1, 0), frac[0]),
        _ => {
            let lo = lerp(f.get(base[0], base[1]), f.get(base[0], base[1] + 1), frac[1]);
            if frac[0] == 0.0 {
                return lo;
            }
            let hi = lerp(f.get(base[0] + 1, base[1]), f.get(base[0] + 1, base[1] + 1), frac[1]);
            lerp(lo, hi, frac[0])
        }
    }
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else {
        (1.0 - t) * a + t * b
    }
}
