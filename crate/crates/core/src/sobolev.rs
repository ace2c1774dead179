//! Discrete Sobolev calculus: difference quotients, gradients, Riemann-sum
//! norms and inner products, plus distances between finite point sets.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::{SampledFunction, UniformGrid};

/// An exponent `p` in the open range `(1, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct LebesgueExponent(f64);

impl LebesgueExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(invalid(format!("exponent must satisfy 1 < p < inf, got {p}")));
        }
        Ok(Self(p))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `r` with `1/r = 1/p + 1/q`.
    pub fn harmonic_sum(self, other: Self) -> f64 {
        1.0 / (1.0 / self.0 + 1.0 / other.0)
    }
}

/// One real per node per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: UniformGrid,
    components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    pub fn component_function(&self, axis: usize) -> SampledFunction {
        SampledFunction::new(self.grid.clone(), self.components[axis].clone()).expect("finite components")
    }

    /// Pointwise Euclidean norm.
    pub fn magnitude(&self) -> SampledFunction {
        let values = (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect();
        SampledFunction::new(self.grid.clone(), values).expect("finite components")
    }
}

fn axis_stride(grid: &UniformGrid, axis: usize) -> Result<(usize, usize)> {
    if axis >= grid.dim() {
        return Err(invalid(format!(
            "axis {axis} out of range for dimension {}",
            grid.dim()
        )));
    }
    let (n0, n1) = grid.shape();
    Ok(if axis == 0 { (n0, n1) } else { (n1, 1) })
}

/// Forward quotient `(f(x + m h e_i) - f(x)) / (m h)`, zero-extended beyond the hull.
pub fn diff_quotient(f: &SampledFunction, axis: usize, step: usize) -> Result<SampledFunction> {
    let grid = f.grid();
    let (n, _) = axis_stride(grid, axis)?;
    if step == 0 || step >= n {
        return Err(invalid(format!("step {step} must lie in 1..{n} along axis {axis}")));
    }
    let shifted = translate(f, axis, step as isize)?;
    let mh = step as f64 * grid.spacing();
    shifted.zip_with(f, |a, b| (a - b) / mh)
}

/// `f(x + m h e_i)`, zero-filled where the shift leaves the hull.
pub fn translate(f: &SampledFunction, axis: usize, step: isize) -> Result<SampledFunction> {
    let grid = f.grid();
    axis_stride(grid, axis)?;
    let values = (0..grid.len())
        .map(|i| {
            let [a, b] = grid.unravel(i);
            let (a, b) = (a as isize, b as isize);
            if axis == 0 {
                f.get(a + step, b)
            } else {
                f.get(a, b + step)
            }
        })
        .collect();
    SampledFunction::new(grid.clone(), values)
}

/// Centered differences in the interior, one-sided at the hull faces.
///
/// The interior value is the mean of the forward and backward quotients.
pub fn gradient(f: &SampledFunction) -> VectorField {
    let grid = f.grid();
    let h = grid.spacing();
    let components = (0..grid.dim())
        .map(|axis| {
            let (n, stride) = axis_stride(grid, axis).expect("axis in range");
            let v = f.values();
            (0..grid.len())
                .map(|i| {
                    let pos = grid.unravel(i)[axis];
                    let fwd = || (v[i + stride] - v[i]) / h;
                    let bwd = || (v[i] - v[i - stride]) / h;
                    if pos == 0 {
                        fwd()
                    } else if pos == n - 1 {
                        bwd()
                    } else {
                        0.5 * (fwd() + bwd())
                    }
                })
                .collect()
        })
        .collect();
    VectorField {
        grid: grid.clone(),
        components,
    }
}

/// Riemann-sum `L^p` norm `(sum |f|^p h^n)^{1/p}`.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    lp_norm_masked(f, p, None)
}

/// `L^p` norm restricted to the nodes selected by `mask`.
pub fn lp_norm_masked(f: &SampledFunction, p: f64, mask: Option<&[bool]>) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("L^p norms need p >= 1, got {p}")));
    }
    if let Some(m) = mask {
        if m.len() != f.values().len() {
            return Err(invalid("mask length does not match the grid"));
        }
    }
    let w = f.grid().cell_volume();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask.is_none_or(|m| m[*i]))
        .map(|(_, v)| if p == 2.0 { v * v } else { v.abs().powf(p) })
        .sum();
    Ok(if p == 2.0 {
        (sum * w).sqrt()
    } else {
        (sum * w).powf(1.0 / p)
    })
}

/// `||f||_p + || |grad f| ||_p`.
pub fn sobolev_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    Ok(lp_norm(f, p)? + lp_norm(&gradient(f).magnitude(), p)?)
}

/// Riemann-sum `L^2` pairing `sum f g h^n`.
pub fn inner_product(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    inner_product_masked(f, g, None)
}

pub fn inner_product_masked(f: &SampledFunction, g: &SampledFunction, mask: Option<&[bool]>) -> Result<f64> {
    f.require_same_grid(g)?;
    let sum: f64 = f
        .values()
        .iter()
        .zip(g.values())
        .enumerate()
        .filter(|(i, _)| mask.is_none_or(|m| m[*i]))
        .map(|(_, (a, b))| a * b)
        .sum();
    Ok(sum * f.grid().cell_volume())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `d(x, A) = min_{a in A} |x - a|`.
pub fn set_distance<P: AsRef<[f64]>>(x: &[f64], set: &[P]) -> Result<f64> {
    if set.is_empty() {
        return Err(invalid("distance to an empty set"));
    }
    Ok(set.iter().map(|a| euclid(x, a.as_ref())).fold(f64::INFINITY, f64::min))
}

/// The closed dilation `A_(lambda) = { x : d(x, A) <= lambda }` as a predicate.
#[derive(Debug)]
pub struct Dilation<'a, P> {
    set: &'a [P],
    lambda: f64,
}

pub fn dilate<P: AsRef<[f64]>>(set: &[P], lambda: f64) -> Result<Dilation<'_, P>> {
    if set.is_empty() {
        return Err(invalid("cannot dilate an empty set"));
    }
    if !(lambda >= 0.0) {
        return Err(invalid(format!("dilation radius must be non-negative, got {lambda}")));
    }
    Ok(Dilation { set, lambda })
}

impl<P: AsRef<[f64]>> Dilation<'_, P> {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.set.iter().any(|a| euclid(x, a.as_ref()) <= self.lambda)
    }
}

fn directed_hausdorff<P: AsRef<[f64]>>(a: &[P], b: &[P]) -> f64 {
    a.iter()
        .map(|p| {
            b.iter()
                .map(|q| euclid(p.as_ref(), q.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two finite, non-empty point sets.
pub fn hausdorff_distance<P: AsRef<[f64]>>(a: &[P], b: &[P]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("Hausdorff distance needs two non-empty sets"));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}
