//! Prefix tables of `|f|`: running sums in 1D, a summed-area table in 2D.
//!
//! Entries are kept as unevaluated pairs `hi + lo` (compensated summation), so
//! a box sum recovered from four table entries is accurate to a few ulps of
//! the *box* sum rather than of the total mass.

use crate::error::{invalid, Result};
use crate::grid::{SampledFunction, UniformGrid};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    #[inline]
    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = fast_two_sum(s, e);
        Self { hi, lo }
    }

    #[inline]
    fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = fast_two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Cumulative sums of absolute values with a leading zero row/column.
#[derive(Clone, Debug)]
pub struct PrefixTable {
    grid: UniformGrid,
    /// `(n0 + 1) * (n1 + 1)` entries in 2D, `n0 + 1` in 1D.
    table: Vec<Compensated>,
    stride: usize,
}

/// Builds the prefix table of `|f|`.
pub fn prefix_table(f: &SampledFunction) -> PrefixTable {
    PrefixTable::new(f)
}

impl PrefixTable {
    pub fn new(f: &SampledFunction) -> Self {
        let grid = f.grid().clone();
        let (n0, n1) = grid.shape();
        let values = f.values();
        if grid.dim() == 1 {
            let mut table = Vec::with_capacity(n0 + 1);
            let mut acc = Compensated::default();
            table.push(acc);
            for v in values {
                acc = acc.add_f64(v.abs());
                table.push(acc);
            }
            return Self { grid, table, stride: 1 };
        }
        let stride = n1 + 1;
        let mut table = vec![Compensated::default(); (n0 + 1) * stride];
        for i in 0..n0 {
            let mut row = Compensated::default();
            for j in 0..n1 {
                row = row.add_f64(values[i * n1 + j].abs());
                table[(i + 1) * stride + j + 1] = table[i * stride + j + 1].add(row);
            }
        }
        Self { grid, table, stride }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// Sum of `|f|` over the inclusive index box `lo..=hi`.
    pub fn interval_sum(&self, lo: &[usize], hi: &[usize]) -> Result<f64> {
        let dim = self.grid.dim();
        if lo.len() != dim || hi.len() != dim {
            return Err(invalid(format!("index boxes need {dim} coordinates")));
        }
        let counts = self.grid.counts();
        for axis in 0..dim {
            if lo[axis] > hi[axis] {
                return Err(invalid(format!(
                    "empty index range {}..={} on axis {axis}",
                    lo[axis], hi[axis]
                )));
            }
            if hi[axis] >= counts[axis] {
                return Err(invalid(format!(
                    "index {} out of range for axis {axis} with {} nodes",
                    hi[axis], counts[axis]
                )));
            }
        }
        Ok(match dim {
            1 => self.sum_1d(lo[0], hi[0]),
            _ => self.sum_2d(lo[0], hi[0], lo[1], hi[1]),
        })
    }

    /// Sum over `lo..=hi` in 1D; caller guarantees `lo <= hi < n`.
    #[inline]
    pub(crate) fn sum_1d(&self, lo: usize, hi: usize) -> f64 {
        let d = self.table[hi + 1].add(self.table[lo].neg());
        d.hi + d.lo
    }

    /// Sum over the inclusive rectangle; caller guarantees the bounds are valid.
    #[inline]
    pub(crate) fn sum_2d(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        let s = self.stride;
        let t = &self.table;
        let d = t[(r1 + 1) * s + c1 + 1]
            .add(t[r0 * s + c0])
            .add(t[r0 * s + c1 + 1].neg())
            .add(t[(r1 + 1) * s + c0].neg());
        d.hi + d.lo
    }

    /// Sum over a signed 1D interval, clipped to the hull (zero extension).
    #[inline]
    pub(crate) fn clipped_sum_1d(&self, lo: isize, hi: isize) -> f64 {
        let n = self.grid.shape().0 as isize;
        let lo = lo.max(0);
        let hi = hi.min(n - 1);
        if lo > hi {
            0.0
        } else {
            self.sum_1d(lo as usize, hi as usize)
        }
    }

    /// Sum over a signed rectangle, clipped to the hull (zero extension).
    #[inline]
    pub(crate) fn clipped_sum_2d(&self, r0: isize, r1: isize, c0: isize, c1: isize) -> f64 {
        let (n0, n1) = self.grid.shape();
        let r0 = r0.max(0);
        let r1 = r1.min(n0 as isize - 1);
        let c0 = c0.max(0);
        let c1 = c1.min(n1 as isize - 1);
        if r0 > r1 || c0 > c1 {
            0.0
        } else {
            self.sum_2d(r0 as usize, r1 as usize, c0 as usize, c1 as usize)
        }
    }
}
