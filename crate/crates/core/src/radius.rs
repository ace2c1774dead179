//! Finite sets of candidate radii and their lattice balls.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::UniformGrid;

/// Relative slack applied to `(R/h)^2` when deciding closed-ball membership.
const BALL_SLACK: f64 = 1e-12;

/// Strictly increasing candidate radii for a supremum over `R`.
///
/// When `include_zero` is set the first entry is `0`, standing for the point
/// evaluation `r = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusGrid {
    radii: Vec<f64>,
    include_zero: bool,
}

impl RadiusGrid {
    pub fn new(radii: Vec<f64>, include_zero: bool) -> Result<Self> {
        if radii.is_empty() {
            return Err(invalid("radius grid is empty"));
        }
        if radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(invalid("radii must be finite and non-negative"));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("radii must be strictly increasing"));
        }
        if include_zero && radii[0] != 0.0 {
            return Err(invalid("include_zero requires the first radius to be 0"));
        }
        if !include_zero && radii[0] == 0.0 {
            return Err(invalid("radius 0 is only allowed with include_zero"));
        }
        Ok(Self { radii, include_zero })
    }

    /// `r_j = j * h` for `j = 1..=count`.
    pub fn multiples_of(h: f64, count: usize, include_zero: bool) -> Result<Self> {
        if !(h > 0.0) || count == 0 {
            return Err(invalid("need a positive step and at least one radius"));
        }
        let mut radii: Vec<f64> = if include_zero { vec![0.0] } else { Vec::new() };
        radii.extend((1..=count).map(|j| j as f64 * h));
        Self::new(radii, include_zero)
    }

    /// `count` equally spaced radii ending at `max`: `r_j = max * j / count`.
    pub fn linspace(max: f64, count: usize, include_zero: bool) -> Result<Self> {
        if !(max > 0.0) || count == 0 {
            return Err(invalid("need a positive maximum radius and at least one radius"));
        }
        let mut radii: Vec<f64> = if include_zero { vec![0.0] } else { Vec::new() };
        radii.extend((1..=count).map(|j| max * j as f64 / count as f64));
        Self::new(radii, include_zero)
    }

    /// Multiples of the spacing up to the first one covering the hull diameter.
    pub fn spanning(grid: &UniformGrid, include_zero: bool) -> Result<Self> {
        let h = grid.spacing();
        let count = (grid.diameter() / h - 1e-9).ceil().max(1.0) as usize;
        Self::multiples_of(h, count, include_zero)
    }

    /// Multiples of the spacing up to `max` (at least one radius).
    pub fn up_to(h: f64, max: f64, include_zero: bool) -> Result<Self> {
        let count = (max / h + 1e-9).floor().max(1.0) as usize;
        Self::multiples_of(h, count, include_zero)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn include_zero(&self) -> bool {
        self.include_zero
    }

    /// The strictly positive radii.
    pub fn positive(&self) -> &[f64] {
        if self.include_zero {
            &self.radii[1..]
        } else {
            &self.radii
        }
    }

    /// Largest radius `r_J`.
    pub fn max(&self) -> f64 {
        *self.radii.last().expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Checks that every positive radius reaches at least one cell.
    pub fn check_against(&self, grid: &UniformGrid) -> Result<()> {
        let h = grid.spacing();
        if self.positive().is_empty() {
            return Err(invalid("radius grid has no positive radius"));
        }
        if let Some(r) = self.positive().iter().find(|&&r| r < h * (1.0 - 1e-12)) {
            return Err(invalid(format!("radius {r} is below the grid spacing {h}")));
        }
        Ok(())
    }
}

/// Squared lattice radius: the largest integer `m` with `m <= (R/h)^2`, up to a
/// relative slack so that radii that are exact multiples of `h` include their sphere.
pub(crate) fn lattice_radius_sq(radius: f64, h: f64) -> u64 {
    let s = radius / h;
    (s * s * (1.0 + BALL_SLACK) + 1e-9).floor() as u64
}

pub(crate) fn isqrt(m: u64) -> u64 {
    let mut r = (m as f64).sqrt() as u64;
    while r * r > m {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= m {
        r += 1;
    }
    r
}

/// One positive radius, resolved against the lattice.
#[derive(Clone, Debug)]
pub(crate) struct LatticeBall {
    /// Number of lattice points in the closed ball.
    pub count: usize,
    /// `floor(R/h)`, the half-width along an axis.
    pub half_width: isize,
    /// 2D only: rectangles `(d0_lo, d0_hi, d1_half_width)` whose union is the ball.
    pub strips: Vec<(isize, isize, isize)>,
}

impl LatticeBall {
    pub fn new(dim: usize, m2: u64) -> Self {
        let s = isqrt(m2) as isize;
        if dim == 1 {
            return Self {
                count: (2 * s + 1) as usize,
                half_width: s,
                strips: Vec::new(),
            };
        }
        let mut strips: Vec<(isize, isize, isize)> = Vec::new();
        let mut count = 0usize;
        for d0 in -s..=s {
            let w = isqrt(m2 - (d0 * d0) as u64) as isize;
            count += (2 * w + 1) as usize;
            match strips.last_mut() {
                Some(last) if last.2 == w && last.1 == d0 - 1 => last.1 = d0,
                _ => strips.push((d0, d0, w)),
            }
        }
        Self {
            count,
            half_width: s,
            strips,
        }
    }
}

/// Lattice offsets sorted by norm, with per-radius ball sizes, for a fixed radius grid.
///
/// The first `count` offsets of [`BallStencil::offsets`] are exactly the lattice
/// ball of a radius with that count, so running sums over the offsets visit every
/// candidate ball in one pass.
#[derive(Clone, Debug)]
pub(crate) struct BallStencil {
    pub offsets: Vec<[isize; 2]>,
    /// One entry per positive radius, in radius order.
    pub balls: Vec<LatticeBall>,
}

impl BallStencil {
    pub fn new(grid: &UniformGrid, radii: &RadiusGrid) -> Self {
        let dim = grid.dim();
        let h = grid.spacing();
        let balls: Vec<LatticeBall> = radii
            .positive()
            .iter()
            .map(|&r| LatticeBall::new(dim, lattice_radius_sq(r, h)))
            .collect();
        let max_m2 = lattice_radius_sq(radii.max(), h);
        Self {
            offsets: sorted_offsets(dim, max_m2),
            balls,
        }
    }
}

/// All lattice offsets with `|k|^2 <= m2`, ordered by `(|k|^2, k)`.
pub(crate) fn sorted_offsets(dim: usize, m2: u64) -> Vec<[isize; 2]> {
    let s = isqrt(m2) as isize;
    let mut out: Vec<[isize; 2]> = Vec::new();
    if dim == 1 {
        out.push([0, 0]);
        for k in 1..=s {
            out.push([-k, 0]);
            out.push([k, 0]);
        }
        return out;
    }
    for d0 in -s..=s {
        let w = isqrt(m2 - (d0 * d0) as u64) as isize;
        for d1 in -w..=w {
            out.push([d0, d1]);
        }
    }
    out.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1], k[0], k[1]));
    out
}
