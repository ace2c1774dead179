//! Closed-form test functions used by the verification suites and the CLI catalog.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::grid::{sample, SampledFunction, UniformGrid};

/// Points this close to a jump are assigned the midpoint value.
const JUMP_SNAP: f64 = 1e-9;

/// A function of one or two variables, sampled onto grids on demand.
///
/// Indicators take the value `1/2` on the sphere bounding them, which keeps
/// their Riemann sums exact when the jump falls on a node.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `amplitude * chi_{B(center, radius)}`.
    Indicator {
        center: [f64; 2],
        radius: f64,
        amplitude: f64,
    },
    /// `chi_B / m(B)` for the ball `B = B(0, radius)`.
    NormalizedIndicator { radius: f64 },
    /// `amplitude * max(0, 1 - |x - c| / width)`.
    Tent {
        center: [f64; 2],
        width: f64,
        amplitude: f64,
    },
    /// `amplitude * exp(1 - 1 / (1 - t^2))` with `t = |x - c| / width`, zero for `t >= 1`.
    SmoothBump {
        center: [f64; 2],
        width: f64,
        amplitude: f64,
    },
    /// `sin(2 pi n x_1)`.
    Sine { frequency: f64 },
    /// `sin(2 pi n x_1) / (1 + |x|^2)`.
    SineWeighted { frequency: f64 },
    /// `1 / (1 + |x|^2)`.
    Lorentzian,
    /// `inner(x - shift e_1)`.
    Translate { inner: Box<Profile>, shift: f64 },
    /// `base + amplitude * sin(2 pi n x_1) * envelope`.
    Oscillated {
        base: Box<Profile>,
        envelope: Box<Profile>,
        frequency: f64,
        amplitude: f64,
    },
}

fn dist(x: &[f64], c: &[f64; 2]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum()
}

impl Profile {
    pub fn indicator(center: f64, radius: f64) -> Self {
        Profile::Indicator {
            center: [center, 0.0],
            radius,
            amplitude: 1.0,
        }
    }

    pub fn tent(center: f64, width: f64) -> Self {
        Profile::Tent {
            center: [center, 0.0],
            width,
            amplitude: 1.0,
        }
    }

    pub fn bump(center: f64, width: f64, amplitude: f64) -> Self {
        Profile::SmoothBump {
            center: [center, 0.0],
            width,
            amplitude,
        }
    }

    pub fn translated(self, shift: f64) -> Self {
        Profile::Translate {
            inner: Box::new(self),
            shift,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Indicator { radius, .. } | Profile::NormalizedIndicator { radius } if !(*radius > 0.0) => {
                Err(invalid(format!("indicator radius must be positive, got {radius}")))
            }
            Profile::Tent { width, .. } | Profile::SmoothBump { width, .. } if !(*width > 0.0) => {
                Err(invalid(format!("width must be positive, got {width}")))
            }
            Profile::Sine { frequency } | Profile::SineWeighted { frequency } if !frequency.is_finite() => {
                Err(invalid("frequency must be finite"))
            }
            Profile::Translate { inner, .. } => inner.validate(),
            Profile::Oscillated { base, envelope, .. } => {
                base.validate()?;
                envelope.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Profile::Indicator {
                center,
                radius,
                amplitude,
            } => amplitude * ball_indicator(dist(x, center), *radius),
            Profile::NormalizedIndicator { radius } => {
                let measure = match x.len() {
                    1 => 2.0 * radius,
                    _ => PI * radius * radius,
                };
                ball_indicator(norm_sq(x).sqrt(), *radius) / measure
            }
            Profile::Tent {
                center,
                width,
                amplitude,
            } => amplitude * (1.0 - dist(x, center) / width).max(0.0),
            Profile::SmoothBump {
                center,
                width,
                amplitude,
            } => {
                let t = dist(x, center) / width;
                if t >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            Profile::Sine { frequency } => (2.0 * PI * frequency * x[0]).sin(),
            Profile::SineWeighted { frequency } => (2.0 * PI * frequency * x[0]).sin() / (1.0 + norm_sq(x)),
            Profile::Lorentzian => 1.0 / (1.0 + norm_sq(x)),
            Profile::Translate { inner, shift } => {
                let mut y = [0.0; 2];
                y[..x.len()].copy_from_slice(x);
                y[0] -= shift;
                inner.eval(&y[..x.len()])
            }
            Profile::Oscillated {
                base,
                envelope,
                frequency,
                amplitude,
            } => base.eval(x) + amplitude * (2.0 * PI * frequency * x[0]).sin() * envelope.eval(x),
        }
    }

    pub fn sample(&self, grid: &UniformGrid) -> Result<SampledFunction> {
        self.validate()?;
        sample(|x| self.eval(x), grid)
    }
}

fn ball_indicator(r: f64, radius: f64) -> f64 {
    let d = r - radius;
    if d.abs() <= JUMP_SNAP * radius.max(1.0) {
        0.5
    } else if d < 0.0 {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_is_half_on_the_jump() {
        let chi = Profile::indicator(0.0, 1.0);
        assert_eq!(chi.eval(&[0.3]), 1.0);
        assert_eq!(chi.eval(&[1.0]), 0.5);
        assert_eq!(chi.eval(&[-1.0]), 0.5);
        assert_eq!(chi.eval(&[1.2]), 0.0);
        let g = UniformGrid::interval(-2.0, 2.0, 0.01).unwrap();
        let s = chi.sample(&g).unwrap();
        let mass: f64 = s.values().iter().sum::<f64>() * 0.01;
        assert!((mass - 2.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_indicator_has_unit_mass() {
        let g = UniformGrid::interval(-2.0, 2.0, 1.0 / 512.0).unwrap();
        for k in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let u = Profile::NormalizedIndicator { radius: 1.0 / k }.sample(&g).unwrap();
            let mass: f64 = u.values().iter().sum::<f64>() / 512.0;
            assert!((mass - 1.0).abs() < 1e-12, "k = {k}: {mass}");
        }
    }

    #[test]
    fn bump_is_smooth_and_compact() {
        let b = Profile::bump(0.5, 2.0, 3.0);
        assert_eq!(b.eval(&[0.5]), 3.0);
        assert_eq!(b.eval(&[2.5]), 0.0);
        assert!(b.eval(&[2.49]) > 0.0 && b.eval(&[2.49]) < 1e-10);
    }

    #[test]
    fn translate_and_oscillate() {
        let t = Profile::tent(0.0, 1.0).translated(3.0);
        assert_eq!(t.eval(&[3.0]), 1.0);
        assert_eq!(t.eval(&[0.0]), 0.0);
        let o = Profile::Oscillated {
            base: Box::new(Profile::tent(0.0, 1.0)),
            envelope: Box::new(Profile::bump(0.0, 1.0, 1.0)),
            frequency: 4.0,
            amplitude: 0.0,
        };
        assert_eq!(o.eval(&[0.3]), Profile::tent(0.0, 1.0).eval(&[0.3]));
        assert!(Profile::tent(0.0, -1.0).validate().is_err());
    }
}
