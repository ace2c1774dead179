//! Sequences along which the maximal operators lose or keep convergence.

use serde::Serialize;

use super::inequalities::ball_mask;
use super::report::{ClaimKind, Constant, ConvergenceReport, Source};
use crate::error::{invalid, Error, Result};
use crate::grid::{SampledFunction, UniformGrid};
use crate::maximal::{ball_averages, ball_measure, hl_maximal, local_maximal};
use crate::profile::Profile;
use crate::radius::RadiusGrid;
use crate::sobolev::{inner_product, inner_product_masked, lp_norm, sobolev_norm};

fn value_at(f: &SampledFunction, grid: &UniformGrid, x: f64) -> Result<(usize, f64)> {
    let i = grid
        .locate(&[x])
        .ok_or_else(|| invalid(format!("probe {x} is not a grid node")))?;
    Ok((i, f.values()[i]))
}

fn nodes_per_period(h: f64, n: f64) -> f64 {
    1.0 / (n * h)
}

fn require_resolved(h: f64, n: f64, min_nodes: f64) -> Result<()> {
    let per = nodes_per_period(h, n);
    if per < min_nodes - 1e-9 {
        return Err(Error::Resolution(format!(
            "frequency {n} leaves {per:.2} nodes per period at h = {h}; at least {min_nodes} are needed"
        )));
    }
    Ok(())
}

/// `u_k = chi_{B_{1/k}} / m(B_{1/k})` probed away from the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AeParams {
    pub h: f64,
    pub half_width: f64,
    pub k_list: Vec<f64>,
    pub probes: Vec<f64>,
}

impl Default for AeParams {
    fn default() -> Self {
        Self {
            h: 1.0 / 512.0,
            half_width: 4.0,
            k_list: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            probes: vec![2.0],
        }
    }
}

/// Minimum number of nodes inside `B_{1/k}`.
const MIN_BALL_NODES: usize = 4;

/// Pointwise limit 0 versus the uniform lower bound `(2^n omega_n)^{-1} |x|^{-n}` on `M(u_k)`.
pub fn run_ae_counterexample(p: &AeParams) -> Result<ConvergenceReport> {
    let grid = UniformGrid::interval(-p.half_width, p.half_width, p.h)?;
    if p.k_list.iter().any(|&k| !(k >= 1.0)) {
        return Err(invalid("k must be at least 1"));
    }
    if p.probes.iter().any(|x| x.abs() <= 1.0 || x.abs() > p.half_width) {
        return Err(invalid("probes need 1 < |x| inside the hull"));
    }
    let radii = RadiusGrid::spanning(&grid, false)?;
    let mut report = ConvergenceReport::new("ae-counterexample", "k", p.k_list.clone(), &grid)?;
    report.set("params", p);
    let c = 1.0 / (2.0 * ball_measure(1.0, 1));
    report.add_constant(Constant::new("C", c, Source::Theory));
    let mut point_values = vec![Vec::new(); p.probes.len()];
    let mut maximal_values = vec![Vec::new(); p.probes.len()];
    for &k in &p.k_list {
        let inside = ball_mask(&grid, &[0.0, 0.0], 1.0 / k, false)
            .iter()
            .filter(|&&m| m)
            .count();
        if inside < MIN_BALL_NODES {
            return Err(Error::Resolution(format!(
                "B_(1/{k}) contains {inside} nodes at h = {}; at least {MIN_BALL_NODES} are needed",
                p.h
            )));
        }
        let u = Profile::NormalizedIndicator { radius: 1.0 / k }.sample(&grid)?;
        let m = hl_maximal(&u, &radii)?;
        for (j, &x) in p.probes.iter().enumerate() {
            let (i, v) = value_at(&u, &grid, x)?;
            point_values[j].push(v);
            maximal_values[j].push(m.value(i));
        }
    }
    for (j, &x) in p.probes.iter().enumerate() {
        let (pn, mn) = (format!("u_k({x})"), format!("M(u_k)({x})"));
        report.observe(&pn, std::mem::take(&mut point_values[j]))?;
        report.observe(&mn, std::mem::take(&mut maximal_values[j]))?;
        let floor = c / x.abs();
        report.add_constant(Constant::new(format!("floor({x})"), floor, Source::Theory));
        report.claim(&pn, ClaimKind::BoundedAbove { ceiling: 0.0 }, None, Source::ClosedForm)?;
        report.claim(&mn, ClaimKind::BoundedBelow { floor }, None, Source::Theory)?;
    }
    Ok(report)
}

/// `u_n = sin(2 pi n x)` on `Omega = (-1, 1)` against the local maximal operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakLocalParams {
    pub h: f64,
    pub n_list: Vec<f64>,
    pub r: f64,
    pub radii_max: f64,
    pub floor: f64,
    pub min_nodes_per_period: f64,
}

impl Default for WeakLocalParams {
    fn default() -> Self {
        Self {
            h: 1.0 / 512.0,
            n_list: vec![4.0, 8.0, 16.0, 32.0],
            r: 0.25,
            radii_max: 1.0,
            floor: 0.6,
            min_nodes_per_period: 16.0,
        }
    }
}

/// Trapezoid weights on the nodes of `[-a, a]` (zero elsewhere).
fn window_weights(grid: &UniformGrid, a: f64) -> Vec<f64> {
    let h = grid.spacing();
    (0..grid.len())
        .map(|i| {
            let x = grid.node(i)[0].abs();
            if x < a - 1e-9 * h {
                h
            } else if x <= a + 1e-9 * h {
                0.5 * h
            } else {
                0.0
            }
        })
        .collect()
}

pub fn run_weak_counterexample_local(p: &WeakLocalParams) -> Result<ConvergenceReport> {
    if !(p.r > p.h && p.r < 0.5) {
        return Err(invalid(format!("r must lie in (h, 1/2), got {}", p.r)));
    }
    for &n in &p.n_list {
        require_resolved(p.h, n, p.min_nodes_per_period)?;
    }
    let grid = UniformGrid::interval(-1.0, 1.0, p.h)?;
    let omega = ball_mask(&grid, &[0.0, 0.0], 1.0, false);
    let radii = RadiusGrid::up_to(p.h, p.radii_max, false)?;
    let window = window_weights(&grid, 0.5);
    let one = SampledFunction::constant(&grid, 1.0);
    let mut report = ConvergenceReport::new("weak-local", "n", p.n_list.clone(), &grid)?;
    report.set("params", p);
    report.add_constant(Constant::new("2/pi", 2.0 / std::f64::consts::PI, Source::ClosedForm));
    report.add_constant(Constant::new("floor", p.floor, Source::Derived));
    let (mut pairing, mut mass, mut lower) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &p.n_list {
        let u = Profile::Sine { frequency: n }.sample(&grid)?;
        pairing.push(inner_product_masked(&u, &one, Some(&omega))?);
        let m = local_maximal(&u, &omega, &radii)?;
        mass.push(inner_product_masked(&m.to_function(), &one, Some(&omega))?);
        let avgs = ball_averages(&u, p.r)?;
        lower.push(avgs.iter().zip(&window).map(|(a, w)| a * w).sum());
    }
    report.observe("<u_n,1>", pairing)?;
    report.observe("<1,M_Omega(u_n)>", mass)?;
    report.observe("lower_bound", lower)?;
    report.claim(
        "<u_n,1>",
        ClaimKind::BoundedAbove { ceiling: 2.0 * p.h },
        None,
        Source::ClosedForm,
    )?;
    report.claim(
        "<1,M_Omega(u_n)>",
        ClaimKind::BoundedBelow { floor: p.floor },
        None,
        Source::Derived,
    )?;
    report.claim(
        "lower_bound",
        ClaimKind::BoundedBelow { floor: p.floor },
        None,
        Source::Derived,
    )?;
    Ok(report)
}

/// `u_n = sin(2 pi n x) / (1 + x^2)` on the line, paired with `w = 1 / (1 + x^2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakGlobalParams {
    pub h: f64,
    pub half_width: f64,
    pub n_list: Vec<f64>,
    pub r: f64,
    pub pairing_ceiling: f64,
    /// Smallest `n` the pairing ceiling applies to.
    pub ceiling_from: f64,
    pub floor: f64,
    pub min_nodes_per_period: f64,
}

impl Default for WeakGlobalParams {
    fn default() -> Self {
        Self {
            h: 1.0 / 512.0,
            half_width: 20.0,
            n_list: vec![8.0, 16.0, 32.0, 64.0],
            r: 0.5,
            pairing_ceiling: 0.05,
            ceiling_from: 32.0,
            floor: 0.5,
            min_nodes_per_period: 8.0,
        }
    }
}

pub fn run_weak_counterexample_global(p: &WeakGlobalParams) -> Result<ConvergenceReport> {
    if !(p.r > p.h && p.r < 1.0) {
        return Err(invalid(format!("r must lie in (h, 1), got {}", p.r)));
    }
    if p.half_width < 20.0 {
        return Err(invalid(format!(
            "hull half-width must be at least 20, got {}",
            p.half_width
        )));
    }
    for &n in &p.n_list {
        require_resolved(p.h, n, p.min_nodes_per_period)?;
    }
    let grid = UniformGrid::interval(-p.half_width, p.half_width, p.h)?;
    let radii = RadiusGrid::spanning(&grid, false)?;
    let w = Profile::Lorentzian.sample(&grid)?;
    let mut report = ConvergenceReport::new("weak-global", "n", p.n_list.clone(), &grid)?;
    report.set("params", p);
    let tail = std::f64::consts::PI - 2.0 * p.half_width.atan();
    report.add_constant(Constant::new("tail_mass", tail, Source::ClosedForm));
    report.add_constant(Constant::new("floor", p.floor, Source::Derived));
    let (mut pairing, mut mass, mut lower) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &p.n_list {
        let u = Profile::SineWeighted { frequency: n }.sample(&grid)?;
        pairing.push(inner_product(&u, &w)?);
        let m = hl_maximal(&u, &radii)?;
        mass.push(inner_product(&m.to_function(), &w)?);
        let avgs = ball_averages(&u, p.r)?;
        lower.push(avgs.iter().zip(w.values()).map(|(a, b)| a * b).sum::<f64>() * p.h);
    }
    report.observe("<u_n,w>", pairing)?;
    report.observe("<M(u_n),w>", mass)?;
    report.observe("lower_bound", lower)?;
    report.claim(
        "<u_n,w>",
        ClaimKind::BoundedAbove {
            ceiling: p.pairing_ceiling,
        },
        Some(p.ceiling_from),
        Source::Derived,
    )?;
    report.claim(
        "<M(u_n),w>",
        ClaimKind::BoundedBelow { floor: p.floor },
        None,
        Source::Derived,
    )?;
    Ok(report)
}

/// Translates `u_k(x) = u(x - k)` of a compactly supported profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranslateParams {
    pub h: f64,
    pub half_width: f64,
    pub profile: Profile,
    pub k_list: Vec<f64>,
    pub probes: Vec<f64>,
    pub weight: Profile,
    pub p: f64,
    /// Minimum shift difference for the separation observable.
    pub separation: f64,
    pub pairing_threshold: f64,
    pub maximal_threshold: f64,
}

impl Default for TranslateParams {
    fn default() -> Self {
        Self {
            h: 0.01,
            half_width: 20.0,
            profile: Profile::tent(0.0, 1.0),
            k_list: vec![2.0, 4.0, 8.0, 10.0],
            probes: vec![0.0],
            weight: Profile::Lorentzian,
            p: 2.0,
            separation: 4.0,
            pairing_threshold: 0.01,
            maximal_threshold: 0.1,
        }
    }
}

pub fn run_translate_sequence(p: &TranslateParams) -> Result<ConvergenceReport> {
    let grid = UniformGrid::interval(-p.half_width, p.half_width, p.h)?;
    let radii = RadiusGrid::spanning(&grid, false)?;
    let phi = p.weight.sample(&grid)?;
    let base = p.profile.sample(&grid)?;
    let base_norm = lp_norm(&hl_maximal(&base, &radii)?.to_function(), p.p)?;
    let mut report = ConvergenceReport::new("translate-sequence", "k", p.k_list.clone(), &grid)?;
    report.set("params", p);
    let floor = 0.5 * base_norm;
    report.add_constant(Constant::new("norm_M(u)", base_norm, Source::Derived));
    report.add_constant(Constant::new("separation_floor", floor, Source::Derived));
    let mut fields = Vec::with_capacity(p.k_list.len());
    let mut pairing = Vec::new();
    let mut probes = vec![Vec::new(); p.probes.len()];
    for &k in &p.k_list {
        let u = p.profile.clone().translated(k).sample(&grid)?;
        if !u.vanishes_near_boundary(2) {
            return Err(invalid(format!("the translate by {k} leaves the hull")));
        }
        pairing.push(inner_product(&u, &phi)?);
        let m = hl_maximal(&u, &radii)?.to_function();
        for (j, &x) in p.probes.iter().enumerate() {
            probes[j].push(value_at(&m, &grid, x)?.1);
        }
        fields.push(m);
    }
    let mut separation = Vec::with_capacity(p.k_list.len());
    for (a, &ka) in p.k_list.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (b, &kb) in p.k_list.iter().enumerate() {
            if (ka - kb).abs() >= p.separation {
                best = best.min(lp_norm(&fields[a].sub(&fields[b])?, p.p)?);
            }
        }
        if !best.is_finite() {
            return Err(invalid(format!(
                "no shift in the list is {} away from {ka}",
                p.separation
            )));
        }
        separation.push(best);
    }
    report.observe("<u_k,phi>", pairing)?;
    report.claim("<u_k,phi>", ClaimKind::Decreasing, None, Source::Derived)?;
    report.claim(
        "<u_k,phi>",
        ClaimKind::Converges {
            threshold: p.pairing_threshold,
        },
        None,
        Source::Derived,
    )?;
    for (j, &x) in p.probes.iter().enumerate() {
        let name = format!("M(u_k)({x})");
        report.observe(&name, std::mem::take(&mut probes[j]))?;
        report.claim(&name, ClaimKind::Decreasing, None, Source::Derived)?;
        report.claim(
            &name,
            ClaimKind::Converges {
                threshold: p.maximal_threshold,
            },
            None,
            Source::Derived,
        )?;
    }
    report.observe("separation", separation)?;
    report.claim("separation", ClaimKind::BoundedBelow { floor }, None, Source::Derived)?;
    Ok(report)
}

/// `u_n = u + (a / n) sin(2 pi n x) * envelope`, weakly convergent to `u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakContinuityParams {
    pub h: f64,
    pub half_width: f64,
    pub profile: Profile,
    pub envelope: Profile,
    /// `a` in the amplitude `a / n`.
    pub amplitude: f64,
    pub n_list: Vec<f64>,
    pub weights: Vec<Profile>,
    pub decay_factor: f64,
    pub ceiling: f64,
    pub ceiling_from: f64,
    pub min_nodes_per_period: f64,
}

impl Default for WeakContinuityParams {
    fn default() -> Self {
        Self {
            h: 1.0 / 2048.0,
            half_width: 2.0,
            profile: Profile::tent(0.0, 1.0),
            envelope: Profile::bump(0.0, 1.0, 1.0),
            amplitude: 1.0,
            n_list: vec![16.0, 64.0, 256.0],
            weights: vec![Profile::indicator(0.0, 1.0)],
            decay_factor: 1.5,
            ceiling: 0.02,
            ceiling_from: 64.0,
            min_nodes_per_period: 8.0,
        }
    }
}

pub fn run_weak_continuity_demo(p: &WeakContinuityParams) -> Result<ConvergenceReport> {
    for &n in &p.n_list {
        require_resolved(p.h, n, p.min_nodes_per_period)?;
    }
    if p.weights.is_empty() {
        return Err(invalid("at least one test weight is needed"));
    }
    let grid = UniformGrid::interval(-p.half_width, p.half_width, p.h)?;
    let radii = RadiusGrid::spanning(&grid, false)?;
    let u = p.profile.sample(&grid)?;
    let mu = hl_maximal(&u, &radii)?.to_function();
    let weights = p.weights.iter().map(|w| w.sample(&grid)).collect::<Result<Vec<_>>>()?;
    let mut report = ConvergenceReport::new("weak-continuity", "n", p.n_list.clone(), &grid)?;
    report.set("params", p);
    let mut gaps = vec![Vec::new(); weights.len()];
    let mut pairings = vec![Vec::new(); weights.len()];
    let mut norms = Vec::new();
    for &n in &p.n_list {
        let un = Profile::Oscillated {
            base: Box::new(p.profile.clone()),
            envelope: Box::new(p.envelope.clone()),
            frequency: n,
            amplitude: p.amplitude / n,
        }
        .sample(&grid)?;
        norms.push(sobolev_norm(&un, 2.0)?);
        let diff = hl_maximal(&un, &radii)?.to_function().sub(&mu)?;
        let du = un.sub(&u)?;
        for (j, w) in weights.iter().enumerate() {
            gaps[j].push(inner_product(&diff, w)?.abs());
            pairings[j].push(inner_product(&du, w)?);
        }
    }
    report.observe("||u_n||_{1,2}", norms)?;
    for j in 0..weights.len() {
        let suffix = if weights.len() == 1 {
            String::new()
        } else {
            j.to_string()
        };
        let gap = format!("|<M(u_n)-M(u),phi{suffix}>|");
        let pairing = format!("<u_n-u,phi{suffix}>");
        report.observe(&gap, std::mem::take(&mut gaps[j]))?;
        report.observe(&pairing, std::mem::take(&mut pairings[j]))?;
        report.claim(
            &gap,
            ClaimKind::DecaysByFactor { factor: p.decay_factor },
            None,
            Source::Derived,
        )?;
        report.claim(
            &gap,
            ClaimKind::BoundedAbove { ceiling: p.ceiling },
            Some(p.ceiling_from),
            Source::Derived,
        )?;
    }
    Ok(report)
}
