//! Maximal operators against brute-force sums written out independently here.

use hlmax_core::{
    bilinear_maximal, hl_maximal, hl_maximal_naive, local_maximal, RadiusGrid, SampledFunction, UniformGrid,
};
use proptest::prelude::*;

/// Zero-extended value at signed lattice index `(a, b)`.
fn at(values: &[f64], shape: (usize, usize), a: i64, b: i64) -> f64 {
    if a < 0 || b < 0 || a >= shape.0 as i64 || b >= shape.1 as i64 {
        0.0
    } else {
        values[a as usize * shape.1 + b as usize]
    }
}

/// Offsets of the closed lattice ball of radius `j` cells.
fn offsets(dim: usize, j: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in -j..=j {
        for b in if dim == 1 { 0..=0 } else { -j..=j } {
            if a * a + b * b <= j * j {
                out.push((a, b));
            }
        }
    }
    out
}

fn oracle_hl(values: &[f64], shape: (usize, usize), dim: usize, js: &[i64]) -> Vec<f64> {
    let mut out = Vec::new();
    for a in 0..shape.0 as i64 {
        for b in 0..shape.1 as i64 {
            let mut best = 0.0f64;
            for &j in js {
                let ball = offsets(dim, j);
                let s: f64 = ball.iter().map(|&(p, q)| at(values, shape, a + p, b + q).abs()).sum();
                best = best.max(s / ball.len() as f64);
            }
            out.push(best);
        }
    }
    out
}

fn oracle_bilinear_reflected(f: &[f64], g: &[f64], n: usize, js: &[i64]) -> Vec<f64> {
    (0..n as i64)
        .map(|i| {
            js.iter()
                .map(|&j| {
                    let s: f64 = (-j..=j)
                        .map(|k| (at(f, (n, 1), i + k, 0) * at(g, (n, 1), i - k, 0)).abs())
                        .sum();
                    s / (2 * j + 1) as f64
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

fn field_1d(values: Vec<f64>, h: f64) -> SampledFunction {
    let grid = UniformGrid::new(1, &[0.0], h, &[values.len()]).unwrap();
    SampledFunction::new(grid, values).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        prop_assert!((x - y).abs() <= tol * (1.0 + y.abs()), "node {}: {} vs {}", i, x, y);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hl_1d_matches_brute_force(values in prop::collection::vec(-3.0..3.0f64, 3..40), j in 1usize..12, h in 0.05..2.0f64) {
        let f = field_1d(values.clone(), h);
        let radii = RadiusGrid::multiples_of(h, j, false).unwrap();
        let js: Vec<i64> = (1..=j as i64).collect();
        let want = oracle_hl(&values, (values.len(), 1), 1, &js);
        close(hl_maximal(&f, &radii).unwrap().values(), &want, 1e-12)?;
        close(hl_maximal_naive(&f, &radii).unwrap().values(), &want, 1e-12)?;
    }

    #[test]
    fn hl_2d_matches_brute_force(n0 in 2usize..9, n1 in 2usize..9, j in 1usize..5, seed in any::<u64>()) {
        let values: Vec<f64> = (0..n0 * n1).map(|k| ((k as u64 ^ seed).wrapping_mul(2654435761) % 1000) as f64 / 250.0 - 2.0).collect();
        let grid = UniformGrid::new(2, &[0.0, 0.0], 0.5, &[n0, n1]).unwrap();
        let f = SampledFunction::new(grid, values.clone()).unwrap();
        let radii = RadiusGrid::multiples_of(0.5, j, false).unwrap();
        let js: Vec<i64> = (1..=j as i64).collect();
        let want = oracle_hl(&values, (n0, n1), 2, &js);
        close(hl_maximal(&f, &radii).unwrap().values(), &want, 1e-12)?;
        close(hl_maximal_naive(&f, &radii).unwrap().values(), &want, 1e-12)?;
    }

    #[test]
    fn reflected_bilinear_matches_brute_force(
        f in prop::collection::vec(-2.0..2.0f64, 5..30),
        g in prop::collection::vec(-2.0..2.0f64, 30),
        j in 1usize..8,
    ) {
        let n = f.len();
        let g = g[..n].to_vec();
        let radii = RadiusGrid::multiples_of(0.1, j, false).unwrap();
        let js: Vec<i64> = (1..=j as i64).collect();
        let want = oracle_bilinear_reflected(&f, &g, n, &js);
        let got = bilinear_maximal(&field_1d(f, 0.1), &field_1d(g, 0.1), -1.0, &radii).unwrap();
        close(got.values(), &want, 1e-12)?;
    }
}

#[test]
fn local_operator_uses_only_balls_inside_the_domain() {
    // Domain = nodes 3..=7 of 11; node 5 sits 2.5 cells from the complement.
    let values: Vec<f64> = (0..11)
        .map(|i| if i == 2 || i == 8 { 100.0 } else { 1.0 + i as f64 })
        .collect();
    let f = field_1d(values.clone(), 1.0);
    let mask: Vec<bool> = (0..11).map(|i| (3..=7).contains(&i)).collect();
    let radii = RadiusGrid::multiples_of(1.0, 5, true).unwrap();
    let m = local_maximal(&f, &mask, &radii).unwrap();
    let avg = |c: usize, j: usize| values[c - j..=c + j].iter().sum::<f64>() / (2 * j + 1) as f64;
    assert_eq!(m.value(5), values[5].max(avg(5, 1)).max(avg(5, 2)));
    assert_eq!(m.value(3), values[3]);
    assert!(m.value(5) < 100.0);
}
