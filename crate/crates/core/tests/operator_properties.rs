//! Algebraic properties of the maximal operators on random data.

use hlmax_core::{
    bilinear_maximal, hausdorff_distance, hl_maximal, inner_product, local_maximal, lp_norm, RadiusGrid,
    SampledFunction, UniformGrid,
};
use proptest::prelude::*;

const H: f64 = 0.25;

fn field(values: Vec<f64>) -> SampledFunction {
    let grid = UniformGrid::new(1, &[0.0], H, &[values.len()]).unwrap();
    SampledFunction::new(grid, values).unwrap()
}

fn radii(j: usize) -> RadiusGrid {
    RadiusGrid::multiples_of(H, j, true).unwrap()
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0..4.0f64, n)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (4usize..48).prop_flat_map(|n| (values(n), values(n)))
}

fn slack(x: f64) -> f64 {
    1e-12 * (1.0 + x.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn absolute_homogeneity(v in prop::collection::vec(-4.0..4.0f64, 4..48), c in -5.0..5.0f64, j in 1usize..10) {
        let m = hl_maximal(&field(v.clone()), &radii(j)).unwrap();
        let mc = hl_maximal(&field(v.iter().map(|x| c * x).collect()), &radii(j)).unwrap();
        for (a, b) in mc.values().iter().zip(m.values()) {
            prop_assert!((a - c.abs() * b).abs() <= slack(*a));
        }
    }

    #[test]
    fn monotone_in_absolute_value((f, g) in pair(), j in 1usize..10) {
        let big: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a.abs().max(b.abs())).collect();
        let ms = hl_maximal(&field(f), &radii(j)).unwrap();
        let mb = hl_maximal(&field(big), &radii(j)).unwrap();
        for (s, b) in ms.values().iter().zip(mb.values()) {
            prop_assert!(s <= &(b + slack(*b)));
        }
    }

    #[test]
    fn sublinear((f, g) in pair(), j in 1usize..10) {
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let r = radii(j);
        let (mf, mg, ms) = (
            hl_maximal(&field(f), &r).unwrap(),
            hl_maximal(&field(g), &r).unwrap(),
            hl_maximal(&field(sum), &r).unwrap(),
        );
        for i in 0..ms.values().len() {
            let rhs = mf.value(i) + mg.value(i);
            prop_assert!(ms.value(i) <= rhs + slack(rhs));
        }
    }

    #[test]
    fn translation_equivariant(core in prop::collection::vec(-4.0..4.0f64, 4..32), k in 1usize..8, j in 1usize..10) {
        // Zero padding keeps the support inside the hull for both placements.
        let n = core.len() + k;
        let mut f = core.clone();
        f.resize(n, 0.0);
        let mut shifted = vec![0.0; k];
        shifted.extend(&core);
        let r = radii(j);
        let m = hl_maximal(&field(f), &r).unwrap();
        let ms = hl_maximal(&field(shifted), &r).unwrap();
        for i in 0..n - k {
            prop_assert!((ms.value(i + k) - m.value(i)).abs() <= slack(m.value(i)));
        }
    }

    #[test]
    fn local_never_exceeds_global(v in prop::collection::vec(-4.0..4.0f64, 6..48), lo in 0usize..3, len in 2usize..6, j in 1usize..10) {
        let n = v.len();
        let mask: Vec<bool> = (0..n).map(|i| i >= lo && i < (lo + len).min(n)).collect();
        let f = field(v);
        let local = local_maximal(&f, &mask, &radii(j)).unwrap();
        let global = hl_maximal(&f, &radii(j)).unwrap();
        for i in (0..n).filter(|&i| mask[i]) {
            prop_assert!(local.value(i) <= global.value(i) + slack(global.value(i)));
            prop_assert!(local.value(i) >= f.values()[i].abs() - slack(f.values()[i]));
        }
    }

    #[test]
    fn reflected_bilinear_is_symmetric((f, g) in pair(), j in 1usize..10) {
        let (f, g) = (field(f), field(g));
        let a = bilinear_maximal(&f, &g, -1.0, &radii(j)).unwrap();
        let b = bilinear_maximal(&g, &f, -1.0, &radii(j)).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= slack(*x));
        }
    }

    #[test]
    fn bilinear_at_most_product_of_sup_norms((f, g) in pair(), j in 1usize..10, alpha in prop_oneof![Just(-1.0), Just(0.0), Just(2.0), Just(3.0)]) {
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let bound = sup(&f) * sup(&g);
        let m = bilinear_maximal(&field(f), &field(g), alpha, &radii(j)).unwrap();
        for v in m.values() {
            prop_assert!(*v <= bound + slack(bound));
        }
    }

    #[test]
    fn norms_are_homogeneous_and_pairings_symmetric((f, g) in pair(), c in -3.0..3.0f64, p in 1.0..6.0f64) {
        let (ff, gg) = (field(f.clone()), field(g));
        let scaled = field(f.iter().map(|x| c * x).collect());
        let (nf, ns) = (lp_norm(&ff, p).unwrap(), lp_norm(&scaled, p).unwrap());
        prop_assert!((ns - c.abs() * nf).abs() <= 1e-10 * (1.0 + ns));
        let (a, b) = (inner_product(&ff, &gg).unwrap(), inner_product(&gg, &ff).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn hausdorff_is_a_metric(
        a in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..8),
        b in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..8),
        c in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..8),
    ) {
        let pts = |s: &[(f64, f64)]| s.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>();
        let (a, b, c) = (pts(&a), pts(&b), pts(&c));
        let ab = hausdorff_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
        prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let ac = hausdorff_distance(&a, &c).unwrap();
        let cb = hausdorff_distance(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
    }
}
