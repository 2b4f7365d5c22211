use fxtopo::summaries::{betti_curve, bottleneck, landscape, wasserstein, WassersteinParams};
use fxtopo::tda::{PersistenceDiagram, PersistencePair};
use proptest::prelude::*;

fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram<f64> {
    let pairs = points.iter().map(|&(b, l)| PersistencePair::new(b, b + l)).collect();
    PersistenceDiagram::new(1, pairs, vec![], 10.0)
}

fn pts() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..3.0, 0.01f64..2.0), 0..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn wasserstein_is_a_metric(a in pts(), b in pts(), c in pts()) {
        let p = WassersteinParams::default();
        let (a, b, c) = (diagram(&a), diagram(&b), diagram(&c));
        let ab = wasserstein(&a, &b, &p).unwrap();
        prop_assert_eq!(ab, wasserstein(&b, &a, &p).unwrap());
        prop_assert_eq!(wasserstein(&a, &a, &p).unwrap(), 0.0);
        let ac = wasserstein(&a, &c, &p).unwrap();
        let bc = wasserstein(&b, &c, &p).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
    }

    #[test]
    fn bottleneck_bounded_by_w_infinity_proxy(a in pts(), b in pts()) {
        // With the max-norm ground metric, W_p decreases towards the bottleneck as p grows.
        let (a, b) = (diagram(&a), diagram(&b));
        let bn = bottleneck(&a, &b).unwrap();
        let w1 = wasserstein(&a, &b, &WassersteinParams { p: 1.0, q: f64::INFINITY, include_essential: false }).unwrap();
        prop_assert!(bn <= w1 + 1e-9);
        prop_assert_eq!(bn, bottleneck(&b, &a).unwrap());
    }

    #[test]
    fn landscape_layers_are_ordered(a in pts()) {
        let l = landscape(&diagram(&a), 3, 50);
        for t in 0..l.grid.len() {
            prop_assert!(l.layers[0][t] >= l.layers[1][t]);
            prop_assert!(l.layers[1][t] >= l.layers[2][t]);
            prop_assert!(l.layers[2][t] >= 0.0);
        }
    }

    #[test]
    fn betti_counts_alive_intervals(a in pts()) {
        let d = diagram(&a);
        let curve = betti_curve(&d, 40);
        for (t, &count) in curve.grid.iter().zip(&curve.counts) {
            let alive = d.pairs.iter().filter(|p| p.birth <= *t && *t < p.death).count();
            prop_assert_eq!(count, alive);
        }
    }
}

#[test]
fn single_point_against_empty() {
    let a = diagram(&[(1.0, 2.0)]);
    let b = diagram(&[]);
    let w = wasserstein(&a, &b, &WassersteinParams::default()).unwrap();
    // diagonal projection at l2 distance 2 / sqrt(2)
    approx::assert_abs_diff_eq!(w, 2.0f64.sqrt(), epsilon = 1e-12);
    approx::assert_abs_diff_eq!(bottleneck(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
}
