//! Property tests for structural invariants.

mod common;

use common::reference_fits;
use fuelgap::copula::UnitPair;
use fuelgap::estimate::{kendall_tau_pairs, kendall_tau_reference, pseudo_observations};
use fuelgap::simulate::{crosstab, gap_category};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// C(u2,v2) - C(u1,v2) - C(u2,v1) + C(u1,v1) >= 0 for every rectangle.
    #[test]
    fn copulas_are_two_increasing(
        a in 0.01f64..0.99,
        b in 0.01f64..0.99,
        c in 0.01f64..0.99,
        d in 0.01f64..0.99,
    ) {
        let (u1, u2) = if a < b { (a, b) } else { (b, a) };
        let (v1, v2) = if c < d { (c, d) } else { (d, c) };
        for row in reference_fits() {
            let cdf = |u: f64, v: f64| row.family.cdf(&row.params, UnitPair::new(u, v)).unwrap();
            let volume = cdf(u2, v2) - cdf(u1, v2) - cdf(u2, v1) + cdf(u1, v1);
            prop_assert!(
                volume >= -1e-12,
                "{} volume {volume:.3e} on [{u1},{u2}]x[{v1},{v2}]",
                row.family
            );
        }
    }

    /// Rank transforms are invariant to strictly monotone maps of either margin.
    #[test]
    fn pseudo_observations_monotone_invariance(
        xs in prop::collection::vec(-1e3f64..1e3, 10..60),
        ys in prop::collection::vec(-1e3f64..1e3, 10..60),
    ) {
        let n = xs.len().min(ys.len());
        let x = &xs[..n];
        let y = &ys[..n];
        prop_assume!(x.iter().any(|v| *v != x[0]));
        prop_assume!(y.iter().any(|v| *v != y[0]));
        let base = pseudo_observations(x, y).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| (v / 250.0).exp()).collect();
        let ty: Vec<f64> = y.iter().map(|v| v * 3.0 + 11.0).collect();
        let mapped = pseudo_observations(&tx, &ty).unwrap();
        for (p, q) in base.pairs().iter().zip(mapped.pairs()) {
            prop_assert_eq!(p.u().to_bits(), q.u().to_bits());
            prop_assert_eq!(p.v().to_bits(), q.v().to_bits());
        }
    }

    /// The merge-count Kendall tau equals the O(n^2) reference exactly.
    #[test]
    fn kendall_implementations_agree(
        xs in prop::collection::vec(-50i32..50, 2..80),
        ys in prop::collection::vec(-50i32..50, 2..80),
    ) {
        let n = xs.len().min(ys.len());
        let x: Vec<f64> = xs[..n].iter().map(|&v| v as f64).collect();
        let y: Vec<f64> = ys[..n].iter().map(|&v| v as f64).collect();
        prop_assert_eq!(kendall_tau_pairs(&x, &y), kendall_tau_reference(&x, &y));
    }

    /// Cross-tab marginals always reconcile.
    #[test]
    fn crosstab_totals_reconcile(
        gaps in prop::collection::vec((0.3f64..1.8, 0.3f64..1.8), 1..300),
    ) {
        let ct = crosstab(&gaps);
        prop_assert_eq!(ct.grand_total as usize, gaps.len());
        let rows: u64 = ct.row_totals.iter().sum();
        let cols: u64 = ct.col_totals.iter().sum();
        prop_assert_eq!(rows, ct.grand_total);
        prop_assert_eq!(cols, ct.grand_total);
        for (i, &(g1, _)) in gaps.iter().enumerate().take(20) {
            let cat = gap_category(g1);
            prop_assert!(cat < 4, "category of {g1} at {i}");
        }
        for i in 0..4 {
            if ct.row_totals[i] > 0 {
                let s: f64 = ct.row_pct[i].iter().sum();
                prop_assert!((s - 100.0).abs() < 0.01);
            }
        }
    }

    /// h is monotone non-decreasing in v for fixed u.
    #[test]
    fn h_function_monotone_in_v(u in 0.05f64..0.95) {
        for row in reference_fits().into_iter().step_by(4) {
            let mut last = -1.0;
            for j in 1..20 {
                let v = j as f64 / 20.0;
                let h = row.family.h(&row.params, UnitPair::new(u, v)).unwrap();
                prop_assert!(h >= last - 1e-12, "{} h({u},{v}) = {h} < {last}", row.family);
                last = h;
            }
        }
    }
}
