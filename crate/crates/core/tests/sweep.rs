use npspectra::sweep::{count_outside, fill_distance, OUTSIDE_THRESHOLD};
use npspectra::*;
use proptest::prelude::*;

#[test]
fn single_r_fill_distance_is_base_case() {
    let grid = ProbeGrid::new(-0.45, 0.45, 0.01).unwrap();
    let report = run_sweep(&[2.0], NodePolicy::default(), grid).unwrap();
    assert_eq!(report.fill_distances.len(), 1);
    let mut sorted = report.spectra[0].eigenvalues.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(
        report.fill_distances[0],
        fill_distance(&grid.points(), &sorted)
    );
    assert_eq!(report.spectra[0].n_nodes, 192);
}

#[test]
fn sweep_fill_distance_and_outside_counts() {
    let grid = ProbeGrid::new(-0.45, 0.45, 0.01).unwrap();
    let report = run_sweep(&[2.0, 4.0, 8.0, 16.0], NodePolicy::default(), grid).unwrap();
    for w in report.fill_distances.windows(2) {
        assert!(w[1] <= w[0], "{:?}", report.fill_distances);
    }
    assert!(*report.fill_distances.last().unwrap() <= 0.1);
    for w in report.outside_counts.windows(2) {
        assert!(w[1] >= w[0], "{:?}", report.outside_counts);
    }
    assert!(report.outside_counts[3] > report.outside_counts[0]);
    for (s, c) in report.spectra.iter().zip(&report.outside_counts) {
        assert_eq!(*c, count_outside(s, OUTSIDE_THRESHOLD, true));
        assert_eq!(count_outside(s, OUTSIDE_THRESHOLD, false), c + 1);
    }
}

#[test]
fn sweep_is_deterministic() {
    let grid = ProbeGrid::new(-0.4, 0.4, 0.05).unwrap();
    let a = run_sweep(&[2.0, 3.0], NodePolicy::Fixed { n_nodes: 128 }, grid).unwrap();
    let b = run_sweep(&[2.0, 3.0], NodePolicy::Fixed { n_nodes: 128 }, grid).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sweep_rejects_bad_input() {
    let grid = ProbeGrid {
        lower: -0.45,
        upper: 0.45,
        step: 0.01,
    };
    assert!(run_sweep(&[], NodePolicy::default(), grid).is_err());
    assert!(run_sweep(&[4.0, 2.0], NodePolicy::default(), grid).is_err());
    assert!(run_sweep(&[2.0, 2.0], NodePolicy::default(), grid).is_err());
    assert!(ProbeGrid::new(-0.5, 0.45, 0.01).is_err());
    assert!(ProbeGrid::new(0.2, 0.1, 0.01).is_err());
    assert!(ProbeGrid::new(-0.1, 0.1, 0.0).is_err());
}

#[test]
fn ellipse_oracle_examples() {
    let v = ellipse_oracle(2.0, 1.0, 3).unwrap();
    let expected = [
        1.0 / 6.0,
        1.0 / 18.0,
        1.0 / 54.0,
        -1.0 / 54.0,
        -1.0 / 18.0,
        -1.0 / 6.0,
    ];
    for (a, b) in v.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-15);
    }
    assert!(ellipse_oracle(1.0, 1.0, 3).is_err());
    assert!(ellipse_oracle(1.0, 2.0, 3).is_err());
    assert!(ellipse_oracle(2.0, 1.0, 0).is_err());
    assert_eq!(ellipse_oracle(3.0, 1.0, 4).unwrap()[0], 0.25);
}

#[test]
fn ellipse_oracle_unions_are_dense() {
    let eps = 0.02;
    let mut union = Vec::new();
    for r in [1.0 / 3.0, 2.0 / 3.0, 0.9, 0.99] {
        // a/b = (1 + r)/(1 - r); enough terms to reach below eps
        let b = 1.0;
        let a = (1.0 + r) / (1.0 - r);
        union.extend(ellipse_oracle(a, b, 2000).unwrap());
    }
    union.sort_by(f64::total_cmp);
    let grid = ProbeGrid::new(-0.49, 0.49, 0.01).unwrap();
    let d = fill_distance(&grid.points(), &union);
    assert!(d <= eps, "{d}");
}

#[test]
fn density_witness_examples() {
    assert_eq!(density_witness(0.0, &[0.5, 0.9], 1e-3).unwrap().0, 0);
    let r_list: Vec<f64> = (1..=20).map(|j| (-1.0 / j as f64).exp()).collect();
    let (n, j) = density_witness(1.0, &r_list, 1e-9).unwrap();
    assert_eq!(n as usize, j + 1);
    let (n, j) = density_witness(0.5, &[0.9, 0.99, 0.999], 0.01).unwrap();
    assert_eq!((n, j), (500, 2));
    let t = -(0.999f64).ln();
    assert!((500.0 * t - 0.5).abs() < 3e-4);
    assert!(matches!(
        density_witness(0.37, &[0.5], 1e-3),
        Err(Error::NoWitness { .. })
    ));
    assert!(density_witness(1.0, &[1.0], 0.1).is_err());
    assert!(density_witness(-1.0, &[0.5], 0.1).is_err());
    assert!(density_witness(1.0, &[0.5], 0.0).is_err());
}

proptest! {
    #[test]
    fn witness_satisfies_contract(
        x in 0.0f64..20.0,
        eps in 1e-4f64..0.1,
        r_list in proptest::collection::vec(0.5f64..0.99999, 1..6),
    ) {
        if let Ok((n, j)) = density_witness(x, &r_list, eps) {
            let t = -r_list[j].ln();
            prop_assert!((n as f64 * t - x).abs() < eps);
        } else {
            // a failure means no list entry admits a witness
            for r in &r_list {
                let t = -r.ln();
                prop_assert!(((x / t).round() * t - x).abs() >= eps);
            }
        }
    }

    #[test]
    fn fill_distance_shrinks_with_more_points(
        base in proptest::collection::vec(-0.5f64..0.5, 1..20),
        extra in proptest::collection::vec(-0.5f64..0.5, 0..20),
    ) {
        let grid = ProbeGrid::new(-0.45, 0.45, 0.05).unwrap().points();
        let mut a = base.clone();
        a.sort_by(f64::total_cmp);
        let mut b = base;
        b.extend(extra);
        b.sort_by(f64::total_cmp);
        prop_assert!(fill_distance(&grid, &b) <= fill_distance(&grid, &a));
    }
}
