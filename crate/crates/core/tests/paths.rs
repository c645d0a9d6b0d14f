mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use common::{chord_path, max_abs, random_linear_path, rng};
use tunnelopt::linalg::pauli;
use tunnelopt::paths::{derivative_mismatch, CustomPath, HamiltonianPath, MatrixFn, Schedule};
use tunnelopt::{grover_path, linear_path, quarter_circle, schedule_from_grid, uniform_schedule, CMatrix, Error, HermitianOperator, PathKind};

#[test]
fn linear_path_interpolates_endpoints() {
    let h0 = HermitianOperator::diagonal(&[0.0, 1.0]);
    let h1 = HermitianOperator::new(pauli::<f64>()[0].scale(0.5)).unwrap();
    let p = linear_path(h0.clone(), h1.clone()).unwrap();
    assert_eq!(p.hamiltonian(0.0).matrix(), h0.matrix());
    assert_eq!(p.hamiltonian(1.0).matrix(), h1.matrix());
    let mid = (h0.matrix() + h1.matrix()).scale(0.5);
    assert!(max_abs(&(p.hamiltonian(0.5).matrix() - mid)) < 1e-15);
    assert!(max_abs(&(p.derivative(0.5).matrix() - (h1.matrix() - h0.matrix()))) < 1e-15);
    assert_eq!(p.kind(), PathKind::Linear);
    assert!(matches!(linear_path(h0, HermitianOperator::diagonal(&[0.0, 1.0, 2.0])), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn derivatives_match_central_differences() {
    let custom = CustomPath::new(
        2,
        Arc::new(|q: f64| pauli::<f64>()[0].scale(q.sin()) + pauli::<f64>()[2].scale(q * q)) as MatrixFn<f64>,
        Arc::new(|q: f64| pauli::<f64>()[0].scale(q.cos()) + pauli::<f64>()[2].scale(2.0 * q)) as MatrixFn<f64>,
    );
    assert!(derivative_mismatch(&custom, 11, 1e-5) < 1e-6);
    assert!(derivative_mismatch(&random_linear_path(&mut rng(1), 4), 11, 1e-5) < 1e-6);
    assert!(derivative_mismatch(&chord_path(), 11, 1e-5) < 1e-6);
    assert!(derivative_mismatch(&quarter_circle(2.0).unwrap(), 11, 1e-5) < 1e-6);
    assert!(derivative_mismatch(&grover_path::<f64>(64).unwrap(), 11, 1e-5) < 1e-6);
}

#[test]
fn bloch_paths_report_gap_and_speed() {
    let c = chord_path();
    assert!((c.min_gap() - FRAC_1_SQRT_2).abs() < 1e-10);
    assert!((c.argmin_gap() - 0.5).abs() < 1e-6);
    let qc = quarter_circle(1.0_f64).unwrap();
    assert!((qc.min_gap() - 1.0).abs() < 1e-12);
    for i in 0..=20 {
        let q = i as f64 / 20.0;
        assert!((qc.bloch_speed(q) - PI / 2.0).abs() < 1e-12);
        assert!((qc.direction(q).norm() - 1.0).abs() < 1e-12);
        for p in [&c, &qc] {
            let f = p.frame(q, 1e-10).unwrap();
            assert!((f.eigenvalues()[1] - f.eigenvalues()[0] - p.gap(q)).abs() < 1e-10);
        }
    }
}

#[test]
fn uniform_schedule_leaves_path_unchanged() {
    let p = random_linear_path(&mut rng(2), 3);
    let u = uniform_schedule();
    for i in 0..=10 {
        let s = i as f64 / 10.0;
        assert_eq!(p.hamiltonian(u.q(s)).matrix(), p.hamiltonian(s).matrix());
        assert!((u.qdot(s) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn grid_schedules() {
    let a = schedule_from_grid(&[0.0, 0.5, 1.0]).unwrap();
    assert_eq!(a.q(0.5), 0.5);
    let b = schedule_from_grid(&[0.0, 0.25, 1.0]).unwrap();
    assert_eq!(b.q(0.5), 0.25);
    b.check_strictly_monotone().unwrap();
    let values: Vec<f64> = (0..=200).map(|i| (i as f64 / 200.0).powi(2)).collect();
    let sq = schedule_from_grid(&values).unwrap();
    assert!((sq.qdot(0.5) - 1.0).abs() < 1e-3);
    assert!((sq.q(0.3) - 0.09).abs() < 1e-4);
    assert!(matches!(schedule_from_grid(&[0.0, 0.6, 0.4, 1.0]), Err(Error::NotMonotone { .. })));
    assert!(matches!(schedule_from_grid(&[0.1, 0.6, 1.0]), Err(Error::BadEndpoints)));
}

#[test]
fn grid_schedule_round_trip() {
    let s = Schedule::sample(|x: f64| (x + 0.1 * (PI * x).sin(), 1.0 + 0.1 * PI * (PI * x).cos()), 40).unwrap();
    let (knots, _) = s.knots();
    let values: Vec<f64> = knots.iter().map(|&k| s.q(k)).collect();
    let rebuilt = schedule_from_grid(&values).unwrap();
    for (&k, &v) in knots.iter().zip(&values) {
        assert!((rebuilt.q(k) - v).abs() < 1e-12);
    }
}

#[test]
fn custom_path_symmetrizes_and_keeps_kind() {
    let m: MatrixFn<f64> = Arc::new(|_| CMatrix::identity(2, 2));
    let p = CustomPath::new(2, m.clone(), m);
    assert_eq!(p.kind(), PathKind::Custom);
    assert_eq!(p.dim(), 2);
}
