mod common;

use std::f64::consts::PI;

use common::{chord_path, unit_arc_path};
use nalgebra::Vector3;
use tunnelopt::paths::{quarter_circle, uniform_schedule, BlochPath, HamiltonianPath, Schedule};
use tunnelopt::zero_tunneling::{rotate, verify_density, verify_excited, PieceKind};
use tunnelopt::{
    construct, construct_with_offset, evolve, grover_path, measured_tunneling, verify, DensityMatrix, DephasingModel,
    EvolveConfig, PiecewiseControl,
};

fn ground_state(b: &BlochPath<f64>, q: f64) -> DensityMatrix<f64> {
    let frame = b.frame(q, 1e-10).unwrap();
    DensityMatrix::new(frame.projection(0).clone()).unwrap()
}

/// Smooth nonlinear base schedule `q = s² (3 - 2s)` nudged to keep `q̇ > 0`.
fn smoothstep() -> Schedule<f64> {
    Schedule::sample(|s| (0.8 * s * s * (3.0 - 2.0 * s) + 0.2 * s, 0.8 * 6.0 * s * (1.0 - s) + 0.2), 64).unwrap()
}

fn check_control(c: &PiecewiseControl<f64>, b: &BlochPath<f64>) {
    let eps = c.epsilon;
    for r in &c.rotations {
        let chord = b.direction(r.q_plus) - b.direction(r.q_minus);
        assert!(b.direction(r.q_star).dot(&chord).abs() <= 1e-10, "equatorial residual at q* = {}", r.q_star);
        assert!(r.q_star >= r.q_minus.min(r.q_plus) && r.q_star <= r.q_minus.max(r.q_plus));
        assert!(r.duration >= 0.0 && r.duration <= 2.0 * PI / b.gap(r.q_star) + 1e-12);
        // The rotation carries one endpoint direction onto the other.
        let image = rotate(&b.direction(r.q_minus), &r.axis, r.angle);
        assert!((image - b.direction(r.q_plus)).norm() < 1e-9);
    }
    let p = &c.pieces;
    assert_eq!(p.first().unwrap().s_start, 0.0);
    assert_eq!(p.last().unwrap().s_end, 1.0);
    assert!(p.windows(2).all(|w| w[0].s_end == w[1].s_start));
    assert!((c.total_fast_time() * eps - 1.0).abs() < 1e-12);
    assert!(c.deviation_from_base() <= c.deviation_bound() + 1e-12);
}

#[test]
fn quarter_circle_control_has_zero_tunneling() {
    let b = quarter_circle(1.0).unwrap();
    for eps in [0.05, 0.02, 0.01] {
        for offset in [0.0, 0.1, 0.037] {
            let c = construct_with_offset(&b, &uniform_schedule(), eps, offset).unwrap();
            check_control(&c, &b);
            assert!((verify(&c, &b) - 1.0).abs() < 1e-10, "ε = {eps}, offset = {offset}");
            assert!((verify_excited(&c, &b) - 1.0).abs() < 1e-10);
            assert!((verify_density(&c, &b, 1e-10).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn other_paths_and_schedules() {
    let paths = [chord_path(), unit_arc_path(), quarter_circle(0.4).unwrap(), grover_path(16).unwrap()];
    for b in &paths {
        for base in [uniform_schedule(), smoothstep()] {
            let eps = b.min_gap() / 25.0;
            let c = construct(b, &base, eps).unwrap();
            check_control(&c, b);
            assert!((verify(&c, b) - 1.0).abs() < 1e-10);
            assert!((verify_density(&c, b, 1e-10).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn interval_length_follows_minimal_gap() {
    let b = quarter_circle(0.5).unwrap();
    let c = construct(&b, &uniform_schedule(), 0.01).unwrap();
    assert!((c.interval_length - 2.0 * PI * 0.01 / 0.5).abs() < 1e-15);
    assert!((c.min_gap - 0.5).abs() < 1e-12);
}

#[test]
fn control_is_not_unique() {
    let b = quarter_circle(1.0).unwrap();
    let a = construct_with_offset(&b, &uniform_schedule(), 0.02, 0.0).unwrap();
    let c = construct_with_offset(&b, &uniform_schedule(), 0.02, 0.05).unwrap();
    let qa: Vec<f64> = a.rotations.iter().map(|r| r.q_star).collect();
    let qc: Vec<f64> = c.rotations.iter().map(|r| r.q_star).collect();
    assert!(qa.len() != qc.len() || qa.iter().zip(&qc).any(|(x, y)| (x - y).abs() > 1e-3));
    assert!((verify(&a, &b) - 1.0).abs() < 1e-10 && (verify(&c, &b) - 1.0).abs() < 1e-10);
}

#[test]
fn control_beats_smooth_unitary_evolution() {
    let b = quarter_circle(1.0).unwrap();
    let eps = 0.05;
    let rho0 = ground_state(&b, 0.0);
    let tr = evolve(&b, &uniform_schedule(), &DephasingModel::unitary(), eps, &rho0, &EvolveConfig::default()).unwrap();
    let smooth = measured_tunneling(&tr, &b, 1e-10).unwrap().last().unwrap().1;
    let c = construct(&b, &uniform_schedule(), eps).unwrap();
    let control = 1.0 - verify_density(&c, &b, 1e-10).unwrap();
    assert!(smooth > 1e-5, "smooth baseline {smooth}");
    assert!(control.abs() < 1e-10 && control.abs() < smooth);
}

#[test]
fn pieces_alternate_dwell_and_rotation() {
    let b = chord_path();
    let c = construct(&b, &uniform_schedule(), 0.02).unwrap();
    let rotations = c.pieces.iter().filter(|p| p.kind == PieceKind::Rotation).count();
    assert_eq!(rotations, c.rotations.len());
    assert!(c.pieces.windows(2).all(|w| !(w[0].kind == PieceKind::Rotation && w[1].kind == PieceKind::Rotation)));
    for s in [0.0, 0.3, 0.77, 1.0] {
        let q = c.q_at(s);
        assert!((0.0..=1.0).contains(&q));
    }
}

#[test]
fn large_epsilon_is_rejected() {
    let b = quarter_circle(1.0).unwrap();
    assert!(construct(&b, &uniform_schedule(), 0.0).is_err());
    assert!(construct(&b, &uniform_schedule(), 10.0).is_err());
}

#[test]
fn bloch_rotation_is_right_handed() {
    let v = rotate(&Vector3::x(), &Vector3::z(), PI / 2.0);
    assert!((v - Vector3::y()).norm() < 1e-15);
}
