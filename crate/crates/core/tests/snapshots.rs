use kgnr_core::harness::snapshot::{
    restore, snapshot_set, snapshots_csv, snapshots_from_json, snapshots_json,
};
use kgnr_core::limit::{solve_nls, NlsPair, SplittingConfig};
use kgnr_core::model::initial_state;
use kgnr_core::reference::reference_integrate;
use kgnr_core::{make_grid, Field, FirstOrderState, InitialData, KgParams};
use num_complex::Complex64;

fn data() -> InitialData {
    let g = make_grid(8).unwrap();
    let phi = Field::from_fn(&g, |x| Complex64::new(2.0, 1.0) / 5f64.sqrt() * x.cos());
    let gamma = Field::from_fn(&g, |x| Complex64::new(0.5 * x.cos(), x.sin() / 2f64.sqrt()));
    InitialData::new(phi, gamma).unwrap()
}

#[test]
fn limit_trajectory_round_trips_through_json() {
    let p = KgParams::new(1.0, -1.0, 1).unwrap();
    let mut cfg = SplittingConfig::new(1e-2);
    cfg.snapshot_stride = 5;
    let traj = solve_nls(&NlsPair::initial(&data()), &p, &cfg, 0.1).unwrap();
    let set = snapshot_set(&traj);
    assert_eq!(set.rows.len(), 3 * 16);
    let back =
        restore::<NlsPair>(&snapshots_from_json(&snapshots_json(&set).unwrap()).unwrap()).unwrap();
    assert_eq!(back.snapshots.len(), traj.snapshots.len());
    for (a, b) in back.snapshots.iter().zip(&traj.snapshots) {
        assert_eq!(a.t, b.t);
        assert_eq!(a.u0.coeffs(), b.u0.coeffs());
        assert_eq!(a.v0.coeffs(), b.v0.coeffs());
    }
}

#[test]
fn reference_snapshots_as_csv() {
    let p = KgParams::new(4.0, -1.0, 1).unwrap();
    let psi = initial_state(&data(), p.c).unwrap();
    let traj = reference_integrate(&psi, &p, 1e-3, 0.01, 0).unwrap();
    let text = snapshots_csv(&snapshot_set(&traj)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,k,u_re,u_im,v_re,v_im"));
    assert_eq!(lines.count(), 2 * 16);
}

#[test]
fn mislabelled_snapshots_are_rejected() {
    let p = KgParams::new(1.0, -1.0, 1).unwrap();
    let traj = solve_nls(
        &NlsPair::initial(&data()),
        &p,
        &SplittingConfig::new(1e-2),
        0.02,
    )
    .unwrap();
    assert!(restore::<FirstOrderState>(&snapshot_set(&traj)).is_err());
}
