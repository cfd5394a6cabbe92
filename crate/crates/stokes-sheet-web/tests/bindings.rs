use stokes_sheet::FluidParams;
use stokes_sheet_web::{branch_table, spectrum_table, Run, BRANCH_COLS, SPECTRUM_COLS};

#[test]
fn spectrum_rows_match_flat_rates() {
    let p = FluidParams::with_theta(1.0, 1.0, 1.0, 0.0).unwrap();
    let rows = spectrum_table(&p, 4, 32).unwrap();
    assert_eq!(rows.len(), 4 * SPECTRUM_COLS);
    for r in rows.chunks(SPECTRUM_COLS) {
        assert_eq!(r[1], -r[0] / 4.0);
        assert!((r[2] - r[1]).abs() <= 1e-6 * r[1].abs());
    }
}

#[test]
fn branch_rows_start_at_bifurcation() {
    let rows = branch_table(2, 32, 0.05, 0.01).unwrap();
    assert_eq!(rows.len() % BRANCH_COLS, 0);
    assert_eq!(&rows[..BRANCH_COLS], &[0.0, 4.0, 0.0, 0.0]);
    assert!(rows.len() / BRANCH_COLS > 2);
}

#[test]
fn run_decays_at_flat_rate() {
    let p = FluidParams::with_theta(1.0, 1.0, 1.0, 0.0).unwrap();
    let mut run = Run::new(&p, 32, &[1e-3], &[], 1e-2).unwrap();
    run.advance(100).unwrap();
    assert!((run.time() - 1.0).abs() < 1e-12);
    let ratio = run.profile().cos_amplitude(1) / 1e-3;
    assert!((ratio / (-0.25f64).exp() - 1.0).abs() < 1e-3, "{ratio}");
}

#[test]
fn unstable_run_reports_blow_up() {
    let p = FluidParams::with_theta(1.0, 1.0, 1.0, -20.0).unwrap();
    let mut run = Run::new(&p, 32, &[1.0], &[], 0.05).unwrap();
    assert!(run.advance(2000).is_err());
    assert!(Run::new(&p, 32, &[], &[], 0.0).is_err());
}
