use sqzopto::model::Direction;
use sqzopto::moments::{drift_system, evolve_moments, steady_moments, DriftInputs, MomentVector};
use sqzopto::steadystate::operating_point;
use sqzopto::sweep::{
    apply_axis, evaluate_point, figs123_params, figure_preset, run_sweep, AxisName, MeasureSet, RowStatus, Tolerances,
    PRESET_NAMES,
};

#[test]
fn every_preset_builds_and_validates() {
    for name in PRESET_NAMES {
        let spec = figure_preset(name).unwrap();
        assert!(!spec.axes.is_empty(), "{name}");
        assert!(spec.axes.iter().all(|a| !a.values.is_empty()), "{name}");
    }
    assert!(figure_preset("fig9").is_err());
}

#[test]
fn operating_point_to_measures() {
    let mut p = figs123_params();
    p.direction = Direction::Ccw;
    let solver = Default::default();
    let op = operating_point(&p, &solver).unwrap();
    let (sys, diffs) = drift_system(&DriftInputs::new(&op, &p));
    assert!(diffs.is_empty());
    assert!(sys.stable);
    let x = steady_moments(&sys).unwrap();
    assert!(x.max_identity_defect() < 1e-9);
    let y = evolve_moments(
        &sys,
        &MomentVector::commutator_reference(),
        20.0 / sys.spectral_abscissa.abs(),
        1.0 / sys.spectral_radius,
    )
    .unwrap();
    assert!((x.to_dvector() - y.to_dvector()).camax() < 1e-6);

    let r = evaluate_point(&p, &MeasureSet::all(), &solver, &Tolerances::default());
    assert_eq!(r.status, RowStatus::Ok);
    assert!(r.cm.unwrap().is_bona_fide(1e-9));
    let m = r.report.unwrap();
    assert!(m.e_n.iter().all(|&e| e >= 0.0));
}

#[test]
fn negative_damping_is_rejected() {
    let mut p = figs123_params();
    p.gamma_m = [-1e-5, 1e-5];
    let r = evaluate_point(&p, &MeasureSet::all(), &Default::default(), &Tolerances::default());
    assert!(matches!(r.status, RowStatus::Invalid(_)));
    assert!(r.report.is_none() && r.cm.is_none());
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let mut spec = figure_preset("fig4-regimes").unwrap();
    spec.axes[0].values.truncate(12);
    let one = run_sweep(&spec, 1).unwrap();
    let three = run_sweep(&spec, 3).unwrap();
    assert_eq!(one.len(), 24);
    assert_eq!(format!("{one:?}"), format!("{three:?}"));
}

#[test]
fn axis_application() {
    let spec = figure_preset("fig2").unwrap();
    let mut p = spec.base;
    apply_axis(&mut p, AxisName::DeltaC, 1.25, spec.frequency_unit).unwrap();
    assert_eq!(p.delta_c, 1.25);
    apply_axis(&mut p, AxisName::RD, 0.3, spec.frequency_unit).unwrap();
    assert_eq!(p.r_d, 0.3);
}
