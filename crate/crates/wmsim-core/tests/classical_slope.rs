//! The classical back-action also follows the g² law: inserting a middle
//! measurement shifts the surviving readings' moments by O(g²). Measured
//! with paired detector streams so the Monte Carlo noise on the difference
//! stays O(g) per trajectory.

use wmsim_core::classical::{
    estimate_moments, run_experiment, ClassicalDetectorSpec, ClassicalObservable,
    ClassicalProtocol, ClassicalSystem, Parity, PhaseEnsemble, Potential, ProtocolStep,
    SampleBatch,
};

fn select_columns(batch: &SampleBatch, cols: &[usize]) -> SampleBatch {
    let mut out = Vec::with_capacity(batch.n_samples() * cols.len());
    for row in batch.rows() {
        for &c in cols {
            out.push(row[c]);
        }
    }
    SampleBatch::from_parts(out, cols.len(), batch.g(), batch.seed())
}

#[test]
fn classical_disturbance_scales_quadratically() {
    let sys =
        ClassicalSystem::one_dof(Potential::QuarticDoubleWell { a: 0.25, b: 0.5 }, 2e-3).unwrap();
    let q_step = |t: f64| {
        ProtocolStep::new(t, ClassicalObservable::Position { dof: 0 }, Parity::Even)
    };
    let det = ClassicalDetectorSpec::new(0.0, 1.0).unwrap();
    let ens = PhaseEnsemble::boltzmann(&sys, 0.5, 400_000, 555).unwrap();

    let mut pts = Vec::new();
    for &g in &[0.4, 0.2, 0.1, 0.05] {
        let full_proto =
            ClassicalProtocol::new(vec![q_step(0.0), q_step(0.4), q_step(0.8)], g, det).unwrap();
        let reduced_proto = full_proto.without_step(1).unwrap();
        let full = run_experiment(&ens, &sys, &full_proto, 555).unwrap();
        let reduced = run_experiment(&ens, &sys, &reduced_proto, 555).unwrap();
        let mf = estimate_moments(&select_columns(&full, &[0, 2]), g, 0.0).unwrap();
        let mr = estimate_moments(&reduced, g, 0.0).unwrap();
        let worst = mf
            .entries
            .iter()
            .zip(&mr.entries)
            .map(|(a, b)| (a.value - b.value).abs())
            .fold(0.0f64, f64::max);
        pts.push((g.ln(), worst.ln()));
    }

    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(
        (1.9..=2.1).contains(&slope),
        "classical disturbance slope {slope}"
    );
}
