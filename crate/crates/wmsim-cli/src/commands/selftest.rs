//! `--selftest`: quick closed-form sanity checks per subcommand, printed as
//! one PASS/FAIL line each.

use wmsim_core::classical::{
    leapfrog_evolve, measurement_kick, ClassicalObservable, ClassicalSystem, PhasePoint, Potential,
};
use wmsim_core::linalg::{ComplexMatrix, C64};
use wmsim_core::models::{
    dwell_corr_analytic, dwell_model, green_functions, junction_quantities, regime_check,
    DotParams, DoubleWellParams, JunctionParams,
};
use wmsim_core::quantum::{
    heisenberg_evolve, marginalize, quasiprob, smoothed_observable, thermal_state,
    time_reversed_quasiprob, MeasurementPlan, Observable,
};

type Check = (&'static str, bool);

fn dwell_fixture() -> (DoubleWellParams, f64) {
    (DoubleWellParams::new(1.0, 1.0, 0.1).unwrap(), 2.0f64.sqrt())
}

pub fn dwell_corr_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let p = DoubleWellParams::new(1.0, 0.0, 0.5).unwrap();
    let (h, _) = dwell_model(&p);
    checks.push((
        "tau=0 hamiltonian is diagonal",
        h.matrix().sub(&ComplexMatrix::diag(&[1.0, -1.0])).frobenius_norm() < 1e-14,
    ));
    let (p2, delta) = dwell_fixture();
    let (h2, _) = dwell_model(&p2);
    let spec = wmsim_core::linalg::hermitian_eigen(h2.matrix(), 1e-9).unwrap();
    checks.push((
        "eigenvalues are ±Δ",
        (spec.eigenvalues[0] + delta).abs() < 1e-12 && (spec.eigenvalues[1] - delta).abs() < 1e-12,
    ));
    let pz = DoubleWellParams::new(0.0, 1.0, 0.5).unwrap();
    checks.push((
        "eps=0 correlator vanishes",
        dwell_corr_analytic(&pz, 0.0, 1.0, 2.0).unwrap() == 0.0,
    ));
    let pt = DoubleWellParams::new(0.8, 0.0, 0.4).unwrap();
    checks.push((
        "tau=0 correlator is -tanh(eps/kT)",
        (dwell_corr_analytic(&pt, 0.0, 1.0, 2.0).unwrap() + (0.8f64 / 0.4).tanh()).abs() < 1e-12,
    ));
    checks
}

pub fn dwell_asym_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let (p, _) = dwell_fixture();
    let (h, z) = dwell_model(&p);
    let rho = thermal_state(&h, p.k_t).unwrap();
    let two = MeasurementPlan::new(vec![(0.0, z.clone()), (1.0, z.clone())], 0.0).unwrap();
    let fwd = quasiprob(&two, &rho, &h).unwrap();
    let rev = time_reversed_quasiprob(&two, &rho, &h).unwrap();
    checks.push((
        "two-step plan is time symmetric",
        fwd.aligned_max_diff(&rev).unwrap() < 1e-10,
    ));
    let hz = wmsim_core::quantum::Hamiltonian::new(ComplexMatrix::diag(&[0.5, -0.5])).unwrap();
    let compat = MeasurementPlan::new(
        vec![(0.0, z.clone()), (1.0, z.clone()), (2.0, z.clone())],
        0.0,
    )
    .unwrap();
    let rho_c = thermal_state(&hz, 0.5).unwrap();
    let f = quasiprob(&compat, &rho_c, &hz).unwrap();
    let r = time_reversed_quasiprob(&compat, &rho_c, &hz).unwrap();
    checks.push((
        "compatible plan is time symmetric",
        f.aligned_max_diff(&r).unwrap() < 1e-10,
    ));
    checks
}

pub fn dot_s3_checks() -> Vec<Check> {
    let p = DotParams::new(0.5, 1.0, 0.0).unwrap();
    let on = green_functions(0.5, &p);
    let off = green_functions(-1.3, &p);
    vec![
        (
            "on-resonance G^R = 2/Γ",
            (on.gr - C64::new(2.0, 0.0)).norm() < 1e-14,
        ),
        ("G^A = −conj(G^R)", (off.ga + off.gr.conj()).norm() < 1e-15),
        (
            "kT=0 Keldysh component vanishes at ω=0",
            green_functions(0.0, &p).gk.norm() == 0.0,
        ),
    ]
}

pub fn junction_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let half = JunctionParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
    checks.push((
        "T=1/2 kills the intrinsic cumulant",
        junction_quantities(&half).s3_i0.abs() < 1e-15,
    ));
    let peak = JunctionParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
    checks.push((
        "χ vanishes on the resonance peak",
        junction_quantities(&peak).chi == 0.0,
    ));
    let d = DotParams::new(0.1, 0.1, 0.0).unwrap();
    let j = JunctionParams::new(10.0, 10.0, 0.1, 1.0).unwrap();
    checks.push((
        "eV = Γ fails the first inequality",
        !regime_check(&j, &d).checks[0].pass,
    ));
    checks
}

pub fn classical_sym_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let free = ClassicalSystem::one_dof(Potential::Harmonic { k: 0.0 }, 1e-2).unwrap();
    let start = PhasePoint::new(vec![0.2], vec![0.5]);
    let end = leapfrog_evolve(&start, &free, 0.01, 100).unwrap();
    checks.push((
        "free particle drifts exactly",
        (end.q[0] - (0.2 + 0.5 * 1.0)).abs() < 1e-12,
    ));
    let a = ClassicalObservable::Position { dof: 0 };
    let (kicked, reading) = measurement_kick(&start, &a, 0.3, 0.7).unwrap();
    checks.push((
        "position kick shifts momentum only",
        (kicked.p[0] - (0.5 - 0.3 * 0.7)).abs() < 1e-15 && kicked.q[0] == 0.2,
    ));
    checks.push(("reading is g·A", (reading - 0.3 * 0.2).abs() < 1e-15));
    let (unkicked, _) = measurement_kick(&start, &a, 5.0, 0.0).unwrap();
    checks.push(("σ_p = 0 leaves the point unchanged", unkicked == start));
    checks
}

pub fn disturbance_scan_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let (p, _) = dwell_fixture();
    let (h, z) = dwell_model(&p);
    let rho = thermal_state(&h, p.k_t).unwrap();
    let single = MeasurementPlan::new(vec![(0.0, z.clone())], 0.7).unwrap();
    let q = quasiprob(&single, &rho, &h).unwrap();
    checks.push((
        "single-step table obeys the Born rule",
        q.weights().iter().all(|&w| w >= -1e-10) && (q.sum() - 1.0).abs() < 1e-12,
    ));
    let scalar = marginalize(&q, 0).unwrap();
    checks.push((
        "marginalizing a single step leaves unit weight",
        (scalar.weights()[0] - 1.0).abs() < 1e-12,
    ));
    checks
}

pub fn smoothing_scan_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let (p, _) = dwell_fixture();
    let (h, z) = dwell_model(&p);
    let single = smoothed_observable(&z, &h, &[(0.9, 1.0)]).unwrap();
    let direct = heisenberg_evolve(&z, &h, 0.9).unwrap();
    checks.push((
        "single-point window is plain evolution",
        single.matrix().sub(direct.matrix()).frobenius_norm() < 1e-12,
    ));
    let hx = wmsim_core::quantum::Hamiltonian::new(ComplexMatrix::diag(&[1.0, -1.0])).unwrap();
    let zc = Observable::new(ComplexMatrix::diag(&[1.0, -1.0])).unwrap();
    let sm = smoothed_observable(&zc, &hx, &[(0.0, 0.5), (2.0, 0.5)]).unwrap();
    checks.push((
        "commuting observable is unchanged by smoothing",
        sm.matrix().sub(zc.matrix()).frobenius_norm() < 1e-12,
    ));
    checks
}

/// Print one line per check; true iff all passed.
pub fn report(name: &str, checks: &[Check]) -> bool {
    let mut ok = true;
    for (label, pass) in checks {
        println!(
            "selftest {name}: {} ... {}",
            label,
            if *pass { "PASS" } else { "FAIL" }
        );
        ok &= pass;
    }
    ok
}
