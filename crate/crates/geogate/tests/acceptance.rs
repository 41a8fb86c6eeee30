//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//!
//! Criterion 11 (CLI byte-determinism) lives in the CLI crate's own
//! acceptance test target.

mod common;

use common::brute_force_propagator;
use geogate::dynamics::{output_state_fidelity, NoiseParams};
use geogate::experiments::{
    build_sequence, dephasing_curve_and_fit, infidelity_crossing, linspace, robustness_table,
    run_sweep, scheme_comparison, ErrorKind, Gate, SweepSpec, SCHEMES,
};
use geogate::qubit::{
    c, gate_equivalence, hadamard_matrix, u1_matrix, DensityMatrix, Operator, StokesVector,
};
use geogate::schemes::{
    compose_from_angles, dqc_sequence, dqc_u1_rotations, dynamical_phase, geometric_phase,
    ngqc_sequence, nngqc_angles, nngqc_sequence, AuxiliaryPath, NgqcParams, NngqcParams,
};
use geogate::tomography::{
    chi_ideal, density_from_stokes_measured, process_fidelity, qpt, qst_exact, qst_shot,
    qst_shot_std, MeasureMode, ProcessMatrix, ShotConfig, SpamModel,
};
use geogate::twoion::{compare_full_effective, zeno_trapping, IonLevel, TwoIonParams};
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const OMEGA0_LAB: f64 = 2.0 * PI * 67.9e3;

fn report(criterion: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} {tag}: {detail}");
    assert!(pass, "criterion {criterion} FAIL: {detail}");
}

#[test]
fn criterion_01_gate_synthesis() {
    let mut ok = true;
    let mut worst = 1.0f64;
    // explicit targets for both gates on every applicable scheme
    let targets = [(Gate::U1, u1_matrix()), (Gate::Hadamard, hadamard_matrix())];
    for (gate, target) in &targets {
        for scheme in SCHEMES {
            let seq = build_sequence(scheme, *gate, 1.0).unwrap();
            let u = geogate::dynamics::propagate_unitary(&seq, &NoiseParams::none()).unwrap();
            let eq = gate_equivalence(&u, target).unwrap();
            worst = worst.min(eq);
            ok &= eq >= 1.0 - 1e-8;
        }
    }
    // angle formulas against the brute-force oracle over 1000 random sets
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst_angles = 1.0f64;
    for _ in 0..1000 {
        let omega0: f64 = rng.random_range(0.5..2.0);
        let phi0: f64 = rng.random_range(-PI..PI);
        let phi1: f64 = rng.random_range(-PI..PI);
        let xi0: f64 = rng.random_range(0.05..3.0);
        let extra: f64 = rng.random_range(0.05..3.0);
        let p = NngqcParams::new(omega0, phi0, phi1, xi0, (xi0 + extra) / omega0).unwrap();
        let seq = nngqc_sequence(&p).unwrap();
        let zxz = compose_from_angles(&nngqc_angles(&p));
        let oracle = brute_force_propagator(&seq, 0.0, 0.0, 1000);
        let eq = gate_equivalence(&zxz, &oracle).unwrap();
        worst_angles = worst_angles.min(eq);
    }
    ok &= worst_angles >= 1.0 - 1e-8;
    report(
        1,
        ok,
        &format!(
            "worst scheme/gate equivalence {worst:.3e} from 1; worst random-angle equivalence {:.3e} from 1",
            1.0 - worst_angles
        ),
    );
}

#[test]
fn criterion_02_durations() {
    let tol = 1e-12;
    let omega0 = OMEGA0_LAB;
    let cases = [
        (
            "nngqc u1",
            nngqc_sequence(&NngqcParams::u1(omega0))
                .unwrap()
                .total_duration(),
            PI / omega0,
        ),
        (
            "ngqc u1",
            ngqc_sequence(&NgqcParams::u1(omega0))
                .unwrap()
                .total_duration(),
            2.0 * PI / omega0,
        ),
        (
            "dqc u1",
            dqc_sequence(&dqc_u1_rotations(), omega0)
                .unwrap()
                .total_duration(),
            2.5 * PI / omega0,
        ),
        (
            "nngqc hadamard",
            nngqc_sequence(&NngqcParams::hadamard(omega0))
                .unwrap()
                .total_duration(),
            1.5 * PI / omega0,
        ),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (name, got, expect) in &cases {
        let rel = (got - expect).abs() / expect;
        ok &= rel <= tol;
        detail.push_str(&format!("{name} rel err {rel:.1e}; "));
    }
    // ordering pi/Omega0 < 2pi/Omega_m < 5pi/(2 Omega0)
    ok &= cases[0].1 < cases[1].1 && cases[1].1 < cases[2].1;
    report(2, ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_03_phases() {
    let mut ok = true;
    let mut detail = String::new();
    // worked gates: gamma = pi/4
    for (name, p) in [
        ("u1", NngqcParams::u1(1.0)),
        ("hadamard", NngqcParams::hadamard(1.0)),
    ] {
        let path = AuxiliaryPath::from_nngqc(&p, 2000).unwrap();
        let g = geometric_phase(&path).unwrap();
        ok &= (g - PI / 4.0).abs() <= 1e-6;
        detail.push_str(&format!("{name} gamma dev {:.1e}; ", (g - PI / 4.0).abs()));
    }
    // gamma = phi1/2 and zero dynamical phase over random sequences
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_gamma = 0.0f64;
    let mut worst_dyn = 0.0f64;
    for _ in 0..50 {
        let omega0: f64 = rng.random_range(0.5..2.0);
        let phi0: f64 = rng.random_range(-PI..PI);
        let phi1: f64 = rng.random_range(-PI..PI);
        let xi0: f64 = rng.random_range(0.05..3.0);
        let extra: f64 = rng.random_range(0.05..3.0);
        let p = NngqcParams::new(omega0, phi0, phi1, xi0, (xi0 + extra) / omega0).unwrap();
        let path = AuxiliaryPath::from_nngqc(&p, 2000).unwrap();
        let g = geometric_phase(&path).unwrap();
        worst_gamma = worst_gamma.max((g - p.phi1 / 2.0).abs());
        let seq = nngqc_sequence(&p).unwrap();
        let d = dynamical_phase(&seq, &path).unwrap();
        worst_dyn = worst_dyn.max(d.abs());
    }
    ok &= worst_gamma <= 1e-6 && worst_dyn <= 1e-9;
    detail.push_str(&format!(
        "random sets: max |gamma - phi1/2| = {worst_gamma:.1e}, max |dyn| = {worst_dyn:.1e}"
    ));
    report(3, ok, &detail);
}

#[test]
fn criterion_04_dephasing_fit() {
    let grid = linspace(0.0, 0.05, 51);
    let (_, fit) = dephasing_curve_and_fit(&grid, 2.0 * PI * 0.1e6).unwrap();
    let a_ok = (fit.a + 0.4813).abs() <= 0.02 * 0.4813;
    let b_ok = (fit.b - 2.447).abs() <= 0.02 * 2.447;
    let crossing = infidelity_crossing(&fit, 1e-2).unwrap();
    let c_ok = (crossing - 8.6e-3).abs() <= 0.05 * 8.6e-3;
    report(
        4,
        a_ok && b_ok && c_ok,
        &format!(
            "a = {:.4} (target -0.4813 +-2%), b = {:.4} (target 2.447 +-2%), 1e-2 crossing = {:.4e} (target 8.6e-3 +-5%)",
            fit.a, fit.b, crossing
        ),
    );
}

#[test]
fn criterion_05_robustness_table() {
    let table = robustness_table(OMEGA0_LAB, 21, 4.0).unwrap();
    let targets: [[f64; 3]; 4] = [
        [0.65, 0.77, 1.15],
        [1.36, 1.55, 2.04],
        [0.67, 1.28, 1.02],
        [2.38, 4.43, 3.50],
    ];
    let row_names = [
        "rabi sigma 0.1",
        "rabi sigma 0.2",
        "detuning sigma 5 kHz",
        "detuning sigma 10 kHz",
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (r, row) in table.values.iter().enumerate() {
        for k in 0..3 {
            let diff = row[k] - targets[r][k];
            let cell_ok = diff.abs() <= 0.3;
            ok &= cell_ok;
            detail.push_str(&format!(
                "[{} {}] {:.3}% vs {:.2}% ({}{:.3}pp){} ",
                row_names[r],
                SCHEMES[k].name(),
                row[k],
                targets[r][k],
                if diff >= 0.0 { "+" } else { "" },
                diff,
                if cell_ok { "" } else { " <-OUT" },
            ));
        }
        // orderings: NNGQC best everywhere; DQC worst on Rabi rows,
        // NGQC worst on detuning rows
        let best_ok = row[0] < row[1] && row[0] < row[2];
        let worst_ok = if r < 2 {
            row[2] > row[1]
        } else {
            row[1] > row[2]
        };
        ok &= best_ok && worst_ok;
        if !(best_ok && worst_ok) {
            detail.push_str(&format!("[{} ordering violated] ", row_names[r]));
        }
    }
    report(5, ok, detail.trim_end());
}

#[test]
fn criterion_06_comparison_fidelities() {
    let spam = SpamModel::new(0.9628).unwrap();
    // Gamma = 0.81 kHz as an ordinary rate against the angular Omega_0
    let res = scheme_comparison(&spam, 0.81e3, OMEGA0_LAB, &MeasureMode::Exact).unwrap();
    let raw_targets = [0.9681, 0.9653, 0.9639];
    let cal_targets = [0.9959, 0.9929, 0.9915];
    let mut ok = true;
    let mut detail = String::new();
    for k in 0..3 {
        let dr = res.raw[k] - raw_targets[k];
        let dc = res.calibrated[k] - cal_targets[k];
        ok &= dr.abs() <= 0.010 && dc.abs() <= 0.010;
        detail.push_str(&format!(
            "{}: raw {:.4} ({:+.4}), cal {:.4} ({:+.4}); ",
            SCHEMES[k].name(),
            res.raw[k],
            dr,
            res.calibrated[k],
            dc
        ));
    }
    let order_raw = res.raw[0] > res.raw[1] && res.raw[1] > res.raw[2];
    let order_cal = res.calibrated[0] > res.calibrated[1] && res.calibrated[1] > res.calibrated[2];
    ok &= order_raw && order_cal;
    detail.push_str(&format!("ordering raw {order_raw}, calibrated {order_cal}"));
    report(6, ok, &detail);
}

#[test]
fn criterion_07_sweep_dominance() {
    let mut ok = true;
    let mut sweeps = Vec::new();
    for kind in [ErrorKind::Rabi, ErrorKind::Detuning] {
        let grid = match kind {
            ErrorKind::Rabi => linspace(-0.2, 0.2, 21),
            ErrorKind::Detuning => linspace(-2.0 * PI * 20e3, 2.0 * PI * 20e3, 21),
            _ => unreachable!(),
        };
        let mut per_scheme = Vec::new();
        for scheme in SCHEMES {
            let spec = SweepSpec {
                scheme,
                gate: Gate::U1,
                error_kind: kind,
                grid: grid.clone(),
                input: DensityMatrix::pure_g(),
                omega0: OMEGA0_LAB,
                gamma: 0.0,
                spam: None,
                shots: None,
            };
            per_scheme.push(run_sweep(&spec).unwrap());
        }
        for ((a, b), c) in per_scheme[0].iter().zip(&per_scheme[1]).zip(&per_scheme[2]) {
            ok &= a.1 >= b.1 - 1e-12;
            ok &= a.1 >= c.1 - 1e-12;
        }
        sweeps.push(per_scheme);
    }
    // > 0.97 at |Delta|/2pi = 10 kHz
    let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0_LAB)).unwrap();
    let mut f_10k = f64::INFINITY;
    for sign in [-1.0, 1.0] {
        let noise = NoiseParams::new(0.0, 0.0, sign * 2.0 * PI * 10e3).unwrap();
        let f = output_state_fidelity(&seq, &DensityMatrix::pure_g(), &noise, None).unwrap();
        f_10k = f_10k.min(f);
    }
    ok &= f_10k > 0.97;
    report(
        7,
        ok,
        &format!("NNGQC >= others at all 42 grid points; F(10 kHz) = {f_10k:.4} > 0.97"),
    );
}

#[test]
fn criterion_08_shot_noise_law() {
    let rho = density_from_stokes_measured(&StokesVector::new(1.0, 0.4, -0.3, 0.5)).unwrap();
    let n = 20_000;
    let cfg = ShotConfig::new(n, 1234).unwrap();
    let reps = 100;
    let mut samples = vec![[0.0f64; 3]; reps];
    for (r, slot) in samples.iter_mut().enumerate() {
        let s = qst_shot(&rho, &cfg, r as u64).unwrap();
        *slot = [s.s1, s.s2, s.s3];
    }
    let predicted = qst_shot_std(&rho, n).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for k in 0..3 {
        let mean: f64 = samples.iter().map(|s| s[k]).sum::<f64>() / reps as f64;
        let var: f64 =
            samples.iter().map(|s| (s[k] - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let ratio = var.sqrt() / predicted[k];
        ok &= (ratio - 1.0).abs() <= 0.10;
        detail.push_str(&format!("S{} std ratio {ratio:.3}; ", k + 1));
    }
    report(8, ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_09_tomography_identities() {
    let mut ok = true;
    let mut detail = String::new();

    // chi(identity) = e00
    let chi = qpt(
        |rho: &DensityMatrix| Operator::identity(2).conjugate_density(rho),
        &MeasureMode::Exact,
    )
    .unwrap();
    let mut dev = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let expect = if i == 0 && j == 0 { 1.0 } else { 0.0 };
            dev = dev.max((chi.matrix()[(i, j)] - c(expect, 0.0)).norm());
        }
    }
    ok &= dev <= 1e-12;
    detail.push_str(&format!("chi(I) dev {dev:.1e}; "));

    // Tr[chi chi] = 1 for unitary channels
    for (name, u) in [("u1", u1_matrix()), ("hadamard", hadamard_matrix())] {
        let chi = chi_ideal(&u).unwrap();
        let purity = process_fidelity(&chi, &chi).unwrap();
        ok &= (purity - 1.0).abs() <= 1e-10;
        detail.push_str(&format!(
            "Tr[chi chi]({name}) dev {:.1e}; ",
            (purity - 1.0).abs()
        ));
    }

    // linearity under channel mixtures
    let u = u1_matrix();
    let h = hadamard_matrix();
    let alpha = 0.37;
    let mixed = |rho: &DensityMatrix| -> geogate::Result<DensityMatrix> {
        let a = u.conjugate_density(rho)?;
        let b = h.conjugate_density(rho)?;
        DensityMatrix::from_matrix_relaxed(
            a.matrix().map(|z| z * c(alpha, 0.0)) + b.matrix().map(|z| z * c(1.0 - alpha, 0.0)),
        )
    };
    let chi_mixed = qpt(mixed, &MeasureMode::Exact).unwrap();
    let combo = chi_ideal(&u).unwrap().matrix().map(|z| z * c(alpha, 0.0))
        + chi_ideal(&h)
            .unwrap()
            .matrix()
            .map(|z| z * c(1.0 - alpha, 0.0));
    let lin_dev = chi_mixed.max_abs_diff(&ProcessMatrix::from_matrix(combo).unwrap());
    ok &= lin_dev <= 1e-10;
    detail.push_str(&format!("mixture linearity dev {lin_dev:.1e}; "));

    // Stokes round trip to 1e-14
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut rt_dev = 0.0f64;
    for _ in 0..200 {
        let theta: f64 = rng.random_range(0.0..PI);
        let phi: f64 = rng.random_range(-PI..PI);
        let r: f64 = rng.random_range(0.0..1.0);
        let s = StokesVector::new(
            1.0,
            r * theta.sin() * phi.cos(),
            r * theta.sin() * phi.sin(),
            r * theta.cos(),
        );
        let rho = density_from_stokes_measured(&s).unwrap();
        let back = qst_exact(&rho).unwrap();
        rt_dev = rt_dev
            .max((back.s1 - s.s1).abs())
            .max((back.s2 - s.s2).abs())
            .max((back.s3 - s.s3).abs());
    }
    ok &= rt_dev <= 1e-14;
    detail.push_str(&format!("roundtrip dev {rt_dev:.1e}"));
    report(9, ok, &detail);
}

#[test]
fn criterion_10_two_qubit_validation() {
    let mut ok = true;
    let p = TwoIonParams::default_hierarchy();
    let period = p.transfer_period();

    let trace = compare_full_effective(&p, period, period / 2000.0).unwrap();
    ok &= trace.max_deviation < 0.05;

    let zeno = zeno_trapping(&p, period, period / 2000.0).unwrap();
    ok &= zeno.min_survival > 0.95;

    // |gg0> stationary to 1e-10
    let mut psi0 = DVector::zeros(p.dim());
    psi0[p.index(IonLevel::G, IonLevel::G, 0)] = c(1.0, 0.0);
    let states = geogate::twoion::evolve_full(&p, &psi0, &[period]).unwrap();
    let gg0_dev = (states[0][p.index(IonLevel::G, IonLevel::G, 0)].norm() - 1.0).abs();
    ok &= gg0_dev <= 1e-10;

    // deviation decreases when Delta/Omega doubles
    let p2 = TwoIonParams::new(1.0, 50.0, 20.0, 0.0, 0.0, 3).unwrap();
    let trace2 =
        compare_full_effective(&p2, p2.transfer_period(), p2.transfer_period() / 2000.0).unwrap();
    ok &= trace2.max_deviation < trace.max_deviation;

    report(
        10,
        ok,
        &format!(
            "max deviation {:.4} (< 0.05), min survival {:.4} (> 0.95), gg0 dev {:.1e}, deviation at 2x detuning {:.4}",
            trace.max_deviation, zeno.min_survival, gg0_dev, trace2.max_deviation
        ),
    );
}
