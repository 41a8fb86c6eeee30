//! Pulse synthesis and propagation checked against the brute-force
//! time-ordered-product oracle.

mod common;

use common::brute_force_propagator;
use geogate::dynamics::{propagate_unitary, NoiseParams};
use geogate::qubit::{gate_equivalence, hadamard_matrix, u1_matrix};
use geogate::schemes::{
    compose_from_angles, dqc_sequence, dqc_u1_rotations, ngqc_sequence, nngqc_angles,
    nngqc_sequence, NgqcParams, NngqcParams,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const OMEGA0: f64 = 1.0;

#[test]
fn u1_pulse_against_fine_step_oracle() {
    // dt = tau / 1e5
    let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
    let oracle = brute_force_propagator(&seq, 0.0, 0.0, 50_000);
    assert!(oracle.max_abs_diff(&u1_matrix()) <= 1e-9);
    let eq = gate_equivalence(&oracle, &u1_matrix()).unwrap();
    assert!(eq >= 1.0 - 1e-10, "oracle equivalence {eq}");
}

#[test]
fn hadamard_pulse_against_fine_step_oracle() {
    let seq = nngqc_sequence(&NngqcParams::hadamard(OMEGA0)).unwrap();
    let oracle = brute_force_propagator(&seq, 0.0, 0.0, 50_000);
    let eq = gate_equivalence(&oracle, &hadamard_matrix()).unwrap();
    assert!(eq >= 1.0 - 1e-10, "oracle equivalence {eq}");
}

#[test]
fn closed_form_propagator_matches_oracle_with_step_halving() {
    // Richardson check: the sequence Hamiltonian is piecewise constant, so
    // halving the oracle step must leave the result unchanged to rounding,
    // and both must sit on the closed-form propagator.
    let seq = dqc_sequence(&dqc_u1_rotations(), OMEGA0).unwrap();
    let noise = NoiseParams::new(0.0, 0.08, -0.3).unwrap();
    let closed = propagate_unitary(&seq, &noise).unwrap();
    let coarse = brute_force_propagator(&seq, 0.08, -0.3, 512);
    let fine = brute_force_propagator(&seq, 0.08, -0.3, 1024);
    assert!(coarse.max_abs_diff(&fine) <= 1e-12);
    assert!(closed.max_abs_diff(&fine) <= 1e-12);
}

#[test]
fn nngqc_angles_match_oracle_over_random_parameters() {
    // 1000 random parameter sets: the Z-X-Z angle formulas reproduce the
    // brute-force propagator of the synthesized pulse.
    let mut rng = ChaCha8Rng::seed_from_u64(2027);
    for trial in 0..1000 {
        let omega0: f64 = rng.random_range(0.5..2.0);
        let phi0: f64 = rng.random_range(-PI..PI);
        let phi1: f64 = rng.random_range(-PI..PI);
        let xi0: f64 = rng.random_range(0.05..3.0);
        let extra: f64 = rng.random_range(0.05..3.0);
        let tau = (xi0 + extra) / omega0;
        let p = NngqcParams::new(omega0, phi0, phi1, xi0, tau).unwrap();

        let seq = nngqc_sequence(&p).unwrap();
        let angles = nngqc_angles(&p);
        let zxz = compose_from_angles(&angles);
        let oracle = brute_force_propagator(&seq, 0.0, 0.0, 1000);
        let eq = gate_equivalence(&zxz, &oracle).unwrap();
        assert!(
            eq >= 1.0 - 1e-8,
            "trial {trial}: equivalence {eq} for params {p:?}"
        );
        // the sequence's stored target is the same matrix
        assert!(seq.target.max_abs_diff(&zxz) <= 1e-12);
    }
}

#[test]
fn ngqc_sequences_match_oracle_over_grid() {
    for &theta in &[0.3, 1.0, 1.9, 2.8] {
        for &gamma in &[-1.2, 0.6, 1.5] {
            for &phi in &[0.4, 2.2, 5.0] {
                let p = NgqcParams::new(theta, gamma, phi, OMEGA0).unwrap();
                let seq = ngqc_sequence(&p).unwrap();
                let oracle = brute_force_propagator(&seq, 0.0, 0.0, 2000);
                let eq = gate_equivalence(&oracle, &seq.target).unwrap();
                assert!(eq >= 1.0 - 1e-9, "({theta},{gamma},{phi}): {eq}");
            }
        }
    }
}
