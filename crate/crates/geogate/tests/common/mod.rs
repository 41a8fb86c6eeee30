//! Shared test oracles, independent of the library's propagation paths.
//!
//! The brute-force propagator assembles each segment Hamiltonian from the
//! raw pulse fields and multiplies up many small time steps, each
//! exponentiated by a Taylor series run to machine convergence. It shares no
//! code with `dynamics::propagate_unitary` (closed-form axis-angle rotation)
//! or `schemes::segment_rotation`.

use geogate::qubit::{c, Operator, C64};
use geogate::schemes::PulseSequence;
use nalgebra::DMatrix;

/// exp(-i H dt) by scaled Taylor series.
pub fn expm_taylor(h: &DMatrix<C64>, dt: f64) -> DMatrix<C64> {
    let dim = h.nrows();
    let a = h.map(|z| z * c(0.0, -dt));
    let mut term = DMatrix::<C64>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..60 {
        term = (&term * &a).map(|z| z / c(k as f64, 0.0));
        sum += &term;
        let worst = term.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if worst < 1e-18 {
            break;
        }
    }
    sum
}

/// Time-ordered product of Taylor-exponentiated steps, `steps_per_segment`
/// slices per segment, with Rabi error `delta` and detuning `detuning`
/// entering exactly as the model states them.
pub fn brute_force_propagator(
    seq: &PulseSequence,
    delta: f64,
    detuning: f64,
    steps_per_segment: usize,
) -> Operator {
    let mut u = DMatrix::<C64>::identity(2, 2);
    for seg in &seq.segments {
        let omega = (1.0 + delta) * seg.rabi;
        let hx = 0.5 * omega * seg.phase.cos();
        let hy = -0.5 * omega * seg.phase.sin();
        let hz = -0.5 * (detuning + seg.detuning_offset);
        let h = DMatrix::from_row_slice(2, 2, &[c(hz, 0.0), c(hx, -hy), c(hx, hy), c(-hz, 0.0)]);
        let dt = seg.duration / steps_per_segment as f64;
        let step = expm_taylor(&h, dt);
        for _ in 0..steps_per_segment {
            u = &step * u;
        }
    }
    Operator::from_matrix(u).expect("2x2")
}
