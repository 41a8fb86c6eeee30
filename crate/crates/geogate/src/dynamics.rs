//! Evolution of qubit states through pulse sequences under systematic errors
//! and dephasing.
//!
//! Systematic errors enter the segment Hamiltonian as a fractional Rabi
//! amplitude error (Omega -> (1 + delta) Omega) and a static qubit detuning
//! Delta; dephasing is the sigma_z Lindblad term
//! d rho/dt = -i[H, rho] + (Gamma/2)(sigma_z rho sigma_z - rho).
//!
//! Closed (Gamma = 0) evolution uses exact per-segment rotations; open
//! evolution uses fixed-step classical RK4 with steps that never straddle a
//! segment boundary, so the piecewise-constant phase jumps are respected
//! exactly.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qubit::{c, state_fidelity, DensityMatrix, Operator, C64};
use crate::schemes::{PulseSegment, PulseSequence};

/// Noise model for a run: dephasing rate plus systematic drive errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Dephasing rate Gamma, rad/s, >= 0.
    pub gamma: f64,
    /// Fractional Rabi amplitude error delta: Omega -> (1 + delta) Omega.
    pub delta_rabi: f64,
    /// Qubit resonance offset Delta, rad/s. Positive means the qubit sits
    /// above the drive; enters the Hamiltonian as (Delta/2)(|e><e| - |g><g|).
    pub detuning: f64,
}

impl NoiseParams {
    pub fn new(gamma: f64, delta_rabi: f64, detuning: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma must be finite and >= 0, got {gamma}"
            )));
        }
        if !delta_rabi.is_finite() || !detuning.is_finite() {
            return Err(Error::InvalidArgument(
                "noise parameters must be finite".into(),
            ));
        }
        Ok(Self {
            gamma,
            delta_rabi,
            detuning,
        })
    }

    pub fn none() -> Self {
        Self {
            gamma: 0.0,
            delta_rabi: 0.0,
            detuning: 0.0,
        }
    }

    pub fn dephasing(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PiecewiseExactUnitary,
    Rk4Lindblad,
}

/// Integration configuration for open-system runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Maximum step, seconds. Must not exceed (shortest segment)/100.
    pub dt: f64,
    pub method: Method,
}

impl SimConfig {
    pub fn new(dt: f64, method: Method) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        Ok(Self { dt, method })
    }

    /// Default step: shortest segment / 1000, RK4.
    pub fn for_sequence(seq: &PulseSequence) -> Result<Self> {
        let shortest = seq.shortest_segment();
        if !shortest.is_finite() {
            return Err(Error::InvalidArgument("sequence has no segments".into()));
        }
        Self::new(shortest / 1e3, Method::Rk4Lindblad)
    }

    fn validate_against(&self, seq: &PulseSequence) -> Result<()> {
        let shortest = seq.shortest_segment();
        if self.dt > shortest / 100.0 {
            return Err(Error::InvalidArgument(format!(
                "dt = {} exceeds shortest segment / 100 = {}",
                self.dt,
                shortest / 100.0
            )));
        }
        Ok(())
    }
}

/// Drive-plus-detuning Hamiltonian of one segment:
/// H = ((1 + delta) Omega / 2)(cos(phi) sigma_x - sin(phi) sigma_y)
///   + ((Delta + offset)/2)(|e><e| - |g><g|).
pub fn segment_hamiltonian(seg: &PulseSegment, noise: &NoiseParams) -> Operator {
    let omega = (1.0 + noise.delta_rabi) * seg.rabi;
    let hx = 0.5 * omega * seg.phase.cos();
    let hy = -0.5 * omega * seg.phase.sin();
    let delta = noise.detuning + seg.detuning_offset;
    Operator::from_rows(
        2,
        &[
            c(-0.5 * delta, 0.0),
            c(hx, -hy),
            c(hx, hy),
            c(0.5 * delta, 0.0),
        ],
    )
    .expect("2x2")
}

/// Exact 2x2 rotation exp(-i H dt) for one segment under the given noise.
fn segment_unitary(seg: &PulseSegment, noise: &NoiseParams, dt: f64) -> Operator {
    let omega = (1.0 + noise.delta_rabi) * seg.rabi;
    let hx = 0.5 * omega * seg.phase.cos();
    let hy = -0.5 * omega * seg.phase.sin();
    let hz = -0.5 * (noise.detuning + seg.detuning_offset);
    let norm = (hx * hx + hy * hy + hz * hz).sqrt();
    if norm == 0.0 || dt == 0.0 {
        return Operator::identity(2);
    }
    let a = norm * dt;
    let (ca, sa) = (a.cos(), a.sin());
    let (nx, ny, nz) = (hx / norm, hy / norm, hz / norm);
    Operator::from_rows(
        2,
        &[
            c(ca, -sa * nz),
            c(-sa * ny, -sa * nx),
            c(sa * ny, -sa * nx),
            c(ca, sa * nz),
        ],
    )
    .expect("2x2")
}

/// Time-ordered product of exact segment rotations (closed system).
///
/// Rejects noise with Gamma != 0; open-system runs go through
/// [`evolve_lindblad`].
pub fn propagate_unitary(seq: &PulseSequence, noise: &NoiseParams) -> Result<Operator> {
    if noise.gamma != 0.0 {
        return Err(Error::InvalidArgument(
            "propagate_unitary requires Gamma = 0; use evolve_lindblad".into(),
        ));
    }
    let mut u = Operator::identity(2);
    for seg in &seq.segments {
        u = segment_unitary(seg, noise, seg.duration).mul(&u)?;
    }
    Ok(u)
}

fn lindblad_rhs(h: &DMatrix<C64>, gamma: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let i = c(0.0, 1.0);
    let comm = h * rho - rho * h;
    let mut out = comm.map(|z| -i * z);
    if gamma > 0.0 {
        // sigma_z rho sigma_z - rho: flips the sign of the off-diagonals.
        out[(0, 1)] += c(-gamma, 0.0) * rho[(0, 1)];
        out[(1, 0)] += c(-gamma, 0.0) * rho[(1, 0)];
    }
    out
}

fn rk4_step(h: &DMatrix<C64>, gamma: f64, rho: &DMatrix<C64>, dt: f64) -> DMatrix<C64> {
    let k1 = lindblad_rhs(h, gamma, rho);
    let k2 = lindblad_rhs(h, gamma, &(rho + k1.map(|z| z * c(dt / 2.0, 0.0))));
    let k3 = lindblad_rhs(h, gamma, &(rho + k2.map(|z| z * c(dt / 2.0, 0.0))));
    let k4 = lindblad_rhs(h, gamma, &(rho + k3.map(|z| z * c(dt, 0.0))));
    rho + (k1 + k2.map(|z| z * c(2.0, 0.0)) + k3.map(|z| z * c(2.0, 0.0)) + k4)
        .map(|z| z * c(dt / 6.0, 0.0))
}

fn check_physical(m: &DMatrix<C64>, context: &str) -> Result<DensityMatrix> {
    let tr = m[(0, 0)] + m[(1, 1)];
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "{context}: trace drifted to {tr} (|1 - tr| > 1e-8)"
        )));
    }
    let herm_defect = (m[(0, 1)] - m[(1, 0)].conj()).norm();
    if herm_defect > 1e-8 {
        return Err(Error::Numerical(format!(
            "{context}: hermiticity defect {herm_defect:.3e}"
        )));
    }
    let rho = DensityMatrix::from_matrix_relaxed(m.clone())
        .map_err(|e| Error::Numerical(format!("{context}: {e}")))?;
    let min = rho.min_eigenvalue();
    if min < -1e-8 {
        return Err(Error::Numerical(format!(
            "{context}: negative eigenvalue {min:.3e}"
        )));
    }
    Ok(rho)
}

/// Evolution of a density matrix across the sequence.
///
/// `Method::Rk4Lindblad` integrates the master equation with fixed RK4
/// steps aligned to segment boundaries; `Method::PiecewiseExactUnitary` is
/// the closed-system shortcut (exact segment rotations, Gamma must be 0).
pub fn evolve_lindblad(
    rho0: &DensityMatrix,
    seq: &PulseSequence,
    noise: &NoiseParams,
    cfg: &SimConfig,
) -> Result<DensityMatrix> {
    match cfg.method {
        Method::PiecewiseExactUnitary => propagate_unitary(seq, noise)?.conjugate_density(rho0),
        Method::Rk4Lindblad => Ok(evolve_lindblad_trajectory(rho0, seq, noise, cfg, 0)?.0),
    }
}

/// As [`evolve_lindblad`], optionally sampling `n_samples` intermediate
/// states (per whole sequence, boundary-inclusive) for trajectory export.
pub fn evolve_lindblad_trajectory(
    rho0: &DensityMatrix,
    seq: &PulseSequence,
    noise: &NoiseParams,
    cfg: &SimConfig,
    n_samples: usize,
) -> Result<(DensityMatrix, Vec<(f64, DensityMatrix)>)> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch(rho0.dim(), 2));
    }
    cfg.validate_against(seq)?;

    let total = seq.total_duration();
    let mut sample_times: Vec<f64> = (0..n_samples)
        .map(|k| total * k as f64 / (n_samples.max(2) - 1) as f64)
        .collect();
    sample_times.reverse(); // pop() yields ascending times

    let mut rho = rho0.matrix().clone();
    let mut samples = Vec::with_capacity(n_samples);
    let mut elapsed = 0.0;

    let mut take_samples = |t: f64, m: &DMatrix<C64>, times: &mut Vec<f64>| -> Result<()> {
        while let Some(&next) = times.last() {
            if next <= t + 1e-15 * total.max(1.0) {
                times.pop();
                samples.push((next, check_physical(m, "trajectory sample")?));
            } else {
                break;
            }
        }
        Ok(())
    };

    take_samples(0.0, &rho, &mut sample_times)?;
    for seg in &seq.segments {
        let h = segment_hamiltonian(seg, noise).matrix().clone();
        let n_steps = (seg.duration / cfg.dt).ceil().max(1.0) as usize;
        let dt = seg.duration / n_steps as f64;
        for k in 0..n_steps {
            rho = rk4_step(&h, noise.gamma, &rho, dt);
            take_samples(elapsed + dt * (k + 1) as f64, &rho, &mut sample_times)?;
        }
        elapsed += seg.duration;
    }
    let final_state = check_physical(&rho, "final state")?;
    Ok((final_state, samples))
}

/// Fidelity of the noisy output state against the nominal target applied to
/// the same input: Tr[rho_noisy (U rho_in U^dag)].
///
/// Gamma = 0 runs use the exact unitary path; otherwise the Lindblad
/// integrator runs with `cfg` (default configuration when `None`).
pub fn output_state_fidelity(
    seq: &PulseSequence,
    input: &DensityMatrix,
    noise: &NoiseParams,
    cfg: Option<&SimConfig>,
) -> Result<f64> {
    let ideal = seq.target.conjugate_density(input)?;
    let evolved = if noise.gamma == 0.0 {
        propagate_unitary(seq, noise)?.conjugate_density(input)?
    } else {
        let default_cfg;
        let cfg = match cfg {
            Some(c) => c,
            None => {
                default_cfg = SimConfig::for_sequence(seq)?;
                &default_cfg
            }
        };
        evolve_lindblad(input, seq, noise, cfg)?
    };
    state_fidelity(&evolved, &ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{gate_equivalence, u1_matrix};
    use crate::schemes::{nngqc_sequence, NngqcParams, SchemeTag};
    use std::f64::consts::PI;

    const OMEGA0: f64 = 1.0;

    #[test]
    fn hamiltonian_examples() {
        let seg = PulseSegment::new(1.0, OMEGA0, 0.0).unwrap();
        let h = segment_hamiltonian(&seg, &NoiseParams::none());
        // (Omega/2) sigma_x coupling
        assert!((h.matrix()[(0, 1)].re - 0.5).abs() <= 1e-15);
        assert!(h.matrix()[(0, 0)].norm() <= 1e-15);
        assert!(h.hermiticity_defect() <= 1e-15);

        // delta = -1 kills the drive
        let noise = NoiseParams::new(0.0, -1.0, 0.3).unwrap();
        let h = segment_hamiltonian(&seg, &noise);
        assert!(h.matrix()[(0, 1)].norm() <= 1e-15);
        assert!((h.matrix()[(1, 1)].re - 0.15).abs() <= 1e-15);
    }

    #[test]
    fn hamiltonian_eigenvalues_analytic() {
        // 2x2 analytic diagonalization: +- sqrt((1+delta)^2 Omega^2 + Delta^2)/2
        let seg = PulseSegment::new(1.0, 0.9, 1.2).unwrap();
        let noise = NoiseParams::new(0.0, 0.07, 0.4).unwrap();
        let h = segment_hamiltonian(&seg, &noise);
        let m = h.matrix();
        let herm = (m + m.adjoint()).map(|z| z * c(0.5, 0.0));
        let mut eigs: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = 0.5 * ((1.07f64 * 0.9).powi(2) + 0.4f64.powi(2)).sqrt();
        assert!((eigs[0] + expect).abs() <= 1e-12);
        assert!((eigs[1] - expect).abs() <= 1e-12);
    }

    #[test]
    fn unitary_propagation_u1() {
        let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
        let u = propagate_unitary(&seq, &NoiseParams::none()).unwrap();
        assert!((gate_equivalence(&u, &u1_matrix()).unwrap() - 1.0).abs() <= 1e-12);

        let noisy = NoiseParams::dephasing(0.1).unwrap();
        assert!(propagate_unitary(&seq, &noisy).is_err());
    }

    #[test]
    fn empty_sequence_is_identity() {
        let seq = PulseSequence {
            segments: vec![],
            scheme: SchemeTag::Dqc,
            target: Operator::identity(2),
        };
        let u = propagate_unitary(&seq, &NoiseParams::none()).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(2)) == 0.0);
    }

    #[test]
    fn lindblad_gamma_zero_matches_unitary() {
        let seq = nngqc_sequence(&NngqcParams::hadamard(OMEGA0)).unwrap();
        let noise = NoiseParams::new(0.0, 0.05, 0.2).unwrap();
        let cfg = SimConfig::for_sequence(&seq).unwrap();
        let rho0 = DensityMatrix::pure_minus();
        let open = evolve_lindblad(&rho0, &seq, &noise, &cfg).unwrap();
        let closed = propagate_unitary(&seq, &noise)
            .unwrap()
            .conjugate_density(&rho0)
            .unwrap();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((open.matrix()[(i, j)] - closed.matrix()[(i, j)]).norm());
            }
        }
        assert!(worst <= 1e-9, "open/closed mismatch {worst:.3e}");
    }

    #[test]
    fn maximally_mixed_is_fixed_point() {
        let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
        let noise = NoiseParams::dephasing(0.05 * OMEGA0).unwrap();
        let cfg = SimConfig::for_sequence(&seq).unwrap();
        let rho0 = DensityMatrix::maximally_mixed(2);
        let out = evolve_lindblad(&rho0, &seq, &noise, &cfg).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((out.matrix()[(i, j)] - c(expect, 0.0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn free_dephasing_decays_coherence_analytically() {
        // Omega = 0 free evolution: rho_ge(t) = rho_ge(0) exp(-Gamma t)
        let gamma = 0.37;
        let t = 2.5;
        let seq = PulseSequence {
            segments: vec![PulseSegment::new(t, 0.0, 0.0).unwrap()],
            scheme: SchemeTag::Dqc,
            target: Operator::identity(2),
        };
        let noise = NoiseParams::dephasing(gamma).unwrap();
        let cfg = SimConfig::new(t / 1e3, Method::Rk4Lindblad).unwrap();
        let rho0 = DensityMatrix::pure_plus();
        let (out, traj) = evolve_lindblad_trajectory(&rho0, &seq, &noise, &cfg, 11).unwrap();
        let expect = 0.5 * (-gamma * t).exp();
        assert!((out.matrix()[(0, 1)].re - expect).abs() <= 1e-9);

        // |rho_ge| monotone non-increasing along the trajectory
        let mut last = f64::INFINITY;
        for (_, rho) in &traj {
            let mag = rho.matrix()[(0, 1)].norm();
            assert!(mag <= last + 1e-12);
            last = mag;
        }
    }

    #[test]
    fn trace_and_hermiticity_preserved() {
        let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
        let noise = NoiseParams::new(0.08, 0.1, 0.3).unwrap();
        let cfg = SimConfig::for_sequence(&seq).unwrap();
        let (_, traj) =
            evolve_lindblad_trajectory(&DensityMatrix::pure_g(), &seq, &noise, &cfg, 101).unwrap();
        assert_eq!(traj.len(), 101);
        for (_, rho) in &traj {
            assert!((rho.trace().re - 1.0).abs() <= 1e-8);
            assert!(rho.hermiticity_defect() <= 1e-10);
            assert!(rho.min_eigenvalue() >= -1e-8);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let seq = nngqc_sequence(&NngqcParams::hadamard(OMEGA0)).unwrap();
        let noise = NoiseParams::new(0.2, 0.0, 0.5).unwrap();
        let rho0 = DensityMatrix::pure_g();

        let reference = {
            let cfg = SimConfig::new(seq.shortest_segment() / 4096.0, Method::Rk4Lindblad).unwrap();
            evolve_lindblad(&rho0, &seq, &noise, &cfg).unwrap()
        };
        let err_at = |steps: f64| -> f64 {
            let cfg = SimConfig::new(seq.shortest_segment() / steps, Method::Rk4Lindblad).unwrap();
            let out = evolve_lindblad(&rho0, &seq, &noise, &cfg).unwrap();
            let mut worst = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    worst = worst.max((out.matrix()[(i, j)] - reference.matrix()[(i, j)]).norm());
                }
            }
            worst
        };
        let e1 = err_at(128.0);
        let e2 = err_at(256.0);
        assert!(
            e1 / e2 >= 8.0,
            "halving dt reduced error only {:.1}x (e1 = {e1:.3e}, e2 = {e2:.3e})",
            e1 / e2
        );
    }

    #[test]
    fn exact_unitary_method_dispatch() {
        let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
        let noise = NoiseParams::new(0.0, 0.04, 0.1).unwrap();
        let cfg = SimConfig::new(
            seq.shortest_segment() / 200.0,
            Method::PiecewiseExactUnitary,
        )
        .unwrap();
        let rho0 = DensityMatrix::pure_g();
        let fast = evolve_lindblad(&rho0, &seq, &noise, &cfg).unwrap();
        let closed = propagate_unitary(&seq, &noise)
            .unwrap()
            .conjugate_density(&rho0)
            .unwrap();
        assert!((fast.matrix() - closed.matrix()).map(|z| z.norm()).max() <= 1e-14);

        // the shortcut refuses open-system runs
        let open = NoiseParams::dephasing(0.1).unwrap();
        assert!(evolve_lindblad(&rho0, &seq, &open, &cfg).is_err());
    }

    #[test]
    fn step_size_validation() {
        let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
        let cfg = SimConfig::new(seq.shortest_segment() / 10.0, Method::Rk4Lindblad).unwrap();
        let err = evolve_lindblad(&DensityMatrix::pure_g(), &seq, &NoiseParams::none(), &cfg);
        assert!(err.is_err());
    }

    #[test]
    fn noiseless_output_fidelity_is_one() {
        for seq in [
            nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap(),
            nngqc_sequence(&NngqcParams::hadamard(OMEGA0)).unwrap(),
        ] {
            let f =
                output_state_fidelity(&seq, &DensityMatrix::pure_g(), &NoiseParams::none(), None)
                    .unwrap();
            assert!((f - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn detuning_ten_khz_keeps_u1_above_097() {
        // Delta/2pi = 10 kHz against Omega_0/2pi = 67.9 kHz
        let omega0 = 2.0 * PI * 67.9e3;
        let seq = nngqc_sequence(&NngqcParams::u1(omega0)).unwrap();
        let noise = NoiseParams::new(0.0, 0.0, 2.0 * PI * 10.0e3).unwrap();
        let f = output_state_fidelity(&seq, &DensityMatrix::pure_g(), &noise, None).unwrap();
        assert!(f > 0.97, "F = {f}");
    }

    #[test]
    fn dephasing_ratio_86e3_gives_percent_infidelity() {
        // Gamma/Omega_0 = 8.6e-3 puts the U1 infidelity at the 1e-2 level
        let seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
        let noise = NoiseParams::dephasing(8.6e-3 * OMEGA0).unwrap();
        let f = output_state_fidelity(&seq, &DensityMatrix::pure_g(), &noise, None).unwrap();
        let eps = 1.0 - f;
        assert!(
            (eps - 1e-2).abs() <= 5e-4,
            "infidelity {eps} not within 5% of 1e-2"
        );
    }

    #[test]
    fn global_phase_of_target_irrelevant_at_gamma_zero() {
        let mut seq = nngqc_sequence(&NngqcParams::u1(OMEGA0)).unwrap();
        let noise = NoiseParams::new(0.0, 0.13, -0.21).unwrap();
        let f1 = output_state_fidelity(&seq, &DensityMatrix::pure_minus(), &noise, None).unwrap();
        seq.target = seq.target.scale(c(0.6f64.cos(), 0.6f64.sin()));
        let f2 = output_state_fidelity(&seq, &DensityMatrix::pure_minus(), &noise, None).unwrap();
        assert!((f1 - f2).abs() <= 1e-12);
    }
}
