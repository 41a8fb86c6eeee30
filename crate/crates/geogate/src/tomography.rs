//! Shot-limited single-qubit state tomography (Stokes protocol), process
//! tomography (chi matrix by linear inversion), and the imperfect-preparation
//! model with its calibration.
//!
//! Measured Stokes convention. The lab protocol measures populations after
//! pre-rotation pulses and forms differences S_k = P_e^k - P_g^k; under the
//! drive convention of [`crate::schemes`] this yields S_k = -Tr[sigma_k rho]
//! for k = 1..3, the sign-flipped counterpart of the textbook vectors in
//! [`crate::qubit::StokesVector`]. The functions here use the measured
//! convention end to end, and [`density_from_stokes_measured`] is its exact
//! inverse, so the reconstruction pipeline is internally consistent.
//!
//! Shot mode draws an independent binomial sample of N shots for every
//! projection measurement (each of the three settings and its swapped
//! companion), each from its own counter-derived random stream, so results
//! are reproducible for a fixed seed regardless of evaluation order.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::qubit::{c, pauli, DensityMatrix, Operator, StokesVector, C64};
use crate::schemes::dqc_rotation;

/// Shot budget and seed for sampled measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotConfig {
    pub n_shots: u64,
    pub seed: u64,
}

impl ShotConfig {
    pub fn new(n_shots: u64, seed: u64) -> Result<Self> {
        if n_shots == 0 {
            return Err(Error::InvalidArgument("n_shots must be >= 1".into()));
        }
        Ok(Self { n_shots, seed })
    }
}

/// Exact expectation values or binomial sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureMode {
    Exact,
    Shots(ShotConfig),
}

/// Imperfect state preparation: the intended pure input is replaced by
/// p rho_intended + (1 - p)|e><e| (incoherent residual population).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpamModel {
    pub prep_fidelity: f64,
}

impl SpamModel {
    pub fn new(prep_fidelity: f64) -> Result<Self> {
        if prep_fidelity.is_nan() || prep_fidelity <= 0.0 || prep_fidelity > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "preparation fidelity must be in (0, 1], got {prep_fidelity}"
            )));
        }
        Ok(Self { prep_fidelity })
    }

    pub fn ideal() -> Self {
        Self { prep_fidelity: 1.0 }
    }
}

/// p rho + (1 - p)|e><e|.
pub fn spam_apply(rho_intended: &DensityMatrix, spam: &SpamModel) -> Result<DensityMatrix> {
    if rho_intended.dim() != 2 {
        return Err(Error::DimensionMismatch(rho_intended.dim(), 2));
    }
    let p = spam.prep_fidelity;
    let mut m = rho_intended.matrix().map(|z| z * c(p, 0.0));
    m[(1, 1)] += c(1.0 - p, 0.0);
    DensityMatrix::from_matrix_relaxed(m)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_probability(p: f64, n: u64, rng: &mut ChaCha8Rng) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let bin = Binomial::new(n, p).expect("valid binomial");
    bin.sample(rng) as f64 / n as f64
}

/// Excited-state population after an optional pre-rotation.
fn population_e(rho: &DensityMatrix, pre: Option<&Operator>) -> f64 {
    match pre {
        Some(u) => {
            let m = u.matrix() * rho.matrix() * u.matrix().adjoint();
            m[(1, 1)].re
        }
        None => rho.matrix()[(1, 1)].re,
    }
}

/// Ground-state population after an optional pre-rotation (measured in the
/// lab by a swap pi pulse followed by the |e> projection).
fn population_g(rho: &DensityMatrix, pre: Option<&Operator>) -> f64 {
    match pre {
        Some(u) => {
            let m = u.matrix() * rho.matrix() * u.matrix().adjoint();
            m[(0, 0)].re
        }
        None => rho.matrix()[(0, 0)].re,
    }
}

/// Pre-rotation for the S1 setting: resonant pulse with theta = phi = pi/2.
pub fn qst_pre_rotation_x() -> Operator {
    dqc_rotation(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
}

/// Pre-rotation for the S2 setting: resonant pulse with theta = pi/2, phi = 0.
pub fn qst_pre_rotation_y() -> Operator {
    dqc_rotation(std::f64::consts::FRAC_PI_2, 0.0)
}

/// Exact state tomography in the measured convention:
/// S_k = P_e^k - P_g^k = -Tr[sigma_k rho].
pub fn qst_exact(rho: &DensityMatrix) -> Result<StokesVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    let ux = qst_pre_rotation_x();
    let uy = qst_pre_rotation_y();
    let s1 = population_e(rho, Some(&ux)) - population_g(rho, Some(&ux));
    let s2 = population_e(rho, Some(&uy)) - population_g(rho, Some(&uy));
    let s3 = population_e(rho, None) - population_g(rho, None);
    Ok(StokesVector::new(1.0, s1, s2, s3))
}

/// Shot-sampled state tomography.
///
/// Each of the six projection measurements (three settings, each with its
/// swapped-population companion) draws N shots from stream
/// `meas_id * 6 + setting * 2 + companion` of the seeded generator.
pub fn qst_shot(rho: &DensityMatrix, shots: &ShotConfig, meas_id: u64) -> Result<StokesVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    let ux = qst_pre_rotation_x();
    let uy = qst_pre_rotation_y();
    let settings: [(Option<&Operator>,); 3] = [(Some(&ux),), (Some(&uy),), (None,)];
    let mut s = [0.0f64; 3];
    for (k, (pre,)) in settings.iter().enumerate() {
        let pe = population_e(rho, *pre);
        let pg = population_g(rho, *pre);
        let mut rng_e = stream_rng(shots.seed, meas_id * 6 + k as u64 * 2);
        let mut rng_g = stream_rng(shots.seed, meas_id * 6 + k as u64 * 2 + 1);
        let pe_hat = sample_probability(pe, shots.n_shots, &mut rng_e);
        let pg_hat = sample_probability(pg, shots.n_shots, &mut rng_g);
        s[k] = pe_hat - pg_hat;
    }
    Ok(StokesVector::new(1.0, s[0], s[1], s[2]))
}

pub fn qst(rho: &DensityMatrix, mode: &MeasureMode, meas_id: u64) -> Result<StokesVector> {
    match mode {
        MeasureMode::Exact => qst_exact(rho),
        MeasureMode::Shots(cfg) => qst_shot(rho, cfg, meas_id),
    }
}

/// Binomial error propagation for the measured Stokes components:
/// sigma(S_k) = sqrt((pe(1-pe) + pg(1-pg))/N) per setting.
pub fn qst_shot_std(rho: &DensityMatrix, n_shots: u64) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    let ux = qst_pre_rotation_x();
    let uy = qst_pre_rotation_y();
    let pres: [Option<&Operator>; 3] = [Some(&ux), Some(&uy), None];
    let n = n_shots as f64;
    let mut out = [0.0f64; 3];
    for (k, pre) in pres.iter().enumerate() {
        let pe = population_e(rho, *pre);
        let pg = population_g(rho, *pre);
        out[k] = ((pe * (1.0 - pe) + pg * (1.0 - pg)) / n).sqrt();
    }
    Ok(out)
}

/// Inverse of the measured-convention Stokes read-out:
/// rho = (S0 I - S1 sigma_x - S2 sigma_y - S3 sigma_z)/2.
///
/// No physicality projection: shot-noise vectors reconstruct as-is.
pub fn density_from_stokes_measured(s: &StokesVector) -> Result<DensityMatrix> {
    let mat = DMatrix::from_row_slice(
        2,
        2,
        &[
            c((s.s0 - s.s3) / 2.0, 0.0),
            c(-s.s1 / 2.0, s.s2 / 2.0),
            c(-s.s1 / 2.0, -s.s2 / 2.0),
            c((s.s0 + s.s3) / 2.0, 0.0),
        ],
    );
    DensityMatrix::from_matrix_relaxed(mat)
}

/// Process matrix over the fixed operator basis {I, sigma_x, -i sigma_y, sigma_z}.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    chi: DMatrix<C64>,
}

impl ProcessMatrix {
    pub fn from_matrix(chi: DMatrix<C64>) -> Result<Self> {
        if chi.nrows() != 4 || chi.ncols() != 4 {
            return Err(Error::DimensionMismatch(chi.nrows(), 4));
        }
        Ok(Self { chi })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.chi
    }

    pub fn trace(&self) -> C64 {
        self.chi.diagonal().sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.chi[(i, j)] - self.chi[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.chi[(i, j)] - other.chi[(i, j)]).norm());
            }
        }
        worst
    }
}

/// The fixed operator basis A_0 = I, A_1 = sigma_x, A_2 = -i sigma_y, A_3 = sigma_z.
pub fn chi_basis_operator(m: usize) -> Result<Operator> {
    match m {
        0 => pauli(0),
        1 => pauli(1),
        2 => Ok(pauli(2)?.scale(c(0.0, -1.0))),
        3 => pauli(3),
        _ => Err(Error::InvalidArgument(format!(
            "basis index {m} out of range 0..=3"
        ))),
    }
}

/// Measured output states for the four tomography inputs |g>, |e>, |+>, |->.
#[derive(Debug, Clone)]
pub struct QptOutputs {
    /// Indexed by input: 0 = |g>, 1 = |e>, 2 = |+> = (|g>+|e>)/sqrt(2),
    /// 3 = |-> = (|g>-i|e>)/sqrt(2).
    pub outputs: [DensityMatrix; 4],
}

/// The four canonical tomography inputs.
pub fn qpt_inputs() -> [DensityMatrix; 4] {
    [
        DensityMatrix::pure_g(),
        DensityMatrix::pure_e(),
        DensityMatrix::pure_plus(),
        DensityMatrix::pure_minus(),
    ]
}

/// Applies the channel to the four inputs and reads each output out by state
/// tomography in the requested mode (measurement id = input index offset).
pub fn qpt_outputs<F>(channel: F, mode: &MeasureMode, meas_base: u64) -> Result<QptOutputs>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
{
    let inputs = qpt_inputs();
    let mut outputs = Vec::with_capacity(4);
    for (k, input) in inputs.iter().enumerate() {
        let out = channel(input)?;
        let s = qst(&out, mode, meas_base + k as u64)?;
        outputs.push(density_from_stokes_measured(&s)?);
    }
    let outputs: [DensityMatrix; 4] = outputs.try_into().expect("four outputs");
    Ok(QptOutputs { outputs })
}

/// Linear-inversion chi reconstruction from the four measured outputs.
///
/// rho_ge and rho_eg (the outputs the channel assigns to the off-diagonal
/// inputs |g><e| and |e><g|) come from the stated linear combinations of the
/// measured outputs; chi is then assembled from the block matrix
/// [[rho_1, rho_ge], [rho_eg, rho_2]] sandwiched between
/// Lambda = (1/2)[[I, sigma_x], [sigma_x, -I]].
pub fn chi_from_outputs(outs: &QptOutputs) -> ProcessMatrix {
    let [rho1, rho2, rho_plus, rho_minus] = [
        outs.outputs[0].matrix(),
        outs.outputs[1].matrix(),
        outs.outputs[2].matrix(),
        outs.outputs[3].matrix(),
    ];
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let sum12 = rho1 + rho2;
    // rho_ge = E(|g><e|), rho_eg = E(|e><g|)
    let rho_ge = rho_plus - rho_minus.map(|z| z * i) - sum12.map(|z| z * (one - i) * c(0.5, 0.0));
    let rho_eg = rho_plus + rho_minus.map(|z| z * i) - sum12.map(|z| z * (one + i) * c(0.5, 0.0));

    let mut block = DMatrix::<C64>::zeros(4, 4);
    for r in 0..2 {
        for cidx in 0..2 {
            block[(r, cidx)] = rho1[(r, cidx)];
            block[(r, 2 + cidx)] = rho_ge[(r, cidx)];
            block[(2 + r, cidx)] = rho_eg[(r, cidx)];
            block[(2 + r, 2 + cidx)] = rho2[(r, cidx)];
        }
    }
    let half = c(0.5, 0.0);
    let lambda = DMatrix::from_row_slice(
        4,
        4,
        &[
            half,
            c(0.0, 0.0),
            c(0.0, 0.0),
            half,
            c(0.0, 0.0),
            half,
            half,
            c(0.0, 0.0),
            c(0.0, 0.0),
            half,
            -half,
            c(0.0, 0.0),
            half,
            c(0.0, 0.0),
            c(0.0, 0.0),
            -half,
        ],
    );
    ProcessMatrix {
        chi: &lambda * block * &lambda,
    }
}

/// End-to-end process tomography of a channel.
pub fn qpt<F>(channel: F, mode: &MeasureMode) -> Result<ProcessMatrix>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
{
    Ok(chi_from_outputs(&qpt_outputs(channel, mode, 0)?))
}

/// Ideal chi of a unitary, computed by running the exact tomography pipeline
/// on the unitary channel (single code path).
pub fn chi_ideal(u: &Operator) -> Result<ProcessMatrix> {
    qpt(|rho| u.conjugate_density(rho), &MeasureMode::Exact)
}

/// Re(Tr[chi_a chi_b]).
pub fn process_fidelity(a: &ProcessMatrix, b: &ProcessMatrix) -> Result<f64> {
    Ok((a.matrix() * b.matrix()).diagonal().sum().re)
}

/// Undoes the preparation imperfection on a measured tomography record:
/// rho_cal_k = (rho_meas_k - (1 - p) rho_meas_e) / p.
///
/// Exact inverse of [`spam_apply`] composed with any linear channel, since
/// the measured |e>-input output is the channel's response to |e><e| itself.
pub fn spam_calibrate(outs: &QptOutputs, spam: &SpamModel) -> Result<QptOutputs> {
    let p = spam.prep_fidelity;
    let rho_e = outs.outputs[1].matrix().clone();
    let mut calibrated = Vec::with_capacity(4);
    for rho in &outs.outputs {
        let m = (rho.matrix() - rho_e.map(|z| z * c(1.0 - p, 0.0))).map(|z| z / c(p, 0.0));
        calibrated.push(DensityMatrix::from_matrix_relaxed(m)?);
    }
    Ok(QptOutputs {
        outputs: calibrated.try_into().expect("four outputs"),
    })
}

/// Error propagation for the Stokes-vector fidelity:
/// eps_F = sqrt(1/4 sum_k (dS_k S_id_k)^2).
pub fn state_fidelity_error(ds: &[f64; 4], s_id: &StokesVector) -> Result<f64> {
    if ds.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "error components must be non-negative and finite".into(),
        ));
    }
    let comps = [s_id.s0, s_id.s1, s_id.s2, s_id.s3];
    let sum: f64 = ds
        .iter()
        .zip(comps.iter())
        .map(|(d, s)| (d * s).powi(2))
        .sum();
    Ok((0.25 * sum).sqrt())
}
