//! Quantitative studies built on the gate schemes: systematic-error sweeps,
//! the dephasing-infidelity curve with its exponential fit, Gaussian-averaged
//! robustness numbers, and the three-scheme tomography comparison with
//! imperfect state preparation.
//!
//! Unit conventions: all frequencies and rates are angular (rad/s). The
//! dephasing rate is carried relative to the Rabi frequency wherever a ratio
//! appears; for absolute runs the ratio convention is
//! gamma_ratio = Gamma[1/s] / Omega_0[rad/s], recorded in run metadata.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dynamics::{output_state_fidelity, NoiseParams, SimConfig};
use crate::error::{Error, Result};
use crate::fit::{fit_saturating_exponential, model_crossing, FitResult};
use crate::quadrature::GaussHermite;
use crate::qubit::DensityMatrix;
use crate::schemes::{
    dqc_hadamard_rotations, dqc_sequence, dqc_u1_rotations, ngqc_sequence, nngqc_sequence,
    NgqcParams, NngqcParams, PulseSequence, SchemeTag,
};
use crate::tomography::{
    chi_from_outputs, chi_ideal, process_fidelity, qpt_outputs, spam_apply, spam_calibrate,
    MeasureMode, SpamModel,
};

/// Gate targets the studies run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    U1,
    Hadamard,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::U1 => "u1",
            Gate::Hadamard => "hadamard",
        }
    }
}

/// Which error parameter a sweep or average varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Fractional Rabi amplitude error, dimensionless.
    Rabi,
    /// Qubit resonance offset, rad/s.
    Detuning,
    /// Dephasing rate, rad/s.
    Dephasing,
}

impl ErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorKind::Rabi => "rabi",
            ErrorKind::Detuning => "detuning",
            ErrorKind::Dephasing => "dephasing",
        }
    }
}

/// Pulse sequence for a (scheme, gate) pair at peak Rabi frequency `omega0`.
///
/// The cyclic scheme runs at Omega_m = Omega_0 so peak power is matched
/// across schemes.
pub fn build_sequence(scheme: SchemeTag, gate: Gate, omega0: f64) -> Result<PulseSequence> {
    match (scheme, gate) {
        (SchemeTag::Nngqc, Gate::U1) => nngqc_sequence(&NngqcParams::u1(omega0)),
        (SchemeTag::Nngqc, Gate::Hadamard) => nngqc_sequence(&NngqcParams::hadamard(omega0)),
        (SchemeTag::Ngqc, Gate::U1) => ngqc_sequence(&NgqcParams::u1(omega0)),
        (SchemeTag::Ngqc, Gate::Hadamard) => ngqc_sequence(&NgqcParams::hadamard(omega0)),
        (SchemeTag::Dqc, Gate::U1) => dqc_sequence(&dqc_u1_rotations(), omega0),
        (SchemeTag::Dqc, Gate::Hadamard) => dqc_sequence(&dqc_hadamard_rotations(), omega0),
    }
}

/// One systematic-error sweep: a grid of error values for one scheme/gate.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub scheme: SchemeTag,
    pub gate: Gate,
    pub error_kind: ErrorKind,
    /// Fractional for Rabi, rad/s for detuning and dephasing.
    pub grid: Vec<f64>,
    pub input: DensityMatrix,
    pub omega0: f64,
    /// Base dephasing rate applied at every grid point (rad/s).
    pub gamma: f64,
    /// Imperfect preparation of the input, when modeled.
    pub spam: Option<SpamModel>,
    /// Shot-limited fidelity readout; exact expectation values when `None`.
    pub shots: Option<crate::tomography::ShotConfig>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidArgument("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "sweep grid has non-finite values".into(),
            ));
        }
        if self.omega0.is_nan() || self.omega0 <= 0.0 {
            return Err(Error::InvalidArgument("omega0 must be positive".into()));
        }
        Ok(())
    }
}

fn noise_for(kind: ErrorKind, value: f64, base_gamma: f64) -> Result<NoiseParams> {
    match kind {
        ErrorKind::Rabi => NoiseParams::new(base_gamma, value, 0.0),
        ErrorKind::Detuning => NoiseParams::new(base_gamma, 0.0, value),
        ErrorKind::Dephasing => NoiseParams::new(value, 0.0, 0.0),
    }
}

/// Output-state fidelity at every grid point.
///
/// The reference state is always the nominal target applied to the intended
/// input; the evolved state starts from the degraded input when preparation
/// imperfection is modeled. Shot mode reads the evolved state out by sampled
/// tomography (measurement id = grid index) and forms the fidelity as
/// (1/2) S_exp . S_id; exact mode is deterministic.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let seq = build_sequence(spec.scheme, spec.gate, spec.omega0)?;
    let prepared = match &spec.spam {
        Some(s) => spam_apply(&spec.input, s)?,
        None => spec.input.clone(),
    };
    let ideal = seq.target.conjugate_density(&spec.input)?;
    let mut out = Vec::with_capacity(spec.grid.len());
    for (k, &value) in spec.grid.iter().enumerate() {
        let noise = noise_for(spec.error_kind, value, spec.gamma)?;
        let evolved = if noise.gamma == 0.0 {
            crate::dynamics::propagate_unitary(&seq, &noise)?.conjugate_density(&prepared)?
        } else {
            let cfg = SimConfig::for_sequence(&seq)?;
            crate::dynamics::evolve_lindblad(&prepared, &seq, &noise, &cfg)?
        };
        let f = match &spec.shots {
            None => crate::qubit::state_fidelity(&evolved, &ideal)?,
            Some(cfg) => {
                let s_exp = crate::tomography::qst_shot(&evolved, cfg, k as u64)?;
                let s_id = crate::tomography::qst_exact(&ideal)?;
                0.5 * s_exp.dot(&s_id)
            }
        };
        out.push((value, f));
    }
    Ok(out)
}

/// Infidelity of the noncyclic U1 gate versus the dephasing ratio
/// Gamma/Omega_0, input |g>.
pub fn dephasing_curve(gamma_ratios: &[f64], omega0: f64) -> Result<Vec<(f64, f64)>> {
    if gamma_ratios.is_empty() {
        return Err(Error::InvalidArgument("empty dephasing grid".into()));
    }
    let seq = nngqc_sequence(&NngqcParams::u1(omega0))?;
    let input = DensityMatrix::pure_g();
    let mut curve = Vec::with_capacity(gamma_ratios.len());
    for &ratio in gamma_ratios {
        if !(0.0..=0.1).contains(&ratio) {
            return Err(Error::InvalidArgument(format!(
                "gamma/omega0 = {ratio} outside [0, 0.1]"
            )));
        }
        let noise = NoiseParams::dephasing(ratio * omega0)?;
        let f = output_state_fidelity(&seq, &input, &noise, None)?;
        curve.push((ratio, 1.0 - f));
    }
    Ok(curve)
}

/// Uniform grid helper.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Simulates the dephasing curve on the given ratio grid and fits
/// eps = a (exp(-b Gamma/Omega_0) - 1), Gauss-Newton initialized at
/// (-0.5, 2.5).
pub fn dephasing_curve_and_fit(
    gamma_ratios: &[f64],
    omega0: f64,
) -> Result<(Vec<(f64, f64)>, FitResult)> {
    let curve = dephasing_curve(gamma_ratios, omega0)?;
    let xs: Vec<f64> = curve.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = curve.iter().map(|p| p.1).collect();
    let fit = fit_saturating_exponential(&xs, &ys, (-0.5, 2.5))?;
    Ok((curve, fit))
}

/// Dephasing ratio at which the fitted infidelity model crosses `level`.
pub fn infidelity_crossing(fit: &FitResult, level: f64) -> Result<f64> {
    model_crossing(fit, level)
}

/// Gaussian distribution of an error value plus quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    /// Standard deviation: fractional for Rabi, rad/s for detuning.
    pub sigma: f64,
    /// Gauss-Hermite order (>= 5; default 21).
    pub order: usize,
    /// Truncation of the distribution, in multiples of sigma (default 4).
    pub truncation: f64,
}

impl GaussianSpec {
    pub fn new(sigma: f64, order: usize, truncation: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if order < 5 {
            return Err(Error::InvalidArgument(
                "quadrature order must be >= 5".into(),
            ));
        }
        if truncation.is_nan() || truncation <= 0.0 {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        Ok(Self {
            sigma,
            order,
            truncation,
        })
    }

    pub fn with_defaults(sigma: f64) -> Result<Self> {
        Self::new(sigma, 21, 4.0)
    }
}

/// Gaussian-averaged infidelity (fraction, not percent) of the output state
/// for input |g>, error drawn quasi-statically from N(0, sigma^2).
///
/// No dephasing and ideal preparation, matching the systematic-error sweep
/// setting; `gamma` and `spam` add them back when wanted.
pub fn gaussian_average(
    scheme: SchemeTag,
    gate: Gate,
    kind: ErrorKind,
    gspec: &GaussianSpec,
    omega0: f64,
    gamma: f64,
    spam: Option<&SpamModel>,
) -> Result<f64> {
    if matches!(kind, ErrorKind::Dephasing) {
        return Err(Error::InvalidArgument(
            "gaussian averaging is defined for the systematic error kinds".into(),
        ));
    }
    let seq = build_sequence(scheme, gate, omega0)?;
    let input = match spam {
        Some(s) => spam_apply(&DensityMatrix::pure_g(), s)?,
        None => DensityMatrix::pure_g(),
    };
    let gh = GaussHermite::new(gspec.order)?;
    gh.expect_gaussian(gspec.sigma, gspec.truncation, |eps| {
        let noise = noise_for(kind, eps, gamma)?;
        Ok(1.0 - output_state_fidelity(&seq, &input, &noise, None)?)
    })
}

/// Seeded Monte Carlo counterpart of [`gaussian_average`]: mean infidelity
/// and its standard error over `n_samples` truncated-normal draws.
#[allow(clippy::too_many_arguments)]
pub fn gaussian_average_mc(
    scheme: SchemeTag,
    gate: Gate,
    kind: ErrorKind,
    gspec: &GaussianSpec,
    omega0: f64,
    gamma: f64,
    spam: Option<&SpamModel>,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if matches!(kind, ErrorKind::Dephasing) {
        return Err(Error::InvalidArgument(
            "gaussian averaging is defined for the systematic error kinds".into(),
        ));
    }
    let seq = build_sequence(scheme, gate, omega0)?;
    let input = match spam {
        Some(s) => spam_apply(&DensityMatrix::pure_g(), s)?,
        None => DensityMatrix::pure_g(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cut = gspec.truncation * gspec.sigma;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let eps = loop {
            let draw: f64 = rng.sample::<f64, _>(StandardNormal) * gspec.sigma;
            if draw.abs() <= cut {
                break draw;
            }
        };
        let noise = noise_for(kind, eps, gamma)?;
        let inf = 1.0 - output_state_fidelity(&seq, &input, &noise, None)?;
        sum += inf;
        sum_sq += inf * inf;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Quadrature average cross-checked against Monte Carlo; disagreement beyond
/// three MC standard errors is a numerical failure.
pub fn gaussian_average_checked(
    scheme: SchemeTag,
    gate: Gate,
    kind: ErrorKind,
    gspec: &GaussianSpec,
    omega0: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let quad = gaussian_average(scheme, gate, kind, gspec, omega0, 0.0, None)?;
    let (mc, stderr) = gaussian_average_mc(
        scheme, gate, kind, gspec, omega0, 0.0, None, n_samples, seed,
    )?;
    if (quad - mc).abs() > 3.0 * stderr {
        return Err(Error::Numerical(format!(
            "quadrature {quad:.6e} vs Monte Carlo {mc:.6e} +- {stderr:.2e} disagree beyond 3 sigma"
        )));
    }
    Ok(quad)
}

pub const SCHEMES: [SchemeTag; 3] = [SchemeTag::Nngqc, SchemeTag::Ngqc, SchemeTag::Dqc];

/// Gaussian-averaged infidelity table: rows are error settings, columns are
/// the three schemes, values in percent.
#[derive(Debug, Clone)]
pub struct RobustnessTable {
    /// (kind, sigma) per row.
    pub rows: Vec<(ErrorKind, f64)>,
    /// Percent infidelities, indexed [row][scheme] with scheme order
    /// NNGQC, NGQC, DQC.
    pub values: Vec<[f64; 3]>,
}

/// The four-row robustness table for the U1 gate: sigma_Omega/Omega_0 in
/// {0.1, 0.2} and sigma_Delta/2pi in {5, 10} kHz at Omega_0/2pi = 67.9 kHz.
pub fn robustness_table(omega0: f64, order: usize, truncation: f64) -> Result<RobustnessTable> {
    let rows = vec![
        (ErrorKind::Rabi, 0.1),
        (ErrorKind::Rabi, 0.2),
        (ErrorKind::Detuning, 2.0 * std::f64::consts::PI * 5.0e3),
        (ErrorKind::Detuning, 2.0 * std::f64::consts::PI * 10.0e3),
    ];
    let mut values = Vec::with_capacity(rows.len());
    for &(kind, sigma) in &rows {
        let gspec = GaussianSpec::new(sigma, order, truncation)?;
        let mut row = [0.0f64; 3];
        for (k, &scheme) in SCHEMES.iter().enumerate() {
            row[k] = 100.0 * gaussian_average(scheme, Gate::U1, kind, &gspec, omega0, 0.0, None)?;
        }
        values.push(row);
    }
    Ok(RobustnessTable { rows, values })
}

/// Raw and calibrated process fidelities per scheme from the tomography
/// comparison at dephasing `gamma` and preparation fidelity `spam`.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonResult {
    /// NNGQC, NGQC, DQC order.
    pub raw: [f64; 3],
    pub calibrated: [f64; 3],
}

/// Process tomography of the U1 gate under each scheme with dephasing and
/// imperfect preparation; the calibrated variant divides the preparation
/// scaling back out of the measured outputs.
pub fn scheme_comparison(
    spam: &SpamModel,
    gamma: f64,
    omega0: f64,
    mode: &MeasureMode,
) -> Result<ComparisonResult> {
    let mut raw = [0.0f64; 3];
    let mut calibrated = [0.0f64; 3];
    for (k, &scheme) in SCHEMES.iter().enumerate() {
        let seq = build_sequence(scheme, Gate::U1, omega0)?;
        let chi_id = chi_ideal(&seq.target)?;
        let noise = NoiseParams::dephasing(gamma)?;
        let channel = |rho: &DensityMatrix| -> Result<DensityMatrix> {
            let prepared = spam_apply(rho, spam)?;
            if gamma == 0.0 {
                crate::dynamics::propagate_unitary(&seq, &noise)?.conjugate_density(&prepared)
            } else {
                let cfg = SimConfig::for_sequence(&seq)?;
                crate::dynamics::evolve_lindblad(&prepared, &seq, &noise, &cfg)
            }
        };
        let outputs = qpt_outputs(channel, mode, 4 * k as u64)?;
        raw[k] = process_fidelity(&chi_from_outputs(&outputs), &chi_id)?;
        let cal_outputs = spam_calibrate(&outputs, spam)?;
        calibrated[k] = process_fidelity(&chi_from_outputs(&cal_outputs), &chi_id)?;
    }
    Ok(ComparisonResult { raw, calibrated })
}
