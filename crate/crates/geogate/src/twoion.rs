//! Two-ion three-level model validating the effective two-qubit flip-flop
//! Hamiltonian.
//!
//! Two ions with levels {g, e, s} share one phonon mode. Each ion k carries
//! a detuned s level, an e-s drive with complex amplitude
//! Omega_bar_k = Omega_tilde exp(-i phibar_k), and a phonon-assisted g-s
//! coupling of strength g/2:
//!
//! H = sum_k [ Delta |s><s|_k
//!           + (Omega_bar_k |e><s|_k + g/2 a^dag |g><s|_k + h.c.) ].
//!
//! Under g >> Omega_tilde (Zeno pinning of the phonon-dressed manifold) and
//! Delta >> Omega_tilde (large detuning), the single-excitation pair
//! {|eg0>, |ge0>} reduces to a two-level flip-flop
//! H_eff = (Omega_tilde^2 / 2 Delta) e^{i phi} |ge0><eg0| + h.c. with
//! phi = pi + phibar_1 - phibar_2, while |ee0> and |gg0> stay put. The
//! functions here integrate the full model (exact diagonalization; H is
//! time independent) and compare its populations against the reduction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::{c, compose_zxz, Operator, C64};

/// Single-ion level in the fixed order g, e, s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IonLevel {
    G = 0,
    E = 1,
    S = 2,
}

/// Model parameters. `omega_eff` is the common drive magnitude
/// Omega_tilde = |Omega_bar_k|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoIonParams {
    pub omega_eff: f64,
    pub g: f64,
    pub delta: f64,
    pub phi1_bar: f64,
    pub phi2_bar: f64,
    pub n_max: usize,
}

impl TwoIonParams {
    pub fn new(
        omega_eff: f64,
        g: f64,
        delta: f64,
        phi1_bar: f64,
        phi2_bar: f64,
        n_max: usize,
    ) -> Result<Self> {
        if [omega_eff, g, delta]
            .iter()
            .any(|v| v.is_nan() || *v <= 0.0)
        {
            return Err(Error::InvalidArgument(
                "omega_eff, g and delta must be positive".into(),
            ));
        }
        if !phi1_bar.is_finite() || !phi2_bar.is_finite() {
            return Err(Error::InvalidArgument("phases must be finite".into()));
        }
        if n_max < 2 {
            // the |ee0> manifold reaches |gg2>
            return Err(Error::InvalidArgument("n_max must be >= 2".into()));
        }
        Ok(Self {
            omega_eff,
            g,
            delta,
            phi1_bar,
            phi2_bar,
            n_max,
        })
    }

    /// Scale-separated defaults: g = 50 Omega_tilde, Delta = 10 Omega_tilde,
    /// n_max = 3 and equal laser phases.
    pub fn default_hierarchy() -> Self {
        Self::new(1.0, 50.0, 10.0, 0.0, 0.0, 3).expect("valid defaults")
    }

    pub fn dim(&self) -> usize {
        9 * (self.n_max + 1)
    }

    /// Basis index of |a b n>.
    pub fn index(&self, a: IonLevel, b: IonLevel, n: usize) -> usize {
        (a as usize * 3 + b as usize) * (self.n_max + 1) + n
    }

    /// (g / Omega_tilde, Delta / Omega_tilde), attached to outputs so the
    /// validity of the scale separation is visible.
    pub fn hierarchy_report(&self) -> (f64, f64) {
        (self.g / self.omega_eff, self.delta / self.omega_eff)
    }

    /// Flip-flop period of the reduced model: 2 pi / (Omega_tilde^2 / Delta).
    pub fn transfer_period(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.delta / (self.omega_eff * self.omega_eff)
    }
}

/// Assembles the full Hermitian Hamiltonian on the 9 (n_max + 1) dim space.
pub fn full_hamiltonian(p: &TwoIonParams) -> Result<Operator> {
    let dim = p.dim();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let omega1 = Complex64::from_polar(p.omega_eff, -p.phi1_bar);
    let omega2 = Complex64::from_polar(p.omega_eff, -p.phi2_bar);
    let levels = [IonLevel::G, IonLevel::E, IonLevel::S];

    for &other in &levels {
        for n in 0..=p.n_max {
            // ion 1 terms, ion 2 spectator
            add_ion_terms(&mut h, p, 0, other, n, omega1);
            // ion 2 terms, ion 1 spectator
            add_ion_terms(&mut h, p, 1, other, n, omega2);
        }
    }
    Operator::from_matrix(h)
}

fn add_ion_terms(
    h: &mut DMatrix<C64>,
    p: &TwoIonParams,
    ion: usize,
    spectator: IonLevel,
    n: usize,
    omega: Complex64,
) {
    let idx = |lvl: IonLevel, ph: usize| -> usize {
        if ion == 0 {
            p.index(lvl, spectator, ph)
        } else {
            p.index(spectator, lvl, ph)
        }
    };
    // Delta |s><s|
    let s_idx = idx(IonLevel::S, n);
    h[(s_idx, s_idx)] += c(p.delta, 0.0);
    // Omega_bar |e><s| + h.c.
    let e_idx = idx(IonLevel::E, n);
    h[(e_idx, s_idx)] += omega;
    h[(s_idx, e_idx)] += omega.conj();
    // (g/2) a^dag |g><s| + h.c.
    if n < p.n_max {
        let g_idx = idx(IonLevel::G, n + 1);
        let amp = c(0.5 * p.g * ((n + 1) as f64).sqrt(), 0.0);
        h[(g_idx, s_idx)] += amp;
        h[(s_idx, g_idx)] += amp;
    }
}

/// Reduced 2x2 Hamiltonian on {|psi_2> = |eg0>, |psi_3> = |ge0>}:
/// (Omega_tilde^2 / 2 Delta) e^{i phi} |psi_3><psi_2| + h.c.,
/// phi = pi + phibar_1 - phibar_2.
pub fn effective_hamiltonian(p: &TwoIonParams) -> Result<Operator> {
    if p.delta == 0.0 {
        return Err(Error::InvalidArgument("delta must be nonzero".into()));
    }
    let magnitude = p.omega_eff * p.omega_eff / (2.0 * p.delta);
    let phi = std::f64::consts::PI + p.phi1_bar - p.phi2_bar;
    let coupling = Complex64::from_polar(magnitude, phi);
    Operator::from_rows(2, &[c(0.0, 0.0), coupling.conj(), coupling, c(0.0, 0.0)])
}

/// exp(-i H t) |psi> sampled at `times`, via one Hermitian eigendecomposition.
pub fn evolve_full(
    p: &TwoIonParams,
    psi0: &DVector<C64>,
    times: &[f64],
) -> Result<Vec<DVector<C64>>> {
    let h = full_hamiltonian(p)?;
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch(psi0.len(), h.dim()));
    }
    let eig = h.matrix().clone().symmetric_eigen();
    let coeffs = eig.eigenvectors.adjoint() * psi0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut rotated = coeffs.clone();
        for (k, a) in rotated.iter_mut().enumerate() {
            let phase = -eig.eigenvalues[k] * t;
            *a *= Complex64::from_polar(1.0, phase);
        }
        out.push(&eig.eigenvectors * rotated);
    }
    Ok(out)
}

/// One sampled point of the full-vs-effective comparison.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonSample {
    pub t: f64,
    pub p_full_eg0: f64,
    pub p_full_ge0: f64,
    pub p_eff_psi2: f64,
    pub p_eff_psi3: f64,
    /// Population outside the closed single-excitation chain
    /// {eg0, ge0, sg0, gs0, gg1}.
    pub leakage: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonTrace {
    pub samples: Vec<ComparisonSample>,
    /// max_t |P_full(ge0) - P_eff(psi_3)|.
    pub max_deviation: f64,
    pub hierarchy: (f64, f64),
}

/// Evolves |eg0> under the full and reduced models over `duration` and
/// reports the worst population deviation.
pub fn compare_full_effective(p: &TwoIonParams, duration: f64, dt: f64) -> Result<ComparisonTrace> {
    if duration.is_nan() || duration <= 0.0 || dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidArgument(
            "duration and dt must be positive".into(),
        ));
    }
    let n_samples = (duration / dt).ceil() as usize + 1;
    let times: Vec<f64> = (0..n_samples)
        .map(|k| duration * k as f64 / (n_samples - 1) as f64)
        .collect();

    let dim = p.dim();
    let mut psi0 = DVector::<C64>::zeros(dim);
    psi0[p.index(IonLevel::E, IonLevel::G, 0)] = c(1.0, 0.0);
    let states = evolve_full(p, &psi0, &times)?;

    let idx_eg0 = p.index(IonLevel::E, IonLevel::G, 0);
    let idx_ge0 = p.index(IonLevel::G, IonLevel::E, 0);
    let chain = [
        idx_eg0,
        idx_ge0,
        p.index(IonLevel::S, IonLevel::G, 0),
        p.index(IonLevel::G, IonLevel::S, 0),
        p.index(IonLevel::G, IonLevel::G, 1),
    ];

    // reduced model populations are the analytic flip-flop
    let lam = p.omega_eff * p.omega_eff / (2.0 * p.delta);
    let mut samples = Vec::with_capacity(times.len());
    let mut max_dev = 0.0f64;
    for (k, t) in times.iter().enumerate() {
        let psi = &states[k];
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Numerical(format!(
                "norm drifted to {norm} at t = {t}"
            )));
        }
        let p_eg0 = psi[idx_eg0].norm_sqr();
        let p_ge0 = psi[idx_ge0].norm_sqr();
        let in_chain: f64 = chain.iter().map(|&i| psi[i].norm_sqr()).sum();
        let p_eff_psi3 = (lam * t).sin().powi(2);
        let p_eff_psi2 = 1.0 - p_eff_psi3;
        let dev = (p_ge0 - p_eff_psi3).abs();
        max_dev = max_dev.max(dev);
        samples.push(ComparisonSample {
            t: *t,
            p_full_eg0: p_eg0,
            p_full_ge0: p_ge0,
            p_eff_psi2,
            p_eff_psi3,
            leakage: (1.0 - in_chain).max(0.0),
        });
    }
    Ok(ComparisonTrace {
        samples,
        max_deviation: max_dev,
        hierarchy: p.hierarchy_report(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ZenoResult {
    pub final_survival: f64,
    pub min_survival: f64,
}

/// Survival probability of |ee0> under the full model.
pub fn zeno_trapping(p: &TwoIonParams, duration: f64, dt: f64) -> Result<ZenoResult> {
    if duration.is_nan() || duration <= 0.0 || dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidArgument(
            "duration and dt must be positive".into(),
        ));
    }
    let n_samples = (duration / dt).ceil() as usize + 1;
    let times: Vec<f64> = (0..n_samples)
        .map(|k| duration * k as f64 / (n_samples - 1) as f64)
        .collect();
    let dim = p.dim();
    let mut psi0 = DVector::<C64>::zeros(dim);
    let idx_ee0 = p.index(IonLevel::E, IonLevel::E, 0);
    psi0[idx_ee0] = c(1.0, 0.0);
    let states = evolve_full(p, &psi0, &times)?;
    let mut min_survival = f64::INFINITY;
    let mut final_survival = 1.0;
    for psi in &states {
        let s = psi[idx_ee0].norm_sqr();
        min_survival = min_survival.min(s);
        final_survival = s;
    }
    Ok(ZenoResult {
        final_survival,
        min_survival,
    })
}

/// The two-qubit controlled gate on {|psi_1>, |psi_2>, |psi_3>, |psi_4>}:
/// identity on |psi_1> = |ee0> and |psi_4> = |gg0>, the Z-X-Z single-qubit
/// form on the {|psi_2>, |psi_3>} block.
pub fn controlled_gate_matrix(theta: f64, alpha: f64, beta: f64) -> Operator {
    let block = compose_zxz(theta, alpha, beta);
    let mut m = DMatrix::<C64>::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(3, 3)] = c(1.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            m[(1 + i, 1 + j)] = block.matrix()[(i, j)];
        }
    }
    Operator::from_matrix(m).expect("4x4")
}
