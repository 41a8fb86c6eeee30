//! Pulse-sequence synthesis for the three gate constructions and the
//! geometric quantities behind the noncyclic scheme.
//!
//! A gate is a piecewise-constant drive: per segment a Rabi amplitude, a
//! laser phase, and a duration. The noncyclic geometric construction (NNGQC)
//! steers two auxiliary orthogonal states |Psi_1,2(t)> parameterized by
//! spherical angles (xi, eta) along open Bloch-sphere paths with the drive
//! phase locked to phi = -eta - pi/2, which keeps the dynamical phase
//! identically zero while a geometric phase gamma = phi_1/2 accumulates at
//! the step of eta. The cyclic construction (NGQC) is the usual three-interval
//! orange-slice loop, and the dynamical construction (DQC) composes resonant
//! rotations directly.
//!
//! Sign conventions are fixed once, here, by requiring that the nominal U1
//! pulse reproduces the explicit target matrix from [`crate::qubit::u1_matrix`]:
//! a segment with Rabi amplitude Omega and phase phi drives
//! H = (Omega/2)(cos(phi) sigma_x - sin(phi) sigma_y). Downstream modules
//! inherit this convention through [`crate::dynamics::segment_hamiltonian`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qubit::{c, compose_zxz, DensityMatrix, Operator, StokesVector, C64};

/// Which construction produced a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeTag {
    Nngqc,
    Ngqc,
    Dqc,
}

impl SchemeTag {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeTag::Nngqc => "nngqc",
            SchemeTag::Ngqc => "ngqc",
            SchemeTag::Dqc => "dqc",
        }
    }
}

/// One piecewise-constant drive interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    /// Seconds.
    pub duration: f64,
    /// Rabi amplitude Omega, rad/s, >= 0.
    pub rabi: f64,
    /// Laser phase, rad.
    pub phase: f64,
    /// Static frequency offset baked into the segment (0 for nominal pulses), rad/s.
    pub detuning_offset: f64,
}

impl PulseSegment {
    pub fn new(duration: f64, rabi: f64, phase: f64) -> Result<Self> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "segment duration must be positive, got {duration}"
            )));
        }
        if !rabi.is_finite() || rabi < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "segment Rabi amplitude must be finite and >= 0, got {rabi}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidArgument(
                "segment phase must be finite".into(),
            ));
        }
        Ok(Self {
            duration,
            rabi,
            phase,
            detuning_offset: 0.0,
        })
    }

    /// Pulse area Omega * t, rad.
    pub fn area(&self) -> f64 {
        self.rabi * self.duration
    }
}

/// Executable gate recipe: ordered segments plus the ideal target unitary.
#[derive(Debug, Clone)]
pub struct PulseSequence {
    pub segments: Vec<PulseSegment>,
    pub scheme: SchemeTag,
    pub target: Operator,
}

impl PulseSequence {
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn shortest_segment(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.duration)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn total_area(&self) -> f64 {
        self.segments.iter().map(|s| s.area()).sum()
    }
}

/// Parameter set (Omega_0, phi_0, phi_1, xi_0, tau) of the noncyclic scheme:
/// xi(t) = Omega_0 t - xi_0 and eta(t) = phi_1 step(t - xi_0/Omega_0) + phi_0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NngqcParams {
    pub omega0: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub xi0: f64,
    pub tau: f64,
}

impl NngqcParams {
    pub fn new(omega0: f64, phi0: f64, phi1: f64, xi0: f64, tau: f64) -> Result<Self> {
        for (name, v) in [
            ("omega0", omega0),
            ("phi0", phi0),
            ("phi1", phi1),
            ("xi0", xi0),
            ("tau", tau),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        if omega0 <= 0.0 {
            return Err(Error::InvalidArgument("omega0 must be positive".into()));
        }
        let t_step = xi0 / omega0;
        if t_step.is_nan() || t_step <= 0.0 || t_step >= tau {
            return Err(Error::InvalidArgument(format!(
                "step time xi0/omega0 = {t_step} must lie strictly inside (0, tau = {tau})"
            )));
        }
        Ok(Self {
            omega0,
            phi0,
            phi1,
            xi0,
            tau,
        })
    }

    /// U1 parameter set: phi0 = -pi/2, phi1 = pi/2, xi0 = pi/2, tau = pi/Omega_0.
    pub fn u1(omega0: f64) -> Self {
        Self::new(omega0, -PI / 2.0, PI / 2.0, PI / 2.0, PI / omega0).expect("U1 params")
    }

    /// Hadamard parameter set: phi0 = 0, phi1 = pi/2, xi0 = pi/2, tau = 3pi/(2 Omega_0).
    pub fn hadamard(omega0: f64) -> Self {
        Self::new(omega0, 0.0, PI / 2.0, PI / 2.0, 1.5 * PI / omega0).expect("Hadamard params")
    }

    pub fn xi(&self, t: f64) -> f64 {
        self.omega0 * t - self.xi0
    }

    pub fn eta(&self, t: f64) -> f64 {
        if t < self.step_time() {
            self.phi0
        } else {
            self.phi0 + self.phi1
        }
    }

    pub fn step_time(&self) -> f64 {
        self.xi0 / self.omega0
    }
}

/// Rotation angles of the equivalent Z-X-Z decomposition plus the raw
/// boundary angles they derive from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeAngles {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    pub eta_plus: f64,
    pub eta_minus: f64,
}

#[inline]
fn mu(k: f64, j: f64) -> f64 {
    (k / 2.0).cos() * (j / 2.0).cos()
}

#[inline]
fn nu(k: f64, j: f64) -> f64 {
    (k / 2.0).sin() * (j / 2.0).cos()
}

#[inline]
fn lambda(k: f64, j: f64) -> f64 {
    (k / 2.0).sin() * (j / 2.0).sin()
}

/// Rotation angles for a noncyclic parameter set.
///
/// Boundary-angle convention: xi_pm = xi(tau) +- xi(0), eta_pm = eta(tau) +-
/// eta(0). The arctangent terms are evaluated with the two-argument form so
/// the frequent cos(xi_minus/2) = 0 case (the U1 set) takes its limit value;
/// `compose_zxz(theta, alpha, beta)` then reproduces the nominal propagator
/// exactly, not only up to a global phase.
pub fn nngqc_angles(p: &NngqcParams) -> SchemeAngles {
    let xi_start = -p.xi0;
    let xi_end = p.omega0 * p.tau - p.xi0;
    let eta_start = p.phi0;
    let eta_end = p.phi0 + p.phi1;

    let xi_plus = xi_end + xi_start;
    let xi_minus = xi_end - xi_start;
    let eta_plus = eta_end + eta_start;
    let eta_minus = eta_end - eta_start;
    let gamma = p.phi1 / 2.0;
    let two_gamma = p.phi1;

    let theta = 2.0
        * (lambda(two_gamma, xi_plus).powi(2) + nu(xi_minus, two_gamma).powi(2))
            .sqrt()
            .clamp(0.0, 1.0)
            .asin();
    let t1 = nu(two_gamma, xi_plus).atan2(mu(two_gamma, xi_minus));
    let t2 = lambda(two_gamma, xi_plus).atan2(nu(xi_minus, two_gamma));
    let alpha = -t1 - t2 + (eta_minus - eta_plus - PI) / 2.0;
    let beta = -t1 + t2 + (eta_minus + eta_plus + PI) / 2.0;

    SchemeAngles {
        theta,
        alpha,
        beta,
        gamma,
        xi_plus,
        xi_minus,
        eta_plus,
        eta_minus,
    }
}

/// Z_beta X_theta Z_alpha for a computed angle set.
pub fn compose_from_angles(a: &SchemeAngles) -> Operator {
    compose_zxz(a.theta, a.alpha, a.beta)
}

/// Two-segment pulse realizing a noncyclic geometric gate.
///
/// Both segments run at Omega_0 (xi advances at the drive rate and the
/// sin(phi + eta) = -1 branch is taken); the phases -eta - pi/2 erase the
/// dynamical phase throughout.
pub fn nngqc_sequence(p: &NngqcParams) -> Result<PulseSequence> {
    let t_step = p.step_time();
    let seg1 = PulseSegment::new(t_step, p.omega0, -p.phi0 - PI / 2.0)?;
    let seg2 = PulseSegment::new(p.tau - t_step, p.omega0, -(p.phi0 + p.phi1) - PI / 2.0)?;
    let angles = nngqc_angles(p);
    Ok(PulseSequence {
        segments: vec![seg1, seg2],
        scheme: SchemeTag::Nngqc,
        target: compose_zxz(angles.theta, angles.alpha, angles.beta),
    })
}

/// Parameters of the cyclic (orange-slice) geometric gate
/// U_c(theta, gamma, phi) = exp(i gamma n.sigma) with
/// n = (sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgqcParams {
    pub theta: f64,
    pub gamma: f64,
    pub phi: f64,
    pub omega_m: f64,
}

impl NgqcParams {
    pub fn new(theta: f64, gamma: f64, phi: f64, omega_m: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        if !omega_m.is_finite() || omega_m <= 0.0 {
            return Err(Error::InvalidArgument("omega_m must be positive".into()));
        }
        if !gamma.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(Self {
            theta,
            gamma,
            phi,
            omega_m,
        })
    }

    /// U1 = U_c(arccos(sqrt(3)/3), pi/3, 5pi/4).
    pub fn u1(omega_m: f64) -> Self {
        Self::new(
            (3.0f64.sqrt() / 3.0).acos(),
            PI / 3.0,
            5.0 * PI / 4.0,
            omega_m,
        )
        .expect("U1 params")
    }

    /// Hadamard up to phase: axis -(x+z)/sqrt(2), rotation exp(i pi/2 n.sigma).
    pub fn hadamard(omega_m: f64) -> Self {
        Self::new(3.0 * PI / 4.0, PI / 2.0, PI, omega_m).expect("Hadamard params")
    }
}

/// Target unitary of the cyclic construction: exp(i gamma n.sigma).
pub fn ngqc_target(p: &NgqcParams) -> Operator {
    let (cg, sg) = (p.gamma.cos(), p.gamma.sin());
    let nx = p.theta.sin() * p.phi.cos();
    let ny = p.theta.sin() * p.phi.sin();
    let nz = p.theta.cos();
    // cos(g) I + i sin(g) (nx sx + ny sy + nz sz)
    Operator::from_rows(
        2,
        &[
            c(cg, sg * nz),
            c(sg * ny, sg * nx),
            c(-sg * ny, sg * nx),
            c(cg, -sg * nz),
        ],
    )
    .expect("2x2")
}

/// Three-interval cyclic pulse: areas (theta, pi, pi - theta) with phases
/// (-phi + pi/2, -phi - gamma - pi/2, -phi + pi/2), total duration 2 pi / Omega_m.
///
/// The theta = 0 and theta = pi edges collapse an interval to zero length;
/// zero-length segments are dropped rather than emitted.
pub fn ngqc_sequence(p: &NgqcParams) -> Result<PulseSequence> {
    let mut segments = Vec::new();
    let specs = [
        (p.theta, -p.phi + PI / 2.0),
        (PI, -p.phi - p.gamma - PI / 2.0),
        (PI - p.theta, -p.phi + PI / 2.0),
    ];
    for (area, phase) in specs {
        if area > 0.0 {
            segments.push(PulseSegment::new(area / p.omega_m, p.omega_m, phase)?);
        }
    }
    Ok(PulseSequence {
        segments,
        scheme: SchemeTag::Ngqc,
        target: ngqc_target(p),
    })
}

/// Resonant rotation U_d(theta, phi) = cos(theta/2) - i sin(theta/2)
/// (cos(phi) sigma_x - sin(phi) sigma_y).
pub fn dqc_rotation(theta: f64, phi: f64) -> Operator {
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Operator::from_rows(
        2,
        &[
            c(ch, 0.0),
            c(sh * phi.sin(), -sh * phi.cos()),
            c(-sh * phi.sin(), -sh * phi.cos()),
            c(ch, 0.0),
        ],
    )
    .expect("2x2")
}

/// Dynamical composition of resonant rotations.
///
/// `rotations` is given in matrix-product order (leftmost factor first);
/// the emitted segments run in time order, i.e. the rightmost rotation is
/// pulsed first. An empty list yields an empty sequence (identity target).
pub fn dqc_sequence(rotations: &[(f64, f64)], omega0: f64) -> Result<PulseSequence> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(Error::InvalidArgument("omega0 must be positive".into()));
    }
    let mut target = Operator::identity(2);
    let mut segments = Vec::new();
    for &(theta, phi) in rotations {
        if theta < 0.0 || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rotation area must be finite and >= 0, got {theta}"
            )));
        }
        target = target.mul(&dqc_rotation(theta, phi))?;
    }
    for &(theta, phi) in rotations.iter().rev() {
        if theta > 0.0 {
            segments.push(PulseSegment::new(theta / omega0, omega0, phi)?);
        }
    }
    Ok(PulseSequence {
        segments,
        scheme: SchemeTag::Dqc,
        target,
    })
}

/// U1 = U_d(pi/2, 0) U_d(pi, -pi/4) U_d(pi, pi/2), total area 5pi/2.
pub fn dqc_u1_rotations() -> Vec<(f64, f64)> {
    vec![(PI / 2.0, 0.0), (PI, -PI / 4.0), (PI, PI / 2.0)]
}

/// Hadamard up to phase: U_d(pi, 0) U_d(pi/2, -pi/2).
pub fn dqc_hadamard_rotations() -> Vec<(f64, f64)> {
    vec![(PI, 0.0), (PI / 2.0, -PI / 2.0)]
}

/// Sampled (xi, eta) path of the auxiliary state pair.
#[derive(Debug, Clone)]
pub struct AuxiliaryPath {
    samples: Vec<PathPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub xi: f64,
    pub eta: f64,
}

impl PathPoint {
    /// |Psi_1> = (cos(xi/2) e^{-i eta/2}, sin(xi/2) e^{i eta/2}).
    pub fn psi1(&self) -> [C64; 2] {
        let (h, e) = (self.xi / 2.0, self.eta / 2.0);
        [
            c(h.cos() * e.cos(), -h.cos() * e.sin()),
            c(h.sin() * e.cos(), h.sin() * e.sin()),
        ]
    }

    /// |Psi_2> = (sin(xi/2) e^{-i eta/2}, -cos(xi/2) e^{i eta/2}).
    pub fn psi2(&self) -> [C64; 2] {
        let (h, e) = (self.xi / 2.0, self.eta / 2.0);
        [
            c(h.sin() * e.cos(), -h.sin() * e.sin()),
            c(-h.cos() * e.cos(), -h.cos() * e.sin()),
        ]
    }
}

impl AuxiliaryPath {
    pub fn from_points(samples: Vec<PathPoint>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(
                "auxiliary path needs at least two samples".into(),
            ));
        }
        Ok(Self { samples })
    }

    /// Dense sampling of a noncyclic parameter set, with the eta step placed
    /// as a duplicated time sample (pre- and post-jump values).
    pub fn from_nngqc(p: &NngqcParams, samples_per_segment: usize) -> Result<Self> {
        if samples_per_segment < 2 {
            return Err(Error::InvalidArgument(
                "need at least two samples per segment".into(),
            ));
        }
        let t_step = p.step_time();
        let mut samples = Vec::with_capacity(2 * samples_per_segment + 2);
        let eta1 = p.phi0;
        let eta2 = p.phi0 + p.phi1;
        for k in 0..=samples_per_segment {
            let t = t_step * k as f64 / samples_per_segment as f64;
            samples.push(PathPoint {
                t,
                xi: p.xi(t),
                eta: eta1,
            });
        }
        for k in 0..=samples_per_segment {
            let t = t_step + (p.tau - t_step) * k as f64 / samples_per_segment as f64;
            samples.push(PathPoint {
                t,
                xi: p.xi(t),
                eta: eta2,
            });
        }
        Self::from_points(samples)
    }

    pub fn points(&self) -> &[PathPoint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn inner(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Geometric phase gamma = integral of i <Psi_1| d/dt |Psi_1>, evaluated as
/// the discrete connection -sum arg <Psi_1(t_k)|Psi_1(t_{k+1})>.
///
/// The discrete form integrates exactly across the eta step (where the
/// integrand is a delta function), so dense sampling recovers phi_1/2 for
/// noncyclic paths to rounding accuracy.
pub fn geometric_phase(path: &AuxiliaryPath) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidArgument("path too short".into()));
    }
    let mut gamma = 0.0;
    for w in path.samples.windows(2) {
        let a = w[0].psi1();
        let b = w[1].psi1();
        gamma -= inner(&a, &b).arg();
    }
    Ok(gamma)
}

/// Generalized noncyclic phase gamma + arg <Psi_1(0)|Psi_1(tau)>, reported
/// as a diagnostic only.
pub fn noncyclic_phase_total(path: &AuxiliaryPath) -> Result<f64> {
    let gamma = geometric_phase(path)?;
    let first = path.samples.first().unwrap().psi1();
    let last = path.samples.last().unwrap().psi1();
    Ok(gamma + inner(&first, &last).arg())
}

/// Integral of <Psi_1|H(t)|Psi_1> over the sequence, by the trapezoid rule on
/// the path samples. The path must cover the same time span as the sequence.
pub fn dynamical_phase(seq: &PulseSequence, path: &AuxiliaryPath) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidArgument("path too short".into()));
    }
    let total = seq.total_duration();
    let span = path.samples.last().unwrap().t - path.samples.first().unwrap().t;
    if (span - total).abs() > 1e-9 * total.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "path span {span} does not match sequence duration {total}"
        )));
    }
    let mut boundaries = Vec::with_capacity(seq.segments.len() + 1);
    let mut acc = 0.0;
    boundaries.push(acc);
    for s in &seq.segments {
        acc += s.duration;
        boundaries.push(acc);
    }
    let segment_at = |t: f64| -> &PulseSegment {
        let mut idx = seq.segments.len() - 1;
        for (k, w) in boundaries.windows(2).enumerate() {
            if t < w[1] {
                idx = k;
                break;
            }
        }
        &seq.segments[idx]
    };
    // <Psi_1| H |Psi_1> = (Omega/2) sin(xi) cos(phi + eta) for the drive term.
    let integrand = |pt: &PathPoint| -> f64 {
        let seg = segment_at(pt.t);
        0.5 * seg.rabi * pt.xi.sin() * (seg.phase + pt.eta).cos()
    };
    let mut phase = 0.0;
    for w in path.samples.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt <= 0.0 {
            continue; // duplicated step sample
        }
        phase += 0.5 * (integrand(&w[0]) + integrand(&w[1])) * dt;
    }
    Ok(phase)
}

/// Stokes samples along the nominal (noise-free) evolution of `initial`.
pub fn bloch_trajectory(
    seq: &PulseSequence,
    initial: &DensityMatrix,
    n_samples: usize,
) -> Result<Vec<(f64, StokesVector)>> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if initial.dim() != 2 {
        return Err(Error::DimensionMismatch(initial.dim(), 2));
    }
    let total = seq.total_duration();
    let mut out = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = total * k as f64 / (n_samples - 1) as f64;
        let u = partial_propagator(seq, t);
        let rho = u.conjugate_density(initial)?;
        out.push((t, StokesVector::from_density(&rho)?));
    }
    Ok(out)
}

/// Nominal propagator from t = 0 up to `t` (no noise), exact per segment.
pub fn partial_propagator(seq: &PulseSequence, t: f64) -> Operator {
    let mut u = Operator::identity(2);
    let mut elapsed = 0.0;
    for seg in &seq.segments {
        if t <= elapsed {
            break;
        }
        let dt = (t - elapsed).min(seg.duration);
        u = segment_rotation(seg, dt).mul(&u).expect("2x2");
        elapsed += seg.duration;
    }
    u
}

/// Exact drive rotation for a truncated segment: exp(-i H dt) with
/// H = (Omega/2)(cos(phi) sigma_x - sin(phi) sigma_y) + (offset/2)(|e><e| - |g><g|).
pub fn segment_rotation(seg: &PulseSegment, dt: f64) -> Operator {
    let hx = 0.5 * seg.rabi * seg.phase.cos();
    let hy = -0.5 * seg.rabi * seg.phase.sin();
    let hz = -0.5 * seg.detuning_offset;
    let norm = (hx * hx + hy * hy + hz * hz).sqrt();
    if norm == 0.0 {
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
