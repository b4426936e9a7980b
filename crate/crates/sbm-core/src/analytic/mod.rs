//! Closed-form dynamics of the driven spin-boson model at ε = 0.
//!
//! For photon drive the Hamiltonian splits into the two `σx = ±1`
//! subspaces, each a displaced harmonic oscillator with effective
//! coupling `c± = ±g + Ωp`. The coherent labels orbit their displaced
//! equilibria, and the interference of the two branches gives
//!
//! `⟨σz(t)⟩ = −e^{−2g²/ω²} cos(ηt − ξ sin ωt)`,
//!
//! with Rabi angular frequency `η = 4gΩp/ω` and modulation index
//! `ξ = 4gΩp/ω²`. Averaged over long times the signal vanishes except
//! at drive amplitudes `Ωp = mω²/4g`, where it equals
//! `−e^{−2g²/ω²} J_m(m)` — the resonance this crate reproduces, and the
//! basis of the coupling estimator [`estimate_coupling`].
//!
//! Everything here is the oracle counterpart to [`crate::evolve`]; the
//! two routes are checked against each other in the test suites.

pub mod bessel;
pub mod quad;

use num_complex::Complex64;

pub use bessel::bessel_j;

use crate::error::{Result, SbmError};
use crate::model::{DriveKind, ModelParams};

/// Derived constants of the photon-drive closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormParams {
    /// Rabi angular frequency `η = 4gΩp/ω`.
    pub eta: f64,
    /// Modulation index `ξ = 4gΩp/ω²`; `η = ξ·ω` exactly.
    pub xi: f64,
    /// Coherent-overlap prefactor `e^{−2g²/ω²}` ∈ (0, 1].
    pub prefactor: f64,
    /// Effective subspace coupling `c₊ = g + Ωp`.
    pub c_plus: f64,
    /// Effective subspace coupling `c₋ = −g + Ωp`.
    pub c_minus: f64,
}

fn require_photon_zero_epsilon(params: &ModelParams, what: &str) -> Result<()> {
    if params.drive.kind == DriveKind::Atom {
        return Err(SbmError::UnsupportedRegime(format!("{what} requires photon drive")));
    }
    if params.epsilon != 0.0 {
        return Err(SbmError::UnsupportedRegime(format!(
            "{what} requires ε = 0 (got ε = {})",
            params.epsilon
        )));
    }
    Ok(())
}

/// η, ξ, the overlap prefactor, and the subspace couplings for a
/// photon-driven, ε = 0 model.
pub fn closed_form_params(params: &ModelParams) -> Result<ClosedFormParams> {
    require_photon_zero_epsilon(params, "closed_form_params")?;
    let omega = params.omega;
    let amplitude = params.drive.amplitude;
    let eta = 4.0 * params.g * amplitude / omega;
    let xi = eta / omega;
    let ratio = params.g / omega;
    Ok(ClosedFormParams {
        eta,
        xi,
        prefactor: (-2.0 * ratio * ratio).exp(),
        c_plus: params.g + amplitude,
        c_minus: -params.g + amplitude,
    })
}

/// σx eigenvalue labelling the two decoupled subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Plus,
    Minus,
}

impl Subspace {
    pub fn sign(self) -> f64 {
        match self {
            Subspace::Plus => 1.0,
            Subspace::Minus => -1.0,
        }
    }
}

/// Exact coherent-state trajectory of one `σx` subspace:
/// label `z(t) = −c_s/ω + (Ωp/ω) e^{−iωt}` on a circular orbit around
/// the displaced equilibrium, with accumulated phase
/// `φ(t) = (c_s²/ω) t − (Ωp c_s/ω²) sin(ωt)` (zero at t = 0).
#[derive(Debug, Clone, Copy)]
pub struct Trajectory {
    pub subspace: Subspace,
    /// Effective coupling `c_s = s·g + Ωp` of this subspace.
    pub coupling: f64,
    omega: f64,
    amplitude: f64,
}

impl Trajectory {
    pub fn new(params: &ModelParams, subspace: Subspace) -> Result<Self> {
        require_photon_zero_epsilon(params, "coherent_trajectory")?;
        Ok(Trajectory {
            subspace,
            coupling: subspace.sign() * params.g + params.drive.amplitude,
            omega: params.omega,
            amplitude: params.drive.amplitude,
        })
    }

    /// Centre of the circular orbit, `−c_s/ω`.
    pub fn equilibrium(&self) -> Complex64 {
        Complex64::new(-self.coupling / self.omega, 0.0)
    }

    /// Coherent label at time `t`.
    pub fn label(&self, t: f64) -> Complex64 {
        let rotation = Complex64::new(0.0, -self.omega * t).exp();
        self.equilibrium() + rotation * (self.amplitude / self.omega)
    }

    /// Accumulated phase at time `t`.
    pub fn phase(&self, t: f64) -> f64 {
        let dynamic = self.coupling * self.coupling / self.omega * t;
        let periodic =
            self.amplitude * self.coupling / (self.omega * self.omega) * (self.omega * t).sin();
        dynamic - periodic
    }
}

/// Coherent label and phase of one subspace at time `t`.
pub fn coherent_trajectory(
    params: &ModelParams,
    subspace: Subspace,
    t: f64,
) -> Result<(Complex64, f64)> {
    let trajectory = Trajectory::new(params, subspace)?;
    Ok((trajectory.label(t), trajectory.phase(t)))
}

/// Exact `⟨σz(t)⟩ = −e^{−2g²/ω²} cos(ηt − ξ sin ωt)` for photon drive
/// at ε = 0.
pub fn closed_sigma_z_photon(params: &ModelParams, t: f64) -> Result<f64> {
    let cf = closed_form_params(params)?;
    Ok(-cf.prefactor * (cf.eta * t - cf.xi * (params.omega * t).sin()).cos())
}

/// Exact `⟨σz(t)⟩ = −e^{−2g²/ω²} cos(2Ωa t)` for atom drive at ε = 0.
///
/// The prefactor is the overlap of the two static coherent branches,
/// `⟨z₊(0)|z₋(0)⟩ = e^{−2g²/ω²}`; the branches do not move under atom
/// drive, so only the subspace energy splitting `2Ωa` enters.
pub fn closed_sigma_z_atom(params: &ModelParams, t: f64) -> Result<f64> {
    if params.drive.kind == DriveKind::Photon {
        return Err(SbmError::UnsupportedRegime(
            "closed_sigma_z_atom requires atom drive".to_string(),
        ));
    }
    if params.epsilon != 0.0 {
        return Err(SbmError::UnsupportedRegime(format!(
            "closed_sigma_z_atom requires ε = 0 (got ε = {})",
            params.epsilon
        )));
    }
    let ratio = params.g / params.omega;
    let prefactor = (-2.0 * ratio * ratio).exp();
    Ok(-prefactor * (2.0 * params.drive.amplitude * t).cos())
}

/// Resonant drive amplitudes `Ωp^m = mω²/(4g)` for `m = 1..=m_max`.
/// Returns the empty list for `g = 0` (no resonances exist).
pub fn resonance_positions(g: f64, omega: f64, m_max: u32) -> Vec<f64> {
    if g <= 0.0 {
        return Vec::new();
    }
    (1..=m_max).map(|m| m as f64 * omega * omega / (4.0 * g)).collect()
}

/// Relative tolerance for deciding that an amplitude sits on a
/// resonance; the jump function is a measure-zero condition, only
/// meaningful for analytically chosen amplitudes.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

/// Long-time mean of `⟨σz(t)⟩` predicted by the resonance condition:
/// `−e^{−2g²/ω²} J_m(m)` when `Ωp = mω²/4g` for integer `m ≥ 1`
/// (within [`RESONANCE_TOLERANCE`] relative), `−e^{−2g²/ω²}` when the
/// signal is constant (`η = 0`, i.e. `Ωp = 0` or `g = 0`), zero
/// otherwise.
pub fn mean_value_resonant(params: &ModelParams) -> Result<f64> {
    let cf = closed_form_params(params)?;
    let amplitude = params.drive.amplitude;
    if cf.eta == 0.0 {
        return Ok(-cf.prefactor);
    }
    let m_real = cf.eta / params.omega;
    let m = m_real.round();
    if m >= 1.0 {
        let position = m * params.omega * params.omega / (4.0 * params.g);
        if (amplitude - position).abs() <= RESONANCE_TOLERANCE * amplitude.max(1.0) {
            let order = m as u32;
            return Ok(-cf.prefactor * bessel_j(order, m)?);
        }
    }
    Ok(0.0)
}

/// Finite-horizon mean `(1/T_L)∫₀^{T_L} ⟨σz(t)⟩ dt` of the closed form,
/// by composite Gauss–Legendre quadrature with panels short against
/// the fastest frequency (absolute error ≤ 1e-10).
pub fn finite_time_mean_closed(params: &ModelParams, t_long: f64) -> Result<f64> {
    if t_long <= 0.0 {
        return Err(SbmError::InvalidParams(format!("T_L must be > 0, got {t_long}")));
    }
    let cf = closed_form_params(params)?;
    let top_frequency = cf.eta + cf.xi * params.omega + params.omega;
    let panels = ((t_long * top_frequency / 4.0).ceil() as usize).max(4);
    let prefactor = cf.prefactor;
    let omega = params.omega;
    let integral = quad::integrate(
        |t| -prefactor * (cf.eta * t - cf.xi * (omega * t).sin()).cos(),
        0.0,
        t_long,
        panels,
    );
    Ok(integral / t_long)
}

/// Gap between the subspace energy branches at photon number
/// difference `m`: `ΔE = ωm − 4Ωp g/ω`. Zero exactly at the resonant
/// amplitudes.
pub fn energy_gap(m: u32, g: f64, omega: f64, omega_p: f64) -> f64 {
    omega * m as f64 - 4.0 * omega_p * g / omega
}

/// Rabi period `T = πω/(2gΩp) = 2π/η` of the driven oscillation.
pub fn rabi_period(g: f64, omega: f64, omega_p: f64) -> Result<f64> {
    if g <= 0.0 || omega_p <= 0.0 {
        return Err(SbmError::NoOscillation(format!(
            "no Rabi oscillation for g = {g}, Ωp = {omega_p}"
        )));
    }
    Ok(std::f64::consts::PI * omega / (2.0 * g * omega_p))
}

/// Coupling strength from two measured resonance means.
///
/// With `M_m = −e^{−2g²/ω²} J_m(m)`, the ratio
/// `r = (M_m − M_{m+i}) / (J_{m+i}(m+i) − J_m(m))` equals the overlap
/// prefactor, so `g/ω = √(−½ ln r)`. The ordering of the numerator is
/// the unique sign choice that makes `r` positive under the resonance
/// mean's own conventions. Requires `r ∈ (0, 1]`; anything else means
/// the measurements are incompatible with the model.
pub fn estimate_coupling(mean_m: f64, mean_mi: f64, m: u32, i: u32) -> Result<f64> {
    if m < 1 || i < 1 {
        return Err(SbmError::InvalidParams(format!(
            "resonance indices must satisfy m ≥ 1, i ≥ 1 (got m = {m}, i = {i})"
        )));
    }
    let high = m + i;
    let denominator = bessel_j(high, high as f64)? - bessel_j(m, m as f64)?;
    let ratio = (mean_m - mean_mi) / denominator;
    if ratio.is_nan() || ratio <= 0.0 || ratio > 1.0 {
        return Err(SbmError::InconsistentMeasurement(format!(
            "prefactor ratio r = {ratio:.6} outside (0, 1]; means {mean_m:.6}, {mean_mi:.6} \
             are incompatible with the resonance model"
        )));
    }
    Ok((-0.5 * ratio.ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DriveSpec;
    use approx::assert_abs_diff_eq;

    fn photon(g: f64, amplitude: f64) -> ModelParams {
        ModelParams::new(0.0, g, DriveSpec::photon(amplitude))
    }

    #[test]
    fn closed_form_params_reference() {
        let cf = closed_form_params(&photon(0.2, 1.25)).unwrap();
        assert_abs_diff_eq!(cf.eta, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cf.xi, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cf.prefactor, (-0.08_f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(cf.c_plus, 1.45, epsilon = 1e-15);
        assert_abs_diff_eq!(cf.c_minus, 1.05, epsilon = 1e-15);
        assert_eq!(cf.eta, cf.xi * 1.0);

        let detuned = closed_form_params(&photon(0.2, 1.2)).unwrap();
        assert_abs_diff_eq!(detuned.eta, 0.96, epsilon = 1e-15);
        assert_abs_diff_eq!(detuned.xi, 0.96, epsilon = 1e-15);

        let uncoupled = closed_form_params(&photon(0.0, 2.0)).unwrap();
        assert_eq!(uncoupled.eta, 0.0);
        assert_eq!(uncoupled.xi, 0.0);
        assert_eq!(uncoupled.prefactor, 1.0);
    }

    #[test]
    fn closed_form_params_rejects_wrong_regime() {
        let atom = ModelParams::new(0.0, 0.2, DriveSpec::atom(1.0));
        assert!(matches!(closed_form_params(&atom), Err(SbmError::UnsupportedRegime(_))));
        let split = ModelParams::new(0.1, 0.2, DriveSpec::photon(1.0));
        assert!(matches!(closed_form_params(&split), Err(SbmError::UnsupportedRegime(_))));
    }

    #[test]
    fn trajectory_initial_displacement_and_periodicity() {
        let params = photon(0.2, 1.25);
        let (z0, phase0) = coherent_trajectory(&params, Subspace::Plus, 0.0).unwrap();
        assert_abs_diff_eq!(z0.re, -0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(z0.im, 0.0, epsilon = 1e-14);
        assert_eq!(phase0, 0.0);

        let period = 2.0 * std::f64::consts::PI;
        let traj = Trajectory::new(&params, Subspace::Plus).unwrap();
        assert!((traj.label(period) - z0).norm() < 1e-13);
        // The sine part of the phase vanishes after a full period.
        let dynamic = traj.coupling * traj.coupling * period;
        assert_abs_diff_eq!(traj.phase(period), dynamic, epsilon = 1e-12);
    }

    #[test]
    fn trajectory_orbit_radius_constant() {
        let params = photon(0.2, 1.25);
        for subspace in [Subspace::Plus, Subspace::Minus] {
            let traj = Trajectory::new(&params, subspace).unwrap();
            for step in 0..200 {
                let t = step as f64 * 0.37;
                let radius = (traj.label(t) - traj.equilibrium()).norm();
                assert_abs_diff_eq!(radius, 1.25, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn trajectory_branch_separation_constant() {
        // |z₊(t) − z₋(t)| = 2g/ω at all times.
        let params = photon(0.2, 1.25);
        let plus = Trajectory::new(&params, Subspace::Plus).unwrap();
        let minus = Trajectory::new(&params, Subspace::Minus).unwrap();
        for step in 0..500 {
            let t = step as f64 * 0.173;
            assert_abs_diff_eq!((plus.label(t) - minus.label(t)).norm(), 0.4, epsilon = 1e-12);
        }
    }

    #[test]
    fn trajectory_phase_difference_identity() {
        // φ₊ − φ₋ = ηt − (ξ/2) sin ωt, and the label-overlap supplies
        // the remaining (ξ/2) sin ωt.
        let params = photon(0.2, 1.2);
        let cf = closed_form_params(&params).unwrap();
        let plus = Trajectory::new(&params, Subspace::Plus).unwrap();
        let minus = Trajectory::new(&params, Subspace::Minus).unwrap();
        for step in 0..300 {
            let t = step as f64 * 0.41;
            let diff = plus.phase(t) - minus.phase(t);
            let expected = cf.eta * t - 0.5 * cf.xi * t.sin();
            assert_abs_diff_eq!(diff, expected, epsilon = 1e-10);

            // The overlap ⟨z₊|z₋⟩ = exp(−½|z₊|²−½|z₋|²+z₊*z₋) carries
            // the imaginary exponent Im(z₊*z₋).
            let zp = plus.label(t);
            let zm = minus.label(t);
            assert_abs_diff_eq!((zp.conj() * zm).im, 0.5 * cf.xi * t.sin(), epsilon = 1e-10);
        }
    }

    #[test]
    fn closed_form_consistent_with_trajectories() {
        // Rebuild ⟨σz(t)⟩ from the trajectory construction:
        // −Re[e^{i(φ₋−φ₊)}·⟨z₊|z₋⟩] must match the closed form to 1e-12.
        let params = photon(0.2, 1.2);
        let plus = Trajectory::new(&params, Subspace::Plus).unwrap();
        let minus = Trajectory::new(&params, Subspace::Minus).unwrap();
        for step in 0..400 {
            let t = step as f64 * 0.39;
            let zp = plus.label(t);
            let zm = minus.label(t);
            let overlap = (-0.5 * zp.norm_sqr() - 0.5 * zm.norm_sqr()
                + (zp.conj() * zm).re)
                .exp()
                * Complex64::new(0.0, (zp.conj() * zm).im).exp();
            let phase = Complex64::new(0.0, minus.phase(t) - plus.phase(t)).exp();
            let rebuilt = -(phase * overlap).re;
            let direct = closed_sigma_z_photon(&params, t).unwrap();
            assert_abs_diff_eq!(rebuilt, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_sigma_z_photon_reference_points() {
        let params = photon(0.2, 1.25);
        let prefactor = (-0.08_f64).exp();
        assert_abs_diff_eq!(
            closed_sigma_z_photon(&params, 0.0).unwrap(),
            -prefactor,
            epsilon = 1e-15
        );
        // Full revival after one drive period at the m = 1 resonance.
        let period = 2.0 * std::f64::consts::PI;
        assert_abs_diff_eq!(
            closed_sigma_z_photon(&params, period).unwrap(),
            -prefactor,
            epsilon = 1e-12
        );
        // Uncoupled spin sector stays pinned.
        let uncoupled = photon(0.0, 2.0);
        for step in 0..50 {
            assert_abs_diff_eq!(
                closed_sigma_z_photon(&uncoupled, step as f64 * 0.7).unwrap(),
                -1.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn closed_sigma_z_bounded_by_prefactor() {
        let params = photon(0.3, 2.2);
        let cf = closed_form_params(&params).unwrap();
        for step in 0..2000 {
            let t = step as f64 * 0.079;
            let value = closed_sigma_z_photon(&params, t).unwrap();
            assert!(value.abs() <= cf.prefactor + 1e-15);
        }
    }

    #[test]
    fn closed_sigma_z_atom_reference_points() {
        let params = ModelParams::new(0.0, 0.2, DriveSpec::atom(0.8));
        let prefactor = (-0.08_f64).exp();
        assert_abs_diff_eq!(closed_sigma_z_atom(&params, 0.0).unwrap(), -prefactor, epsilon = 1e-15);
        // Period π/Ωa.
        let period = std::f64::consts::PI / 0.8;
        for step in 0..40 {
            let t = step as f64 * 0.31;
            assert_abs_diff_eq!(
                closed_sigma_z_atom(&params, t + period).unwrap(),
                closed_sigma_z_atom(&params, t).unwrap(),
                epsilon = 1e-12
            );
        }
        // Zero amplitude: constant.
        let idle = ModelParams::new(0.0, 0.2, DriveSpec::atom(0.0));
        assert_eq!(
            closed_sigma_z_atom(&idle, 0.0).unwrap(),
            closed_sigma_z_atom(&idle, 9.3).unwrap()
        );
    }

    #[test]
    fn jacobi_anger_expansion() {
        // cos(ηt − ξ sin ωt) = Σ_k J_k(ξ) cos((η − kω)t), with
        // J_{−k} = (−1)^k J_k; pointwise to 1e-10 for ξ ≤ 5.
        for &(eta, xi) in &[(1.0_f64, 1.0_f64), (0.96, 0.96), (3.0, 3.0), (2.4, 5.0)] {
            let top = xi.ceil() as i32 + 30;
            for step in 0..300 {
                let t = step as f64 * 0.21;
                let direct = (eta * t - xi * t.sin()).cos();
                let mut sum = 0.0;
                for k in -top..=top {
                    let j = bessel_j(k.unsigned_abs(), xi).unwrap();
                    let signed = if k < 0 && k % 2 != 0 { -j } else { j };
                    sum += signed * ((eta - k as f64) * t).cos();
                }
                assert!(
                    (direct - sum).abs() < 1e-10,
                    "Jacobi–Anger mismatch at η={eta}, ξ={xi}, t={t}: {direct} vs {sum}"
                );
            }
        }
    }

    #[test]
    fn resonance_positions_reference() {
        let positions = resonance_positions(0.2, 1.0, 3);
        assert_eq!(positions.len(), 3);
        assert_abs_diff_eq!(positions[0], 1.25, epsilon = 1e-12);
        assert_abs_diff_eq!(positions[1], 2.50, epsilon = 1e-12);
        assert_abs_diff_eq!(positions[2], 3.75, epsilon = 1e-12);

        let weak = resonance_positions(0.1, 1.0, 2);
        assert_abs_diff_eq!(weak[0], 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(weak[1], 5.0, epsilon = 1e-12);

        let strong = resonance_positions(0.5, 1.0, 2);
        assert_abs_diff_eq!(strong[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(strong[1], 1.0, epsilon = 1e-12);

        assert!(resonance_positions(0.0, 1.0, 5).is_empty());
    }

    #[test]
    fn mean_value_resonant_reference() {
        let prefactor = (-0.08_f64).exp();
        let first = mean_value_resonant(&photon(0.2, 1.25)).unwrap();
        assert_abs_diff_eq!(first, -prefactor * bessel_j(1, 1.0).unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(first, -0.40622, epsilon = 5e-6);

        let second = mean_value_resonant(&photon(0.2, 2.50)).unwrap();
        assert_abs_diff_eq!(second, -prefactor * bessel_j(2, 2.0).unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(second, -0.32571, epsilon = 5e-6);

        assert_eq!(mean_value_resonant(&photon(0.2, 1.30)).unwrap(), 0.0);
        assert_abs_diff_eq!(
            mean_value_resonant(&photon(0.2, 0.0)).unwrap(),
            -prefactor,
            epsilon = 1e-15
        );
    }

    #[test]
    fn finite_time_mean_matches_jump_function_on_period_lattice() {
        // T_L = 50π is 25 whole drive periods: all non-constant
        // harmonics of the Jacobi–Anger expansion integrate to zero.
        let t_long = 50.0 * std::f64::consts::PI;
        for amplitude in [1.25, 2.50] {
            let params = photon(0.2, amplitude);
            let mean = finite_time_mean_closed(&params, t_long).unwrap();
            let jump = mean_value_resonant(&params).unwrap();
            assert_abs_diff_eq!(mean, jump, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(
            finite_time_mean_closed(&photon(0.2, 0.0), t_long).unwrap(),
            -(-0.08_f64).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            finite_time_mean_closed(&photon(0.0, 1.7), t_long).unwrap(),
            -1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn finite_time_mean_off_lattice_decay() {
        // Off the period lattice the deviation decays like C/T_L;
        // C is reported, not asserted.
        let params = photon(0.2, 1.25);
        let jump = mean_value_resonant(&params).unwrap();
        let mut worst_c = 0.0_f64;
        for &t_long in &[40.0, 80.0, 160.0, 320.0] {
            let mean = finite_time_mean_closed(&params, t_long).unwrap();
            worst_c = worst_c.max((mean - jump).abs() * t_long);
        }
        println!("off-lattice finite-time constant C ≈ {worst_c:.3}");
    }

    #[test]
    fn energy_gap_reference() {
        assert_abs_diff_eq!(energy_gap(1, 0.2, 1.0, 1.25), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(energy_gap(1, 0.2, 1.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(energy_gap(2, 0.2, 1.0, 1.25), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rabi_period_reference() {
        let period = rabi_period(0.2, 1.0, 1.25).unwrap();
        assert_abs_diff_eq!(period, 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        // Equals 2π/η.
        let cf = closed_form_params(&photon(0.2, 1.25)).unwrap();
        assert_abs_diff_eq!(period, 2.0 * std::f64::consts::PI / cf.eta, epsilon = 1e-12);
        // Inversely proportional to the amplitude.
        assert_abs_diff_eq!(
            rabi_period(0.2, 1.0, 2.5).unwrap(),
            period / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            rabi_period(0.2, 1.0, 1.2).unwrap(),
            std::f64::consts::PI / 0.48,
            epsilon = 1e-12
        );
        assert!(rabi_period(0.0, 1.0, 1.0).is_err());
        assert!(rabi_period(0.2, 1.0, 0.0).is_err());
    }

    #[test]
    fn estimate_coupling_roundtrip() {
        let prefactor = (-0.08_f64).exp();
        let mean_1 = -prefactor * bessel_j(1, 1.0).unwrap();
        let mean_2 = -prefactor * bessel_j(2, 2.0).unwrap();
        let estimate = estimate_coupling(mean_1, mean_2, 1, 1).unwrap();
        assert_abs_diff_eq!(estimate, 0.2, epsilon = 1e-10);
    }

    #[test]
    fn estimate_coupling_degenerate_input() {
        assert!(matches!(
            estimate_coupling(-0.3, -0.3, 1, 1),
            Err(SbmError::InconsistentMeasurement(_))
        ));
    }

    #[test]
    fn estimate_coupling_noisy_input() {
        // Perturbed means propagate to a finite error in g.
        let estimate = estimate_coupling(-0.41, -0.33, 1, 1).unwrap();
        let denominator = bessel_j(2, 2.0).unwrap() - bessel_j(1, 1.0).unwrap();
        let expected = (-0.5 * ((-0.41_f64 + 0.33) / denominator).ln()).sqrt();
        assert_abs_diff_eq!(estimate, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(estimate, 0.21, epsilon = 5e-3);
    }
}
