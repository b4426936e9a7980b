//! Orchestration of the standard numerical experiments: dynamics
//! traces, amplitude scans with peak detection, rise-time scans,
//! random-initial-state robustness, and the end-to-end coupling
//! estimation roundtrip.
//!
//! Scan points are independent and evaluated in parallel; results are
//! keyed by grid index and RNG streams derive from explicit seeds, so
//! output is deterministic regardless of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::analytic;
use crate::error::{Result, SbmError};
use crate::evolve::{
    self, convergence_check, mean_over_time, ConvergenceReport, PropagatorBundle, TimeSeries,
};
use crate::fock::{self, StateVector};
use crate::model::{
    phase_space_extent, truncation_for_extent, validated, DriveKind, InitialState, ModelParams,
    NumericsConfig, DEFAULT_DT,
};

/// Upper edge accepted for amplitude grids. Slightly past 5ω so the
/// `g = 0.1` second resonance at exactly 5ω can sit interior to a
/// detection window.
pub const GRID_MAX: f64 = 5.05;

/// Default relative peak threshold (fraction of the scan's max |M|).
pub const DEFAULT_PEAK_THRESHOLD: f64 = 0.25;

/// Absolute floor under which local maxima are not reported as peaks;
/// separates genuine resonances from finite-horizon sidelobe ripple
/// (driveless scans max out near 0.03).
pub const DEFAULT_PEAK_FLOOR: f64 = 0.05;

/// A detected resonance peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Grid amplitude of the peak.
    pub position: f64,
    /// Signed long-time mean at the peak.
    pub mean: f64,
    /// Inferred resonance index `m = round(4·g·position/ω²)`.
    pub m: u32,
}

/// Convergence auditing inside scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditMode {
    Off,
    /// Doubling check at the first and last grid points.
    Corners,
}

/// Implementation knobs of a scan; the physics is fixed by the grid,
/// horizon, and initial-state selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub threshold: f64,
    pub peak_floor: f64,
    pub audit: AuditMode,
    pub dt: f64,
    pub sample_stride: usize,
    /// Fixed truncation for every point; `None` picks per point.
    pub n_max: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            threshold: DEFAULT_PEAK_THRESHOLD,
            peak_floor: DEFAULT_PEAK_FLOOR,
            audit: AuditMode::Corners,
            dt: DEFAULT_DT,
            sample_stride: 1,
            n_max: None,
        }
    }
}

/// Long-time means over a grid of drive amplitudes, with detected
/// peaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceScan {
    pub grid: Vec<f64>,
    pub means: Vec<f64>,
    pub t_long: f64,
    pub params: ModelParams,
    pub initial: InitialState,
    pub peaks: Vec<Peak>,
    pub threshold: f64,
    pub peak_floor: f64,
    /// Set when a convergence audit failed; offending grid indices in
    /// `failed_points`.
    pub degraded: bool,
    pub failed_points: Vec<usize>,
}

/// `|M|` as a function of rise time, for one or more resonance
/// indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisetimeScan {
    pub tc_grid: Vec<f64>,
    pub m_list: Vec<u32>,
    /// `magnitudes[k][j]` is `|M|` at `m_list[k]`, `tc_grid[j]`.
    pub magnitudes: Vec<Vec<f64>>,
    pub t_long: f64,
    pub params: ModelParams,
}

/// Result of the coupling-estimation roundtrip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingEstimate {
    pub g_true: f64,
    pub g_estimated: f64,
    pub relative_error: f64,
    pub mean_low: f64,
    pub mean_high: f64,
    pub m: u32,
    pub i: u32,
}

/// Build the initial state selected for a run at a given truncation.
pub fn make_initial(
    params: &ModelParams,
    n_max: usize,
    selector: InitialState,
) -> Result<StateVector> {
    match selector {
        InitialState::Polaron => fock::polaron_superposition(params, n_max),
        InitialState::Ground => {
            Ok(fock::default_initial_state(params, n_max, true)?.0)
        }
        InitialState::Random { seed, n_cut } => {
            random_initial_state(seed, n_cut, 2 * (n_max + 1))
        }
    }
}

/// Random low-Fock state: independent magnitude and phase draws,
/// uniform on [0,1), for each Fock level `N ≤ n_cut` and each `σx`
/// branch; assembled as `Σ_N (C_N⁺|N,+⟩ + C_N⁻|N,−⟩)` and normalized.
///
/// Draw order is `(N=0,+), (N=0,−), (N=1,+), …`, one `(A, B)` pair per
/// branch, from a ChaCha8 stream; fixed seeds reproduce bit-for-bit.
pub fn random_initial_state(seed: u64, n_cut: usize, dim: usize) -> Result<StateVector> {
    if dim < 2 * (n_cut + 1) {
        return Err(SbmError::InvalidParams(format!(
            "dim = {dim} cannot hold Fock levels up to {n_cut}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = StateVector::zero(dim);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for level in 0..=n_cut {
        for branch_sign in [1.0, -1.0] {
            let magnitude: f64 = rng.random();
            let phase: f64 = rng.random();
            let coeff = Complex64::from_polar(magnitude, 2.0 * std::f64::consts::PI * phase);
            // |N,±⟩ = |N⟩⊗(|↑⟩ ± |↓⟩)/√2 in the storage basis.
            state.amplitudes[2 * level] += coeff * inv_sqrt2;
            state.amplitudes[2 * level + 1] += coeff * inv_sqrt2 * branch_sign;
        }
    }
    if state.norm() == 0.0 {
        return Err(SbmError::Numerical("random draw produced the zero vector".to_string()));
    }
    state.normalize();
    Ok(state)
}

/// Strict local maxima of `|values|` exceeding both the relative
/// threshold and the absolute floor, annotated with the inferred
/// resonance index.
pub fn detect_peaks(
    values: &[f64],
    grid: &[f64],
    threshold: f64,
    peak_floor: f64,
    g: f64,
    omega: f64,
) -> Result<Vec<Peak>> {
    if grid.len() < 3 || values.len() != grid.len() {
        return Err(SbmError::InvalidParams(format!(
            "peak detection needs ≥ 3 grid points with one value each (got {} / {})",
            grid.len(),
            values.len()
        )));
    }
    let max_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cut = (threshold * max_abs).max(peak_floor);
    let mut peaks = Vec::new();
    for idx in 1..values.len() - 1 {
        let here = values[idx].abs();
        if here > values[idx - 1].abs() && here > values[idx + 1].abs() && here >= cut {
            let m = (4.0 * g * grid[idx] / (omega * omega)).round().max(0.0) as u32;
            peaks.push(Peak { position: grid[idx], mean: values[idx], m });
        }
    }
    Ok(peaks)
}

/// Uniform amplitude grid `min, min+step, …` including `max` (within
/// half a step).
pub fn amplitude_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step).round() as usize;
    (0..=count).map(|i| min + i as f64 * step).collect()
}

/// Grid window of ±`half_steps` steps around the `m`-th resonance.
pub fn resonance_window_grid(g: f64, omega: f64, m: u32, half_steps: usize, step: f64) -> Vec<f64> {
    let centre = m as f64 * omega * omega / (4.0 * g);
    (0..=2 * half_steps)
        .map(|i| centre + (i as f64 - half_steps as f64) * step)
        .collect()
}

fn scan_truncation(params: &ModelParams, initial: InitialState) -> usize {
    let mut extent = phase_space_extent(params);
    if let InitialState::Random { n_cut, .. } = initial {
        // A Fock level N reaches radius ~√(2N+1) in phase space.
        extent += ((2 * n_cut + 1) as f64).sqrt();
    }
    truncation_for_extent(extent)
}

/// Convenience wrapper for a single dynamics trace with the configured
/// drive and initial state.
pub fn dynamics_experiment(
    params: &ModelParams,
    cfg: &NumericsConfig,
    initial: InitialState,
) -> Result<TimeSeries> {
    validated(params, cfg)?;
    let state = make_initial(params, cfg.n_max, initial)?;
    evolve::run_any(params, &state, cfg)
}

/// Long-time mean `M` at every grid amplitude, with peak detection.
///
/// Points are evaluated independently (parallel); the truncation is
/// picked per point unless pinned in `options`. Any convergence-audit
/// failure marks the scan degraded with the offending points listed.
pub fn amplitude_scan(
    params: &ModelParams,
    grid: &[f64],
    t_long: f64,
    initial: InitialState,
    options: &ScanOptions,
) -> Result<ResonanceScan> {
    if grid.len() < 3 {
        return Err(SbmError::InvalidParams("amplitude grid needs ≥ 3 points".to_string()));
    }
    if !grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(SbmError::InvalidParams("amplitude grid must be strictly increasing".to_string()));
    }
    if grid[0] < 0.0 || *grid.last().unwrap() > GRID_MAX {
        return Err(SbmError::InvalidParams(format!(
            "amplitude grid must lie within [0, {GRID_MAX}]"
        )));
    }
    if params.drive.ramp.rise_time != 0.0 {
        return Err(SbmError::UnsupportedRegime(
            "amplitude scans use instantaneous switch-on; see risetime_scan".to_string(),
        ));
    }
    if params.drive.kind == DriveKind::None {
        return Err(SbmError::UnsupportedRegime(
            "amplitude scans need a photon or atom drive axis".to_string(),
        ));
    }
    let means: Vec<f64> = grid
        .par_iter()
        .map(|&amplitude| -> Result<f64> {
            let point = params.with_amplitude(amplitude);
            let n_max = options.n_max.unwrap_or_else(|| scan_truncation(&point, initial));
            let cfg = NumericsConfig {
                n_max,
                dt: options.dt,
                t_end: t_long,
                sample_stride: options.sample_stride,
                ..NumericsConfig::default()
            };
            let state = make_initial(&point, n_max, initial)?;
            let series = evolve::evolve_constant(&point, &state, &cfg)?;
            mean_over_time(&series, t_long)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut degraded = false;
    let mut failed_points = Vec::new();
    if options.audit == AuditMode::Corners {
        for idx in [0, grid.len() - 1] {
            let report = audit_point(params, grid[idx], t_long, initial, options)?;
            if !report.pass {
                degraded = true;
                failed_points.push(idx);
            }
        }
    }

    let peaks = detect_peaks(
        &means,
        grid,
        options.threshold,
        options.peak_floor,
        params.g,
        params.omega,
    )?;
    Ok(ResonanceScan {
        grid: grid.to_vec(),
        means,
        t_long,
        params: *params,
        initial,
        peaks,
        threshold: options.threshold,
        peak_floor: options.peak_floor,
        degraded,
        failed_points,
    })
}

fn audit_point(
    params: &ModelParams,
    amplitude: f64,
    t_long: f64,
    initial: InitialState,
    options: &ScanOptions,
) -> Result<ConvergenceReport> {
    let point = params.with_amplitude(amplitude);
    let n_max = options.n_max.unwrap_or_else(|| scan_truncation(&point, initial));
    let cfg = NumericsConfig {
        n_max,
        dt: options.dt,
        t_end: t_long,
        sample_stride: options.sample_stride,
        ..NumericsConfig::default()
    };
    convergence_check(&point, &cfg, &|n| make_initial(&point, n, initial))
}

/// `|M|` against rise time at the listed resonance indices, fixing
/// `Ωp = mω²/4g` for each.
pub fn risetime_scan(
    params: &ModelParams,
    m_list: &[u32],
    tc_grid: &[f64],
    t_long: f64,
    options: &ScanOptions,
) -> Result<RisetimeScan> {
    if params.g <= 0.0 {
        return Err(SbmError::InvalidParams("rise-time scan needs g > 0".to_string()));
    }
    if params.drive.kind != DriveKind::Photon {
        return Err(SbmError::UnsupportedRegime("rise-time scan drives the photon field".to_string()));
    }
    if !tc_grid.windows(2).all(|w| w[1] > w[0]) || tc_grid.iter().any(|&tc| tc < 0.0) {
        return Err(SbmError::InvalidParams(
            "Tc grid must be strictly increasing and non-negative".to_string(),
        ));
    }
    let magnitudes: Vec<Vec<f64>> = m_list
        .par_iter()
        .map(|&m| -> Result<Vec<f64>> {
            let amplitude = m as f64 * params.omega * params.omega / (4.0 * params.g);
            let point = params.with_amplitude(amplitude);
            let n_max = options.n_max.unwrap_or_else(|| scan_truncation(&point, InitialState::Polaron));
            let bundle = PropagatorBundle::new(&point, amplitude, n_max)?;
            let initial = fock::polaron_superposition(&point, n_max)?;
            tc_grid
                .iter()
                .map(|&tc| -> Result<f64> {
                    let cfg = NumericsConfig {
                        n_max,
                        dt: options.dt,
                        t_end: t_long,
                        sample_stride: options.sample_stride,
                        ..NumericsConfig::default()
                    };
                    let series = if tc == 0.0 {
                        evolve::evolve_constant_with_bundle(&bundle, &initial, &cfg)?
                    } else {
                        let mut ramped = point;
                        ramped.drive.ramp.rise_time = tc;
                        evolve::evolve_ramped_with_bundle(&ramped, &initial, &cfg, &bundle)?
                    };
                    Ok(mean_over_time(&series, t_long)?.abs())
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(RisetimeScan {
        tc_grid: tc_grid.to_vec(),
        m_list: m_list.to_vec(),
        magnitudes,
        t_long,
        params: *params,
    })
}

/// Full pipeline: scan windows around resonances `m` and `m+i`, read
/// the peak means, and invert the resonance formula for `g`.
pub fn coupling_estimation_experiment(
    params: &ModelParams,
    m: u32,
    i: u32,
    grid: &[f64],
    t_long: f64,
    options: &ScanOptions,
) -> Result<CouplingEstimate> {
    if params.drive.kind != DriveKind::Photon || params.epsilon != 0.0 {
        return Err(SbmError::UnsupportedRegime(
            "coupling estimation requires photon drive at ε = 0".to_string(),
        ));
    }
    let scan = amplitude_scan(params, grid, t_long, InitialState::Polaron, options)?;
    let low = scan.peaks.iter().find(|p| p.m == m).copied();
    let high = scan.peaks.iter().find(|p| p.m == m + i).copied();
    let (low, high) = match (low, high) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(SbmError::ExperimentFailed(format!(
                "missing resonance peaks m = {m} and m+i = {} in scan (found {:?})",
                m + i,
                scan.peaks.iter().map(|p| p.m).collect::<Vec<_>>()
            )))
        }
    };
    let g_estimated = analytic::estimate_coupling(low.mean, high.mean, m, i)?;
    Ok(CouplingEstimate {
        g_true: params.g,
        g_estimated,
        relative_error: (g_estimated - params.g).abs() / params.g,
        mean_low: low.mean,
        mean_high: high.mean,
        m,
        i,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriveSpec, DEFAULT_T_END};
    use approx::assert_abs_diff_eq;

    fn photon(g: f64, amplitude: f64) -> ModelParams {
        ModelParams::new(0.0, g, DriveSpec::photon(amplitude))
    }

    #[test]
    fn random_state_deterministic_and_normalized() {
        let a = random_initial_state(42, 5, 64).unwrap();
        let b = random_initial_state(42, 5, 64).unwrap();
        assert_eq!(a.amplitudes, b.amplitudes);
        assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-12);
        let c = random_initial_state(43, 5, 64).unwrap();
        assert_ne!(a.amplitudes, c.amplitudes);
    }

    #[test]
    fn random_state_support_bounded() {
        let state = random_initial_state(7, 5, 64).unwrap();
        for level in 6..32 {
            assert_eq!(state.amplitudes[2 * level], Complex64::ZERO);
            assert_eq!(state.amplitudes[2 * level + 1], Complex64::ZERO);
        }
    }

    #[test]
    fn random_state_needs_room() {
        assert!(random_initial_state(1, 5, 10).is_err());
    }

    #[test]
    fn detect_peaks_fixture() {
        let mut values = vec![0.01; 31];
        values[10] = -0.4;
        values[20] = 0.3;
        let grid: Vec<f64> = (0..31).map(|i| i as f64 * 0.1).collect();
        let peaks = detect_peaks(&values, &grid, 0.25, 0.05, 0.2, 1.0).unwrap();
        assert_eq!(peaks.len(), 2);
        assert_abs_diff_eq!(peaks[0].position, 1.0, epsilon = 1e-12);
        assert_eq!(peaks[0].mean, -0.4);
        assert_abs_diff_eq!(peaks[1].position, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn detect_peaks_monotone_is_empty() {
        let values: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        assert!(detect_peaks(&values, &grid, 0.25, 0.05, 0.2, 1.0).unwrap().is_empty());
    }

    #[test]
    fn detect_peaks_needs_three_points() {
        assert!(detect_peaks(&[1.0, 2.0], &[0.0, 1.0], 0.25, 0.05, 0.2, 1.0).is_err());
    }

    #[test]
    fn amplitude_grid_includes_endpoints() {
        let grid = amplitude_grid(0.0, 4.0, 0.01);
        assert_eq!(grid.len(), 401);
        assert_eq!(grid[0], 0.0);
        assert_abs_diff_eq!(*grid.last().unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn window_grid_centred_on_resonance() {
        let grid = resonance_window_grid(0.2, 1.0, 1, 5, 0.01);
        assert_eq!(grid.len(), 11);
        assert_abs_diff_eq!(grid[5], 1.25, epsilon = 1e-12);
    }

    #[test]
    fn scan_window_finds_first_resonance() {
        let params = photon(0.2, 0.0);
        let grid = resonance_window_grid(0.2, 1.0, 1, 5, 0.01);
        let options = ScanOptions { audit: AuditMode::Off, ..ScanOptions::default() };
        let scan =
            amplitude_scan(&params, &grid, DEFAULT_T_END, InitialState::Polaron, &options).unwrap();
        assert_eq!(scan.peaks.len(), 1);
        let peak = scan.peaks[0];
        assert_abs_diff_eq!(peak.position, 1.25, epsilon = 1e-12);
        assert_eq!(peak.m, 1);
        let predicted = -(-0.08_f64).exp() * analytic::bessel_j(1, 1.0).unwrap();
        assert!((peak.mean - predicted).abs() < 2e-3, "peak mean {} vs {}", peak.mean, predicted);
    }

    #[test]
    fn scan_rejects_bad_grids() {
        let params = photon(0.2, 0.0);
        let options = ScanOptions::default();
        let decreasing = [1.0, 0.5, 0.2];
        assert!(amplitude_scan(&params, &decreasing, 10.0, InitialState::Polaron, &options).is_err());
        let too_far = [4.9, 5.0, 5.2];
        assert!(amplitude_scan(&params, &too_far, 10.0, InitialState::Polaron, &options).is_err());
    }

    #[test]
    fn dynamics_periodicity_distinguishes_resonance() {
        // At Ωp = 1.25 (η = ω) the trace is strictly 2π-periodic; at
        // Ωp = 1.2 the incommensurate Rabi frequency beats against the
        // drive period and the trace visibly fails to repeat.
        let period = 2.0 * std::f64::consts::PI;
        let run = |amplitude: f64| {
            let params = photon(0.2, amplitude);
            // Sample lattice commensurate with the drive period, so the
            // one-period shift lands exactly on a sample.
            let cfg = NumericsConfig {
                dt: period / 6400.0,
                ..NumericsConfig::for_params(&params).with_t_end(4.0 * period)
            };
            dynamics_experiment(&params, &cfg, InitialState::Polaron).unwrap()
        };
        let period_defect = |series: &crate::evolve::TimeSeries| -> f64 {
            let shift = (period / series.spacing()).round() as usize;
            series.sigma_z[..series.len() - shift]
                .iter()
                .zip(series.sigma_z[shift..].iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let resonant = run(1.25);
        let detuned = run(1.2);
        assert!(period_defect(&resonant) < 1e-6);
        assert!(period_defect(&detuned) > 0.1);
        // Rabi period of the detuned trace matches π/0.48.
        assert!((crate::analytic::rabi_period(0.2, 1.0, 1.2).unwrap()
            - std::f64::consts::PI / 0.48)
            .abs()
            < 1e-12);
    }

    #[test]
    fn nonzero_epsilon_trace_stays_physical() {
        // ε = 0.1 at the first resonance: the trace leaves the ε = 0
        // closed form but stays within the physical band |σz| ≤ 1.
        let params = ModelParams::new(0.1, 0.2, DriveSpec::photon(1.25));
        let cfg = NumericsConfig::for_params(&params).with_t_end(20.0);
        let series = dynamics_experiment(&params, &cfg, InitialState::Polaron).unwrap();
        assert!(series.sigma_z.iter().all(|v| v.abs() <= 1.0 + 1e-9));
        let zero_eps = photon(0.2, 1.25);
        let departure = series
            .t
            .iter()
            .zip(series.sigma_z.iter())
            .map(|(&t, &v)| {
                (v - crate::analytic::closed_sigma_z_photon(&zero_eps, t).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(departure > 0.01, "ε = 0.1 should visibly alter the trace");
    }

    #[test]
    fn estimation_fails_without_peaks() {
        // Atom drive produces no resonances, so the experiment reports
        // failure rather than an estimate.
        let params = ModelParams::new(0.0, 0.2, DriveSpec::atom(0.0));
        let grid = amplitude_grid(1.0, 1.5, 0.05);
        let options = ScanOptions { audit: AuditMode::Off, ..ScanOptions::default() };
        let result = coupling_estimation_experiment(&params, 1, 1, &grid, DEFAULT_T_END, &options);
        assert!(matches!(result, Err(SbmError::UnsupportedRegime(_))));

        let photon_params = photon(0.2, 0.0);
        let off_resonance = amplitude_grid(0.4, 0.9, 0.05);
        let result = coupling_estimation_experiment(
            &photon_params,
            1,
            1,
            &off_resonance,
            DEFAULT_T_END,
            &options,
        );
        assert!(matches!(result, Err(SbmError::ExperimentFailed(_))));
    }
}
