//! Physical parameters, drive specification, and numerical configuration.
//!
//! Everything downstream works in dimensionless units: `ω = 1`, time in
//! `1/ω`, rates as ratios to `ω`. [`ModelParams`] is the single source of
//! truth for a run; [`validate`] collects every violated invariant rather
//! than aborting on the first.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbmError};

/// Which operator the constant drive couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveKind {
    /// No external drive; amplitude must be zero.
    None,
    /// Photon-field drive `Ω(a† + a)`.
    Photon,
    /// Atom drive `Ω σx`.
    Atom,
}

/// Linear switch-on profile. `rise_time = 0` means the drive is applied
/// instantaneously at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RampProfile {
    pub rise_time: f64,
}

/// Constant drive of a given kind and nominal amplitude (units of ω),
/// optionally switched on through a linear ramp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub kind: DriveKind,
    pub amplitude: f64,
    #[serde(default)]
    pub ramp: RampProfile,
}

impl DriveSpec {
    pub fn none() -> Self {
        DriveSpec { kind: DriveKind::None, amplitude: 0.0, ramp: RampProfile::default() }
    }

    pub fn photon(amplitude: f64) -> Self {
        DriveSpec { kind: DriveKind::Photon, amplitude, ramp: RampProfile::default() }
    }

    pub fn atom(amplitude: f64) -> Self {
        DriveSpec { kind: DriveKind::Atom, amplitude, ramp: RampProfile::default() }
    }

    pub fn with_rise_time(mut self, rise_time: f64) -> Self {
        self.ramp.rise_time = rise_time;
        self
    }
}

/// Physical parameters of the driven spin-boson model.
///
/// `omega` is fixed to 1 in internal units; it is carried explicitly so
/// formulas read like their textbook counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Photon frequency. Always 1 in internal units.
    pub omega: f64,
    /// Atomic resonant frequency (units of ω, ≥ 0).
    pub epsilon: f64,
    /// Atom-photon coupling (units of ω, ≥ 0).
    pub g: f64,
    pub drive: DriveSpec,
}

impl ModelParams {
    pub fn new(epsilon: f64, g: f64, drive: DriveSpec) -> Self {
        ModelParams { omega: 1.0, epsilon, g, drive }
    }

    /// Same parameters with a different drive amplitude (used by scans).
    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.drive.amplitude = amplitude;
        self
    }
}

/// Quadrature rule identifier for time averaging. Only the composite
/// trapezoidal rule is implemented; the identifier exists so configs
/// remain forward-compatible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    #[default]
    Trapezoid,
}

/// Numerical configuration: truncation, step, horizon, sampling, seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    /// Highest retained photon number.
    pub n_max: usize,
    /// Propagation step (units of 1/ω). Also the observable sampling
    /// spacing when `sample_stride = 1`.
    pub dt: f64,
    /// Final time of the run.
    pub t_end: f64,
    /// Keep one observable sample every this many steps.
    pub sample_stride: usize,
    pub quadrature: Quadrature,
    /// Root RNG seed for runs that draw random states.
    pub seed: u64,
}

/// Default horizon `T_L = 50π/ω`; 25 full drive periods, so whole-period
/// averaging identities hold exactly on the sample lattice.
pub const DEFAULT_T_END: f64 = 50.0 * std::f64::consts::PI;
pub const DEFAULT_DT: f64 = 1e-3;

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            n_max: 1,
            dt: DEFAULT_DT,
            t_end: DEFAULT_T_END,
            sample_stride: 1,
            quadrature: Quadrature::Trapezoid,
            seed: 0,
        }
    }
}

impl NumericsConfig {
    /// Default configuration with the truncation picked by
    /// [`suggested_truncation`].
    pub fn for_params(params: &ModelParams) -> Self {
        NumericsConfig { n_max: suggested_truncation(params), ..Self::default() }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }
}

/// How the initial state of a run is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum InitialState {
    /// Superposition `(|G+⟩ − |G−⟩)/√2` of the two displaced-vacuum
    /// product states. Exact ground-manifold state for ε = 0.
    #[default]
    Polaron,
    /// Numerically exact ground state of the undriven Hamiltonian.
    Ground,
    /// Random low-Fock state, uniform magnitudes and phases on the
    /// `σx` product basis up to `n_cut`.
    Random { seed: u64, n_cut: usize },
}

/// Collect every violated invariant as a human-readable description.
/// Valid inputs return the empty list; validation never aborts.
pub fn validate(params: &ModelParams, cfg: &NumericsConfig) -> Vec<String> {
    let mut violations = Vec::new();
    if params.omega != 1.0 {
        violations.push(format!("omega must be 1 in internal units, got {}", params.omega));
    }
    if !params.epsilon.is_finite() || params.epsilon < 0.0 {
        violations.push(format!("epsilon must be finite and ≥ 0, got {}", params.epsilon));
    }
    if !params.g.is_finite() || params.g < 0.0 {
        violations.push(format!("g must be ≥ 0, got {}", params.g));
    }
    if !params.drive.amplitude.is_finite() || params.drive.amplitude < 0.0 {
        violations.push(format!("drive amplitude must be ≥ 0, got {}", params.drive.amplitude));
    }
    if params.drive.kind == DriveKind::None && params.drive.amplitude != 0.0 {
        violations.push("None drive must have zero amplitude".to_string());
    }
    if !params.drive.ramp.rise_time.is_finite() || params.drive.ramp.rise_time < 0.0 {
        violations.push(format!("rise time must be ≥ 0, got {}", params.drive.ramp.rise_time));
    }
    if cfg.n_max < 1 {
        violations.push("n_max must be ≥ 1".to_string());
    }
    if !cfg.dt.is_finite() || cfg.dt <= 0.0 {
        violations.push(format!("dt must be > 0, got {}", cfg.dt));
    }
    if !cfg.t_end.is_finite() || cfg.t_end <= 0.0 {
        violations.push(format!("t_end must be > 0, got {}", cfg.t_end));
    }
    if cfg.sample_stride < 1 {
        violations.push("sample_stride must be ≥ 1".to_string());
    }
    violations
}

/// Validate and convert violations into an error.
pub fn validated(params: &ModelParams, cfg: &NumericsConfig) -> Result<()> {
    let violations = validate(params, cfg);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SbmError::InvalidParams(violations.join("; ")))
    }
}

/// Instantaneous drive amplitude under the linear ramp:
/// `t·Ω/Tc` for `t < Tc`, the nominal `Ω` for `t ≥ Tc`, and `Ω` at all
/// `t ≥ 0` when `Tc = 0`.
pub fn effective_amplitude(drive: &DriveSpec, t: f64) -> f64 {
    let tc = drive.ramp.rise_time;
    if tc <= 0.0 || t >= tc {
        drive.amplitude
    } else {
        t * drive.amplitude / tc
    }
}

/// Fock truncation adequate for the run.
///
/// The phase-space excursion of the driven coherent branches is bounded
/// by `z = (g + Ω)/ω + Ω/ω` for photon drive (equilibrium displacement
/// plus orbit radius) and by `z = g/ω` otherwise; the retained levels
/// cover the mean photon number `z²` plus a Poisson-tail cushion,
/// `n_max = ⌈z² + 8z + 16⌉ + 1`. Adequacy is enforced by
/// [`crate::evolve::convergence_check`], not by this heuristic.
pub fn suggested_truncation(params: &ModelParams) -> usize {
    let z = phase_space_extent(params);
    truncation_for_extent(z)
}

/// Truncation heuristic for a given phase-space extent `z`.
pub fn truncation_for_extent(z: f64) -> usize {
    let n = (z * z + 8.0 * z + 16.0).ceil() as usize + 1;
    n.max(1)
}

/// Maximal coherent-label magnitude reached during the run.
pub fn phase_space_extent(params: &ModelParams) -> f64 {
    let omega = params.omega;
    match params.drive.kind {
        DriveKind::Photon => {
            (params.g + params.drive.amplitude) / omega + params.drive.amplitude / omega
        }
        DriveKind::Atom | DriveKind::None => params.g / omega,
    }
}

// ---------------------------------------------------------------------------
// JSON configuration document (strict: unknown keys are an error).
// ---------------------------------------------------------------------------

/// Top-level configuration document with keys `model`, `drive`,
/// `numerics`, and an optional `physical` section used only by the CLI
/// unit converter. All fields are in units of ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub model: ModelSection,
    pub drive: DriveSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Accepted only at its internal-units value 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub epsilon: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub kind: DriveKind,
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rise_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<Quadrature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    /// Photon frequency as the ordinary frequency f in GHz (ω = 2π·f).
    pub omega_ghz: f64,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SbmError::Config(e.to_string()))
    }

    /// Resolve into runtime parameter and numerics structs. A missing
    /// `n_max` is filled from [`suggested_truncation`].
    pub fn resolve(&self) -> Result<(ModelParams, NumericsConfig)> {
        if let Some(omega) = self.model.omega {
            if omega != 1.0 {
                return Err(SbmError::Config(format!(
                    "model.omega must be 1 (internal units); got {omega}"
                )));
            }
        }
        let drive = DriveSpec {
            kind: self.drive.kind,
            amplitude: self.drive.amplitude,
            ramp: RampProfile { rise_time: self.drive.rise_time.unwrap_or(0.0) },
        };
        let params = ModelParams::new(self.model.epsilon, self.model.g, drive);
        let n = &self.numerics;
        let cfg = NumericsConfig {
            n_max: n.n_max.unwrap_or_else(|| suggested_truncation(&params)),
            dt: n.dt.unwrap_or(DEFAULT_DT),
            t_end: n.t_end.unwrap_or(DEFAULT_T_END),
            sample_stride: n.sample_stride.unwrap_or(1),
            quadrature: n.quadrature.unwrap_or_default(),
            seed: n.seed.unwrap_or(0),
        };
        validated(&params, &cfg)?;
        Ok((params, cfg))
    }

    /// Reconstruct the fully explicit document for a resolved run, as
    /// recorded in manifests.
    pub fn from_resolved(params: &ModelParams, cfg: &NumericsConfig) -> Self {
        ConfigDocument {
            model: ModelSection {
                omega: Some(params.omega),
                epsilon: params.epsilon,
                g: params.g,
            },
            drive: DriveSection {
                kind: params.drive.kind,
                amplitude: params.drive.amplitude,
                rise_time: Some(params.drive.ramp.rise_time),
            },
            numerics: NumericsSection {
                n_max: Some(cfg.n_max),
                dt: Some(cfg.dt),
                t_end: Some(cfg.t_end),
                sample_stride: Some(cfg.sample_stride),
                quadrature: Some(cfg.quadrature),
                seed: Some(cfg.seed),
            },
            physical: None,
        }
    }
}
