//! Physical-unit conversions for the flux-qubit platform preset.
//!
//! Frequencies are quoted in the `2π×f` convention: a flag value of
//! `2.782` means `ω = 2π × 2.782 GHz`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbmError};

/// Published reference values for the flux-qubit platform; the report
/// flags wherever this artifact's arithmetic disagrees with them.
pub const REFERENCE_T_LONG_NS: f64 = 11.0;
pub const REFERENCE_T_DECOHERENCE_NS: f64 = 64.0;

/// Preset: flux-based circuit QED platform numbers.
pub const FLUX_QUBIT_OMEGA_GHZ: f64 = 2.782;
pub const FLUX_QUBIT_G_GHZ: f64 = 0.314;
pub const FLUX_QUBIT_KAPPA_MHZ: f64 = 2.5;

/// Fractional disagreement above which a value is flagged.
const FLAG_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitReport {
    pub omega_ghz: f64,
    /// `T_L = 50π/ω = 25/f` in nanoseconds.
    pub t_long_ns: f64,
    pub t_long_reference_ns: f64,
    pub t_long_agrees: bool,
    pub t_decoherence_ns: Option<f64>,
    pub t_decoherence_reference_ns: f64,
    pub t_decoherence_agrees: Option<bool>,
    /// Coupling ratio `g/ω`.
    pub g_ratio: Option<f64>,
    /// Horizon fits inside the decoherence window.
    pub within_decoherence: Option<bool>,
}

/// Physical times for the averaging horizon and the decoherence
/// comparison, plus the coupling ratio when `g` is supplied.
pub fn convert_units(
    omega_ghz: f64,
    g_ghz: Option<f64>,
    kappa_mhz: Option<f64>,
) -> Result<UnitReport> {
    if omega_ghz.is_nan() || omega_ghz <= 0.0 {
        return Err(SbmError::InvalidParams(format!(
            "photon frequency must be positive, got {omega_ghz} GHz"
        )));
    }
    // T_L = 50π/ω with ω = 2π·f → 25/f; f in GHz gives nanoseconds.
    let t_long_ns = 25.0 / omega_ghz;
    let t_decoherence_ns = kappa_mhz.map(|kappa| {
        // t_D = 1/κ with κ = 2π × kappa MHz.
        1e3 / (2.0 * std::f64::consts::PI * kappa)
    });
    let agrees = |value: f64, reference: f64| (value - reference).abs() / reference <= FLAG_TOLERANCE;
    Ok(UnitReport {
        omega_ghz,
        t_long_ns,
        t_long_reference_ns: REFERENCE_T_LONG_NS,
        t_long_agrees: agrees(t_long_ns, REFERENCE_T_LONG_NS),
        t_decoherence_ns,
        t_decoherence_reference_ns: REFERENCE_T_DECOHERENCE_NS,
        t_decoherence_agrees: t_decoherence_ns.map(|t| agrees(t, REFERENCE_T_DECOHERENCE_NS)),
        g_ratio: g_ghz.map(|g| g / omega_ghz),
        within_decoherence: t_decoherence_ns.map(|t| t_long_ns < t),
    })
}

impl UnitReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("omega            = 2π × {} GHz\n", self.omega_ghz));
        out.push_str(&format!(
            "T_L = 50π/omega  = {:.4} ns   (reference {} ns{})\n",
            self.t_long_ns,
            self.t_long_reference_ns,
            if self.t_long_agrees { "" } else { " — DISAGREES with this arithmetic" }
        ));
        if let Some(t_d) = self.t_decoherence_ns {
            out.push_str(&format!(
                "t_D = 1/kappa    = {:.4} ns   (reference {} ns{})\n",
                t_d,
                self.t_decoherence_reference_ns,
                if self.t_decoherence_agrees == Some(true) {
                    ""
                } else {
                    " — DISAGREES with this arithmetic"
                }
            ));
            out.push_str(&format!(
                "T_L within decoherence window: {}\n",
                if self.within_decoherence == Some(true) { "yes" } else { "no" }
            ));
        }
        if let Some(ratio) = self.g_ratio {
            out.push_str(&format!("g/omega          = {ratio:.4}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn flux_qubit_platform_numbers() {
        let report = convert_units(
            FLUX_QUBIT_OMEGA_GHZ,
            Some(FLUX_QUBIT_G_GHZ),
            Some(FLUX_QUBIT_KAPPA_MHZ),
        )
        .unwrap();
        // 25/2.782 = 8.986 ns; the published 11 ns is flagged.
        assert_abs_diff_eq!(report.t_long_ns, 8.986, epsilon = 1e-3);
        assert!(!report.t_long_agrees);
        // 1/(2π × 2.5 MHz) = 63.66 ns agrees with the published 64 ns.
        assert_abs_diff_eq!(report.t_decoherence_ns.unwrap(), 63.662, epsilon = 1e-3);
        assert_eq!(report.t_decoherence_agrees, Some(true));
        // g/ω ≈ 0.113.
        assert_abs_diff_eq!(report.g_ratio.unwrap(), 0.1129, epsilon = 1e-4);
        assert_eq!(report.within_decoherence, Some(true));
    }

    #[test]
    fn rejects_nonpositive_frequency() {
        assert!(convert_units(0.0, None, None).is_err());
        assert!(convert_units(-1.0, None, None).is_err());
    }
}
