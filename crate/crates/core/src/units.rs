//! Physical constants and the quark-model scale estimates.
//!
//! Everything else in this crate works in natural units (ħ = 1, c = 1);
//! the MeV·fm bookkeeping lives here and nowhere else.

use serde::Serialize;

use crate::error::{Error, Result};

/// ℏc — reduced Planck constant × speed of light (MeV·fm), CODATA 2018.
pub const HBAR_C: f64 = 197.3269804;

/// β threshold above which a nonrelativistic treatment is flagged as questionable.
pub const BETA_QUESTIONABLE: f64 = 0.3;

/// Uncertainty-principle scale estimate for a quark confined inside a hadron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarkReport {
    /// Confinement radius (fm).
    pub radius: f64,
    /// Confinement momentum p ≈ ħ/r (MeV/c).
    pub momentum: f64,
    /// v/c for the current-quark mass.
    pub beta_current: f64,
    /// v/c for the constituent-quark mass.
    pub beta_constituent: f64,
    /// True when even the constituent mass moves relativistically.
    pub nonrelativistic_questionable: bool,
}

/// Confinement momentum from the uncertainty principle: p = ħc / r (MeV/c for r in fm).
pub fn momentum_for_confinement(radius_fm: f64) -> Result<f64> {
    if !(radius_fm > 0.0) {
        return Err(Error::Domain(format!(
            "confinement radius must be positive, got {radius_fm}"
        )));
    }
    Ok(HBAR_C / radius_fm)
}

/// v/c of a particle with momentum `p` and mass `m` (both in MeV): p / √(p² + m²).
pub fn relativistic_beta(p: f64, m: f64) -> Result<f64> {
    if p < 0.0 || m < 0.0 {
        return Err(Error::Domain(format!("p and m must be non-negative, got p={p}, m={m}")));
    }
    if p == 0.0 && m == 0.0 {
        return Err(Error::Domain("p = m = 0 has no defined velocity".into()));
    }
    Ok(p / (p * p + m * m).sqrt())
}

/// Full scale estimate for a quark of the given masses confined to `radius_fm`.
pub fn quark_report(radius_fm: f64, current_mass: f64, constituent_mass: f64) -> Result<QuarkReport> {
    let momentum = momentum_for_confinement(radius_fm)?;
    let beta_current = relativistic_beta(momentum, current_mass)?;
    let beta_constituent = relativistic_beta(momentum, constituent_mass)?;
    Ok(QuarkReport {
        radius: radius_fm,
        momentum,
        beta_current,
        beta_constituent,
        nonrelativistic_questionable: beta_constituent > BETA_QUESTIONABLE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_fermi_momentum() {
        let p = momentum_for_confinement(1.0).unwrap();
        assert_eq!(p, HBAR_C);
        // "about 200 MeV"
        assert!((p - 200.0).abs() / 200.0 < 0.05);
    }

    #[test]
    fn momentum_scales_inversely_with_radius() {
        assert_relative_eq!(momentum_for_confinement(2.0).unwrap(), 98.6634902, max_relative = 1e-12);
    }

    #[test]
    fn bad_radius_rejected() {
        assert!(momentum_for_confinement(0.0).is_err());
        assert!(momentum_for_confinement(-1.0).is_err());
    }

    #[test]
    fn beta_values() {
        assert_eq!(relativistic_beta(0.0, 300.0).unwrap(), 0.0);
        // direct evaluation of p/sqrt(p^2+m^2)
        assert_relative_eq!(
            relativistic_beta(HBAR_C, 300.0).unwrap(),
            0.549_535_953,
            epsilon = 1e-5
        );
        assert_relative_eq!(relativistic_beta(HBAR_C, 10.0).unwrap(), 0.998_718, epsilon = 1e-5);
        assert!(relativistic_beta(0.0, 0.0).is_err());
    }

    #[test]
    fn default_quark_report_flags_relativity() {
        let r = quark_report(1.0, 10.0, 300.0).unwrap();
        assert_relative_eq!(r.momentum, 197.33, epsilon = 0.01);
        assert_relative_eq!(r.beta_constituent, 0.5495, epsilon = 1e-3);
        assert!(r.beta_current >= r.beta_constituent);
        assert!(r.nonrelativistic_questionable);
    }

    #[test]
    fn huge_box_is_nonrelativistic() {
        let r = quark_report(1e6, 10.0, 300.0).unwrap();
        assert_relative_eq!(r.momentum, 1.973269804e-4, max_relative = 1e-12);
        assert!(!r.nonrelativistic_questionable);
    }

    #[test]
    fn momentum_radius_product_is_hbar_c() {
        for &r in &[1e-3, 0.5, 1.0, 7.3, 1e4] {
            let p = momentum_for_confinement(r).unwrap();
            assert_relative_eq!(p * r, HBAR_C, max_relative = 1e-12);
        }
    }
}
