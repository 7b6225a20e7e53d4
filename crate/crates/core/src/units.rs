//! Conversion between physical quantities and the dimensionless variables
//! used by the rest of the crate.
//!
//! Lengths are rescaled by the initial packet width `a`, times by
//! `m a^2 / hbar`. After the rescaling the model depends only on the
//! dimensionless detector radius `d`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Reduced Planck constant, J s (CODATA 2018).
pub const HBAR: f64 = 1.054571817e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;
/// Electron mass, kg (CODATA 2018).
pub const ELECTRON_MASS: f64 = 9.1093837015e-31;

/// Physical description of the experiment in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Particle mass, kg.
    pub mass: f64,
    /// Initial packet width `a`, m.
    pub packet_width_a: f64,
    /// Detector radius, m.
    pub detector_radius_d: f64,
    /// Reduced Planck constant, J s. Overridable so natural-unit setups
    /// (`hbar = 1`) go through the same code path.
    pub hbar: f64,
}

impl PhysicalConfig {
    /// Build a configuration with the CODATA `hbar`.
    pub fn new(mass: f64, packet_width_a: f64, detector_radius_d: f64) -> Result<Self> {
        Self::with_hbar(mass, packet_width_a, detector_radius_d, HBAR)
    }

    /// Build a configuration with an explicit `hbar`.
    pub fn with_hbar(
        mass: f64,
        packet_width_a: f64,
        detector_radius_d: f64,
        hbar: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("mass", mass),
            ("packet_width_a", packet_width_a),
            ("detector_radius_d", detector_radius_d),
            ("hbar", hbar),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            mass,
            packet_width_a,
            detector_radius_d,
            hbar,
        })
    }

    /// Characteristic time scale `m a^2 / hbar`, s.
    pub fn time_scale(&self) -> f64 {
        self.mass * self.packet_width_a * self.packet_width_a / self.hbar
    }
}

/// The single model parameter left after nondimensionalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessConfig {
    /// Detector radius in units of the packet width `a`.
    pub d: f64,
}

impl DimensionlessConfig {
    pub fn new(d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::domain(format!(
                "detector radius d must be positive and finite, got {d}"
            )));
        }
        Ok(Self { d })
    }
}

/// Map a physical time and radius to dimensionless variables.
///
/// Returns `(config, t, r)` with `r = r_phys / a`, `d = d_phys / a` and
/// `t = hbar t_phys / (m a^2)`.
pub fn to_dimensionless(
    p: &PhysicalConfig,
    t_phys: f64,
    r_phys: f64,
) -> Result<(DimensionlessConfig, f64, f64)> {
    if !(t_phys.is_finite() && t_phys >= 0.0) {
        return Err(Error::domain(format!(
            "t_phys must be nonnegative and finite, got {t_phys}"
        )));
    }
    if !(r_phys.is_finite() && r_phys >= 0.0) {
        return Err(Error::domain(format!(
            "r_phys must be nonnegative and finite, got {r_phys}"
        )));
    }
    let config = DimensionlessConfig::new(p.detector_radius_d / p.packet_width_a)?;
    let t = t_phys / p.time_scale();
    let r = r_phys / p.packet_width_a;
    Ok((config, t, r))
}

/// Inverse of [`to_dimensionless`] for times: `t_phys = t m a^2 / hbar`.
pub fn to_physical(p: &PhysicalConfig, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!(
            "dimensionless t must be nonnegative and finite, got {t}"
        )));
    }
    Ok(t * p.time_scale())
}

/// Asymptotic radial velocity (m/s) of the trajectory that starts at
/// dimensionless radius `r0`: `v_inf = hbar r0 / (m a)`.
///
/// Free Bohmian trajectories approach a constant radial velocity
/// proportional to their initial radius, so particles starting far enough
/// out exceed any given speed; see [`superluminal_threshold`].
pub fn asymptotic_velocity_physical(p: &PhysicalConfig, r0: f64) -> Result<f64> {
    if !(r0.is_finite() && r0 >= 0.0) {
        return Err(Error::domain(format!(
            "r0 must be nonnegative and finite, got {r0}"
        )));
    }
    Ok(p.hbar * r0 / (p.mass * p.packet_width_a))
}

/// Dimensionless initial radius beyond which the asymptotic velocity
/// exceeds the speed of light: `r0* = a / lambda_c` with the reduced
/// Compton wavelength `lambda_c = hbar / (m c)`. In physical units the
/// threshold radius is `a^2 / lambda_c`.
///
/// The guidance law is Galilei covariant, not Lorentz covariant, so this
/// is a consistency boundary of the nonrelativistic model rather than a
/// prediction.
pub fn superluminal_threshold(p: &PhysicalConfig) -> f64 {
    let lambda_c = p.hbar / (p.mass * SPEED_OF_LIGHT);
    p.packet_width_a / lambda_c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(a: f64, d: f64) -> PhysicalConfig {
        PhysicalConfig::with_hbar(1.0, a, d, 1.0).unwrap()
    }

    #[test]
    fn identity_scaling() {
        let p = natural(1.0, 1.0);
        let (cfg, t, r) = to_dimensionless(&p, 5.0, 2.0).unwrap();
        assert_eq!(cfg.d, 1.0);
        assert_eq!(t, 5.0);
        assert_eq!(r, 2.0);
    }

    #[test]
    fn linear_scaling_in_a() {
        let p = natural(2.0, 1.0);
        let (cfg, _, r) = to_dimensionless(&p, 0.0, 1.0).unwrap();
        assert_eq!(cfg.d, 0.5);
        assert_eq!(r, 0.5);
    }

    #[test]
    fn doubling_a_halves_d() {
        let p1 = natural(1.0, 3.0);
        let p2 = natural(2.0, 3.0);
        let (c1, _, _) = to_dimensionless(&p1, 0.0, 0.0).unwrap();
        let (c2, _, _) = to_dimensionless(&p2, 0.0, 0.0).unwrap();
        assert_eq!(c2.d, c1.d / 2.0);
    }

    #[test]
    fn electron_time_scale() {
        // hbar t_phys / (m a^2) for the stated inputs, reference value
        // computed at 50-digit precision.
        let p =
            PhysicalConfig::with_hbar(9.109e-31, 1e-9, 1e-9, 1.0546e-34).unwrap();
        let (_, t, _) = to_dimensionless(&p, 1e-15, 0.0).unwrap();
        let reference = 0.11577560654297947;
        assert!((t - reference).abs() / reference < 1e-14);
    }

    #[test]
    fn to_physical_inverts() {
        let p = PhysicalConfig::new(ELECTRON_MASS, 1e-9, 2e-9).unwrap();
        assert_eq!(to_physical(&p, 0.0).unwrap(), 0.0);
        let (_, t, _) = to_dimensionless(&p, 3.7e-12, 0.0).unwrap();
        let back = to_physical(&p, t).unwrap();
        assert!((back - 3.7e-12).abs() / 3.7e-12 < 1e-14);
    }

    #[test]
    fn natural_units_time_is_identity() {
        let p = natural(1.0, 1.0);
        assert_eq!(to_physical(&p, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn asymptotic_velocity_examples() {
        let p = natural(1.0, 1.0);
        assert_eq!(asymptotic_velocity_physical(&p, 0.0).unwrap(), 0.0);
        assert_eq!(asymptotic_velocity_physical(&p, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn threshold_velocity_is_light_speed() {
        // electron, a = 1 nm: v_inf at the threshold radius equals c.
        let p = PhysicalConfig::new(ELECTRON_MASS, 1e-9, 1e-9).unwrap();
        let r0_star = superluminal_threshold(&p);
        let v = asymptotic_velocity_physical(&p, r0_star).unwrap();
        assert!((v - SPEED_OF_LIGHT).abs() / SPEED_OF_LIGHT < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(PhysicalConfig::new(-1.0, 1.0, 1.0).is_err());
        assert!(PhysicalConfig::new(1.0, 0.0, 1.0).is_err());
        assert!(PhysicalConfig::new(1.0, 1.0, f64::NAN).is_err());
        assert!(DimensionlessConfig::new(0.0).is_err());
    }
}
