//! Closed-form model of the experiment: wave function, Bohmian velocity
//! field, exact trajectories, passage-time maps and the resulting
//! distributions.
//!
//! All quantities are dimensionless (see [`crate::units`]). The initial
//! state is the isotropic Gaussian `psi_0(r) = pi^{-3/4} e^{-r^2/2}`, which
//! spreads with width `sigma(t) = sqrt(1 + t^2)`; every trajectory moves
//! radially outward along `R(t) = R_0 sqrt(1 + t^2)`, so the first crossing
//! of the detector sphere `r = d` is known in closed form and the whole
//! passage-time statistics reduces to one parameter, `d`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::{self, erfc};
use crate::{Error, Result, Vec3};

const SQRT_PI: f64 = 1.7724538509055160273;
const FRAC_PI_POW_3_4: f64 = 0.42377720812375763; // pi^{-3/4}

/// Outcome of asking when a trajectory first reaches the detector sphere.
///
/// `Crossed { tau: 0 }` occurs exactly when the trajectory starts on the
/// sphere; starting outside it never crosses (the flow is radially
/// outward), and numerical runs truncated at `t_max` are `Censored`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PassageOutcome {
    Crossed { tau: f64 },
    NeverCrosses,
    Censored { t_max: f64 },
}

impl PassageOutcome {
    pub fn tau(&self) -> Option<f64> {
        match self {
            PassageOutcome::Crossed { tau } => Some(*tau),
            _ => None,
        }
    }

    pub fn is_crossed(&self) -> bool {
        matches!(self, PassageOutcome::Crossed { .. })
    }
}

/// Parameters of the reciprocal-passage-time distribution: the detector
/// radius and the weight `alpha(d)` of its atom at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuDistributionParams {
    pub d: f64,
    pub alpha: f64,
}

impl NuDistributionParams {
    pub fn new(d: f64) -> Self {
        Self { d, alpha: alpha(d) }
    }
}

/// Freely evolved wave function at radius `r` and time `t`:
/// `psi(r, t) = exp(-r^2 / (2 (1 + i t))) / (sqrt(pi) (1 + i t))^{3/2}`,
/// principal branch of the complex power.
pub fn psi(r: f64, t: f64) -> Complex64 {
    debug_assert!(r >= 0.0 && t >= 0.0);
    let z = Complex64::new(1.0, t);
    (Complex64::new(-r * r / 2.0, 0.0) / z).exp() * z.powf(-1.5) * FRAC_PI_POW_3_4
}

/// Bohmian velocity field of the spreading Gaussian: radial, with
/// magnitude `t r / (1 + t^2)`.
pub fn bohm_velocity(position: &Vec3, t: f64) -> Vec3 {
    position * (t / (1.0 + t * t))
}

/// Radial coordinate of the trajectory starting at `r0 > 0`:
/// `R(t) = r0 sqrt(1 + t^2)`. The angles stay constant, so the particle
/// moves outward on a straight line and `R(t)/t -> r0` as `t -> inf`.
pub fn trajectory_radius(r0: f64, t: f64) -> Result<f64> {
    if !(r0.is_finite() && r0 > 0.0) {
        // r0 = 0 cannot satisfy the initial condition of the radial equation
        return Err(Error::domain(format!(
            "trajectory_radius: r0 must be positive, got {r0}"
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!(
            "trajectory_radius: t must be nonnegative, got {t}"
        )));
    }
    Ok(r0 * (1.0 + t * t).sqrt())
}

/// First passage time through the sphere `r = d` of the trajectory
/// starting at radius `r0`; `sqrt((d/r0)^2 - 1)` inside, never outside.
pub fn passage_time(r0: f64, d: f64) -> Result<PassageOutcome> {
    check_r0_d(r0, d)?;
    if r0 < d {
        // (d/r0)^2 - 1 written as a product to stay accurate near r0 = d
        let tau = ((d - r0) * (d + r0)).sqrt() / r0;
        Ok(PassageOutcome::Crossed { tau })
    } else if r0 == d {
        Ok(PassageOutcome::Crossed { tau: 0.0 })
    } else {
        Ok(PassageOutcome::NeverCrosses)
    }
}

/// Reciprocal passage time `nu = 1/tau`, the better-behaved statistic:
/// zero for trajectories that never cross. `r0 = d` would make `nu`
/// unbounded and is reported as [`Error::UnboundedReciprocal`] instead of
/// an IEEE infinity (the event has probability zero under the sampler).
pub fn reciprocal_passage_time(r0: f64, d: f64) -> Result<f64> {
    check_r0_d(r0, d)?;
    if r0 < d {
        Ok(r0 / ((d - r0) * (d + r0)).sqrt())
    } else if r0 > d {
        Ok(0.0)
    } else {
        Err(Error::UnboundedReciprocal)
    }
}

fn check_r0_d(r0: f64, d: f64) -> Result<()> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::domain(format!("r0 must be positive, got {r0}")));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::domain(format!("d must be positive, got {d}")));
    }
    Ok(())
}

/// Probability that the initial position lies outside the detector:
/// `alpha(d) = (2 d / sqrt(pi)) e^{-d^2} + erfc(d)`. Monotone decreasing
/// from 1 at `d = 0` and the weight of the atom at `nu = 0`.
pub fn alpha(d: f64) -> f64 {
    assert!(d.is_finite() && d >= 0.0, "alpha: d must be >= 0, got {d}");
    2.0 * d / SQRT_PI * special::exp_neg_x_squared(d) + erfc(d).expect("d is finite")
}

/// Continuous part of the reciprocal-passage-time distribution:
/// `(4 d^3 / sqrt(pi)) nu^2 (1 + nu^2)^{-5/2} exp(-nu^2 d^2 / (1 + nu^2))`.
///
/// Grows like `nu^2` near zero and falls off like
/// `(4 d^3 / sqrt(pi)) e^{-d^2} / nu^3`, so the distribution is heavy
/// tailed: the mean exists but no higher moment does.
pub fn lambda_continuous(nu: f64, d: f64) -> f64 {
    assert!(nu.is_finite() && nu >= 0.0, "lambda: nu must be >= 0");
    assert!(d.is_finite() && d > 0.0, "lambda: d must be > 0");
    let nu2 = nu * nu;
    let one_plus = 1.0 + nu2;
    4.0 * d.powi(3) / SQRT_PI * nu2 * one_plus.powf(-2.5) * (-nu2 * d * d / one_plus).exp()
}

/// CDF of the initial radial Born distribution `(4/sqrt(pi)) R^2 e^{-R^2}`:
/// `F_R(x) = erf(x) - (2 x / sqrt(pi)) e^{-x^2}`.
pub fn radial_born_cdf(x: f64) -> f64 {
    assert!(x.is_finite() && x >= 0.0, "radial_born_cdf: x must be >= 0");
    if x < 0.5 {
        // alternating series 4/sqrt(pi) (x^3/3 - x^5/5 + x^7/14 - ...),
        // avoids the erf-minus-density cancellation at small x
        let x2 = x * x;
        let mut term = x * x2; // n x^{2n+1}/n! at n = 1
        let mut sum = term / 3.0;
        let mut n = 1u32;
        loop {
            n += 1;
            term *= -x2 / (n - 1) as f64;
            let contribution = term / (2 * n + 1) as f64;
            sum += contribution;
            if contribution.abs() <= sum.abs() * 1e-17 {
                break;
            }
        }
        4.0 / SQRT_PI * sum
    } else {
        special::erf(x).expect("x is finite")
            - 2.0 * x / SQRT_PI * special::exp_neg_x_squared(x)
    }
}

/// CDF of the reciprocal passage time when the initial position is
/// Born-distributed: `P(nu <= v) = alpha(d) + F_R(d v / sqrt(1 + v^2))`.
/// Right-continuous, jumps by `alpha(d)` at zero and tends to 1.
pub fn nu_cdf(v: f64, d: f64) -> f64 {
    assert!(v.is_finite() && v >= 0.0, "nu_cdf: v must be >= 0");
    assert!(d.is_finite() && d > 0.0, "nu_cdf: d must be > 0");
    alpha(d) + radial_born_cdf(d * v / (1.0 + v * v).sqrt())
}

/// Continuous part of the passage-time density, by the change of
/// variables `nu = 1/tau`: `Pi_cont(tau) = Lambda_cont(1/tau) / tau^2`.
///
/// The distribution of `tau` is defective: the never-crossing mass
/// `alpha(d)` sits at `tau = inf` and is reported separately (via
/// [`alpha`]) rather than folded into a density value.
pub fn pi_tau_continuous(tau: f64, d: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!(
            "pi_tau_continuous: tau must be positive, got {tau}"
        )));
    }
    Ok(lambda_continuous(1.0 / tau, d) / (tau * tau))
}

/// Mean reciprocal passage time
/// `<nu> = (8 d^3 / (3 sqrt(pi))) e^{-d^2} 1F1(1/2; 5/2; d^2)`,
/// evaluated through the scaled hypergeometric so that large `d` (where
/// `1F1` alone overflows) stays finite. Vanishes at `d = 0` and decays
/// like `2 / (sqrt(pi) d)` for large `d`.
pub fn mean_nu(d: f64) -> f64 {
    assert!(d.is_finite() && d >= 0.0, "mean_nu: d must be >= 0");
    let scaled = special::hyp1f1_scaled(0.5, 2.5, d * d)
        .expect("parameters are valid")
        .value_scaled;
    8.0 * d.powi(3) / (3.0 * SQRT_PI) * scaled
}
