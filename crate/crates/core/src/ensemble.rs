//! Reproducible Born-rule Monte-Carlo over initial positions.
//!
//! Initial positions are drawn from `|psi_0|^2 = pi^{-3/2} e^{-r^2}`, i.e.
//! each Cartesian coordinate is an independent Gaussian with variance 1/2.
//! Every sample owns its own counter-based RNG stream keyed by
//! `(seed, sample index)`, so the ensemble is bit-identical for a fixed
//! seed no matter how many worker threads map over it.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, PassageOutcome};
use crate::trajectory::{self, IntegratorConfig};
use crate::{Error, Result, Vec3};

/// How the per-sample passage time is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// Closed-form map from the initial radius; never censors.
    Analytic,
    /// Guidance-law integration of the analytic velocity field; runs that
    /// reach `t_max` without crossing are censored.
    Numeric,
}

impl std::fmt::Display for EnsembleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnsembleMode::Analytic => write!(f, "analytic"),
            EnsembleMode::Numeric => write!(f, "numeric"),
        }
    }
}

/// Configuration of one ensemble run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub mode: EnsembleMode,
    /// Dimensionless detector radius.
    pub d: f64,
    /// Integrator settings, used in numeric mode.
    pub integrator: IntegratorConfig,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::domain("n_samples must be >= 1".to_string()));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::domain(format!("d must be positive, got {}", self.d)));
        }
        self.integrator.validate()
    }
}

/// Reciprocal passage times of one run. `nu_samples` keeps sample order
/// (censored samples are skipped); zero entries encode never-crossing,
/// which is the true value of the reciprocal there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub nu_samples: Vec<f64>,
    pub crossed_count: usize,
    pub never_count: usize,
    pub censored_count: usize,
}

impl EnsembleResult {
    pub fn n_total(&self) -> usize {
        self.crossed_count + self.never_count + self.censored_count
    }
}

/// Initial position of sample `index` under `seed`: three independent
/// N(0, 1/2) coordinates from the sample's own ChaCha stream, via a
/// Box-Muller transform. Deterministic and independent of any other sample.
pub fn initial_position(seed: u64, index: u64) -> Vec3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let u1 = unit_open_closed(rng.next_u64());
    let u2 = unit_open_closed(rng.next_u64());
    let u3 = unit_open_closed(rng.next_u64());
    let u4 = unit_open_closed(rng.next_u64());
    let r1 = (-2.0 * u1.ln()).sqrt();
    let r2 = (-2.0 * u3.ln()).sqrt();
    let (s1, c1) = (std::f64::consts::TAU * u2).sin_cos();
    let (_, c2) = (std::f64::consts::TAU * u4).sin_cos();
    // coordinate standard deviation of |psi_0|^2 is 1/sqrt(2)
    std::f64::consts::FRAC_1_SQRT_2 * Vec3::new(r1 * c1, r1 * s1, r2 * c2)
}

/// Map a raw 64-bit word to the half-open interval (0, 1].
fn unit_open_closed(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
}

/// Draw `n` i.i.d. Born-distributed initial positions.
pub fn sample_initial_positions(n: usize, seed: u64) -> Vec<Vec3> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| initial_position(seed, i))
        .collect()
}

/// Run the full ensemble. The result is a pure function of `cfg`; worker
/// count affects only wall time. Per-sample failures are tagged with the
/// sample index.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let outcomes: Vec<Option<f64>> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            sample_nu(cfg, i).map_err(|e| Error::Sample {
                index: i as usize,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut nu_samples = Vec::with_capacity(cfg.n_samples);
    let mut crossed = 0usize;
    let mut never = 0usize;
    let mut censored = 0usize;
    for outcome in outcomes {
        match outcome {
            Some(nu) if nu > 0.0 => {
                crossed += 1;
                nu_samples.push(nu);
            }
            Some(_) => {
                never += 1;
                nu_samples.push(0.0);
            }
            None => censored += 1,
        }
    }
    Ok(EnsembleResult {
        nu_samples,
        crossed_count: crossed,
        never_count: never,
        censored_count: censored,
    })
}

/// `Some(nu)` for resolved samples, `None` for censored numeric runs whose
/// true reciprocal is positive but unknown.
fn sample_nu(cfg: &EnsembleConfig, index: u64) -> Result<Option<f64>> {
    let position = initial_position(cfg.seed, index);
    match cfg.mode {
        EnsembleMode::Analytic => {
            analytic::reciprocal_passage_time(position.norm(), cfg.d).map(Some)
        }
        EnsembleMode::Numeric => {
            let record = trajectory::integrate_trajectory(
                position,
                |p, t| analytic::bohm_velocity(p, t),
                &cfg.integrator,
                cfg.d,
            )?;
            match record.terminal {
                PassageOutcome::Crossed { tau } if tau > 0.0 => Ok(Some(1.0 / tau)),
                PassageOutcome::Crossed { .. } => Err(Error::UnboundedReciprocal),
                PassageOutcome::NeverCrosses => Ok(Some(0.0)),
                PassageOutcome::Censored { .. } => Ok(None),
            }
        }
    }
}

/// JSON-ready summary of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub d: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub mode: EnsembleMode,
    pub counts: EnsembleCounts,
    pub alpha_analytic: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleCounts {
    pub crossed: usize,
    pub never_crossed: usize,
    pub censored: usize,
}

pub fn summarize(cfg: &EnsembleConfig, result: &EnsembleResult) -> EnsembleSummary {
    EnsembleSummary {
        d: cfg.d,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        mode: cfg.mode,
        counts: EnsembleCounts {
            crossed: result.crossed_count,
            never_crossed: result.never_count,
            censored: result.censored_count,
        },
        alpha_analytic: analytic::alpha(cfg.d),
    }
}

/// Write the reciprocal passage times as a one-column CSV, sorted
/// ascending so the file is independent of reduction order.
pub fn write_samples_csv<W: std::io::Write>(
    result: &EnsembleResult,
    writer: &mut W,
) -> std::io::Result<()> {
    let mut sorted = result.nu_samples.clone();
    sorted.sort_by(f64::total_cmp);
    writeln!(writer, "nu")?;
    for nu in sorted {
        writeln!(writer, "{nu:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_is_bit_identical() {
        let a = sample_initial_positions(500, 42);
        let b = sample_initial_positions(500, 42);
        assert_eq!(a, b);
        let c = sample_initial_positions(500, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn streams_do_not_depend_on_batch_size() {
        let long = sample_initial_positions(100, 7);
        let short = sample_initial_positions(10, 7);
        assert_eq!(&long[..10], &short[..]);
    }

    #[test]
    fn single_sample_outcome_matches_its_branch() {
        let cfg = EnsembleConfig {
            n_samples: 1,
            seed: 11,
            mode: EnsembleMode::Analytic,
            d: 2.0,
            integrator: IntegratorConfig::default(),
        };
        let result = run_ensemble(&cfg).unwrap();
        assert_eq!(result.n_total(), 1);
        let r0 = initial_position(11, 0).norm();
        let expected = analytic::reciprocal_passage_time(r0, 2.0).unwrap();
        assert_eq!(result.nu_samples, vec![expected]);
    }

    #[test]
    fn counts_sum_to_n() {
        let cfg = EnsembleConfig {
            n_samples: 2000,
            seed: 3,
            mode: EnsembleMode::Analytic,
            d: 1.0,
            integrator: IntegratorConfig::default(),
        };
        let result = run_ensemble(&cfg).unwrap();
        assert_eq!(result.n_total(), 2000);
        assert_eq!(
            result.nu_samples.len(),
            cfg.n_samples - result.censored_count
        );
        assert_eq!(result.censored_count, 0); // analytic mode never censors
    }

    #[test]
    fn rejects_empty_ensemble() {
        let cfg = EnsembleConfig {
            n_samples: 0,
            seed: 0,
            mode: EnsembleMode::Analytic,
            d: 1.0,
            integrator: IntegratorConfig::default(),
        };
        assert!(run_ensemble(&cfg).is_err());
    }

    #[test]
    fn csv_output_is_sorted_with_header() {
        let result = EnsembleResult {
            nu_samples: vec![2.0, 0.0, 1.0],
            crossed_count: 2,
            never_count: 1,
            censored_count: 0,
        };
        let mut buf = Vec::new();
        write_samples_csv(&result, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "nu");
        let values: Vec<f64> = lines[1..].iter().map(|l| l.parse().unwrap()).collect();
        assert_eq!(values, vec![0.0, 1.0, 2.0]);
    }
}
