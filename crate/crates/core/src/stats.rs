//! Comparison of empirical reciprocal-passage-time ensembles against the
//! closed-form distribution: empirical CDFs, Kolmogorov-Smirnov distance,
//! atom-mass and truncated-mean estimation, Hill tail index.

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::ensemble::EnsembleResult;
use crate::integrate::adaptive_simpson;
use crate::{Error, Result};

/// Default fraction of top order statistics fed to the Hill estimator.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.01;

/// Empirical counterpart of the atom-plus-continuous decomposition:
/// a point mass at zero plus sorted positive samples. Censored samples
/// are excluded from both parts but kept in the bookkeeping, so
/// `atom_mass_at_zero = (n_total - positives - censored) / n_total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalNuDistribution {
    pub atom_mass_at_zero: f64,
    /// Strictly positive samples, ascending.
    pub positive_samples: Vec<f64>,
    pub n_total: usize,
    pub censored_count: usize,
}

/// Build the empirical distribution from an ensemble result: zeros become
/// the atom, positives are sorted, censored runs are counted separately.
pub fn build_empirical(result: &EnsembleResult) -> EmpiricalNuDistribution {
    let mut positive_samples: Vec<f64> = result
        .nu_samples
        .iter()
        .copied()
        .filter(|&nu| nu > 0.0)
        .collect();
    positive_samples.sort_by(f64::total_cmp);
    let n_total = result.n_total();
    let zeros = n_total - positive_samples.len() - result.censored_count;
    EmpiricalNuDistribution {
        atom_mass_at_zero: zeros as f64 / n_total as f64,
        positive_samples,
        n_total,
        censored_count: result.censored_count,
    }
}

/// Sup-norm distance between the full empirical CDF (atom included) and
/// the analytic CDF for detector radius `d`. Requires at least 100
/// samples.
pub fn ks_distance(emp: &EmpiricalNuDistribution, d: f64) -> Result<f64> {
    if emp.n_total < 100 {
        return Err(Error::domain(format!(
            "ks_distance needs n_total >= 100, got {}",
            emp.n_total
        )));
    }
    let n = emp.n_total as f64;
    let atom = emp.atom_mass_at_zero;
    // at zero the empirical CDF jumps to the atom mass, the analytic one
    // to alpha(d)
    let mut sup = (atom - analytic::alpha(d)).abs();
    for (i, &x) in emp.positive_samples.iter().enumerate() {
        let cdf = analytic::nu_cdf(x, d);
        let below = atom + i as f64 / n;
        let at = atom + (i + 1) as f64 / n;
        sup = sup.max((below - cdf).abs()).max((at - cdf).abs());
    }
    // censored mass never materializes, so the empirical CDF tops out low
    sup = sup.max(emp.censored_count as f64 / n);
    Ok(sup)
}

/// Hill estimator of the survival-function tail exponent over the top
/// `k_fraction` of the positive order statistics. The continuous density
/// falls off like `nu^{-3}`, so the survival exponent (and the expected
/// estimate) is 2. `k_fraction` must lie in `(0, 0.2]` and at least 500
/// positive samples are required.
pub fn tail_index(emp: &EmpiricalNuDistribution, k_fraction: f64) -> Result<f64> {
    if !(k_fraction > 0.0 && k_fraction <= 0.2) {
        return Err(Error::domain(format!(
            "k_fraction must be in (0, 0.2], got {k_fraction}"
        )));
    }
    let m = emp.positive_samples.len();
    if m < 500 {
        return Err(Error::domain(format!(
            "tail_index needs >= 500 positive samples, got {m}"
        )));
    }
    let k = ((k_fraction * m as f64).floor() as usize).clamp(1, m - 1);
    let reference = emp.positive_samples[m - 1 - k];
    let sum_log: f64 = emp.positive_samples[m - k..]
        .iter()
        .map(|&x| (x / reference).ln())
        .sum();
    Ok(k as f64 / sum_log)
}

/// Mean of `min(nu, cap)` over the resolved samples (zeros included,
/// censored excluded). The raw mean of `nu` converges slowly because the
/// distribution has infinite variance; capping restores a usable
/// comparison against the analytic value.
pub fn truncated_mean(emp: &EmpiricalNuDistribution, cap: f64) -> Result<f64> {
    if !(cap.is_finite() && cap > 0.0) {
        return Err(Error::domain(format!("cap must be positive, got {cap}")));
    }
    let resolved = emp.n_total - emp.censored_count;
    if resolved == 0 {
        return Err(Error::domain("no resolved samples".to_string()));
    }
    let sum: f64 = emp.positive_samples.iter().map(|&x| x.min(cap)).sum();
    Ok(sum / resolved as f64)
}

/// Analytic counterpart of [`truncated_mean`]:
/// `int_0^cap nu Lambda_cont dnu + cap (1 - F(cap))`.
pub fn truncated_mean_analytic(d: f64, cap: f64) -> f64 {
    let integral = adaptive_simpson(
        &|nu| nu * analytic::lambda_continuous(nu, d),
        0.0,
        cap,
        1e-12,
    );
    integral + cap * (1.0 - analytic::nu_cdf(cap, d))
}

/// Summary comparing one empirical ensemble against the analytic model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsReport {
    pub n: usize,
    pub d: f64,
    pub ks: f64,
    pub atom_emp: f64,
    pub atom_analytic: f64,
    /// Absent when there are too few positive samples for the estimator.
    pub hill_index: Option<f64>,
    pub truncated_mean_emp: f64,
    pub truncated_mean_analytic: f64,
    pub mean_nu_analytic: f64,
}

/// Build the comparison report. `cap` bounds the truncated mean;
/// `k_fraction` is passed to the Hill estimator (absent from the report
/// when its preconditions fail).
pub fn report(
    emp: &EmpiricalNuDistribution,
    d: f64,
    k_fraction: f64,
    cap: f64,
) -> Result<StatsReport> {
    Ok(StatsReport {
        n: emp.n_total,
        d,
        ks: ks_distance(emp, d)?,
        atom_emp: emp.atom_mass_at_zero,
        atom_analytic: analytic::alpha(d),
        hill_index: tail_index(emp, k_fraction).ok(),
        truncated_mean_emp: truncated_mean(emp, cap)?,
        truncated_mean_analytic: truncated_mean_analytic(d, cap),
        mean_nu_analytic: analytic::mean_nu(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result_from(nu_samples: Vec<f64>, censored: usize) -> EnsembleResult {
        let crossed = nu_samples.iter().filter(|&&x| x > 0.0).count();
        let never = nu_samples.len() - crossed;
        EnsembleResult {
            nu_samples,
            crossed_count: crossed,
            never_count: never,
            censored_count: censored,
        }
    }

    #[test]
    fn all_zero_samples_are_pure_atom() {
        let emp = build_empirical(&result_from(vec![0.0; 10], 0));
        assert_eq!(emp.atom_mass_at_zero, 1.0);
        assert!(emp.positive_samples.is_empty());
    }

    #[test]
    fn mixed_samples_split_correctly() {
        let emp = build_empirical(&result_from(vec![0.0, 2.0, 0.0, 1.0], 0));
        assert_eq!(emp.atom_mass_at_zero, 0.5);
        assert_eq!(emp.positive_samples, vec![1.0, 2.0]);
        assert_eq!(emp.n_total, 4);
    }

    #[test]
    fn build_is_idempotent_on_rebuild() {
        let result = result_from(vec![0.0, 3.0, 1.0, 0.5], 1);
        let a = build_empirical(&result);
        let b = build_empirical(&result);
        assert_eq!(a, b);
        assert_eq!(a.n_total, 5);
        assert_eq!(a.censored_count, 1);
    }

    #[test]
    fn ks_requires_minimum_samples() {
        let emp = build_empirical(&result_from(vec![1.0; 50], 0));
        assert!(ks_distance(&emp, 1.0).is_err());
    }

    #[test]
    fn tail_index_preconditions() {
        let emp = build_empirical(&result_from(vec![1.0; 100], 0));
        assert!(tail_index(&emp, 0.01).is_err()); // too few positives
        let emp = build_empirical(&result_from(vec![1.0; 1000], 0));
        assert!(tail_index(&emp, 0.0).is_err());
        assert!(tail_index(&emp, 0.3).is_err());
    }

    #[test]
    fn truncated_mean_trivial_cases() {
        // bounded synthetic data: a huge cap reproduces the plain mean
        let emp = build_empirical(&result_from(vec![1.0, 2.0, 3.0, 0.0], 0));
        let v = truncated_mean(&emp, 1e12).unwrap();
        assert!((v - 1.5).abs() < 1e-15);
        // all-atom distribution has mean zero
        let emp = build_empirical(&result_from(vec![0.0; 8], 0));
        assert_eq!(truncated_mean(&emp, 5.0).unwrap(), 0.0);
        assert!(truncated_mean(&emp, 0.0).is_err());
    }

    #[test]
    fn truncated_mean_caps_large_values() {
        let emp = build_empirical(&result_from(vec![1.0, 100.0], 0));
        let v = truncated_mean(&emp, 10.0).unwrap();
        assert!((v - 5.5).abs() < 1e-15);
    }
}
