//! Shared oracle machinery for the integration tests: an adaptive
//! Gauss-Kronrod quadrature, reference series for the special functions,
//! Ridders' numerical differentiation and small statistics helpers.
//!
//! Everything here is deliberately independent of the library's own
//! numerical paths so it can serve as a cross-check.

#![allow(dead_code)]

use num_complex::Complex64;

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let fl = f(center - half * x);
        let fr = f(center + half * x);
        kronrod += WGK[i] * (fl + fr);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (fl + fr);
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn go<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gauss_kronrod(f, a, b);
        if err <= tol || depth == 0 {
            value
        } else {
            let m = 0.5 * (a + b);
            go(f, a, m, 0.5 * tol, depth - 1) + go(f, m, b, 0.5 * tol, depth - 1)
        }
    }
    go(f, a, b, tol, 60)
}

/// Quadrature over `[0, inf)` via the tangent substitution
/// `x = tan(theta)`; the Kronrod nodes are interior, so `tan` is never
/// evaluated at `pi/2` itself.
pub fn quad_zero_to_inf<F: Fn(f64) -> f64>(f: &F, tol: f64) -> f64 {
    quad(
        &|theta: f64| {
            let c = theta.cos();
            f(theta.tan()) / (c * c)
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        tol,
    )
}

/// Kummer series for `1F1(a; b; z)` with compensated summation, truncated
/// at term ratio 1e-16. Reference oracle, independent of the library.
pub fn kummer_series_reference(a: f64, b: f64, z: f64) -> f64 {
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut k = 0u32;
    loop {
        term *= (a + k as f64) / (b + k as f64) * z / (k + 1) as f64;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        k += 1;
        if term.abs() <= sum.abs() * 1e-16 || k > 100_000 {
            return sum;
        }
    }
}

/// Leading terms of the large-`z` expansion of `e^{-z} 1F1(a; b; z)`,
/// stopping at the smallest term.
pub fn hyp1f1_asymptotic_reference(a: f64, b: f64, z: f64, gamma_ratio: f64) -> f64 {
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..400 {
        let next = term * (b - a + k as f64) * (1.0 - a + k as f64) / ((k + 1) as f64 * z);
        if next.abs() >= term.abs() && k > 0 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    gamma_ratio * z.powf(a - b) * sum
}

/// Ridders' polynomial-extrapolated central difference for a complex
/// function of a real variable.
pub fn ridders_derivative<F: Fn(f64) -> Complex64>(f: &F, x: f64, h0: f64) -> Complex64 {
    const NTAB: usize = 10;
    const CON: f64 = 1.4;
    const SAFE: f64 = 2.0;
    let mut table = [[Complex64::default(); NTAB]; NTAB];
    let mut h = h0;
    table[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut best = table[0][0];
    let mut err = f64::MAX;
    for i in 1..NTAB {
        h /= CON;
        table[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = CON * CON;
        for j in 1..=i {
            table[j][i] = (fac * table[j - 1][i] - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON * CON;
            let e = (table[j][i] - table[j - 1][i])
                .norm()
                .max((table[j][i] - table[j - 1][i - 1]).norm());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).norm() >= SAFE * err {
            break;
        }
    }
    best
}

/// Deterministic 64-bit mixer for reproducible "random" test points.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `(0, 1]`.
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in `(lo, hi)`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

/// Two-sample Kolmogorov-Smirnov statistic (both inputs get sorted).
pub fn two_sample_ks(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut ia = 0usize;
    let mut ib = 0usize;
    let mut sup = 0.0f64;
    while ia < a.len() && ib < b.len() {
        let x = a[ia].min(b[ib]);
        while ia < a.len() && a[ia] <= x {
            ia += 1;
        }
        while ib < b.len() && b[ib] <= x {
            ib += 1;
        }
        sup = sup.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    sup
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|&a| (a - mx) * (a - mx)).sum();
    num / den
}
