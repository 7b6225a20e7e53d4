//! Free-particle propagation by Fourier methods on a cubic grid, plus
//! velocity-field extraction and grid-driven trajectories.
//!
//! In Fourier space free evolution is the exact multiplier
//! `e^{-i k^2 t / 2}`, so a single forward transform, multiplication and
//! inverse transform propagates any grid state to any time with no time
//! slicing. The module keeps a time argument in its interface so a
//! potential term could later slot in via operator splitting.
//!
//! Discrete transform convention: the unnormalized forward DFT and an
//! inverse scaled by `1/n^3`, with wavenumbers `k_j = (pi / L) j` for
//! `j = -n/2 .. n/2 - 1` on each axis. Tests that compare against the
//! continuum transform account for the lattice phase and the `dV` factor
//! explicitly; no bit-for-bit match with any continuum convention is
//! implied.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::analytic::PassageOutcome;
use crate::trajectory::{self, IntegratorConfig};
use crate::{Error, Result, Vec3};

/// Density floor for velocity extraction, relative to the grid maximum of
/// `|psi|^2`. The Bohmian velocity is a ratio of quantities that both
/// vanish in the tails, so points below the floor are masked out.
pub const DENSITY_MASK_FLOOR: f64 = 1e-12;

/// Aliasing guard: `e^{-L^2}` at the box edge must stay below this.
const EDGE_DENSITY_BOUND: f64 = 1e-10;

/// Complex field sampled on the uniform lattice `[-L, L)^3` with `n`
/// points per axis (`n` a power of two between 16 and 256).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid3 {
    n: usize,
    box_half_width: f64,
    values: Vec<Complex64>,
}

impl ComplexGrid3 {
    pub fn new(n: usize, box_half_width: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(16..=256).contains(&n) || !n.is_power_of_two() {
            return Err(Error::domain(format!(
                "grid size must be a power of two in 16..=256, got {n}"
            )));
        }
        if !(box_half_width.is_finite() && box_half_width > 0.0) {
            return Err(Error::domain(format!(
                "box half-width must be positive, got {box_half_width}"
            )));
        }
        if values.len() != n * n * n {
            return Err(Error::domain(format!(
                "expected {} values, got {}",
                n * n * n,
                values.len()
            )));
        }
        Ok(Self {
            n,
            box_half_width,
            values,
        })
    }

    /// Sample a function of Cartesian coordinates on the lattice.
    pub fn sample<F>(n: usize, box_half_width: f64, f: F) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> Complex64,
    {
        let mut values = Vec::with_capacity(n * n * n);
        let dx = 2.0 * box_half_width / n as f64;
        for ix in 0..n {
            let x = -box_half_width + ix as f64 * dx;
            for iy in 0..n {
                let y = -box_half_width + iy as f64 * dx;
                for iz in 0..n {
                    let z = -box_half_width + iz as f64 * dx;
                    values.push(f(x, y, z));
                }
            }
        }
        Self::new(n, box_half_width, values)
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn box_half_width(&self) -> f64 {
        self.box_half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_width / self.n as f64
    }

    /// Lattice coordinate of index `i` along any axis.
    pub fn node(&self, i: usize) -> f64 {
        -self.box_half_width + i as f64 * self.spacing()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    /// Discrete L2 norm `sqrt(sum |psi|^2 dV)`.
    pub fn l2_norm(&self) -> f64 {
        let dv = self.spacing().powi(3);
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt()
    }

    /// Normalized second moment `int r^2 |psi|^2 dV / int |psi|^2 dV`.
    pub fn second_moment(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ix in 0..self.n {
            let x = self.node(ix);
            for iy in 0..self.n {
                let y = self.node(iy);
                for iz in 0..self.n {
                    let z = self.node(iz);
                    let w = self.values[self.index(ix, iy, iz)].norm_sqr();
                    num += (x * x + y * y + z * z) * w;
                    den += w;
                }
            }
        }
        num / den
    }

    /// Wavenumber of DFT index `j`: `(pi / L) j'` with `j' = j` below the
    /// Nyquist index and `j - n` at and above it.
    fn wavenumber(&self, j: usize) -> f64 {
        let j = j as isize;
        let n = self.n as isize;
        let signed = if j < n / 2 { j } else { j - n };
        std::f64::consts::PI / self.box_half_width * signed as f64
    }
}

/// In-place FFT along all three axes. `fft` must have length `n`.
fn transform_3d(values: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // z-axis: contiguous lines
    for line in values.chunks_mut(n) {
        fft.process_with_scratch(line, &mut scratch);
    }
    // y-axis (stride n) and x-axis (stride n^2) through a gather buffer
    let mut line = vec![Complex64::default(); n];
    let mut strided = |values: &mut [Complex64], start: usize, stride: usize| {
        for (i, slot) in line.iter_mut().enumerate() {
            *slot = values[start + i * stride];
        }
        fft.process_with_scratch(&mut line, &mut scratch);
        for (i, slot) in line.iter().enumerate() {
            values[start + i * stride] = *slot;
        }
    };
    for ix in 0..n {
        for iz in 0..n {
            strided(values, ix * n * n + iz, n);
        }
    }
    for iy in 0..n {
        for iz in 0..n {
            strided(values, iy * n + iz, n * n);
        }
    }
}

fn aliasing_guard(box_half_width: f64, t: f64) -> Result<()> {
    let from_width = 6.0 * (1.0 + t * t).sqrt();
    let from_edge = (-EDGE_DENSITY_BOUND.ln()).sqrt();
    let required = from_width.max(from_edge);
    if box_half_width < required {
        return Err(Error::AliasingGuard {
            box_half_width,
            required,
        });
    }
    Ok(())
}

/// Evolve a grid state freely for time `t >= 0` (exact in `k`-space).
///
/// Fails with [`Error::AliasingGuard`] when the box cannot resolve a
/// unit-width packet spread to time `t` (`L >= 6 sigma(t)`) or lets the
/// periodic images overlap (`e^{-L^2}` above 1e-10 at the edge).
pub fn propagate_free(initial: &ComplexGrid3, t: f64) -> Result<ComplexGrid3> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    aliasing_guard(initial.box_half_width, t)?;

    let n = initial.n;
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut values = initial.values.clone();
    transform_3d(&mut values, n, &forward);
    for jx in 0..n {
        let kx = initial.wavenumber(jx);
        for jy in 0..n {
            let ky = initial.wavenumber(jy);
            for jz in 0..n {
                let kz = initial.wavenumber(jz);
                let k2 = kx * kx + ky * ky + kz * kz;
                let phase = Complex64::from_polar(1.0, -0.5 * k2 * t);
                values[(jx * n + jy) * n + jz] *= phase;
            }
        }
    }
    transform_3d(&mut values, n, &inverse);
    let scale = 1.0 / (n * n * n) as f64;
    for v in &mut values {
        *v *= scale;
    }
    ComplexGrid3::new(n, initial.box_half_width, values)
}

/// Bohmian velocity vectors on the lattice, with a mask marking the nodes
/// where the density was too small for a trustworthy ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityFieldGrid {
    n: usize,
    box_half_width: f64,
    vectors: Vec<Vec3>,
    mask: Vec<bool>,
}

impl VelocityFieldGrid {
    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn box_half_width(&self) -> f64 {
        self.box_half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_width / self.n as f64
    }

    /// Velocity at node `(ix, iy, iz)`, `None` when masked.
    pub fn at(&self, ix: usize, iy: usize, iz: usize) -> Option<Vec3> {
        let idx = (ix * self.n + iy) * self.n + iz;
        self.mask[idx].then(|| self.vectors[idx])
    }

    /// Trilinear interpolation at an arbitrary point. `None` outside the
    /// node hull or when any of the eight surrounding nodes is masked.
    pub fn sample_at(&self, p: &Vec3) -> Option<Vec3> {
        let dx = self.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for axis in 0..3 {
            let u = (p[axis] + self.box_half_width) / dx;
            if !(u >= 0.0 && u <= (self.n - 1) as f64) {
                return None;
            }
            let i = (u.floor() as usize).min(self.n - 2);
            base[axis] = i;
            frac[axis] = u - i as f64;
        }
        let mut acc = Vec3::zeros();
        for corner in 0..8 {
            let (cx, cy, cz) = (corner & 1, (corner >> 1) & 1, (corner >> 2) & 1);
            let idx = ((base[0] + cx) * self.n + (base[1] + cy)) * self.n + (base[2] + cz);
            if !self.mask[idx] {
                return None;
            }
            let w = (if cx == 1 { frac[0] } else { 1.0 - frac[0] })
                * (if cy == 1 { frac[1] } else { 1.0 - frac[1] })
                * (if cz == 1 { frac[2] } else { 1.0 - frac[2] });
            acc += w * self.vectors[idx];
        }
        Some(acc)
    }
}

/// Extract the velocity field `Im(conj(psi) grad psi) / |psi|^2` from a
/// grid state, with the gradient computed by spectral differentiation.
pub fn velocity_field_from_grid(grid: &ComplexGrid3) -> Result<VelocityFieldGrid> {
    let n = grid.n;
    let max_density = grid
        .values
        .iter()
        .map(Complex64::norm_sqr)
        .fold(0.0f64, f64::max);
    if !(max_density > 0.0) {
        return Err(Error::DegenerateField);
    }
    let floor = DENSITY_MASK_FLOOR * max_density;

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut spectrum = grid.values.clone();
    transform_3d(&mut spectrum, n, &forward);

    let scale = 1.0 / (n * n * n) as f64;
    let mut gradients: Vec<Vec<Complex64>> = Vec::with_capacity(3);
    for axis in 0..3 {
        let mut g = spectrum.clone();
        for jx in 0..n {
            for jy in 0..n {
                for jz in 0..n {
                    let j = [jx, jy, jz][axis];
                    let k = grid.wavenumber(j);
                    g[(jx * n + jy) * n + jz] *= Complex64::new(0.0, k);
                }
            }
        }
        transform_3d(&mut g, n, &inverse);
        for v in &mut g {
            *v *= scale;
        }
        gradients.push(g);
    }

    let mut vectors = vec![Vec3::zeros(); n * n * n];
    let mut mask = vec![false; n * n * n];
    let mut any = false;
    for idx in 0..n * n * n {
        let psi = grid.values[idx];
        let density = psi.norm_sqr();
        if density >= floor {
            let v = Vec3::new(
                (psi.conj() * gradients[0][idx]).im / density,
                (psi.conj() * gradients[1][idx]).im / density,
                (psi.conj() * gradients[2][idx]).im / density,
            );
            vectors[idx] = v;
            mask[idx] = true;
            any = true;
        }
    }
    if !any {
        return Err(Error::DegenerateField);
    }
    Ok(VelocityFieldGrid {
        n,
        box_half_width: grid.box_half_width,
        vectors,
        mask,
    })
}

/// Drive a trajectory through a sequence of velocity-field snapshots
/// (trilinear in space, linear in time) and report how it ends.
///
/// `times` must be strictly increasing and cover `[0, cfg.t_max]`; the
/// snapshot spacing bounds the interpolation error, so halving it is the
/// standard convergence check. A trajectory that leaves the sampled box
/// (or enters the masked tail region) fails with [`Error::OutOfDomain`].
pub fn trajectories_from_grid(
    times: &[f64],
    fields: &[VelocityFieldGrid],
    r0: Vec3,
    d: f64,
    cfg: &IntegratorConfig,
) -> Result<PassageOutcome> {
    if times.len() != fields.len() || times.len() < 2 {
        return Err(Error::domain(
            "need at least two field snapshots with matching times".to_string(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("snapshot times must be strictly increasing".to_string()));
    }
    if times[0] > 0.0 || *times.last().unwrap() < cfg.t_max {
        return Err(Error::domain(format!(
            "snapshots must cover [0, t_max = {}], got [{}, {}]",
            cfg.t_max,
            times[0],
            times.last().unwrap()
        )));
    }

    let nan = Vec3::new(f64::NAN, f64::NAN, f64::NAN);
    let field = |p: &Vec3, t: f64| -> Vec3 {
        // binary search for the bracketing snapshot interval
        let i = match times.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(i) => i.min(times.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(times.len() - 2),
        };
        let w = (t - times[i]) / (times[i + 1] - times[i]);
        match (fields[i].sample_at(p), fields[i + 1].sample_at(p)) {
            (Some(a), Some(b)) => (1.0 - w) * a + w * b,
            _ => nan,
        }
    };

    match trajectory::integrate_trajectory(r0, field, cfg, d) {
        Ok(record) => Ok(record.terminal),
        // the only non-finite source in this field is leaving the domain
        Err(Error::FieldEvaluation { t, position }) => Err(Error::OutOfDomain { t, position }),
        Err(e) => Err(e),
    }
}

/// Header of a flat binary grid snapshot, duplicated in a JSON sidecar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub n_per_axis: u64,
    pub box_half_width: f64,
    pub t: f64,
}

/// Write a grid state as flat binary (little-endian: `u64 n`, `f64 L`,
/// `f64 t`, then interleaved re/im doubles) plus a `.json` sidecar with
/// the same header.
pub fn write_snapshot(path: &Path, grid: &ComplexGrid3, t: f64) -> Result<()> {
    let header = SnapshotHeader {
        n_per_axis: grid.n as u64,
        box_half_width: grid.box_half_width,
        t,
    };
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(&header.n_per_axis.to_le_bytes())?;
    file.write_all(&header.box_half_width.to_le_bytes())?;
    file.write_all(&header.t.to_le_bytes())?;
    for v in &grid.values {
        file.write_all(&v.re.to_le_bytes())?;
        file.write_all(&v.im.to_le_bytes())?;
    }
    file.flush()?;
    let sidecar = serde_json::to_string_pretty(&header).expect("header serializes");
    std::fs::write(path.with_extension("json"), sidecar)?;
    Ok(())
}

/// Read back a snapshot written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<(ComplexGrid3, f64)> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut u64_buf = [0u8; 8];
    file.read_exact(&mut u64_buf)?;
    let n = u64::from_le_bytes(u64_buf) as usize;
    file.read_exact(&mut u64_buf)?;
    let box_half_width = f64::from_le_bytes(u64_buf);
    file.read_exact(&mut u64_buf)?;
    let t = f64::from_le_bytes(u64_buf);
    let mut values = Vec::with_capacity(n * n * n);
    for _ in 0..n * n * n {
        file.read_exact(&mut u64_buf)?;
        let re = f64::from_le_bytes(u64_buf);
        file.read_exact(&mut u64_buf)?;
        let im = f64::from_le_bytes(u64_buf);
        values.push(Complex64::new(re, im));
    }
    Ok((ComplexGrid3::new(n, box_half_width, values)?, t))
}
