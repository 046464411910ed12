//! Dispersive semigroups of the simple zero frequency and empirical
//! measurement of their `L^∞` decay.
//!
//! A [`ZeroFreqField`] holds coefficients of `exp(i(η y + l z))` on the
//! `(η, l)` grid of a `2π L_y × 2π` box with no `l = 0` content. Physical
//! values are plain trigonometric sums, so a single unit coefficient has
//! `L^∞` norm 1.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::fit::{fit_decay, DecayFit, DecayModel};
use crate::linear::PhysicsParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroFreqField {
    pub ny: usize,
    pub nz: usize,
    pub ly: f64,
    /// Indexed by `iy * nz + iz`, FFT ordering on both axes.
    pub coeffs: Vec<Complex64>,
}

impl ZeroFreqField {
    pub fn zeros(ny: usize, nz: usize, ly: f64) -> Result<Self> {
        if ny < 2 || nz < 2 || ny % 2 != 0 || nz % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "zero-frequency slab {ny}x{nz} needs even sizes >= 2"
            )));
        }
        if !(ly > 0.0 && ly.is_finite()) {
            return Err(Error::InvalidGrid(format!("L_y = {ly} must be positive")));
        }
        Ok(Self {
            ny,
            nz,
            ly,
            coeffs: vec![Complex64::new(0.0, 0.0); ny * nz],
        })
    }

    fn signed(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn eta_of(&self, iy: usize) -> f64 {
        Self::signed(iy, self.ny) as f64 / self.ly
    }

    pub fn l_of(&self, iz: usize) -> i64 {
        Self::signed(iz, self.nz)
    }

    pub fn index_of(&self, j: i64, l: i64) -> Option<usize> {
        let inside = |f: i64, n: usize| f >= -(n as i64 / 2) && f < n as i64 / 2;
        if !(inside(j, self.ny) && inside(l, self.nz)) {
            return None;
        }
        let iy = j.rem_euclid(self.ny as i64) as usize;
        let iz = l.rem_euclid(self.nz as i64) as usize;
        Some(iy * self.nz + iz)
    }

    /// Sets the coefficient at `(η = j / L_y, l)`; `l = 0` is rejected.
    pub fn set(&mut self, j: i64, l: i64, value: Complex64) -> Result<()> {
        if l == 0 {
            return Err(Error::ContractViolation(
                "zero-frequency slab carries no l = 0 content".into(),
            ));
        }
        let idx = self
            .index_of(j, l)
            .ok_or_else(|| Error::ContractViolation(format!("mode (j={j}, l={l}) off grid")))?;
        self.coeffs[idx] = value;
        Ok(())
    }

    pub fn get(&self, j: i64, l: i64) -> Option<Complex64> {
        self.index_of(j, l).map(|i| self.coeffs[i])
    }

    /// `(η, l, coefficient)` for every storage slot.
    pub fn modes(&self) -> impl Iterator<Item = (f64, i64, usize)> + '_ {
        (0..self.ny * self.nz).map(move |idx| {
            let (iy, iz) = (idx / self.nz, idx % self.nz);
            (self.eta_of(iy), self.l_of(iz), idx)
        })
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|z| *z *= c);
        out
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.ny == other.ny && self.nz == other.nz && self.ly == other.ly
    }

    fn has_l_zero_content(&self) -> bool {
        (0..self.ny).any(|iy| self.coeffs[iy * self.nz] != Complex64::new(0.0, 0.0))
    }
}

/// Profile `exp(−η²/(2 w²))` at spanwise frequency `l`.
pub fn gaussian_profile(ny: usize, nz: usize, ly: f64, l: i64, width: f64) -> Result<ZeroFreqField> {
    let mut f = ZeroFreqField::zeros(ny, nz, ly)?;
    let half = ny as i64 / 2;
    for j in -half..half {
        let eta = j as f64 / ly;
        f.set(j, l, Complex64::new((-eta * eta / (2.0 * width * width)).exp(), 0.0))?;
    }
    // trim the Nyquist row so the profile is symmetric in η
    if let Some(idx) = f.index_of(-half, l) {
        f.coeffs[idx] = Complex64::new(0.0, 0.0);
    }
    Ok(f)
}

/// Box size for observing a wave packet up to `t_max`.
///
/// The caustic of `e^{L+ t}` travels at most `0.385 √(β(β−1)) t` in `y`, so
/// `L_y = 0.2 √(β(β−1)) t_max` keeps it inside `|y| < π L_y`. `N_y` is the
/// smallest power of two resolving `|η| ≤ 5 width`.
pub fn dispersion_box(prm: &PhysicsParams, t_max: f64, width: f64) -> (usize, f64) {
    let ly = (0.2 * prm.rotation_frequency() * t_max).max(1.0);
    let ny = ((2.0 * 5.0 * width * ly).ceil() as usize).next_power_of_two().max(16);
    (ny, ly)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// `e^{L± t}` with symbol `exp(−ν(η² + l²) t ± i t √(β(β−1)) |l| / |η, l|)`.
pub fn apply_dispersive_semigroup(
    f: &ZeroFreqField,
    t: f64,
    prm: &PhysicsParams,
    branch: Branch,
) -> Result<ZeroFreqField> {
    semigroup(f, t, prm, branch, true)
}

fn semigroup(
    f: &ZeroFreqField,
    t: f64,
    prm: &PhysicsParams,
    branch: Branch,
    with_phase: bool,
) -> Result<ZeroFreqField> {
    if f.has_l_zero_content() {
        return Err(Error::ContractViolation(
            "dispersive semigroup applied to l = 0 content".into(),
        ));
    }
    let s = branch.sign();
    let omega = prm.rotation_frequency();
    let mut out = f.clone();
    for (eta, l, idx) in f.modes() {
        if l == 0 {
            continue;
        }
        let lf = l as f64;
        let p = eta * eta + lf * lf;
        let phase = if with_phase {
            s * t * omega * lf.abs() / p.sqrt()
        } else {
            0.0
        };
        out.coeffs[idx] *= Complex64::from_polar((-prm.nu * p * t).exp(), phase);
    }
    Ok(out)
}

/// Evolves `(ũ¹, ũ²)` by combining the two branches:
/// `ũ¹ = ½(e⁺ + e⁻) ũ¹_in + a (e⁺ − e⁻)/(2i) ũ²_in`,
/// `ũ² = ½(e⁺ + e⁻) ũ²_in − a⁻¹ (e⁺ − e⁻)/(2i) ũ¹_in`,
/// with `a = sign(β − 1) √((β − 1)/β) |∇| |∂_z|^{-1}`, and
/// `ũ³ = −∂_z^{-1} ∂_y ũ²`.
pub fn evolve_simple_zero_field(
    pair: (&ZeroFreqField, &ZeroFreqField),
    t: f64,
    prm: &PhysicsParams,
) -> Result<(ZeroFreqField, ZeroFreqField, ZeroFreqField)> {
    let (u1, u2) = pair;
    if !u1.same_shape(u2) {
        return Err(Error::ContractViolation("component shapes differ".into()));
    }
    let p1 = apply_dispersive_semigroup(u1, t, prm, Branch::Plus)?;
    let m1 = apply_dispersive_semigroup(u1, t, prm, Branch::Minus)?;
    let p2 = apply_dispersive_semigroup(u2, t, prm, Branch::Plus)?;
    let m2 = apply_dispersive_semigroup(u2, t, prm, Branch::Minus)?;
    let beta = prm.beta;
    let root = (beta - 1.0).signum() * ((beta - 1.0) / beta).sqrt();
    let mut o1 = u1.clone();
    let mut o2 = u2.clone();
    let mut o3 = u2.clone();
    for (eta, l, idx) in u1.modes() {
        if l == 0 {
            continue;
        }
        let lf = l as f64;
        let a = root * (eta * eta + lf * lf).sqrt() / lf.abs();
        let cos1 = 0.5 * (p1.coeffs[idx] + m1.coeffs[idx]);
        let sin1 = (p1.coeffs[idx] - m1.coeffs[idx]) / (2.0 * I);
        let cos2 = 0.5 * (p2.coeffs[idx] + m2.coeffs[idx]);
        let sin2 = (p2.coeffs[idx] - m2.coeffs[idx]) / (2.0 * I);
        o1.coeffs[idx] = cos1 + a * sin2;
        o2.coeffs[idx] = cos2 - sin1 / a;
        // −∂_z^{-1} ∂_y has symbol −(i η)/(i l)
        o3.coeffs[idx] = -(I * eta) / (I * lf) * o2.coeffs[idx];
    }
    Ok((o1, o2, o3))
}

/// Maximum modulus of the physical field on a grid oversampled by `factor`
/// in both directions.
pub fn linf_amplitude_oversampled(f: &ZeroFreqField, factor: usize) -> f64 {
    let (py, pz) = (f.ny * factor, f.nz * factor);
    let mut buf = vec![Complex64::new(0.0, 0.0); py * pz];
    for (iy, row) in f.coeffs.chunks(f.nz).enumerate() {
        let j = ZeroFreqField::signed(iy, f.ny);
        let piy = j.rem_euclid(py as i64) as usize;
        for (iz, z) in row.iter().enumerate() {
            let l = ZeroFreqField::signed(iz, f.nz);
            let piz = l.rem_euclid(pz as i64) as usize;
            buf[piy * pz + piz] = *z;
        }
    }
    Fft3::new(1, py, pz).inverse(&mut buf);
    buf.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `L^∞` amplitude at the default 4× oversampling.
pub fn linf_amplitude(f: &ZeroFreqField) -> f64 {
    linf_amplitude_oversampled(f, 4)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub t: f64,
    pub amplitude: f64,
    /// `amplitude · e^{ν t}`
    pub heat_corrected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionResult {
    pub samples: Vec<DispersionSample>,
    pub fit: DecayFit,
}

/// Measures `‖e^{L+ t} f‖_∞ e^{ν t}` on `t_grid` and fits a power law.
pub fn dispersion_experiment(
    profile: &ZeroFreqField,
    prm: &PhysicsParams,
    t_grid: &[f64],
) -> Result<DispersionResult> {
    dispersion_experiment_with(profile, prm, t_grid, true)
}

/// As [`dispersion_experiment`], optionally with the oscillatory phase removed.
pub fn dispersion_experiment_with(
    profile: &ZeroFreqField,
    prm: &PhysicsParams,
    t_grid: &[f64],
    with_phase: bool,
) -> Result<DispersionResult> {
    if t_grid.len() < 5 {
        return Err(Error::Fit(format!(
            "time grid has {} points, need at least 5",
            t_grid.len()
        )));
    }
    let samples = t_grid
        .par_iter()
        .map(|&t| {
            let g = semigroup(profile, t, prm, Branch::Plus, with_phase)?;
            let amplitude = linf_amplitude(&g);
            Ok(DispersionSample {
                t,
                amplitude,
                heat_corrected: amplitude * (prm.nu * t).exp(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let vs: Vec<f64> = samples.iter().map(|s| s.heat_corrected).collect();
    let fit = fit_decay(&ts, &vs, DecayModel::PowerLaw)?;
    Ok(DispersionResult { samples, fit })
}
