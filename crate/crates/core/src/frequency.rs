//! Fourier-space scaffolding in the sheared moving frame.
//!
//! Fields live on a periodic box `[0, 2π) × [0, 2π L_y) × [0, 2π)` in the
//! moving coordinates `(X, Y, Z) = (x − t y, y, z)` and are stored as Fourier
//! series coefficients of `exp(i (k X + η Y + l Z))` with `k, l ∈ ℤ` and
//! `η ∈ ℤ / L_y`. With this normalization the symbol of `∂_X` is `i k`, the
//! symbol of `∂_Y^L = ∂_Y − t ∂_X` is `i (η − k t)` and `−Δ_L` has symbol
//! `p = k² + (η − k t)² + l²`, with no stray factors of 2π.
//!
//! Norms are box averages, so Parseval reads `‖f‖² = Σ |f̂|²`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A single Fourier mode `(k, η, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevector {
    pub k: i64,
    pub eta: f64,
    pub l: i64,
}

impl Wavevector {
    pub fn new(k: i64, eta: f64, l: i64) -> Self {
        Self { k, eta, l }
    }

    pub fn is_mean(&self) -> bool {
        self.k == 0 && self.l == 0 && self.eta == 0.0
    }

    /// `|k, η, l|`
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        let (k, l) = (self.k as f64, self.l as f64);
        k * k + self.eta * self.eta + l * l
    }

    /// `⟨k, η, l⟩ = sqrt(1 + k² + η² + l²)`
    pub fn bracket(&self) -> f64 {
        (1.0 + self.norm_sq()).sqrt()
    }

    /// Wall-normal frequency seen by the moving frame, `η − k t`.
    pub fn sheared_eta(&self, t: f64) -> f64 {
        self.eta - self.k as f64 * t
    }

    /// `|k, l|²`
    pub fn horizontal_sq(&self) -> f64 {
        let (k, l) = (self.k as f64, self.l as f64);
        k * k + l * l
    }
}

/// `p(t) = k² + (η − k t)² + l²`, the symbol of `−Δ_L`.
pub fn symbol_p(t: f64, w: Wavevector) -> f64 {
    let xi = w.sheared_eta(t);
    w.horizontal_sq() + xi * xi
}

/// `ṗ = −2 k (η − k t)`.
pub fn symbol_p_dot(t: f64, w: Wavevector) -> f64 {
    -2.0 * w.k as f64 * w.sheared_eta(t)
}

/// Antiderivative of `p` with `P(0) = 0`:
/// `(k² + l²) t + (η − k t/2)² t + k² t³ / 12`.
pub fn symbol_p_antiderivative(t: f64, w: Wavevector) -> f64 {
    let k = w.k as f64;
    let c = w.eta - 0.5 * k * t;
    w.horizontal_sq() * t + c * c * t + k * k * t * t * t / 12.0
}

/// `∫_{t0}^{t1} p(s) ds` in closed form.
pub fn symbol_p_integral(w: Wavevector, t0: f64, t1: f64) -> f64 {
    symbol_p_antiderivative(t1, w) - symbol_p_antiderivative(t0, w)
}

/// The time-dependent symbols attached to one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearedSymbols {
    pub p: f64,
    pub p_dot: f64,
    /// Symbol of `∇_L`: `(i k, i (η − k t), i l)`.
    pub grad_l: [Complex64; 3],
}

impl ShearedSymbols {
    pub fn at(t: f64, w: Wavevector) -> Self {
        let xi = w.sheared_eta(t);
        Self {
            p: symbol_p(t, w),
            p_dot: symbol_p_dot(t, w),
            grad_l: [
                Complex64::new(0.0, w.k as f64),
                Complex64::new(0.0, xi),
                Complex64::new(0.0, w.l as f64),
            ],
        }
    }
}

/// Mode counts and box size of the truncated periodic domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    /// `η` is sampled on `ℤ / L_y`; the physical `Y` period is `2π L_y`.
    pub ly: f64,
    pub dealias_fraction: f64,
}

impl Grid {
    pub const DEFAULT_LY: f64 = 8.0;
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

    pub fn new(nx: usize, ny: usize, nz: usize, ly: f64) -> Result<Self> {
        Self::with_dealias(nx, ny, nz, ly, Self::DEFAULT_DEALIAS)
    }

    pub fn with_dealias(nx: usize, ny: usize, nz: usize, ly: f64, dealias: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n}: mode counts must be even and at least 4"
                )));
            }
        }
        if !(ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidGrid(format!("L_y = {ly} must be positive")));
        }
        if !(dealias > 0.0 && dealias <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction {dealias} must lie in (0, 1]"
            )));
        }
        Ok(Self {
            nx,
            ny,
            nz,
            ly,
            dealias_fraction: dealias,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.ny + iy) * self.nz + iz
    }

    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize, usize) {
        let iz = idx % self.nz;
        let rest = idx / self.nz;
        (rest / self.ny, rest % self.ny, iz)
    }

    #[inline]
    fn signed(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    #[inline]
    fn unsigned(f: i64, n: usize) -> usize {
        f.rem_euclid(n as i64) as usize
    }

    #[inline]
    pub fn k_of(&self, ix: usize) -> i64 {
        Self::signed(ix, self.nx)
    }

    /// Integer wall-normal index `j` with `η = j / L_y`.
    #[inline]
    pub fn j_of(&self, iy: usize) -> i64 {
        Self::signed(iy, self.ny)
    }

    #[inline]
    pub fn eta_of(&self, iy: usize) -> f64 {
        self.j_of(iy) as f64 / self.ly
    }

    #[inline]
    pub fn l_of(&self, iz: usize) -> i64 {
        Self::signed(iz, self.nz)
    }

    pub fn wavevector(&self, ix: usize, iy: usize, iz: usize) -> Wavevector {
        Wavevector::new(self.k_of(ix), self.eta_of(iy), self.l_of(iz))
    }

    pub fn wavevector_at(&self, idx: usize) -> Wavevector {
        let (ix, iy, iz) = self.split(idx);
        self.wavevector(ix, iy, iz)
    }

    /// Storage index of the mode `(k, j, l)`; `None` outside the grid range.
    pub fn index_of(&self, k: i64, j: i64, l: i64) -> Option<usize> {
        let inside = |f: i64, n: usize| f >= -(n as i64 / 2) && f < n as i64 / 2;
        if inside(k, self.nx) && inside(j, self.ny) && inside(l, self.nz) {
            Some(self.index(
                Self::unsigned(k, self.nx),
                Self::unsigned(j, self.ny),
                Self::unsigned(l, self.nz),
            ))
        } else {
            None
        }
    }

    /// Index of the Hermitian partner `(−k, −η, −l)`.
    #[inline]
    pub fn conj_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        let neg = |i: usize, n: usize| if i == 0 { 0 } else { n - i };
        self.index(neg(ix, self.nx), neg(iy, self.ny), neg(iz, self.nz))
    }

    /// Largest retained |frequency index| along an axis of `n` modes.
    pub fn band_limit(&self, n: usize) -> i64 {
        let cut = self.dealias_fraction * (n / 2) as f64;
        let mut m = cut.floor() as i64;
        if m as f64 >= cut {
            m -= 1;
        }
        m.min(n as i64 / 2 - 1)
    }

    /// Whether a mode survives the dealiasing rule (Nyquist modes never do).
    #[inline]
    pub fn in_band(&self, ix: usize, iy: usize, iz: usize) -> bool {
        self.k_of(ix).abs() <= self.band_limit(self.nx)
            && self.j_of(iy).abs() <= self.band_limit(self.ny)
            && self.l_of(iz).abs() <= self.band_limit(self.nz)
    }

    /// Boolean mask over storage indices for the dealiased band.
    pub fn band_mask(&self) -> Vec<bool> {
        let (bx, by, bz) = (
            self.band_limit(self.nx),
            self.band_limit(self.ny),
            self.band_limit(self.nz),
        );
        let mut mask = vec![false; self.len()];
        for ix in 0..self.nx {
            if self.k_of(ix).abs() > bx {
                continue;
            }
            for iy in 0..self.ny {
                if self.j_of(iy).abs() > by {
                    continue;
                }
                for iz in 0..self.nz {
                    if self.l_of(iz).abs() <= bz {
                        mask[self.index(ix, iy, iz)] = true;
                    }
                }
            }
        }
        mask
    }

    /// Largest retained `|k|`, `|η|` and `|l|`.
    pub fn max_frequencies(&self) -> (f64, f64, f64) {
        (
            self.band_limit(self.nx) as f64,
            self.band_limit(self.ny) as f64 / self.ly,
            self.band_limit(self.nz) as f64,
        )
    }

    /// Time after which the sheared frequency `η − k t` of the fastest
    /// retained streamwise mode leaves the resolved wall-normal range.
    pub fn resolution_horizon(&self) -> f64 {
        let (kmax, _, _) = self.max_frequencies();
        self.ny as f64 / (2.0 * self.ly * kmax.max(1.0))
    }
}

/// Complex Fourier coefficients of a three-component field in the moving
/// frame, tagged with the time at which its symbols are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub frame_time: f64,
    pub comps: [Vec<Complex64>; 3],
}

impl SpectralField {
    pub fn zeros(grid: Grid, frame_time: f64) -> Self {
        let n = grid.len();
        Self {
            grid,
            frame_time,
            comps: [
                vec![Complex64::new(0.0, 0.0); n],
                vec![Complex64::new(0.0, 0.0); n],
                vec![Complex64::new(0.0, 0.0); n],
            ],
        }
    }

    /// Sets mode `(k, j, l)` to `value` and its partner to the conjugate.
    pub fn set_mode(&mut self, k: i64, j: i64, l: i64, value: [Complex64; 3]) -> Result<()> {
        let g = self.grid;
        let idx = g
            .index_of(k, j, l)
            .ok_or_else(|| Error::ContractViolation(format!("mode ({k},{j},{l}) off grid")))?;
        let (ix, iy, iz) = g.split(idx);
        let conj = g.conj_index(ix, iy, iz);
        for c in 0..3 {
            self.comps[c][conj] = value[c].conj();
            self.comps[c][idx] = value[c];
        }
        Ok(())
    }

    pub fn mode(&self, k: i64, j: i64, l: i64) -> Option<[Complex64; 3]> {
        let idx = self.grid.index_of(k, j, l)?;
        Some([self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]])
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Box-averaged `L²` norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Real part of the `L²` inner product.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        self.comps
            .iter()
            .zip(other.comps.iter())
            .flat_map(|(a, b)| a.iter().zip(b.iter()))
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn scale(&mut self, s: f64) {
        for c in self.comps.iter_mut() {
            for z in c.iter_mut() {
                *z *= s;
            }
        }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        for (c, o) in self.comps.iter_mut().zip(other.comps.iter()) {
            for (z, w) in c.iter_mut().zip(o.iter()) {
                *z += a * w;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Keeps the modes for which `keep(k, η, l)` holds.
    pub fn filtered(&self, keep: impl Fn(Wavevector) -> bool) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid, self.frame_time);
        for idx in 0..self.grid.len() {
            if keep(self.grid.wavevector_at(idx)) {
                for c in 0..3 {
                    out.comps[c][idx] = self.comps[c][idx];
                }
            }
        }
        out
    }

    /// Largest `|∇_L · û|` over all modes at the frame time.
    pub fn max_divergence(&self) -> f64 {
        let t = self.frame_time;
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let s = ShearedSymbols::at(t, self.grid.wavevector_at(idx));
            let div: Complex64 = (0..3).map(|c| s.grad_l[c] * self.comps[c][idx]).sum();
            worst = worst.max(div.norm());
        }
        worst
    }

    /// Checks the mode-wise divergence-free invariant at relative tolerance `rel`.
    pub fn is_divergence_free(&self, rel: f64) -> bool {
        self.max_divergence() <= rel * self.norm().max(f64::MIN_POSITIVE)
    }

    /// Largest `|f̂(−κ) − conj f̂(κ)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst: f64 = 0.0;
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                for iz in 0..g.nz {
                    let a = g.index(ix, iy, iz);
                    let b = g.conj_index(ix, iy, iz);
                    for c in &self.comps {
                        worst = worst.max((c[b] - c[a].conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Replaces each pair by its Hermitian average; self-conjugate modes
    /// become real.
    pub fn enforce_hermitian(&mut self) {
        let g = self.grid;
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                for iz in 0..g.nz {
                    let a = g.index(ix, iy, iz);
                    let b = g.conj_index(ix, iy, iz);
                    if b < a {
                        continue;
                    }
                    for c in self.comps.iter_mut() {
                        let avg = 0.5 * (c[a] + c[b].conj());
                        c[a] = avg;
                        c[b] = avg.conj();
                    }
                }
            }
        }
    }

    /// Zeros every mode outside the dealiased band.
    pub fn truncate_to_band(&mut self) {
        let g = self.grid;
        for idx in 0..g.len() {
            let (ix, iy, iz) = g.split(idx);
            if !g.in_band(ix, iy, iz) {
                for c in self.comps.iter_mut() {
                    c[idx] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}

/// `P_{k=0} f`
pub fn project_x_zero(f: &SpectralField) -> SpectralField {
    f.filtered(|w| w.k == 0)
}

/// `P_{≠} f = f − P_{k=0} f`
pub fn project_x_nonzero(f: &SpectralField) -> SpectralField {
    f.filtered(|w| w.k != 0)
}

/// `f̄`, the `l = 0` part.
pub fn project_z_zero(f: &SpectralField) -> SpectralField {
    f.filtered(|w| w.l == 0)
}

/// `f̃ = f − f̄`
pub fn project_z_nonzero(f: &SpectralField) -> SpectralField {
    f.filtered(|w| w.l != 0)
}

/// Sobolev norm of a single component with weight `⟨k, η, l⟩^s`.
pub fn sobolev_norm_component(grid: &Grid, coeffs: &[Complex64], s: f64) -> f64 {
    let mut acc = 0.0;
    for (idx, z) in coeffs.iter().enumerate() {
        let n2 = z.norm_sqr();
        if n2 == 0.0 {
            continue;
        }
        let w = grid.wavevector_at(idx);
        acc += (1.0 + w.norm_sq()).powf(s) * n2;
    }
    acc.sqrt()
}

/// `‖f‖_{H^s} = ( Σ ⟨k, η, l⟩^{2s} |f̂|² )^{1/2}` summed over components.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    f.comps
        .iter()
        .map(|c| sobolev_norm_component(&f.grid, c, s).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Applies `I − ∇_L Δ_L^{-1} ∇_L·` at time `t` to a single mode.
/// The mean mode is returned unchanged.
#[inline]
pub fn leray_mode(t: f64, w: Wavevector, u: [Complex64; 3]) -> Result<[Complex64; 3]> {
    if w.is_mean() {
        return Ok(u);
    }
    let xi = w.sheared_eta(t);
    let kv = [w.k as f64, xi, w.l as f64];
    let p = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
    if p == 0.0 {
        return Err(Error::SingularMode {
            k: w.k,
            eta: w.eta,
            l: w.l,
        });
    }
    let dot = kv[0] * u[0] + kv[1] * u[1] + kv[2] * u[2];
    let f = dot / p;
    Ok([u[0] - kv[0] * f, u[1] - kv[1] * f, u[2] - kv[2] * f])
}

/// Moving-frame divergence-free projection.
pub fn leray_project_moving(t: f64, f: &SpectralField) -> Result<SpectralField> {
    if (t - f.frame_time).abs() > 1e-12 * t.abs().max(1.0) {
        return Err(Error::ContractViolation(format!(
            "projection time {t} differs from frame time {}",
            f.frame_time
        )));
    }
    let mut out = f.clone();
    leray_project_in_place(t, &mut out)?;
    Ok(out)
}

pub(crate) fn leray_project_in_place(t: f64, f: &mut SpectralField) -> Result<()> {
    let g = f.grid;
    for idx in 0..g.len() {
        let w = g.wavevector_at(idx);
        let u = [f.comps[0][idx], f.comps[1][idx], f.comps[2][idx]];
        let v = leray_mode(t, w, u)?;
        for c in 0..3 {
            f.comps[c][idx] = v[c];
        }
    }
    Ok(())
}
