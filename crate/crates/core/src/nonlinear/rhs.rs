//! Non-viscous right-hand side of the perturbation equations in the moving
//! frame, per mode with `κ̂ = (k, η − kt, l)`:
//!
//! ```text
//! ∂_t Û = −((1 − β) Û², β Û¹, 0) − (β − 2) (k/p) κ̂ Û² + β (ξ/p) κ̂ Û¹
//!         − P_t [ i κ̂_j (U_i U_j)^ ]
//! ```
//!
//! The linear part keeps `κ̂ · Û = 0` in time; the quadratic part is
//! evaluated pseudo-spectrally in divergence form and projected.

use num_complex::Complex64;

use super::config::RhsTerms;
use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::frequency::{Grid, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Precomputed transforms and band information for one grid.
pub struct RhsEngine {
    grid: Grid,
    fft: Fft3,
    mask: Vec<bool>,
    conj: Vec<usize>,
    beta: f64,
    terms: RhsTerms,
}

/// Right-hand side together with the physical-space velocity maxima
/// `max |u_i|` of the input.
pub struct RhsOutput {
    pub rhs: SpectralField,
    pub max_velocity: [f64; 3],
}

impl RhsEngine {
    pub fn new(grid: Grid, beta: f64, terms: RhsTerms) -> Self {
        let conj = (0..grid.len())
            .map(|idx| {
                let (ix, iy, iz) = grid.split(idx);
                grid.conj_index(ix, iy, iz)
            })
            .collect();
        Self {
            grid,
            fft: Fft3::for_grid(&grid),
            mask: grid.band_mask(),
            conj,
            beta,
            terms,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn terms(&self) -> RhsTerms {
        self.terms
    }

    /// Rejects content outside the dealiased band.
    pub fn check_band(&self, u: &SpectralField) -> Result<()> {
        for (idx, keep) in self.mask.iter().enumerate() {
            if !keep && u.comps.iter().any(|c| c[idx] != ZERO) {
                let w = self.grid.wavevector_at(idx);
                return Err(Error::ContractViolation(format!(
                    "content outside the dealiased band at (k={}, eta={}, l={})",
                    w.k, w.eta, w.l
                )));
            }
        }
        Ok(())
    }

    /// Evaluates the active terms at time `t`.
    pub fn eval(&self, t: f64, u: &SpectralField) -> Result<RhsOutput> {
        self.check_band(u)?;
        let mut out = SpectralField::zeros(self.grid, t);
        let mut max_velocity = [0.0; 3];
        if self.terms.nonlinear {
            max_velocity = self.add_nonlinear(t, u, &mut out);
        } else if self.terms.linear {
            max_velocity = self.velocity_maxima(u);
        }
        if self.terms.linear {
            self.add_linear(t, u, &mut out);
        }
        Ok(RhsOutput {
            rhs: out,
            max_velocity,
        })
    }

    fn add_linear(&self, t: f64, u: &SpectralField, out: &mut SpectralField) {
        let g = &self.grid;
        let beta = self.beta;
        for idx in 0..g.len() {
            if !self.mask[idx] {
                continue;
            }
            let w = g.wavevector_at(idx);
            let kv = [w.k as f64, w.sheared_eta(t), w.l as f64];
            let p = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
            if p == 0.0 {
                continue;
            }
            let (u1, u2) = (u.comps[0][idx], u.comps[1][idx]);
            let s = -(beta - 2.0) * kv[0] / p * u2 + beta * kv[1] / p * u1;
            out.comps[0][idx] += -(1.0 - beta) * u2 + kv[0] * s;
            out.comps[1][idx] += -beta * u1 + kv[1] * s;
            out.comps[2][idx] += kv[2] * s;
        }
    }

    fn to_physical(&self, u: &SpectralField) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.len();
        let mut a = vec![ZERO; n];
        let mut b = vec![ZERO; n];
        for idx in 0..n {
            if self.mask[idx] {
                a[idx] = u.comps[0][idx] + I * u.comps[1][idx];
                b[idx] = u.comps[2][idx];
            }
        }
        self.fft.inverse(&mut a);
        self.fft.inverse(&mut b);
        (a, b)
    }

    pub fn velocity_maxima(&self, u: &SpectralField) -> [f64; 3] {
        let (a, b) = self.to_physical(u);
        let mut m = [0.0f64; 3];
        for (x, y) in a.iter().zip(b.iter()) {
            m[0] = m[0].max(x.re.abs());
            m[1] = m[1].max(x.im.abs());
            m[2] = m[2].max(y.re.abs());
        }
        m
    }

    /// Adds `−P_t[∂_j^L (U_i U_j)]` and returns the physical velocity maxima.
    fn add_nonlinear(&self, t: f64, u: &SpectralField, out: &mut SpectralField) -> [f64; 3] {
        let g = &self.grid;
        let n = g.len();
        let (a, b) = self.to_physical(u);
        let mut maxima = [0.0f64; 3];
        // pack the six products pairwise: (11, 12), (13, 22), (23, 33)
        let mut c1 = vec![ZERO; n];
        let mut c2 = vec![ZERO; n];
        let mut c3 = vec![ZERO; n];
        for x in 0..n {
            let (u1, u2, u3) = (a[x].re, a[x].im, b[x].re);
            maxima[0] = maxima[0].max(u1.abs());
            maxima[1] = maxima[1].max(u2.abs());
            maxima[2] = maxima[2].max(u3.abs());
            c1[x] = Complex64::new(u1 * u1, u1 * u2);
            c2[x] = Complex64::new(u1 * u3, u2 * u2);
            c3[x] = Complex64::new(u2 * u3, u3 * u3);
        }
        self.fft.forward(&mut c1);
        self.fft.forward(&mut c2);
        self.fft.forward(&mut c3);
        let inv_n = 1.0 / n as f64;
        let split = |c: &[Complex64], idx: usize, cj: usize| {
            let (z, zc) = (c[idx], c[cj].conj());
            ((z + zc) * (0.5 * inv_n), (z - zc) * (0.5 * inv_n) / I)
        };
        for idx in 0..n {
            if !self.mask[idx] {
                continue;
            }
            let w = g.wavevector_at(idx);
            let kv = [w.k as f64, w.sheared_eta(t), w.l as f64];
            let p = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
            if p == 0.0 {
                continue;
            }
            let cj = self.conj[idx];
            let (t11, t12) = split(&c1, idx, cj);
            let (t13, t22) = split(&c2, idx, cj);
            let (t23, t33) = split(&c3, idx, cj);
            let tm = [[t11, t12, t13], [t12, t22, t23], [t13, t23, t33]];
            let mut nl = [ZERO; 3];
            for i in 0..3 {
                nl[i] = -I * (kv[0] * tm[i][0] + kv[1] * tm[i][1] + kv[2] * tm[i][2]);
            }
            let dot = (kv[0] * nl[0] + kv[1] * nl[1] + kv[2] * nl[2]) / p;
            for i in 0..3 {
                out.comps[i][idx] += nl[i] - kv[i] * dot;
            }
        }
        maxima
    }
}

/// The full non-viscous right-hand side at time `t`.
pub fn nonlinear_rhs(t: f64, u: &SpectralField, beta: f64, terms: RhsTerms) -> Result<SpectralField> {
    Ok(RhsEngine::new(u.grid, beta, terms).eval(t, u)?.rhs)
}
