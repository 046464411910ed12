//! Axis-by-axis 3D complex FFT over the `(x, y, z)` storage layout.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::frequency::Grid;

/// Planned transforms for one grid shape. Neither direction normalizes.
pub struct Fft3 {
    nx: usize,
    ny: usize,
    nz: usize,
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        let mut planner = FftPlanner::new();
        let mut plan = |n, dir| planner.plan_fft(n, dir);
        Self {
            nx,
            ny,
            nz,
            fwd: [
                plan(nx, FftDirection::Forward),
                plan(ny, FftDirection::Forward),
                plan(nz, FftDirection::Forward),
            ],
            inv: [
                plan(nx, FftDirection::Inverse),
                plan(ny, FftDirection::Inverse),
                plan(nz, FftDirection::Inverse),
            ],
        }
    }

    pub fn for_grid(grid: &Grid) -> Self {
        Self::new(grid.nx, grid.ny, grid.nz)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ_x f(x) e^{-i κ·x}`
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    /// `Σ_κ f̂(κ) e^{+i κ·x}`
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.len(), "buffer does not match FFT shape");
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);

        // z: contiguous lines
        data.par_chunks_mut(nz * ny).for_each(|slab| plans[2].process(slab));

        // y: strided by nz inside each x-slab
        data.par_chunks_mut(ny * nz).for_each(|slab| {
            let mut line = vec![Complex64::new(0.0, 0.0); ny * nz];
            for iy in 0..ny {
                for iz in 0..nz {
                    line[iz * ny + iy] = slab[iy * nz + iz];
                }
            }
            plans[1].process(&mut line);
            for iy in 0..ny {
                for iz in 0..nz {
                    slab[iy * nz + iz] = line[iz * ny + iy];
                }
            }
        });

        // x: strided by ny * nz; one y-plane at a time
        let stride = ny * nz;
        let mut buf = vec![Complex64::new(0.0, 0.0); nx * nz];
        for iy in 0..ny {
            for ix in 0..nx {
                let base = ix * stride + iy * nz;
                for iz in 0..nz {
                    buf[iz * nx + ix] = data[base + iz];
                }
            }
            plans[0].process(&mut buf);
            for ix in 0..nx {
                let base = ix * stride + iy * nz;
                for iz in 0..nz {
                    data[base + iz] = buf[iz * nx + ix];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn naive_dft(data: &[Complex64], n: (usize, usize, usize), sign: f64) -> Vec<Complex64> {
        let (nx, ny, nz) = n;
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for kx in 0..nx {
            for ky in 0..ny {
                for kz in 0..nz {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..nx {
                        for y in 0..ny {
                            for z in 0..nz {
                                let ph = 2.0
                                    * PI
                                    * ((kx * x) as f64 / nx as f64
                                        + (ky * y) as f64 / ny as f64
                                        + (kz * z) as f64 / nz as f64);
                                acc += data[(x * ny + y) * nz + z]
                                    * Complex64::from_polar(1.0, sign * ph);
                            }
                        }
                    }
                    out[(kx * ny + ky) * nz + kz] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_anisotropic_shape() {
        let n = (4, 6, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<Complex64> = (0..n.0 * n.1 * n.2)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let fft = Fft3::new(n.0, n.1, n.2);
        let mut f = data.clone();
        fft.forward(&mut f);
        let want = naive_dft(&data, n, -1.0);
        for (a, b) in f.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-11);
        }
        let mut g = data.clone();
        fft.inverse(&mut g);
        let want = naive_dft(&data, n, 1.0);
        for (a, b) in g.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn round_trip_scales_by_length() {
        let fft = Fft3::new(8, 16, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let data: Vec<Complex64> = (0..fft.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut f = data.clone();
        fft.forward(&mut f);
        fft.inverse(&mut f);
        let n = fft.len() as f64;
        for (a, b) in f.iter().zip(data.iter()) {
            assert!((a / n - b).norm() < 1e-13);
        }
    }
}
