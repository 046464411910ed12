use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::checkpoint;
use super::config::{InitProfile, SimulationConfig};
use crate::error::{Error, Result};
use crate::frequency::{leray_project_in_place, sobolev_norm, SpectralField};

/// Divergence-free, band-limited initial field with `‖u‖_{H^σ} = ε`.
pub fn make_initial_data(cfg: &SimulationConfig) -> Result<SpectralField> {
    let g = cfg.grid;
    let mask = g.band_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut f = match &cfg.init {
        InitProfile::File(path) => {
            let ck = checkpoint::load(path)?;
            if ck.state.grid != g {
                return Err(Error::InvalidParams(format!(
                    "checkpoint grid {:?} does not match configured grid {:?}",
                    ck.state.grid, g
                )));
            }
            return Ok(ck.state);
        }
        InitProfile::RandomDivFree => {
            let mut f = SpectralField::zeros(g, 0.0);
            for idx in 1..g.len() {
                if !mask[idx] {
                    continue;
                }
                let env = (-g.wavevector_at(idx).norm_sq() / 8.0).exp();
                for c in f.comps.iter_mut() {
                    c[idx] = env * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            f
        }
        InitProfile::SingleMode { k, j, l } => {
            let mut f = SpectralField::zeros(g, 0.0);
            let idx = g
                .index_of(*k, *j, *l)
                .filter(|i| mask[*i] && *i != 0)
                .ok_or_else(|| {
                    Error::InvalidParams(format!("mode ({k},{j},{l}) is not a resolved nonmean mode"))
                })?;
            let mut v = [Complex64::new(0.0, 0.0); 3];
            for z in v.iter_mut() {
                *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let (ix, iy, iz) = g.split(idx);
            let cj = g.conj_index(ix, iy, iz);
            for c in 0..3 {
                f.comps[c][idx] = v[c];
                f.comps[c][cj] = v[c].conj();
            }
            f
        }
    };
    f.enforce_hermitian();
    leray_project_in_place(0.0, &mut f)?;
    let norm = sobolev_norm(&f, cfg.sigma);
    if cfg.epsilon == 0.0 {
        return Ok(SpectralField::zeros(g, 0.0));
    }
    if !(norm > 0.0) {
        return Err(Error::InvalidParams(
            "initial data vanishes after projection; cannot normalize".into(),
        ));
    }
    f.scale(cfg.epsilon / norm);
    Ok(f)
}
