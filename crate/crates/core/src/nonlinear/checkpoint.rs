//! Binary checkpoints.
//!
//! Layout, little-endian: magic `NSCR1`, `nx ny nz` as `u32`,
//! `L_y dealias ν β t` as `f64`, `seed` as `u64`, then the three velocity
//! components as consecutive `(re, im)` `f64` pairs in storage order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frequency::{Grid, SpectralField};
use crate::linear::PhysicsParams;

pub const MAGIC: &[u8; 5] = b"NSCR1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub state: SpectralField,
    pub prm: PhysicsParams,
    pub seed: u64,
}

pub fn write_checkpoint<W: Write>(mut w: W, ck: &Checkpoint) -> Result<()> {
    let g = ck.state.grid;
    w.write_all(MAGIC)?;
    for n in [g.nx, g.ny, g.nz] {
        let n = u32::try_from(n).map_err(|_| Error::Checkpoint("grid too large".into()))?;
        w.write_u32::<LittleEndian>(n)?;
    }
    for v in [g.ly, g.dealias_fraction, ck.prm.nu, ck.prm.beta, ck.state.frame_time] {
        w.write_f64::<LittleEndian>(v)?;
    }
    w.write_u64::<LittleEndian>(ck.seed)?;
    for c in &ck.state.comps {
        for z in c {
            w.write_f64::<LittleEndian>(z.re)?;
            w.write_f64::<LittleEndian>(z.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!("bad magic {magic:?}")));
    }
    let nx = r.read_u32::<LittleEndian>()? as usize;
    let ny = r.read_u32::<LittleEndian>()? as usize;
    let nz = r.read_u32::<LittleEndian>()? as usize;
    let mut f = [0.0; 5];
    for v in f.iter_mut() {
        *v = r.read_f64::<LittleEndian>()?;
    }
    let [ly, dealias, nu, beta, t] = f;
    let seed = r.read_u64::<LittleEndian>()?;
    let grid = Grid::with_dealias(nx, ny, nz, ly, dealias)?;
    let prm = PhysicsParams::new(nu, beta)?;
    let mut state = SpectralField::zeros(grid, t);
    for c in state.comps.iter_mut() {
        for z in c.iter_mut() {
            let re = r.read_f64::<LittleEndian>()?;
            let im = r.read_f64::<LittleEndian>()?;
            *z = Complex64::new(re, im);
        }
    }
    Ok(Checkpoint { state, prm, seed })
}

pub fn save(path: &Path, ck: &Checkpoint) -> Result<()> {
    write_checkpoint(BufWriter::new(File::create(path)?), ck)
}

pub fn load(path: &Path) -> Result<Checkpoint> {
    read_checkpoint(BufReader::new(File::open(path)?))
}
