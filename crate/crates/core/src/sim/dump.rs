//! Binary dump of one ensemble draw, for inspecting samples outside Rust.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 0..8  | magic `PFENSMB1` |
//! | 8..24 | `N`, `M`, `s`, tag bits as `u32` |
//! | 24..32 | reserved, zero |
//!
//! Then, for each present part in tag order, `s` blocks: permutations as
//! `u32` zero-based images, matrices as row-major `(f32 re, f32 im)` pairs.
//! Rectangular draws store `T_r` (on `[M]`) before the `M×N` Gaussians.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{ComplexMatrix, EnsembleSample, ModelTags};
use crate::error::{Error, Result};
use crate::perm::Perm;

pub const MAGIC: &[u8; 8] = b"PFENSMB1";

fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn put_perm(w: &mut impl Write, p: &Perm) -> Result<()> {
    p.images0().iter().try_for_each(|&i| put_u32(w, i))
}

fn get_perm(r: &mut impl Read, n: usize) -> Result<Perm> {
    let images = (0..n)
        .map(|_| get_u32(r).map(|v| v as usize + 1))
        .collect::<Result<Vec<_>>>()?;
    Perm::from_images(&images)
}

fn put_matrix(w: &mut impl Write, m: &ComplexMatrix) -> Result<()> {
    for z in m.as_slice() {
        w.write_all(&(z.re as f32).to_le_bytes())?;
        w.write_all(&(z.im as f32).to_le_bytes())?;
    }
    Ok(())
}

fn get_matrix(r: &mut impl Read, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    let mut buf = vec![0u8; rows * cols * 8];
    r.read_exact(&mut buf)?;
    let mut it = buf
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64);
    Ok(ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re = it.next().unwrap_or_default();
        let im = it.next().unwrap_or_default();
        Complex64::new(re, im)
    }))
}

/// Writes the draw; values are rounded to single precision.
pub fn write_ensemble(w: &mut impl Write, e: &EnsembleSample) -> Result<()> {
    w.write_all(MAGIC)?;
    for v in [e.n, e.m, e.s] {
        put_u32(w, v as u32)?;
    }
    put_u32(w, e.tags.0)?;
    w.write_all(&[0u8; 8])?;
    e.sigmas.iter().try_for_each(|p| put_perm(w, p))?;
    e.gauss.iter().try_for_each(|g| put_matrix(w, g))?;
    e.wishart.iter().try_for_each(|g| put_matrix(w, g))?;
    e.t_perms.iter().try_for_each(|p| put_perm(w, p))?;
    e.rect.iter().try_for_each(|g| put_matrix(w, g))?;
    Ok(())
}

/// Reads a draw written by [`write_ensemble`].
pub fn read_ensemble(r: &mut impl Read) -> Result<EnsembleSample> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::validation("not an ensemble dump"));
    }
    let n = get_u32(r)? as usize;
    let m = get_u32(r)? as usize;
    let s = get_u32(r)? as usize;
    let tags = ModelTags(get_u32(r)?);
    r.read_exact(&mut [0u8; 8])?;
    let has = |t| tags.contains(t);
    let count = |on: bool| if on { s } else { 0 };
    let sigmas = (0..count(has(ModelTags::PERM) || has(ModelTags::RECT)))
        .map(|_| get_perm(r, n))
        .collect::<Result<_>>()?;
    let gauss = (0..count(has(ModelTags::GAUSS)))
        .map(|_| get_matrix(r, n, n))
        .collect::<Result<_>>()?;
    let wishart = (0..count(has(ModelTags::WISHART)))
        .map(|_| get_matrix(r, n, n))
        .collect::<Result<_>>()?;
    let t_perms = (0..count(has(ModelTags::RECT)))
        .map(|_| get_perm(r, m))
        .collect::<Result<_>>()?;
    let rect = (0..count(has(ModelTags::RECT)))
        .map(|_| get_matrix(r, m, n))
        .collect::<Result<_>>()?;
    Ok(EnsembleSample {
        n,
        m,
        s,
        tags,
        sigmas,
        gauss,
        wishart,
        t_perms,
        rect,
    })
}
