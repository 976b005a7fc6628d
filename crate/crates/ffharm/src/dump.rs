//! `FFGF` binary dump of a grid function.
//!
//! Layout, all little-endian: magic `FFGF`, `u8` format version (1), `u8`
//! side (0 primal, 1 dual), `u32` q, `u32` d, `u64` length, then `length`
//! pairs of `f64` (re, im) in grid-index order.

use std::io::{self, Read, Write};

use ffharm_core::fourier::{AnyGridFunction, GridFunction, SideKind};
use ffharm_core::{Complex64, FiniteField};

pub const MAGIC: &[u8; 4] = b"FFGF";
pub const FORMAT_VERSION: u8 = 1;

pub fn write_dump<W: Write>(w: &mut W, f: &AnyGridFunction) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[FORMAT_VERSION, if f.side() == SideKind::Primal { 0 } else { 1 }])?;
    w.write_all(&f.field().order().to_le_bytes())?;
    w.write_all(&(f.dim() as u32).to_le_bytes())?;
    w.write_all(&(f.values().len() as u64).to_le_bytes())?;
    for z in f.values() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn read_dump<R: Read>(r: &mut R) -> io::Result<AnyGridFunction> {
    let mut head = [0u8; 22];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(bad("not an FFGF dump"));
    }
    if head[4] != FORMAT_VERSION {
        return Err(bad("unsupported FFGF version"));
    }
    let side = head[5];
    let q = u32::from_le_bytes(head[6..10].try_into().unwrap());
    let d = u32::from_le_bytes(head[10..14].try_into().unwrap()) as usize;
    let len = u64::from_le_bytes(head[14..22].try_into().unwrap()) as usize;
    let field = FiniteField::of_order(u64::from(q)).map_err(|e| bad(&e.to_string()))?;
    let mut buf = vec![0u8; len.checked_mul(16).ok_or_else(|| bad("length overflow"))?];
    r.read_exact(&mut buf)?;
    let values: Vec<Complex64> = buf
        .chunks_exact(16)
        .map(|c| Complex64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
        .collect();
    match side {
        0 => GridFunction::new(&field, d, values).map(AnyGridFunction::Primal),
        1 => GridFunction::new(&field, d, values).map(AnyGridFunction::Dual),
        _ => return Err(bad("bad side tag")),
    }
    .map_err(|e| bad(&e.to_string()))
}
