//! Binary field files: the magic `GRIDFLD1`, `N` as `u64`, `L` as `f64`, then
//! `N²` pairs `(re, im)` of `f64`, row-major with the `x₁` index fastest.
//! Everything is little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::GridField;
use crate::error::{Error, Result};

pub const FIELD_MAGIC: &[u8; 8] = b"GRIDFLD1";

pub fn encode_field(f: &GridField, mut out: impl Write) -> Result<()> {
    out.write_all(FIELD_MAGIC)?;
    out.write_all(&(f.n() as u64).to_le_bytes())?;
    out.write_all(&f.l().to_le_bytes())?;
    for v in f.values() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn decode_field(mut input: impl Read) -> Result<GridField> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    if &word != FIELD_MAGIC {
        return Err(Error::Format("not a field file (bad magic)".into()));
    }
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word);
    if n > 1 << 14 {
        return Err(Error::Format(format!("grid size {n} is implausibly large")));
    }
    let n = n as usize;
    input.read_exact(&mut word)?;
    let l = f64::from_le_bytes(word);
    let mut values = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        input.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        input.read_exact(&mut word)?;
        values.push(Complex64::new(re, f64::from_le_bytes(word)));
    }
    if input.read(&mut word)? != 0 {
        return Err(Error::Format("trailing bytes after the last sample".into()));
    }
    GridField::new(n, l, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_field(path: impl AsRef<Path>, f: &GridField) -> Result<()> {
    encode_field(f, BufWriter::new(File::create(path)?))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<GridField> {
    decode_field(BufReader::new(File::open(path)?))
}
