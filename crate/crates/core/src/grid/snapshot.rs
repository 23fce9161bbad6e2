//! Binary field snapshot.
//!
//! Layout, all little-endian: magic `VELAB1`, `n: u32`, `L: f64`, `t: f64`,
//! then `G₁₁, G₁₂, …, G₃₃, v₁, v₂, v₃`, each as `n³` `f64` values with `x₃`
//! varying fastest.

use std::io::{Read, Write};

use super::{make_grid, MatrixField, ScalarField, State, VectorField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"VELAB1";

/// Header size in bytes.
pub const HEADER_LEN: usize = 6 + 4 + 8 + 8;

/// Snapshot header fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Header {
    pub n: u32,
    pub length: f64,
    pub t: f64,
}

pub fn write_state<W: Write>(mut w: W, state: &State) -> Result<()> {
    let grid = state.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    w.write_all(&state.t.to_le_bytes())?;
    let mut buf = Vec::with_capacity(grid.len() * 8);
    for comp in state.components() {
        buf.clear();
        for v in comp.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_header<R: Read>(mut r: R) -> Result<Header> {
    let mut head = [0u8; HEADER_LEN];
    read_exact(&mut r, &mut head, "header")?;
    if &head[..6] != MAGIC {
        return Err(Error::SnapshotFormat(format!(
            "bad magic {:?}",
            String::from_utf8_lossy(&head[..6])
        )));
    }
    let n = u32::from_le_bytes(head[6..10].try_into().unwrap());
    let length = f64::from_le_bytes(head[10..18].try_into().unwrap());
    let t = f64::from_le_bytes(head[18..26].try_into().unwrap());
    Ok(Header { n, length, t })
}

pub fn read_state<R: Read>(mut r: R) -> Result<State> {
    let header = read_header(&mut r)?;
    let grid = make_grid(header.n as usize, header.length)
        .map_err(|e| Error::SnapshotFormat(format!("header describes no valid grid: {e}")))?;
    let len = grid.len();
    let mut bytes = vec![0u8; len * 8];
    let mut comps = Vec::with_capacity(12);
    for c in 0..12 {
        read_exact(&mut r, &mut bytes, "field data")
            .map_err(|_| Error::SnapshotFormat(format!("truncated in component {c}")))?;
        let data = bytes
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        comps.push(ScalarField::from_vec(&grid, data)?);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::SnapshotFormat("trailing bytes after field data".into()));
    }
    let mut it = comps.into_iter();
    let g = MatrixField(std::array::from_fn(|_| {
        std::array::from_fn(|_| it.next().unwrap())
    }));
    let v = VectorField(std::array::from_fn(|_| it.next().unwrap()));
    State::new(header.t, g, v)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::SnapshotFormat(format!("truncated {what}")),
        _ => Error::Io(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> State {
        let g = make_grid(8, 1.5).unwrap();
        let mut s = State::zeros(&g, 0.375);
        for (c, comp) in s.g.0.iter_mut().flatten().enumerate() {
            *comp = ScalarField::from_fn(&g, |x| (c as f64 + 1.0) * x[0] - x[2] * x[1]);
        }
        s.v = VectorField::from_fn(&g, |x| [x[2], -x[0], 1e-300]);
        s
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_state(&mut buf, &sample()).unwrap();
        assert_eq!(&buf[..6], b"VELAB1");
        assert_eq!(u32::from_le_bytes(buf[6..10].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(buf[10..18].try_into().unwrap()), 1.5);
        assert_eq!(f64::from_le_bytes(buf[18..26].try_into().unwrap()), 0.375);
        assert_eq!(buf.len(), HEADER_LEN + 12 * 512 * 8);
        // first G11 sample at (0,0,0): x = (-0.75,-0.75,-0.75)
        let first = f64::from_le_bytes(buf[26..34].try_into().unwrap());
        assert_eq!(first, -0.75 - 0.75 * 0.75);
    }

    #[test]
    fn bad_magic_and_truncation() {
        let mut buf = Vec::new();
        write_state(&mut buf, &sample()).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_state(&bad[..]), Err(Error::SnapshotFormat(_))));
        let short = &buf[..buf.len() - 3];
        assert!(matches!(read_state(short), Err(Error::SnapshotFormat(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(read_state(&long[..]).is_err());
    }
}
