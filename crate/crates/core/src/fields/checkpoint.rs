//! Flat binary field checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"LRSF" | version: u32 | n: u32 | L: f64 | component 0 | component 1 | ...
//! ```
//!
//! Each component is n³ f64 values in row-major grid order. A file holds
//! either one (scalar) or three (vector) components; the count follows from
//! the file length.

use std::io::{Read, Write};
use std::path::Path;

use super::{GridSpec, ScalarField, VectorField};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"LRSF";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoint {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl Checkpoint {
    fn components(&self) -> Vec<&ScalarField> {
        match self {
            Checkpoint::Scalar(s) => vec![s],
            Checkpoint::Vector(v) => v.components().iter().collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        match self {
            Checkpoint::Scalar(s) => s.grid(),
            Checkpoint::Vector(v) => v.grid(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.grid();
        let comps = self.components();
        let mut out = Vec::with_capacity(HEADER_LEN + comps.len() * g.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(g.n() as u32).to_le_bytes());
        out.extend_from_slice(&g.half_width().to_le_bytes());
        for c in comps {
            for v in c.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("file too short ({} bytes)", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Format("bad magic, expected LRSF".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let half_width = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
        let grid = GridSpec::new(n, half_width)?;
        let body = &bytes[HEADER_LEN..];
        let per = grid.len() * 8;
        let count = body.len() / per;
        if body.len() % per != 0 || !(count == 1 || count == 3) {
            return Err(Error::Format(format!(
                "payload of {} bytes is not 1 or 3 components of {per} bytes",
                body.len()
            )));
        }
        let mut comps = body.chunks_exact(per).map(|chunk| {
            let values = chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect();
            ScalarField::new(grid, values)
        });
        if count == 1 {
            Ok(Checkpoint::Scalar(comps.next().unwrap()?))
        } else {
            let a = comps.next().unwrap()?;
            let b = comps.next().unwrap()?;
            let c = comps.next().unwrap()?;
            Ok(Checkpoint::Vector(VectorField::new([a, b, c])?))
        }
    }
}

pub fn write_checkpoint(path: impl AsRef<Path>, field: &Checkpoint) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&field.to_bytes())?;
    Ok(())
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    Checkpoint::from_bytes(&bytes)
}

pub fn read_vector_checkpoint(path: impl AsRef<Path>) -> Result<VectorField> {
    match read_checkpoint(path)? {
        Checkpoint::Vector(v) => Ok(v),
        Checkpoint::Scalar(_) => Err(Error::Format("expected a vector field, found a scalar".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = GridSpec::new(8, 2.5).unwrap();
        let bytes = Checkpoint::Scalar(ScalarField::constant(g, 1.5)).to_bytes();
        assert_eq!(&bytes[0..4], b"LRSF");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), 2.5);
        assert_eq!(bytes.len(), 20 + 512 * 8);
        assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 1.5);
    }

    #[test]
    fn rejects_corrupt_input() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let mut bytes = Checkpoint::Scalar(ScalarField::zeros(g)).to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..10]).is_err());
        bytes.pop();
        assert!(matches!(Checkpoint::from_bytes(&bytes), Err(Error::Format(_))));
        let mut bad_magic = Checkpoint::Scalar(ScalarField::zeros(g)).to_bytes();
        bad_magic[0] = b'X';
        assert!(Checkpoint::from_bytes(&bad_magic).is_err());
    }

    proptest! {
        #[test]
        fn vector_roundtrip_is_bit_exact(seed in any::<u64>(), l in 0.1f64..100.0) {
            let g = GridSpec::new(8, l).unwrap();
            let s = seed as f64;
            let v = VectorField::from_fn(g, |p| [
                (p[0] * 1.7 + s).sin() * 1e3,
                (p[1] + p[2] * s.cos()).cos(),
                p[0] * p[1] - s * 1e-300,
            ]);
            let back = Checkpoint::from_bytes(&Checkpoint::Vector(v.clone()).to_bytes()).unwrap();
            let Checkpoint::Vector(w) = back else { panic!("expected vector") };
            for d in 0..3 {
                let a: Vec<u64> = v.component(d).values().iter().map(|x| x.to_bits()).collect();
                let b: Vec<u64> = w.component(d).values().iter().map(|x| x.to_bits()).collect();
                prop_assert_eq!(a, b);
            }
            prop_assert_eq!(w.grid(), v.grid());
        }
    }
}
