//! Byte masks selecting pixels of a stack.
//!
//! Layout (little-endian): magic "PMSK", version u16 (1), reserved u16 (0),
//! rows u32, cols u32, then one byte per pixel in row-major order; any
//! nonzero byte selects the pixel.

use crate::error::{Error, Result};
use std::fs;
use std::path::Path;

pub const MASK_MAGIC: [u8; 4] = *b"PMSK";
pub const MASK_VERSION: u16 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Mask { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_selected(&self, row: usize, col: usize) -> bool {
        self.data[row * self.cols + col] != 0
    }

    /// Row-major indices of selected pixels.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.data.iter().enumerate().filter(|(_, &b)| b != 0).map(|(i, _)| i)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len());
        out.extend_from_slice(&MASK_MAGIC);
        out.extend_from_slice(&MASK_VERSION.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[..4].try_into().expect("four bytes");
        if magic != MASK_MAGIC {
            return Err(Error::MagicMismatch {
                expected: MASK_MAGIC,
                found: magic,
            });
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != MASK_VERSION {
            return Err(Error::MalformedHeader(format!("unsupported mask version {version}")));
        }
        let rows = u32::from_le_bytes(bytes[8..12].try_into().expect("four bytes")) as usize;
        let cols = u32::from_le_bytes(bytes[12..16].try_into().expect("four bytes")) as usize;
        let expected = HEADER_LEN + rows * cols;
        match bytes.len().cmp(&expected) {
            std::cmp::Ordering::Less => Err(Error::Truncated {
                expected,
                found: bytes.len(),
            }),
            std::cmp::Ordering::Greater => Err(Error::MalformedHeader(format!(
                "{} trailing bytes after mask",
                bytes.len() - expected
            ))),
            std::cmp::Ordering::Equal => Mask::new(rows, cols, bytes[HEADER_LEN..].to_vec()),
        }
    }
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    Mask::from_bytes(&fs::read(path)?)
}

pub fn write_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, mask.to_bytes())?;
    Ok(())
}
