//! Covariance stacks: a `rows × cols` image of m×m Hermitian pixels.
//!
//! Binary layout (little-endian throughout):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "PCSK"
//!      4     2  version (1)
//!      6     2  m
//!      8     4  rows
//!     12     4  cols
//!     16        pixels, row-major; each pixel is m diagonal f64 followed by
//!               m(m-1)/2 upper-triangle (re, im) f64 pairs, row-major
//! ```
//!
//! The CSV interchange form stores one pixel per line with the same field
//! order. Lines starting with `#` are comments; a `# rows=R cols=C` comment
//! fixes the image shape, otherwise the stack is a single column.

use crate::error::{Error, Result};
use crate::matrix::{upper_len, HermitianMatrix};
use num_complex::Complex64;
use std::fs;
use std::path::Path;

pub const STACK_MAGIC: [u8; 4] = *b"PCSK";
pub const STACK_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceStack {
    m: usize,
    rows: usize,
    cols: usize,
    pixels: Vec<HermitianMatrix>,
}

impl CovarianceStack {
    pub fn new(rows: usize, cols: usize, pixels: Vec<HermitianMatrix>) -> Result<Self> {
        if pixels.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: pixels.len(),
            });
        }
        let m = pixels.first().map(HermitianMatrix::dim).ok_or(Error::EmptySelection)?;
        if let Some(bad) = pixels.iter().find(|p| p.dim() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.dim(),
            });
        }
        Ok(CovarianceStack { m, rows, cols, pixels })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[HermitianMatrix] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> &HermitianMatrix {
        &self.pixels[row * self.cols + col]
    }

    fn values_per_pixel(&self) -> usize {
        self.m * self.m
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.pixels.len() * self.values_per_pixel() * 8);
        out.extend_from_slice(&STACK_MAGIC);
        out.extend_from_slice(&STACK_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.m as u16).to_le_bytes());
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        for p in &self.pixels {
            let (diag, upper) = p.to_upper_fields();
            for d in diag {
                out.extend_from_slice(&d.to_le_bytes());
            }
            for z in upper {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[..4].try_into().expect("four bytes");
        if magic != STACK_MAGIC {
            return Err(Error::MagicMismatch {
                expected: STACK_MAGIC,
                found: magic,
            });
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("four bytes"));
        let version = u16_at(4);
        if version != STACK_VERSION {
            return Err(Error::MalformedHeader(format!("unsupported version {version}")));
        }
        let m = u16_at(6) as usize;
        let rows = u32_at(8) as usize;
        let cols = u32_at(12) as usize;
        if m == 0 || rows == 0 || cols == 0 {
            return Err(Error::MalformedHeader(format!("zero dimension (m={m}, rows={rows}, cols={cols})")));
        }
        let per_pixel = m * m;
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(per_pixel * 8))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| Error::MalformedHeader("image dimensions overflow".into()))?;
        if bytes.len() < expected {
            return Err(Error::Truncated {
                expected,
                found: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(Error::MalformedHeader(format!(
                "{} trailing bytes after payload",
                bytes.len() - expected
            )));
        }
        let mut values = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")));
        let mut pixels = Vec::with_capacity(rows * cols);
        for idx in 0..rows * cols {
            let diag: Vec<f64> = values.by_ref().take(m).collect();
            let upper: Vec<Complex64> = (0..upper_len(m))
                .map(|_| {
                    let re = values.next().expect("length checked");
                    let im = values.next().expect("length checked");
                    Complex64::new(re, im)
                })
                .collect();
            pixels.push(pixel(idx, cols, &diag, &upper)?);
        }
        CovarianceStack::new(rows, cols, pixels)
    }

    /// CSV interchange text with a shape comment.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# rows={} cols={}\n", self.rows, self.cols);
        for p in &self.pixels {
            let (diag, upper) = p.to_upper_fields();
            let fields: Vec<String> = diag
                .iter()
                .map(f64::to_string)
                .chain(upper.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]))
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let shape = text.lines().find_map(parse_shape_comment).transpose()?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut pixels = Vec::new();
        let mut m = None;
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let values: Vec<f64> = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: bad number '{f}'", idx + 1)))
                })
                .collect::<Result<_>>()?;
            let dim = (values.len() as f64).sqrt().round() as usize;
            if dim == 0 || dim * dim != values.len() {
                return Err(Error::Parse(format!(
                    "pixel {idx}: {} fields is not m² for any m",
                    values.len()
                )));
            }
            if *m.get_or_insert(dim) != dim {
                return Err(Error::DimensionMismatch {
                    expected: m.unwrap_or(dim),
                    found: dim,
                });
            }
            let upper: Vec<Complex64> = values[dim..].chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            pixels.push(pixel(idx, shape.map_or(1, |s| s.1), &values[..dim], &upper)?);
        }
        let (rows, cols) = shape.unwrap_or((pixels.len(), 1));
        CovarianceStack::new(rows, cols, pixels)
    }
}

fn pixel(idx: usize, cols: usize, diag: &[f64], upper: &[Complex64]) -> Result<HermitianMatrix> {
    HermitianMatrix::from_upper(diag, upper)
        .map_err(|e| Error::Parse(format!("pixel (row {}, col {}): {e}", idx / cols, idx % cols)))
}

fn parse_shape_comment(line: &str) -> Option<Result<(usize, usize)>> {
    let body = line.trim().strip_prefix('#')?.trim();
    if !body.starts_with("rows=") {
        return None;
    }
    let mut rows = None;
    let mut cols = None;
    for part in body.split_whitespace() {
        match part.split_once('=') {
            Some(("rows", v)) => rows = v.parse::<usize>().ok(),
            Some(("cols", v)) => cols = v.parse::<usize>().ok(),
            _ => {}
        }
    }
    Some(match (rows, cols) {
        (Some(r), Some(c)) => Ok((r, c)),
        _ => Err(Error::MalformedHeader(format!("bad shape comment '{line}'"))),
    })
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a PCSK file, or CSV interchange when the extension is `.csv`.
pub fn read_stack(path: impl AsRef<Path>) -> Result<CovarianceStack> {
    let path = path.as_ref();
    if is_csv(path) {
        CovarianceStack::from_csv(&fs::read_to_string(path)?)
    } else {
        CovarianceStack::from_bytes(&fs::read(path)?)
    }
}

/// Writes PCSK, or CSV interchange when the extension is `.csv`.
pub fn write_stack(stack: &CovarianceStack, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if is_csv(path) {
        fs::write(path, stack.to_csv())?;
    } else {
        fs::write(path, stack.to_bytes())?;
    }
    Ok(())
}
