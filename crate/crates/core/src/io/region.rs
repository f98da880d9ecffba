//! Region selection on a covariance stack.

use super::mask::{read_mask, Mask};
use super::stack::CovarianceStack;
use crate::error::{Error, Result};
use crate::wishart::SampleSet;
use std::fmt;

/// Either an inclusive, 0-based rectangle (`x` is the column, `y` the row)
/// or a byte mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionSpec {
    Rect { x0: usize, y0: usize, x1: usize, y1: usize },
    Mask { label: String, mask: Mask },
}

impl RegionSpec {
    /// Parses `rect:x0,y0,x1,y1` or `mask:PATH`; the mask file is read here.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(coords) = spec.strip_prefix("rect:") {
            let v: Vec<usize> = coords
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad rectangle coordinate '{c}' in '{spec}'")))
                })
                .collect::<Result<_>>()?;
            match v[..] {
                [x0, y0, x1, y1] => Ok(RegionSpec::Rect { x0, y0, x1, y1 }),
                _ => Err(Error::Parse(format!("rectangle needs four coordinates, got '{spec}'"))),
            }
        } else if let Some(path) = spec.strip_prefix("mask:") {
            Ok(RegionSpec::Mask {
                label: path.to_string(),
                mask: read_mask(path)?,
            })
        } else {
            Err(Error::Parse(format!("region '{spec}' must start with rect: or mask:")))
        }
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::Rect { x0, y0, x1, y1 } => write!(f, "rect:{x0},{y0},{x1},{y1}"),
            RegionSpec::Mask { label, .. } => write!(f, "mask:{label}"),
        }
    }
}

/// Selected pixels in row-major order.
pub fn extract_region(stack: &CovarianceStack, spec: &RegionSpec) -> Result<SampleSet> {
    let (rows, cols) = (stack.rows(), stack.cols());
    let indices: Vec<usize> = match spec {
        RegionSpec::Rect { x0, y0, x1, y1 } => {
            if x0 > x1 || y0 > y1 {
                return Err(Error::OutOfBounds(format!("{spec} has inverted corners")));
            }
            if *x1 >= cols || *y1 >= rows {
                return Err(Error::OutOfBounds(format!("{spec} exceeds a {rows}x{cols} image")));
            }
            (*y0..=*y1).flat_map(|r| (*x0..=*x1).map(move |c| r * cols + c)).collect()
        }
        RegionSpec::Mask { mask, .. } => {
            if mask.rows() != rows || mask.cols() != cols {
                return Err(Error::OutOfBounds(format!(
                    "mask is {}x{}, image is {rows}x{cols}",
                    mask.rows(),
                    mask.cols()
                )));
            }
            mask.selected().collect()
        }
    };
    if indices.is_empty() {
        return Err(Error::EmptySelection);
    }
    SampleSet::new(indices.into_iter().map(|i| stack.pixels()[i].clone()).collect())
}
