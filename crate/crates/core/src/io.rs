//! CSV writers for profiles, Green's-function grids and support curves.
//!
//! Floats are written with `Display`, the shortest decimal that round-trips.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Uniform grid of `n` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl LineGrid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || max < min {
            return Err(crate::Error::invalid("grid", format!("need min <= max, got {min}:{max}")));
        }
        if n == 0 || (n == 1 && max != min) {
            return Err(crate::Error::invalid("grid", format!("cannot span {min}:{max} with {n} points")));
        }
        Ok(Self { min, max, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        (0..self.n)
            .map(|k| {
                if k + 1 == self.n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / (self.n - 1) as f64
                }
            })
            .collect()
    }
}

/// `x,rho` rows.
pub fn write_profile<W: Write>(w: W, xs: &[f64], rho: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "rho"])?;
    for (x, r) in xs.iter().zip(rho) {
        out.write_record([x.to_string(), r.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `re_z,im_z,re_G,im_G` rows.
pub fn write_green_grid<W: Write>(w: W, values: &[(Complex64, Complex64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["re_z", "im_z", "re_G", "im_G"])?;
    for (z, g) in values {
        out.write_record([z.re.to_string(), z.im.to_string(), g.re.to_string(), g.im.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Rows of `(t, index, value)` under the given three-column header.
pub fn write_indexed<W: Write>(w: W, header: [&str; 3], rows: &[(f64, usize, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for (t, i, v) in rows {
        out.write_record([t.to_string(), i.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
