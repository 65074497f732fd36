//! Dose grids: non-negative dose values on a uniform pixel grid, with a
//! text-header + row-major binary file format for exact round trips.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{PecError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DoseMap {
    /// World coordinate of the (0,0) pixel's lower-left corner (nm).
    pub origin: [f64; 2],
    /// Pixel edge length (nm).
    pub pixel: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major values, clearing dose = 1.
    pub values: Vec<f64>,
}

impl DoseMap {
    pub fn zeros(origin: [f64; 2], pixel: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(pixel > 0.0) {
            return Err(PecError::InvalidParameter {
                name: "pixel",
                reason: format!("must be > 0, got {pixel}"),
            });
        }
        if nx == 0 || ny == 0 {
            return Err(PecError::InvalidParameter {
                name: "grid",
                reason: format!("dimensions must be > 0, got {nx} x {ny}"),
            });
        }
        Ok(DoseMap {
            origin,
            pixel,
            nx,
            ny,
            values: vec![0.0; nx * ny],
        })
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    #[inline]
    pub fn at_mut(&mut self, ix: usize, iy: usize) -> &mut f64 {
        &mut self.values[iy * self.nx + ix]
    }

    /// Total deposited dose, sum(values) * pixel^2.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.pixel * self.pixel
    }

    /// Pixel center in world coordinates.
    pub fn center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + (ix as f64 + 0.5) * self.pixel,
            self.origin[1] + (iy as f64 + 0.5) * self.pixel,
        ]
    }

    /// Smallest distance (nm) from any pixel above `threshold` to the grid
    /// boundary; `None` when nothing exceeds the threshold.
    pub fn margin_to_boundary(&self, threshold: f64) -> Option<f64> {
        let mut min_px = usize::MAX;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if self.at(ix, iy) > threshold {
                    let edge = ix.min(iy).min(self.nx - 1 - ix).min(self.ny - 1 - iy);
                    min_px = min_px.min(edge);
                }
            }
        }
        (min_px != usize::MAX).then_some(min_px as f64 * self.pixel)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.nx * self.ny {
            return Err(PecError::InvalidParameter {
                name: "values",
                reason: format!(
                    "length {} does not match {} x {}",
                    self.values.len(),
                    self.nx,
                    self.ny
                ),
            });
        }
        if self.values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(PecError::InvalidParameter {
                name: "values",
                reason: "doses must be finite and >= 0".into(),
            });
        }
        Ok(())
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "omc-dose 1")?;
        writeln!(f, "origin_nm {} {}", self.origin[0], self.origin[1])?;
        writeln!(f, "pixel_nm {}", self.pixel)?;
        writeln!(f, "grid {} {}", self.nx, self.ny)?;
        writeln!(f, "data f64le")?;
        for v in &self.values {
            f.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut reader = BufReader::new(std::fs::File::open(path)?);
        let mut line = String::new();
        let next_line =
            |reader: &mut BufReader<std::fs::File>, line: &mut String| -> Result<String> {
                line.clear();
                reader.read_line(line)?;
                Ok(line.trim_end().to_owned())
            };
        let magic = next_line(&mut reader, &mut line)?;
        if magic != "omc-dose 1" {
            return Err(PecError::BadDoseFile(format!("bad magic `{magic}`")));
        }
        let parse = |s: &str, key: &str| -> Result<Vec<f64>> {
            let mut it = s.split_whitespace();
            if it.next() != Some(key) {
                return Err(PecError::BadDoseFile(format!("expected `{key}` in `{s}`")));
            }
            it.map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| PecError::BadDoseFile(format!("bad number `{tok}`: {e}")))
            })
            .collect()
        };
        let origin = parse(&next_line(&mut reader, &mut line)?, "origin_nm")?;
        let pixel = parse(&next_line(&mut reader, &mut line)?, "pixel_nm")?;
        let grid = parse(&next_line(&mut reader, &mut line)?, "grid")?;
        let dtype = next_line(&mut reader, &mut line)?;
        if dtype != "data f64le" {
            return Err(PecError::BadDoseFile(format!("bad data tag `{dtype}`")));
        }
        if origin.len() != 2 || pixel.len() != 1 || grid.len() != 2 {
            return Err(PecError::BadDoseFile("malformed header fields".into()));
        }
        let (nx, ny) = (grid[0] as usize, grid[1] as usize);
        let mut buf = vec![0u8; nx * ny * 8];
        reader.read_exact(&mut buf)?;
        let values: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let map = DoseMap {
            origin: [origin[0], origin[1]],
            pixel: pixel[0],
            nx,
            ny,
            values,
        };
        map.validate()?;
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_is_exact() {
        let mut map = DoseMap::zeros([-3.5, 2.25], 1.5, 7, 5).unwrap();
        for (i, v) in map.values.iter_mut().enumerate() {
            *v = (i as f64 * 0.37).sin().abs();
        }
        let dir = std::env::temp_dir().join("omc_pec_dosemap_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("map.bin");
        map.write_binary(&path).unwrap();
        let back = DoseMap::read_binary(&path).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn margin_measures_exposed_extent() {
        let mut map = DoseMap::zeros([0.0, 0.0], 2.0, 10, 10).unwrap();
        *map.at_mut(4, 5) = 1.0;
        assert_eq!(map.margin_to_boundary(0.0), Some(8.0)); // 4 px * 2 nm
        let empty = DoseMap::zeros([0.0, 0.0], 2.0, 4, 4).unwrap();
        assert_eq!(empty.margin_to_boundary(0.0), None);
    }

    #[test]
    fn negative_dose_rejected() {
        let mut map = DoseMap::zeros([0.0, 0.0], 1.0, 2, 2).unwrap();
        map.values[0] = -1.0;
        assert!(map.validate().is_err());
    }
}
