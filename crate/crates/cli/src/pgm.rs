//! Binary PGM (P5) images of fuzzy grids.
//!
//! maxval is the lattice size `L`; samples are one byte for `L <= 255` and
//! two bytes big-endian above. Rows run along axis 0, row 0 is `y`-index 0
//! and is written first. A 1-D grid is a strip of height 1.

use std::fmt;
use std::sync::Arc;

use gifzs::{DomainBox, FuzzyGrid, Level};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmError(pub String);

impl fmt::Display for PgmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for PgmError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: Level,
    pub samples: Vec<Level>,
}

impl Pgm {
    pub fn from_grid(u: &FuzzyGrid) -> Result<Self, PgmError> {
        let cells = u.domain().cells();
        let (width, height) = match cells {
            [w] => (*w, 1),
            [w, h] => (*w, *h),
            _ => {
                return Err(PgmError(format!(
                    "cannot draw a {}-dimensional grid as an image",
                    cells.len()
                )))
            }
        };
        // cell index is axis-0 fastest, which is already row-major
        Ok(Pgm {
            width,
            height,
            maxval: u.levels(),
            samples: u.values().to_vec(),
        })
    }

    /// The grid on `domain`, whose cell counts must match the image.
    pub fn to_grid(&self, domain: Arc<DomainBox>) -> Result<FuzzyGrid, PgmError> {
        let expected = match domain.cells() {
            [w] => (*w, 1),
            [w, h] => (*w, *h),
            c => {
                return Err(PgmError(format!(
                    "domain of dimension {} has no image form",
                    c.len()
                )))
            }
        };
        if expected != (self.width, self.height) {
            return Err(PgmError(format!(
                "image is {}x{} but the domain has {}x{} cells",
                self.width, self.height, expected.0, expected.1
            )));
        }
        FuzzyGrid::from_values(domain, self.maxval, self.samples.clone())
            .map_err(|e| PgmError(e.to_string()))
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        if self.maxval > 255 {
            for &s in &self.samples {
                out.extend_from_slice(&s.to_be_bytes());
            }
        } else {
            out.extend(self.samples.iter().map(|&s| s as u8));
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, PgmError> {
        let mut pos = 0;
        let mut token = || -> Result<String, PgmError> {
            loop {
                match bytes.get(pos) {
                    Some(b'#') => {
                        while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                            pos += 1;
                        }
                    }
                    Some(b) if b.is_ascii_whitespace() => pos += 1,
                    Some(_) => break,
                    None => return Err(PgmError("truncated header".into())),
                }
            }
            let start = pos;
            while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
                pos += 1;
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };
        let magic = token()?;
        if magic != "P5" {
            return Err(PgmError(format!("not a binary PGM (magic `{magic}`)")));
        }
        let mut number = |what: &str| -> Result<usize, PgmError> {
            let t = token()?;
            t.parse().map_err(|_| PgmError(format!("bad {what} `{t}`")))
        };
        let width = number("width")?;
        let height = number("height")?;
        let maxval = number("maxval")?;
        if maxval == 0 || maxval > Level::MAX as usize {
            return Err(PgmError(format!("maxval {maxval} outside 1..=65535")));
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let n = width * height;
        let wide = maxval > 255;
        let need = if wide { 2 * n } else { n };
        let raster = bytes.get(pos..).unwrap_or(&[]);
        if raster.len() != need {
            return Err(PgmError(format!(
                "raster has {} bytes, expected {need}",
                raster.len()
            )));
        }
        let samples: Vec<Level> = if wide {
            raster
                .chunks(2)
                .map(|p| u16::from_be_bytes([p[0], p[1]]))
                .collect()
        } else {
            raster.iter().map(|&b| b as Level).collect()
        };
        if let Some(&bad) = samples.iter().find(|&&s| s as usize > maxval) {
            return Err(PgmError(format!("sample {bad} exceeds maxval {maxval}")));
        }
        Ok(Pgm {
            width,
            height,
            maxval: maxval as Level,
            samples,
        })
    }
}
