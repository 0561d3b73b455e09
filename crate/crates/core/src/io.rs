//! Vector files: `.csv` holds one decimal value per line, `.f64` holds raw
//! little-endian doubles.

use std::fs;
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorFormat {
    Csv,
    F64,
}

impl VectorFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Ok(Self::Csv),
            Some(e) if e.eq_ignore_ascii_case("f64") => Ok(Self::F64),
            _ => Err(Error::UnknownExtension {
                path: path.to_path_buf(),
            }),
        }
    }
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let format = VectorFormat::from_path(path)?;
    let bytes = fs::read(path)?;
    match format {
        VectorFormat::F64 => {
            if bytes.len() % 8 != 0 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    msg: format!("{} bytes is not a whole number of doubles", bytes.len()),
                });
            }
            Ok(bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect())
        }
        VectorFormat::Csv => {
            let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: e.to_string(),
            })?;
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| {
                    l.trim().parse::<f64>().map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        line: i + 1,
                        msg: e.to_string(),
                    })
                })
                .collect()
        }
    }
}

pub fn write_vector(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let bytes = match VectorFormat::from_path(path)? {
        VectorFormat::F64 => values.iter().flat_map(|v| v.to_le_bytes()).collect(),
        VectorFormat::Csv => {
            let mut s = String::with_capacity(values.len() * 24);
            for v in values {
                // Shortest representation that parses back to the same double.
                s.push_str(&format!("{v:e}\n"));
            }
            s.into_bytes()
        }
    };
    fs::write(path, bytes)?;
    Ok(())
}
