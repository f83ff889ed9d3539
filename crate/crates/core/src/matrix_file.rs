//! Plain-text matrix and vector files.
//!
//! ```text
//! # optional comment lines
//! 2 2 complex
//! 0+1i 1.5-2i
//! -3 0+0i
//! ```
//!
//! The header is `rows cols real|complex`; entries follow in row-major order,
//! separated by any whitespace. Complex entries are written `a+bi` / `a-bi`
//! (a bare real `a` or imaginary `bi` is also accepted). Numbers are printed
//! in shortest round-trip form, so print → parse is exact.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Complex64, ComplexMatrix, RealMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub field: Field,
    pub data: ComplexMatrix,
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number `{tok}`"),
    })
}

fn parse_complex(tok: &str, line: usize) -> Result<Complex64> {
    let Some(body) = tok.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(tok, line)?, 0.0));
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = parse_real(&body[..i], line)?;
            let im_text = &body[i..];
            let im = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                _ => parse_real(im_text, line)?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => parse_real(body, line)?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

impl MatrixFile {
    pub fn from_complex(data: ComplexMatrix) -> Self {
        Self {
            field: Field::Complex,
            data,
        }
    }

    pub fn from_real(data: &RealMatrix) -> Self {
        Self {
            field: Field::Real,
            data: data.map(|x| Complex64::new(x, 0.0)),
        }
    }

    /// A column vector file.
    pub fn from_vector(v: &[Complex64]) -> Self {
        Self::from_complex(ComplexMatrix::from_column_slice(v.len(), 1, v))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header `rows cols real|complex`".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: hline,
                message: format!("header must be `rows cols real|complex`, got `{header}`"),
            });
        }
        let dim = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: hline,
                message: format!("invalid dimension `{s}`"),
            })
        };
        let (rows, cols) = (dim(parts[0])?, dim(parts[1])?);
        let field = match parts[2] {
            "real" => Field::Real,
            "complex" => Field::Complex,
            other => {
                return Err(Error::Parse {
                    line: hline,
                    message: format!("field must be `real` or `complex`, got `{other}`"),
                })
            }
        };
        let mut entries = Vec::with_capacity(rows * cols);
        let mut last_line = hline;
        for (ln, l) in lines {
            last_line = ln;
            for tok in l.split_whitespace() {
                if entries.len() == rows * cols {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("more than {} entries", rows * cols),
                    });
                }
                let z = match field {
                    Field::Real => Complex64::new(parse_real(tok, ln)?, 0.0),
                    Field::Complex => parse_complex(tok, ln)?,
                };
                entries.push(z);
            }
        }
        if entries.len() != rows * cols {
            return Err(Error::Parse {
                line: last_line,
                message: format!("expected {} entries, found {}", rows * cols, entries.len()),
            });
        }
        Ok(Self {
            field,
            data: ComplexMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let field = match self.field {
            Field::Real => "real",
            Field::Complex => "complex",
        };
        let mut out = format!("{} {} {}\n", self.rows(), self.cols(), field);
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| {
                    let z = self.data[(i, j)];
                    match self.field {
                        Field::Real => format!("{}", z.re),
                        Field::Complex => format_complex(z),
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Entries of a single row or column.
    pub fn as_vector(&self) -> Result<Vec<Complex64>> {
        if self.rows() != 1 && self.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected a vector, got a {}×{} matrix",
                self.rows(),
                self.cols()
            )));
        }
        Ok(self.data.iter().copied().collect())
    }

    pub fn as_real(&self) -> Option<RealMatrix> {
        (self.field == Field::Real || self.data.iter().all(|z| z.im == 0.0)).then(|| self.data.map(|z| z.re))
    }
}
