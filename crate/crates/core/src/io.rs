//! JSON formats for measurement sets, states and reports.
//!
//! Complex matrices are written row by row as `[re, im]` pairs. Floats carry 17
//! significant digits so that files round-trip bit for bit.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mum::{MumSet, OperatorGrid};
use crate::opalg::ComplexMatrix;
use crate::states::DensityMatrix;

/// Compact JSON with every float written as `{:.16e}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` followed by a newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, writer: W) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, FullPrecision);
    value.serialize(&mut ser)?;
    ser.into_inner().write_all(b"\n")?;
    Ok(())
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(value, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_json(value, &mut w)?;
    w.flush()?;
    Ok(())
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let r = BufReader::new(File::open(path)?);
    serde_json::from_reader(r).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

type MatrixRows = Vec<Vec<[f64; 2]>>;

fn matrix_to_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn matrix_from_rows(rows: &MatrixRows) -> Result<ComplexMatrix> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Format("matrix rows must form a square array".into()));
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    ComplexMatrix::from_vec(dim, data)
}

#[derive(Serialize, Deserialize)]
struct MumFile {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    t: f64,
    kappa: f64,
    operators: Vec<Vec<MatrixRows>>,
}

pub fn mums_to_json(set: &MumSet) -> Result<String> {
    to_json_string(&mum_file(set))
}

fn mum_file(set: &MumSet) -> MumFile {
    MumFile {
        d: set.d(),
        m: set.m(),
        t: set.t(),
        kappa: set.kappa(),
        operators: set
            .operators()
            .iter()
            .map(|row| row.iter().map(matrix_to_rows).collect())
            .collect(),
    }
}

pub fn save_mums(set: &MumSet, path: &Path) -> Result<()> {
    save_json(&mum_file(set), path)
}

/// Reads a set without verifying it. The traceless parts are recovered as
/// `(P − I/d)/t` when `t > 0`.
pub fn load_mums(path: &Path) -> Result<MumSet> {
    mums_from_file(load_json(path)?)
}

pub fn mums_from_json(text: &str) -> Result<MumSet> {
    mums_from_file(serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?)
}

fn mums_from_file(file: MumFile) -> Result<MumSet> {
    if file.operators.len() != file.m {
        return Err(Error::Format(format!(
            "header says M={}, file holds {} measurements",
            file.m,
            file.operators.len()
        )));
    }
    let operators: OperatorGrid = file
        .operators
        .iter()
        .map(|row| row.iter().map(matrix_from_rows).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let f_ops = if file.t > 0.0 && file.d >= 1 {
        let id = ComplexMatrix::identity(file.d)?;
        operators
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| {
                        Ok(p.add_scaled(&id, -1.0 / file.d as f64)?
                            .scale_real(1.0 / file.t))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    MumSet::from_parts(file.d, file.t, file.kappa, operators, f_ops)
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    matrix: MatrixRows,
}

fn state_file(rho: &DensityMatrix) -> StateFile {
    StateFile {
        dims: rho.dims().to_vec(),
        matrix: matrix_to_rows(rho.matrix()),
    }
}

pub fn state_to_json(rho: &DensityMatrix) -> Result<String> {
    to_json_string(&state_file(rho))
}

pub fn save_state(rho: &DensityMatrix, path: &Path) -> Result<()> {
    save_json(&state_file(rho), path)
}

/// Reads and validates a density matrix.
pub fn load_state(path: &Path) -> Result<DensityMatrix> {
    state_from_file(load_json(path)?)
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    state_from_file(serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?)
}

fn state_from_file(file: StateFile) -> Result<DensityMatrix> {
    DensityMatrix::new(file.dims, matrix_from_rows(&file.matrix)?)
}
