//! Plain-text dumps of the drift system: one matrix row per line, entries
//! separated by spaces, each written as `re,im`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::DriftSystem;
use crate::scalar::{to_f64, Real};

fn entry<T: Real>(out: &mut String, z: Complex<T>) {
    let _ = write!(out, "{:.17e},{:.17e}", to_f64(z.re), to_f64(z.im));
}

pub fn format_matrix<T: Real>(m: &DMatrix<Complex<T>>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(' ');
            }
            entry(&mut out, m[(r, c)]);
        }
        out.push('\n');
    }
    out
}

/// One entry per line.
pub fn format_vector<T: Real>(v: &DVector<Complex<T>>) -> String {
    let mut out = String::new();
    for z in v.iter() {
        entry(&mut out, *z);
        out.push('\n');
    }
    out
}

/// Writes `A.txt` and `b.txt` into `dir`, creating it if needed.
pub fn write_drift_dump<T: Real>(system: &DriftSystem<T>, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("A.txt"), format_matrix(&system.a))?;
    std::fs::write(dir.join("b.txt"), format_vector(&system.b))?;
    Ok(())
}
