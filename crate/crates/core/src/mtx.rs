//! Matrix Market (`.mtx`) reading and writing.
//!
//! Supported: `matrix coordinate|array real|integer general|symmetric`.
//! Symmetric files are expanded to full storage, indices are converted to
//! 0-based and duplicate coordinate entries are summed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    format: Format,
    symmetry: Symmetry,
}

fn parse_header(line: &str, path: &Path) -> Result<Header> {
    let err = |msg: &str| Error::Parse { path: path.into(), line: 1, msg: msg.into() };
    let toks: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" {
        return Err(err("expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    if toks[1] != "matrix" {
        return Err(Error::UnsupportedField(format!("object {:?}", toks[1])));
    }
    let format = match toks[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(err(&format!("unknown format {other:?}"))),
    };
    match toks[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::UnsupportedField(format!("field {other:?}"))),
    }
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(Error::UnsupportedField(format!("symmetry {other:?}"))),
    };
    Ok(Header { format, symmetry })
}

/// Reads a real Matrix Market file into sparse storage.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(BufReader::new(file), path)
}

/// Like [`read_matrix_market`], but keeps dense storage for `array` files.
pub fn read_matrix_market_dense(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    Ok(read_matrix_market(path)?.to_dense())
}

fn read_from<R: BufRead>(reader: R, path: &Path) -> Result<Matrix> {
    let mut lines = reader.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Parse { path: path.into(), line: 1, msg: "empty file".into() })?;
    let first = first.map_err(|e| Error::io(path, e))?;
    let header = parse_header(&first, path)?;

    // remaining non-comment, non-blank lines
    let mut body = Vec::new();
    for (no, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push((no + 1, t.to_owned()));
    }
    let mut body = body.into_iter();
    let (size_line, size) = body
        .next()
        .ok_or_else(|| Error::Parse { path: path.into(), line: 1, msg: "missing size line".into() })?;
    let perr = |line: usize, msg: String| Error::Parse { path: path.into(), line, msg };
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| perr(size_line, format!("bad size {t:?}: {e}"))))
        .collect::<Result<_>>()?;

    match header.format {
        Format::Coordinate => {
            let &[m, n, nnz] = dims.as_slice() else {
                return Err(perr(size_line, "coordinate size line needs 'rows cols nnz'".into()));
            };
            if header.symmetry == Symmetry::Symmetric && m != n {
                return Err(perr(size_line, "symmetric matrix must be square".into()));
            }
            let mut triplets = Vec::with_capacity(nnz * 2);
            let mut count = 0;
            for (line, text) in body {
                let toks: Vec<&str> = text.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(perr(line, format!("expected 'i j value', got {text:?}")));
                }
                let i: usize = toks[0].parse().map_err(|e| perr(line, format!("bad row index: {e}")))?;
                let j: usize = toks[1].parse().map_err(|e| perr(line, format!("bad column index: {e}")))?;
                let v: f64 = toks[2].parse().map_err(|e| perr(line, format!("bad value: {e}")))?;
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(perr(line, format!("index ({i}, {j}) outside {m}x{n}")));
                }
                if header.symmetry == Symmetry::Symmetric && j > i {
                    return Err(perr(line, format!("symmetric file has upper-triangle entry ({i}, {j})")));
                }
                triplets.push((i - 1, j - 1, v));
                if header.symmetry == Symmetry::Symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
                count += 1;
            }
            if count != nnz {
                return Err(perr(size_line, format!("header declares {nnz} entries, found {count}")));
            }
            Ok(CsrMatrix::from_triplets(m, n, &triplets)?.into())
        }
        Format::Array => {
            let &[m, n] = dims.as_slice() else {
                return Err(perr(size_line, "array size line needs 'rows cols'".into()));
            };
            if header.symmetry == Symmetry::Symmetric && m != n {
                return Err(perr(size_line, "symmetric matrix must be square".into()));
            }
            let mut values = Vec::with_capacity(m * n);
            for (line, text) in body {
                for tok in text.split_whitespace() {
                    values.push(tok.parse::<f64>().map_err(|e| perr(line, format!("bad value {tok:?}: {e}")))?);
                }
            }
            // column-major; symmetric stores the lower triangle column by column
            let mut dense = DenseMatrix::zeros(m, n);
            let mut it = values.into_iter();
            let mut missing = || perr(size_line, "too few array entries".into());
            for j in 0..n {
                let start = if header.symmetry == Symmetry::Symmetric { j } else { 0 };
                for i in start..m {
                    let v = it.next().ok_or_else(&mut missing)?;
                    dense.set(i, j, v);
                    if header.symmetry == Symmetry::Symmetric {
                        dense.set(j, i, v);
                    }
                }
            }
            if it.next().is_some() {
                return Err(perr(size_line, "too many array entries".into()));
            }
            Ok(dense.into())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Writes any matrix in `coordinate real general` format with round-trip exact values.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    let triplets: Vec<(usize, usize, f64)> = match a {
        Matrix::Sparse(s) => s.triplets().collect(),
        Matrix::Dense(d) => (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j, d.get(i, j))))
            .filter(|t| t.2 != 0.0)
            .collect(),
    };
    writeln!(w, "%%MatrixMarket matrix coordinate real general").map_err(io)?;
    writeln!(w, "{} {} {}", a.rows(), a.cols(), triplets.len()).map_err(io)?;
    for (i, j, v) in triplets {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Writes a dense matrix in `array real general` (column-major) format.
pub fn write_matrix_market_array(path: impl AsRef<Path>, a: &DenseMatrix, rows: usize, cols: usize) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "%%MatrixMarket matrix array real general").map_err(io)?;
    writeln!(w, "{rows} {cols}").map_err(io)?;
    for j in 0..cols {
        for i in 0..rows {
            writeln!(w, "{:e}", a.get(i, j)).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Writes a vector as an `n x 1` array file.
pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let d = DenseMatrix::new(v.len(), 1, v.to_vec())?;
    write_matrix_market_array(path, &d, v.len(), 1)
}

/// Reads an `n x 1` (or `1 x n`) Matrix Market file as a vector.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let m = read_matrix_market(path)?;
    if m.cols() != 1 && m.rows() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} holds a {}x{} matrix, expected a vector",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.to_dense().data().to_vec())
}
