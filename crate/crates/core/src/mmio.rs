//! MatrixMarket text format, `array` and `coordinate` layouts.
//!
//! Values are written with 17 significant digits so `f64` entries survive a
//! round trip bit for bit.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, C64};
use crate::matgen::Tridiagonal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str) -> Result<(Layout, Field, Symmetry)> {
    let lower = line.to_ascii_lowercase();
    let tok: Vec<&str> = lower.split_whitespace().collect();
    if tok.len() != 5 || tok[0] != "%%matrixmarket" || tok[1] != "matrix" {
        return Err(parse_err(
            1,
            "expected '%%MatrixMarket matrix <layout> <field> <symmetry>'",
        ));
    }
    let layout = match tok[2] {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(1, format!("unknown layout '{other}'"))),
    };
    let field = match tok[3] {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(1, format!("unknown field '{other}'"))),
    };
    let symmetry = match tok[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unknown symmetry '{other}'"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(parse_err(1, "pattern field requires coordinate layout"));
    }
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(parse_err(1, "hermitian symmetry requires complex field"));
    }
    Ok((layout, field, symmetry))
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| parse_err(line, format!("cannot parse '{s}'")))
}

fn parse_value(tok: &[&str], field: Field, line: usize) -> Result<C64> {
    let want = match field {
        Field::Complex => 2,
        Field::Pattern => 0,
        _ => 1,
    };
    if tok.len() != want {
        return Err(parse_err(
            line,
            format!("expected {want} value field(s), found {}", tok.len()),
        ));
    }
    let v = match field {
        Field::Pattern => C64::new(1.0, 0.0),
        Field::Complex => C64::new(parse_num(tok[0], line)?, parse_num(tok[1], line)?),
        _ => C64::new(parse_num(tok[0], line)?, 0.0),
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(parse_err(line, "non-finite value"));
    }
    Ok(v)
}

/// Reads a dense matrix from MatrixMarket text.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let (layout, field, symmetry) = parse_header(&header?)?;

    let mut body = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push((no, t.to_string()));
    }
    let mut body = body.into_iter();
    let (size_no, size_line) = body.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|s| parse_num(s, size_no))
        .collect::<Result<_>>()?;
    let (rows, cols) = match (layout, dims.as_slice()) {
        (Layout::Array, [r, c]) => (*r, *c),
        (Layout::Coordinate, [r, c, _]) => (*r, *c),
        _ => return Err(parse_err(size_no, "malformed size line")),
    };
    if rows == 0 || cols == 0 {
        return Err(parse_err(size_no, "matrix dimensions must be positive"));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(size_no, "symmetric storage requires a square matrix"));
    }
    let mut m = DenseMatrix::zeros(rows, cols);
    let mirror = |m: &mut DenseMatrix, i: usize, j: usize, v: C64| {
        if i != j {
            m[(j, i)] = match symmetry {
                Symmetry::General => return,
                Symmetry::Symmetric => v,
                Symmetry::SkewSymmetric => -v,
                Symmetry::Hermitian => v.conj(),
            };
        }
    };

    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut count = 0;
            for (no, line) in body {
                let tok: Vec<&str> = line.split_whitespace().collect();
                if tok.len() < 2 {
                    return Err(parse_err(no, "expected 'row col value'"));
                }
                let i: usize = parse_num(tok[0], no)?;
                let j: usize = parse_num(tok[1], no)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(no, format!("index ({i}, {j}) out of range")));
                }
                let (i, j) = (i - 1, j - 1);
                if symmetry != Symmetry::General && i < j {
                    return Err(parse_err(no, "symmetric storage lists the lower triangle only"));
                }
                if symmetry == Symmetry::SkewSymmetric && i == j {
                    return Err(parse_err(no, "skew-symmetric storage has no diagonal entries"));
                }
                let v = parse_value(&tok[2..], field, no)?;
                m[(i, j)] += v;
                let cur = m[(i, j)];
                mirror(&mut m, i, j, cur);
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(size_no, format!("declared {nnz} entries, found {count}")));
            }
        }
        Layout::Array => {
            // column-major; symmetric variants store the lower triangle
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| {
                    let start = match symmetry {
                        Symmetry::General => 0,
                        Symmetry::SkewSymmetric => j + 1,
                        _ => j,
                    };
                    (start..rows).map(move |i| (i, j))
                })
                .collect();
            let mut body = body;
            for &(i, j) in &positions {
                let (no, line) = body
                    .next()
                    .ok_or_else(|| parse_err(size_no, format!("expected {} entries", positions.len())))?;
                let tok: Vec<&str> = line.split_whitespace().collect();
                let v = parse_value(&tok, field, no)?;
                m[(i, j)] = v;
                mirror(&mut m, i, j, v);
            }
            if let Some((no, _)) = body.next() {
                return Err(parse_err(no, "trailing data after the last entry"));
            }
        }
    }
    Ok(m)
}

pub fn read_matrix_market_file(path: &std::path::Path) -> Result<DenseMatrix> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_matrix_market(std::io::BufReader::new(f))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a dense matrix in `array` layout, `real` when all entries are real
/// and `complex` otherwise.
pub fn write_matrix_market<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    let real = m.is_real();
    writeln!(
        w,
        "%%MatrixMarket matrix array {} general",
        if real { "real" } else { "complex" }
    )?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for v in m.as_slice() {
        if real {
            writeln!(w, "{}", fmt(v.re))?;
        } else {
            writeln!(w, "{} {}", fmt(v.re), fmt(v.im))?;
        }
    }
    Ok(())
}

/// Writes a tridiagonal matrix in `coordinate` layout, column by column.
pub fn write_tridiagonal<W: Write>(mut w: W, t: &Tridiagonal) -> Result<()> {
    let n = t.n();
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{n} {n} {}", 3 * n - 2)?;
    for j in 0..n {
        if j > 0 {
            writeln!(w, "{} {} {}", j, j + 1, fmt(t.sup[j - 1]))?;
        }
        writeln!(w, "{} {} {}", j + 1, j + 1, fmt(t.diag[j]))?;
        if j + 1 < n {
            writeln!(w, "{} {} {}", j + 2, j + 1, fmt(t.sub[j]))?;
        }
    }
    Ok(())
}
