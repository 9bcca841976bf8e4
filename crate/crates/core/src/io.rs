//! Matrix Market (.mtx) and CSV input/output.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Header {
    format: Format,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse {
            line: 1,
            message: "expected '%%MatrixMarket matrix <format> <field> <symmetry>'".into(),
        });
    }
    let format = match tokens[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(Error::Unsupported(format!("format '{other}'"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(Error::Unsupported(format!("field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(Error::Unsupported(format!("symmetry '{other}'"))),
    };
    if format == Format::Array && field == Field::Pattern {
        return Err(Error::Unsupported("pattern field in array format".into()));
    }
    Ok(Header {
        format,
        field,
        symmetry,
    })
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?
    .parse()
    .map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what}"),
    })
}

/// Raw parse result: dimensions and the expanded list of entries.
struct Parsed {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

fn parse_text(text: &str) -> Result<Parsed> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let header = parse_header(first)?;

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body.next().ok_or(Error::Parse {
        line: 2,
        message: "missing size line".into(),
    })?;
    let mut tok = size.split_whitespace();
    let n_rows: usize = parse_num(tok.next(), size_line, "row count")?;
    let n_cols: usize = parse_num(tok.next(), size_line, "column count")?;

    let mut entries = Vec::new();
    let mirror = |i: usize, j: usize, v: f64, entries: &mut Vec<(usize, usize, f64)>| {
        if i != j {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => entries.push((j, i, v)),
                Symmetry::SkewSymmetric => entries.push((j, i, -v)),
            }
        }
    };

    match header.format {
        Format::Coordinate => {
            let nnz: usize = parse_num(tok.next(), size_line, "entry count")?;
            let mut seen = 0usize;
            for (ln, l) in body {
                let mut t = l.split_whitespace();
                let i: usize = parse_num(t.next(), ln, "row index")?;
                let j: usize = parse_num(t.next(), ln, "column index")?;
                let v: f64 = match header.field {
                    Field::Pattern => 1.0,
                    Field::Integer => parse_num::<i64>(t.next(), ln, "integer value")? as f64,
                    Field::Real => parse_num(t.next(), ln, "value")?,
                };
                if i == 0 || j == 0 || i > n_rows || j > n_cols {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("index ({i}, {j}) out of range"),
                    });
                }
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: ln,
                        message: "non-finite value".into(),
                    });
                }
                if header.symmetry != Symmetry::General && j > i {
                    return Err(Error::Parse {
                        line: ln,
                        message: "entry above the diagonal in symmetric storage".into(),
                    });
                }
                entries.push((i - 1, j - 1, v));
                mirror(i - 1, j - 1, v, &mut entries);
                seen += 1;
            }
            if seen != nnz {
                return Err(Error::Parse {
                    line: size_line,
                    message: format!("declared {nnz} entries, found {seen}"),
                });
            }
        }
        Format::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let mut positions = Vec::new();
            for j in 0..n_cols {
                let start = if header.symmetry == Symmetry::General {
                    0
                } else {
                    j
                };
                for i in start..n_rows {
                    positions.push((i, j));
                }
            }
            let mut k = 0;
            for (ln, l) in body {
                if k >= positions.len() {
                    return Err(Error::Parse {
                        line: ln,
                        message: "more values than the declared size".into(),
                    });
                }
                let mut t = l.split_whitespace();
                let v: f64 = match header.field {
                    Field::Integer => parse_num::<i64>(t.next(), ln, "integer value")? as f64,
                    _ => parse_num(t.next(), ln, "value")?,
                };
                let (i, j) = positions[k];
                if v != 0.0 {
                    entries.push((i, j, v));
                    mirror(i, j, v, &mut entries);
                }
                k += 1;
            }
            if k != positions.len() {
                return Err(Error::Parse {
                    line: size_line,
                    message: format!("declared {} values, found {k}", positions.len()),
                });
            }
        }
    }
    Ok(Parsed {
        n_rows,
        n_cols,
        entries,
    })
}

/// Parses Matrix Market text into a canonical sparse matrix.
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let p = parse_text(text)?;
    SparseMatrix::from_triplets(p.n_rows, p.n_cols, &p.entries)
}

/// Loads a `.mtx` file (coordinate or array; real, integer or pattern;
/// general, symmetric or skew-symmetric).
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_matrix_market(&text)
}

/// Loads a `.mtx` file as a dense matrix; used for right-hand sides.
pub fn load_dense_matrix_market(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    Ok(load_matrix_market(path)?.to_dense())
}

pub fn write_sparse_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a dense matrix in Matrix Market array format (column-major values).
pub fn write_dense_matrix_market(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.nrows(), a.ncols())?;
    for v in a.iter() {
        // shortest representation that round-trips exactly
        writeln!(w, "{v:?}")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a dense matrix as headerless CSV, one matrix row per line.
pub fn write_dense_csv(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    for i in 0..a.nrows() {
        w.write_record(a.row(i).iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}
