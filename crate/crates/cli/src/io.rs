//! Matrix file formats: Matrix Market (coordinate and array) and dense CSV.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use specnorm_core::Matrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported Matrix Market {what}: {value}")]
    Unsupported { what: &'static str, value: String },
    #[error("invalid matrix: {0}")]
    Matrix(#[from] specnorm_core::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> ReadError {
    ReadError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[value(name = "matrix-market")]
    MatrixMarket,
    #[value(name = "dense-csv")]
    DenseCsv,
}

impl Format {
    /// `.csv` files are dense CSV, everything else Matrix Market.
    pub fn infer(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::DenseCsv,
            _ => Format::MatrixMarket,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::MatrixMarket => "matrix-market",
            Format::DenseCsv => "dense-csv",
        })
    }
}

pub fn read_matrix(path: &Path, format: Format) -> Result<Matrix, ReadError> {
    let file = File::open(path)?;
    match format {
        Format::MatrixMarket => read_matrix_market(BufReader::new(file)),
        Format::DenseCsv => read_dense_csv(file),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Header {
    layout: Layout,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header, ReadError> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            1,
            "expected header '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(ReadError::Unsupported {
            what: "object",
            value: tokens[1].clone(),
        });
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => {
            return Err(ReadError::Unsupported {
                what: "format",
                value: other.to_string(),
            })
        }
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => {
            return Err(ReadError::Unsupported {
                what: "field",
                value: other.to_string(),
            })
        }
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => {
            return Err(ReadError::Unsupported {
                what: "symmetry",
                value: other.to_string(),
            })
        }
    };
    Ok(Header { layout, symmetry })
}

fn parse_field<T: FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T, ReadError> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))
}

fn no_trailing<'a>(mut it: impl Iterator<Item = &'a str>, line: usize) -> Result<(), ReadError> {
    match it.next() {
        Some(extra) => Err(parse_err(line, format!("unexpected trailing token '{extra}'"))),
        None => Ok(()),
    }
}

/// Reads a real or integer Matrix Market file.
///
/// Coordinate files give sparse matrices (duplicates summed), array files
/// dense ones. Symmetric and skew-symmetric storage is expanded.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<Matrix, ReadError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, line)) => parse_header(&line?)?,
        None => return Err(parse_err(1, "empty file")),
    };
    // remaining non-comment, non-blank lines
    let mut content = lines.filter_map(|(no, line)| match line {
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((no, t.to_string())))
            }
        }
        Err(e) => Some(Err(e)),
    });

    let (size_no, size_line) = content
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(1, "missing size line"))?;
    let mut tok = size_line.split_whitespace();
    let rows: usize = parse_field(tok.next(), size_no, "row count")?;
    let cols: usize = parse_field(tok.next(), size_no, "column count")?;
    let symmetric = header.symmetry != Symmetry::General;
    if symmetric && rows != cols {
        return Err(parse_err(size_no, "symmetric matrix must be square"));
    }
    let sign = if header.symmetry == Symmetry::SkewSymmetric { -1.0 } else { 1.0 };

    match header.layout {
        Layout::Coordinate => {
            let nnz: usize = parse_field(tok.next(), size_no, "entry count")?;
            no_trailing(tok, size_no)?;
            let mut entries = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
            let mut seen = 0;
            let mut last_no = size_no;
            for item in content {
                let (no, line) = item?;
                last_no = no;
                if seen == nnz {
                    return Err(parse_err(no, format!("more than {nnz} entries")));
                }
                let mut tok = line.split_whitespace();
                let i: usize = parse_field(tok.next(), no, "row index")?;
                let j: usize = parse_field(tok.next(), no, "column index")?;
                let v: f64 = parse_field(tok.next(), no, "value")?;
                no_trailing(tok, no)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(no, format!("index ({i}, {j}) outside {rows}x{cols}")));
                }
                if !v.is_finite() {
                    return Err(parse_err(no, "non-finite value"));
                }
                let (i, j) = (i - 1, j - 1);
                if header.symmetry == Symmetry::SkewSymmetric && i == j {
                    return Err(parse_err(no, "skew-symmetric matrix has a diagonal entry"));
                }
                entries.push((i, j, v));
                if symmetric && i != j {
                    entries.push((j, i, sign * v));
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(last_no, format!("expected {nnz} entries, found {seen}")));
            }
            Ok(Matrix::from_triplets(rows, cols, entries)?)
        }
        Layout::Array => {
            no_trailing(tok, size_no)?;
            let mut data = vec![0.0; rows * cols];
            let positions: Vec<(usize, usize)> = match header.symmetry {
                Symmetry::General => (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect(),
                Symmetry::Symmetric => (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect(),
                Symmetry::SkewSymmetric => {
                    (0..cols).flat_map(|j| (j + 1..rows).map(move |i| (i, j))).collect()
                }
            };
            let mut filled = 0;
            let mut last_no = size_no;
            for item in content {
                let (no, line) = item?;
                last_no = no;
                for token in line.split_whitespace() {
                    let &(i, j) = positions
                        .get(filled)
                        .ok_or_else(|| parse_err(no, format!("more than {} values", positions.len())))?;
                    let v: f64 = parse_field(Some(token), no, "value")?;
                    if !v.is_finite() {
                        return Err(parse_err(no, "non-finite value"));
                    }
                    data[i * cols + j] = v;
                    if symmetric && i != j {
                        data[j * cols + i] = sign * v;
                    }
                    filled += 1;
                }
            }
            if filled != positions.len() {
                return Err(parse_err(
                    last_no,
                    format!("expected {} values, found {filled}", positions.len()),
                ));
            }
            Ok(Matrix::from_dense(rows, cols, data)?)
        }
    }
}

/// Writes `m` as `coordinate real general`, values in shortest round-trip form.
pub fn write_matrix_market<W: Write>(m: &Matrix, mut w: W) -> io::Result<()> {
    let triplets = m.triplets();
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), triplets.len())?;
    for (i, j, v) in triplets {
        writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
    }
    w.flush()
}

/// Reads comma-separated rows of numbers into a dense matrix.
pub fn read_dense_csv<R: Read>(reader: R) -> Result<Matrix, ReadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(parse_err(line, format!("expected {c} fields, found {}", record.len())))
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = parse_field(Some(field), line, "value")?;
            if !v.is_finite() {
                return Err(parse_err(line, "non-finite value"));
            }
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err(1, "no rows"))?;
    Ok(Matrix::from_dense(rows, cols, data)?)
}
