//! Text formats: triplet files and Matrix Market dense arrays.
//!
//! Triplet file:
//!
//! ```text
//! %%TripletRep 1.0
//! n nnz
//! i j p_ij        (nnz lines, 1-based, i != j, p_ij >= 0)
//! u_1 ... u_n
//! v_1 ... v_n
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips binary64.
//! Lines starting with `%` after the header are comments.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::DenseMatrix;
use crate::triplet::TripletRep;

pub const TRIPLET_HEADER: &str = "%%TripletRep 1.0";
pub const MM_HEADER: &str = "%%MatrixMarket matrix array real general";

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Non-comment lines with their 1-based line numbers, header excluded.
struct Lines {
    lines: Vec<(usize, String)>,
    pos: usize,
    last_line: usize,
}

impl Lines {
    fn new(text: &str, header: &str) -> Result<Self> {
        let mut it = text.lines().enumerate();
        match it.next() {
            Some((_, first)) if first.trim().eq_ignore_ascii_case(header) => {}
            Some((_, first)) => {
                return Err(parse_err(1, 1, format!("expected header {header:?}, found {:?}", first.trim())))
            }
            None => return Err(parse_err(1, 1, "empty input")),
        }
        let lines: Vec<(usize, String)> = it
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('%')
            })
            .map(|(i, l)| (i + 1, l.to_string()))
            .collect();
        let last_line = text.lines().count();
        Ok(Lines { lines, pos: 0, last_line })
    }

    fn next(&mut self, what: &str) -> Result<(usize, String)> {
        let l = self.lines.get(self.pos).cloned().ok_or_else(|| {
            parse_err(self.last_line + 1, 1, format!("unexpected end of input, expected {what}"))
        })?;
        self.pos += 1;
        Ok(l)
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some((line, _)) => Err(parse_err(*line, 1, "trailing content")),
            None => Ok(()),
        }
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_f64(tok: &str, line: usize, column: usize) -> Result<f64> {
    let x: f64 = tok.parse().map_err(|_| parse_err(line, column, format!("invalid number {tok:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, column, format!("non-finite value {tok:?}")));
    }
    Ok(x)
}

fn parse_usize(tok: &str, line: usize, column: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, column, format!("invalid integer {tok:?}")))
}

fn expect_count(toks: &[(usize, &str)], count: usize, line: usize, what: &str) -> Result<()> {
    if toks.len() != count {
        let column = toks.get(count).map_or(1, |t| t.0);
        return Err(parse_err(line, column, format!("expected {count} values for {what}, found {}", toks.len())));
    }
    Ok(())
}

fn parse_vector(lines: &mut Lines, n: usize, what: &str) -> Result<Vec<f64>> {
    let (ln, text) = lines.next(what)?;
    let toks = tokens(&text);
    expect_count(&toks, n, ln, what)?;
    toks.iter().map(|&(c, t)| parse_f64(t, ln, c)).collect()
}

pub fn parse_triplet(text: &str) -> Result<TripletRep> {
    let mut lines = Lines::new(text, TRIPLET_HEADER)?;
    let (ln, size) = lines.next("size line")?;
    let toks = tokens(&size);
    expect_count(&toks, 2, ln, "size line `n nnz`")?;
    let n = parse_usize(toks[0].1, ln, toks[0].0)?;
    let nnz = parse_usize(toks[1].1, ln, toks[1].0)?;
    if n == 0 {
        return Err(parse_err(ln, toks[0].0, "n must be positive"));
    }

    let mut p = DenseMatrix::zeros(n, n);
    let mut seen = vec![false; n * n];
    for _ in 0..nnz {
        let (ln, text) = lines.next("entry `i j p_ij`")?;
        let toks = tokens(&text);
        expect_count(&toks, 3, ln, "entry `i j p_ij`")?;
        let i = parse_usize(toks[0].1, ln, toks[0].0)?;
        let j = parse_usize(toks[1].1, ln, toks[1].0)?;
        let x = parse_f64(toks[2].1, ln, toks[2].0)?;
        if i == 0 || i > n {
            return Err(parse_err(ln, toks[0].0, format!("row index {i} out of range 1..={n}")));
        }
        if j == 0 || j > n {
            return Err(parse_err(ln, toks[1].0, format!("column index {j} out of range 1..={n}")));
        }
        if i == j {
            return Err(parse_err(ln, toks[0].0, format!("diagonal entry ({i}, {j}) not allowed in P")));
        }
        if x < 0.0 {
            return Err(parse_err(ln, toks[2].0, format!("negative entry {x}")));
        }
        let k = (i - 1) * n + (j - 1);
        if seen[k] {
            return Err(parse_err(ln, toks[0].0, format!("duplicate entry ({i}, {j})")));
        }
        seen[k] = true;
        p[(i - 1, j - 1)] = x;
    }
    let u = parse_vector(&mut lines, n, "u")?;
    let v = parse_vector(&mut lines, n, "v")?;
    lines.finish()?;
    TripletRep::new(p, u, v)
}

pub fn write_triplet<W: Write>(mut w: W, t: &TripletRep) -> Result<()> {
    let n = t.n();
    writeln!(w, "{TRIPLET_HEADER}")?;
    writeln!(w, "{} {}", n, t.nnz())?;
    for i in 0..n {
        for j in 0..n {
            let x = t.p()[(i, j)];
            if x > 0.0 {
                writeln!(w, "{} {} {}", i + 1, j + 1, fmt_num(x))?;
            }
        }
    }
    let line = |v: &[f64]| v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(" ");
    writeln!(w, "{}", line(t.u()))?;
    writeln!(w, "{}", line(t.v()))?;
    w.flush()?;
    Ok(())
}

/// Dense Matrix Market array (column-major values).
pub fn parse_matrix_market(text: &str) -> Result<DenseMatrix> {
    let mut lines = Lines::new(text, MM_HEADER)?;
    let (ln, size) = lines.next("size line")?;
    let toks = tokens(&size);
    expect_count(&toks, 2, ln, "size line `rows cols`")?;
    let rows = parse_usize(toks[0].1, ln, toks[0].0)?;
    let cols = parse_usize(toks[1].1, ln, toks[1].0)?;
    let mut a = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let (ln, text) = lines.next("matrix entry")?;
            let toks = tokens(&text);
            expect_count(&toks, 1, ln, "matrix entry")?;
            a[(i, j)] = parse_f64(toks[0].1, ln, toks[0].0)?;
        }
    }
    lines.finish()?;
    Ok(a)
}

pub fn write_matrix_market<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    writeln!(w, "{MM_HEADER}")?;
    writeln!(w, "{} {}", a.n_rows(), a.n_cols())?;
    for j in 0..a.n_cols() {
        for i in 0..a.n_rows() {
            writeln!(w, "{}", fmt_num(a[(i, j)]))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A vector given either as a Matrix Market `n x 1` array or as plain
/// whitespace-separated numbers.
pub fn parse_vector_text(text: &str) -> Result<Vec<f64>> {
    if text.trim_start().starts_with("%%MatrixMarket") {
        let m = parse_matrix_market(text)?;
        if m.n_cols() != 1 {
            return Err(parse_err(2, 1, format!("expected a single column, found {}", m.n_cols())));
        }
        return Ok(m.into_vec());
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('%') {
            continue;
        }
        for (c, tok) in tokens(line) {
            out.push(parse_f64(tok, i + 1, c)?);
        }
    }
    Ok(out)
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut s)?;
    Ok(s)
}

pub fn read_triplet_file(path: impl AsRef<Path>) -> Result<TripletRep> {
    parse_triplet(&read_to_string(path.as_ref())?)
}

pub fn write_triplet_file(path: impl AsRef<Path>, t: &TripletRep) -> Result<()> {
    write_triplet(BufWriter::new(File::create(path)?), t)
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix_market(&read_to_string(path.as_ref())?)
}

pub fn write_matrix_market_file(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write_matrix_market(BufWriter::new(File::create(path)?), a)
}

pub fn read_vector_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector_text(&read_to_string(path.as_ref())?)
}

/// Input accepted by the CLI: a triplet file, or a dense matrix that still
/// needs a `u`.
pub enum MatrixInput {
    Triplet(TripletRep),
    Dense(DenseMatrix),
}

pub fn read_input_file(path: impl AsRef<Path>) -> Result<MatrixInput> {
    let text = read_to_string(path.as_ref())?;
    let first = text.lines().next().unwrap_or("").trim();
    if first.eq_ignore_ascii_case(TRIPLET_HEADER) {
        Ok(MatrixInput::Triplet(parse_triplet(&text)?))
    } else if first.starts_with("%%MatrixMarket") {
        Ok(MatrixInput::Dense(parse_matrix_market(&text)?))
    } else {
        Err(parse_err(1, 1, format!("unrecognized header {first:?}")))
    }
}

/// Reads all of `r`; convenience for stdin.
pub fn read_all<R: BufRead>(mut r: R) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen;

    #[test]
    fn triplet_round_trip() {
        let t = testgen::gen_random(9, 4, false);
        let mut buf = Vec::new();
        write_triplet(&mut buf, &t).unwrap();
        let back = parse_triplet(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn matrix_market_round_trip() {
        let a = DenseMatrix::from_rows(&[[0.1, -1.0 / 3.0, 1e-300], [2.0, 5e-324, -7.25]]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &a).unwrap();
        let back = parse_matrix_market(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, a);
        for (x, y) in back.as_slice().iter().zip(a.as_slice()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn triplet_rejections() {
        let bad_index = "%%TripletRep 1.0\n2 1\n3 1 1.0\n1 1\n0 0\n";
        match parse_triplet(bad_index) {
            Err(Error::Parse { line: 3, column: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let diag = "%%TripletRep 1.0\n2 1\n1 1 1.0\n1 1\n0 0\n";
        assert!(matches!(parse_triplet(diag), Err(Error::Parse { line: 3, .. })));
        let neg = "%%TripletRep 1.0\n2 1\n1 2 -1.0\n1 1\n0 0\n";
        assert!(matches!(parse_triplet(neg), Err(Error::Parse { line: 3, column: 5, .. })));
        let dup = "%%TripletRep 1.0\n2 2\n1 2 1\n1 2 1\n1 1\n1 0\n";
        assert!(matches!(parse_triplet(dup), Err(Error::Parse { line: 4, .. })));
        let nan = "%%TripletRep 1.0\n2 0\n1 NaN\n0 0\n";
        assert!(matches!(parse_triplet(nan), Err(Error::Parse { line: 3, column: 3, .. })));
        let short = "%%TripletRep 1.0\n2 0\n1 1\n";
        assert!(matches!(parse_triplet(short), Err(Error::Parse { .. })));
        assert!(matches!(parse_triplet("%%Other\n"), Err(Error::Parse { line: 1, .. })));
        // Structurally fine but v inconsistent with u: caught by validation.
        let inconsistent = "%%TripletRep 1.0\n2 0\n1 1\n-1 0\n";
        assert!(matches!(parse_triplet(inconsistent), Err(Error::InvalidTriplet(_))));
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector_text("1 2\n3\n").unwrap(), vec![1.0, 2.0, 3.0]);
        let mm = "%%MatrixMarket matrix array real general\n2 1\n1.5\n2.5\n";
        assert_eq!(parse_vector_text(mm).unwrap(), vec![1.5, 2.5]);
    }
}
