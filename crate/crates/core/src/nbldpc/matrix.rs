//! Sparse parity-check matrices over GF(q) and their text format.
//!
//! File format (all indices 0-based, single spaces, `\n` line ends):
//!
//! ```text
//! q n m
//! col:weight col:weight ...     <- row 0
//! ...                           <- one line per row, m lines total
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::galois::{Gf, GfContext};

/// One nonzero entry of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Entry {
    pub col: u32,
    pub weight: Gf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseParityMatrix {
    q: usize,
    n: usize,
    rows: Vec<Vec<Entry>>,
}

impl SparseParityMatrix {
    /// Validates and wraps row lists: weights nonzero and in range, columns
    /// in range and unique per row.
    pub fn new(q: usize, n: usize, rows: Vec<Vec<Entry>>) -> Result<Self> {
        let mut seen = vec![usize::MAX; n];
        for (r, row) in rows.iter().enumerate() {
            for e in row {
                let c = e.col as usize;
                if c >= n {
                    return Err(Error::Construction(format!("row {r}: column {c} out of range")));
                }
                if e.weight == 0 || e.weight as usize >= q {
                    return Err(Error::Construction(format!("row {r}: invalid weight {}", e.weight)));
                }
                if seen[c] == r {
                    return Err(Error::Construction(format!("row {r}: duplicate column {c}")));
                }
                seen[c] = r;
            }
        }
        Ok(Self { q, n, rows })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of columns (code length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows (syndrome length).
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Entry>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Entry] {
        &self.rows[i]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in self.rows.iter().flatten() {
            deg[e.col as usize] += 1;
        }
        deg
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    /// For each column, the `(row, entry index within row)` pairs touching it.
    pub fn column_entries(&self) -> Vec<Vec<(u32, u32)>> {
        let mut cols = vec![Vec::new(); self.n];
        for (r, row) in self.rows.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                cols[e.col as usize].push((r as u32, k as u32));
            }
        }
        cols
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 + self.edge_count() * 8);
        let _ = writeln!(s, "{} {} {}", self.q, self.n, self.m());
        for row in &self.rows {
            for (k, e) in row.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{}:{}", e.col, e.weight);
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse { line: 1, msg: "empty matrix file".into() })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse { line: 1, msg: format!("bad header token `{t}`") }))
            .collect::<Result<_>>()?;
        let [q, n, m] = dims[..] else {
            return Err(Error::Parse { line: 1, msg: "header must be `q n m`".into() });
        };
        let mut rows = Vec::with_capacity(m);
        for r in 0..m {
            let line = r + 2;
            let text = lines.next().ok_or(Error::Parse { line, msg: "missing row".into() })?;
            let row = text
                .split_whitespace()
                .map(|tok| {
                    let (c, w) = tok.split_once(':').ok_or(Error::Parse { line, msg: format!("bad entry `{tok}`") })?;
                    let col = c.parse().map_err(|_| Error::Parse { line, msg: format!("bad column `{c}`") })?;
                    let weight = w.parse().map_err(|_| Error::Parse { line, msg: format!("bad weight `{w}`") })?;
                    Ok(Entry { col, weight })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse { line: m + 2, msg: "trailing content after last row".into() });
        }
        Self::new(q, n, rows)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// `s = H x` over GF(q).
pub fn syndrome(h: &SparseParityMatrix, x: &[Gf], ctx: &GfContext) -> Result<Vec<Gf>> {
    if x.len() != h.n() {
        return Err(Error::LengthMismatch { expected: h.n(), actual: x.len() });
    }
    Ok(h.rows()
        .iter()
        .map(|row| row.iter().fold(0, |acc, e| acc ^ ctx.mul(e.weight, x[e.col as usize])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn e(col: u32, weight: Gf) -> Entry {
        Entry { col, weight }
    }

    fn hand_matrix() -> SparseParityMatrix {
        SparseParityMatrix::new(
            4,
            6,
            vec![
                vec![e(0, 1), e(1, 2), e(3, 3)],
                vec![e(1, 3), e(2, 1), e(4, 2)],
                vec![e(0, 2), e(4, 3), e(5, 1)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_word_has_zero_syndrome() {
        let ctx = GfContext::new(4).unwrap();
        assert_eq!(syndrome(&hand_matrix(), &[0; 6], &ctx).unwrap(), vec![0; 3]);
    }

    #[test]
    fn identity_projects() {
        let ctx = GfContext::new(8).unwrap();
        let h = SparseParityMatrix::new(8, 5, vec![vec![e(0, 1)], vec![e(2, 1)], vec![e(4, 1)]]).unwrap();
        assert_eq!(syndrome(&h, &[5, 6, 7, 1, 2], &ctx).unwrap(), vec![5, 7, 2]);
    }

    #[test]
    fn hand_matrix_against_scalar_oracle() {
        // GF(4) products written out by hand: 2*2=3, 2*3=1, 3*3=2.
        let mul = |a: u8, b: u8| -> u8 {
            const T: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
            T[a as usize][b as usize]
        };
        let ctx = GfContext::new(4).unwrap();
        let h = hand_matrix();
        let mut r = rng::rng(5, &[]);
        for _ in 0..50 {
            let x: Vec<u8> = (0..6).map(|_| r.gen_range(0..4)).collect();
            let expect = vec![
                mul(1, x[0]) ^ mul(2, x[1]) ^ mul(3, x[3]),
                mul(3, x[1]) ^ mul(1, x[2]) ^ mul(2, x[4]),
                mul(2, x[0]) ^ mul(3, x[4]) ^ mul(1, x[5]),
            ];
            assert_eq!(syndrome(&h, &x, &ctx).unwrap(), expect);
        }
    }

    #[test]
    fn text_format_is_exact() {
        let h = hand_matrix();
        let text = h.to_text();
        assert_eq!(text, "4 6 3\n0:1 1:2 3:3\n1:3 2:1 4:2\n0:2 4:3 5:1\n");
        assert_eq!(SparseParityMatrix::parse(&text).unwrap(), h);
    }

    #[test]
    fn rejects_malformed() {
        assert!(SparseParityMatrix::new(4, 3, vec![vec![e(0, 0)]]).is_err());
        assert!(SparseParityMatrix::new(4, 3, vec![vec![e(0, 1), e(0, 2)]]).is_err());
        assert!(SparseParityMatrix::new(4, 3, vec![vec![e(3, 1)]]).is_err());
        assert!(SparseParityMatrix::parse("4 3 2\n0:1\n").is_err());
        assert!(SparseParityMatrix::parse("4 3 1\n0-1\n").is_err());
        let ctx = GfContext::new(4).unwrap();
        assert!(syndrome(&hand_matrix(), &[0; 5], &ctx).is_err());
    }
}
