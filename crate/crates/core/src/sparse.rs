//! Compressed-row sparse matrices.
//!
//! Used for mesh adjacency, Laplacians and the down/up-sampling operators.
//! Feature batches are stored as `(batch * rows) x features` dense arrays, so
//! the products here also come in a block form that applies the same matrix
//! to every sample of a batch.

use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2, ArrayViewMut2, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triples. Duplicate coordinates
    /// are summed and entries that end up exactly zero are dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(Error::arg(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::arg(format!("non-finite entry at ({r}, {c})")));
            }
        }
        entries.sort_by_key(|a| (a.0, a.1));

        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut i = 0;
        while i < entries.len() {
            let (r, c, mut v) = entries[i];
            i += 1;
            while i < entries.len() && entries[i].0 == r && entries[i].1 == c {
                v += entries[i].2;
                i += 1;
            }
            if v != 0.0 {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(col, value)` pairs of one row, in increasing column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.indptr[r + 1] - self.indptr[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                let slot = next[c];
                indices[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            indptr,
            indices,
            values,
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, self.cols));
        for (r, c, v) in self.triplets() {
            out[[r, c]] = v;
        }
        out
    }

    /// Exact entrywise symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.triplets().all(|(r, c, v)| self.get(c, r) == v)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).map(|(_, v)| v).sum()).collect()
    }

    /// Sparse times dense: `(rows x cols) * (cols x F) -> rows x F`.
    pub fn mul_dense(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.nrows() != self.cols {
            return Err(Error::arg(format!(
                "cannot multiply a {}x{} sparse matrix by a {}x{} dense matrix",
                self.rows,
                self.cols,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(self.mul_blocks(x, 1))
    }

    /// Applies the matrix to each of `batch` stacked row blocks of `x`.
    ///
    /// `x` must have `batch * cols` rows; the result has `batch * rows` rows.
    pub fn mul_blocks(&self, x: ArrayView2<'_, f64>, batch: usize) -> Array2<f64> {
        let mut out = Array2::zeros((batch * self.rows, x.ncols()));
        self.mul_blocks_into(x, batch, 1.0, out.view_mut());
        out
    }

    /// `out += alpha * blockdiag(self) * x`.
    pub fn mul_blocks_into(
        &self,
        x: ArrayView2<'_, f64>,
        batch: usize,
        alpha: f64,
        mut out: ArrayViewMut2<'_, f64>,
    ) {
        assert_eq!(x.nrows(), batch * self.cols, "block product row mismatch");
        assert_eq!(out.nrows(), batch * self.rows, "block product output mismatch");
        assert_eq!(out.ncols(), x.ncols(), "block product column mismatch");
        let f = x.ncols();
        if let (Some(xs), Some(os)) = (x.as_slice(), out.as_slice_mut()) {
            for b in 0..batch {
                let xb = &xs[b * self.cols * f..(b + 1) * self.cols * f];
                let ob = &mut os[b * self.rows * f..(b + 1) * self.rows * f];
                for r in 0..self.rows {
                    let orow = &mut ob[r * f..(r + 1) * f];
                    for i in self.indptr[r]..self.indptr[r + 1] {
                        let w = alpha * self.values[i];
                        let c = self.indices[i];
                        for (o, xi) in orow.iter_mut().zip(&xb[c * f..(c + 1) * f]) {
                            *o += w * xi;
                        }
                    }
                }
            }
            return;
        }
        for b in 0..batch {
            let xb = x.slice(ndarray::s![b * self.cols..(b + 1) * self.cols, ..]);
            let mut ob = out.slice_mut(ndarray::s![b * self.rows..(b + 1) * self.rows, ..]);
            for (r, mut orow) in ob.axis_iter_mut(Axis(0)).enumerate() {
                for (c, v) in self.row(r) {
                    let w = alpha * v;
                    orow.zip_mut_with(&xb.row(c), |o, &xi| *o += w * xi);
                }
            }
        }
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {v:?}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(s) if s.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 1, "missing `rows cols nnz` header"))?;
        let header = header?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(origin, hline, e.to_string()))?;
        let [rows, cols, nnz] = dims[..] else {
            return Err(Error::parse(origin, hline, "expected `rows cols nnz`"));
        };
        let mut triplets = Vec::with_capacity(nnz);
        for (lineno, line) in lines {
            let line = line?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::parse(origin, lineno, "expected `row col value`"));
            }
            let bad = |e: String| Error::parse(origin, lineno, e);
            let r = toks[0].parse::<usize>().map_err(|e| bad(e.to_string()))?;
            let c = toks[1].parse::<usize>().map_err(|e| bad(e.to_string()))?;
            let v = toks[2].parse::<f64>().map_err(|e| bad(e.to_string()))?;
            triplets.push((r, c, v));
        }
        if triplets.len() != nnz {
            return Err(Error::Format(format!(
                "{}: header declares {nnz} entries but {} were found",
                origin.display(),
                triplets.len()
            )));
        }
        let m = Self::from_triplets(rows, cols, triplets)?;
        if m.nnz() != nnz {
            return Err(Error::Format(format!(
                "{}: duplicate or zero entries in sparse matrix",
                origin.display()
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_text(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_text(std::io::BufReader::new(f), path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            vec![(0, 1, 1.0), (0, 1, 2.0), (1, 2, 1.0), (1, 2, -1.0), (1, 0, 4.0)],
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 2), 0.0);
        assert_eq!(m.get(1, 0), 4.0);
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn identity_leaves_features_unchanged() {
        let x = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let y = SparseMatrix::identity(3).mul_dense(x.view()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn shape_mismatch_is_an_argument_error() {
        let x = Array2::<f64>::zeros((4, 2));
        let err = SparseMatrix::identity(3).mul_dense(x.view()).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn block_product_matches_per_sample_product() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 0, 1.5), (0, 2, -1.0), (1, 1, 2.0)])
            .unwrap();
        let x = array![[1.0], [2.0], [3.0], [4.0], [5.0], [6.0]];
        let y = m.mul_blocks(x.view(), 2);
        assert_eq!(y, array![[-1.5], [4.0], [0.0], [10.0]]);
    }

    #[test]
    fn transpose_round_trip() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 2, 1.0), (1, 0, 2.0), (1, 2, 3.0)])
            .unwrap();
        let t = m.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.get(2, 1), 3.0);
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn text_format_round_trip() {
        let m = SparseMatrix::from_triplets(3, 2, vec![(0, 1, 0.1), (2, 0, 1.0 / 3.0)]).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 2 2\n0 1 0.1\n"));
        let back = SparseMatrix::read_text(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn text_format_rejects_wrong_count() {
        let text = "2 2 2\n0 0 1.0\n";
        assert!(SparseMatrix::read_text(text.as_bytes(), Path::new("mem")).is_err());
    }
}
