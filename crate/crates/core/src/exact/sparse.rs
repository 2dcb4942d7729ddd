use crate::error::{Error, Result};
use crate::exact::Field;

/// An immutable sparse matrix stored by rows, each row sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, F::Elem)>>,
}

impl<F: Field> SparseMatrix<F> {
    pub fn zero(field: F, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(field: F, size: usize) -> Self {
        let one = field.one();
        let data = (0..size).map(|i| vec![(i, one.clone())]).collect();
        SparseMatrix { field, rows: size, cols: size, data }
    }

    /// Builds a matrix from `(row, col, value)` triplets, rejecting
    /// out-of-range indices, duplicates and explicit zeros.
    pub fn from_triplets(
        field: F,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, F::Elem)>,
    ) -> Result<Self> {
        let mut data: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Shape(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            if field.is_zero(&v) {
                return Err(Error::usage(format!("stored zero at ({r},{c})")));
            }
            data[r].push((c, v));
        }
        for (r, row) in data.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::usage(format!("duplicate entry ({r},{})", w[0].0)));
            }
        }
        Ok(SparseMatrix { field, rows, cols, data })
    }

    /// Like [`from_triplets`](Self::from_triplets) but sums duplicates and drops zeros.
    pub fn from_accumulated(
        field: F,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, F::Elem)>,
    ) -> Self {
        let mut data: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            data[r].push((c, v));
        }
        for row in data.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, F::Elem)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv = field.add(lv, &v),
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !field.is_zero(v));
            *row = merged;
        }
        SparseMatrix { field, rows, cols, data }
    }

    /// Builds a matrix whose columns are the given dense vectors.
    pub fn from_columns(field: F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let cols = columns.len();
        let mut data: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); rows];
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, v) in col.iter().enumerate() {
                if !field.is_zero(v) {
                    data[r].push((c, v.clone()));
                }
            }
        }
        SparseMatrix { field, rows, cols, data }
    }

    pub fn from_dense_rows(field: F, cols: usize, rows: &[Vec<F::Elem>]) -> Self {
        let data = rows
            .iter()
            .map(|row| {
                assert_eq!(row.len(), cols, "row length");
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !field.is_zero(v))
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        SparseMatrix { field, rows: rows.len(), cols, data }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row(&self, r: usize) -> &[(usize, F::Elem)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> F::Elem {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &F::Elem)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in self.triplets() {
            data[c].push((r, v.clone()));
        }
        SparseMatrix { field: self.field.clone(), rows: self.cols, cols: self.rows, data }
    }

    pub fn column(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F::Elem>> {
        let mut out = vec![vec![self.field.zero(); self.rows]; self.cols];
        for (r, c, v) in self.triplets() {
            out[c][r] = v.clone();
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<F::Elem>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v.clone();
        }
        out
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch { left: self.field.spec(), right: other.field.spec() });
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = vec![f.zero(); other.cols];
                let mut touched = Vec::new();
                for (k, a) in row {
                    for (c, b) in &other.data[*k] {
                        if f.is_zero(&acc[*c]) {
                            touched.push(*c);
                        }
                        f.axpy(&mut acc[*c], a, b);
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                touched
                    .into_iter()
                    .filter(|c| !f.is_zero(&acc[*c]))
                    .map(|c| (c, acc[c].clone()))
                    .collect()
            })
            .collect();
        Ok(SparseMatrix { field: f.clone(), rows: self.rows, cols: other.cols, data })
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "vector length");
        let f = &self.field;
        self.data
            .iter()
            .map(|row| {
                let mut acc = f.zero();
                for (c, a) in row {
                    f.axpy(&mut acc, a, &v[*c]);
                }
                acc
            })
            .collect()
    }

    /// Sub-matrix on the given row and column index lists (in that order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.cols];
        for (i, &c) in cols.iter().enumerate() {
            col_pos[c] = i;
        }
        let data = rows
            .iter()
            .map(|&r| {
                let mut row: Vec<(usize, F::Elem)> = self.data[r]
                    .iter()
                    .filter(|(c, _)| col_pos[*c] != usize::MAX)
                    .map(|(c, v)| (col_pos[*c], v.clone()))
                    .collect();
                row.sort_by_key(|e| e.0);
                row
            })
            .collect();
        SparseMatrix { field: self.field.clone(), rows: rows.len(), cols: cols.len(), data }
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        self.to_dense()
            .iter()
            .map(|row| row.iter().map(|v| self.field.render(v)).collect())
            .collect()
    }
}
