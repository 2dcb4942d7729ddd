use crate::exact::{Field, SparseMatrix};

type Row<E> = Vec<(usize, E)>;

/// Gauss-Jordan form of a matrix produced by Markowitz pivoting.
///
/// Pivots are chosen to minimise `(row_count - 1) * (col_count - 1)` over
/// the remaining active submatrix, ties broken by smallest `(row, col)`.
#[derive(Clone, Debug)]
pub struct RowReduction<F: Field> {
    field: F,
    cols: usize,
    /// `(original row, pivot column)` in elimination order.
    pivots: Vec<(usize, usize)>,
    /// Reduced pivot rows: pivot entry 1, zero in every other pivot column.
    reduced: Vec<Row<F::Elem>>,
}

fn sub_scaled<F: Field>(f: &F, target: &Row<F::Elem>, c: &F::Elem, src: &Row<F::Elem>) -> Row<F::Elem> {
    // target - c * src, both sorted by column.
    let mut out = Vec::with_capacity(target.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < src.len() {
        let ti = target.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let sj = src.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ti < sj {
            out.push(target[i].clone());
            i += 1;
        } else if sj < ti {
            out.push((sj, f.neg(&f.mul(c, &src[j].1))));
            j += 1;
        } else {
            let v = f.sub(&target[i].1, &f.mul(c, &src[j].1));
            if !f.is_zero(&v) {
                out.push((ti, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn entry<'a, E>(row: &'a Row<E>, c: usize) -> Option<&'a E> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|i| &row[i].1)
}

impl<F: Field> RowReduction<F> {
    pub fn new(m: &SparseMatrix<F>) -> Self {
        let f = m.field().clone();
        let mut rows: Vec<Row<F::Elem>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
        let mut active = vec![true; m.rows()];
        let mut pivot_slot: Vec<Option<usize>> = vec![None; m.rows()];
        let mut pivots = Vec::new();
        let mut col_count = vec![0usize; m.cols()];
        loop {
            col_count.iter_mut().for_each(|c| *c = 0);
            for (r, row) in rows.iter().enumerate() {
                if active[r] {
                    for (c, _) in row {
                        col_count[*c] += 1;
                    }
                }
            }
            let mut best: Option<(usize, usize, usize)> = None;
            'scan: for (r, row) in rows.iter().enumerate() {
                if !active[r] || row.is_empty() {
                    continue;
                }
                let rc = row.len() - 1;
                for (c, _) in row {
                    let cost = rc * (col_count[*c] - 1);
                    if best.map_or(true, |b| cost < b.0) {
                        best = Some((cost, r, *c));
                        if cost == 0 {
                            break 'scan;
                        }
                    }
                }
            }
            let Some((_, pr, pc)) = best else { break };
            let inv = f.inv(entry(&rows[pr], pc).expect("pivot present"));
            for e in rows[pr].iter_mut() {
                e.1 = f.mul(&e.1, &inv);
            }
            let pivot_row = std::mem::take(&mut rows[pr]);
            for (r, row) in rows.iter_mut().enumerate() {
                if r == pr {
                    continue;
                }
                if let Some(c) = entry(row, pc).cloned() {
                    *row = sub_scaled(&f, row, &c, &pivot_row);
                }
            }
            rows[pr] = pivot_row;
            active[pr] = false;
            pivot_slot[pr] = Some(pivots.len());
            pivots.push((pr, pc));
        }
        let reduced = pivots.iter().map(|&(r, _)| rows[r].clone()).collect();
        RowReduction { field: f, cols: m.cols(), pivots, reduced }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[(usize, usize)] {
        &self.pivots
    }

    /// Original row indices whose rows form a basis of the row space.
    pub fn basis_rows(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pivots.iter().map(|p| p.0).collect();
        v.sort_unstable();
        v
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &(_, c) in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.cols).filter(|c| !is_pivot[*c]).collect()
    }

    /// Null-space basis as the columns of a `cols x (cols - rank)` matrix,
    /// one column per free variable in increasing order.
    pub fn kernel(&self) -> SparseMatrix<F> {
        let f = &self.field;
        let free = self.free_columns();
        let mut trip = Vec::new();
        for (k, &j) in free.iter().enumerate() {
            trip.push((j, k, f.one()));
            for (slot, &(_, pc)) in self.pivots.iter().enumerate() {
                if let Some(v) = entry(&self.reduced[slot], j) {
                    trip.push((pc, k, f.neg(v)));
                }
            }
        }
        SparseMatrix::from_triplets(f.clone(), self.cols, free.len(), trip).expect("kernel triplets are valid")
    }
}

pub fn rank<F: Field>(m: &SparseMatrix<F>) -> usize {
    if m.is_zero() {
        return 0;
    }
    // Reduce along the shorter side; rank is transpose invariant.
    if m.cols() < m.rows() {
        RowReduction::new(&m.transpose()).rank()
    } else {
        RowReduction::new(m).rank()
    }
}

/// Basis of the null space of `m`; `m * kernel_basis(m) = 0`.
pub fn kernel_basis<F: Field>(m: &SparseMatrix<F>) -> SparseMatrix<F> {
    RowReduction::new(m).kernel()
}

/// Indices of columns of `m` forming a basis of its column space.
pub fn independent_columns<F: Field>(m: &SparseMatrix<F>) -> Vec<usize> {
    RowReduction::new(&m.transpose()).basis_rows()
}
