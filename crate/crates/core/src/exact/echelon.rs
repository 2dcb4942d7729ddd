use crate::exact::Field;

#[derive(Clone, Debug)]
struct EchelonRow<E> {
    pivot: usize,
    vector: Vec<E>,
    /// Coefficients expressing `vector` in the inserted generators.
    tag: Vec<E>,
}

/// Incrementally built reduced row echelon basis of a subspace of `F^dim`.
///
/// When tracking is on, every accepted (independent) vector counts as a
/// generator and each stored row remembers how it is written in those
/// generators, so a reduction also returns the generator coefficients of the
/// removed part.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    dim: usize,
    track: bool,
    generators: usize,
    rows: Vec<EchelonRow<F::Elem>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F, dim: usize) -> Self {
        Echelon { field, dim, track: false, generators: 0, rows: Vec::new() }
    }

    pub fn tracked(field: F, dim: usize) -> Self {
        Echelon { field, dim, track: true, generators: 0, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.pivot).collect()
    }

    /// Basis rows in reduced echelon form, ordered by insertion.
    pub fn basis(&self) -> Vec<Vec<F::Elem>> {
        self.rows.iter().map(|r| r.vector.clone()).collect()
    }

    fn pad(&self, tag: &mut Vec<F::Elem>) {
        tag.resize(self.generators, self.field.zero());
    }

    /// Returns `(residual, coefficients)` with
    /// `v = residual + sum coefficients[g] * generator[g]` and the residual
    /// zero in every pivot column. Coefficients are empty when untracked.
    pub fn reduce(&self, v: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
        assert_eq!(v.len(), self.dim, "vector length");
        let f = &self.field;
        let mut res = v.to_vec();
        let mut coeffs = if self.track { vec![f.zero(); self.generators] } else { Vec::new() };
        for row in &self.rows {
            let c = v[row.pivot].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (i, x) in row.vector.iter().enumerate() {
                if !f.is_zero(x) {
                    res[i] = f.sub(&res[i], &f.mul(&c, x));
                }
            }
            if self.track {
                for (g, t) in row.tag.iter().enumerate() {
                    if !f.is_zero(t) {
                        f.axpy(&mut coeffs[g], &c, t);
                    }
                }
            }
        }
        (res, coeffs)
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let (res, _) = self.reduce(v);
        res.iter().all(|x| self.field.is_zero(x))
    }

    /// Inserts a vector; returns its pivot if it enlarged the span. Dependent
    /// vectors are discarded and do not become generators.
    pub fn insert(&mut self, v: &[F::Elem]) -> Option<usize> {
        let f = self.field.clone();
        let (mut res, coeffs) = self.reduce(v);
        let pivot = res.iter().position(|x| !f.is_zero(x))?;
        let g = self.generators;
        self.generators += 1;
        if self.track {
            for row in self.rows.iter_mut() {
                row.tag.resize(self.generators, f.zero());
            }
        }
        let mut tag = Vec::new();
        if self.track {
            tag = coeffs.iter().map(|c| f.neg(c)).collect();
            self.pad(&mut tag);
            tag[g] = f.one();
        }
        let inv = f.inv(&res[pivot]);
        for x in res.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for t in tag.iter_mut() {
            *t = f.mul(t, &inv);
        }
        for row in self.rows.iter_mut() {
            let c = row.vector[pivot].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (i, x) in res.iter().enumerate() {
                if !f.is_zero(x) {
                    row.vector[i] = f.sub(&row.vector[i], &f.mul(&c, x));
                }
            }
            for (i, t) in tag.iter().enumerate() {
                if !f.is_zero(t) {
                    row.tag[i] = f.sub(&row.tag[i], &f.mul(&c, t));
                }
            }
        }
        self.rows.push(EchelonRow { pivot, vector: res, tag });
        Some(pivot)
    }
}

/// Inverse of a square dense matrix, `None` when singular.
pub fn invert<F: Field>(field: &F, m: &[Vec<F::Elem>]) -> Option<Vec<Vec<F::Elem>>> {
    let n = m.len();
    let mut a: Vec<Vec<F::Elem>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !field.is_zero(&a[r][col]))?;
        a.swap(col, p);
        let inv = field.inv(&a[col][col]);
        for x in a[col].iter_mut() {
            *x = field.mul(x, &inv);
        }
        for r in 0..n {
            if r != col && !field.is_zero(&a[r][col]) {
                let c = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x = field.sub(x, &field.mul(&c, y));
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{PrimeField, Rationals};

    #[test]
    fn tracked_reduction_reconstructs_vector() {
        let q = Rationals;
        let v = |xs: &[i64]| xs.iter().map(|&x| q.from_i64(x)).collect::<Vec<_>>();
        let gens = [v(&[1, 1, 0]), v(&[2, 2, 0]), v(&[0, 1, 1])];
        let mut e = Echelon::tracked(q, 3);
        assert!(e.insert(&gens[0]).is_some());
        assert!(e.insert(&gens[1]).is_none());
        assert!(e.insert(&gens[2]).is_some());
        let target = v(&[3, 5, 2]);
        let (res, coeffs) = e.reduce(&target);
        assert!(res.iter().all(|x| q.is_zero(x)));
        let mut rebuilt = v(&[0, 0, 0]);
        for (g, c) in [&gens[0], &gens[2]].into_iter().zip(&coeffs) {
            for i in 0..3 {
                q.axpy(&mut rebuilt[i], c, &g[i]);
            }
        }
        assert_eq!(rebuilt, target);
    }

    #[test]
    fn inverse_over_f5() {
        let f = PrimeField::new(5).unwrap();
        let m = vec![vec![1, 2], vec![3, 4]];
        let inv = invert(&f, &m).unwrap();
        let prod: Vec<Vec<u64>> = (0..2)
            .map(|i| (0..2).map(|j| (0..2).fold(0, |acc, k| (acc + m[i][k] * inv[k][j]) % 5)).collect())
            .collect();
        assert_eq!(prod, vec![vec![1, 0], vec![0, 1]]);
        assert!(invert(&f, &[vec![1, 2], vec![2, 4]]).is_none());
    }
}
