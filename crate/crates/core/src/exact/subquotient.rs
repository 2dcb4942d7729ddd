use crate::error::{Error, Result};
use crate::exact::{elim, Echelon, Field, SparseMatrix};

/// A subquotient `Z / B` of `F^ambient_dim` with chosen representatives.
#[derive(Clone, Debug)]
pub struct Subquotient<F: Field> {
    field: F,
    ambient_dim: usize,
    cycles: Vec<Vec<F::Elem>>,
    boundaries: Vec<Vec<F::Elem>>,
    /// Original indices of the denominator generators kept in `boundaries`.
    boundary_sources: Vec<usize>,
    quotient: Vec<Vec<F::Elem>>,
    /// Tracked echelon over `boundaries` followed by `quotient`.
    reducer: Echelon<F>,
}

impl<F: Field> Subquotient<F> {
    /// Builds `span(numerator) / span(denominator)`; the denominator must lie
    /// in the numerator.
    pub fn new(
        field: F,
        ambient_dim: usize,
        numerator: &[Vec<F::Elem>],
        denominator: &[Vec<F::Elem>],
    ) -> Result<Self> {
        let mut num = Echelon::new(field.clone(), ambient_dim);
        let mut cycles = Vec::new();
        for v in numerator {
            if num.insert(v).is_some() {
                cycles.push(v.clone());
            }
        }
        let mut reducer = Echelon::tracked(field.clone(), ambient_dim);
        let mut boundaries = Vec::new();
        let mut boundary_sources = Vec::new();
        for (i, v) in denominator.iter().enumerate() {
            if !num.contains(v) {
                return Err(Error::NotAComplex(format!("denominator vector {i} is not in the numerator")));
            }
            if reducer.insert(v).is_some() {
                boundaries.push(v.clone());
                boundary_sources.push(i);
            }
        }
        let mut quotient = Vec::new();
        for v in &cycles {
            if reducer.insert(v).is_some() {
                quotient.push(v.clone());
            }
        }
        Ok(Subquotient { field, ambient_dim, cycles, boundaries, boundary_sources, quotient, reducer })
    }

    /// Homology at the middle spot of `C'' --d_in--> C --d_out--> C'`.
    pub fn from_complex(d_out: &SparseMatrix<F>, d_in: &SparseMatrix<F>) -> Result<Self> {
        if d_out.field() != d_in.field() {
            return Err(Error::FieldMismatch { left: d_out.field().spec(), right: d_in.field().spec() });
        }
        if d_out.cols() != d_in.rows() {
            return Err(Error::Shape(format!(
                "outgoing map has {} columns but incoming map has {} rows",
                d_out.cols(),
                d_in.rows()
            )));
        }
        if !d_out.mul(d_in)?.is_zero() {
            return Err(Error::NotAComplex("composite of consecutive maps is nonzero".into()));
        }
        let z = elim::kernel_basis(d_out).columns();
        let b = d_in.columns();
        Subquotient::new(d_out.field().clone(), d_out.cols(), &z, &b)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.quotient.len()
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn as_columns(&self, vs: &[Vec<F::Elem>]) -> SparseMatrix<F> {
        SparseMatrix::from_columns(self.field.clone(), self.ambient_dim, vs)
    }

    pub fn cycle_basis(&self) -> SparseMatrix<F> {
        self.as_columns(&self.cycles)
    }
    pub fn boundary_basis(&self) -> SparseMatrix<F> {
        self.as_columns(&self.boundaries)
    }
    pub fn quotient_basis(&self) -> SparseMatrix<F> {
        self.as_columns(&self.quotient)
    }
    pub fn representatives(&self) -> &[Vec<F::Elem>] {
        &self.quotient
    }

    /// Class of a numerator vector in quotient coordinates; `None` if the
    /// vector is not in the numerator.
    pub fn coordinates(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        self.decompose(v).map(|(c, _)| c)
    }

    /// Splits a numerator vector into quotient coordinates and coefficients on
    /// the denominator generators (indexed as passed to [`Subquotient::new`]).
    pub fn decompose(&self, v: &[F::Elem]) -> Option<(Vec<F::Elem>, Vec<(usize, F::Elem)>)> {
        let (res, coeffs) = self.reducer.reduce(v);
        if res.iter().any(|x| !self.field.is_zero(x)) {
            return None;
        }
        let nb = self.boundaries.len();
        let mut coords = coeffs[nb..].to_vec();
        coords.resize(self.quotient.len(), self.field.zero());
        let den = coeffs[..nb]
            .iter()
            .zip(&self.boundary_sources)
            .filter(|(c, _)| !self.field.is_zero(c))
            .map(|(c, &i)| (i, c.clone()))
            .collect();
        Some((coords, den))
    }

    /// Matrix `dim x ambient_dim` sending a numerator vector to its class and
    /// a chosen complement of the numerator to zero.
    pub fn coordinate_map(&self) -> SparseMatrix<F> {
        let f = &self.field;
        let mut full = self.reducer.clone();
        let base = full.generators();
        let mut complement = Vec::new();
        for j in 0..self.ambient_dim {
            let mut e = vec![f.zero(); self.ambient_dim];
            e[j] = f.one();
            if full.insert(&e).is_some() {
                complement.push(j);
            }
        }
        let nb = self.boundaries.len();
        let mut trip = Vec::new();
        for j in 0..self.ambient_dim {
            let mut e = vec![f.zero(); self.ambient_dim];
            e[j] = f.one();
            let (_, coeffs) = full.reduce(&e);
            for (q, c) in coeffs[nb..base].iter().enumerate() {
                if !f.is_zero(c) {
                    trip.push((q, j, c.clone()));
                }
            }
        }
        SparseMatrix::from_triplets(f.clone(), self.dim(), self.ambient_dim, trip).expect("valid coordinate map")
    }
}
