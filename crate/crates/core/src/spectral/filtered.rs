use crate::chain::{cobar_complex, CdgaPresentation, ChainComplex, HopfPresentation};
use crate::error::{Diagnostic, Error, Result};
use crate::exact::{kernel_basis, Echelon, Field, SparseMatrix};
use crate::graded::{Degree, DegreeBox};

/// A chain complex with a filtration-adapted basis: `fil_f` is spanned by the
/// basis vectors of filtration at most `f`, and `d` never raises filtration.
#[derive(Clone, Debug)]
pub struct FilteredComplex<F: Field> {
    complex: ChainComplex<F>,
}

impl<F: Field> FilteredComplex<F> {
    pub fn new(complex: ChainComplex<F>) -> Result<Self> {
        let mut diags = Vec::new();
        for deg in complex.degrees() {
            let src = complex.filtration(deg);
            let tgt = complex.filtration(deg + Degree::bi(0, -1));
            for (i, j, _) in complex.differential(deg).triplets() {
                if tgt[i] > src[j] {
                    diags.push(Diagnostic::new(
                        format!("/differential/{deg}"),
                        format!("d sends a basis vector of filtration {} into filtration {}", src[j], tgt[i]),
                    ));
                }
            }
        }
        if diags.is_empty() {
            Ok(FilteredComplex { complex })
        } else {
            Err(Error::Validation(diags))
        }
    }

    /// The word-length or user filtration carried by generator degrees.
    pub fn from_cdga(p: &CdgaPresentation, field: &F, bounds: &DegreeBox, max_spot_dim: usize) -> Result<Self> {
        p.validate().map_err(Error::Validation)?;
        FilteredComplex::new(p.chain_complex(field, bounds, max_spot_dim)?)
    }

    pub fn complex(&self) -> &ChainComplex<F> {
        &self.complex
    }

    pub fn field(&self) -> &F {
        self.complex.field()
    }

    /// Smallest and largest filtration of any basis vector.
    pub fn filtration_range(&self) -> Option<(i64, i64)> {
        let mut it = self.complex.degrees().flat_map(|d| self.complex.filtration(d).iter().copied());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), f| (lo.min(f), hi.max(f))))
    }

    /// Pages beyond this index agree with `E^infinity`.
    pub fn span(&self) -> usize {
        self.filtration_range().map_or(0, |(lo, hi)| (hi - lo) as usize)
    }

    pub(crate) fn local(&self, deg: Degree) -> Local<'_, F> {
        Local { fc: self, deg: deg.bidegree() }
    }
}

/// Filtered pieces at one bidegree.
pub(crate) struct Local<'a, F: Field> {
    fc: &'a FilteredComplex<F>,
    pub deg: Degree,
}

impl<'a, F: Field> Local<'a, F> {
    fn cx(&self) -> &ChainComplex<F> {
        &self.fc.complex
    }

    pub fn dim(&self) -> usize {
        self.cx().dim(self.deg)
    }

    pub fn filt(&self) -> &[i64] {
        self.cx().filtration(self.deg)
    }

    pub fn d_out(&self) -> SparseMatrix<F> {
        self.cx().differential(self.deg)
    }

    pub fn above(&self) -> Local<'a, F> {
        Local { fc: self.fc, deg: self.deg + Degree::bi(0, 1) }
    }

    pub fn below(&self) -> Local<'a, F> {
        Local { fc: self.fc, deg: self.deg + Degree::bi(0, -1) }
    }

    /// `{x in fil_f : dx in fil_(f-r)}`; `r = None` asks for `dx = 0`.
    pub fn z(&self, f: i64, r: Option<i64>) -> Vec<Vec<F::Elem>> {
        let field = self.fc.field();
        let cols: Vec<usize> = (0..self.dim()).filter(|&j| self.filt()[j] <= f).collect();
        if cols.is_empty() {
            return Vec::new();
        }
        let below = self.below();
        let rows: Vec<usize> = (0..below.dim()).filter(|&i| r.map_or(true, |r| below.filt()[i] > f - r)).collect();
        let sub = self.d_out().select(&rows, &cols);
        kernel_basis(&sub)
            .columns()
            .into_iter()
            .map(|k| {
                let mut v = vec![field.zero(); self.dim()];
                for (c, j) in k.into_iter().zip(&cols) {
                    v[*j] = c;
                }
                v
            })
            .collect()
    }

    /// Boundaries of elements of filtration at most `b`.
    pub fn boundaries(&self, b: Option<i64>) -> Vec<Vec<F::Elem>> {
        let above = self.above();
        let d = above.d_out();
        (0..above.dim())
            .filter(|&j| b.map_or(true, |b| above.filt()[j] <= b))
            .map(|j| d.column(j))
            .filter(|v| v.iter().any(|x| !self.fc.field().is_zero(x)))
            .collect()
    }

    pub fn apply(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        self.d_out().mul_vec(v)
    }

    pub fn in_fil(&self, v: &[F::Elem], f: i64) -> bool {
        let field = self.fc.field();
        v.iter().zip(self.filt()).all(|(c, g)| field.is_zero(c) || *g <= f)
    }

    pub fn span_rank(&self, vs: &[Vec<F::Elem>]) -> usize {
        let mut e = Echelon::new(self.fc.field().clone(), self.dim());
        for v in vs {
            e.insert(v);
        }
        e.rank()
    }
}

/// The normalized cobar complex filtered by powers of the augmentation ideal.
///
/// ```
/// use stabkit::chain::{HopfPresentation, MonogenicFactor};
/// use stabkit::exact::{FieldSpec, PrimeField};
/// use stabkit::graded::DegreeBox;
/// use stabkit::spectral::aug_filtered_cobar;
/// let h = HopfPresentation::monogenic(FieldSpec::Prime { p: 2 }, vec![MonogenicFactor::truncated("x", 1, 2)]);
/// let fc = aug_filtered_cobar(&h, &PrimeField::new(2).unwrap(), &DegreeBox::up_to(4)).unwrap();
/// assert_eq!(fc.filtration_range(), Some((-4, 0)));
/// ```
pub fn aug_filtered_cobar<F: Field>(hopf: &HopfPresentation, field: &F, bounds: &DegreeBox) -> Result<FilteredComplex<F>> {
    let data = hopf.compile(field, bounds.n_max)?;
    FilteredComplex::new(cobar_complex(&data, bounds)?)
}
