use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::render_vector;
use crate::error::{Error, Result};
use crate::exact::{Field, SparseMatrix, Subquotient};
use crate::graded::{Degree, DegreeBox};
use crate::spectral::filtered::{FilteredComplex, Local};

/// `E^r_f` at one bidegree, with the denominator split into its two parts:
/// the first `lower` generators span `Z^(r-1)_(f-1)`, the rest are
/// boundaries `d y` of the recorded `preimages`.
pub(crate) struct PageGroup<F: Field> {
    pub group: Subquotient<F>,
    pub lower: usize,
    pub preimages: Vec<Vec<F::Elem>>,
}

pub(crate) fn page_group<F: Field>(local: &Local<'_, F>, f: i64, r: usize) -> Result<PageGroup<F>> {
    let r = r as i64;
    let field = local.above().d_out().field().clone();
    let num = local.z(f, Some(r));
    let mut den = local.z(f - 1, Some(r - 1));
    let lower = den.len();
    let above = local.above();
    let preimages = above.z(f + r - 1, Some(r - 1));
    den.extend(preimages.iter().map(|y| above.apply(y)));
    let group = Subquotient::new(field, local.dim(), &num, &den)?;
    Ok(PageGroup { group, lower, preimages })
}

/// One page of the spectral sequence on a box.
#[derive(Clone, Debug)]
pub struct Page<F: Field> {
    pub r: usize,
    /// Nonzero groups keyed by `(n, d, f)`.
    pub groups: BTreeMap<Degree, Subquotient<F>>,
    /// `d^r` out of `(n, d, f)` into `(n, d - 1, f - r)`, where both are nonzero.
    pub differentials: BTreeMap<Degree, SparseMatrix<F>>,
    /// Rendered chain-level images `d(rep)` of each source representative.
    pub images: BTreeMap<Degree, Vec<(String, String)>>,
    /// Whether the filtration span forces every later differential to vanish.
    pub is_infinity: bool,
}

impl<F: Field> Page<F> {
    pub fn dim(&self, deg: Degree) -> usize {
        self.groups.get(&deg).map_or(0, Subquotient::dim)
    }

    pub fn total(&self) -> usize {
        self.groups.values().map(Subquotient::dim).sum()
    }

    pub fn summary(&self) -> PageSummary {
        PageSummary {
            page: self.r,
            infinity: self.is_infinity,
            groups: self
                .groups
                .iter()
                .map(|(k, g)| GroupDim { n: k.n, d: k.d, f: k.filtration(), dim: g.dim() })
                .collect(),
            differentials: self
                .differentials
                .iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|(k, m)| DifferentialSummary {
                        source: *k,
                        target: Degree::tri(k.n, k.d - 1, k.filtration() - self.r as i64),
                        rank: crate::exact::rank(m),
                        matrix: m.render(),
                    images: self.images.get(k).cloned().unwrap_or_default(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDim {
    pub n: i64,
    pub d: i64,
    pub f: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialSummary {
    pub source: Degree,
    pub target: Degree,
    pub rank: usize,
    pub matrix: Vec<Vec<String>>,
    /// `(representative, d(representative))` at chain level.
    pub images: Vec<(String, String)>,
}

/// JSON view of a page.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSummary {
    pub page: usize,
    pub infinity: bool,
    pub groups: Vec<GroupDim>,
    pub differentials: Vec<DifferentialSummary>,
}

fn spot_filtrations<F: Field>(fc: &FilteredComplex<F>, deg: Degree) -> Vec<i64> {
    let mut fs: Vec<i64> = fc.complex().filtration(deg).to_vec();
    fs.sort_unstable();
    fs.dedup();
    fs
}

/// Page `E^r` restricted to the bidegrees of a box.
pub fn compute_page<F: Field>(fc: &FilteredComplex<F>, bounds: &DegreeBox, r: usize) -> Result<Page<F>> {
    if r == 0 {
        return Err(Error::usage("pages start at r = 1"));
    }
    let field = fc.field().clone();
    let degs: Vec<Degree> = bounds.bidegrees().collect();
    let per_spot: Vec<(Vec<(Degree, Subquotient<F>)>, Vec<(Degree, SparseMatrix<F>, Vec<(String, String)>)>)> = degs
        .par_iter()
        .map(|deg| {
            let local = fc.local(*deg);
            let below = local.below();
            let labels = fc.complex().labels(*deg);
            let below_labels = fc.complex().labels(below.deg);
            let mut groups = Vec::new();
            let mut diffs = Vec::new();
            for f in spot_filtrations(fc, *deg) {
                if bounds.f_min.is_some_and(|lo| f < lo) || bounds.f_max.is_some_and(|hi| f > hi) {
                    continue;
                }
                let src = page_group(&local, f, r)?;
                if src.group.dim() == 0 {
                    continue;
                }
                let tf = f - r as i64;
                if below.dim() > 0 && below.filt().contains(&tf) {
                    let tgt = page_group(&below, tf, r)?;
                    if tgt.group.dim() > 0 {
                        let mut cols = Vec::new();
                        let mut images = Vec::new();
                        for rep in src.group.representatives() {
                            let image = local.apply(rep);
                            let coords = tgt.group.coordinates(&image).ok_or_else(|| {
                                Error::NotAComplex(format!("image of a page-{r} class at {deg} leaves the target cycles"))
                            })?;
                            images.push((render_vector(&field, rep, labels), render_vector(&field, &image, below_labels)));
                            cols.push(coords);
                        }
                        let m = SparseMatrix::from_columns(field.clone(), tgt.group.dim(), &cols);
                        diffs.push((deg.with_f(f), m, images));
                    }
                }
                groups.push((deg.with_f(f), src.group));
            }
            Ok((groups, diffs))
        })
        .collect::<Result<_>>()?;
    let mut page = Page {
        r,
        groups: BTreeMap::new(),
        differentials: BTreeMap::new(),
        images: BTreeMap::new(),
        is_infinity: r > fc.span(),
    };
    for (groups, diffs) in per_spot {
        page.groups.extend(groups);
        for (k, m, im) in diffs {
            page.differentials.insert(k, m);
            page.images.insert(k, im);
        }
    }
    Ok(page)
}

/// Pages `E^1 .. E^r_max` on a box.
///
/// ```
/// use stabkit::chain::CdgaPresentation;
/// use stabkit::exact::{FieldSpec, PrimeField};
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// use stabkit::spectral::{compute_pages, FilteredComplex};
/// let gens = vec![
///     GeneratorSpec::natural("s", Degree::tri(1, 0, -1), 2),
///     GeneratorSpec::natural("u", Degree::tri(1, 1, 0), 2),
/// ];
/// let p = CdgaPresentation::new(FieldSpec::Prime { p: 2 }, gens, &[("u", "s")]).unwrap();
/// let f2 = PrimeField::new(2).unwrap();
/// let b = DegreeBox::up_to(3);
/// let fc = FilteredComplex::from_cdga(&p, &f2, &b, 1000).unwrap();
/// let pages = compute_pages(&fc, &b, 2).unwrap();
/// assert_eq!(pages[0].dim(Degree::tri(1, 0, -1)), 1);
/// assert_eq!(pages[1].dim(Degree::tri(1, 0, -1)), 0);
/// ```
pub fn compute_pages<F: Field>(fc: &FilteredComplex<F>, bounds: &DegreeBox, r_max: usize) -> Result<Vec<Page<F>>> {
    (1..=r_max).map(|r| compute_page(fc, bounds, r)).collect()
}

/// `E^infinity` on a box.
pub fn infinity_page<F: Field>(fc: &FilteredComplex<F>, bounds: &DegreeBox) -> Result<Page<F>> {
    compute_page(fc, bounds, fc.span() + 1)
}
