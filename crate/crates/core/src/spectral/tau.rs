use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::Field;
use crate::graded::{Degree, DegreeBox};
use crate::spectral::filtered::FilteredComplex;

/// A finitely generated graded `k[tau]`-module: free summands by the
/// filtration of their generator, torsion summands `k[tau]/tau^len` by
/// `(filtration, len)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauModule {
    pub free: BTreeMap<i64, usize>,
    pub torsion: BTreeMap<(i64, i64), usize>,
}

impl TauModule {
    pub fn free_rank(&self) -> usize {
        self.free.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.free.is_empty() && self.torsion.is_empty()
    }

    /// Dimension of the filtration-`f` part.
    pub fn dim_at(&self, f: i64) -> usize {
        let free: usize = self.free.range(..=f).map(|(_, c)| c).sum();
        let tors: usize = self.torsion.iter().filter(|((a, len), _)| *a <= f && f < a + len).map(|(_, c)| c).sum();
        free + tors
    }

    /// Number of `tau^len` torsion summands generated in filtration `a`.
    pub fn torsion_count(&self, a: i64, len: i64) -> usize {
        self.torsion.get(&(a, len)).copied().unwrap_or(0)
    }
}

/// Filtered homotopy `pi_{n,d,*}` as `k[tau]`-modules, per bidegree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauModuleTable {
    #[serde(rename = "box")]
    pub bounds: DegreeBox,
    pub modules: BTreeMap<Degree, TauModule>,
}

impl TauModuleTable {
    pub fn module(&self, deg: Degree) -> TauModule {
        self.modules.get(&deg.bidegree()).cloned().unwrap_or_default()
    }
}

fn tau_module_at<F: Field>(fc: &FilteredComplex<F>, deg: Degree) -> TauModule {
    let local = fc.local(deg);
    let above = local.above();
    let mut module = TauModule::default();
    if local.dim() == 0 {
        return module;
    }
    let fs = local.filt().iter().chain(above.filt()).copied();
    let lo = fs.clone().min().unwrap() - 1;
    let hi = fs.max().unwrap() + 1;
    let cycles: Vec<Vec<Vec<F::Elem>>> = (lo..=hi).map(|a| local.z(a, None)).collect();
    let bounds: Vec<Vec<Vec<F::Elem>>> = (lo..=hi).map(|b| local.boundaries(Some(b))).collect();
    let b_rank: Vec<usize> = bounds.iter().map(|b| local.span_rank(b)).collect();
    let idx = |x: i64| (x - lo) as usize;
    // Rank of pi_a -> pi_b for a <= b.
    let image = |a: i64, b: i64| -> usize {
        let mut all = cycles[idx(a)].clone();
        all.extend(bounds[idx(b)].iter().cloned());
        local.span_rank(&all) - b_rank[idx(b)]
    };
    let mut memo: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut r = |a: i64, b: i64| *memo.entry((a, b)).or_insert_with(|| image(a, b));
    for a in lo + 1..=hi {
        for b in a + 1..=hi {
            let bars = r(a, b - 1) as i64 - r(a - 1, b - 1) as i64 - r(a, b) as i64 + r(a - 1, b) as i64;
            if bars > 0 {
                module.torsion.insert((a, b - a), bars as usize);
            }
        }
        // Classes born at a that survive to the top filtration, where
        // pi_hi is the homology of the whole complex.
        let free = r(a, hi) as i64 - r(a - 1, hi) as i64;
        if free > 0 {
            module.free.insert(a, free as usize);
        }
    }
    module
}

/// `k[tau]`-module structure of filtered homotopy on a box.
///
/// ```
/// use stabkit::chain::ChainComplex;
/// use stabkit::exact::{PrimeField, SparseMatrix};
/// use stabkit::graded::{Degree, DegreeBox};
/// use stabkit::spectral::{tau_modules, FilteredComplex};
/// let f2 = PrimeField::new(2).unwrap();
/// let mut cx = ChainComplex::new(f2.clone(), DegreeBox::new(0, -1, 2));
/// cx.add_spot(Degree::bi(0, 0), vec!["a".into()], vec![0]);
/// cx.add_spot(Degree::bi(0, 1), vec!["b".into()], vec![1]);
/// cx.set_differential(Degree::bi(0, 1), SparseMatrix::identity(f2, 1)).unwrap();
/// let fc = FilteredComplex::new(cx).unwrap();
/// let t = tau_modules(&fc, &DegreeBox::new(0, 0, 0)).unwrap();
/// assert_eq!(t.module(Degree::bi(0, 0)).torsion_count(0, 1), 1);
/// ```
pub fn tau_modules<F: Field>(fc: &FilteredComplex<F>, bounds: &DegreeBox) -> Result<TauModuleTable> {
    bounds.validate()?;
    let degs: Vec<Degree> = bounds.bidegrees().collect();
    let modules = degs
        .par_iter()
        .map(|deg| (*deg, tau_module_at(fc, *deg)))
        .filter(|(_, m)| !m.is_zero())
        .collect();
    Ok(TauModuleTable { bounds: *bounds, modules })
}
