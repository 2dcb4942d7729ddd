use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::chain::BoxTable;
use crate::error::{Error, Result};
use crate::exact::{rank, Field, SparseMatrix, Subquotient};
use crate::graded::{Degree, DegreeBox};

/// One bidegree of a chain complex: a labelled basis, optional filtration
/// values, and the differential to `(n, d - 1)`.
#[derive(Clone, Debug)]
pub struct Spot<F: Field> {
    pub labels: Vec<String>,
    pub filtration: Vec<i64>,
    pub differential: Option<SparseMatrix<F>>,
}

/// A bigraded chain complex with differential of degree `(0, -1)`, known
/// exactly on a window of bidegrees.
#[derive(Clone, Debug)]
pub struct ChainComplex<F: Field> {
    field: F,
    known: DegreeBox,
    spots: BTreeMap<Degree, Spot<F>>,
}

impl<F: Field> ChainComplex<F> {
    /// An empty complex whose chain groups are exactly known inside `known`.
    pub fn new(field: F, known: DegreeBox) -> Self {
        ChainComplex { field, known, spots: BTreeMap::new() }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn known(&self) -> DegreeBox {
        self.known
    }

    pub fn add_spot(&mut self, deg: Degree, labels: Vec<String>, filtration: Vec<i64>) {
        assert_eq!(labels.len(), filtration.len(), "one filtration value per basis element");
        if labels.is_empty() {
            return;
        }
        self.spots.insert(deg.bidegree(), Spot { labels, filtration, differential: None });
    }

    /// Sets the differential out of `deg` into `deg - (0,1)`.
    pub fn set_differential(&mut self, deg: Degree, m: SparseMatrix<F>) -> Result<()> {
        let deg = deg.bidegree();
        let target = self.dim(deg + Degree::bi(0, -1));
        let Some(spot) = self.spots.get_mut(&deg) else {
            if m.is_zero() {
                return Ok(());
            }
            return Err(Error::Shape(format!("differential out of empty spot {deg}")));
        };
        if m.cols() != spot.labels.len() || m.rows() != target {
            return Err(Error::Shape(format!(
                "differential at {deg} is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                target,
                spot.labels.len()
            )));
        }
        spot.differential = Some(m);
        Ok(())
    }

    pub fn degrees(&self) -> impl Iterator<Item = Degree> + '_ {
        self.spots.keys().copied()
    }

    pub fn spot(&self, deg: Degree) -> Option<&Spot<F>> {
        self.spots.get(&deg.bidegree())
    }

    pub fn dim(&self, deg: Degree) -> usize {
        self.spot(deg).map_or(0, |s| s.labels.len())
    }

    pub fn labels(&self, deg: Degree) -> &[String] {
        self.spot(deg).map_or(&[], |s| &s.labels)
    }

    pub fn filtration(&self, deg: Degree) -> &[i64] {
        self.spot(deg).map_or(&[], |s| &s.filtration)
    }

    /// Differential out of `deg`; the zero map when none was set.
    pub fn differential(&self, deg: Degree) -> SparseMatrix<F> {
        let deg = deg.bidegree();
        match self.spot(deg).and_then(|s| s.differential.clone()) {
            Some(m) => m,
            None => SparseMatrix::zero(self.field.clone(), self.dim(deg + Degree::bi(0, -1)), self.dim(deg)),
        }
    }

    /// Verifies `d o d = 0` everywhere it is defined.
    pub fn check_square_zero(&self) -> Result<()> {
        for deg in self.degrees() {
            let below = deg + Degree::bi(0, -1);
            if self.dim(below) == 0 {
                continue;
            }
            let dd = self.differential(below).mul(&self.differential(deg))?;
            if !dd.is_zero() {
                return Err(Error::NotAComplex(format!("d o d is nonzero on {deg}")));
            }
        }
        Ok(())
    }

    /// Homology at one bidegree with representatives.
    pub fn homology_at(&self, deg: Degree) -> Result<Subquotient<F>> {
        let deg = deg.bidegree();
        Subquotient::from_complex(&self.differential(deg), &self.differential(deg + Degree::bi(0, 1)))
    }

    /// Boxes in which homology is exact: `d` must stay one step inside the
    /// known window on both sides unless the window edge is a true edge.
    pub fn reliable(&self, bounds: &DegreeBox) -> DegreeBox {
        let mut r = bounds.meet(&self.known);
        r.d_min = r.d_min.max(self.known.d_min + 1);
        r.d_max = r.d_max.min(self.known.d_max - 1);
        r
    }

    /// Homology dimensions in a box, optionally with rendered representatives.
    pub fn homology_table(&self, bounds: DegreeBox, with_basis: bool) -> Result<BoxTable> {
        bounds.validate()?;
        let degs: Vec<Degree> = bounds.bidegrees().collect();
        let mut rank_degs: Vec<Degree> = degs.clone();
        rank_degs.extend(degs.iter().map(|d| *d + Degree::bi(0, 1)));
        rank_degs.sort();
        rank_degs.dedup();
        let ranks: BTreeMap<Degree, usize> = rank_degs
            .par_iter()
            .map(|deg| (*deg, if self.dim(*deg) == 0 { 0 } else { rank(&self.differential(*deg)) }))
            .collect();
        let mut table = BoxTable::new(bounds);
        table.reliable_subbox = self.reliable(&bounds);
        for deg in &degs {
            let h = self.dim(*deg) - ranks[deg] - ranks[&(*deg + Degree::bi(0, 1))];
            table.set(*deg, h);
        }
        if with_basis {
            let reps: Vec<(Degree, Vec<String>)> = table
                .dims
                .keys()
                .copied()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|deg| {
                    let h = self.homology_at(*deg)?;
                    let labels = self.labels(*deg);
                    let rendered = h.representatives().iter().map(|v| render_vector(&self.field, v, labels)).collect();
                    Ok((*deg, rendered))
                })
                .collect::<Result<_>>()?;
            table.basis = Some(reps.into_iter().collect());
        }
        Ok(table)
    }
}

/// Renders a coordinate vector as a linear combination of labels.
pub fn render_vector<F: Field>(field: &F, v: &[F::Elem], labels: &[String]) -> String {
    let terms: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| !field.is_zero(c))
        .map(|(c, l)| if *c == field.one() { l.clone() } else { format!("{}*{}", field.render(c), l) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
