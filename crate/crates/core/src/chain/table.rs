use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, Result};
use crate::graded::{Degree, DegreeBox};

fn is_false(b: &bool) -> bool {
    !*b
}

/// Dimensions (and optionally representatives) of graded groups in a box.
///
/// Only nonzero dimensions are stored; every other degree of the box is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxTable {
    #[serde(rename = "box")]
    pub bounds: DegreeBox,
    /// Sub-box in which the dimensions are exact.
    pub reliable_subbox: DegreeBox,
    pub dims: BTreeMap<Degree, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BTreeMap<Degree, Vec<String>>>,
    /// How the table was obtained when more than one route exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub unverified_relations: bool,
}

impl BoxTable {
    pub fn new(bounds: DegreeBox) -> Self {
        BoxTable {
            bounds,
            reliable_subbox: bounds,
            dims: BTreeMap::new(),
            basis: None,
            mode: None,
            notes: Vec::new(),
            unverified_relations: false,
        }
    }

    /// A table from raw counts; degrees outside the box and zeros are dropped.
    pub fn from_dims(bounds: DegreeBox, dims: impl IntoIterator<Item = (Degree, usize)>) -> Self {
        let mut t = BoxTable::new(bounds);
        for (deg, v) in dims {
            t.set(deg, v);
        }
        t
    }

    pub fn dim(&self, deg: Degree) -> usize {
        self.dims.get(&deg.bidegree()).copied().unwrap_or(0)
    }

    pub fn set(&mut self, deg: Degree, v: usize) {
        let deg = deg.bidegree();
        if v == 0 || !self.bounds.contains(deg) {
            self.dims.remove(&deg);
        } else {
            self.dims.insert(deg, v);
        }
    }

    /// Nonzero entries as `(degree, dim)` pairs in `(n, d)` order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Degree, usize)> + '_ {
        self.dims.iter().map(|(k, v)| (*k, *v))
    }

    /// Dimensions along the row of homological degree `d` for `n` in the box.
    pub fn row(&self, d: i64) -> Vec<usize> {
        (self.bounds.n_min..=self.bounds.n_max).map(|n| self.dim(Degree::bi(n, d))).collect()
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// Structural checks used when a table is read back from JSON.
    pub fn check(&self) -> Result<(), Vec<Diagnostic>> {
        let mut diags = Vec::new();
        if let Err(e) = self.bounds.validate() {
            diags.push(Diagnostic::new("/box", e.to_string()));
        }
        for (deg, v) in &self.dims {
            if !self.bounds.contains(*deg) {
                diags.push(Diagnostic::new(format!("/dims/{deg}"), "degree outside the box"));
            }
            if *v == 0 {
                diags.push(Diagnostic::new(format!("/dims/{deg}"), "zero entries are implicit and must be omitted"));
            }
        }
        if let Some(basis) = &self.basis {
            for (deg, reps) in basis {
                if reps.len() != self.dim(*deg) {
                    diags.push(Diagnostic::new(
                        format!("/basis/{deg}"),
                        format!("{} representatives for dimension {}", reps.len(), self.dim(*deg)),
                    ));
                }
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    /// Plain-text grid with `d` decreasing down the page and `n` across.
    pub fn render_grid(&self) -> String {
        let b = &self.bounds;
        let width = self.dims.values().map(|v| v.to_string().len()).max().unwrap_or(1).max(b.n_max.to_string().len()).max(b.n_min.to_string().len()).max(1);
        let dlabel = b.d_min.to_string().len().max(b.d_max.to_string().len()).max(1);
        let mut out = String::new();
        for d in (b.d_min..=b.d_max).rev() {
            out.push_str(&format!("{d:>dlabel$} |"));
            for n in b.n_min..=b.n_max {
                let v = self.dim(Degree::bi(n, d));
                let cell = if v == 0 { ".".to_string() } else { v.to_string() };
                out.push_str(&format!(" {cell:>width$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:>dlabel$} +", ""));
        out.push_str(&"-".repeat((width + 1) * (b.n_max - b.n_min + 1) as usize));
        out.push('\n');
        out.push_str(&format!("{:>dlabel$}  ", ""));
        for n in b.n_min..=b.n_max {
            out.push_str(&format!(" {n:>width$}"));
        }
        out.push('\n');
        out
    }
}

/// Graded convolution of two dimension tables, truncated to a box.
pub fn convolve(a: &BoxTable, b: &BoxTable, bounds: DegreeBox) -> BoxTable {
    let mut out: BTreeMap<Degree, usize> = BTreeMap::new();
    for (da, va) in a.nonzero() {
        for (db, vb) in b.nonzero() {
            let deg = da + db;
            if bounds.contains(deg) {
                *out.entry(deg).or_default() += va * vb;
            }
        }
    }
    BoxTable::from_dims(bounds, out)
}
