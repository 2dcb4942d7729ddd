use std::collections::{BTreeMap, HashMap};

use crate::chain::poly::{parse_polynomial, render_rational, FreeAlgebra, Poly, RatPoly};
use crate::chain::{BoxTable, ChainComplex};
use crate::error::{Diagnostic, Error, Result};
use crate::exact::{Field, FieldSpec, SparseMatrix};
use crate::graded::{enumerate_monomials, Degree, DegreeBox, GeneratorSpec, Monomial};
use crate::with_field;

/// Default cap on the dimension of a single chain group.
pub const DEFAULT_MAX_SPOT_DIM: usize = 20_000;

/// A finitely presented free graded-commutative dg algebra.
///
/// Generators are kept sorted by name; polynomials index exponents in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct CdgaPresentation {
    pub field: FieldSpec,
    gens: Vec<GeneratorSpec>,
    differential: BTreeMap<String, RatPoly>,
}

impl CdgaPresentation {
    /// Builds a presentation from generators and `name -> polynomial text`.
    ///
    /// ```
    /// use stabkit::chain::CdgaPresentation;
    /// use stabkit::exact::FieldSpec;
    /// use stabkit::graded::{Degree, GeneratorSpec};
    /// let gens = vec![
    ///     GeneratorSpec::natural("s", Degree::bi(1, 0), 0),
    ///     GeneratorSpec::natural("u", Degree::bi(1, 1), 0),
    /// ];
    /// let p = CdgaPresentation::new(FieldSpec::Rational, gens, &[("u", "s")]).unwrap();
    /// assert!(p.validate().is_ok());
    /// ```
    pub fn new(field: FieldSpec, gens: Vec<GeneratorSpec>, differential: &[(&str, &str)]) -> Result<Self> {
        let mut p = CdgaPresentation::formal(field, gens)?;
        for (name, text) in differential {
            let poly = parse_polynomial(text, &p.gens)?;
            p.set_differential(name, poly)?;
        }
        Ok(p)
    }

    /// The presentation with zero differential.
    pub fn formal(field: FieldSpec, mut gens: Vec<GeneratorSpec>) -> Result<Self> {
        field.validated()?;
        gens.sort_by(|a, b| a.name.as_bytes().cmp(b.name.as_bytes()));
        if let Some(w) = gens.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(Error::usage(format!("duplicate generator `{}`", w[0].name)));
        }
        Ok(CdgaPresentation { field, gens, differential: BTreeMap::new() })
    }

    pub fn set_differential(&mut self, name: &str, poly: RatPoly) -> Result<()> {
        if !self.gens.iter().any(|g| g.name == name) {
            return Err(Error::usage(format!("differential of unknown generator `{name}`")));
        }
        if poly.is_empty() {
            self.differential.remove(name);
        } else {
            self.differential.insert(name.to_string(), poly);
        }
        Ok(())
    }

    pub fn gens(&self) -> &[GeneratorSpec] {
        &self.gens
    }

    pub fn differential_of(&self, name: &str) -> Option<&RatPoly> {
        self.differential.get(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn parse(&self, text: &str) -> Result<RatPoly> {
        parse_polynomial(text, &self.gens)
    }

    pub fn render(&self, poly: &RatPoly) -> String {
        render_rational(poly, &self.gens)
    }

    pub fn is_formal(&self) -> bool {
        self.differential.is_empty()
    }

    pub fn algebra(&self) -> FreeAlgebra {
        FreeAlgebra::new(self.gens.clone())
    }

    /// Differential on generators over a concrete field.
    pub fn generator_differentials<F: Field>(&self, field: &F) -> Result<Vec<Poly<F>>> {
        self.gens
            .iter()
            .map(|g| match self.differential.get(&g.name) {
                Some(p) => Poly::from_rational(field, p),
                None => Ok(Poly::zero()),
            })
            .collect()
    }

    /// Degree of a homogeneous polynomial, `None` when empty or inhomogeneous.
    pub fn homogeneous_degree(&self, poly: &RatPoly) -> Option<Degree> {
        let mut degs = poly.keys().map(|m| m.degree(&self.gens).bidegree());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Checks parity, homogeneity, filtration and `d^2 = 0` on generators.
    pub fn validate(&self) -> std::result::Result<(), Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let ch = self.field.characteristic();
        for (i, g) in self.gens.iter().enumerate() {
            if ch != 2 && !g.is_exterior() && g.sign_odd() {
                diags.push(Diagnostic::new(
                    format!("/gens/{i}"),
                    format!("generator `{}` at {} has odd d but is declared polynomial", g.name, g.degree),
                ));
            }
        }
        for (name, poly) in &self.differential {
            let g = &self.gens[self.index_of(name).expect("checked on insertion")];
            let expected = g.degree.bidegree() + Degree::bi(0, -1);
            for m in poly.keys() {
                let deg = m.degree(&self.gens);
                if deg.bidegree() != expected {
                    diags.push(Diagnostic::new(
                        format!("/differential/{name}"),
                        format!(
                            "degree error: term {} of d({name}) has degree {}, expected {expected}",
                            m.render(&self.gens),
                            deg.bidegree()
                        ),
                    ));
                }
                if let (Some(fg), Some(fm)) = (g.degree.f, deg.f) {
                    if fm > fg {
                        diags.push(Diagnostic::new(
                            format!("/differential/{name}"),
                            format!("term {} raises filtration from {fg} to {fm}", m.render(&self.gens)),
                        ));
                    }
                }
                for (e, gen) in m.exps.iter().zip(&self.gens) {
                    if gen.is_exterior() && *e > 1 {
                        diags.push(Diagnostic::new(
                            format!("/differential/{name}"),
                            format!("exterior generator `{}` appears squared", gen.name),
                        ));
                    }
                }
            }
        }
        if diags.is_empty() {
            let square = with_field!(self.field, |f| self.square_zero_failures(&f));
            match square {
                Ok(bad) => diags.extend(bad),
                Err(e) => diags.push(Diagnostic::new("/differential", e.to_string())),
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    fn square_zero_failures<F: Field>(&self, field: &F) -> Result<Vec<Diagnostic>> {
        let alg = self.algebra();
        let dgen = self.generator_differentials(field)?;
        let mut out = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let mut dd = Poly::<F>::zero();
            for (m, c) in &dgen[i].terms {
                dd.add_scaled(field, c, &alg.differential(field, &dgen, m));
            }
            if !dd.is_zero() {
                out.push(Diagnostic::new(
                    format!("/differential/{}", g.name),
                    format!("d^2({}) = {} is nonzero", g.name, dd.render(field, &self.gens)),
                ));
            }
        }
        Ok(out)
    }

    /// Assembles the chain complex on monomials with grading in the box and
    /// homological degree one step beyond it on each side.
    pub fn chain_complex<F: Field>(&self, field: &F, bounds: &DegreeBox, max_spot_dim: usize) -> Result<ChainComplex<F>> {
        if field.spec() != self.field {
            return Err(Error::FieldMismatch { left: field.spec(), right: self.field });
        }
        let known = bounds.with_d(bounds.d_min - 1, bounds.d_max + 1);
        let monos = enumerate_monomials(&self.gens, &known)?;
        for n in known.n_min..=known.n_max {
            if let Some((deg, list)) = monos.iter().find(|(k, v)| k.n == n && v.len() > max_spot_dim) {
                let mut completed = *bounds;
                completed.n_max = n - 1;
                return Err(Error::Resource {
                    message: format!("chain group at {deg} has dimension {} above the cap {max_spot_dim}", list.len()),
                    completed: (n > bounds.n_min).then_some(completed),
                });
            }
        }
        let alg = self.algebra();
        let dgen = self.generator_differentials(field)?;
        let mut cx = ChainComplex::new(field.clone(), known);
        for (deg, list) in &monos {
            let labels = list.iter().map(|m| m.render(&self.gens)).collect();
            let filt = list.iter().map(|m| m.degree(&self.gens).filtration()).collect();
            cx.add_spot(*deg, labels, filt);
        }
        if self.is_formal() {
            return Ok(cx);
        }
        let index: HashMap<&Monomial, usize> =
            monos.values().flat_map(|list| list.iter().enumerate().map(|(i, m)| (m, i))).collect();
        for (deg, list) in &monos {
            let target = *deg + Degree::bi(0, -1);
            let rows = monos.get(&target).map_or(0, Vec::len);
            if rows == 0 {
                continue;
            }
            let mut trip = Vec::new();
            for (j, m) in list.iter().enumerate() {
                for (t, c) in alg.differential(field, &dgen, m).terms {
                    let i = *index.get(&t).ok_or_else(|| {
                        Error::usage(format!("d({}) leaves the presented degree range", m.render(&self.gens)))
                    })?;
                    trip.push((i, j, c));
                }
            }
            cx.set_differential(*deg, SparseMatrix::from_accumulated(field.clone(), rows, list.len(), trip))?;
        }
        Ok(cx)
    }

    /// Monomial coordinates of a polynomial at its bidegree.
    pub fn vector_of<F: Field>(&self, field: &F, poly: &RatPoly, bounds: &DegreeBox) -> Result<(Degree, Vec<F::Elem>)> {
        let deg = self
            .homogeneous_degree(poly)
            .ok_or_else(|| Error::usage(format!("`{}` is not a nonzero homogeneous polynomial", self.render(poly))))?;
        let monos = enumerate_monomials(&self.gens, &bounds.with_d(deg.d, deg.d).with_n_min(deg.n.min(0)))?;
        let list = monos.get(&deg).ok_or_else(|| Error::usage(format!("degree {deg} lies outside the box")))?;
        let p = Poly::from_rational(field, poly)?;
        let mut v = vec![field.zero(); list.len()];
        for (m, c) in p.terms {
            let i = list.iter().position(|x| *x == m).expect("monomial of the right degree");
            v[i] = c;
        }
        Ok((deg, v))
    }
}

/// Homology dimensions of a presented cdga in a box.
///
/// ```
/// use stabkit::chain::{cdga_homology_box, CdgaPresentation};
/// use stabkit::exact::FieldSpec;
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// let gens = vec![
///     GeneratorSpec::natural("s", Degree::bi(1, 0), 0),
///     GeneratorSpec::natural("u", Degree::bi(1, 1), 0),
/// ];
/// let p = CdgaPresentation::new(FieldSpec::Rational, gens, &[("u", "s")]).unwrap();
/// let t = cdga_homology_box(&p, &DegreeBox::up_to(4), false).unwrap();
/// assert_eq!(t.total(), 1);
/// ```
pub fn cdga_homology_box(p: &CdgaPresentation, bounds: &DegreeBox, with_basis: bool) -> Result<BoxTable> {
    cdga_homology_box_capped(p, bounds, with_basis, DEFAULT_MAX_SPOT_DIM)
}

pub fn cdga_homology_box_capped(
    p: &CdgaPresentation,
    bounds: &DegreeBox,
    with_basis: bool,
    max_spot_dim: usize,
) -> Result<BoxTable> {
    p.validate().map_err(Error::Validation)?;
    with_field!(p.field, |f| {
        let cx = p.chain_complex(&f, bounds, max_spot_dim)?;
        cx.homology_table(*bounds, with_basis)
    })
}
