use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::chain::{parse_polynomial, BoxTable, Poly};
use crate::error::{Diagnostic, Error, Result};
use crate::exact::{Field, FieldSpec, SparseMatrix, Subquotient};
use crate::graded::{enumerate_monomials, Degree, DegreeBox, GeneratorSpec, Monomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleGenerator {
    pub name: String,
    pub degree: Degree,
}

/// A finitely presented bigraded module over a polynomial ring.
///
/// Each relation maps module generator names to polynomial coefficients and
/// must be homogeneous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyModulePresentation {
    pub field: FieldSpec,
    pub variables: Vec<GeneratorSpec>,
    pub generators: Vec<ModuleGenerator>,
    #[serde(default)]
    pub relations: Vec<BTreeMap<String, String>>,
}

impl PolyModulePresentation {
    /// The cyclic module `k[vars]/(relations)` on one generator at the origin.
    ///
    /// ```
    /// use stabkit::exact::FieldSpec;
    /// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
    /// use stabkit::stability::PolyModulePresentation;
    /// let vars = vec![
    ///     GeneratorSpec::natural("r", Degree::bi(1, 0), 2),
    ///     GeneratorSpec::natural("b", Degree::bi(1, 0), 2),
    /// ];
    /// let m = PolyModulePresentation::cyclic(FieldSpec::Prime { p: 2 }, vars, &["r*b"]);
    /// let t = m.dims(&DegreeBox::new(4, 0, 0)).unwrap();
    /// assert_eq!(t.row(0), vec![1, 2, 2, 2, 2]);
    /// ```
    pub fn cyclic(field: FieldSpec, variables: Vec<GeneratorSpec>, relations: &[&str]) -> Self {
        let generators = vec![ModuleGenerator { name: "1".into(), degree: Degree::ZERO }];
        let relations = relations.iter().map(|r| BTreeMap::from([("1".to_string(), r.to_string())])).collect();
        PolyModulePresentation { field, variables, generators, relations }
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Diagnostic>> {
        match self.checked() {
            Ok(_) => Ok(()),
            Err(Error::Validation(d)) => Err(d),
            Err(e) => Err(vec![Diagnostic::new("", e.to_string())]),
        }
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Parsed relations as `(generator index, rational polynomial)` lists.
    fn checked(&self) -> Result<Vec<(Degree, Vec<(usize, crate::chain::RatPoly)>)>> {
        let mut diags = Vec::new();
        if let Err(e) = self.field.validated() {
            diags.push(Diagnostic::new("/field", e.to_string()));
        }
        let p = self.field.characteristic();
        for (i, v) in self.variables.iter().enumerate() {
            if v.degree.n < 1 {
                diags.push(Diagnostic::new(format!("/variables/{i}"), format!("variable `{}` needs n >= 1", v.name)));
            }
            if p != 2 && v.degree.d.rem_euclid(2) == 1 {
                diags.push(Diagnostic::new(
                    format!("/variables/{i}"),
                    format!("variable `{}` has odd d and would not commute", v.name),
                ));
            }
        }
        for w in 0..self.generators.len() {
            if self.generators[..w].iter().any(|g| g.name == self.generators[w].name) {
                diags.push(Diagnostic::new(format!("/generators/{w}"), "duplicate generator name"));
            }
        }
        let mut out = Vec::new();
        for (i, rel) in self.relations.iter().enumerate() {
            let mut terms = Vec::new();
            let mut degree: Option<Degree> = None;
            for (gen, text) in rel {
                let path = format!("/relations/{i}/{gen}");
                let Some(j) = self.generators.iter().position(|g| &g.name == gen) else {
                    diags.push(Diagnostic::new(path, format!("unknown module generator `{gen}`")));
                    continue;
                };
                let poly = match parse_polynomial(text, &self.variables) {
                    Ok(p) => p,
                    Err(e) => {
                        diags.push(Diagnostic::new(path, e.to_string()));
                        continue;
                    }
                };
                for m in poly.keys() {
                    let deg = m.degree(&self.variables) + self.generators[j].degree.bidegree();
                    match degree {
                        None => degree = Some(deg),
                        Some(d0) if d0 != deg => {
                            diags.push(Diagnostic::new(path.clone(), format!("relation is not homogeneous: {d0} vs {deg}")))
                        }
                        _ => {}
                    }
                }
                terms.push((j, poly));
            }
            if let Some(d) = degree {
                out.push((d, terms));
            }
        }
        if diags.is_empty() {
            Ok(out)
        } else {
            Err(Error::Validation(diags))
        }
    }

    /// Dimensions of the module on a box.
    pub fn dims(&self, bounds: &DegreeBox) -> Result<BoxTable> {
        bounds.validate()?;
        crate::with_field!(self.field, |f| {
            let m = CompiledModule::new(&f, self)?;
            let mut t = BoxTable::new(*bounds);
            for deg in bounds.bidegrees() {
                t.set(deg, m.piece(deg)?.quotient.dim());
            }
            t.mode = Some("module".into());
            Ok(t)
        })
    }
}

/// One bidegree of a presented module: the free part with its basis and the
/// quotient by relation multiples.
#[derive(Clone, Debug)]
pub(crate) struct Piece<F: Field> {
    pub basis: Vec<(usize, Monomial)>,
    pub index: HashMap<(usize, Monomial), usize>,
    pub quotient: Subquotient<F>,
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledModule<F: Field> {
    pub field: F,
    pub variables: Vec<GeneratorSpec>,
    pub gen_degrees: Vec<Degree>,
    pub gen_names: Vec<String>,
    pub relations: Vec<(Degree, Vec<(usize, Poly<F>)>)>,
}

fn mul_mono(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial { exps: a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect() }
}

impl<F: Field> CompiledModule<F> {
    pub fn new(field: &F, p: &PolyModulePresentation) -> Result<Self> {
        if field.spec() != p.field {
            return Err(Error::FieldMismatch { left: field.spec(), right: p.field });
        }
        let rels = p.checked()?;
        let relations = rels
            .into_iter()
            .map(|(deg, terms)| {
                let terms = terms
                    .into_iter()
                    .map(|(j, poly)| Ok((j, Poly::from_rational(field, &poly)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((deg, terms))
            })
            .collect::<Result<Vec<_>>>()?;
        // Monomials of each variable degree are enumerated with all-zero d pruning off.
        let variables = p
            .variables
            .iter()
            .map(|v| GeneratorSpec::new(v.name.clone(), v.degree.bidegree(), crate::graded::Parity::Even))
            .collect();
        Ok(CompiledModule {
            field: field.clone(),
            variables,
            gen_degrees: p.generators.iter().map(|g| g.degree.bidegree()).collect(),
            gen_names: p.generators.iter().map(|g| g.name.clone()).collect(),
            relations,
        })
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    /// Monomials in the variables of exactly this bidegree.
    pub fn monomials(&self, deg: Degree) -> Vec<Monomial> {
        if deg.n < 0 {
            return Vec::new();
        }
        if self.variables.is_empty() {
            return if deg == Degree::ZERO { vec![Monomial::one(0)] } else { Vec::new() };
        }
        let lo = self.variables.iter().map(|v| v.degree.d).min().unwrap_or(0).min(0);
        let hi = self.variables.iter().map(|v| v.degree.d).max().unwrap_or(0).max(0);
        let bx = DegreeBox::new(deg.n, lo * deg.n, hi * deg.n).with_n_min(deg.n);
        enumerate_monomials(&self.variables, &bx)
            .map(|mut t| t.remove(&deg).unwrap_or_default())
            .unwrap_or_default()
    }

    pub fn piece(&self, deg: Degree) -> Result<Piece<F>> {
        let f = &self.field;
        let deg = deg.bidegree();
        let mut basis = Vec::new();
        for (j, g) in self.gen_degrees.iter().enumerate() {
            for m in self.monomials(deg - *g) {
                basis.push((j, m));
            }
        }
        let index: HashMap<(usize, Monomial), usize> = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let dim = basis.len();
        let mut den = Vec::new();
        for (rdeg, terms) in &self.relations {
            for mu in self.monomials(deg - *rdeg) {
                let mut v = vec![f.zero(); dim];
                for (j, poly) in terms {
                    for (m, c) in &poly.terms {
                        let i = index[&(*j, mul_mono(&mu, m))];
                        v[i] = f.add(&v[i], c);
                    }
                }
                den.push(v);
            }
        }
        let num: Vec<Vec<F::Elem>> = (0..dim)
            .map(|i| {
                let mut e = vec![f.zero(); dim];
                e[i] = f.one();
                e
            })
            .collect();
        let quotient = Subquotient::new(f.clone(), dim, &num, &den)?;
        Ok(Piece { basis, index, quotient })
    }

    /// Multiplication by a monomial from the free part at `src` into the free
    /// part at `dst`, as a matrix on free coordinates.
    pub fn free_mul(&self, src: &Piece<F>, dst: &Piece<F>, mono: &Monomial) -> SparseMatrix<F> {
        let trip = src.basis.iter().enumerate().filter_map(|(c, (j, m))| {
            dst.index.get(&(*j, mul_mono(m, mono))).map(|&r| (r, c, self.field.one()))
        });
        SparseMatrix::from_accumulated(self.field.clone(), dst.basis.len(), src.basis.len(), trip.collect::<Vec<_>>())
    }

    /// The induced map on quotients in chosen quotient coordinates.
    pub fn quotient_mul(&self, src: &Piece<F>, dst: &Piece<F>, mono: &Monomial) -> SparseMatrix<F> {
        let m = self.free_mul(src, dst, mono);
        let cols: Vec<Vec<F::Elem>> = src
            .quotient
            .representatives()
            .iter()
            .map(|v| dst.quotient.coordinates(&m.mul_vec(v)).expect("free part is the whole numerator"))
            .collect();
        SparseMatrix::from_columns(self.field.clone(), dst.quotient.dim(), &cols)
    }

    pub fn label(&self, piece: &Piece<F>, v: &[F::Elem]) -> String {
        let labels: Vec<String> = piece
            .basis
            .iter()
            .map(|(j, m)| {
                let g = &self.gen_names[*j];
                match (m.is_one(), g.as_str()) {
                    (true, _) => g.clone(),
                    (false, "1") => m.render(&self.variables),
                    (false, _) => format!("{}*{g}", m.render(&self.variables)),
                }
            })
            .collect();
        crate::chain::render_vector(&self.field, v, &labels)
    }

    pub fn max_generator_n(&self) -> i64 {
        self.gen_degrees
            .iter()
            .chain(self.relations.iter().map(|(d, _)| d))
            .map(|d| d.n)
            .max()
            .unwrap_or(0)
    }

    pub fn min_generator_n(&self) -> i64 {
        self.gen_degrees.iter().map(|d| d.n).min().unwrap_or(0)
    }
}

/// Monomial of a single variable power.
pub(crate) fn var_power(nvars: usize, i: usize, e: u32) -> Monomial {
    let mut m = Monomial::one(nvars);
    m.exps[i] = e;
    m
}
