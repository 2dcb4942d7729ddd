use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::chain::BoxTable;
use crate::error::{Diagnostic, Error, Result};
use crate::exact::{Echelon, Field, FieldSpec};
use crate::graded::{enumerate_monomials, Degree, DegreeBox, GeneratorSpec, Parity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Polynomial,
    Exterior,
    /// `F_p[x] / x^(p^height)`.
    Truncated,
}

/// A monogenic Hopf algebra on one primitive generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonogenicFactor {
    pub gen: String,
    pub grading: i64,
    pub kind: FactorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
}

impl MonogenicFactor {
    pub fn polynomial(gen: &str, grading: i64) -> Self {
        MonogenicFactor { gen: gen.into(), grading, kind: FactorKind::Polynomial, height: None }
    }
    pub fn exterior(gen: &str, grading: i64) -> Self {
        MonogenicFactor { gen: gen.into(), grading, kind: FactorKind::Exterior, height: None }
    }
    pub fn truncated(gen: &str, grading: i64, height: u32) -> Self {
        MonogenicFactor { gen: gen.into(), grading, kind: FactorKind::Truncated, height: Some(height) }
    }

    /// Largest exponent present, `None` for a polynomial factor.
    pub fn top_exponent(&self, characteristic: u64) -> Option<u64> {
        match self.kind {
            FactorKind::Polynomial => None,
            FactorKind::Exterior => Some(1),
            FactorKind::Truncated => Some(characteristic.pow(self.height.unwrap_or(1)) - 1),
        }
    }

    pub fn check(&self, field: FieldSpec) -> std::result::Result<(), String> {
        let p = field.characteristic();
        if self.grading < 1 {
            return Err(format!("factor `{}` must have grading at least 1 (connectedness)", self.gen));
        }
        let odd = self.grading % 2 != 0;
        match self.kind {
            FactorKind::Polynomial if p != 2 && odd => {
                Err(format!("polynomial factor `{}` needs even grading away from characteristic 2", self.gen))
            }
            FactorKind::Exterior if p != 2 && !odd => {
                Err(format!("exterior factor `{}` needs odd grading away from characteristic 2", self.gen))
            }
            FactorKind::Truncated => {
                if p == 0 {
                    return Err(format!("truncated factor `{}` needs a prime field", self.gen));
                }
                match self.height {
                    Some(h) if h >= 1 => {}
                    _ => return Err(format!("truncated factor `{}` needs height >= 1", self.gen)),
                }
                if p != 2 && odd {
                    return Err(format!("truncated factor `{}` needs even grading at odd primes", self.gen));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub grading: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    /// `(coefficient, basis element)` pairs.
    pub result: Vec<(i64, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoproductEntry {
    pub of: String,
    /// `(coefficient, left, right)` triples; `"1"` names the unit.
    pub terms: Vec<(i64, String, String)>,
}

/// A Hopf algebra given by explicit tables on a basis of the augmentation
/// ideal. Products not listed are zero; elements without a coproduct entry
/// are primitive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitHopf {
    pub basis: Vec<BasisElement>,
    #[serde(default)]
    pub product: Vec<ProductEntry>,
    #[serde(default)]
    pub coproduct: Vec<CoproductEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HopfForm {
    Factors { factors: Vec<MonogenicFactor> },
    Explicit(ExplicitHopf),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopfPresentation {
    pub field: FieldSpec,
    pub form: HopfForm,
}

impl HopfPresentation {
    pub fn monogenic(field: FieldSpec, factors: Vec<MonogenicFactor>) -> Self {
        HopfPresentation { field, form: HopfForm::Factors { factors } }
    }

    pub fn explicit(field: FieldSpec, table: ExplicitHopf) -> Self {
        HopfPresentation { field, form: HopfForm::Explicit(table) }
    }

    /// Schema and axiom checks: connectedness, homogeneity, counit,
    /// coassociativity and compatibility of product and coproduct.
    pub fn validate(&self) -> std::result::Result<(), Vec<Diagnostic>> {
        let mut diags = Vec::new();
        if let Err(e) = self.field.validated() {
            diags.push(Diagnostic::new("/field", e.to_string()));
            return Err(diags);
        }
        match &self.form {
            HopfForm::Factors { factors } => {
                for (i, f) in factors.iter().enumerate() {
                    if let Err(msg) = f.check(self.field) {
                        diags.push(Diagnostic::new(format!("/hopf/factors/{i}"), msg));
                    }
                }
                let mut names: Vec<&str> = factors.iter().map(|f| f.gen.as_str()).collect();
                names.sort_unstable();
                if names.windows(2).any(|w| w[0] == w[1]) {
                    diags.push(Diagnostic::new("/hopf/factors", "duplicate generator names"));
                }
            }
            HopfForm::Explicit(t) => {
                let r = crate::with_field!(self.field, |f| Ok::<_, Error>(validate_explicit(&f, t)));
                match r {
                    Ok(d) => diags.extend(d),
                    Err(e) => diags.push(Diagnostic::new("/hopf", e.to_string())),
                }
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    /// Single monogenic factor, when the presentation is one.
    pub fn single_factor(&self) -> Option<&MonogenicFactor> {
        match &self.form {
            HopfForm::Factors { factors } if factors.len() == 1 => Some(&factors[0]),
            _ => None,
        }
    }

    /// Augmentation-ideal basis, reduced coproduct and augmentation
    /// filtration through grading `n_max`, over a concrete field.
    pub fn compile<F: Field>(&self, field: &F, n_max: i64) -> Result<HopfData<F>> {
        if field.spec() != self.field {
            return Err(Error::FieldMismatch { left: field.spec(), right: self.field });
        }
        self.validate().map_err(Error::Validation)?;
        match &self.form {
            HopfForm::Factors { factors } => Ok(compile_factors(field, factors, n_max)),
            HopfForm::Explicit(t) => compile_explicit(field, t, n_max),
        }
    }
}

/// Compiled Hopf data on a basis of the augmentation ideal.
#[derive(Clone, Debug)]
pub struct HopfData<F: Field> {
    pub field: F,
    pub names: Vec<String>,
    pub gradings: Vec<i64>,
    /// `-k` for the largest `k` with the element in the `k`-th power of the
    /// augmentation ideal.
    pub aug_filtration: Vec<i64>,
    /// Reduced coproduct `(coefficient, left, right)` per basis element.
    pub reduced: Vec<Vec<(F::Elem, usize, usize)>>,
}

fn binomial_mod<F: Field>(field: &F, n: u64, k: u64) -> F::Elem {
    // Multiplicative formula over the field is unsafe in characteristic p,
    // so build the row of Pascal's triangle directly.
    let mut row = vec![field.one()];
    for _ in 0..n {
        let mut next = vec![field.one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = field.add(&row[i - 1], &row[i]);
        }
        row = next;
    }
    row[k as usize].clone()
}

fn compile_factors<F: Field>(field: &F, factors: &[MonogenicFactor], n_max: i64) -> HopfData<F> {
    let ch = field.characteristic();
    let caps: Vec<u64> = factors
        .iter()
        .map(|f| {
            let by_box = (n_max.max(0) / f.grading) as u64;
            f.top_exponent(ch).map_or(by_box, |t| t.min(by_box))
        })
        .collect();
    // Enumerate exponent tuples with total grading in 1..=n_max.
    let mut tuples: Vec<Vec<u64>> = Vec::new();
    fn walk(i: usize, acc: &mut Vec<u64>, g: i64, factors: &[MonogenicFactor], caps: &[u64], n_max: i64, out: &mut Vec<Vec<u64>>) {
        if i == factors.len() {
            if g >= 1 {
                out.push(acc.clone());
            }
            return;
        }
        for e in 0..=caps[i] {
            let gg = g + e as i64 * factors[i].grading;
            if gg > n_max {
                break;
            }
            acc.push(e);
            walk(i + 1, acc, gg, factors, caps, n_max, out);
            acc.pop();
        }
    }
    walk(0, &mut Vec::new(), 0, factors, &caps, n_max, &mut tuples);
    tuples.sort_by_key(|t| (t.iter().zip(factors).map(|(e, f)| *e as i64 * f.grading).sum::<i64>(), std::cmp::Reverse(t.clone())));
    let index: HashMap<Vec<u64>, usize> = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let grading = |t: &[u64]| t.iter().zip(factors).map(|(e, f)| *e as i64 * f.grading).sum::<i64>();
    let names = tuples
        .iter()
        .map(|t| {
            t.iter()
                .zip(factors)
                .filter(|(e, _)| **e > 0)
                .map(|(e, f)| if *e == 1 { f.gen.clone() } else { format!("{}^{}", f.gen, e) })
                .collect::<Vec<_>>()
                .join("*")
        })
        .collect();
    let gradings: Vec<i64> = tuples.iter().map(|t| grading(t)).collect();
    let aug_filtration = tuples.iter().map(|t| -(t.iter().sum::<u64>() as i64)).collect();
    let reduced = tuples
        .iter()
        .map(|t| {
            let mut terms = Vec::new();
            // All splittings t = left + right, coefficient prod binom, Koszul sign
            // from moving left parts past the right parts of earlier factors.
            let mut left = vec![0u64; t.len()];
            loop {
                let right: Vec<u64> = t.iter().zip(&left).map(|(a, b)| a - b).collect();
                if left.iter().any(|&e| e > 0) && right.iter().any(|&e| e > 0) {
                    let mut c = field.one();
                    for (i, &k) in t.iter().enumerate() {
                        c = field.mul(&c, &binomial_mod(field, k, left[i]));
                    }
                    let mut sign = 0i64;
                    for j in 0..t.len() {
                        for l in j + 1..t.len() {
                            sign += right[j] as i64 * factors[j].grading * left[l] as i64 * factors[l].grading;
                        }
                    }
                    if sign % 2 != 0 {
                        c = field.neg(&c);
                    }
                    if !field.is_zero(&c) {
                        terms.push((c, index[&left], index[&right]));
                    }
                }
                // Odometer over 0..=t[i].
                let mut i = 0;
                loop {
                    if i == t.len() {
                        return terms;
                    }
                    if left[i] < t[i] {
                        left[i] += 1;
                        break;
                    }
                    left[i] = 0;
                    i += 1;
                }
            }
        })
        .collect();
    HopfData { field: field.clone(), names, gradings, aug_filtration, reduced }
}

/// Full coproduct over the basis with the unit at index 0.
type FullCoproduct<E> = Vec<Vec<(E, usize, usize)>>;

struct ExplicitTables<F: Field> {
    names: Vec<String>,
    gradings: Vec<i64>,
    product: HashMap<(usize, usize), Vec<F::Elem>>,
    coproduct: FullCoproduct<F::Elem>,
}

fn explicit_tables<F: Field>(field: &F, t: &ExplicitHopf) -> std::result::Result<ExplicitTables<F>, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut names = vec!["1".to_string()];
    let mut gradings = vec![0];
    for (i, b) in t.basis.iter().enumerate() {
        if b.name == "1" || names.contains(&b.name) {
            diags.push(Diagnostic::new(format!("/hopf/basis/{i}"), format!("duplicate or reserved name `{}`", b.name)));
        }
        if b.grading < 1 {
            diags.push(Diagnostic::new(
                format!("/hopf/basis/{i}"),
                format!("`{}` has grading {} but the algebra must be connected", b.name, b.grading),
            ));
        }
        names.push(b.name.clone());
        gradings.push(b.grading);
    }
    let dim = names.len();
    let idx = |s: &str| names.iter().position(|n| n == s);
    let mut product: HashMap<(usize, usize), Vec<F::Elem>> = HashMap::new();
    for a in 0..dim {
        let mut unit = vec![field.zero(); dim];
        unit[a] = field.one();
        product.insert((0, a), unit.clone());
        product.insert((a, 0), unit);
    }
    for (i, e) in t.product.iter().enumerate() {
        let path = format!("/hopf/product/{i}");
        let (Some(l), Some(r)) = (idx(&e.left), idx(&e.right)) else {
            diags.push(Diagnostic::new(path, "unknown basis element"));
            continue;
        };
        let mut v = vec![field.zero(); dim];
        for (c, name) in &e.result {
            match idx(name) {
                Some(k) => {
                    if gradings[k] != gradings[l] + gradings[r] {
                        diags.push(Diagnostic::new(path.clone(), format!("product term `{name}` has the wrong grading")));
                    }
                    v[k] = field.add(&v[k], &field.from_i64(*c));
                }
                None => diags.push(Diagnostic::new(path.clone(), format!("unknown basis element `{name}`"))),
            }
        }
        product.insert((l, r), v);
    }
    let mut coproduct: FullCoproduct<F::Elem> = (0..dim)
        .map(|a| if a == 0 { vec![(field.one(), 0, 0)] } else { vec![(field.one(), a, 0), (field.one(), 0, a)] })
        .collect();
    for (i, e) in t.coproduct.iter().enumerate() {
        let path = format!("/hopf/coproduct/{i}");
        let Some(a) = idx(&e.of).filter(|&a| a > 0) else {
            diags.push(Diagnostic::new(path, format!("unknown basis element `{}`", e.of)));
            continue;
        };
        let mut terms = Vec::new();
        for (c, l, r) in &e.terms {
            match (idx(l), idx(r)) {
                (Some(li), Some(ri)) => {
                    if gradings[li] + gradings[ri] != gradings[a] {
                        diags.push(Diagnostic::new(path.clone(), format!("term {l} (x) {r} has the wrong grading")));
                    }
                    let v = field.from_i64(*c);
                    if !field.is_zero(&v) {
                        terms.push((v, li, ri));
                    }
                }
                _ => diags.push(Diagnostic::new(path.clone(), format!("unknown basis element in term {l} (x) {r}"))),
            }
        }
        let unit_left: Vec<_> = terms.iter().filter(|t| t.1 == 0).collect();
        let unit_right: Vec<_> = terms.iter().filter(|t| t.2 == 0).collect();
        let counit_ok = unit_left.len() == 1
            && unit_right.len() == 1
            && unit_left[0].2 == a
            && unit_right[0].1 == a
            && unit_left[0].0 == field.one()
            && unit_right[0].0 == field.one();
        if !counit_ok {
            diags.push(Diagnostic::new(path, format!("counit axiom fails: psi({}) must contain 1 (x) a + a (x) 1 exactly once", e.of)));
        }
        coproduct[a] = terms;
    }
    if diags.is_empty() {
        Ok(ExplicitTables { names, gradings, product, coproduct })
    } else {
        Err(diags)
    }
}

fn validate_explicit<F: Field>(field: &F, t: &ExplicitHopf) -> Vec<Diagnostic> {
    let tables = match explicit_tables(field, t) {
        Ok(x) => x,
        Err(d) => return d,
    };
    let mut diags = Vec::new();
    let dim = tables.names.len();
    // Coassociativity on every basis element.
    for a in 1..dim {
        let mut lhs: BTreeMap<(usize, usize, usize), F::Elem> = BTreeMap::new();
        let mut rhs: BTreeMap<(usize, usize, usize), F::Elem> = BTreeMap::new();
        for (c, l, r) in &tables.coproduct[a] {
            for (c2, ll, lr) in &tables.coproduct[*l] {
                let e = lhs.entry((*ll, *lr, *r)).or_insert_with(|| field.zero());
                *e = field.add(e, &field.mul(c, c2));
            }
            for (c2, rl, rr) in &tables.coproduct[*r] {
                let e = rhs.entry((*l, *rl, *rr)).or_insert_with(|| field.zero());
                *e = field.add(e, &field.mul(c, c2));
            }
        }
        lhs.retain(|_, v| !field.is_zero(v));
        rhs.retain(|_, v| !field.is_zero(v));
        if lhs != rhs {
            let path = match t.coproduct.iter().position(|e| e.of == tables.names[a]) {
                Some(i) => format!("/hopf/coproduct/{i}"),
                None => format!("/hopf/basis/{}", a - 1),
            };
            diags.push(Diagnostic::new(
                path,
                format!("coassociativity fails on `{}`", tables.names[a]),
            ));
        }
    }
    // Compatibility psi(ab) = psi(a) psi(b) with the Koszul sign.
    for a in 1..dim {
        for b in 1..dim {
            let prod = tables.product.get(&(a, b)).cloned().unwrap_or_else(|| vec![field.zero(); dim]);
            let mut lhs: BTreeMap<(usize, usize), F::Elem> = BTreeMap::new();
            for (k, c) in prod.iter().enumerate() {
                if field.is_zero(c) {
                    continue;
                }
                for (c2, l, r) in &tables.coproduct[k] {
                    let e = lhs.entry((*l, *r)).or_insert_with(|| field.zero());
                    *e = field.add(e, &field.mul(c, c2));
                }
            }
            let mut rhs: BTreeMap<(usize, usize), F::Elem> = BTreeMap::new();
            for (ca, a1, a2) in &tables.coproduct[a] {
                for (cb, b1, b2) in &tables.coproduct[b] {
                    let (Some(p1), Some(p2)) = (tables.product.get(&(*a1, *b1)), tables.product.get(&(*a2, *b2))) else {
                        continue;
                    };
                    let mut c = field.mul(ca, cb);
                    if (tables.gradings[*a2] * tables.gradings[*b1]) % 2 != 0 {
                        c = field.neg(&c);
                    }
                    for (i, x) in p1.iter().enumerate() {
                        if field.is_zero(x) {
                            continue;
                        }
                        for (j, y) in p2.iter().enumerate() {
                            if field.is_zero(y) {
                                continue;
                            }
                            let e = rhs.entry((i, j)).or_insert_with(|| field.zero());
                            *e = field.add(e, &field.mul(&c, &field.mul(x, y)));
                        }
                    }
                }
            }
            lhs.retain(|_, v| !field.is_zero(v));
            rhs.retain(|_, v| !field.is_zero(v));
            if lhs != rhs {
                let (na, nb) = (&tables.names[a], &tables.names[b]);
                let path = match t.product.iter().position(|e| &e.left == na && &e.right == nb) {
                    Some(i) => format!("/hopf/product/{i}"),
                    None => format!("/hopf/basis/{}", a - 1),
                };
                diags.push(Diagnostic::new(
                    path,
                    format!("product and coproduct are incompatible on `{}`*`{}`", tables.names[a], tables.names[b]),
                ));
            }
        }
    }
    diags
}

fn compile_explicit<F: Field>(field: &F, t: &ExplicitHopf, n_max: i64) -> Result<HopfData<F>> {
    let tables = explicit_tables(field, t).map_err(Error::Validation)?;
    let dim = tables.names.len();
    // Powers of the augmentation ideal, as spans in the full basis.
    let mut level: Vec<i64> = vec![0; dim];
    let mut current: Vec<Vec<F::Elem>> = (1..dim)
        .map(|a| {
            let mut v = vec![field.zero(); dim];
            v[a] = field.one();
            v
        })
        .collect();
    let mut k = 1;
    while !current.is_empty() {
        let mut span = Echelon::new(field.clone(), dim);
        for v in &current {
            span.insert(v);
        }
        for a in 1..dim {
            let mut e = vec![field.zero(); dim];
            e[a] = field.one();
            if span.contains(&e) {
                level[a] = k;
            }
        }
        let members = (1..dim).filter(|a| level[*a] == k).count();
        if members != span.rank() {
            return Err(Error::usage(format!(
                "explicit basis is not adapted to the augmentation filtration at power {k}"
            )));
        }
        let mut next = Vec::new();
        for v in span.basis() {
            for a in 1..dim {
                let mut w = vec![field.zero(); dim];
                for (i, c) in v.iter().enumerate() {
                    if field.is_zero(c) {
                        continue;
                    }
                    if let Some(p) = tables.product.get(&(a, i)) {
                        for (j, x) in p.iter().enumerate() {
                            field.axpy(&mut w[j], c, x);
                        }
                    }
                }
                if w.iter().any(|x| !field.is_zero(x)) {
                    next.push(w);
                }
            }
        }
        current = next;
        k += 1;
    }
    let keep: Vec<usize> = (1..dim).filter(|&a| tables.gradings[a] <= n_max).collect();
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let reduced = keep
        .iter()
        .map(|&a| {
            tables.coproduct[a]
                .iter()
                .filter(|(_, l, r)| *l != 0 && *r != 0)
                .map(|(c, l, r)| (c.clone(), pos[l], pos[r]))
                .collect()
        })
        .collect();
    Ok(HopfData {
        field: field.clone(),
        names: keep.iter().map(|&a| tables.names[a].clone()).collect(),
        gradings: keep.iter().map(|&a| tables.gradings[a]).collect(),
        aug_filtration: keep.iter().map(|&a| -level[a]).collect(),
        reduced,
    })
}

/// Closed-form Cotor of one monogenic factor, in bidegrees `(n, n - s)`.
///
/// ```
/// use stabkit::chain::{monogenic_cotor_closed, MonogenicFactor};
/// use stabkit::exact::FieldSpec;
/// use stabkit::graded::{Degree, DegreeBox};
/// let t = monogenic_cotor_closed(FieldSpec::Rational, &MonogenicFactor::exterior("y", 3), &DegreeBox::up_to(9)).unwrap();
/// assert_eq!(t.dim(Degree::bi(3, 2)), 1);
/// assert_eq!(t.dim(Degree::bi(6, 4)), 1);
/// ```
pub fn monogenic_cotor_closed(field: FieldSpec, factor: &MonogenicFactor, bounds: &DegreeBox) -> Result<BoxTable> {
    factor.check(field).map_err(Error::usage)?;
    let p = field.characteristic();
    let m = factor.grading;
    let mut gens: Vec<GeneratorSpec> = Vec::new();
    let bar = format!("{}bar", factor.gen);
    let mut push = |name: String, deg: Degree, parity: Parity| gens.push(GeneratorSpec::new(name, deg, parity));
    let levels = |height: Option<u32>| -> u32 {
        // Enough levels to cover the box for the polynomial case.
        height.unwrap_or_else(|| {
            let mut l = 0;
            let mut g = m;
            while g <= bounds.n_max.max(1) {
                l += 1;
                g *= p as i64;
            }
            l.max(1)
        })
    };
    match (factor.kind, p) {
        (FactorKind::Exterior, _) => push(bar, Degree::bi(m, m - 1), Parity::Even),
        (FactorKind::Polynomial, 0) => push(bar, Degree::bi(m, m - 1), Parity::Odd),
        (kind, 2) => {
            let l = if kind == FactorKind::Polynomial { levels(None) } else { factor.height.unwrap() };
            for j in 0..l {
                let g = m << j;
                push(format!("xi^{j}({bar})"), Degree::bi(g, g - 1), Parity::Even);
            }
        }
        (kind, p) => {
            let l = if kind == FactorKind::Polynomial { levels(None) } else { factor.height.unwrap() };
            let p = p as i64;
            for j in 0..l {
                let g = p.pow(j) * m;
                push(format!("xi^{j}({bar})"), Degree::bi(g, g - 1), Parity::Odd);
                push(format!("zeta(xi^{j}({bar}))"), Degree::bi(p * g, p * g - 2), Parity::Even);
            }
        }
    }
    let monos = enumerate_monomials(&gens, bounds)?;
    let mut t = BoxTable::from_dims(*bounds, monos.iter().map(|(k, v)| (*k, v.len())));
    t.mode = Some("closed form".into());
    Ok(t)
}
