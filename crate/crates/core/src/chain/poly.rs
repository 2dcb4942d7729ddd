use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Field;
use crate::graded::{Degree, GeneratorSpec, Monomial};

/// A polynomial with exact rational coefficients over a fixed generator list.
/// Field independent; reduce with [`Poly::from_rational`].
pub type RatPoly = BTreeMap<Monomial, BigRational>;

/// Parses `2*x^2*y + sigma - 1/2*z` against the given generators.
pub fn parse_polynomial(text: &str, gens: &[GeneratorSpec]) -> Result<RatPoly> {
    let names: HashMap<&str, usize> = gens.iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect();
    let mut out = RatPoly::new();
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (i, c) in cleaned.chars().enumerate() {
        if (c == '+' || c == '-') && !(i > 0 && cleaned[..i].ends_with('^')) {
            if !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
            } else if i > 0 {
                return Err(Error::Parse(format!("dangling sign in `{text}`")));
            }
            negative = c == '-';
        } else {
            current.push(c);
        }
    }
    if current.is_empty() {
        return Err(Error::Parse(format!("trailing sign in `{text}`")));
    }
    terms.push((negative, current));
    for (negative, term) in terms {
        let mut coeff = BigRational::one();
        let mut mono = Monomial::one(gens.len());
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in `{text}`")));
            }
            if factor.chars().next().unwrap().is_ascii_digit() {
                let value = match factor.split_once('/') {
                    Some((a, b)) => {
                        let a: BigInt = a.parse().map_err(|_| Error::Parse(format!("bad coefficient `{factor}`")))?;
                        let b: BigInt = b.parse().map_err(|_| Error::Parse(format!("bad coefficient `{factor}`")))?;
                        if b.is_zero() {
                            return Err(Error::Parse(format!("zero denominator in `{factor}`")));
                        }
                        BigRational::new(a, b)
                    }
                    None => BigRational::from_integer(
                        factor.parse().map_err(|_| Error::Parse(format!("bad coefficient `{factor}`")))?,
                    ),
                };
                coeff *= value;
                continue;
            }
            let (name, power) = match factor.split_once('^') {
                Some((n, e)) => (n, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?),
                None => (factor, 1),
            };
            let &i = names
                .get(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator `{name}` in `{text}`")))?;
            mono.exps[i] += power;
        }
        if negative {
            coeff = -coeff;
        }
        let slot = out.entry(mono).or_insert_with(BigRational::zero);
        *slot += coeff;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Renders a rational polynomial with monomials in generator-name order.
pub fn render_rational(poly: &RatPoly, gens: &[GeneratorSpec]) -> String {
    if poly.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in poly.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let body = m.render(gens);
        match (a.is_one(), m.is_one()) {
            (true, _) => out.push_str(&body),
            (false, true) => out.push_str(&a.to_string()),
            (false, false) => out.push_str(&format!("{a}*{body}")),
        }
    }
    out
}

/// A polynomial over a concrete field.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F: Field> {
    pub terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> Default for Poly<F> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn monomial(field: &F, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(m, field.one());
        p
    }

    pub fn from_rational(field: &F, poly: &RatPoly) -> Result<Self> {
        let mut p = Poly::zero();
        for (m, c) in poly {
            let v = field.from_fraction(c.numer(), c.denom())?;
            p.add_term(field, m.clone(), v);
        }
        Ok(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, field: &F, m: Monomial, c: F::Elem) {
        if field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = field.add(v, &c);
                if field.is_zero(v) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_scaled(&mut self, field: &F, c: &F::Elem, other: &Poly<F>) {
        for (m, v) in &other.terms {
            self.add_term(field, m.clone(), field.mul(c, v));
        }
    }

    pub fn render(&self, field: &F, gens: &[GeneratorSpec]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    field.render(c)
                } else if *c == field.one() {
                    m.render(gens)
                } else {
                    format!("{}*{}", field.render(c), m.render(gens))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The free graded-commutative algebra on a generator list, with Koszul
/// signs governed by the homological degree `d`.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    gens: Vec<GeneratorSpec>,
    odd: Vec<bool>,
}

impl FreeAlgebra {
    pub fn new(gens: Vec<GeneratorSpec>) -> Self {
        let odd = gens.iter().map(GeneratorSpec::sign_odd).collect();
        FreeAlgebra { gens, odd }
    }

    pub fn gens(&self) -> &[GeneratorSpec] {
        &self.gens
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn degree(&self, m: &Monomial) -> Degree {
        m.degree(&self.gens)
    }

    /// Product of two monomials: `None` when an exterior square appears,
    /// otherwise the result and whether it carries a minus sign.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut exps = a.exps.clone();
        let mut odd_a_after = 0u32;
        let mut sign = 0u32;
        // Moving b_j left past a_i (i > j) costs a_i * b_j when both are odd.
        for j in (0..self.gens.len()).rev() {
            if self.odd[j] {
                sign += odd_a_after * b.exps[j];
                odd_a_after += a.exps[j];
            }
        }
        for (i, e) in b.exps.iter().enumerate() {
            exps[i] += e;
            if self.gens[i].is_exterior() && exps[i] > 1 {
                return None;
            }
        }
        Some((Monomial { exps }, sign % 2 == 1))
    }

    pub fn mul<F: Field>(&self, field: &F, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        let mut out = Poly::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((m, neg)) = self.mul_monomials(ma, mb) {
                    let c = field.mul(ca, cb);
                    out.add_term(field, m, if neg { field.neg(&c) } else { c });
                }
            }
        }
        out
    }

    /// Applies the derivation extending `dgen` (one polynomial per generator)
    /// to a monomial by the Leibniz rule.
    pub fn differential<F: Field>(&self, field: &F, dgen: &[Poly<F>], m: &Monomial) -> Poly<F> {
        let len = self.gens.len();
        let mut out = Poly::zero();
        let mut prefix_d = 0i64;
        for i in 0..len {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            if !dgen[i].is_zero() {
                let mut prefix = Monomial::one(len);
                let mut suffix = Monomial::one(len);
                for j in 0..len {
                    if j < i {
                        prefix.exps[j] = m.exps[j];
                    } else if j > i {
                        suffix.exps[j] = m.exps[j];
                    }
                }
                let mut power = Monomial::one(len);
                power.exps[i] = e - 1;
                let inner = self.mul(field, &Poly::monomial(field, power), &dgen[i]);
                let left = self.mul(field, &Poly::monomial(field, prefix), &inner);
                let term = self.mul(field, &left, &Poly::monomial(field, suffix));
                let mut c = field.from_i64(e as i64);
                if prefix_d.rem_euclid(2) == 1 {
                    c = field.neg(&c);
                }
                out.add_scaled(field, &c, &term);
            }
            prefix_d += e as i64 * self.gens[i].degree.d;
        }
        out
    }
}
