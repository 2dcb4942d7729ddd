use std::collections::BTreeMap;

use crate::chain::poly::{Poly, RatPoly};
use crate::chain::{cdga_homology_box_capped, BoxTable, CdgaPresentation, DEFAULT_MAX_SPOT_DIM};
use crate::error::{Error, Result};
use crate::exact::Field;
use crate::graded::{truncated_quotient_dims, Degree, DegreeBox, GeneratorSpec, Monomial, Parity};
use crate::with_field;

/// An element to kill: a polynomial, optionally with an explicit degree
/// (needed for `0`), written `poly` or `poly@(n,d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KillElement {
    pub poly: RatPoly,
    pub degree: Degree,
}

impl KillElement {
    pub fn parse(p: &CdgaPresentation, text: &str) -> Result<Self> {
        let (body, explicit) = match text.split_once('@') {
            Some((b, d)) => (b, Some(d.trim().parse::<Degree>()?)),
            None => (text, None),
        };
        let poly = p.parse(body)?;
        let degree = match (p.homogeneous_degree(&poly), explicit) {
            (Some(d), Some(e)) if d != e.bidegree() => {
                return Err(Error::usage(format!("`{body}` has degree {d}, not {e}")));
            }
            (Some(d), e) => {
                let f = e.and_then(|e| e.f).or_else(|| poly.keys().map(|m| m.degree(p.gens()).f).max().flatten());
                match f {
                    Some(f) => d.with_f(f),
                    None => d,
                }
            }
            (None, Some(e)) if poly.is_empty() => e,
            (None, _) if poly.is_empty() => {
                return Err(Error::usage("the zero element needs an explicit degree, as in `0@(1,0)`"));
            }
            (None, _) => return Err(Error::usage(format!("`{body}` is not homogeneous"))),
        };
        Ok(KillElement { poly, degree })
    }
}

fn remap(poly: &RatPoly, from: &[GeneratorSpec], to: &[GeneratorSpec]) -> RatPoly {
    let pos: Vec<usize> = from.iter().map(|g| to.iter().position(|h| h.name == g.name).expect("generator kept")).collect();
    poly.iter()
        .map(|(m, c)| {
            let mut exps = vec![0; to.len()];
            for (i, e) in m.exps.iter().enumerate() {
                exps[pos[i]] = *e;
            }
            (Monomial { exps }, c.clone())
        })
        .collect()
}

fn is_cycle<F: Field>(field: &F, p: &CdgaPresentation, poly: &RatPoly) -> Result<bool> {
    let alg = p.algebra();
    let dgen = p.generator_differentials(field)?;
    let mut total = Poly::<F>::zero();
    for (m, c) in &Poly::from_rational(field, poly)?.terms {
        total.add_scaled(field, c, &alg.differential(field, &dgen, m));
    }
    Ok(total.is_zero())
}

/// Adjoins one square-zero generator `u` with `du = e` per element, in order.
pub fn koszul_extension(p: &CdgaPresentation, elements: &[KillElement]) -> Result<CdgaPresentation> {
    let mut current = p.clone();
    for (i, e) in elements.iter().enumerate() {
        let poly = remap(&e.poly, p.gens(), current.gens());
        let ok = with_field!(current.field, |f| is_cycle(&f, &current, &poly))?;
        if !ok {
            return Err(Error::usage(format!("element {} is not a cycle", current.render(&poly))));
        }
        let mut name = format!("u{}", i + 1);
        while current.index_of(&name).is_some() {
            name.push('_');
        }
        let old = current.gens().to_vec();
        let mut gens = old.clone();
        gens.push(GeneratorSpec::new(name.clone(), e.degree + Degree::bi(0, 1), Parity::Odd));
        let mut next = CdgaPresentation::formal(current.field, gens)?;
        let new_gens = next.gens().to_vec();
        for g in &old {
            if let Some(d) = current.differential_of(&g.name) {
                next.set_differential(&g.name, remap(d, &old, &new_gens))?;
            }
        }
        next.set_differential(&name, remap(&poly, &old, &new_gens))?;
        current = next;
    }
    Ok(current)
}

/// Homology of the iterated mapping cone killing `elements`, in a box.
///
/// ```
/// use stabkit::chain::{koszul_quotient_box, CdgaPresentation};
/// use stabkit::exact::FieldSpec;
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// let p = CdgaPresentation::formal(FieldSpec::Prime { p: 2 }, vec![GeneratorSpec::natural("s", Degree::bi(1, 0), 2)]).unwrap();
/// let t = koszul_quotient_box(&p, &["s"], &DegreeBox::up_to(5), false).unwrap();
/// assert_eq!(t.total(), 1);
/// ```
pub fn koszul_quotient_box(p: &CdgaPresentation, elements: &[&str], bounds: &DegreeBox, with_basis: bool) -> Result<BoxTable> {
    koszul_quotient_box_capped(p, elements, bounds, with_basis, DEFAULT_MAX_SPOT_DIM)
}

pub fn koszul_quotient_box_capped(
    p: &CdgaPresentation,
    elements: &[&str],
    bounds: &DegreeBox,
    with_basis: bool,
    max_spot_dim: usize,
) -> Result<BoxTable> {
    p.validate().map_err(Error::Validation)?;
    let kills = elements.iter().map(|t| KillElement::parse(p, t)).collect::<Result<Vec<_>>>()?;
    let ext = koszul_extension(p, &kills)?;
    let mut t = cdga_homology_box_capped(&ext, bounds, with_basis, max_spot_dim)?;
    t.mode = Some("chain".into());
    if let Some(truncations) = pure_power_sequence(p, &kills) {
        let expected = truncated_quotient_dims(p.gens(), &truncations, bounds)?;
        let matches = expected.iter().filter(|(_, v)| **v > 0).all(|(k, v)| t.dim(*k) == *v) && t.total() == expected.values().sum::<usize>();
        if !matches {
            return Err(Error::NotAComplex("Koszul homology disagrees with the truncated quotient of a regular sequence".into()));
        }
        t.notes.push("regular sequence: dimensions match the truncated quotient".into());
    }
    Ok(t)
}

/// For a formal presentation and elements that are powers of distinct
/// polynomial generators, the truncation data of the quotient.
fn pure_power_sequence(p: &CdgaPresentation, kills: &[KillElement]) -> Option<BTreeMap<String, u32>> {
    if !p.is_formal() || kills.is_empty() {
        return None;
    }
    let mut out = BTreeMap::new();
    for k in kills {
        if k.poly.len() != 1 {
            return None;
        }
        let m = k.poly.keys().next()?;
        let mut nz = m.exps.iter().enumerate().filter(|(_, e)| **e > 0);
        let (i, e) = nz.next()?;
        if nz.next().is_some() || p.gens()[i].is_exterior() {
            return None;
        }
        if out.insert(p.gens()[i].name.clone(), *e).is_some() {
            return None;
        }
    }
    Some(out)
}
