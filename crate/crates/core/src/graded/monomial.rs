use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{Degree, DegreeBox};

/// Algebra type of a generator: `Even` generators are polynomial, `Odd`
/// generators are exterior (square zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Polynomial over F_2; otherwise exterior exactly when `d` is odd.
    pub fn natural(d: i64, characteristic: u64) -> Parity {
        if characteristic != 2 && d.rem_euclid(2) == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: Degree,
    pub parity: Parity,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, degree: Degree, parity: Parity) -> Self {
        GeneratorSpec { name: name.into(), degree, parity }
    }

    /// A generator whose parity follows from `d` and the characteristic.
    pub fn natural(name: impl Into<String>, degree: Degree, characteristic: u64) -> Self {
        let parity = Parity::natural(degree.d, characteristic);
        GeneratorSpec::new(name, degree, parity)
    }

    pub fn is_exterior(&self) -> bool {
        self.parity == Parity::Odd
    }

    /// Whether swapping this generator past another odd one costs a sign.
    pub fn sign_odd(&self) -> bool {
        self.degree.d.rem_euclid(2) == 1
    }
}

/// A commutative monomial: exponents aligned with a generator list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial { exps: vec![0; len] }
    }

    pub fn generator(len: usize, i: usize) -> Self {
        let mut m = Monomial::one(len);
        m.exps[i] = 1;
        m
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn word_length(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Sum of generator degrees; carries a filtration only when every
    /// generator present has one.
    pub fn degree(&self, gens: &[GeneratorSpec]) -> Degree {
        let mut deg = Degree::ZERO;
        let mut f = Some(0);
        for (e, g) in self.exps.iter().zip(gens) {
            if *e == 0 {
                continue;
            }
            let e = *e as i64;
            deg.n += e * g.degree.n;
            deg.d += e * g.degree.d;
            f = match (f, g.degree.f) {
                (Some(a), Some(b)) => Some(a + e * b),
                _ => None,
            };
        }
        deg.f = f;
        deg
    }

    /// Renders as `a^2*b` with factors in generator-name order, `1` when empty.
    pub fn render(&self, gens: &[GeneratorSpec]) -> String {
        let mut parts: Vec<(&str, u32)> = self
            .exps
            .iter()
            .zip(gens)
            .filter(|(e, _)| **e > 0)
            .map(|(e, g)| (g.name.as_str(), *e))
            .collect();
        parts.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
        if parts.is_empty() {
            return "1".into();
        }
        parts
            .iter()
            .map(|(n, e)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Generator indices sorted by name as UTF-8 bytes.
pub fn name_order(gens: &[GeneratorSpec]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..gens.len()).collect();
    idx.sort_by(|&a, &b| gens[a].name.as_bytes().cmp(gens[b].name.as_bytes()).then(a.cmp(&b)));
    idx
}

fn check_connective(gens: &[GeneratorSpec]) -> Result<()> {
    let has_weightless = gens.iter().any(|g| g.degree.n == 0);
    for g in gens {
        let (n, d) = (g.degree.n, g.degree.d);
        let ok = n >= 1 || (n == 0 && d >= 1);
        if !ok {
            return Err(Error::NonConnective(format!("{} at {}", g.name, g.degree)));
        }
        if has_weightless && d < 0 {
            return Err(Error::NonConnective(format!(
                "{} at {} has negative d alongside a generator of grading 0",
                g.name, g.degree
            )));
        }
    }
    Ok(())
}

fn enumerate_capped(
    gens: &[GeneratorSpec],
    caps: &[Option<u32>],
    bx: &DegreeBox,
) -> Result<BTreeMap<Degree, Vec<Monomial>>> {
    check_connective(gens)?;
    bx.validate()?;
    let order = name_order(gens);
    let all_d_nonneg = gens.iter().all(|g| g.degree.d >= 0);
    let max_exp: Vec<u32> = gens
        .iter()
        .zip(caps)
        .map(|(g, cap)| {
            let by_box = if g.degree.n >= 1 {
                (bx.n_max.max(0) / g.degree.n) as u32
            } else {
                (bx.d_max.max(0) / g.degree.d) as u32
            };
            let by_kind = if g.is_exterior() { 1 } else { u32::MAX };
            let by_cap = cap.map_or(u32::MAX, |c| c.saturating_sub(1));
            by_box.min(by_kind).min(by_cap)
        })
        .collect();
    let mut out: BTreeMap<Degree, Vec<Monomial>> = BTreeMap::new();
    let mut exps = vec![0u32; gens.len()];
    fn walk(
        pos: usize,
        n: i64,
        d: i64,
        order: &[usize],
        gens: &[GeneratorSpec],
        max_exp: &[u32],
        prune_d: bool,
        bx: &DegreeBox,
        exps: &mut Vec<u32>,
        out: &mut BTreeMap<Degree, Vec<Monomial>>,
    ) {
        if pos == order.len() {
            let deg = Degree::bi(n, d);
            if bx.contains(deg) {
                out.entry(deg).or_default().push(Monomial { exps: exps.clone() });
            }
            return;
        }
        let i = order[pos];
        let g = &gens[i].degree;
        for e in 0..=max_exp[i] {
            let (nn, dd) = (n + e as i64 * g.n, d + e as i64 * g.d);
            if nn > bx.n_max || (prune_d && dd > bx.d_max) {
                break;
            }
            exps[i] = e;
            walk(pos + 1, nn, dd, order, gens, max_exp, prune_d, bx, exps, out);
        }
        exps[i] = 0;
    }
    walk(0, 0, 0, &order, gens, &max_exp, all_d_nonneg, bx, &mut exps, &mut out);
    for list in out.values_mut() {
        // Graded lexicographic: larger exponent on the earliest name first.
        list.sort_by(|a, b| {
            let ka: Vec<u32> = order.iter().map(|&i| a.exps[i]).collect();
            let kb: Vec<u32> = order.iter().map(|&i| b.exps[i]).collect();
            kb.cmp(&ka)
        });
    }
    Ok(out)
}

/// All monomials of the free graded-commutative algebra on `gens` whose
/// bidegree lies in the box, keyed by bidegree.
///
/// ```
/// use stabkit::graded::{enumerate_monomials, Degree, DegreeBox, GeneratorSpec};
/// let gens = [
///     GeneratorSpec::natural("r", Degree::bi(1, 0), 2),
///     GeneratorSpec::natural("b", Degree::bi(1, 0), 2),
/// ];
/// let table = enumerate_monomials(&gens, &DegreeBox::new(4, 0, 0)).unwrap();
/// let dims: Vec<usize> = (0..=4).map(|n| table[&Degree::bi(n, 0)].len()).collect();
/// assert_eq!(dims, vec![1, 2, 3, 4, 5]);
/// ```
pub fn enumerate_monomials(gens: &[GeneratorSpec], bx: &DegreeBox) -> Result<BTreeMap<Degree, Vec<Monomial>>> {
    enumerate_capped(gens, &vec![None; gens.len()], bx)
}

/// Dimensions of the quotient by powers `x_i^{M_i}` of polynomial generators.
pub fn truncated_quotient_dims(
    gens: &[GeneratorSpec],
    truncations: &BTreeMap<String, u32>,
    bx: &DegreeBox,
) -> Result<BTreeMap<Degree, usize>> {
    let mut caps = vec![None; gens.len()];
    for (name, &power) in truncations {
        let i = gens
            .iter()
            .position(|g| &g.name == name)
            .ok_or_else(|| Error::usage(format!("truncation of unknown generator `{name}`")))?;
        if gens[i].is_exterior() {
            return Err(Error::usage(format!("cannot truncate exterior generator `{name}`")));
        }
        if power == 0 {
            return Err(Error::usage(format!("truncation power of `{name}` must be at least 1")));
        }
        caps[i] = Some(power);
    }
    Ok(enumerate_capped(gens, &caps, bx)?.into_iter().map(|(k, v)| (k, v.len())).collect())
}

/// Dimension counts of a monomial table.
pub fn dims_of(table: &BTreeMap<Degree, Vec<Monomial>>) -> BTreeMap<Degree, usize> {
    table.iter().map(|(k, v)| (*k, v.len())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(name: &str, n: i64, d: i64, p: Parity) -> GeneratorSpec {
        GeneratorSpec::new(name, Degree::bi(n, d), p)
    }

    #[test]
    fn exterior_square_vanishes() {
        let t = enumerate_monomials(&[gen("y", 2, 1, Parity::Odd)], &DegreeBox::up_to(8)).unwrap();
        assert_eq!(dims_of(&t), BTreeMap::from([(Degree::bi(0, 0), 1), (Degree::bi(2, 1), 1)]));
    }

    #[test]
    fn sigma_squared_z() {
        let gens = [GeneratorSpec::natural("sigma", Degree::bi(1, 0), 0), GeneratorSpec::natural("z", Degree::bi(2, 1), 0)];
        let t = enumerate_monomials(&gens, &DegreeBox::up_to(6)).unwrap();
        let at = &t[&Degree::bi(4, 1)];
        assert_eq!(at.len(), 1);
        assert_eq!(at[0].render(&gens), "sigma^2*z");
    }

    #[test]
    fn truncations() {
        let sigma = [gen("sigma", 1, 0, Parity::Even)];
        let t = truncated_quotient_dims(&sigma, &BTreeMap::from([("sigma".into(), 2)]), &DegreeBox::new(4, 0, 0)).unwrap();
        assert_eq!(t, BTreeMap::from([(Degree::bi(0, 0), 1), (Degree::bi(1, 0), 1)]));
        let rb = [gen("r", 1, 0, Parity::Even), gen("b", 1, 0, Parity::Even)];
        let caps = BTreeMap::from([("r".into(), 2), ("b".into(), 2)]);
        let t = truncated_quotient_dims(&rb, &caps, &DegreeBox::new(4, 0, 0)).unwrap();
        assert_eq!(t.values().copied().collect::<Vec<_>>(), vec![1, 2, 1]);
        let y = [gen("y", 1, 1, Parity::Odd)];
        assert!(truncated_quotient_dims(&y, &BTreeMap::from([("y".into(), 2)]), &DegreeBox::up_to(3)).is_err());
    }

    #[test]
    fn non_connective_rejected() {
        let bad = [gen("u", 0, 0, Parity::Even)];
        assert!(matches!(enumerate_monomials(&bad, &DegreeBox::up_to(2)), Err(Error::NonConnective(_))));
        let bad = [gen("u", -1, -1, Parity::Even)];
        assert!(enumerate_monomials(&bad, &DegreeBox::up_to(2)).is_err());
    }

    #[test]
    fn order_is_graded_lex_by_name() {
        let gens = [gen("b", 1, 0, Parity::Even), gen("a", 1, 0, Parity::Even)];
        let t = enumerate_monomials(&gens, &DegreeBox::new(2, 0, 0)).unwrap();
        let names: Vec<String> = t[&Degree::bi(2, 0)].iter().map(|m| m.render(&gens)).collect();
        assert_eq!(names, vec!["a^2", "a*b", "b^2"]);
    }
}
