use std::cmp::Ordering;

use serde::Serialize;

use crate::chain::{BoxTable, CdgaPresentation};
use crate::error::{Error, Result};
use crate::exact::{is_prime, FieldSpec};
use crate::graded::{compare_x_order, enumerate_monomials, Degree, DegreeBox, GeneratorSpec, Parity, SlopeQ};
use crate::operations::{Arity, DlOp, LieTerm, OpWord};

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::usage(format!("{p} is not prime")));
    }
    Ok(())
}

/// Lyndon words over `0..m` with total weight at most `max_weight`, in
/// lexicographic order.
fn lyndon_words(weights: &[i64], max_weight: i64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    // Depth-first over prenecklaces, tracking the period of the prefix.
    fn dfs(w: &mut Vec<usize>, period: usize, weight: i64, weights: &[i64], max_weight: i64, out: &mut Vec<Vec<usize>>) {
        if !w.is_empty() && period == w.len() {
            out.push(w.clone());
        }
        let n = w.len();
        let start = if n == 0 { 0 } else { w[n - period] };
        for c in start..weights.len() {
            let wt = weight + weights[c];
            if wt > max_weight {
                continue;
            }
            let next_period = if n > 0 && c == w[n - period] { period } else { n + 1 };
            w.push(c);
            dfs(w, next_period, wt, weights, max_weight, out);
            w.pop();
        }
    }
    dfs(&mut Vec::new(), 0, 0, weights, max_weight, &mut out);
    out
}

fn is_lyndon(w: &[usize]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// Standard bracketing: `w = uv` with `v` the longest proper Lyndon suffix.
fn standard_bracket(w: &[usize]) -> LieTerm {
    if w.len() == 1 {
        return LieTerm::Gen(w[0]);
    }
    let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("a single letter is Lyndon");
    LieTerm::Bracket(Box::new(standard_bracket(&w[..split])), Box::new(standard_bracket(&w[split..])))
}

/// Basis of the free (shifted) Lie algebra on the generators through
/// grading `n_max`: Lyndon words, plus `[w,w]` for odd `w` at odd primes.
fn lie_basis(p: u64, k: Arity, gens: &[GeneratorSpec], n_max: i64) -> Vec<(LieTerm, Degree)> {
    let Some(shift) = k.bracket_shift() else {
        return gens.iter().enumerate().filter(|(_, g)| g.degree.n <= n_max).map(|(i, g)| (LieTerm::Gen(i), g.degree)).collect();
    };
    let weights: Vec<i64> = gens.iter().map(|g| g.degree.n).collect();
    let mut out = Vec::new();
    for w in lyndon_words(&weights, n_max) {
        let mut deg = w.iter().fold(Degree::ZERO, |acc, &i| acc + gens[i].degree);
        deg.d += (w.len() as i64 - 1) * shift;
        let term = standard_bracket(&w);
        let lie_odd = (deg.d + shift).rem_euclid(2) == 1;
        if p != 2 && lie_odd && 2 * deg.n <= n_max {
            let sq = deg + deg + Degree::bi(0, shift);
            out.push((term.clone(), deg));
            out.push((LieTerm::Bracket(Box::new(term.clone()), Box::new(term)), sq));
        } else {
            out.push((term, deg));
        }
    }
    out
}

/// Admissible operation words on one base, depth first. `keep` selects the
/// words to report; a word with `d` above `d_cap` is never extended (all
/// degrees here are nonnegative, so `d` only grows).
#[allow(clippy::too_many_arguments)]
fn dl_closure(
    p: u64,
    k: Arity,
    gens: &[GeneratorSpec],
    base: &LieTerm,
    deg: Degree,
    n_max: i64,
    d_cap: &dyn Fn(Degree) -> bool,
    out: &mut Vec<OpWord>,
) {
    struct Frame {
        ops: Vec<DlOp>,
        deg: Degree,
        prev: Option<(i64, i64)>,
    }
    let label = |s: i64, eps: i64| match (k, eps) {
        (Arity::Finite(2), 0) => DlOp::Xi,
        (Arity::Finite(2), _) => DlOp::Zeta,
        (_, 0) => DlOp::Q(s),
        _ => DlOp::BetaQ(s),
    };
    let pi = p as i64;
    let mut stack = vec![Frame { ops: Vec::new(), deg, prev: None }];
    let mut found = Vec::new();
    while let Some(fr) = stack.pop() {
        if !fr.ops.is_empty() {
            found.push((fr.ops.clone(), fr.deg));
        }
        if pi * fr.deg.n > n_max {
            continue;
        }
        let d = fr.deg.d;
        let mut next = Vec::new();
        if p == 2 {
            let mut hi = i64::MAX;
            if let Some(shift) = k.bracket_shift() {
                hi = hi.min(d + shift);
            }
            if let Some((s_prev, _)) = fr.prev {
                hi = hi.min(2 * s_prev);
            }
            let mut s = d + 1;
            while s <= hi {
                let nd = Degree { n: 2 * fr.deg.n, d: d + s, f: fr.deg.f.map(|f| 2 * f) };
                if !d_cap(nd) {
                    break;
                }
                next.push((label(s, 0), nd, (s, 0)));
                s += 1;
            }
        } else {
            for eps in 0..=1 {
                let mut hi = i64::MAX;
                if let Some(shift) = k.bracket_shift() {
                    hi = hi.min((d + shift).div_euclid(2));
                }
                if let Some((s_prev, e_prev)) = fr.prev {
                    hi = hi.min(pi * s_prev - e_prev);
                }
                let mut s = d.div_euclid(2) + 1;
                while s <= hi {
                    let nd = Degree { n: pi * fr.deg.n, d: d + 2 * s * (pi - 1) - eps, f: fr.deg.f.map(|f| pi * f) };
                    if !d_cap(nd) {
                        break;
                    }
                    next.push((label(s, eps), nd, (s, eps)));
                    s += 1;
                }
            }
        }
        // Push in reverse so the smallest operation is explored first.
        for (op, nd, prev) in next.into_iter().rev() {
            let mut ops = fr.ops.clone();
            ops.push(op);
            stack.push(Frame { ops, deg: nd, prev: Some(prev) });
        }
    }
    for (ops, d) in found {
        out.push(OpWord::new(gens, base.clone(), ops, d));
    }
}

fn check_diagonal(gens: &[GeneratorSpec]) -> Result<Vec<GeneratorSpec>> {
    gens.iter()
        .map(|g| {
            if g.degree.n < 1 || g.degree.d != g.degree.n - 1 {
                return Err(Error::usage(format!(
                    "generator `{}` at {} is off the shifted diagonal (n, n-1, -1)",
                    g.name, g.degree
                )));
            }
            let mut g = g.clone();
            g.degree.f = Some(g.degree.f.unwrap_or(-1));
            Ok(g)
        })
        .collect()
}

fn below_diagonal(p: u64, k: Arity, gens: &[GeneratorSpec], bounds: &DegreeBox) -> Result<Vec<OpWord>> {
    check_prime(p)?;
    let gens = check_diagonal(gens)?;
    let mut words = Vec::new();
    let below = |d: Degree| d.d < d.n;
    for (term, deg) in lie_basis(p, k, &gens, bounds.n_max) {
        if !below(deg) {
            continue;
        }
        words.push(OpWord::new(&gens, term.clone(), Vec::new(), deg));
        dl_closure(p, k, &gens, &term, deg, bounds.n_max, &below, &mut words);
    }
    words.retain(|w| bounds.contains(w.degree));
    // Stable: generation order breaks ties within a degree.
    words.sort_by_key(|w| (w.degree.n, w.degree.d, std::cmp::Reverse(w.degree.f)));
    Ok(words)
}

/// Generators of free `E_2`-homology below the diagonal: a restricted Lie
/// basis closed under the top operation and its Bockstein.
///
/// ```
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec, Parity};
/// use stabkit::operations::e2_below_diagonal_generators;
/// let s = vec![GeneratorSpec::new("sigma", Degree::tri(1, 0, -1), Parity::Even)];
/// let words = e2_below_diagonal_generators(2, &s, &DegreeBox::up_to(8)).unwrap();
/// let labels: Vec<String> = words.iter().map(|w| w.to_string()).collect();
/// assert_eq!(labels, ["sigma", "xi(sigma)", "xi^2(sigma)", "xi^3(sigma)"]);
/// ```
pub fn e2_below_diagonal_generators(p: u64, gens: &[GeneratorSpec], bounds: &DegreeBox) -> Result<Vec<OpWord>> {
    below_diagonal(p, Arity::Finite(2), gens, bounds)
}

/// Generators of free `E_k`-homology below the diagonal for `k >= 3`.
pub fn ek_below_diagonal_generators(p: u64, k: Arity, gens: &[GeneratorSpec], bounds: &DegreeBox) -> Result<Vec<OpWord>> {
    if matches!(k, Arity::Finite(k) if k < 3) {
        return Err(Error::usage("k < 3: use the E_2 generators"));
    }
    below_diagonal(p, k, gens, bounds)
}

/// Every generator word through the box: brackets and admissible operations.
pub fn generator_words(p: u64, k: Arity, gens: &[GeneratorSpec], bounds: &DegreeBox) -> Result<Vec<OpWord>> {
    check_prime(p)?;
    for g in gens {
        if g.degree.n < 1 || g.degree.d < 0 {
            return Err(Error::usage(format!("generator `{}` at {} needs n >= 1 and d >= 0", g.name, g.degree)));
        }
    }
    let cap = bounds.d_max.max(0);
    let within = move |d: Degree| d.d <= cap;
    let mut words = Vec::new();
    for (term, deg) in lie_basis(p, k, gens, bounds.n_max) {
        words.push(OpWord::new(gens, term.clone(), Vec::new(), deg));
        dl_closure(p, k, gens, &term, deg, bounds.n_max, &within, &mut words);
    }
    Ok(words)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XEntry {
    pub label: String,
    pub degree: Degree,
}

/// Below-diagonal generators ordered by slope, then by `f/d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XSequence {
    pub field: FieldSpec,
    pub entries: Vec<XEntry>,
}

/// The ordered sequence of non-nilpotent below-diagonal generators.
///
/// At odd primes only even homological degrees enter, and the sequence is
/// cut below slope `(N-1)/(N+1)` so that larger boxes only append to it.
pub fn x_sequence(p: u64, k: Arity, gens: &[GeneratorSpec], bounds: &DegreeBox) -> Result<XSequence> {
    let words = if k == Arity::Finite(2) {
        e2_below_diagonal_generators(p, gens, bounds)?
    } else {
        ek_below_diagonal_generators(p, k, gens, bounds)?
    };
    let cut = SlopeQ::new(bounds.n_max - 1, bounds.n_max + 1)?;
    let mut entries: Vec<(usize, XEntry)> = words
        .into_iter()
        .filter(|w| p == 2 || w.degree.d.rem_euclid(2) == 0)
        .filter(|w| p == 2 || SlopeQ::new(w.degree.d, w.degree.n).map_or(false, |s| s < cut))
        .enumerate()
        .map(|(i, w)| (i, XEntry { label: w.label().to_string(), degree: w.degree }))
        .collect();
    let mut err = None;
    entries.sort_by(|a, b| match compare_x_order(a.1.degree, b.1.degree) {
        Ok(Ordering::Equal) => a.0.cmp(&b.0),
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(XSequence { field: FieldSpec::Prime { p }, entries: entries.into_iter().map(|(_, e)| e).collect() })
}

/// Dimensions of the free graded-commutative algebra on all generator words.
///
/// ```
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec, Parity};
/// use stabkit::operations::{free_ek_dimension_table, Arity};
/// let g = vec![
///     GeneratorSpec::new("r", Degree::tri(1, 0, -1), Parity::Even),
///     GeneratorSpec::new("b", Degree::tri(1, 0, -1), Parity::Even),
/// ];
/// let t = free_ek_dimension_table(2, Arity::Finite(2), &g, &DegreeBox::up_to(6)).unwrap();
/// assert_eq!(t.row(0), vec![1, 2, 3, 4, 5, 6, 7]);
/// ```
pub fn free_ek_dimension_table(p: u64, k: Arity, gens: &[GeneratorSpec], bounds: &DegreeBox) -> Result<BoxTable> {
    bounds.validate()?;
    let words = generator_words(p, k, gens, bounds)?;
    let specs: Vec<GeneratorSpec> = words
        .iter()
        .map(|w| GeneratorSpec::new(w.label(), w.degree, Parity::natural(w.degree.d, p)))
        .collect();
    let monos = enumerate_monomials(&specs, bounds)?;
    let mut t = BoxTable::from_dims(*bounds, monos.iter().map(|(k, v)| (*k, v.len())));
    if p != 2 {
        t.unverified_relations = true;
        t.notes.push("relations among operations at odd primes are not imposed".into());
    }
    Ok(t)
}

/// The formal cdga on all generator words through the box, with zero
/// differential. Its homology table is [`free_ek_dimension_table`], and it
/// feeds Koszul quotients by the input generators.
///
/// ```
/// use stabkit::chain::koszul_quotient_box;
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec, Parity};
/// use stabkit::operations::{free_ek_presentation, Arity};
/// let g = vec![
///     GeneratorSpec::new("r", Degree::tri(1, 0, -1), Parity::Even),
///     GeneratorSpec::new("b", Degree::tri(1, 0, -1), Parity::Even),
/// ];
/// let bx = DegreeBox::up_to(4);
/// let a = free_ek_presentation(2, Arity::Finite(2), &g, &bx).unwrap();
/// let t = koszul_quotient_box(&a, &["r", "b"], &bx, false).unwrap();
/// assert_eq!(t.row(0), vec![1, 0, 0, 0, 0]);
/// ```
pub fn free_ek_presentation(p: u64, k: Arity, gens: &[GeneratorSpec], bounds: &DegreeBox) -> Result<CdgaPresentation> {
    bounds.validate()?;
    let specs = generator_words(p, k, gens, bounds)?
        .iter()
        .map(|w| GeneratorSpec::new(w.label(), w.degree, Parity::natural(w.degree.d, p)))
        .collect();
    CdgaPresentation::formal(FieldSpec::Prime { p }, specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyndon_counts_follow_necklace_formula() {
        // Two letters of weight 1: 2, 1, 2, 3, 6, 9 words of lengths 1..6.
        let words = lyndon_words(&[1, 1], 6);
        let counts: Vec<usize> = (1..=6).map(|l| words.iter().filter(|w| w.len() == l).count()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
        assert!(words.iter().all(|w| is_lyndon(w)));
    }

    #[test]
    fn standard_bracketing() {
        let g = vec![
            GeneratorSpec::new("a", Degree::tri(1, 0, -1), Parity::Even),
            GeneratorSpec::new("b", Degree::tri(1, 0, -1), Parity::Even),
        ];
        assert_eq!(standard_bracket(&[0, 0, 1]).render(&g), "[a,[a,b]]");
        assert_eq!(standard_bracket(&[0, 1, 1]).render(&g), "[[a,b],b]");
    }

    #[test]
    fn off_diagonal_inputs_are_rejected() {
        let g = vec![GeneratorSpec::new("x", Degree::tri(2, 0, -1), Parity::Even)];
        assert!(e2_below_diagonal_generators(2, &g, &DegreeBox::up_to(4)).is_err());
        assert!(ek_below_diagonal_generators(2, Arity::Finite(2), &g, &DegreeBox::up_to(4)).is_err());
    }
}
