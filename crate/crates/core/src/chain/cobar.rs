use std::collections::{BTreeMap, HashMap};

use crate::chain::{BoxTable, ChainComplex, HopfData, HopfPresentation};
use crate::error::Result;
use crate::exact::{Field, SparseMatrix};
use crate::graded::{Degree, DegreeBox};
use crate::with_field;

/// Words `[a_1|...|a_s]` of total grading `n`, grouped by length.
fn words_of_grading(gradings: &[i64], n: i64) -> BTreeMap<usize, Vec<Vec<usize>>> {
    fn walk(gradings: &[i64], rest: i64, acc: &mut Vec<usize>, out: &mut BTreeMap<usize, Vec<Vec<usize>>>) {
        if rest == 0 {
            out.entry(acc.len()).or_default().push(acc.clone());
            return;
        }
        for (i, g) in gradings.iter().enumerate() {
            if *g <= rest {
                acc.push(i);
                walk(gradings, rest - g, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(gradings, n, &mut Vec::new(), &mut out);
    out
}

fn render_word(names: &[String], w: &[usize]) -> String {
    let inner: Vec<&str> = w.iter().map(|&i| names[i].as_str()).collect();
    format!("[{}]", inner.join("|"))
}

/// The normalized cobar complex in gradings `n_min..=n_max`, with a word of
/// length `s` in grading `n` at bidegree `(n, n - s)`. Each word carries the
/// sum of the augmentation filtrations of its letters.
pub fn cobar_complex<F: Field>(data: &HopfData<F>, bounds: &DegreeBox) -> Result<ChainComplex<F>> {
    let field = &data.field;
    let known = bounds.with_d(bounds.d_min.min(-1) - 1, bounds.d_max.max(bounds.n_max) + 1).with_n_min(bounds.n_min.max(0));
    let mut cx = ChainComplex::new(field.clone(), known);
    for n in known.n_min..=known.n_max {
        let by_len = words_of_grading(&data.gradings, n);
        for (s, words) in &by_len {
            let deg = Degree::bi(n, n - *s as i64);
            let labels = words.iter().map(|w| render_word(&data.names, w)).collect();
            let filt = words.iter().map(|w| w.iter().map(|&i| data.aug_filtration[i]).sum()).collect();
            cx.add_spot(deg, labels, filt);
        }
        for (s, words) in &by_len {
            let Some(targets) = by_len.get(&(s + 1)) else { continue };
            let index: HashMap<&Vec<usize>, usize> = targets.iter().enumerate().map(|(i, w)| (w, i)).collect();
            let mut trip = Vec::new();
            for (j, w) in words.iter().enumerate() {
                let mut prefix = 0i64;
                for (pos, &a) in w.iter().enumerate() {
                    for (c, l, r) in &data.reduced[a] {
                        let mut t = w[..pos].to_vec();
                        t.push(*l);
                        t.push(*r);
                        t.extend_from_slice(&w[pos + 1..]);
                        let odd = (data.gradings[*l] + prefix).rem_euclid(2) == 1;
                        let v = if odd { field.neg(c) } else { c.clone() };
                        trip.push((index[&t], j, v));
                    }
                    prefix += data.gradings[a] - 1;
                }
            }
            let deg = Degree::bi(n, n - *s as i64);
            cx.set_differential(deg, SparseMatrix::from_accumulated(field.clone(), targets.len(), words.len(), trip))?;
        }
    }
    Ok(cx)
}

/// Cotor of a Hopf algebra in a box, from its normalized cobar complex.
///
/// ```
/// use stabkit::chain::{cotor_box, HopfPresentation, MonogenicFactor};
/// use stabkit::exact::FieldSpec;
/// use stabkit::graded::{Degree, DegreeBox};
/// let h = HopfPresentation::monogenic(FieldSpec::Rational, vec![MonogenicFactor::polynomial("x", 2)]);
/// let t = cotor_box(&h, &DegreeBox::up_to(8), false).unwrap();
/// assert_eq!(t.dim(Degree::bi(2, 1)), 1);
/// assert_eq!(t.dim(Degree::bi(4, 2)), 0);
/// ```
pub fn cotor_box(hopf: &HopfPresentation, bounds: &DegreeBox, with_basis: bool) -> Result<BoxTable> {
    bounds.validate()?;
    with_field!(hopf.field, |f| {
        let data = hopf.compile(&f, bounds.n_max)?;
        let cx = cobar_complex(&data, bounds)?;
        let mut t = cx.homology_table(*bounds, with_basis)?;
        t.mode = Some("cobar".into());
        Ok(t)
    })
}
