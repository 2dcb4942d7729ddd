use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::{parse_polynomial, BoxTable, ChainComplex, Poly, RatPoly};
use crate::error::{Error, Result};
use crate::exact::{Field, SparseMatrix};
use crate::graded::{Degree, DegreeBox, GeneratorSpec};
use crate::stability::polymodule::{CompiledModule, PolyModulePresentation};

/// An endomorphism of bidegree `shift` of a graded module tabulated on a box.
/// The module is taken to vanish outside `module.bounds`.
#[derive(Clone, Debug)]
pub struct ActionTable<F: Field> {
    pub field: F,
    pub shift: Degree,
    pub module: BoxTable,
    /// Basis labels of the module per degree.
    pub labels: BTreeMap<Degree, Vec<String>>,
    /// Matrices `M_s -> M_(s + shift)` keyed by source, for sources and
    /// targets inside the box.
    pub matrices: BTreeMap<Degree, SparseMatrix<F>>,
}

impl<F: Field> ActionTable<F> {
    /// Checks shapes against the module table.
    pub fn new(
        field: F,
        shift: Degree,
        module: BoxTable,
        labels: BTreeMap<Degree, Vec<String>>,
        matrices: BTreeMap<Degree, SparseMatrix<F>>,
    ) -> Result<Self> {
        let shift = shift.bidegree();
        for (s, m) in &matrices {
            let t = *s + shift;
            if !module.bounds.contains(*s) || !module.bounds.contains(t) {
                return Err(Error::usage(format!("action matrix at {s} leaves the module box {}", module.bounds)));
            }
            if m.cols() != module.dim(*s) || m.rows() != module.dim(t) {
                return Err(Error::Shape(format!(
                    "action matrix at {s} is {}x{}, module dims are {} -> {}",
                    m.rows(),
                    m.cols(),
                    module.dim(*s),
                    module.dim(t)
                )));
            }
        }
        Ok(ActionTable { field, shift, module, labels, matrices })
    }

    /// Multiplication by a homogeneous polynomial in the module variables.
    pub fn from_module(field: &F, p: &PolyModulePresentation, element: &str, bounds: &DegreeBox) -> Result<Self> {
        let cm = CompiledModule::new(field, p)?;
        action_from_compiled(&cm, p, element, bounds, &module_pieces(&cm, bounds)?)
    }

    /// The matrix at `s`, zero when either end is outside the box.
    pub fn at(&self, s: Degree) -> SparseMatrix<F> {
        let s = s.bidegree();
        self.matrices.get(&s).cloned().unwrap_or_else(|| {
            SparseMatrix::zero(self.field.clone(), self.module.dim(s + self.shift), self.module.dim(s))
        })
    }

    /// Rendered matrices keyed by source degree.
    pub fn render(&self) -> BTreeMap<String, Vec<Vec<String>>> {
        self.matrices.iter().filter(|(_, m)| !m.is_zero()).map(|(k, m)| (k.to_string(), m.render())).collect()
    }
}

type Pieces<F> = BTreeMap<Degree, crate::stability::polymodule::Piece<F>>;

fn module_pieces<F: Field>(cm: &CompiledModule<F>, bounds: &DegreeBox) -> Result<Pieces<F>> {
    use rayon::prelude::*;
    let degs: Vec<Degree> = bounds.bidegrees().collect();
    degs.par_iter().map(|d| Ok((*d, cm.piece(*d)?))).collect()
}

fn action_from_compiled<F: Field>(
    cm: &CompiledModule<F>,
    p: &PolyModulePresentation,
    element: &str,
    bounds: &DegreeBox,
    pieces: &Pieces<F>,
) -> Result<ActionTable<F>> {
    let field = &cm.field;
    let (rat, shift) = parse_element(element, &p.variables)?;
    let poly = Poly::from_rational(field, &rat)?;
    let mut module = BoxTable::new(*bounds);
    module.mode = Some("module".into());
    let mut labels = BTreeMap::new();
    for (d, piece) in pieces {
        module.set(*d, piece.quotient.dim());
        if piece.quotient.dim() > 0 {
            labels.insert(*d, piece.quotient.representatives().iter().map(|v| cm.label(piece, v)).collect());
        }
    }
    let mut matrices = BTreeMap::new();
    for (s, src) in pieces {
        let Some(dst) = pieces.get(&(*s + shift)) else { continue };
        if src.quotient.dim() == 0 || dst.quotient.dim() == 0 {
            continue;
        }
        let mut acc: Option<SparseMatrix<F>> = None;
        for (m, c) in &poly.terms {
            let part = cm.quotient_mul(src, dst, m);
            let scaled = SparseMatrix::from_accumulated(
                field.clone(),
                part.rows(),
                part.cols(),
                part.triplets().into_iter().map(|(i, j, v)| (i, j, field.mul(c, &v))).collect::<Vec<_>>(),
            );
            acc = Some(match acc {
                None => scaled,
                Some(a) => add(&a, &scaled),
            });
        }
        if let Some(m) = acc {
            matrices.insert(*s, m);
        }
    }
    ActionTable::new(field.clone(), shift, module, labels, matrices)
}

/// `poly` or `poly@(n,d)`; the degree is required for `0`.
fn parse_element(text: &str, vars: &[GeneratorSpec]) -> Result<(RatPoly, Degree)> {
    let (body, given) = match text.split_once('@') {
        Some((b, d)) => (b, Some(d.trim().parse::<Degree>()?.bidegree())),
        None => (text, None),
    };
    let poly = parse_polynomial(body.trim(), vars)?;
    let mut degs = poly.keys().map(|m| m.degree(vars).bidegree());
    let first = degs.next();
    if degs.any(|d| Some(d) != first) {
        return Err(Error::usage(format!("element `{text}` is not homogeneous")));
    }
    match (first, given) {
        (Some(a), Some(b)) if a != b => Err(Error::usage(format!("element `{text}` has degree {a}, not {b}"))),
        (Some(a), _) | (None, Some(a)) => Ok((poly, a)),
        (None, None) => Err(Error::usage(format!("the zero element `{text}` needs an explicit degree, as in 0@(1,0)"))),
    }
}

fn add<F: Field>(a: &SparseMatrix<F>, b: &SparseMatrix<F>) -> SparseMatrix<F> {
    let t: Vec<_> = a.triplets().chain(b.triplets()).map(|(r, c, v)| (r, c, v.clone())).collect();
    SparseMatrix::from_accumulated(a.field().clone(), a.rows(), a.cols(), t)
}

/// Module box needed so that the iterated quotient by `shifts` is exact on `out`.
fn support_box(out: &DegreeBox, shifts: &[Degree]) -> DegreeBox {
    let pos = |v: i64| v.max(0);
    let neg = |v: i64| v.min(0);
    let n_plus: i64 = shifts.iter().map(|s| pos(s.n)).sum();
    let n_minus: i64 = shifts.iter().map(|s| neg(s.n)).sum();
    let d_plus: i64 = shifts.iter().map(|s| pos(s.d + 1)).sum();
    let d_minus: i64 = shifts.iter().map(|s| neg(s.d + 1)).sum();
    DegreeBox::new(out.n_max - n_minus, out.d_min - 1 - d_plus, out.d_max + 1 - d_minus).with_n_min(out.n_min - n_plus)
}

/// Sub-box of `out` on which every chain group of the iterated quotient,
/// and its neighbours, only uses module degrees inside `module`.
fn exact_region(out: &DegreeBox, module: &DegreeBox, shifts: &[Degree]) -> DegreeBox {
    let need = support_box(&DegreeBox::new(0, 0, 0), shifts);
    // need spans offsets relative to the origin; shift the module box back.
    let mut r = *out;
    r.n_min = r.n_min.max(module.n_min - need.n_min);
    r.n_max = r.n_max.min(module.n_max - need.n_max);
    r.d_min = r.d_min.max(module.d_min - need.d_min);
    r.d_max = r.d_max.min(module.d_max - need.d_max);
    r
}

/// Action tables of several elements on one presented module, tabulated on
/// the box needed for an exact iterated quotient on `out`.
pub fn polymodule_actions<F: Field>(
    field: &F,
    p: &PolyModulePresentation,
    elements: &[&str],
    out: &DegreeBox,
) -> Result<Vec<ActionTable<F>>> {
    out.validate()?;
    let cm = CompiledModule::new(field, p)?;
    let shifts = elements.iter().map(|e| Ok(parse_element(e, &p.variables)?.1)).collect::<Result<Vec<_>>>()?;
    let bx = support_box(out, &shifts);
    let pieces = module_pieces(&cm, &bx)?;
    elements.iter().map(|e| action_from_compiled(&cm, p, e, &bx, &pieces)).collect()
}

/// Homology of the iterated cone `M/(α_1, ..., α_r)` on `out`.
///
/// The actions must commute; each is extended diagonally to the previous
/// quotient, so the result is the Koszul complex of the sequence.
///
/// ```
/// use stabkit::exact::{FieldSpec, PrimeField};
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// use stabkit::stability::{polymodule_actions, smith_toda_table, PolyModulePresentation};
/// let vars = vec![GeneratorSpec::natural("s", Degree::bi(1, 0), 2)];
/// let m = PolyModulePresentation::cyclic(FieldSpec::Prime { p: 2 }, vars, &[]);
/// let out = DegreeBox::new(5, 0, 3);
/// let acts = polymodule_actions(&PrimeField::new(2).unwrap(), &m, &["s", "s"], &out).unwrap();
/// let t = smith_toda_table(&acts, &out).unwrap();
/// assert_eq!(t.dim(Degree::bi(0, 0)), 1);
/// assert_eq!(t.dim(Degree::bi(1, 1)), 1);
/// assert_eq!(t.total(), 2);
/// ```
pub fn smith_toda_table<F: Field>(actions: &[ActionTable<F>], out: &DegreeBox) -> Result<BoxTable> {
    out.validate()?;
    let Some(first) = actions.first() else {
        return Err(Error::usage("no actions to quotient by"));
    };
    let field = first.field.clone();
    let module = &first.module;
    for (i, a) in actions.iter().enumerate() {
        if a.module.bounds != module.bounds || a.module.dims != module.dims {
            return Err(Error::usage(format!("action {i} is tabulated on a different module")));
        }
    }
    check_commuting(actions)?;
    let shifts: Vec<Degree> = actions.iter().map(|a| a.shift).collect();
    let r = actions.len();
    let subsets: Vec<u32> = (0..1u32 << r).collect();
    let offset = |s: u32| -> Degree {
        (0..r).filter(|i| s >> i & 1 == 1).fold(Degree::ZERO, |acc, i| acc + shifts[i] + Degree::bi(0, 1))
    };
    let known = DegreeBox::new(out.n_max, out.d_min - 1, out.d_max + 1).with_n_min(out.n_min);
    let mut cx = ChainComplex::new(field.clone(), known);
    // Spot layout: blocks per subset, in subset order.
    let layout = |y: Degree| -> Vec<(u32, Degree, usize, usize)> {
        let mut start = 0;
        subsets
            .iter()
            .map(|&s| {
                let z = y - offset(s);
                let dim = if module.bounds.contains(z) { module.dim(z) } else { 0 };
                let e = (s, z, start, dim);
                start += dim;
                e
            })
            .collect()
    };
    for y in known.bidegrees() {
        let blocks = layout(y);
        let dim: usize = blocks.iter().map(|b| b.3).sum();
        if dim == 0 {
            continue;
        }
        let mut labels = Vec::with_capacity(dim);
        for (s, z, _, bd) in &blocks {
            let names = (0..r).filter(|i| s >> i & 1 == 1).map(|i| format!("u{}", i + 1)).collect::<Vec<_>>().join("*");
            for k in 0..*bd {
                let base = first.labels.get(z).and_then(|l| l.get(k)).cloned().unwrap_or_else(|| format!("m{k}@{z}"));
                labels.push(if names.is_empty() { base } else { format!("{names}*{base}") });
            }
        }
        cx.add_spot(y, labels, vec![0; dim]);
    }
    for y in known.bidegrees() {
        let src = layout(y);
        let tgt = layout(y + Degree::bi(0, -1));
        let (rows, cols) = (tgt.iter().map(|b| b.3).sum::<usize>(), src.iter().map(|b| b.3).sum::<usize>());
        if rows == 0 || cols == 0 || !known.contains(y + Degree::bi(0, -1)) {
            continue;
        }
        let mut trip = Vec::new();
        for &(s, z, start, bd) in &src {
            if bd == 0 {
                continue;
            }
            for i in (0..r).filter(|i| s >> i & 1 == 1) {
                let rest = s & !(1 << i);
                let sign_odd = (0..i).filter(|j| s >> j & 1 == 1).count() % 2 == 1;
                let &(_, tz, tstart, tdim) = tgt.iter().find(|b| b.0 == rest).expect("every subset has a block");
                debug_assert_eq!(tz, z + shifts[i]);
                if tdim == 0 {
                    continue;
                }
                for (a, b, v) in actions[i].at(z).triplets() {
                    let v = if sign_odd { field.neg(v) } else { v.clone() };
                    trip.push((tstart + a, start + b, v));
                }
            }
        }
        cx.set_differential(y, SparseMatrix::from_accumulated(field.clone(), rows, cols, trip))?;
    }
    cx.check_square_zero()?;
    let mut t = cx.homology_table(*out, false)?;
    t.reliable_subbox = exact_region(out, &module.bounds.meet(&module.reliable_subbox), &shifts);
    t.mode = Some("smith-toda".into());
    Ok(t)
}

fn check_commuting<F: Field>(actions: &[ActionTable<F>]) -> Result<()> {
    let bx = actions[0].module.bounds;
    for i in 0..actions.len() {
        for j in i + 1..actions.len() {
            let (a, b) = (&actions[i], &actions[j]);
            for s in bx.bidegrees() {
                let end = s + a.shift + b.shift;
                if !bx.contains(end) || !bx.contains(s + a.shift) || !bx.contains(s + b.shift) {
                    continue;
                }
                let ab = a.at(s + b.shift).mul(&b.at(s))?;
                let ba = b.at(s + a.shift).mul(&a.at(s))?;
                let diff = add(&ab, &neg(&ba));
                if !diff.is_zero() {
                    return Err(Error::usage(format!("actions {} and {} do not commute at {s}", i + 1, j + 1)));
                }
            }
        }
    }
    Ok(())
}

fn neg<F: Field>(m: &SparseMatrix<F>) -> SparseMatrix<F> {
    let f = m.field().clone();
    let t = m.triplets().into_iter().map(|(i, j, v)| (i, j, f.neg(&v))).collect::<Vec<_>>();
    SparseMatrix::from_accumulated(f, m.rows(), m.cols(), t)
}

/// Box-certified verdict on whether an action is nilpotent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Nilpotence {
    /// Every composite `α^power` with source and target in the box vanishes.
    NilpotentInBox { power: u32, certificate: DegreeBox },
    /// A class whose iterates stay nonzero up to the box edge.
    NonNilpotentWitness { class: String, degree: Degree, iterates: u32, box_limited: bool, certificate: DegreeBox },
    /// No composite fits in the box.
    Inconclusive { certificate: DegreeBox },
}

/// Iterates the action until every composite inside the box vanishes or the
/// box edge is reached.
///
/// ```
/// use stabkit::exact::{FieldSpec, PrimeField};
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// use stabkit::stability::{nilpotence_in_box, ActionTable, Nilpotence, PolyModulePresentation};
/// let vars = vec![GeneratorSpec::natural("s", Degree::bi(1, 0), 3)];
/// let m = PolyModulePresentation::cyclic(FieldSpec::Prime { p: 3 }, vars, &["s^3"]);
/// let b = DegreeBox::new(8, 0, 0);
/// let a = ActionTable::from_module(&PrimeField::new(3).unwrap(), &m, "s", &b).unwrap();
/// assert!(matches!(nilpotence_in_box(&a, &b), Nilpotence::NilpotentInBox { power: 3, .. }));
/// ```
pub fn nilpotence_in_box<F: Field>(action: &ActionTable<F>, bounds: &DegreeBox) -> Nilpotence {
    let bx = bounds.meet(&action.module.bounds);
    let sources: Vec<Degree> = bx.bidegrees().filter(|s| action.module.dim(*s) > 0).collect();
    let label = |s: Degree, k: usize| {
        action.labels.get(&s).and_then(|l| l.get(k)).cloned().unwrap_or_else(|| format!("m{k}@{s}"))
    };
    let witness = |comp: &BTreeMap<Degree, SparseMatrix<F>>, k: u32, box_limited: bool| {
        let (s, m) = comp.iter().find(|(_, m)| !m.is_zero())?;
        let col = m.triplets().next().map(|t| t.1)?;
        Some(Nilpotence::NonNilpotentWitness { class: label(*s, col), degree: *s, iterates: k, box_limited, certificate: bx })
    };
    if action.shift == Degree::ZERO {
        let cap = sources.iter().map(|s| action.module.dim(*s)).max().unwrap_or(0).max(1) as u32;
        let mut comp: BTreeMap<Degree, SparseMatrix<F>> = sources.iter().map(|s| (*s, action.at(*s))).collect();
        for k in 1..=cap {
            if comp.values().all(SparseMatrix::is_zero) {
                return Nilpotence::NilpotentInBox { power: k, certificate: bx };
            }
            if k < cap {
                for (s, m) in comp.iter_mut() {
                    *m = action.at(*s).mul(m).expect("square blocks");
                }
            }
        }
        // A nonzero power beyond the dimension never vanishes.
        return witness(&comp, cap, false).expect("a nonzero composite exists");
    }
    let mut comp: BTreeMap<Degree, SparseMatrix<F>> = BTreeMap::new();
    let mut last: Option<(BTreeMap<Degree, SparseMatrix<F>>, u32)> = None;
    for k in 1u32.. {
        let step = action.shift.scale(k as i64);
        let live: Vec<Degree> = sources.iter().copied().filter(|s| bx.contains(*s + step)).collect();
        if live.is_empty() {
            break;
        }
        let mut next = BTreeMap::new();
        for s in live {
            let here = s + action.shift.scale(k as i64 - 1);
            let m = match comp.get(&s) {
                None => action.at(s),
                Some(prev) => action.at(here).mul(prev).expect("composable"),
            };
            next.insert(s, m);
        }
        comp = next;
        if comp.values().all(SparseMatrix::is_zero) {
            return Nilpotence::NilpotentInBox { power: k, certificate: bx };
        }
        last = Some((comp.clone(), k));
    }
    match last {
        Some((comp, k)) => witness(&comp, k, true).expect("a nonzero composite exists"),
        None => Nilpotence::Inconclusive { certificate: bx },
    }
}
