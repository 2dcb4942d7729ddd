use rayon::prelude::*;

use crate::chain::BoxTable;
use crate::error::{Error, Result};
use crate::exact::{rank, Field, SparseMatrix, Subquotient};
use crate::graded::{Degree, DegreeBox, Monomial};
use crate::stability::polymodule::{var_power, CompiledModule, PolyModulePresentation};

/// Consecutive steps over which a colimit must be constant to count as stable.
pub const STABILIZATION_WINDOW: u32 = 3;

fn variable(cm: &CompiledModule<impl Field>, p: &PolyModulePresentation, name: &str) -> Result<usize> {
    let i = p.variable_index(name).ok_or_else(|| Error::usage(format!("`{name}` is not a module variable")))?;
    debug_assert!(i < cm.nvars());
    Ok(i)
}

/// Steps along `step` from `y` until past every generator and relation.
fn first_step(cm: &CompiledModule<impl Field>, y: Degree, step_n: i64) -> u32 {
    let gap = cm.max_generator_n() - y.n;
    (if gap > 0 { (gap + step_n - 1) / step_n } else { 0 }) as u32 + 1
}

fn torsion_steps(cm: &CompiledModule<impl Field>, step_n: i64) -> u32 {
    let span = (cm.max_generator_n() - cm.min_generator_n()).max(0);
    STABILIZATION_WINDOW + ((span + step_n - 1) / step_n) as u32
}

fn stable_value(values: &[usize], what: impl FnOnce() -> String) -> Result<usize> {
    if values.windows(2).all(|w| w[0] == w[1]) {
        Ok(values[0])
    } else {
        Err(Error::NonTabulable(format!(
            "{} does not stabilize (ranks {values:?}); it is likely infinite-dimensional, try cech_localize with more variables",
            what()
        )))
    }
}

/// Dimensions of `σ^{-1}M` as the colimit of `M -σ-> M -σ-> ...`.
///
/// ```
/// use stabkit::exact::FieldSpec;
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// use stabkit::stability::{telescope_localize, PolyModulePresentation};
/// let vars = vec![GeneratorSpec::natural("s", Degree::bi(1, 0), 2)];
/// let m = PolyModulePresentation::cyclic(FieldSpec::Prime { p: 2 }, vars, &[]);
/// let t = telescope_localize(&m, "s", &DegreeBox::new(4, 0, 0).with_n_min(-4)).unwrap();
/// assert_eq!(t.row(0), vec![1; 9]);
/// ```
pub fn telescope_localize(p: &PolyModulePresentation, sigma: &str, bounds: &DegreeBox) -> Result<BoxTable> {
    bounds.validate()?;
    crate::with_field!(p.field, |f| {
        let cm = CompiledModule::new(&f, p)?;
        let i = variable(&cm, p, sigma)?;
        let step = cm.variables[i].degree.bidegree();
        let t_steps = torsion_steps(&cm, step.n);
        let degs: Vec<Degree> = bounds.bidegrees().collect();
        let dims = degs
            .par_iter()
            .map(|y| {
                let k0 = first_step(&cm, *y, step.n);
                let values = (k0..=k0 + STABILIZATION_WINDOW)
                    .map(|k| {
                        let src = cm.piece(*y + step.scale(k as i64))?;
                        let dst = cm.piece(*y + step.scale((k + t_steps) as i64))?;
                        Ok(rank(&cm.quotient_mul(&src, &dst, &var_power(cm.nvars(), i, t_steps))))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                Ok((*y, stable_value(&values, || format!("{sigma}^-1 M at {y}"))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = BoxTable::from_dims(*bounds, dims);
        t.mode = Some("telescope".into());
        Ok(t)
    })
}

/// One cochain group of the Koszul complex on `σ^t` at degree `z`:
/// blocks `M_(z + t σ_S)` over subsets `S` of size `s`.
struct Cochains<F: Field> {
    subsets: Vec<u32>,
    pieces: Vec<crate::stability::polymodule::Piece<F>>,
    offsets: Vec<usize>,
    dim: usize,
}

struct Koszul<'a, F: Field> {
    cm: &'a CompiledModule<F>,
    vars: Vec<usize>,
    z: Degree,
}

impl<F: Field> Koszul<'_, F> {
    fn shift(&self, s: u32, t: u32) -> Degree {
        self.vars
            .iter()
            .enumerate()
            .filter(|(b, _)| s >> b & 1 == 1)
            .fold(Degree::ZERO, |acc, (_, &v)| acc + self.cm.variables[v].degree.bidegree().scale(t as i64))
    }

    fn power(&self, s: u32, e: u32) -> Monomial {
        let mut m = Monomial::one(self.cm.nvars());
        for (b, &v) in self.vars.iter().enumerate() {
            if s >> b & 1 == 1 {
                m.exps[v] += e;
            }
        }
        m
    }

    fn cochains(&self, size: usize, t: u32) -> Result<Cochains<F>> {
        let k = self.vars.len();
        let subsets: Vec<u32> = (0..1u32 << k).filter(|s| s.count_ones() as usize == size).collect();
        let pieces = subsets.iter().map(|&s| self.cm.piece(self.z + self.shift(s, t))).collect::<Result<Vec<_>>>()?;
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut dim = 0;
        for p in &pieces {
            offsets.push(dim);
            dim += p.quotient.dim();
        }
        Ok(Cochains { subsets, pieces, offsets, dim })
    }

    /// `K^s -> K^(s+1)`, sending block `S` to `S ∪ {j}` by `± σ_j^t`.
    fn differential(&self, a: &Cochains<F>, b: &Cochains<F>, t: u32) -> SparseMatrix<F> {
        let f = &self.cm.field;
        let mut trip = Vec::new();
        for (ia, &s) in a.subsets.iter().enumerate() {
            for j in 0..self.vars.len() {
                if s >> j & 1 == 1 {
                    continue;
                }
                let target = s | 1 << j;
                let ib = b.subsets.iter().position(|&x| x == target).expect("subset present");
                let odd = (0..j).filter(|i| s >> i & 1 == 1).count() % 2 == 1;
                let m = self.cm.quotient_mul(&a.pieces[ia], &b.pieces[ib], &var_power(self.cm.nvars(), self.vars[j], t));
                for (r, c, v) in m.triplets() {
                    trip.push((b.offsets[ib] + r, a.offsets[ia] + c, if odd { f.neg(v) } else { v.clone() }));
                }
            }
        }
        SparseMatrix::from_accumulated(f.clone(), b.dim, a.dim, trip)
    }

    fn cohomology(&self, i: usize, t: u32) -> Result<(Cochains<F>, Subquotient<F>)> {
        let mid = self.cochains(i, t)?;
        let k = self.vars.len();
        let d_out = if i < k {
            let next = self.cochains(i + 1, t)?;
            self.differential(&mid, &next, t)
        } else {
            SparseMatrix::zero(self.cm.field.clone(), 0, mid.dim)
        };
        let d_in = if i > 0 {
            let prev = self.cochains(i - 1, t)?;
            self.differential(&prev, &mid, t)
        } else {
            SparseMatrix::zero(self.cm.field.clone(), mid.dim, 0)
        };
        let h = Subquotient::from_complex(&d_out, &d_in)?;
        Ok((mid, h))
    }

    /// Rank of `H^i(K(σ^t)) -> H^i(K(σ^u))`.
    fn transition_rank(&self, i: usize, t: u32, u: u32) -> Result<usize> {
        let (a, ha) = self.cohomology(i, t)?;
        let (b, hb) = self.cohomology(i, u)?;
        if ha.dim() == 0 || hb.dim() == 0 {
            return Ok(0);
        }
        let f = &self.cm.field;
        let cols = ha
            .representatives()
            .iter()
            .map(|v| {
                let mut w = vec![f.zero(); b.dim];
                for (blk, &s) in a.subsets.iter().enumerate() {
                    let piece = &a.pieces[blk];
                    let part = &v[a.offsets[blk]..a.offsets[blk] + piece.quotient.dim()];
                    let m = self.cm.quotient_mul(piece, &b.pieces[blk], &self.power(s, u - t));
                    for (r, x) in m.mul_vec(part).into_iter().enumerate() {
                        w[b.offsets[blk] + r] = f.add(&w[b.offsets[blk] + r], &x);
                    }
                }
                hb.coordinates(&w).ok_or_else(|| Error::NotAComplex("transition map leaves the cycles".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(rank(&SparseMatrix::from_columns(f.clone(), hb.dim(), &cols)))
    }

    /// `H^i_I(M)_z` as a colimit over powers.
    fn local_cohomology(&self, i: usize) -> Result<usize> {
        let step_n = self.vars.iter().map(|&v| self.cm.variables[v].degree.n).min().unwrap_or(1).max(1);
        let t0 = first_step(self.cm, self.z, step_n);
        let gap = torsion_steps(self.cm, step_n);
        let values = (t0..=t0 + STABILIZATION_WINDOW)
            .map(|t| self.transition_rank(i, t, t + gap))
            .collect::<Result<Vec<_>>>()?;
        stable_value(&values, || format!("local cohomology H^{i} at {}", self.z))
    }
}

/// Homotopy of the punctured Čech cube `L = lim_{∅ ≠ S} M[σ_S^{-1}]` on a box,
/// computed from local cohomology: `π_{n,d}(L)` collects `M/Γ_I M` and
/// `H^1_I M` in degree `(n,d)` and `H^{c+1}_I M` from `(n, d+c)`.
///
/// ```
/// use stabkit::exact::FieldSpec;
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// use stabkit::stability::{cech_localize, PolyModulePresentation};
/// let vars = vec![
///     GeneratorSpec::natural("r", Degree::bi(1, 0), 2),
///     GeneratorSpec::natural("b", Degree::bi(1, 0), 2),
/// ];
/// let m = PolyModulePresentation::cyclic(FieldSpec::Prime { p: 2 }, vars, &[]);
/// let t = cech_localize(&m, &["r", "b"], &DegreeBox::new(3, -1, 0).with_n_min(-3)).unwrap();
/// assert_eq!(t.dim(Degree::bi(2, 0)), 3);
/// assert_eq!(t.dim(Degree::bi(-3, -1)), 2);
/// ```
pub fn cech_localize(p: &PolyModulePresentation, ideal: &[&str], bounds: &DegreeBox) -> Result<BoxTable> {
    bounds.validate()?;
    if ideal.is_empty() {
        return Err(Error::usage("the ideal needs at least one generator"));
    }
    crate::with_field!(p.field, |f| {
        let cm = CompiledModule::new(&f, p)?;
        let mut vars = ideal.iter().map(|name| variable(&cm, p, name)).collect::<Result<Vec<_>>>()?;
        vars.sort_unstable();
        vars.dedup();
        let k = vars.len();
        let degs: Vec<Degree> = bounds.bidegrees().collect();
        let dims = degs
            .par_iter()
            .map(|y| {
                let at = |z: Degree, i: usize| Koszul { cm: &cm, vars: vars.clone(), z }.local_cohomology(i);
                let module = cm.piece(*y)?.quotient.dim();
                let mut total = module - at(*y, 0)? + if k >= 1 { at(*y, 1)? } else { 0 };
                for c in 1..k {
                    total += at(*y + Degree::bi(0, c as i64), c + 1)?;
                }
                Ok((*y, total))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = BoxTable::from_dims(*bounds, dims);
        t.mode = Some("cech".into());
        Ok(t)
    })
}
