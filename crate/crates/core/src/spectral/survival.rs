use serde::{Deserialize, Serialize};

use crate::chain::render_vector;
use crate::error::{Error, Result};
use crate::exact::Field;
use crate::graded::{Degree, DegreeBox};
use crate::spectral::filtered::FilteredComplex;
use crate::spectral::pages::page_group;

/// Fate of one class traced through the pages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Survival {
    /// Every differential vanishes through `certified_page`; `infinity`
    /// records that the filtration span makes that page `E^infinity`.
    Permanent { certified_page: usize, infinity: bool },
    /// Supports a nonzero `d^page` into `target`.
    DiesAt { page: usize, target: Degree, image: String },
    /// Becomes zero on `page`, hit by an earlier differential.
    Boundary { page: usize },
}

/// Traces the class of `v` in `E^1_{n,d,f}` through the pages, correcting the
/// representative by witnesses from the page denominators.
///
/// ```
/// use stabkit::chain::CdgaPresentation;
/// use stabkit::exact::{FieldSpec, PrimeField};
/// use stabkit::graded::{Degree, DegreeBox, GeneratorSpec};
/// use stabkit::spectral::{trace_class, FilteredComplex, Survival};
/// let gens = vec![
///     GeneratorSpec::natural("s", Degree::tri(1, 0, -1), 2),
///     GeneratorSpec::natural("u", Degree::tri(1, 1, 0), 2),
/// ];
/// let p = CdgaPresentation::new(FieldSpec::Prime { p: 2 }, gens, &[("u", "s")]).unwrap();
/// let f2 = PrimeField::new(2).unwrap();
/// let fc = FilteredComplex::from_cdga(&p, &f2, &DegreeBox::up_to(2), 1000).unwrap();
/// let s = trace_class(&fc, Degree::tri(1, 1, 0), &[1], 4).unwrap();
/// assert!(matches!(s, Survival::DiesAt { page: 1, .. }));
/// ```
pub fn trace_class<F: Field>(fc: &FilteredComplex<F>, at: Degree, v: &[F::Elem], r_max: usize) -> Result<Survival> {
    let f = at.f.ok_or_else(|| Error::usage(format!("class degree {at} needs a filtration")))?;
    let local = fc.local(at);
    if v.len() != local.dim() {
        return Err(Error::Shape(format!("class vector has length {}, spot {at} has dimension {}", v.len(), local.dim())));
    }
    if !local.in_fil(v, f) {
        return Err(Error::usage(format!("vector does not lie in filtration {f}")));
    }
    let field = fc.field().clone();
    let below = local.below();
    let last = r_max.min(fc.span() + 1).max(1);
    let mut rep = v.to_vec();
    for r in 1..=last {
        let src = page_group(&local, f, r)?;
        match src.group.coordinates(&rep) {
            None if r == 1 => return Err(Error::usage(format!("vector is not a cycle of the associated graded at {at}"))),
            None => return Err(Error::NotAComplex(format!("corrected representative left Z^{r}"))),
            Some(c) if c.iter().all(|x| field.is_zero(x)) => return Ok(Survival::Boundary { page: r }),
            Some(_) => {}
        }
        let image = local.apply(&rep);
        if image.iter().all(|x| field.is_zero(x)) {
            continue;
        }
        let tf = f - r as i64;
        let tgt = page_group(&below, tf, r)?;
        let (coords, den) = tgt
            .group
            .decompose(&image)
            .ok_or_else(|| Error::NotAComplex(format!("d of a page-{r} representative leaves the target cycles")))?;
        if coords.iter().any(|x| !field.is_zero(x)) {
            return Ok(Survival::DiesAt {
                page: r,
                target: below.deg.with_f(tf),
                image: render_vector(&field, &image, fc.complex().labels(below.deg)),
            });
        }
        // image = lower part + d(sum c_j y_j); subtract the y part.
        for (i, c) in den {
            if i >= tgt.lower {
                let y = &tgt.preimages[i - tgt.lower];
                for (a, b) in rep.iter_mut().zip(y) {
                    *a = field.sub(a, &field.mul(&c, b));
                }
            }
        }
    }
    Ok(Survival::Permanent { certified_page: last, infinity: last > fc.span() })
}

/// Outcome of the power criterion for a central class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSurvival {
    pub class: Degree,
    pub p: u64,
    /// Least `M` with every differential target of the `p^M`-th power zero.
    pub min_power: Option<u32>,
    /// Nonzero target (or out-of-box degree) blocking the last power tried.
    pub obstruction: Option<Degree>,
    pub certified_page: usize,
}

/// Least `M` such that all `E^r` targets at `(p^M N, p^M D - 1, p^M F - r)`
/// vanish for `r` up to the filtration span, searching `M <= max_power`.
pub fn survival_analysis<F: Field>(
    fc: &FilteredComplex<F>,
    bounds: &DegreeBox,
    class: Degree,
    p: u64,
    max_power: u32,
) -> Result<PowerSurvival> {
    let f = class.f.ok_or_else(|| Error::usage(format!("class degree {class} needs a filtration")))?;
    if !bounds.contains(class.bidegree()) {
        return Err(Error::usage(format!("class {class} lies outside the box {bounds}")));
    }
    let span = fc.span();
    let mut out = PowerSurvival { class, p, min_power: None, obstruction: None, certified_page: span + 1 };
    for m in 0..=max_power {
        let scale = (p as i64).pow(m);
        let deg = Degree::tri(scale * class.n, scale * class.d, scale * f);
        if !bounds.contains(deg.bidegree()) {
            out.obstruction = Some(deg);
            return Ok(out);
        }
        let below = fc.local(deg + Degree::bi(0, -1));
        let mut blocked = None;
        for r in 1..=span.max(1) {
            let tf = scale * f - r as i64;
            if !below.filt().contains(&tf) {
                continue;
            }
            if page_group(&below, tf, r)?.group.dim() > 0 {
                blocked = Some(below.deg.with_f(tf));
                break;
            }
        }
        match blocked {
            None => {
                out.min_power = Some(m);
                return Ok(out);
            }
            Some(t) => out.obstruction = Some(t),
        }
    }
    Ok(out)
}
