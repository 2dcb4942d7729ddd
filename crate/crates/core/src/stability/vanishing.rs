use serde::{Deserialize, Serialize};

use crate::chain::BoxTable;
use crate::graded::{Degree, DegreeBox, SlopeQ};

/// Lowest intercept accepted by [`fit_vanishing_line`].
pub const DEFAULT_KAPPA_FLOOR: i64 = -1;

/// `π_{n,d} = 0` for `d < λn + κ` inside `certified_box`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingLine {
    #[serde(rename = "lambda")]
    pub slope: SlopeQ,
    pub kappa: i64,
    #[serde(rename = "box")]
    pub certified_box: DegreeBox,
    /// The next steeper candidate that failed, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocked_slope: Option<SlopeQ>,
    /// A nonzero degree forcing that candidate's intercept below the floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Degree>,
}

impl VanishingLine {
    /// Whether `(n, d)` lies strictly below the line.
    pub fn below(&self, deg: Degree) -> bool {
        SlopeQ::integer(deg.d) < self.slope.mul_int(deg.n).add(SlopeQ::integer(self.kappa))
    }
}

/// `k/(k+1)` for `k = 0..=k_max`.
pub fn quantum_candidates(k_max: u64) -> Vec<SlopeQ> {
    (0..=k_max).map(SlopeQ::quantum).collect()
}

/// Largest `κ` with `d >= λn + κ` at every listed degree, and a degree
/// attaining it (smallest `n` among ties).
fn max_kappa(slope: SlopeQ, nonzero: &[Degree]) -> Option<(i64, Degree)> {
    nonzero
        .iter()
        .map(|g| (SlopeQ::integer(g.d).sub(slope.mul_int(g.n)).floor(), *g))
        .min_by_key(|(k, g)| (*k, g.n, g.d))
}

/// Steepest candidate slope with the largest intercept `κ >= DEFAULT_KAPPA_FLOOR`
/// such that every nonzero entry of the reliable part of `t` satisfies
/// `d >= λn + κ`.
///
/// ```
/// use stabkit::chain::BoxTable;
/// use stabkit::graded::{Degree, DegreeBox, SlopeQ};
/// use stabkit::stability::{fit_vanishing_line, quantum_candidates};
/// let t = BoxTable::from_dims(DegreeBox::new(8, 0, 8), [(Degree::bi(0, 0), 1), (Degree::bi(4, 2), 2), (Degree::bi(8, 4), 1)]);
/// let line = fit_vanishing_line(&t, &quantum_candidates(4)).unwrap();
/// assert_eq!((line.slope, line.kappa), (SlopeQ::new(1, 2).unwrap(), 0));
/// ```
pub fn fit_vanishing_line(t: &BoxTable, candidates: &[SlopeQ]) -> Option<VanishingLine> {
    fit_vanishing_line_with_floor(t, candidates, DEFAULT_KAPPA_FLOOR)
}

pub fn fit_vanishing_line_with_floor(t: &BoxTable, candidates: &[SlopeQ], kappa_floor: i64) -> Option<VanishingLine> {
    let certified = t.reliable_subbox.meet(&t.bounds);
    let nonzero: Vec<Degree> = t.nonzero().map(|(g, _)| g).filter(|g| certified.contains(*g)).collect();
    let mut slopes = candidates.to_vec();
    slopes.sort_by(|a, b| b.cmp(a));
    slopes.dedup();
    let mut blocked: Option<(SlopeQ, Degree)> = None;
    for slope in slopes {
        match max_kappa(slope, &nonzero) {
            None => {
                // Empty table: the line may sit above the whole box.
                let top = SlopeQ::integer(certified.d_max).sub(slope.mul_int(certified.n_min)).floor() + 1;
                let top = top.max(SlopeQ::integer(certified.d_max).sub(slope.mul_int(certified.n_max)).floor() + 1);
                return Some(VanishingLine { slope, kappa: top, certified_box: certified, blocked_slope: None, witness: None });
            }
            Some((kappa, _)) if kappa >= kappa_floor => {
                return Some(VanishingLine {
                    slope,
                    kappa,
                    certified_box: certified,
                    blocked_slope: blocked.map(|b| b.0),
                    witness: blocked.map(|b| b.1),
                });
            }
            Some((_, witness)) => blocked = Some((slope, witness)),
        }
    }
    None
}
