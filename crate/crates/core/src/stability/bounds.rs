use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{quantized_slope, Degree, SlopeQ};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopfQuotientCase {
    Surjective,
    Injective,
}

/// Parameters of the closed-form range bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundParams {
    /// `κ + Σ (λ n_i - d_i - 1)`, and with `lambda_prime` also
    /// `κ λ'/λ + Σ (λ' n_i - d_i - 1)`.
    LocalizationConnectivity {
        lambda: SlopeQ,
        kappa: SlopeQ,
        alphas: Vec<Degree>,
        #[serde(default)]
        lambda_prime: Option<SlopeQ>,
    },
    /// `κ' + min over proper subsets S of Σ_{s ∉ S} (λ' n_s - d_s - 1)`.
    AdamsB { lambda_prime: SlopeQ, kappa_prime: SlopeQ, alphas: Vec<Degree> },
    /// `(N-1)/N` for a surjection, `(N-2)/N` for an injection.
    QuotientTheta { case: HopfQuotientCase, n: i64 },
    Quantize { lambda: SlopeQ },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub kind: String,
    pub value: SlopeQ,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<SlopeQ>,
    pub formula: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn excess(lambda: SlopeQ, a: &Degree) -> SlopeQ {
    lambda.mul_int(a.n).sub(SlopeQ::integer(a.d + 1))
}

/// Evaluates one bound exactly.
///
/// ```
/// use stabkit::graded::{Degree, SlopeQ};
/// use stabkit::stability::{range_bounds, BoundParams, HopfQuotientCase};
/// let q = |a, b| SlopeQ::new(a, b).unwrap();
/// let c = range_bounds(&BoundParams::LocalizationConnectivity {
///     lambda: q(2, 3),
///     kappa: q(0, 1),
///     alphas: vec![Degree::bi(1, 0)],
///     lambda_prime: None,
/// })
/// .unwrap();
/// assert_eq!(c.value, q(-1, 3));
/// let t = range_bounds(&BoundParams::QuotientTheta { case: HopfQuotientCase::Surjective, n: 5 }).unwrap();
/// assert_eq!(t.value, q(4, 5));
/// ```
pub fn range_bounds(params: &BoundParams) -> Result<BoundResult> {
    match params {
        BoundParams::LocalizationConnectivity { lambda, kappa, alphas, lambda_prime } => {
            let sum = |l: SlopeQ| alphas.iter().fold(SlopeQ::integer(0), |acc, a| acc.add(excess(l, a)));
            let value = kappa.add(sum(*lambda));
            let variant = match lambda_prime {
                Some(lp) => Some(kappa.mul(*lp).div(*lambda)?.add(sum(*lp))),
                None => None,
            };
            Ok(BoundResult {
                kind: "localization_connectivity".into(),
                value,
                variant,
                formula: "kappa + sum(lambda*n_i - d_i - 1)".into(),
                notes: Vec::new(),
            })
        }
        BoundParams::AdamsB { lambda_prime, kappa_prime, alphas } => {
            let terms: Vec<SlopeQ> = alphas.iter().map(|a| excess(*lambda_prime, a)).collect();
            let k = terms.len();
            let mut notes = Vec::new();
            // Complements of proper subsets are the nonempty subsets.
            let best = (1..=k)
                .flat_map(|size| terms.iter().copied().combinations(size))
                .map(|c| c.into_iter().fold(SlopeQ::integer(0), SlopeQ::add))
                .min();
            let value = match best {
                Some(m) => kappa_prime.add(m),
                None => {
                    notes.push("no alphas: the minimum is empty and b = kappa'".into());
                    *kappa_prime
                }
            };
            Ok(BoundResult {
                kind: "adams_b".into(),
                value,
                variant: None,
                formula: "kappa' + min over proper subsets S of sum_{s not in S}(lambda'*n_s - d_s - 1)".into(),
                notes,
            })
        }
        BoundParams::QuotientTheta { case, n } => {
            let (num, least) = match case {
                HopfQuotientCase::Surjective => (n - 1, 1),
                HopfQuotientCase::Injective => (n - 2, 2),
            };
            if *n < least {
                return Err(Error::usage(format!("quotient_theta needs N >= {least}, got {n}")));
            }
            Ok(BoundResult {
                kind: "quotient_theta".into(),
                value: SlopeQ::new(num, *n)?,
                variant: None,
                formula: match case {
                    HopfQuotientCase::Surjective => "(N-1)/N".into(),
                    HopfQuotientCase::Injective => "(N-2)/N".into(),
                },
                notes: Vec::new(),
            })
        }
        BoundParams::Quantize { lambda } => Ok(BoundResult {
            kind: "quantize".into(),
            value: quantized_slope(*lambda)?,
            variant: None,
            formula: "least k/(k+1) >= lambda".into(),
            notes: Vec::new(),
        }),
    }
}
