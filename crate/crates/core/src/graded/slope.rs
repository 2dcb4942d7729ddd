use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graded::Degree;

/// An exact reduced rational `num/den` with `den > 0`. Serializes as `"p/q"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlopeQ {
    num: i64,
    den: i64,
}

impl SlopeQ {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::usage("slope with zero denominator"));
        }
        let g = num.gcd(&den);
        let s = if den < 0 { -1 } else { 1 };
        Ok(SlopeQ { num: s * num / g, den: s * den / g })
    }

    pub fn integer(v: i64) -> Self {
        SlopeQ { num: v, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }
    pub fn den(&self) -> i64 {
        self.den
    }

    /// `k / (k + 1)`.
    pub fn quantum(k: u64) -> Self {
        SlopeQ::new(k as i64, k as i64 + 1).expect("nonzero denominator")
    }

    pub fn add(self, o: SlopeQ) -> SlopeQ {
        SlopeQ::new(self.num * o.den + o.num * self.den, self.den * o.den).expect("nonzero")
    }

    pub fn sub(self, o: SlopeQ) -> SlopeQ {
        self.add(SlopeQ { num: -o.num, den: o.den })
    }

    pub fn mul(self, o: SlopeQ) -> SlopeQ {
        SlopeQ::new(self.num * o.num, self.den * o.den).expect("nonzero")
    }

    pub fn div(self, o: SlopeQ) -> Result<SlopeQ> {
        SlopeQ::new(self.num * o.den, self.den * o.num)
    }

    pub fn mul_int(self, k: i64) -> SlopeQ {
        self.mul(SlopeQ::integer(k))
    }

    /// Largest integer not exceeding the value.
    pub fn floor(self) -> i64 {
        Integer::div_floor(&self.num, &self.den)
    }

    pub fn ceil(self) -> i64 {
        -Integer::div_floor(&-self.num, &self.den)
    }

    /// `d / n` of a degree, defined when `n != 0`.
    pub fn of_degree(deg: Degree) -> Result<SlopeQ> {
        if deg.n == 0 {
            return Err(Error::usage(format!("slope of {deg} is undefined")));
        }
        SlopeQ::new(deg.d, deg.n)
    }
}

impl Ord for SlopeQ {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl PartialOrd for SlopeQ {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for SlopeQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for SlopeQ {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |e: String| Error::Parse(format!("slope `{s}`: {e}"));
        match s.trim().split_once('/') {
            Some((a, b)) => SlopeQ::new(
                a.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                b.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            ),
            None => Ok(SlopeQ::integer(s.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?)),
        }
    }
}

impl Serialize for SlopeQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlopeQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Orders degrees lexicographically by `(d/n, f/d)`.
///
/// When both degrees have `d = 0` the second key is undefined and the
/// filtrations are compared directly.
///
/// ```
/// use std::cmp::Ordering;
/// use stabkit::graded::{compare_x_order, Degree};
/// let a = Degree::tri(2, 1, -2);
/// let b = Degree::tri(2, 1, -1);
/// assert_eq!(compare_x_order(a, b).unwrap(), Ordering::Less);
/// ```
pub fn compare_x_order(a: Degree, b: Degree) -> Result<Ordering> {
    for x in [a, b] {
        if x.n <= 0 || x.f.is_none() {
            return Err(Error::usage(format!("x-order needs n > 0 and a filtration, got {x}")));
        }
    }
    let first = SlopeQ::new(a.d, a.n)?.cmp(&SlopeQ::new(b.d, b.n)?);
    if first != Ordering::Equal {
        return Ok(first);
    }
    let (fa, fb) = (a.f.unwrap(), b.f.unwrap());
    if a.d == 0 {
        // Equal first slopes force b.d == 0 too.
        return Ok(fa.cmp(&fb));
    }
    Ok(SlopeQ::new(fa, a.d)?.cmp(&SlopeQ::new(fb, b.d)?))
}

/// Least `k/(k+1)` that is at least `lambda`, for `0 <= lambda < 1`.
///
/// ```
/// use stabkit::graded::{quantized_slope, SlopeQ};
/// let q = quantized_slope(SlopeQ::new(3, 5).unwrap()).unwrap();
/// assert_eq!(q.to_string(), "2/3");
/// ```
pub fn quantized_slope(lambda: SlopeQ) -> Result<SlopeQ> {
    if lambda >= SlopeQ::integer(1) {
        return Err(Error::usage(format!("no quantization below slope 1 for {lambda}")));
    }
    if lambda < SlopeQ::integer(0) {
        return Err(Error::usage(format!("quantization needs a nonnegative slope, got {lambda}")));
    }
    // k/(k+1) >= a/b  <=>  k >= a/(b-a)
    let k = SlopeQ::new(lambda.num, lambda.den - lambda.num)?.ceil();
    Ok(SlopeQ::quantum(k as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> SlopeQ {
        SlopeQ::new(a, b).unwrap()
    }

    #[test]
    fn normalization_and_order() {
        assert_eq!(q(2, -4), q(-1, 2));
        assert_eq!(q(-1, 2).to_string(), "-1/2");
        assert!(q(1, 3) < q(1, 2));
        assert_eq!("3/4".parse::<SlopeQ>().unwrap(), q(6, 8));
        assert_eq!(q(-7, 2).floor(), -4);
        assert_eq!(q(-7, 2).ceil(), -3);
        assert_eq!(q(7, 2).floor(), 3);
    }

    #[test]
    fn quantization_examples() {
        assert_eq!(quantized_slope(q(3, 5)).unwrap(), q(2, 3));
        assert_eq!(quantized_slope(q(1, 2)).unwrap(), q(1, 2));
        assert_eq!(quantized_slope(q(7, 10)).unwrap(), q(3, 4));
        assert_eq!(quantized_slope(q(0, 1)).unwrap(), q(0, 1));
        assert!(quantized_slope(q(1, 1)).is_err());
    }

    #[test]
    fn x_order_examples() {
        use Ordering::*;
        assert_eq!(compare_x_order(Degree::tri(1, 0, -1), Degree::tri(2, 1, -1)).unwrap(), Less);
        assert_eq!(compare_x_order(Degree::tri(3, 2, -3), Degree::tri(6, 4, -6)).unwrap(), Equal);
        assert!(compare_x_order(Degree::bi(1, 0), Degree::tri(1, 0, 0)).is_err());
        assert!(compare_x_order(Degree::tri(0, 1, 0), Degree::tri(1, 0, 0)).is_err());
    }
}
