use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A grading `n`, homological degree `d` and optional filtration `f`.
///
/// Displays and serializes as `"(n,d)"` or `"(n,d,f)"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree {
    pub n: i64,
    pub d: i64,
    pub f: Option<i64>,
}

impl Degree {
    pub const ZERO: Degree = Degree { n: 0, d: 0, f: None };

    pub const fn bi(n: i64, d: i64) -> Self {
        Degree { n, d, f: None }
    }

    pub const fn tri(n: i64, d: i64, f: i64) -> Self {
        Degree { n, d, f: Some(f) }
    }

    /// The same degree with the filtration dropped.
    pub fn bidegree(self) -> Degree {
        Degree::bi(self.n, self.d)
    }

    pub fn with_f(self, f: i64) -> Degree {
        Degree::tri(self.n, self.d, f)
    }

    pub fn filtration(self) -> i64 {
        self.f.unwrap_or(0)
    }

    /// Multiplies every component by `k`.
    pub fn scale(self, k: i64) -> Degree {
        Degree { n: self.n * k, d: self.d * k, f: self.f.map(|f| f * k) }
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, o: Degree) -> Degree {
        let f = match (self.f, o.f) {
            (Some(a), Some(b)) => Some(a + b),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        };
        Degree { n: self.n + o.n, d: self.d + o.d, f }
    }
}

impl Neg for Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree { n: -self.n, d: -self.d, f: self.f.map(|f| -f) }
    }
}

impl Sub for Degree {
    type Output = Degree;
    fn sub(self, o: Degree) -> Degree {
        self + (-o)
    }
}

impl Mul<Degree> for i64 {
    type Output = Degree;
    fn mul(self, d: Degree) -> Degree {
        d.scale(self)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            Some(fl) => write!(f, "({},{},{})", self.n, self.d, fl),
            None => write!(f, "({},{})", self.n, self.d),
        }
    }
}

impl FromStr for Degree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("degree `{s}` must look like (n,d) or (n,d,f)")))?;
        let parts: Vec<i64> = inner
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("degree `{s}`: {e}")))?;
        match parts[..] {
            [n, d] => Ok(Degree::bi(n, d)),
            [n, d, f] => Ok(Degree::tri(n, d, f)),
            _ => Err(Error::Parse(format!("degree `{s}` needs two or three components"))),
        }
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite rectangular window of degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeBox {
    pub n_min: i64,
    pub n_max: i64,
    pub d_min: i64,
    pub d_max: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_min: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_max: Option<i64>,
}

impl DegreeBox {
    /// `0 <= n <= n_max` and `d_min <= d <= d_max`.
    pub fn new(n_max: i64, d_min: i64, d_max: i64) -> Self {
        DegreeBox { n_min: 0, n_max, d_min, d_max, f_min: None, f_max: None }
    }

    /// The default window for a grading bound: `0 <= n <= n_max`, `-n_max <= d <= n_max`.
    pub fn up_to(n_max: i64) -> Self {
        DegreeBox::new(n_max, -n_max, n_max)
    }

    pub fn with_n_min(mut self, n_min: i64) -> Self {
        self.n_min = n_min;
        self
    }

    pub fn with_d(mut self, d_min: i64, d_max: i64) -> Self {
        self.d_min = d_min;
        self.d_max = d_max;
        self
    }

    pub fn with_f(mut self, f_min: i64, f_max: i64) -> Self {
        self.f_min = Some(f_min);
        self.f_max = Some(f_max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max {
            return Err(Error::usage(format!("box has n_min {} > n_max {}", self.n_min, self.n_max)));
        }
        if self.d_min > self.d_max {
            return Err(Error::usage(format!("box has d_min {} > d_max {}", self.d_min, self.d_max)));
        }
        if let (Some(a), Some(b)) = (self.f_min, self.f_max) {
            if a > b {
                return Err(Error::usage(format!("box has f_min {a} > f_max {b}")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, deg: Degree) -> bool {
        let f_ok = match deg.f {
            Some(f) => self.f_min.map_or(true, |lo| f >= lo) && self.f_max.map_or(true, |hi| f <= hi),
            None => true,
        };
        (self.n_min..=self.n_max).contains(&deg.n) && (self.d_min..=self.d_max).contains(&deg.d) && f_ok
    }

    /// All bidegrees in the box, ordered by `(n, d)`.
    pub fn bidegrees(&self) -> impl Iterator<Item = Degree> + '_ {
        (self.n_min..=self.n_max).flat_map(move |n| (self.d_min..=self.d_max).map(move |d| Degree::bi(n, d)))
    }

    /// Intersection of two boxes.
    pub fn meet(&self, other: &DegreeBox) -> DegreeBox {
        let lo = |a: Option<i64>, b: Option<i64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        let hi = |a: Option<i64>, b: Option<i64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        DegreeBox {
            n_min: self.n_min.max(other.n_min),
            n_max: self.n_max.min(other.n_max),
            d_min: self.d_min.max(other.d_min),
            d_max: self.d_max.min(other.d_max),
            f_min: lo(self.f_min, other.f_min),
            f_max: hi(self.f_max, other.f_max),
        }
    }

    /// Parses the command-line form `n=N[,nmin=..,dmin=..,dmax=..,f=lo..hi]`.
    ///
    /// ```
    /// use stabkit::graded::DegreeBox;
    /// let b = DegreeBox::parse_spec("n=9,dmin=0,dmax=6").unwrap();
    /// assert_eq!((b.n_max, b.d_min, b.d_max), (9, 0, 6));
    /// ```
    pub fn parse_spec(spec: &str) -> Result<DegreeBox> {
        let mut n_max = None;
        let (mut n_min, mut d_min, mut d_max, mut f) = (None, None, None, None);
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("box entry `{part}` is not key=value")))?;
            let int = |v: &str| v.trim().parse::<i64>().map_err(|e| Error::Parse(format!("box entry `{part}`: {e}")));
            match key.trim() {
                "n" => n_max = Some(int(value)?),
                "nmin" => n_min = Some(int(value)?),
                "dmin" => d_min = Some(int(value)?),
                "dmax" => d_max = Some(int(value)?),
                "f" => {
                    let (lo, hi) = value
                        .split_once("..")
                        .ok_or_else(|| Error::Parse(format!("filtration range `{value}` must be lo..hi")))?;
                    f = Some((int(lo)?, int(hi)?));
                }
                other => return Err(Error::Parse(format!("unknown box key `{other}`"))),
            }
        }
        let n_max = n_max.ok_or_else(|| Error::Parse("box needs n=N".into()))?;
        let mut b = DegreeBox::up_to(n_max.abs().max(n_min.unwrap_or(0).abs()));
        b.n_max = n_max;
        if let Some(v) = n_min {
            b.n_min = v;
        }
        if let Some(v) = d_min {
            b.d_min = v;
        }
        if let Some(v) = d_max {
            b.d_max = v;
        }
        if let Some((lo, hi)) = f {
            b = b.with_f(lo, hi);
        }
        b.validate()?;
        Ok(b)
    }
}

impl fmt::Display for DegreeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<=n<={}, {}<=d<={}", self.n_min, self.n_max, self.d_min, self.d_max)?;
        if let (Some(a), Some(b)) = (self.f_min, self.f_max) {
            write!(f, ", {a}<=f<={b}")?;
        }
        Ok(())
    }
}
