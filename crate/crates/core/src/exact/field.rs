use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializable description of a coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Prime { p: u64 },
    Rational,
}

impl FieldSpec {
    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime { p } => *p,
            FieldSpec::Rational => 0,
        }
    }

    /// Checks that a prime field really has prime order.
    pub fn validated(self) -> Result<Self> {
        if let FieldSpec::Prime { p } = self {
            PrimeField::new(p)?;
        }
        Ok(self)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { p } => write!(f, "F_{p}"),
            FieldSpec::Rational => write!(f, "Q"),
        }
    }
}

/// Exact arithmetic in a field. Elements are plain values; the field object
/// carries whatever context (the modulus) is needed to combine them.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// Image of a fraction; fails when the denominator vanishes in the field.
    fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }

    fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    /// `acc += c * v`, the workhorse of elimination.
    fn axpy(&self, acc: &mut Self::Elem, c: &Self::Elem, v: &Self::Elem) {
        *acc = self.add(acc, &self.mul(c, v));
    }
}

/// The prime field F_p, with p below 2^31 so products fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::usage(format!("prime {p} is too large (limit 2^31)")));
        }
        if !is_prime(p) {
            return Err(Error::usage(format!("{p} is not a prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        v.mod_floor(&m).to_u64().expect("residue fits")
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime { p: self.p }
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in F_{}", self.p);
        pow_mod(*a, self.p - 2, self.p)
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<u64> {
        let d = self.reduce_big(den);
        if d == 0 {
            return Err(Error::usage(format!("denominator {den} vanishes in F_{}", self.p)));
        }
        Ok(self.div(&self.reduce_big(num), &d))
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
    fn axpy(&self, acc: &mut u64, c: &u64, v: &u64) {
        *acc = (*acc + c * v) % self.p;
    }
}

/// The rationals with arbitrary-precision normalized fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero in Q");
        a.recip()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<BigRational> {
        if den.is_zero() {
            return Err(Error::usage("zero denominator"));
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }
    fn render(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else if a.is_negative() {
            format!("-{}/{}", a.numer().abs(), a.denom())
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Primality: trial division below 2^16, Miller-Rabin above.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 1 << 16 {
        let mut q = 2;
        while q * q <= n {
            if n % q == 0 {
                return false;
            }
            q += 1;
        }
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Runs a block with a concrete field built from a [`FieldSpec`].
///
/// ```
/// use stabkit::{with_field, exact::{Field, FieldSpec}};
/// let spec = FieldSpec::Prime { p: 5 };
/// let c = with_field!(spec, |f| Ok::<_, stabkit::Error>(f.characteristic())).unwrap();
/// assert_eq!(c, 5);
/// ```
#[macro_export]
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {{
        match $spec {
            $crate::exact::FieldSpec::Prime { p } => match $crate::exact::PrimeField::new(p) {
                Ok($f) => $body,
                Err(e) => Err(e.into()),
            },
            $crate::exact::FieldSpec::Rational => {
                let $f = $crate::exact::Rationals;
                $body
            }
        }
    }};
}
