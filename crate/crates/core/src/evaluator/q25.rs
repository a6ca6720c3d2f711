//! Exact numbers of the form a * 2^b * 5^c.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Canonical form: `a == 0` implies `b == c == 0`; otherwise `a` is divisible by neither 2 nor 5.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Q25 {
    a: BigInt,
    b: i64,
    c: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal `{0}`")]
pub struct DecimalError(pub String);

fn pow5(k: u64) -> BigInt {
    num_traits::pow(BigInt::from(5), k as usize)
}

fn shl(a: &BigInt, k: i64) -> BigInt {
    debug_assert!(k >= 0);
    a << (k as usize)
}

impl Q25 {
    pub fn new(a: BigInt, b: i64, c: i64) -> Q25 {
        let mut q = Q25 { a, b, c };
        q.normalize();
        q
    }

    pub fn zero() -> Q25 {
        Q25 {
            a: BigInt::zero(),
            b: 0,
            c: 0,
        }
    }

    pub fn one() -> Q25 {
        Q25::from_int(1)
    }

    pub fn half() -> Q25 {
        Q25 {
            a: BigInt::one(),
            b: -1,
            c: 0,
        }
    }

    pub fn from_int(v: i64) -> Q25 {
        Q25::new(BigInt::from(v), 0, 0)
    }

    pub fn from_bigint(v: BigInt) -> Q25 {
        Q25::new(v, 0, 0)
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Q25 {
        Q25 {
            a: BigInt::one(),
            b: k,
            c: 0,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.a
    }

    pub fn exp2(&self) -> i64 {
        self.b
    }

    pub fn exp5(&self) -> i64 {
        self.c
    }

    pub fn triple(&self) -> (BigInt, i64, i64) {
        (self.a.clone(), self.b, self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }

    pub fn is_canonical(&self) -> bool {
        if self.a.is_zero() {
            return self.b == 0 && self.c == 0;
        }
        self.a.is_odd() && !(&self.a % 5u32).is_zero()
    }

    fn normalize(&mut self) {
        if self.a.is_zero() {
            self.b = 0;
            self.c = 0;
            return;
        }
        let tz = self.a.trailing_zeros().expect("nonzero");
        if tz > 0 {
            self.a >>= tz as usize;
            self.b += tz as i64;
        }
        let chunk = pow5(13);
        loop {
            let (q, r) = self.a.div_rem(&chunk);
            if !r.is_zero() {
                break;
            }
            self.a = q;
            self.c += 13;
        }
        let five = BigInt::from(5);
        loop {
            let (q, r) = self.a.div_rem(&five);
            if !r.is_zero() {
                break;
            }
            self.a = q;
            self.c += 1;
        }
    }

    /// Mantissas of both operands scaled to the common exponents `(b, c)`.
    fn aligned(&self, other: &Q25) -> (BigInt, BigInt, i64, i64) {
        if self.is_zero() {
            return (BigInt::zero(), other.a.clone(), other.b, other.c);
        }
        if other.is_zero() {
            return (self.a.clone(), BigInt::zero(), self.b, self.c);
        }
        let b = self.b.min(other.b);
        let c = self.c.min(other.c);
        let scale = |q: &Q25| shl(&q.a, q.b - b) * pow5((q.c - c) as u64);
        (scale(self), scale(other), b, c)
    }

    pub fn add(&self, other: &Q25) -> Q25 {
        let (x, y, b, c) = self.aligned(other);
        Q25::new(x + y, b, c)
    }

    pub fn sub(&self, other: &Q25) -> Q25 {
        let (x, y, b, c) = self.aligned(other);
        Q25::new(x - y, b, c)
    }

    pub fn mul(&self, other: &Q25) -> Q25 {
        if self.is_zero() || other.is_zero() {
            return Q25::zero();
        }
        Q25 {
            a: &self.a * &other.a,
            b: self.b + other.b,
            c: self.c + other.c,
        }
    }

    pub fn neg(&self) -> Q25 {
        Q25 {
            a: -&self.a,
            b: self.b,
            c: self.c,
        }
    }

    /// Exact quotient, or `None` when it leaves the set (or `other` is zero).
    pub fn checked_div(&self, other: &Q25) -> Option<Q25> {
        if other.is_zero() {
            return None;
        }
        let (q, r) = self.a.div_rem(&other.a);
        if !r.is_zero() {
            return None;
        }
        Some(Q25::new(q, self.b - other.b, self.c - other.c))
    }

    pub fn is_integer(&self) -> bool {
        self.b >= 0 && self.c >= 0
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer()
            .then(|| shl(&self.a, self.b) * pow5(self.c as u64))
    }

    pub fn to_rational(&self) -> BigRational {
        let mut num = self.a.clone();
        let mut den = BigInt::one();
        if self.b >= 0 {
            num <<= self.b as usize;
        } else {
            den <<= (-self.b) as usize;
        }
        if self.c >= 0 {
            num *= pow5(self.c as u64);
        } else {
            den *= pow5((-self.c) as u64);
        }
        BigRational::new(num, den)
    }

    /// Converts a rational whose reduced denominator is of the form 2^i 5^j.
    pub fn from_rational(r: &BigRational) -> Option<Q25> {
        let mut den = r.denom().clone();
        let tz = den.trailing_zeros().unwrap_or(0);
        den >>= tz as usize;
        let mut c = 0i64;
        let five = BigInt::from(5);
        while !den.is_one() {
            let (q, rem) = den.div_rem(&five);
            if !rem.is_zero() {
                return None;
            }
            den = q;
            c += 1;
        }
        Some(Q25::new(r.numer().clone(), -(tz as i64), -c))
    }

    /// Exact finite decimal rendering.
    pub fn to_decimal(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let k = 0i64.max(-self.b).max(-self.c);
        let n = shl(&self.a.abs(), self.b + k) * pow5((self.c + k) as u64);
        let digits = n.to_str_radix(10);
        let sign = if self.a.sign() == Sign::Minus { "-" } else { "" };
        let k = k as usize;
        if k == 0 {
            return format!("{sign}{digits}");
        }
        let padded = if digits.len() <= k {
            format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - k);
        format!("{sign}{int}.{frac}")
    }

    /// Parses `[-+]digits[.digits][e[-+]digits]`.
    pub fn parse_decimal(s: &str) -> Result<Q25, DecimalError> {
        let err = || DecimalError(s.to_string());
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| err())?),
            None => (s, 0),
        };
        let (neg, body) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int, frac) = match body.find('.') {
            Some(i) => (&body[..i], &body[i + 1..]),
            None => (body, ""),
        };
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if int.len() + frac.len() == 0 || !all_digits(int) || !all_digits(frac) {
            return Err(err());
        }
        let joined = format!("{int}{frac}");
        let mut a = BigInt::parse_bytes(joined.as_bytes(), 10).ok_or_else(err)?;
        if neg {
            a = -a;
        }
        let e = exp.checked_sub(frac.len() as i64).ok_or_else(err)?;
        Ok(Q25::new(a, e, e))
    }
}

impl fmt::Display for Q25 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl FromStr for Q25 {
    type Err = DecimalError;
    fn from_str(s: &str) -> Result<Q25, DecimalError> {
        Q25::parse_decimal(s)
    }
}

impl PartialOrd for Q25 {
    fn partial_cmp(&self, other: &Q25) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q25 {
    fn cmp(&self, other: &Q25) -> Ordering {
        let (x, y, _, _) = self.aligned(other);
        x.cmp(&y)
    }
}
