//! Arithmetic modulo a prime below 2^63.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is not below 2^63")]
    TooLarge(u64),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<PrimeField, FieldError> {
        if p >= 1 << 63 {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.p - y
        }
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        mulmod(x, y, self.p)
    }

    pub fn pow(&self, x: u64, e: u64) -> u64 {
        powmod(x, e, self.p)
    }
}

fn mulmod(x: u64, y: u64, m: u64) -> u64 {
    ((x as u128 * y as u128) % m as u128) as u64
}

fn powmod(mut x: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    x %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, x, m);
        }
        x = mulmod(x, x, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "{n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime((1 << 61) + 1));
    }

    #[test]
    fn field_ops() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.mul(5, 4), 6);
        assert_eq!(f.pow(3, 6), 1);
        assert_eq!(PrimeField::new(8), Err(FieldError::NotPrime(8)));
        assert!(PrimeField::new(u64::MAX).is_err());
        let big = PrimeField::new((1 << 61) - 1).unwrap();
        let x = (1 << 61) - 2;
        assert_eq!(big.mul(x, x), 1);
    }
}
