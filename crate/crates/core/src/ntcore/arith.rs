use crate::{Error, Result};

/// Largest |k| accepted by [`pow_mod_signed`]. Larger exponents are
/// available through [`pow_mod_signed_capped`].
pub const DEFAULT_EXPONENT_CAP: u64 = 1 << 20;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(base: u64, exp: u64, q: u64) -> u64 {
    ModArith::new(q).pow(base % q, exp)
}

/// Inverse of `a` modulo `q` by the extended Euclidean algorithm, or `None`
/// when `gcd(a, q) != 1`. `a` need not be reduced.
pub(crate) fn inverse_raw(a: u64, q: u64) -> Option<u64> {
    if q == 1 {
        return None;
    }
    let (mut r0, mut r1) = (q as i128, (a % q) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(q as i128) as u64)
}

/// The unique `x` in `[1, q)` with `n * x = 1 (mod q)`.
pub fn mod_inverse(n: i64, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidModulus(q));
    }
    let reduced = (n as i128).rem_euclid(q as i128) as u64;
    inverse_raw(reduced, q).ok_or(Error::NotInvertible { n, q })
}

/// Least nonnegative residue of `n^k` modulo `q`; for `k < 0` this is the
/// `|k|`-th power of the inverse of `n`.
pub fn pow_mod_signed(n: i64, k: i64, q: u64) -> Result<u64> {
    pow_mod_signed_capped(n, k, q, DEFAULT_EXPONENT_CAP)
}

pub fn pow_mod_signed_capped(n: i64, k: i64, q: u64, cap: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidModulus(q));
    }
    if k == 0 {
        return Err(Error::ZeroExponent { index: 0 });
    }
    if k.unsigned_abs() > cap {
        return Err(Error::ExponentTooLarge { k, cap });
    }
    let base = if k > 0 {
        let reduced = (n as i128).rem_euclid(q as i128) as u64;
        if gcd(reduced, q) != 1 {
            return Err(Error::NotInvertible { n, q });
        }
        reduced
    } else {
        mod_inverse(n, q)?
    };
    Ok(ModArith::new(q).pow(base, k.unsigned_abs()))
}

/// Multiplication modulo a fixed `q`.
///
/// For `q < 2^32` the product of two residues fits in a `u64` and is reduced
/// with a precomputed Barrett constant; larger moduli fall back to `u128`
/// division.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModArith {
    q: u64,
    // floor(2^64 / q) when 2 <= q < 2^32, otherwise 0.
    barrett: u64,
}

impl ModArith {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let barrett = if (2..1 << 32).contains(&q) {
            ((1u128 << 64) / q as u128) as u64
        } else {
            0
        };
        ModArith { q, barrett }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `a * b mod q` for `a, b < q`.
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.barrett != 0 {
            let x = a * b;
            let est = ((x as u128 * self.barrett as u128) >> 64) as u64;
            let r = x - est * self.q;
            if r >= self.q {
                r - self.q
            } else {
                r
            }
        } else {
            ((a as u128 * b as u128) % self.q as u128) as u64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (s, carry) = a.overflowing_add(b);
        if carry || s >= self.q {
            s.wrapping_sub(self.q)
        } else {
            s
        }
    }

    #[inline]
    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// Reduce a signed integer into `[0, q)`.
    #[inline]
    pub fn reduce_signed(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.q as i128) as u64
    }
}
