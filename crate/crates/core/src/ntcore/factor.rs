use alloc::vec::Vec;

use super::arith::{gcd, ModArith};
use crate::{Error, Result};

/// Largest modulus accepted by [`factor`] and [`super::Modulus`].
pub const MAX_MODULUS: u64 = 1 << 62;

const TRIAL_LIMIT: u64 = 1_000_000;

// Deterministic for every n < 3.3 * 10^24, which covers all of u64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let ring = ModArith::new(n);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in MR_BASES {
        let mut x = ring.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ring.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of `n` as `(prime, exponent)` pairs in ascending
/// order of prime.
pub fn factor(n: u64) -> Result<Vec<(u64, u32)>> {
    if !(2..=MAX_MODULUS).contains(&n) {
        return Err(Error::InvalidModulus(n));
    }
    let mut rest = n;
    let mut out: Vec<(u64, u32)> = Vec::new();

    let mut d = 2u64;
    while d <= TRIAL_LIMIT && d * d <= rest {
        if rest.is_multiple_of(d) {
            let mut e = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }

    if rest > 1 {
        let mut big = Vec::new();
        split(rest, &mut big);
        big.sort_unstable();
        for p in big {
            match out.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    Ok(out)
}

fn split(n: u64, primes: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        primes.push(n);
        return;
    }
    let d = pollard_brent(n);
    split(d, primes);
    split(n / d, primes);
}

/// A nontrivial divisor of the odd composite `n`. Deterministic: the
/// polynomial constant walks 1, 2, 3, ... until a split is found.
fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    if let Some(r) = exact_sqrt(n) {
        return r;
    }
    let ring = ModArith::new(n);
    const BATCH: u64 = 128;
    for c in 1..n {
        let f = |x: u64| ring.add(ring.mul(x, x), c);
        let (mut y, mut r, mut acc) = (2u64, 1u64, 1u64);
        let (mut x, mut ys) = (y, y);
        let mut g = 1;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    acc = ring.mul(acc, x.abs_diff(y));
                }
                g = gcd(acc, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // Batched product hit zero; replay one step at a time.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("composite {n} has a rho split for some c")
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let mut r = libm::sqrt(n as f64) as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}
