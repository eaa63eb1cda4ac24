use alloc::vec::Vec;
use core::ops::Range;

use super::arith::{inverse_raw, ModArith};

const BLOCK: u64 = 4096;

/// Calls `f(n)` for every `n` in `range` coprime to `q`, ascending. `primes`
/// must be the distinct prime divisors of `q`. The range is clipped to
/// `[1, q)`.
pub fn for_each_unit<F: FnMut(u64)>(q: u64, primes: &[u64], range: Range<u64>, mut f: F) {
    let mut flags = Vec::new();
    each_block(q, primes, range, &mut flags, |start, flags| {
        for (i, &composite) in flags.iter().enumerate() {
            if !composite {
                f(start + i as u64);
            }
        }
    });
}

/// Like [`for_each_unit`] but also passes the inverse of each unit.
/// Inverses are computed a block at a time with a single extended-gcd call
/// per block (Montgomery's batch inversion).
pub fn for_each_unit_with_inverse<F: FnMut(u64, u64)>(ring: &ModArith, primes: &[u64], range: Range<u64>, mut f: F) {
    let q = ring.modulus();
    let mut flags = Vec::new();
    let mut units: Vec<u64> = Vec::with_capacity(BLOCK as usize);
    let mut prefix: Vec<u64> = Vec::with_capacity(BLOCK as usize);
    let mut inverses: Vec<u64> = Vec::with_capacity(BLOCK as usize);
    each_block(q, primes, range, &mut flags, |start, flags| {
        units.clear();
        units.extend(
            flags
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| start + i as u64),
        );
        if units.is_empty() {
            return;
        }
        prefix.clear();
        let mut acc = 1 % q;
        for &u in &units {
            acc = ring.mul(acc, u);
            prefix.push(acc);
        }
        let mut inv = inverse_raw(acc, q).expect("product of units is a unit");
        inverses.clear();
        inverses.resize(units.len(), 0);
        for i in (1..units.len()).rev() {
            inverses[i] = ring.mul(inv, prefix[i - 1]);
            inv = ring.mul(inv, units[i]);
        }
        inverses[0] = inv;
        for (&u, &v) in units.iter().zip(&inverses) {
            f(u, v);
        }
    });
}

fn each_block<F: FnMut(u64, &[bool])>(q: u64, primes: &[u64], range: Range<u64>, flags: &mut Vec<bool>, mut f: F) {
    let mut start = range.start.max(1);
    let end = range.end.min(q);
    while start < end {
        let stop = end.min(start.saturating_add(BLOCK));
        let len = (stop - start) as usize;
        flags.clear();
        flags.resize(len, false);
        for &p in primes {
            let first = start.div_ceil(p) * p;
            let mut x = first;
            while x < stop {
                flags[(x - start) as usize] = true;
                x += p;
            }
        }
        f(start, flags);
        start = stop;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntcore::{gcd, Modulus};

    #[test]
    fn enumerates_exactly_the_units() {
        for q in 2..400u64 {
            let m = Modulus::new(q).unwrap();
            let mut seen = Vec::new();
            for_each_unit(q, m.primes(), 0..q + 10, |n| seen.push(n));
            let brute: Vec<u64> = (1..q).filter(|&n| gcd(n, q) == 1).collect();
            assert_eq!(seen, brute, "q={q}");
        }
    }

    #[test]
    fn batch_inverses_are_inverses() {
        for q in [2u64, 9, 97, 360, 10007, 65536, 1 << 33] {
            let m = Modulus::new(q).unwrap();
            let ring = ModArith::new(q);
            let hi = q.min(20_000);
            let mut count = 0;
            for_each_unit_with_inverse(&ring, m.primes(), 1..hi, |n, inv| {
                assert_eq!(ring.mul(n, inv), 1 % q, "q={q} n={n}");
                count += 1;
            });
            assert!(count > 0);
        }
    }

    #[test]
    fn sub_ranges_concatenate() {
        let m = Modulus::new(3 * 5 * 7 * 11).unwrap();
        let q = m.q();
        let mut whole = Vec::new();
        for_each_unit(q, m.primes(), 1..q, |n| whole.push(n));
        let mut pieces = Vec::new();
        for r in [0..100, 100..101, 101..777, 777..q] {
            for_each_unit(q, m.primes(), r, |n| pieces.push(n));
        }
        assert_eq!(whole, pieces);
    }
}
