//! Exact evaluation of `N_q(m, a; k)`, the number of units `n` modulo `q`
//! whose least nonnegative residues `n^{k_j} mod q` satisfy
//! `n^{k_j} mod q = a_j (mod m_j)` for every coordinate `j`.
//!
//! Two independent routes are provided: direct enumeration, and the
//! equivalent congruence system `r_j n^{k_j} = u_j + b_j (mod q)` with
//! `0 <= u_j <= U_j`, where `r_j = m_j^{-1} mod q` and `b_j = a_j r_j`.

use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::ntcore::{
    for_each_unit, for_each_unit_with_inverse, gcd, inverse_raw, ModArith, Modulus, DEFAULT_EXPONENT_CAP,
};
use crate::{Error, Rational, Result};

/// The vectors `(k, m, a)` defining one counting problem, with every `a_j`
/// normalized into `[0, m_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ProblemSpec {
    k: Vec<i64>,
    m: Vec<u64>,
    a: Vec<u64>,
}

#[derive(Deserialize)]
struct RawSpec {
    k: Vec<i64>,
    m: Vec<u64>,
    a: Vec<i64>,
}

impl TryFrom<RawSpec> for ProblemSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        ProblemSpec::new(raw.k, raw.m, raw.a)
    }
}

impl ProblemSpec {
    pub fn new(k: Vec<i64>, m: Vec<u64>, a: Vec<i64>) -> Result<Self> {
        Self::with_exponent_cap(k, m, a, DEFAULT_EXPONENT_CAP)
    }

    pub fn with_exponent_cap(k: Vec<i64>, m: Vec<u64>, a: Vec<i64>, cap: u64) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidArgument("need at least one coordinate"));
        }
        if k.len() != m.len() {
            return Err(Error::DimensionMismatch { what: "k and m" });
        }
        if k.len() != a.len() {
            return Err(Error::DimensionMismatch { what: "k and a" });
        }
        for (index, &kj) in k.iter().enumerate() {
            if kj == 0 {
                return Err(Error::ZeroExponent { index });
            }
            if kj.unsigned_abs() > cap {
                return Err(Error::ExponentTooLarge { k: kj, cap });
            }
        }
        if let Some(index) = m.iter().position(|&mj| mj == 0) {
            return Err(Error::ZeroProgressionModulus { index });
        }
        let a = a
            .iter()
            .zip(&m)
            .map(|(&aj, &mj)| (aj as i128).rem_euclid(mj as i128) as u64)
            .collect();
        Ok(ProblemSpec { k, m, a })
    }

    pub fn dimension(&self) -> usize {
        self.k.len()
    }

    pub fn k(&self) -> &[i64] {
        &self.k
    }

    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    /// Same `k` and `m` with a different residue vector.
    pub fn with_residues(&self, a: &[i64]) -> Result<Self> {
        ProblemSpec::with_exponent_cap(self.k.clone(), self.m.clone(), a.to_vec(), u64::MAX)
    }

    /// Whether every `m_j` is coprime to `q`, the hypothesis of the
    /// asymptotic formula.
    pub fn is_coprime_to(&self, q: &Modulus) -> bool {
        self.m.iter().all(|&mj| q.is_coprime_to(mj))
    }

    fn needs_inverse(&self) -> bool {
        self.k.iter().any(|&k| k < 0)
    }
}

#[inline]
fn signed_power(ring: &ModArith, n: u64, inv: u64, k: i64) -> u64 {
    ring.pow(if k > 0 { n } else { inv }, k.unsigned_abs())
}

fn visit_units<F: FnMut(u64, u64)>(q: &Modulus, needs_inverse: bool, range: Range<u64>, mut f: F) {
    if needs_inverse {
        for_each_unit_with_inverse(&ModArith::new(q.q()), q.primes(), range, f);
    } else {
        for_each_unit(q.q(), q.primes(), range, |n| f(n, 0));
    }
}

/// Count over the units in `range` only; the counts of disjoint ranges add.
pub fn count_direct_range(q: &Modulus, spec: &ProblemSpec, range: Range<u64>) -> u64 {
    let ring = ModArith::new(q.q());
    let coords: Vec<(i64, u64, u64)> = spec
        .k
        .iter()
        .zip(&spec.m)
        .zip(&spec.a)
        .map(|((&k, &m), &a)| (k, m, a))
        .collect();
    let mut count = 0;
    visit_units(q, spec.needs_inverse(), range, |n, inv| {
        if coords.iter().all(|&(k, m, a)| signed_power(&ring, n, inv, k) % m == a) {
            count += 1;
        }
    });
    count
}

/// `N_q(m, a; k)` by enumerating the reduced residue system.
pub fn count_direct(q: &Modulus, spec: &ProblemSpec) -> u64 {
    count_direct_range(q, spec, 1..q.q())
}

/// One coordinate of the congruence system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCoordinate {
    /// `m_j^{-1} mod q`
    pub r: u64,
    /// `a_j r_j mod q`
    pub b: u64,
    /// Largest `U` with `m_j U + a_j < q`; negative when `a_j >= q`.
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSystem {
    modulus: Modulus,
    exponents: Vec<i64>,
    coords: Vec<CongruenceCoordinate>,
}

impl CongruenceSystem {
    pub fn new(q: &Modulus, spec: &ProblemSpec) -> Result<Self> {
        let ring = ModArith::new(q.q());
        let mut coords = Vec::with_capacity(spec.dimension());
        for (index, (&m, &a)) in spec.m.iter().zip(&spec.a).enumerate() {
            let r = match inverse_raw(m, q.q()) {
                Some(r) if gcd(m, q.q()) == 1 => r,
                _ => return Err(Error::CoprimalityViolation { index, m, q: q.q() }),
            };
            let b = ring.mul(a % q.q(), r);
            coords.push(CongruenceCoordinate {
                r,
                b,
                upper: largest_u(q.q(), m, a),
            });
        }
        Ok(CongruenceSystem {
            modulus: q.clone(),
            exponents: spec.k.clone(),
            coords,
        })
    }

    pub fn coordinates(&self) -> &[CongruenceCoordinate] {
        &self.coords
    }

    /// Solutions `(n, u_1, ..., u_s)` with `n` restricted to `range`.
    pub fn count_range(&self, range: Range<u64>) -> u64 {
        let q = self.modulus.q();
        let ring = ModArith::new(q);
        let needs_inverse = self.exponents.iter().any(|&k| k < 0);
        let mut count = 0;
        visit_units(&self.modulus, needs_inverse, range, |n, inv| {
            let hit = self.exponents.iter().zip(&self.coords).all(|(&k, c)| {
                let x = signed_power(&ring, n, inv, k);
                // u = r x - b (mod q) is the only candidate in [0, q).
                let u = ring.add(ring.mul(c.r, x), q - c.b % q);
                (u as i128) <= c.upper as i128
            });
            if hit {
                count += 1;
            }
        });
        count
    }

    pub fn count(&self) -> u64 {
        self.count_range(1..self.modulus.q())
    }
}

/// `floor((q - 1 - a) / m)`, the largest `U` with `m U + a < q`.
fn largest_u(q: u64, m: u64, a: u64) -> i64 {
    (q as i128 - 1 - a as i128).div_euclid(m as i128) as i64
}

/// `N_q(m, a; k)` through the congruence system; requires `gcd(m_j, q) = 1`.
pub fn count_via_congruence_system(q: &Modulus, spec: &ProblemSpec) -> Result<u64> {
    Ok(CongruenceSystem::new(q, spec)?.count())
}

/// `phi(q) / (m_1 ... m_s)` exactly.
pub fn main_term(q: &Modulus, spec: &ProblemSpec) -> Result<Rational> {
    let den = spec
        .m
        .iter()
        .try_fold(1i128, |acc, &m| acc.checked_mul(m as i128))
        .ok_or(Error::Overflow)?;
    Rational::new(q.phi() as i128, den)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UBounds {
    /// `U_j` per coordinate.
    pub u: Vec<i64>,
    /// `|U_1 ... U_s - q^s / (m_1 ... m_s)|`
    pub deviation: Rational,
}

impl UBounds {
    /// Whether the deviation is at most `s q^{s-1}`.
    pub fn within(&self, q: u64) -> Result<bool> {
        let s = self.u.len() as u32;
        let cap = (q as i128)
            .checked_pow(s - 1)
            .and_then(|x| x.checked_mul(s as i128))
            .ok_or(Error::Overflow)?;
        Ok(self.deviation <= Rational::from_integer(cap))
    }
}

pub fn u_bounds(q: &Modulus, spec: &ProblemSpec) -> Result<UBounds> {
    let u: Vec<i64> = spec
        .m
        .iter()
        .zip(&spec.a)
        .map(|(&m, &a)| largest_u(q.q(), m, a))
        .collect();
    let prod_u = u
        .iter()
        .try_fold(1i128, |acc, &x| acc.checked_mul(x as i128))
        .ok_or(Error::Overflow)?;
    let prod_m = spec
        .m
        .iter()
        .try_fold(1i128, |acc, &x| acc.checked_mul(x as i128))
        .ok_or(Error::Overflow)?;
    let q_pow = (q.q() as i128)
        .checked_pow(spec.dimension() as u32)
        .ok_or(Error::Overflow)?;
    let scaled = prod_u
        .checked_mul(prod_m)
        .and_then(|x| x.checked_sub(q_pow))
        .ok_or(Error::Overflow)?;
    let deviation = Rational::new(scaled.checked_abs().ok_or(Error::Overflow)?, prod_m)?;
    Ok(UBounds { u, deviation })
}

/// Parity statistics of `n^k mod q` against its inverse `n^{-k} mod q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub q: u64,
    pub k: i64,
    pub both_even: u64,
    pub both_odd: u64,
    pub same_parity: u64,
    /// `phi(q) / 2`
    pub main: Rational,
    /// `same_parity - phi(q) / 2`
    pub error: f64,
}

fn check_parity_args(q: &Modulus, k: i64) -> Result<()> {
    if q.q().is_multiple_of(2) {
        return Err(Error::EvenModulus(q.q()));
    }
    if k == 0 {
        return Err(Error::ZeroExponent { index: 0 });
    }
    if k.unsigned_abs() > DEFAULT_EXPONENT_CAP {
        return Err(Error::ExponentTooLarge {
            k,
            cap: DEFAULT_EXPONENT_CAP,
        });
    }
    Ok(())
}

/// `(both_even, both_odd)` over the units in `range`, where the pair is
/// `(n^k mod q, n^{-k} mod q)`.
pub fn parity_counts_range(q: &Modulus, k: i64, range: Range<u64>) -> Result<(u64, u64)> {
    check_parity_args(q, k)?;
    let ring = ModArith::new(q.q());
    let (mut even, mut odd) = (0, 0);
    for_each_unit_with_inverse(&ring, q.primes(), range, |n, inv| {
        let x = signed_power(&ring, n, inv, k);
        let y = signed_power(&ring, n, inv, -k);
        match (x & 1, y & 1) {
            (0, 0) => even += 1,
            (1, 1) => odd += 1,
            _ => {}
        }
    });
    Ok((even, odd))
}

pub fn parity_report_from_counts(q: &Modulus, k: i64, both_even: u64, both_odd: u64) -> Result<ParityReport> {
    check_parity_args(q, k)?;
    let same_parity = both_even + both_odd;
    let main = Rational::new(q.phi() as i128, 2)?;
    let error = Rational::from_integer(same_parity as i128).checked_sub(main)?.to_f64();
    Ok(ParityReport {
        q: q.q(),
        k,
        both_even,
        both_odd,
        same_parity,
        main,
        error,
    })
}

/// How often `n^k` and its inverse `n^{-k}` have the same parity, compared
/// with `phi(q) / 2`. Needs odd `q`.
pub fn parity_report(q: &Modulus, k: i64) -> Result<ParityReport> {
    let (even, odd) = parity_counts_range(q, k, 1..q.q())?;
    parity_report_from_counts(q, k, even, odd)
}

/// Count, main term and error for one `(q, spec)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub q: u64,
    pub spec: ProblemSpec,
    pub count: u64,
    pub main_term: Rational,
    /// `count - main_term`
    pub error: f64,
    /// `ln|E| / ln q`, or `None` when `|E| < 1`.
    pub normalized_exponent: Option<f64>,
    /// All `m_j` coprime to `q`.
    pub coprime: bool,
    /// Some `m_j >= q`, where each coordinate hits at most one residue.
    pub oversized_progression: bool,
}

impl CountReport {
    pub fn from_count(q: &Modulus, spec: &ProblemSpec, count: u64) -> Result<Self> {
        let main = main_term(q, spec)?;
        let error = Rational::from_integer(count as i128).checked_sub(main)?.to_f64();
        let normalized_exponent =
            (libm::fabs(error) >= 1.0).then(|| libm::log(libm::fabs(error)) / libm::log(q.q() as f64));
        Ok(CountReport {
            q: q.q(),
            spec: spec.clone(),
            count,
            main_term: main,
            error,
            normalized_exponent,
            coprime: spec.is_coprime_to(q),
            oversized_progression: spec.m.iter().any(|&m| m >= q.q()),
        })
    }
}

pub fn count_report(q: &Modulus, spec: &ProblemSpec) -> Result<CountReport> {
    CountReport::from_count(q, spec, count_direct(q, spec))
}
