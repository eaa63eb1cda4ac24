//! Complete exponential sums with sparse Laurent-monomial phases,
//!
//! ```text
//! S(lambda; k, q) = sum over units n mod q of e_q(lambda_1 n^{k_1} + ... + lambda_s n^{k_s}),
//! ```
//!
//! evaluated directly and as a product over the prime-power factors of `q`,
//! plus the geometric sums `sum_{u=0}^{U} e_l(mu u)` and their bound ratios.

mod complex;

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::{Range, RangeInclusive};

use serde::{Deserialize, Serialize};

pub use complex::{CompensatedSum, Complex, ComplexAccumulator};

use crate::ntcore::{for_each_unit, for_each_unit_with_inverse, gcd, CrtPlan, ModArith, Modulus, DEFAULT_EXPONENT_CAP};
use crate::{Error, Result};

/// Units are summed in consecutive blocks of this many residues; block
/// partials are merged in ascending order. Parallel drivers must use the
/// same blocks (see [`exp_sum_blocks`]) to reproduce the sequential result
/// bit for bit.
pub const EXP_SUM_BLOCK: u64 = 1 << 16;

/// `e_l(z) = exp(2 pi i z / l)`, with `z` reduced modulo `l` before the
/// conversion to floating point.
pub fn e_l(l: u64, z: i64) -> Complex {
    assert!(l >= 1, "e_l needs l >= 1");
    let r = (z as i128).rem_euclid(l as i128) as u64;
    phase(r, l)
}

#[inline]
fn phase(r: u64, l: u64) -> Complex {
    Complex::cis(TAU * (r as f64 / l as f64))
}

/// The index set `-(l-1)/2 <= mu <= l/2`, a complete residue system mod `l`.
pub fn symmetric_range(l: u64) -> RangeInclusive<i64> {
    let l = l as i64;
    -((l - 1) / 2)..=l / 2
}

/// Representative of `x mod l` in [`symmetric_range`].
pub fn to_symmetric(x: i64, l: u64) -> i64 {
    let r = (x as i128).rem_euclid(l as i128) as i64;
    if 2 * (r as i128) > l as i128 {
        r - l as i64
    } else {
        r
    }
}

/// Value of an exponential sum with the number of summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexSum {
    pub re: f64,
    pub im: f64,
    pub terms: u64,
}

impl ComplexSum {
    pub fn value(&self) -> Complex {
        Complex::new(self.re, self.im)
    }

    pub fn abs(&self) -> f64 {
        self.value().abs()
    }

    fn from_acc(acc: &ComplexAccumulator) -> Self {
        let z = acc.value();
        ComplexSum {
            re: z.re,
            im: z.im,
            terms: acc.terms(),
        }
    }
}

/// Arguments of `S(lambda; k, q)`: the modulus, the exponent vector and the
/// coefficient vector reduced to the symmetric range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpSumArgs {
    modulus: Modulus,
    exponents: Vec<i64>,
    coefficients: Vec<i64>,
    gcd_class: Option<u64>,
}

impl ExpSumArgs {
    pub fn new(modulus: Modulus, exponents: Vec<i64>, coefficients: Vec<i64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidArgument("need at least one exponent"));
        }
        if exponents.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                what: "exponents and coefficients",
            });
        }
        for (index, &k) in exponents.iter().enumerate() {
            if k == 0 {
                return Err(Error::ZeroExponent { index });
            }
            if k.unsigned_abs() > DEFAULT_EXPONENT_CAP {
                return Err(Error::ExponentTooLarge {
                    k,
                    cap: DEFAULT_EXPONENT_CAP,
                });
            }
        }
        let q = modulus.q();
        let coefficients: Vec<i64> = coefficients.iter().map(|&c| to_symmetric(c, q)).collect();
        let g = coefficients.iter().fold(0u64, |g, &c| gcd(g, c.unsigned_abs()));
        let gcd_class = (g != 0).then_some(g);
        Ok(ExpSumArgs {
            modulus,
            exponents,
            coefficients,
            gcd_class,
        })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    /// Coefficients in the symmetric range `(-(q-1)/2, q/2]`.
    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    /// `gcd` of the coefficients, `None` when they are all zero.
    pub fn gcd_class(&self) -> Option<u64> {
        self.gcd_class
    }

    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }
}

/// Phase `(sum_j c_j n^{k_j}) mod l` for units `n` modulo `l`.
struct PhaseForm<'a> {
    ring: ModArith,
    coeffs: Vec<u64>,
    exponents: &'a [i64],
    needs_inverse: bool,
}

impl<'a> PhaseForm<'a> {
    fn new(l: u64, exponents: &'a [i64], coeffs: impl Iterator<Item = i64>, twist: u64) -> Self {
        let ring = ModArith::new(l);
        let coeffs = coeffs.map(|c| ring.mul(ring.reduce_signed(c), twist % l)).collect();
        let needs_inverse = exponents.iter().any(|&k| k < 0);
        PhaseForm {
            ring,
            coeffs,
            exponents,
            needs_inverse,
        }
    }

    #[inline]
    fn eval(&self, n: u64, inv: u64) -> u64 {
        let mut t = 0;
        for (&c, &k) in self.coeffs.iter().zip(self.exponents) {
            if c == 0 {
                continue;
            }
            let base = if k > 0 { n } else { inv };
            let x = self.ring.pow(base, k.unsigned_abs());
            t = self.ring.add(t, self.ring.mul(c, x));
        }
        t
    }

    fn accumulate(&self, primes: &[u64], range: Range<u64>, acc: &mut ComplexAccumulator) {
        let l = self.ring.modulus();
        if self.needs_inverse {
            for_each_unit_with_inverse(&self.ring, primes, range, |n, inv| acc.add(phase(self.eval(n, inv), l)));
        } else {
            for_each_unit(l, primes, range, |n| acc.add(phase(self.eval(n, 0), l)));
        }
    }
}

/// The fixed block decomposition of `[1, q)` used by [`exp_sum_direct`].
pub fn exp_sum_blocks(q: u64) -> impl Iterator<Item = Range<u64>> {
    (0..q.div_ceil(EXP_SUM_BLOCK)).map(move |i| {
        let lo = (i * EXP_SUM_BLOCK).max(1);
        lo..((i + 1) * EXP_SUM_BLOCK).min(q)
    })
}

/// Compensated partial sum over the units in `range`, ascending.
pub fn exp_sum_partial(args: &ExpSumArgs, range: Range<u64>) -> ComplexAccumulator {
    let q = args.modulus.q();
    let form = PhaseForm::new(q, &args.exponents, args.coefficients.iter().copied(), 1);
    let mut acc = ComplexAccumulator::default();
    form.accumulate(args.modulus.primes(), range, &mut acc);
    acc
}

/// Merge block partials (in block order) into the final sum.
pub fn merge_partials<'a>(partials: impl IntoIterator<Item = &'a ComplexAccumulator>) -> ComplexSum {
    let mut total = ComplexAccumulator::default();
    for p in partials {
        total.merge(p);
    }
    ComplexSum::from_acc(&total)
}

/// `S(lambda; k, q)` by summing over every unit `n`.
pub fn exp_sum_direct(args: &ExpSumArgs) -> ComplexSum {
    let partials: Vec<ComplexAccumulator> = exp_sum_blocks(args.modulus.q())
        .map(|r| exp_sum_partial(args, r))
        .collect();
    merge_partials(&partials)
}

/// `S(lambda; k, q)` as the product over prime powers `P | q` of the sums
/// modulo `P` with coefficients twisted by `t = (q/P)^{-1} mod P`.
pub fn exp_sum_crt(args: &ExpSumArgs, plan: &CrtPlan) -> Result<ComplexSum> {
    if plan.parent() != &args.modulus {
        return Err(Error::PlanMismatch {
            plan: plan.parent().q(),
            args: args.modulus.q(),
        });
    }
    let mut product = Complex::ONE;
    let mut terms = 1u64;
    for c in plan.components() {
        let form = PhaseForm::new(
            c.prime_power,
            &args.exponents,
            args.coefficients.iter().copied(),
            c.inverse,
        );
        let mut acc = ComplexAccumulator::default();
        form.accumulate(&[c.prime], 1..c.prime_power, &mut acc);
        product = product * acc.value();
        terms *= acc.terms();
    }
    Ok(ComplexSum {
        re: product.re,
        im: product.im,
        terms,
    })
}

/// `d^{1/s} q^{1 - 1/s}`, the size the sparse-sum bound allows for `|S|`
/// up to a `q^{o(1)}` factor.
pub fn lemma_normalizer(args: &ExpSumArgs) -> Result<f64> {
    let d = args.gcd_class.ok_or(Error::AllZeroCoefficients)?;
    let inv_s = 1.0 / args.dimension() as f64;
    Ok(libm::pow(d as f64, inv_s) * libm::pow(args.modulus.q() as f64, 1.0 - inv_s))
}

/// `|S| / (d^{1/s} q^{1 - 1/s})`.
pub fn lemma_ratio(args: &ExpSumArgs) -> Result<f64> {
    let norm = lemma_normalizer(args)?;
    Ok(exp_sum_direct(args).abs() / norm)
}

/// `sum_{u=0}^{U} e_l(mu u)` in closed form,
/// `e_l(mu U / 2) sin(pi mu (U+1) / l) / sin(pi mu / l)`, with every angle
/// reduced exactly modulo its period before conversion.
pub fn geometric_sum(l: u64, mu: i64, upper: u64) -> ComplexSum {
    assert!(l >= 1, "geometric_sum needs l >= 1");
    let terms = upper + 1;
    let two_l = 2 * l as i128;
    if (mu as i128).rem_euclid(l as i128) == 0 {
        return ComplexSum {
            re: terms as f64,
            im: 0.0,
            terms,
        };
    }
    let half_turns = |x: i128| PI * (x.rem_euclid(two_l) as f64 / l as f64);
    let magnitude = libm::sin(half_turns(mu as i128 * terms as i128)) / libm::sin(half_turns(mu as i128));
    let z = Complex::cis(half_turns(mu as i128 * upper as i128)).scale(magnitude);
    ComplexSum {
        re: z.re,
        im: z.im,
        terms,
    }
}

/// `|sum_{u=0}^{U} e_l(mu u)|` without the phase factor.
fn geometric_abs(l: u64, mu: i64, upper: u64) -> f64 {
    let two_l = 2 * l as i128;
    if (mu as i128).rem_euclid(l as i128) == 0 {
        return (upper + 1) as f64;
    }
    let half_turns = |x: i128| PI * (x.rem_euclid(two_l) as f64 / l as f64);
    libm::fabs(libm::sin(half_turns(mu as i128 * (upper as i128 + 1))) / libm::sin(half_turns(mu as i128)))
}

/// Returns `(r1, r2)` where
/// `r1 = sum_{mu != 0} |G(mu)| / (l ln l)` and
/// `r2 = sum_{mu} |G(mu)| / (U + l ln l)`, with `G(mu) = sum_{u=0}^{U} e_l(mu u)`
/// and `mu` over the symmetric range.
pub fn geometric_bound_ratios(l: u64, upper: u64) -> Result<(f64, f64)> {
    if l < 3 {
        return Err(Error::InvalidArgument("geometric bound ratios need l >= 3"));
    }
    let mut off_zero = CompensatedSum::default();
    for mu in symmetric_range(l).filter(|&mu| mu != 0) {
        off_zero.add(geometric_abs(l, mu, upper));
    }
    let l_log_l = l as f64 * libm::log(l as f64);
    let r1 = off_zero.value() / l_log_l;
    let mut all = off_zero;
    all.add((upper + 1) as f64);
    let r2 = all.value() / (upper as f64 + l_log_l);
    Ok((r1, r2))
}
