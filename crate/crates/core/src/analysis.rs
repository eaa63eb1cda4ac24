//! Empirical checks of the asymptotic claims: modulus families, the
//! orthogonality identity, least-squares exponent fits on log-log data,
//! and sweeps of the exponential-sum and geometric-sum bound ratios.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::expsum::{
    e_l, exp_sum_direct, geometric_bound_ratios, lemma_normalizer, symmetric_range, CompensatedSum, Complex,
    ComplexAccumulator, ExpSumArgs,
};
use crate::ntcore::Modulus;
use crate::{Error, Result};

/// Default seed for every sampled quantity.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Minimum number of usable points for [`fit_exponent`].
pub const MIN_FIT_POINTS: usize = 5;

/// Tolerance of the orthogonality detector against its exact 0/1 value.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Prime,
    Odd,
    All,
    PrimePower,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Prime => "prime",
            Family::Odd => "odd",
            Family::All => "all",
            Family::PrimePower => "prime-power",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "prime" => Some(Family::Prime),
            "odd" => Some(Family::Odd),
            "all" => Some(Family::All),
            "prime-power" | "prime_power" => Some(Family::PrimePower),
            _ => None,
        }
    }

    /// Members of the family in `[lo, hi]`, ascending. Moduli below 2 are
    /// never members.
    pub fn members(self, lo: u64, hi: u64) -> Vec<u64> {
        let lo = lo.max(2);
        if lo > hi {
            return Vec::new();
        }
        match self {
            Family::All => (lo..=hi).collect(),
            Family::Odd => (lo..=hi).filter(|q| q % 2 == 1).collect(),
            Family::Prime => {
                let sieve = prime_sieve(hi);
                (lo..=hi).filter(|&q| sieve[q as usize]).collect()
            }
            Family::PrimePower => {
                let sieve = prime_sieve(hi);
                let mut out = Vec::new();
                for p in (2..=hi).filter(|&p| sieve[p as usize]) {
                    let mut pk = p;
                    loop {
                        if pk >= lo {
                            out.push(pk);
                        }
                        match pk.checked_mul(p) {
                            Some(next) if next <= hi => pk = next,
                            _ => break,
                        }
                    }
                }
                out.sort_unstable();
                out
            }
        }
    }
}

fn prime_sieve(hi: u64) -> Vec<bool> {
    let n = hi as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2;
    while p * p <= n {
        if is_prime[p] {
            let mut x = p * p;
            while x <= n {
                is_prime[x] = false;
                x += p;
            }
        }
        p += 1;
    }
    is_prime
}

/// `(1/l) sum_{mu in symmetric range} e_l(mu u)`.
pub fn orthogonality_detector(l: u64, u: i64) -> Complex {
    let mut acc = ComplexAccumulator::default();
    for mu in symmetric_range(l) {
        acc.add(e_l(l, (mu as i128 * u as i128).rem_euclid(l as i128) as i64));
    }
    acc.value().scale(1.0 / l as f64)
}

/// Whether the detector equals 1 at `u = 0` and 0 at every other
/// `u in [0, l)`, within [`ORTHOGONALITY_TOL`].
pub fn orthogonality_check(l: u64) -> bool {
    assert!(l >= 1, "orthogonality_check needs l >= 1");
    (0..l as i64).all(|u| {
        let expected = if u == 0 { Complex::ONE } else { Complex::ZERO };
        let z = orthogonality_detector(l, u);
        Complex::new(z.re - expected.re, z.im - expected.im).abs() <= ORTHOGONALITY_TOL
    })
}

/// One row of a modulus-family sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub q: u64,
    pub family: Family,
    pub phi: u64,
    #[serde(rename = "N")]
    pub count: u64,
    pub main: f64,
    /// `count - main`
    pub error: f64,
    pub abs_error: f64,
    pub lemma_ratio_max: Option<f64>,
    /// Wall-clock seconds spent on this modulus.
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Points dropped because `|E| < 1`.
    pub filtered_zero_errors: usize,
}

/// Least-squares fit of `ln|E|` against `ln q` over the records with
/// `|E| >= 1`.
pub fn fit_exponent(records: &[ScanRecord]) -> Result<ExponentFit> {
    fit_power_law(records.iter().map(|r| (r.q as f64, r.abs_error)))
}

/// Least-squares fit of `ln y = slope ln x + intercept` over the points with
/// `y >= 1`.
pub fn fit_power_law(points: impl IntoIterator<Item = (f64, f64)>) -> Result<ExponentFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut filtered = 0;
    for (x, y) in points {
        if y >= 1.0 {
            xs.push(libm::log(x));
            ys.push(libm::log(y));
        } else {
            filtered += 1;
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            usable: xs.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    let n = xs.len() as f64;
    let mean = |v: &[f64]| {
        let mut s = CompensatedSum::default();
        v.iter().for_each(|&x| s.add(x));
        s.value() / n
    };
    let (mx, my) = (mean(&xs), mean(&ys));
    let (mut sxx, mut sxy, mut syy) = (
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
    );
    for (&x, &y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    let (sxx, sxy, syy) = (sxx.value(), sxy.value(), syy.value());
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all fit points share one modulus"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut residual = CompensatedSum::default();
    for (&x, &y) in xs.iter().zip(&ys) {
        let e = y - (slope * x + intercept);
        residual.add(e * e);
    }
    // Constant data has no variance to explain; a perfect fit is r^2 = 1.
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - residual.value() / syy };
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        n_points: xs.len(),
        filtered_zero_errors: filtered,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaRatioRow {
    pub q: u64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Generator for the samples drawn at modulus `q`. Seeding per modulus keeps
/// sweeps reproducible under any evaluation order.
pub fn rng_for(seed: u64, q: u64) -> ChaCha8Rng {
    // splitmix64 finalizer
    let mut z = seed ^ q.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// A coefficient vector drawn uniformly from the nonzero vectors of the
/// symmetric range.
pub fn sample_coefficients<R: Rng>(rng: &mut R, q: u64, s: usize) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..s).map(|_| rng.random_range(symmetric_range(q))).collect();
        if v.iter().any(|&c| c != 0) {
            return v;
        }
    }
}

/// Max and mean of `|S| / (d^{1/s} q^{1-1/s})` over `samples` random
/// nonzero coefficient vectors.
pub fn lemma_ratio_row(q: &Modulus, k: &[i64], samples: usize, seed: u64) -> Result<LemmaRatioRow> {
    if k.len() < 2 {
        return Err(Error::InvalidArgument("lemma ratio sweeps need s >= 2"));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample per modulus"));
    }
    let mut rng = rng_for(seed, q.q());
    let mut max_ratio = 0.0f64;
    let mut total = CompensatedSum::default();
    for _ in 0..samples {
        let lambda = sample_coefficients(&mut rng, q.q(), k.len());
        let args = ExpSumArgs::new(q.clone(), k.to_vec(), lambda)?;
        let ratio = exp_sum_direct(&args).abs() / lemma_normalizer(&args)?;
        max_ratio = max_ratio.max(ratio);
        total.add(ratio);
    }
    Ok(LemmaRatioRow {
        q: q.q(),
        max_ratio,
        mean_ratio: total.value() / samples as f64,
    })
}

pub fn lemma_ratio_sweep(q_list: &[Modulus], k: &[i64], samples: usize, seed: u64) -> Result<Vec<LemmaRatioRow>> {
    q_list.iter().map(|q| lemma_ratio_row(q, k, samples, seed)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRatioRow {
    pub l: u64,
    pub u: u64,
    pub r1: f64,
    pub r2: f64,
}

/// `l = lo, ..., hi` growing by roughly `factor` each step, always ending at
/// `hi`.
pub fn geometric_grid(lo: u64, hi: u64, factor: f64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = lo;
    while x < hi {
        out.push(x);
        x = ((x as f64 * factor) as u64).max(x + 1);
    }
    if lo <= hi {
        out.push(hi);
    }
    out
}

/// Tabulate the geometric-sum bound ratios for every `l` and every
/// `U = l * num / den` with `(num, den)` taken from `u_scales`.
pub fn bound_ratio_sweep(l_values: &[u64], u_scales: &[(u64, u64)]) -> Result<Vec<BoundRatioRow>> {
    let mut rows = Vec::with_capacity(l_values.len() * u_scales.len());
    for &l in l_values {
        for &(num, den) in u_scales {
            if den == 0 {
                return Err(Error::InvalidArgument("U scale has zero denominator"));
            }
            let u = l * num / den;
            let (r1, r2) = geometric_bound_ratios(l, u)?;
            rows.push(BoundRatioRow { l, u, r1, r2 });
        }
    }
    Ok(rows)
}
