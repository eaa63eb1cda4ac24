//! Verification batteries shared by `lehmer-lab check` and the acceptance
//! tests. Every battery is seeded, produces a CSV trace of its instances,
//! and reports how many instances passed.

use std::fmt::Write as _;

use lehmer_core::analysis::{
    bound_ratio_sweep, fit_exponent, geometric_grid, orthogonality_check, rng_for, ExponentFit, Family,
};
use lehmer_core::counting::{count_direct, u_bounds, ProblemSpec};
use lehmer_core::expsum::{exp_sum_crt, exp_sum_direct, Complex, ExpSumArgs};
use lehmer_core::ntcore::{build_crt_plan, gcd, is_prime, Modulus};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::par::Workers;
use crate::scan::{scan_family, Problem, ScanConfig, ScanOutput};
use crate::Result;

/// Cap on `sum_{mu != 0} |G| / (l ln l)` over the geometric-sum sweep.
pub const R1_CAP: f64 = 2.0;
/// Cap on `sum_mu |G| / (U + l ln l)` over the geometric-sum sweep.
pub const R2_CAP: f64 = 3.0;
/// Constant `C` in the per-modulus cap `|E(q)| <= C sqrt(q) (ln q)^2`.
pub const PARITY_ERROR_CONSTANT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    /// One row per instance.
    pub csv: String,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }

    pub fn summary(&self) -> String {
        format!("{}: {}/{} pass", self.name, self.passed, self.total)
    }
}

fn join(v: &[impl ToString]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn nonzero_exponent(rng: &mut ChaCha8Rng, max: i64) -> i64 {
    loop {
        let k = rng.random_range(-max..=max);
        if k != 0 {
            return k;
        }
    }
}

// Stream tags keep the batteries' random streams independent under one seed.
const ORACLE_STREAM: u64 = 1;
const PARTITION_STREAM: u64 = 2;
const CRT_STREAM: u64 = 3;
const WEIL_STREAM: u64 = 4;
const UBOUND_STREAM: u64 = 5;

/// Direct enumeration against the congruence-system count on random
/// instances with `gcd(m_j, q) = 1`, `s in {2, 3}`, `|k_j| <= 4`, `m_j <= 6`.
pub fn oracle_equivalence(workers: &Workers, seed: u64, instances: usize, q_max: u64) -> Result<CheckOutcome> {
    let mut rng = rng_for(seed, ORACLE_STREAM);
    let mut cases = Vec::with_capacity(instances);
    for _ in 0..instances {
        let q = rng.random_range(2..=q_max);
        let s = rng.random_range(2..=3usize);
        let k: Vec<i64> = (0..s).map(|_| nonzero_exponent(&mut rng, 4)).collect();
        let m: Vec<u64> = (0..s)
            .map(|_| loop {
                let m = rng.random_range(1..=6u64);
                if gcd(m, q) == 1 {
                    break m;
                }
            })
            .collect();
        let a: Vec<i64> = m.iter().map(|&mj| rng.random_range(0..mj as i64)).collect();
        cases.push((Modulus::new(q)?, ProblemSpec::new(k, m, a)?));
    }
    let results = workers.install(|| {
        cases
            .par_iter()
            .map(|(q, spec)| {
                Ok((
                    count_direct(q, spec),
                    lehmer_core::counting::count_via_congruence_system(q, spec)?,
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut csv = String::from("q,k,m,a,direct,system\n");
    let mut passed = 0;
    for ((q, spec), (direct, system)) in cases.iter().zip(&results) {
        passed += usize::from(direct == system);
        writeln!(
            csv,
            "{},{},{},{},{direct},{system}",
            q.q(),
            join(spec.k()),
            join(spec.m()),
            join(spec.a())
        )
        .unwrap();
    }
    Ok(CheckOutcome {
        name: "oracle-equivalence",
        passed,
        total: instances,
        csv,
    })
}

/// Sum of `N_q(m, a; k)` over every residue vector `a` equals `phi(q)`;
/// `s = 2`, `m_j <= 4`, moduli not required to be coprime to `q`.
pub fn partition_identity(workers: &Workers, seed: u64, instances: usize, q_max: u64) -> Result<CheckOutcome> {
    let mut rng = rng_for(seed, PARTITION_STREAM);
    let mut cases = Vec::with_capacity(instances);
    for _ in 0..instances {
        let q = rng.random_range(2..=q_max);
        let k: Vec<i64> = (0..2).map(|_| nonzero_exponent(&mut rng, 4)).collect();
        let m: Vec<u64> = (0..2).map(|_| rng.random_range(1..=4u64)).collect();
        cases.push((Modulus::new(q)?, ProblemSpec::new(k, m, vec![0, 0])?));
    }
    let sums = workers.install(|| {
        cases
            .par_iter()
            .map(|(q, base)| {
                let mut total = 0;
                for a0 in 0..base.m()[0] as i64 {
                    for a1 in 0..base.m()[1] as i64 {
                        total += count_direct(q, &base.with_residues(&[a0, a1])?);
                    }
                }
                Ok(total)
            })
            .collect::<Result<Vec<u64>>>()
    })?;
    let mut csv = String::from("q,k,m,coprime,cell_sum,phi\n");
    let mut passed = 0;
    for ((q, spec), sum) in cases.iter().zip(&sums) {
        passed += usize::from(*sum == q.phi());
        writeln!(
            csv,
            "{},{},{},{},{sum},{}",
            q.q(),
            join(spec.k()),
            join(spec.m()),
            spec.is_coprime_to(q),
            q.phi()
        )
        .unwrap();
    }
    Ok(CheckOutcome {
        name: "partition-identity",
        passed,
        total: instances,
        csv,
    })
}

/// Direct against CRT-factored exponential sums on random composite moduli,
/// `s in {2, 3}`, `|k_j| <= 5`, coefficients uniform on the symmetric range.
pub fn crt_agreement(workers: &Workers, seed: u64, instances: usize, q_max: u64) -> Result<CheckOutcome> {
    let mut rng = rng_for(seed, CRT_STREAM);
    let mut cases = Vec::with_capacity(instances);
    while cases.len() < instances {
        let q = rng.random_range(4..=q_max);
        if is_prime(q) {
            continue;
        }
        let s = rng.random_range(2..=3usize);
        let k: Vec<i64> = (0..s).map(|_| nonzero_exponent(&mut rng, 5)).collect();
        let lambda: Vec<i64> = (0..s)
            .map(|_| rng.random_range(lehmer_core::expsum::symmetric_range(q)))
            .collect();
        cases.push(ExpSumArgs::new(Modulus::new(q)?, k, lambda)?);
    }
    let sums = workers.install(|| {
        cases
            .par_iter()
            .map(|a| Ok((exp_sum_direct(a), exp_sum_crt(a, &build_crt_plan(a.modulus()))?)))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut csv = String::from("q,k,lambda,direct_re,direct_im,crt_re,crt_im,abs_diff\n");
    let mut passed = 0;
    for (a, (d, c)) in cases.iter().zip(&sums) {
        let diff = Complex::new(d.re - c.re, d.im - c.im).abs();
        passed += usize::from(diff <= 1e-6f64.max(1e-6 * d.abs()));
        writeln!(
            csv,
            "{},{},{},{:e},{:e},{:e},{:e},{:e}",
            a.modulus().q(),
            join(a.exponents()),
            join(a.coefficients()),
            d.re,
            d.im,
            c.re,
            c.im,
            diff
        )
        .unwrap();
    }
    Ok(CheckOutcome {
        name: "crt-agreement",
        passed,
        total: instances,
        csv,
    })
}

/// Orthogonality detector for every `l` in `[1, l_max]` and `u in [0, l)`.
pub fn orthogonality(l_max: u64) -> CheckOutcome {
    let mut csv = String::from("l,pass\n");
    let mut passed = 0;
    for l in 1..=l_max {
        let ok = orthogonality_check(l);
        passed += usize::from(ok);
        writeln!(csv, "{l},{ok}").unwrap();
    }
    CheckOutcome {
        name: "orthogonality",
        passed,
        total: l_max as usize,
        csv,
    }
}

/// Geometric-sum bound ratios over `l = 3, ..., l_max` (growth factor 1.5)
/// and `U in {0, l/2, l, 10 l}`, against [`R1_CAP`] and [`R2_CAP`].
pub fn geometric_bounds(l_max: u64) -> Result<CheckOutcome> {
    let grid = geometric_grid(3, l_max, 1.5);
    let rows = bound_ratio_sweep(&grid, &[(0, 1), (1, 2), (1, 1), (10, 1)])?;
    let mut csv = String::from("l,U,r1,r2\n");
    let mut passed = 0;
    for r in &rows {
        passed += usize::from(r.r1 <= R1_CAP && r.r2 <= R2_CAP);
        writeln!(csv, "{},{},{:e},{:e}", r.l, r.u, r.r1, r.r2).unwrap();
    }
    Ok(CheckOutcome {
        name: "geometric-bounds",
        passed,
        total: rows.len(),
        csv,
    })
}

/// `|K(a, b; q)| <= 2 sqrt(q)` for primes `q in [5, q_max]` and `pairs`
/// random `(a, b)` with `gcd(ab, q) = 1` per prime.
pub fn weil(workers: &Workers, seed: u64, q_max: u64, pairs: usize) -> Result<CheckOutcome> {
    let primes = Family::Prime.members(5, q_max);
    let rows = workers.install(|| {
        primes
            .par_iter()
            .map(|&q| {
                let m = Modulus::new(q)?;
                let mut rng = rng_for(seed ^ WEIL_STREAM, q);
                let mut out = Vec::with_capacity(pairs);
                for _ in 0..pairs {
                    let a = rng.random_range(1..q as i64);
                    let b = rng.random_range(1..q as i64);
                    let s = exp_sum_direct(&ExpSumArgs::new(m.clone(), vec![1, -1], vec![a, b])?);
                    out.push((q, a, b, s.abs()));
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut csv = String::from("q,a,b,abs_sum,bound\n");
    let (mut passed, mut total) = (0, 0);
    for (q, a, b, abs) in rows.into_iter().flatten() {
        let bound = 2.0 * (q as f64).sqrt();
        total += 1;
        passed += usize::from(abs <= bound + 1e-6);
        writeln!(csv, "{q},{a},{b},{abs:e},{bound:e}").unwrap();
    }
    Ok(CheckOutcome {
        name: "weil-bound",
        passed,
        total,
        csv,
    })
}

/// `|U_1 ... U_s - q^s / (m_1 ... m_s)| <= s q^{s-1}` in exact arithmetic on
/// random `q <= q_max`, `s in {2, 3}`, `1 <= m_j < q`.
pub fn closing_estimate(seed: u64, instances: usize, q_max: u64) -> Result<CheckOutcome> {
    let mut rng = rng_for(seed, UBOUND_STREAM);
    let mut csv = String::from("q,m,a,U,deviation,cap\n");
    let mut passed = 0;
    for _ in 0..instances {
        let q = rng.random_range(3..=q_max);
        let s = rng.random_range(2..=3usize);
        let m: Vec<u64> = (0..s).map(|_| rng.random_range(1..q.min(100))).collect();
        let a: Vec<i64> = m.iter().map(|&mj| rng.random_range(0..mj as i64)).collect();
        let spec = ProblemSpec::new(vec![1; s], m, a)?;
        let b = u_bounds(&Modulus::new(q)?, &spec)?;
        let ok = b.within(q)?;
        passed += usize::from(ok);
        let cap = s as u128 * (q as u128).pow(s as u32 - 1);
        writeln!(
            csv,
            "{q},{},{},{},{},{cap}",
            join(spec.m()),
            join(spec.a()),
            join(&b.u),
            b.deviation
        )
        .unwrap();
    }
    Ok(CheckOutcome {
        name: "closing-estimate",
        passed,
        total: instances,
        csv,
    })
}

/// Scan plus fit for one error-term experiment.
#[derive(Debug, Clone)]
pub struct TheoremRun {
    pub scan: ScanOutput,
    pub fit: ExponentFit,
    /// Moduli whose `|E(q)|` exceeds the per-point cap, when one applies.
    pub cap_violations: Vec<u64>,
}

pub fn parity_error_cap(q: u64) -> f64 {
    let q = q as f64;
    PARITY_ERROR_CONSTANT * q.sqrt() * q.ln().powi(2)
}

/// Same-parity counts of `(n^k, n^{-k})` over the odd primes in
/// `[q_min, q_max]`, the per-point cap, and the log-log fit.
pub fn parity_theorem(workers: &Workers, k: i64, q_min: u64, q_max: u64, seed: u64) -> Result<TheoremRun> {
    let cfg = ScanConfig {
        family: Family::Prime,
        q_min,
        q_max,
        problem: Problem::Parity { k },
        samples: 0,
        seed,
        work_budget: f64::INFINITY,
        timing: false,
    };
    let scan = scan_family(workers, &cfg)?;
    let fit = fit_exponent(&scan.records)?;
    let cap_violations = scan
        .records
        .iter()
        .filter(|r| r.abs_error > parity_error_cap(r.q))
        .map(|r| r.q)
        .collect();
    Ok(TheoremRun {
        scan,
        fit,
        cap_violations,
    })
}

/// `N_q(m, a; k)` over the primes in `[q_min, q_max]` coprime to every
/// `m_j`, and the log-log fit of its error.
pub fn count_theorem(workers: &Workers, spec: &ProblemSpec, q_min: u64, q_max: u64, seed: u64) -> Result<TheoremRun> {
    let cfg = ScanConfig {
        family: Family::Prime,
        q_min,
        q_max,
        problem: Problem::Count { spec: spec.clone() },
        samples: 0,
        seed,
        work_budget: f64::INFINITY,
        timing: false,
    };
    let scan = scan_family(workers, &cfg)?;
    let fit = fit_exponent(&scan.records)?;
    Ok(TheoremRun {
        scan,
        fit,
        cap_violations: Vec::new(),
    })
}
