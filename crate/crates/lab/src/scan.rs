//! Sweeps of a counting problem over a family of moduli.

use std::time::Instant;

use lehmer_core::analysis::{lemma_ratio_row, Family, ScanRecord};
use lehmer_core::counting::{count_direct, parity_report, CountReport, ProblemSpec};
use lehmer_core::ntcore::Modulus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::par::Workers;
use crate::{Error, Result};

pub const MAX_SCAN_MODULUS: u64 = 10_000_000;

/// Default cap on the estimated number of modular operations per run.
pub const DEFAULT_WORK_BUDGET: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    /// `N_q(m, a; k)` against `phi(q) / (m_1 ... m_s)`.
    Count { spec: ProblemSpec },
    /// Same-parity count of `(n^k, n^{-k})` against `phi(q) / 2`.
    Parity { k: i64 },
}

impl Problem {
    fn dimension(&self) -> usize {
        match self {
            Problem::Count { spec } => spec.dimension(),
            Problem::Parity { .. } => 2,
        }
    }

    /// Exponent vector used for the exponential-sum samples.
    pub fn exponents(&self) -> Vec<i64> {
        match self {
            Problem::Count { spec } => spec.k().to_vec(),
            Problem::Parity { k } => vec![*k, -*k],
        }
    }

    /// Why `q` cannot be used for a bound check, if it cannot.
    fn inadmissible(&self, q: &Modulus) -> Option<&'static str> {
        match self {
            Problem::Count { spec } if !spec.is_coprime_to(q) => Some("gcd(m_j, q) > 1"),
            Problem::Parity { .. } if q.q().is_multiple_of(2) => Some("even modulus"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub family: Family,
    pub q_min: u64,
    pub q_max: u64,
    pub problem: Problem,
    /// Random coefficient vectors per modulus for the exponential-sum
    /// bound ratio; 0 disables sampling.
    pub samples: usize,
    pub seed: u64,
    pub work_budget: f64,
    /// Record the wall time of each modulus (otherwise 0).
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub q: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub skipped: Vec<Skipped>,
}

/// Estimated modular operations: about `s` powers per unit per pass, one
/// pass for the count and one per sampled exponential sum.
pub fn estimate_work(moduli: &[u64], s: usize, samples: usize) -> f64 {
    let per_q = s as f64 * (1 + samples) as f64;
    moduli.iter().map(|&q| q as f64 * per_q).sum()
}

pub fn scan_family(workers: &Workers, cfg: &ScanConfig) -> Result<ScanOutput> {
    if cfg.q_min < 2 || cfg.q_max > MAX_SCAN_MODULUS {
        return Err(Error::Invalid(format!(
            "scan range must satisfy 2 <= q-min <= q-max <= {MAX_SCAN_MODULUS}, got [{}, {}]",
            cfg.q_min, cfg.q_max
        )));
    }
    if cfg.samples > 0 && cfg.problem.dimension() < 2 {
        return Err(Error::Invalid("exponential-sum samples need s >= 2".into()));
    }
    let members = cfg.family.members(cfg.q_min, cfg.q_max);
    let estimated = estimate_work(&members, cfg.problem.dimension(), cfg.samples);
    if estimated > cfg.work_budget {
        return Err(Error::RangeTooLarge {
            estimated,
            budget: cfg.work_budget,
        });
    }

    let mut skipped = Vec::new();
    let mut admissible = Vec::with_capacity(members.len());
    for q in members {
        let m = Modulus::new(q)?;
        match cfg.problem.inadmissible(&m) {
            Some(reason) => skipped.push(Skipped {
                q,
                reason: reason.into(),
            }),
            None => admissible.push(m),
        }
    }

    let records = workers.install(|| {
        admissible
            .par_iter()
            .map(|m| scan_one(m, cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ScanOutput { records, skipped })
}

fn scan_one(q: &Modulus, cfg: &ScanConfig) -> Result<ScanRecord> {
    let started = Instant::now();
    let (count, main, error) = match &cfg.problem {
        Problem::Count { spec } => {
            let report = CountReport::from_count(q, spec, count_direct(q, spec))?;
            (report.count, report.main_term.to_f64(), report.error)
        }
        Problem::Parity { k } => {
            let report = parity_report(q, *k)?;
            (report.same_parity, report.main.to_f64(), report.error)
        }
    };
    let lemma_ratio_max = if cfg.samples > 0 {
        Some(lemma_ratio_row(q, &cfg.problem.exponents(), cfg.samples, cfg.seed)?.max_ratio)
    } else {
        None
    };
    let seconds = if cfg.timing {
        started.elapsed().as_secs_f64()
    } else {
        0.0
    };
    Ok(ScanRecord {
        q: q.q(),
        family: cfg.family,
        phi: q.phi(),
        count,
        main,
        error,
        abs_error: error.abs(),
        lemma_ratio_max,
        seconds,
    })
}
