//! Worker pool and the data-parallel versions of the core enumerations.
//!
//! Integer counts are split over fixed residue chunks and summed, which is
//! exact under any schedule. Exponential sums reuse the core's block
//! decomposition and merge block partials in block order, so the result is
//! bit-identical to the sequential evaluation for every worker count.

use std::ops::Range;

use lehmer_core::counting::{
    count_direct_range, parity_counts_range, parity_report_from_counts, CongruenceSystem, CountReport, ParityReport,
    ProblemSpec,
};
use lehmer_core::expsum::{exp_sum_blocks, exp_sum_partial, merge_partials, ComplexSum, ExpSumArgs};
use lehmer_core::ntcore::Modulus;
use rayon::prelude::*;

use crate::Result;

const COUNT_CHUNK: u64 = 1 << 16;

fn chunks(q: u64) -> Vec<Range<u64>> {
    (0..q.div_ceil(COUNT_CHUNK))
        .map(|i| (i * COUNT_CHUNK).max(1)..((i + 1) * COUNT_CHUNK).min(q))
        .collect()
}

pub struct Workers {
    pool: rayon::ThreadPool,
    jobs: usize,
}

impl Workers {
    pub fn new(jobs: usize) -> Result<Self> {
        let jobs = jobs.max(1);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
        Ok(Workers { pool, jobs })
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    pub fn count_direct(&self, q: &Modulus, spec: &ProblemSpec) -> u64 {
        self.install(|| {
            chunks(q.q())
                .into_par_iter()
                .map(|r| count_direct_range(q, spec, r))
                .sum()
        })
    }

    pub fn count_via_congruence_system(&self, q: &Modulus, spec: &ProblemSpec) -> Result<u64> {
        let system = CongruenceSystem::new(q, spec)?;
        Ok(self.install(|| chunks(q.q()).into_par_iter().map(|r| system.count_range(r)).sum()))
    }

    pub fn count_report(&self, q: &Modulus, spec: &ProblemSpec) -> Result<CountReport> {
        Ok(CountReport::from_count(q, spec, self.count_direct(q, spec))?)
    }

    pub fn parity_report(&self, q: &Modulus, k: i64) -> Result<ParityReport> {
        let parts = self.install(|| {
            chunks(q.q())
                .into_par_iter()
                .map(|r| parity_counts_range(q, k, r))
                .collect::<Vec<_>>()
        });
        let (mut even, mut odd) = (0, 0);
        for part in parts {
            let (e, o) = part?;
            even += e;
            odd += o;
        }
        Ok(parity_report_from_counts(q, k, even, odd)?)
    }

    pub fn exp_sum_direct(&self, args: &ExpSumArgs) -> ComplexSum {
        let blocks: Vec<_> = exp_sum_blocks(args.modulus().q()).collect();
        let partials = self.install(|| {
            blocks
                .into_par_iter()
                .map(|r| exp_sum_partial(args, r))
                .collect::<Vec<_>>()
        });
        merge_partials(&partials)
    }
}
